//! Close returns of nilflow orbits and constructive bounds on the average width.
//!
//! Everything here bounds the inverse average width from above through an
//! explicit tube around the orbit; the width itself is never computed.

mod good;
mod returns;
mod tube;

pub use good::*;
pub use returns::*;
pub use tube::*;
