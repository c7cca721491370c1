mod properties;
mod recover;
mod solve;
mod sweep;

pub use properties::properties;
pub use recover::{analytic, recover_pc};
pub use solve::{solve, verify};
pub use sweep::sweep;
