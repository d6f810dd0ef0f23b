pub mod error;
pub mod optim;
pub mod special;
pub mod spectrum;
pub mod thermo;
pub mod bounds;
pub mod ufa;
pub mod verify;

pub use error::{Error, Result};
