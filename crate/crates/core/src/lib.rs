#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod hardy;
pub mod instrument;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod optim;
pub mod param;
pub mod presets;
pub mod qubit;
pub mod random;
pub mod scenario;
pub mod signaling;

pub use error::{Error, Result};
