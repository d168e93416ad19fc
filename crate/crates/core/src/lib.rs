pub mod adaptive;
pub mod channel;
pub mod code;
pub mod ensemble;
pub mod error;
pub mod level;
pub mod mc;
pub mod pauli;
pub mod threshold;

pub use error::{QecError, Result};
