pub mod error;
pub mod mer;
pub mod mpnum;
pub mod oppq;
pub mod par;
pub mod quad;
pub mod refweight;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
