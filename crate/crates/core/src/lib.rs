pub mod catalog;
pub mod cli;
pub mod games;
pub mod io;
pub mod linalg;
pub mod monad;
pub mod report;
pub mod structures;
pub mod translations;

pub use report::{Condition, Report, Violation};
