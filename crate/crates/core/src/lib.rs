pub mod cli;
pub mod conditions;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod solver;
pub mod stability;
pub mod sweep;
