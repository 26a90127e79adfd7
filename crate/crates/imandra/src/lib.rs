pub mod smt;
pub mod unroll;
pub mod engine;
pub mod waterfall;
pub mod driver;
pub mod cli;
