pub mod canon;
pub mod cli;
pub mod poly;
pub mod proof;
pub mod semantics;
pub mod separate;
pub mod term;
