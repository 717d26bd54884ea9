pub mod doc;
pub mod dot;
pub mod families;
pub mod generate;
pub mod laws;
pub mod report;
pub mod runner;
