//! Instance recipes, generators, and property suites for the workbench.

pub mod gen;
pub mod suite;
