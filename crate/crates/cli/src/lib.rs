//! Grid files, instance generators, the benchmark harness and the
//! `kmatch2d` command line on top of `kmatch2d-core`.
//!
//! Offsets are printed as `x y d` with `x` the column and `y` the row of the
//! pattern's top-left cell in the text, ordered row by row.

pub mod bench;
pub mod cmd;
pub mod gen;
pub mod gridio;
pub mod report;
