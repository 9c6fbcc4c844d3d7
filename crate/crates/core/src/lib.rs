//! Two-dimensional pattern matching with k mismatches.
//!
//! Given an `m x m` pattern and an `n x n` text, [`pipeline::kmismatch`]
//! reports `min(k + 1, Ham)` at every offset. The crate also ships the
//! brute-force oracle ([`gridstring::oracle_all_offsets`]) and the
//! `O(k n^2)` kangaroo baseline ([`verify::baseline_kn2`]).
//!
//! Coordinates follow the `(x, y)` convention with `x` horizontal. Grids are
//! stored row-major; linearisations used by the counting backends are
//! column-major (`x * height + y`).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod convolve;
pub mod counters;
pub mod densecount;
pub mod error;
pub mod geom;
pub mod gridstring;
pub mod periods;
pub mod pipeline;
pub mod sparsecount;
pub mod textpart;
pub mod tiling;
pub mod verify;

pub use counters::Counters;
pub use error::Error;
pub use geom::Point;
pub use gridstring::{Grid2D, OffsetCounts, Sparse2D, Sym, WILDCARD};
pub use pipeline::{kmismatch, kmismatch_with, Algo, PipelineConfig};

