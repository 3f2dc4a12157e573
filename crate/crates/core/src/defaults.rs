//! Default parameters shared by the library and the command-line tool.

/// Target accuracy denominator: estimates are within `1/(2p)` of the truth.
pub const P_TARGET: u64 = 10;

/// Overall failure probability of a simulation run.
pub const DELTA: f64 = 0.01;

/// Largest number of samples a single run may plan before it is refused.
pub const SAMPLE_CAP: u64 = 10_000_000_000;

/// Backend accuracy used by `expect` when none is given.
pub const EPSILON: f64 = 0.05;

/// Environment variable that fixes the size of the worker pool.
pub const THREADS_ENV: &str = "SCPSIM_THREADS";
