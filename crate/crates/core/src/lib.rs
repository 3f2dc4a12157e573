//! Classical simulation of a quantum circuit followed by sparse classical
//! post-processing.
//!
//! Given a circuit `C` on `n` qubits, of which the first `m` are measured, and
//! a Boolean function `f` on `m` bits with few non-zero Fourier coefficients,
//! the acceptance probability `p(C, f) = sum_x f(x) p_m(x)` satisfies
//!
//! ```text
//! p(C, f) = 1/2 - 1/2 sum_s g^(s) <0|C^dag (Z(s) (x) I) C|0>,   g = (-1)^f.
//! ```
//!
//! [`sim::simulate`] estimates it by recovering the significant coefficients of
//! `g` ([`boolfn`]), estimating each one, and querying a Pauli-expectation
//! backend ([`backends`], [`commuting`]) per index. [`oracle`] provides the
//! dense statevector ground truth used throughout the tests.

pub mod backends;
pub mod bits;
pub mod boolfn;
pub mod circuit;
pub mod commuting;
pub mod defaults;
pub mod error;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod sim;
pub mod verify;

pub use bits::Bits;
pub use error::{Error, Result};
