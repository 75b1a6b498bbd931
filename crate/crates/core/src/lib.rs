//! Exact sum-over-paths amplitudes for quantum circuits.
//!
//! A circuit over a balanced gate set is compiled, for a fixed input basis
//! state, into polynomials over Z2: one output polynomial per qubit and a
//! phase polynomial. The transition amplitude `<b|U|a>` is then a normalized
//! difference of two solution counts (Toffoli/Hadamard circuits) or a
//! combination of eight counts in `Z[w]`, `w = exp(i*pi/4)` (T/H/CNOT
//! circuits). A dense statevector simulator serves as the independent
//! reference.

pub mod circuit;
pub mod compile;
pub mod counting;
pub mod cyclotomic;
pub mod engine;
mod error;
pub mod gf2poly;
pub mod mixed;
pub mod montecarlo;
pub mod random;
pub mod refsim;

pub use circuit::{BasisString, Circuit, Gate, Mode};
pub use compile::PathSystem;
pub use counting::{CountOptions, CountPair, Distribution, RealAmplitude};
pub use cyclotomic::CyclotomicValue;
pub use engine::Amplitude;
pub use error::{Error, Result};
pub use gf2poly::{Gf2Poly, Monomial};
pub use mixed::{MixedPhase, MixedSystem};
