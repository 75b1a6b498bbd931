//! Dense statevector simulator used as the reference for the path sums.
//! Qubit 0 is the least significant bit of the state index.

use num_complex::Complex64;

use crate::circuit::{BasisString, Circuit, Gate};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(a: &BasisString) -> Result<Self> {
        let n = a.len();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                num_qubits: n,
                max: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[a.to_index() as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, b: &BasisString) -> Complex64 {
        self.amplitudes[b.to_index() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn apply(&mut self, gate: &Gate) {
        let amps = &mut self.amplitudes;
        match *gate {
            Gate::X(q) => {
                let bit = 1 << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in 0..amps.len() {
                    if i & c != 0 && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
            Gate::Toffoli { controls, target } => {
                let c = (1 << controls[0]) | (1 << controls[1]);
                let t = 1 << target;
                for i in 0..amps.len() {
                    if i & c == c && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
            Gate::H(q) => {
                let bit = 1 << q;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (amps[i], amps[i | bit]);
                        amps[i] = (a0 + a1) * s;
                        amps[i | bit] = (a0 - a1) * s;
                    }
                }
            }
            Gate::Phase { power, qubit } => {
                let bit = 1 << qubit;
                let w = Complex64::from_polar(1.0, power as f64 * std::f64::consts::FRAC_PI_4);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= w;
                    }
                }
            }
        }
    }
}

pub fn simulate(c: &Circuit, a: &BasisString) -> Result<StateVector> {
    c.check_input(a)?;
    let mut state = StateVector::basis(a)?;
    for g in c.gates() {
        state.apply(g);
    }
    Ok(state)
}

/// `<b|U|a>`.
pub fn amplitude_ref(c: &Circuit, a: &BasisString, b: &BasisString) -> Result<Complex64> {
    c.check_input(b)?;
    Ok(simulate(c, a)?.amplitude(b))
}
