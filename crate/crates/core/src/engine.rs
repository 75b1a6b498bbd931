//! Mode-independent entry points and the path-sum vs. statevector check.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::circuit::{BasisString, Circuit, Mode};
use crate::compile::compile;
use crate::counting::{self, CountOptions, RealAmplitude};
use crate::cyclotomic::CyclotomicValue;
use crate::error::Result;
use crate::mixed::compile_mixed;
use crate::refsim;

/// Agreement required between the exact path sum and the statevector.
pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amplitude {
    Real(RealAmplitude),
    Cyclotomic(CyclotomicValue),
}

impl Amplitude {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Amplitude::Real(r) => Complex64::new(r.to_f64(), 0.0),
            Amplitude::Cyclotomic(c) => c.to_complex(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Amplitude::Real(r) => r.gap == 0,
            Amplitude::Cyclotomic(c) => c.is_zero(),
        }
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amplitude::Real(r) => write!(f, "{r}"),
            Amplitude::Cyclotomic(c) if c.is_zero() => write!(f, "{c}"),
            Amplitude::Cyclotomic(c) => write!(f, "{c}, w = exp(i*pi/4)"),
        }
    }
}

/// `<b|U|a>` through the path-sum pipeline of the circuit's mode.
pub fn amplitude(
    c: &Circuit,
    a: &BasisString,
    b: &BasisString,
    opts: &CountOptions,
) -> Result<Amplitude> {
    c.check_input(b)?;
    match c.mode() {
        Mode::Z2 => counting::amplitude(&compile(c, a)?, b, opts).map(Amplitude::Real),
        Mode::Mixed => compile_mixed(c, a)?
            .amplitude(b, opts)
            .map(Amplitude::Cyclotomic),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub input: BasisString,
    pub output: BasisString,
    pub pathsum: Complex64,
    pub reference: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checked: usize,
    pub max_error: f64,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn merge(&mut self, other: VerifyReport) {
        self.checked += other.checked;
        self.max_error = self.max_error.max(other.max_error);
        self.mismatches.extend(other.mismatches);
    }
}

/// Compares path-sum and statevector amplitudes on the given `(a, b)` pairs.
pub fn verify_pairs(
    c: &Circuit,
    pairs: &[(BasisString, BasisString)],
    opts: &CountOptions,
    tolerance: f64,
) -> Result<VerifyReport> {
    let mut by_input: BTreeMap<&BasisString, Vec<&BasisString>> = BTreeMap::new();
    for (a, b) in pairs {
        by_input.entry(a).or_default().push(b);
    }
    let mut report = VerifyReport::default();
    for (a, outs) in by_input {
        let state = refsim::simulate(c, a)?;
        let z2 = match c.mode() {
            Mode::Z2 => Some(compile(c, a)?),
            Mode::Mixed => None,
        };
        let mixed = match c.mode() {
            Mode::Mixed => Some(compile_mixed(c, a)?),
            Mode::Z2 => None,
        };
        for b in outs {
            let pathsum = match (&z2, &mixed) {
                (Some(ps), _) => Complex64::new(counting::amplitude(ps, b, opts)?.to_f64(), 0.0),
                (_, Some(ms)) => ms.amplitude(b, opts)?.to_complex(),
                _ => unreachable!(),
            };
            c.check_input(b)?;
            let reference = state.amplitude(b);
            let err = (pathsum - reference).norm();
            report.checked += 1;
            report.max_error = report.max_error.max(err);
            if err > tolerance {
                report.mismatches.push(Mismatch {
                    input: a.clone(),
                    output: b.clone(),
                    pathsum,
                    reference,
                });
            }
        }
    }
    Ok(report)
}

/// Every `(a, b)` pair; for small circuits.
pub fn verify_exhaustive(c: &Circuit, opts: &CountOptions, tolerance: f64) -> Result<VerifyReport> {
    let n = c.num_qubits();
    let dim = 1u64 << n;
    let pairs: Vec<_> = (0..dim)
        .flat_map(|a| (0..dim).map(move |b| (a, b)))
        .map(|(a, b)| (BasisString::from_index(a, n), BasisString::from_index(b, n)))
        .collect();
    verify_pairs(c, &pairs, opts, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Gate};

    #[test]
    fn example_circuits_agree_everywhere() {
        let c = parse_circuit(include_str!("../circuits/two_toffoli.circ")).unwrap();
        let r = verify_exhaustive(&c, &CountOptions::sequential(), TOLERANCE).unwrap();
        assert_eq!(r.checked, 64);
        assert!(r.passed(), "{r:?}");

        let hth = Circuit::new(
            Mode::Mixed,
            2,
            vec![Gate::H(0), Gate::t(0), Gate::H(0), Gate::cnot(0, 1)],
        )
        .unwrap();
        let r = verify_exhaustive(&hth, &CountOptions::sequential(), TOLERANCE).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn amplitude_dispatches_by_mode() {
        let c = Circuit::new(Mode::Z2, 1, vec![Gate::H(0)]).unwrap();
        let a = amplitude(
            &c,
            &"1".parse().unwrap(),
            &"1".parse().unwrap(),
            &CountOptions::default(),
        )
        .unwrap();
        assert_eq!(
            a,
            Amplitude::Real(RealAmplitude {
                gap: -1,
                half_power: 1
            })
        );
        assert!(amplitude(
            &c,
            &"1".parse().unwrap(),
            &"11".parse().unwrap(),
            &CountOptions::default()
        )
        .is_err());
    }
}
