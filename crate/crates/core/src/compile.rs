//! Compilation of Z2-mode circuits into polynomial systems.
//!
//! The circuit is run classically on a fixed input string with one
//! polynomial per wire. X, CNOT and Toffoli update wires by their classical
//! action. The `j`-th Hadamard (counting from 1 in gate order) replaces its
//! wire `w` by a fresh path variable `x_j` and adds `w * x_j` to the phase:
//! the wire value before the gate times the value after it.
//!
//! The amplitude is then `<b|U|a> = 2^(-h/2) * sum over x with B(x) = b of
//! (-1)^phase(x)`; see [`crate::counting`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{BasisString, Circuit, Gate, Mode};
use crate::error::{Error, Result};
use crate::gf2poly::Gf2Poly;

/// Output polynomials, phase polynomial and Hadamard count of a Z2-mode
/// circuit compiled for one input string. Path variables are `x1..=xh`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    num_path_vars: u32,
    outputs: Vec<Gf2Poly>,
    phase: Gf2Poly,
    input: BasisString,
}

impl PathSystem {
    pub fn num_path_vars(&self) -> u32 {
        self.num_path_vars
    }

    pub fn num_qubits(&self) -> usize {
        self.outputs.len()
    }

    pub fn outputs(&self) -> &[Gf2Poly] {
        &self.outputs
    }

    pub fn phase(&self) -> &Gf2Poly {
        &self.phase
    }

    pub fn input(&self) -> &BasisString {
        &self.input
    }

    /// Machine-readable form:
    /// `{"h": int, "input": bits, "outputs": [poly], "phase": poly}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PathSystemDoc::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PathSystemDoc =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.try_into()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathSystemDoc {
    pub h: u32,
    pub input: BasisString,
    pub outputs: Vec<String>,
    pub phase: String,
}

impl From<&PathSystem> for PathSystemDoc {
    fn from(ps: &PathSystem) -> Self {
        PathSystemDoc {
            h: ps.num_path_vars,
            input: ps.input.clone(),
            outputs: ps.outputs.iter().map(ToString::to_string).collect(),
            phase: ps.phase.to_string(),
        }
    }
}

impl TryFrom<PathSystemDoc> for PathSystem {
    type Error = Error;

    fn try_from(doc: PathSystemDoc) -> Result<Self> {
        if doc.outputs.len() != doc.input.len() {
            return Err(Error::Document(format!(
                "{} outputs for a {}-bit input",
                doc.outputs.len(),
                doc.input.len()
            )));
        }
        let outputs = doc
            .outputs
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Gf2Poly>>>()?;
        let phase: Gf2Poly = doc.phase.parse()?;
        let in_range = |p: &Gf2Poly| p.support().iter().all(|&v| v >= 1 && v <= doc.h);
        if !outputs.iter().all(in_range) || !in_range(&phase) {
            return Err(Error::Document(format!(
                "polynomial uses a variable outside x1..x{}",
                doc.h
            )));
        }
        Ok(PathSystem {
            num_path_vars: doc.h,
            outputs,
            phase,
            input: doc.input,
        })
    }
}

pub fn compile(c: &Circuit, a: &BasisString) -> Result<PathSystem> {
    c.expect_mode(Mode::Z2)?;
    c.check_input(a)?;
    let mut wires: Vec<Gf2Poly> = a.bits().iter().map(|&b| Gf2Poly::constant(b)).collect();
    let mut phase = Gf2Poly::zero();
    let mut h = 0u32;
    for gate in c.gates() {
        match *gate {
            Gate::X(q) => wires[q] = &wires[q] + &Gf2Poly::one(),
            Gate::Cnot { control, target } => wires[target] = &wires[target] + &wires[control],
            Gate::Toffoli { controls, target } => {
                let and = &wires[controls[0]] * &wires[controls[1]];
                wires[target] = &wires[target] + &and;
            }
            Gate::H(q) => {
                h += 1;
                let fresh = Gf2Poly::var(h);
                phase = &phase + &(&wires[q] * &fresh);
                wires[q] = fresh;
            }
            Gate::Phase { .. } => unreachable!("validated z2 circuit"),
        }
    }
    Ok(PathSystem {
        num_path_vars: h,
        outputs: wires,
        phase,
        input: a.clone(),
    })
}

/// Pads every Toffoli whose target is not next touched by a Hadamard with an
/// `H, H` pair on the target. The unitary is unchanged.
pub fn normalize(c: &Circuit) -> Result<Circuit> {
    c.expect_mode(Mode::Z2)?;
    let gates = c.gates();
    let mut out = Vec::with_capacity(gates.len());
    for (i, gate) in gates.iter().enumerate() {
        out.push(*gate);
        if let Gate::Toffoli { target, .. } = *gate {
            let next = gates[i + 1..].iter().find(|g| g.touches(target));
            if next != Some(&Gate::H(target)) {
                out.push(Gate::H(target));
                out.push(Gate::H(target));
            }
        }
    }
    Circuit::new(Mode::Z2, c.num_qubits(), out)
}

/// Term counts and degrees of a compiled system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub h: u32,
    pub output_terms: Vec<usize>,
    pub output_degrees: Vec<usize>,
    pub phase_terms: usize,
    pub phase_degree: usize,
}

impl BoundsReport {
    pub fn of(ps: &PathSystem) -> Self {
        BoundsReport {
            h: ps.num_path_vars,
            output_terms: ps.outputs.iter().map(Gf2Poly::num_terms).collect(),
            output_degrees: ps.outputs.iter().map(Gf2Poly::degree).collect(),
            phase_terms: ps.phase.num_terms(),
            phase_degree: ps.phase.degree(),
        }
    }

    /// Bounds that hold for normalized Toffoli/Hadamard circuits: at most two
    /// terms of degree at most two per output, at most `2h` phase terms of
    /// degree at most three.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (j, (&t, &d)) in self
            .output_terms
            .iter()
            .zip(&self.output_degrees)
            .enumerate()
        {
            if t > 2 {
                v.push(format!("output {j} has {t} terms (max 2)"));
            }
            if d > 2 {
                v.push(format!("output {j} has degree {d} (max 2)"));
            }
        }
        if self.phase_terms > 2 * self.h as usize {
            v.push(format!(
                "phase has {} terms (max {})",
                self.phase_terms,
                2 * self.h
            ));
        }
        if self.phase_degree > 3 {
            v.push(format!("phase has degree {} (max 3)", self.phase_degree));
        }
        v
    }
}

#[derive(Debug, Clone, Error)]
#[error("degree/term bounds violated: {}", violations.join("; "))]
pub struct BoundViolation {
    pub report: BoundsReport,
    pub violations: Vec<String>,
}

pub fn path_count_check(ps: &PathSystem) -> std::result::Result<BoundsReport, BoundViolation> {
    let report = BoundsReport::of(ps);
    let violations = report.violations();
    if violations.is_empty() {
        Ok(report)
    } else {
        Err(BoundViolation { report, violations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    const EXAMPLE: &str = include_str!("../circuits/two_toffoli.circ");

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    #[test]
    fn example_matches_symbolic_forms_at_every_input() {
        let c = parse_circuit(EXAMPLE).unwrap();
        for idx in 0..8 {
            let a = BasisString::from_index(idx, 3);
            let ps = compile(&c, &a).unwrap();
            assert_eq!(ps.num_path_vars(), 4);
            assert_eq!(ps.outputs(), &[p("x3 + x2*x4"), p("x2"), p("x4")]);
            // a1*x1 + a2*x2 + x1*x3 + x4*(a3 + x1*x2)
            let [a1, a2, a3] = [a.get(0), a.get(1), a.get(2)];
            let expected = &(&(&(&Gf2Poly::constant(a1) * &p("x1"))
                + &(&Gf2Poly::constant(a2) * &p("x2")))
                + &p("x1*x3"))
                + &(&p("x4") * &(&Gf2Poly::constant(a3) + &p("x1*x2")));
            assert_eq!(ps.phase(), &expected, "a = {a}");
        }
    }

    #[test]
    fn trivial_compiles() {
        let empty = Circuit::new(Mode::Z2, 2, vec![]).unwrap();
        let ps = compile(&empty, &"01".parse().unwrap()).unwrap();
        assert_eq!(ps.num_path_vars(), 0);
        assert_eq!(ps.outputs(), &[Gf2Poly::zero(), Gf2Poly::one()]);
        assert!(ps.phase().is_zero());

        let h = Circuit::new(Mode::Z2, 1, vec![Gate::H(0)]).unwrap();
        let ps = compile(&h, &"1".parse().unwrap()).unwrap();
        assert_eq!(ps.num_path_vars(), 1);
        assert_eq!(ps.outputs(), &[p("x1")]);
        assert_eq!(ps.phase(), &p("x1"));
    }

    #[test]
    fn compile_rejects_bad_inputs() {
        let mixed = Circuit::new(Mode::Mixed, 1, vec![Gate::t(0)]).unwrap();
        assert!(matches!(
            compile(&mixed, &"0".parse().unwrap()),
            Err(Error::ModeMismatch { .. })
        ));
        let c = Circuit::new(Mode::Z2, 2, vec![]).unwrap();
        assert!(matches!(
            compile(&c, &"0".parse().unwrap()),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn normalize_examples() {
        let t = Gate::toffoli(0, 1, 2);
        let c = Circuit::new(Mode::Z2, 3, vec![t]).unwrap();
        assert_eq!(normalize(&c).unwrap().gates(), &[t, Gate::H(2), Gate::H(2)]);

        let c = Circuit::new(Mode::Z2, 3, vec![t, Gate::H(2)]).unwrap();
        assert_eq!(normalize(&c).unwrap(), c);

        let c = Circuit::new(Mode::Z2, 3, vec![t, t]).unwrap();
        assert_eq!(
            normalize(&c).unwrap().gates(),
            &[t, Gate::H(2), Gate::H(2), t, Gate::H(2), Gate::H(2)]
        );

        // gates on other lines do not count as the next touch of the target
        let c = Circuit::new(Mode::Z2, 3, vec![t, Gate::H(0), Gate::H(2)]).unwrap();
        assert_eq!(normalize(&c).unwrap(), c);
    }

    #[test]
    fn bounds_on_example() {
        let c = parse_circuit(EXAMPLE).unwrap();
        let ps = compile(&c, &BasisString::zeros(3)).unwrap();
        let report = path_count_check(&ps).unwrap();
        assert_eq!(report.output_terms, vec![2, 1, 1]);
        assert_eq!(report.phase_degree, 3);
        let empty = Circuit::new(Mode::Z2, 2, vec![]).unwrap();
        assert!(path_count_check(&compile(&empty, &BasisString::zeros(2)).unwrap()).is_ok());

        // CNOT fan-in is outside the Toffoli/Hadamard bound and is reported
        let fan = Circuit::new(
            Mode::Z2,
            4,
            vec![
                Gate::H(0),
                Gate::H(1),
                Gate::H(2),
                Gate::cnot(0, 3),
                Gate::cnot(1, 3),
                Gate::cnot(2, 3),
            ],
        )
        .unwrap();
        let err = path_count_check(&compile(&fan, &BasisString::zeros(4)).unwrap()).unwrap_err();
        assert_eq!(err.report.output_terms[3], 3);
    }

    #[test]
    fn json_round_trip() {
        let c = parse_circuit(EXAMPLE).unwrap();
        let ps = compile(&c, &"101".parse().unwrap()).unwrap();
        let text = ps.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["h"], 4);
        assert_eq!(v["input"], "101");
        assert_eq!(v["outputs"][0], "x3 + x2*x4");
        assert_eq!(v["phase"], "x1 + x4 + x1*x3 + x1*x2*x4");
        assert_eq!(PathSystem::from_json(&text).unwrap(), ps);
        assert!(
            PathSystem::from_json(r#"{"h":1,"input":"0","outputs":["x2"],"phase":"0"}"#).is_err()
        );
    }
}
