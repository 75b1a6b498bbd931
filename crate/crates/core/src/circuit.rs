//! Circuit representation, the line-based text format, inversion and the
//! decision-problem transforms.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! mode z2            # or: mode mixed
//! qubits 3
//! h 0
//! ccx 0 1 2          # controls 0 and 1, target 2
//! ```
//!
//! Gates: `x q`, `h q`, `cx c t`, `ccx c1 c2 t`, `t q` (same as `p 1 q`) and
//! `p k q` with `k` in `0..=7`. Gates apply in file order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// X, CNOT, Toffoli and Hadamard; amplitudes are real.
    Z2,
    /// X, CNOT, Hadamard and the diagonal phase gates `P(k)`.
    Mixed,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Z2 => "z2",
            Mode::Mixed => "mixed",
        })
    }
}

impl FromStr for Mode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "z2" => Ok(Mode::Z2),
            "mixed" => Ok(Mode::Mixed),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    H(usize),
    /// `diag(1, w^power)` with `w = exp(i*pi/4)`: `P(1) = T`, `P(2) = S`,
    /// `P(4) = Z`, `P(7) = T^dagger`.
    Phase {
        power: u8,
        qubit: usize,
    },
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Toffoli {
            controls: [c1, c2],
            target,
        }
    }

    /// Phase gate; the power is taken mod 8.
    pub fn phase(power: u8, qubit: usize) -> Self {
        Gate::Phase {
            power: power % 8,
            qubit,
        }
    }

    pub fn t(qubit: usize) -> Self {
        Gate::phase(1, qubit)
    }

    /// Qubits in operand order (controls first, target last).
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::H(q) | Gate::Phase { qubit: q, .. } => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], target],
        }
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits().contains(&qubit)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::Cnot { .. } => "cx",
            Gate::Toffoli { .. } => "ccx",
            Gate::H(_) => "h",
            Gate::Phase { .. } => "p",
        }
    }

    pub fn allowed_in(&self, mode: Mode) -> bool {
        match self {
            Gate::X(_) | Gate::Cnot { .. } | Gate::H(_) => true,
            Gate::Toffoli { .. } => mode == Mode::Z2,
            Gate::Phase { .. } => mode == Mode::Mixed,
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Phase { power, qubit } => Gate::phase((8 - power % 8) % 8, qubit),
            g => g,
        }
    }

    fn validate(&self, num_qubits: usize, mode: Mode) -> Result<()> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    line: None,
                    qubit: q,
                    num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit {
                    line: None,
                    qubit: q,
                });
            }
        }
        if !self.allowed_in(mode) {
            return Err(Error::IllegalGate {
                line: None,
                gate: self.name().to_string(),
                mode,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "x {q}"),
            Gate::H(q) => write!(f, "h {q}"),
            Gate::Cnot { control, target } => write!(f, "cx {control} {target}"),
            Gate::Toffoli { controls, target } => {
                write!(f, "ccx {} {} {target}", controls[0], controls[1])
            }
            Gate::Phase { power, qubit } => write!(f, "p {power} {qubit}"),
        }
    }
}

/// An ordered gate list over `num_qubits` qubits. The first gate is applied
/// first. Always valid for its declared mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    mode: Mode,
}

impl Circuit {
    pub fn new(mode: Mode, num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::NoQubits);
        }
        for g in &gates {
            g.validate(num_qubits, mode)?;
        }
        Ok(Circuit {
            num_qubits,
            gates,
            mode,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn hadamard_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::H(_)))
            .count()
    }

    /// Reversed gate list with every gate inverted.
    pub fn invert(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            mode: self.mode,
        }
    }

    /// `U`, then `CNOT(answer -> ancilla)`, then `U^dagger` on `N + 1`
    /// qubits; the ancilla is qubit `N`. For a `U` that deterministically
    /// writes `f(a)` to `answer_qubit`, input `|a, 0>` maps to `|a, f(a)>`.
    pub fn decision_transform(&self, answer_qubit: usize) -> Result<Circuit> {
        self.check_answer(answer_qubit)?;
        let ancilla = self.num_qubits;
        let mut gates = Vec::with_capacity(2 * self.gates.len() + 1);
        gates.extend_from_slice(&self.gates);
        gates.push(Gate::cnot(answer_qubit, ancilla));
        gates.extend(self.invert().gates);
        Circuit::new(self.mode, self.num_qubits + 1, gates)
    }

    /// Like [`Circuit::decision_transform`] but with the ancilla prepared in
    /// `|->` by `X, H` and returned by `H, X`, so the answer is kicked back
    /// as a sign: `<a, 0| C |a, 0> = (-1)^f(a)`.
    pub fn sign_transform(&self, answer_qubit: usize) -> Result<Circuit> {
        self.check_answer(answer_qubit)?;
        let ancilla = self.num_qubits;
        let mut gates = Vec::with_capacity(2 * self.gates.len() + 5);
        gates.push(Gate::X(ancilla));
        gates.push(Gate::H(ancilla));
        gates.extend_from_slice(&self.gates);
        gates.push(Gate::cnot(answer_qubit, ancilla));
        gates.extend(self.invert().gates);
        gates.push(Gate::H(ancilla));
        // H|-> = |1>; bring the ancilla back to |0>
        gates.push(Gate::X(ancilla));
        Circuit::new(self.mode, self.num_qubits + 1, gates)
    }

    fn check_answer(&self, answer_qubit: usize) -> Result<()> {
        if answer_qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                line: None,
                qubit: answer_qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn check_input(&self, bits: &BasisString) -> Result<()> {
        if bits.len() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                found: bits.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn expect_mode(&self, expected: Mode) -> Result<()> {
        if self.mode != expected {
            return Err(Error::ModeMismatch {
                expected,
                found: self.mode,
            });
        }
        Ok(())
    }
}

/// Renders the circuit in the text format; `parse_circuit` reads it back.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode {}", self.mode)?;
        writeln!(f, "qubits {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, line) = lines.next().ok_or(Error::Syntax {
        line: 1,
        message: "missing `mode` line".into(),
    })?;
    let mode = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["mode", m] => m.parse::<Mode>().map_err(|_| Error::Syntax {
            line: line_no,
            message: format!("unknown mode `{m}`, expected `z2` or `mixed`"),
        })?,
        _ => {
            return Err(Error::Syntax {
                line: line_no,
                message: "expected `mode z2` or `mode mixed`".into(),
            })
        }
    };

    let (line_no, line) = lines.next().ok_or(Error::Syntax {
        line: line_no + 1,
        message: "missing `qubits` line".into(),
    })?;
    let num_qubits = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["qubits", n] => parse_index(n, line_no)?,
        _ => {
            return Err(Error::Syntax {
                line: line_no,
                message: "expected `qubits N`".into(),
            })
        }
    };
    if num_qubits == 0 {
        return Err(Error::NoQubits);
    }

    let mut gates = Vec::new();
    for (line_no, line) in lines {
        let gate = parse_gate(line, line_no)?;
        gate.validate(num_qubits, mode)
            .map_err(|e| e.at_line(line_no))?;
        gates.push(gate);
    }
    Circuit::new(mode, num_qubits, gates)
}

fn parse_gate(line: &str, line_no: usize) -> Result<Gate> {
    let mut parts = line.split_whitespace();
    let name = parts.next().unwrap_or_default();
    let args = parts
        .map(|a| parse_index(a, line_no))
        .collect::<Result<Vec<_>>>()?;
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Syntax {
                line: line_no,
                message: format!("`{name}` takes {n} operand(s), got {}", args.len()),
            })
        }
    };
    Ok(match name {
        "x" => {
            arity(1)?;
            Gate::X(args[0])
        }
        "h" => {
            arity(1)?;
            Gate::H(args[0])
        }
        "cx" => {
            arity(2)?;
            Gate::cnot(args[0], args[1])
        }
        "ccx" => {
            arity(3)?;
            Gate::toffoli(args[0], args[1], args[2])
        }
        "t" => {
            arity(1)?;
            Gate::t(args[0])
        }
        "p" => {
            arity(2)?;
            if args[0] > 7 {
                return Err(Error::Syntax {
                    line: line_no,
                    message: format!("phase power {} not in 0..=7", args[0]),
                });
            }
            Gate::phase(args[0] as u8, args[1])
        }
        other => {
            return Err(Error::UnknownGate {
                line: line_no,
                name: other.to_string(),
            })
        }
    })
}

fn parse_index(s: &str, line_no: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Syntax {
        line: line_no,
        message: format!("expected a non-negative integer, got `{s}`"),
    })
}

/// A computational basis state. Written as a bit string whose leftmost
/// character is qubit 0; as an index, qubit 0 is the least significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisString(Vec<bool>);

impl BasisString {
    pub fn new(bits: Vec<bool>) -> Self {
        BasisString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BasisString(vec![false; n])
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        BasisString((0..n).map(|j| (index >> j) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as u64) << j))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, qubit: usize) -> bool {
        self.0[qubit]
    }

    /// Appends one bit (the ancilla of the decision transforms).
    pub fn with_bit(&self, bit: bool) -> Self {
        let mut bits = self.0.clone();
        bits.push(bit);
        BasisString(bits)
    }
}

impl FromStr for BasisString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidBasisString(s.to_string()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBasisString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BasisString)
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BasisString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
