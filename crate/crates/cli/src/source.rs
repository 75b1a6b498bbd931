//! Input files: circuit sources or compiled systems, and the amplitude
//! computations shared by several subcommands.

use std::fs;
use std::path::Path;

use pathsum::compile::{compile, normalize, PathSystem};
use pathsum::counting::{self, CountOptions, CountPair};
use pathsum::mixed::{compile_mixed, Elimination, MixedSystem};
use pathsum::{BasisString, Circuit, CyclotomicValue, Error, Mode};
use serde_json::{json, Value};

use crate::Failure;

pub enum Source {
    Circuit(Circuit),
    Compiled(System),
}

pub enum System {
    Z2(PathSystem),
    Mixed(MixedSystem),
}

pub enum Exact {
    Real(CountPair),
    Cyclotomic(CyclotomicValue),
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

/// A JSON document from `compile --format json`, or a circuit source.
pub fn load(path: &Path) -> Result<Source, Failure> {
    let text = read(path)?;
    if !text.trim_start().starts_with('{') {
        return text.parse().map(Source::Circuit).map_err(in_file(path));
    }
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let system = if doc.get("phase_terms").is_some() {
        System::Mixed(MixedSystem::from_json(&text).map_err(in_file(path))?)
    } else {
        System::Z2(PathSystem::from_json(&text).map_err(in_file(path))?)
    };
    Ok(Source::Compiled(system))
}

pub fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    match load(path)? {
        Source::Circuit(c) => Ok(c),
        Source::Compiled(_) => Err(Failure::Usage(format!(
            "{}: expected a circuit source, found a compiled system",
            path.display()
        ))),
    }
}

pub fn parse_basis(s: &str) -> Result<BasisString, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

/// Compiles a circuit for `input`, or checks `input` against a compiled system.
pub fn system_for(
    source: Source,
    input: Option<&str>,
    normalized: bool,
) -> Result<System, Failure> {
    let input = input.map(parse_basis).transpose()?;
    match source {
        Source::Circuit(c) => {
            let a = input
                .ok_or_else(|| Failure::Usage("--in is required for a circuit source".into()))?;
            match c.mode() {
                Mode::Z2 if normalized => System::compile(&normalize(&c)?, &a),
                Mode::Mixed if normalized => Err(Failure::Usage(
                    "--normalize applies to z2 mode circuits only".into(),
                )),
                _ => System::compile(&c, &a),
            }
        }
        Source::Compiled(s) => {
            if normalized {
                return Err(Failure::Usage("--normalize needs a circuit source".into()));
            }
            if let Some(a) = input {
                if &a != s.input() {
                    return Err(Failure::Usage(format!(
                        "--in {a} differs from the compiled input {}",
                        s.input()
                    )));
                }
            }
            Ok(s)
        }
    }
}

impl System {
    pub fn compile(c: &Circuit, a: &BasisString) -> Result<System, Failure> {
        Ok(match c.mode() {
            Mode::Z2 => System::Z2(compile(c, a)?),
            Mode::Mixed => System::Mixed(compile_mixed(c, a)?),
        })
    }

    pub fn input(&self) -> &BasisString {
        match self {
            System::Z2(ps) => ps.input(),
            System::Mixed(ms) => &ms.input,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.input().len()
    }

    pub fn num_path_vars(&self) -> u32 {
        match self {
            System::Z2(ps) => ps.num_path_vars(),
            System::Mixed(ms) => ms.num_path_vars,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            System::Z2(_) => Mode::Z2,
            System::Mixed(_) => Mode::Mixed,
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            System::Z2(ps) => ps.to_json(),
            System::Mixed(ms) => ms.to_json(),
        }
    }

    pub fn amplitude(&self, b: &BasisString, opts: &CountOptions) -> Result<Exact, Failure> {
        Ok(match self {
            System::Z2(ps) => Exact::Real(counting::count(ps, b, opts)?),
            System::Mixed(ms) => Exact::Cyclotomic(ms.amplitude(b, opts)?),
        })
    }

    /// Output strings reached by at least one path, with their amplitudes.
    pub fn distribution(&self, opts: &CountOptions) -> Result<Vec<(BasisString, Exact)>, Failure> {
        match self {
            System::Z2(ps) => Ok(counting::distribution(ps, opts)?
                .entries
                .into_iter()
                .map(|(b, pair)| (b, Exact::Real(pair)))
                .collect()),
            System::Mixed(ms) => {
                let n = self.num_qubits();
                if n > counting::MAX_DISTRIBUTION_QUBITS {
                    return Err(Failure::Usage(format!(
                        "distribution supports at most {} qubits",
                        counting::MAX_DISTRIBUTION_QUBITS
                    )));
                }
                let mut out = Vec::new();
                for idx in 0..1u64 << n {
                    let b = BasisString::from_index(idx, n);
                    if let Elimination::Reduced(_) = ms.eliminate(&b)? {
                        let v = ms.amplitude(&b, opts)?;
                        out.push((b, Exact::Cyclotomic(v)));
                    }
                }
                out.sort_by(|x, y| x.0.cmp(&y.0));
                Ok(out)
            }
        }
    }
}

impl Exact {
    pub fn is_zero(&self) -> bool {
        match self {
            Exact::Real(p) => p.gap() == 0,
            Exact::Cyclotomic(v) => v.is_zero(),
        }
    }

    pub fn exact(&self) -> String {
        match self {
            Exact::Real(p) => p.amplitude().to_string(),
            Exact::Cyclotomic(v) => v.to_string(),
        }
    }

    pub fn decimal(&self) -> String {
        match self {
            Exact::Real(p) => decimal(p.amplitude().to_f64()),
            Exact::Cyclotomic(v) => {
                let z = v.to_complex();
                let sign = if z.im < 0.0 { '-' } else { '+' };
                format!("{} {sign} {}i", decimal(z.re), decimal(z.im.abs()))
            }
        }
    }

    /// `exact = decimal`, or a bare `0`.
    pub fn line(&self) -> String {
        if self.is_zero() {
            "0".into()
        } else {
            format!("{} = {}", self.exact(), self.decimal())
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Exact::Real(p) => json!({
                "exact": self.exact(),
                "re": p.amplitude().to_f64(),
                "im": 0.0,
                "h": p.h,
                "count0": p.count0,
                "count1": p.count1,
            }),
            Exact::Cyclotomic(v) => {
                let z = v.to_complex();
                json!({
                    "exact": self.exact(),
                    "re": z.re,
                    "im": z.im,
                    "h": v.half_power,
                    "coeffs": v.coeffs,
                })
            }
        }
    }
}

/// Twelve digits after the point, trailing zeros dropped.
pub fn decimal(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.trim_end_matches('0').trim_end_matches('.') {
        "-0" | "" => "0".into(),
        t => t.into(),
    }
}
