//! `pathsum`: exact sum-over-paths amplitudes for quantum circuits.
//!
//! Exit status: 0 success, 1 usage or input error, 2 verification
//! mismatch, 3 enumeration cap exceeded.

mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathsum::compile::BoundsReport;
use pathsum::counting::{CountOptions, DEFAULT_CAP};
use pathsum::engine::{verify_pairs, VerifyReport, TOLERANCE};
use pathsum::montecarlo::estimate_amplitude;
use pathsum::random::{random_basis, random_circuit, GatePool};
use pathsum::{BasisString, Circuit, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use source::{decimal, load, load_circuit, parse_basis, system_for, Exact, System};

#[derive(Parser, Debug)]
#[command(
    name = "pathsum",
    version,
    about = "Exact sum-over-paths amplitudes for quantum circuits"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest number of path variables enumerated exactly.
    #[arg(long, global = true, value_name = "INT", default_value_t = DEFAULT_CAP)]
    cap: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a circuit and print it in canonical form.
    Parse { circuit: PathBuf },
    /// Compile a circuit for one input string into output and phase polynomials.
    Compile(SystemArgs),
    /// Exact amplitude <out|U|in>.
    Amplitude {
        #[command(flatten)]
        system: SystemArgs,
        /// Output basis string, leftmost character is qubit 0.
        #[arg(long = "out", value_name = "BITS")]
        output: String,
    },
    /// Exact amplitudes of every output string reached by some path.
    Distribution(SystemArgs),
    /// Build U, CNOT(answer -> ancilla), U^dagger on one extra qubit.
    Decision(TransformArgs),
    /// Build the sign-readout circuit whose diagonal amplitude is (-1)^f(a).
    Sign(TransformArgs),
    /// Compare path-sum amplitudes against a dense statevector.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of <out|U|in> from uniformly drawn paths.
    Sample {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "out", value_name = "BITS")]
        output: String,
        #[arg(long, value_name = "INT", default_value_t = 4096)]
        samples: u64,
        #[arg(long, value_name = "INT", default_value_t = 0)]
        seed: u64,
    },
    /// Path-variable count, polynomial degrees and term counts.
    Stats(SystemArgs),
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Circuit source, or a system written by `compile --format json`.
    file: PathBuf,
    /// Input basis string, leftmost character is qubit 0.
    #[arg(long = "in", value_name = "BITS")]
    input: Option<String>,
    /// Pad Toffoli targets with H,H so the degree bounds apply (z2 mode).
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct TransformArgs {
    circuit: PathBuf,
    /// Qubit carrying f(a).
    #[arg(long, value_name = "QUBIT", default_value_t = 0)]
    answer: usize,
    /// Also evaluate the readout amplitudes for this input of the original circuit.
    #[arg(long = "in", value_name = "BITS")]
    input: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PoolArg {
    Z2,
    Mixed,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// A circuit file, or `random` for seeded random circuits.
    target: String,
    /// Qubits per random circuit.
    #[arg(long, value_name = "INT", default_value_t = 4)]
    n: usize,
    /// Gates per random circuit.
    #[arg(long, value_name = "INT", default_value_t = 20)]
    gates: usize,
    /// Number of random circuits.
    #[arg(long, value_name = "INT", default_value_t = 20)]
    trials: usize,
    /// Gate set of the random circuits.
    #[arg(long, value_enum, default_value_t = PoolArg::Z2)]
    mode: PoolArg,
    /// Hadamard budget per random circuit.
    #[arg(long, value_name = "INT", default_value_t = 16)]
    max_h: usize,
    /// (a, b) pairs per circuit; every pair when omitted and 2^(2n) <= 4096.
    #[arg(long, value_name = "INT")]
    pairs: Option<usize>,
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Mismatch(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg} (raise --cap or use `sample`)");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let opts = CountOptions::with_cap(cli.cap);
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Parse { circuit } => print_circuit(&load_circuit(circuit)?, json),
        Command::Compile(args) => {
            let sys = system_for(load(&args.file)?, args.input.as_deref(), args.normalize)?;
            if json {
                println!("{}", sys.to_json());
            } else {
                print_system(&sys);
            }
        }
        Command::Amplitude { system, output } => {
            let sys = system_for(
                load(&system.file)?,
                system.input.as_deref(),
                system.normalize,
            )?;
            let amp = sys.amplitude(&parse_basis(output)?, &opts)?;
            if json {
                println!("{}", amp.to_json());
            } else {
                println!("{}", amp.line());
            }
        }
        Command::Distribution(args) => {
            let sys = system_for(load(&args.file)?, args.input.as_deref(), args.normalize)?;
            let entries = sys.distribution(&opts)?;
            if json {
                let rows: serde_json::Map<_, _> = entries
                    .iter()
                    .map(|(b, amp)| (b.to_string(), amp.to_json()))
                    .collect();
                println!("{}", serde_json::Value::Object(rows));
            } else {
                for (b, amp) in &entries {
                    match amp {
                        Exact::Real(p) => {
                            println!("{b}  {}  (#0={}, #1={})", amp.line(), p.count0, p.count1)
                        }
                        Exact::Cyclotomic(_) => println!("{b}  {}", amp.line()),
                    }
                }
            }
        }
        Command::Decision(args) => transform(args, false, &opts, json)?,
        Command::Sign(args) => transform(args, true, &opts, json)?,
        Command::Verify(args) => verify(args, &opts, json)?,
        Command::Sample {
            system,
            output,
            samples,
            seed,
        } => {
            let sys = system_for(
                load(&system.file)?,
                system.input.as_deref(),
                system.normalize,
            )?;
            let System::Z2(ps) = &sys else {
                return Err(Failure::Usage(
                    "sampling supports z2 mode systems only".into(),
                ));
            };
            let b = parse_basis(output)?;
            let est = estimate_amplitude(ps, &b, *samples, *seed, opts.threads)?;
            let exact = if ps.num_path_vars() <= opts.cap {
                Some(sys.amplitude(&b, &opts)?)
            } else {
                None
            };
            if json {
                println!(
                    "{}",
                    json!({
                        "estimate": est.estimate,
                        "std_error": est.std_error,
                        "samples": est.num_samples,
                        "h": est.h,
                        "seed": seed,
                        "exact": exact.as_ref().map(Exact::to_json),
                        "generator": est.generator,
                    })
                );
            } else {
                println!("estimate   {}", decimal(est.estimate));
                println!("std_error  {}", decimal(est.std_error));
                println!("samples    {}", est.num_samples);
                println!("h          {}", est.h);
                match &exact {
                    Some(amp) => println!("exact      {}", amp.line()),
                    None => println!("exact      skipped, h > cap {}", opts.cap),
                }
                println!("generator  {} (seed {seed})", est.generator);
            }
        }
        Command::Stats(args) => {
            let sys = system_for(load(&args.file)?, args.input.as_deref(), args.normalize)?;
            stats(&sys, json);
        }
    }
    Ok(())
}

fn print_circuit(c: &Circuit, json: bool) {
    if json {
        let gates: Vec<String> = c.gates().iter().map(ToString::to_string).collect();
        println!(
            "{}",
            json!({
                "mode": c.mode().to_string(),
                "qubits": c.num_qubits(),
                "hadamards": c.hadamard_count(),
                "gates": gates,
            })
        );
    } else {
        print!("{c}");
    }
}

fn print_system(sys: &System) {
    println!("mode {}", sys.mode());
    println!("input {}", sys.input());
    println!("h {}", sys.num_path_vars());
    match sys {
        System::Z2(ps) => {
            for (j, b) in ps.outputs().iter().enumerate() {
                println!("B{j} = {b}");
            }
            println!("phase = {}", ps.phase());
        }
        System::Mixed(ms) => {
            for (j, b) in ms.outputs.iter().enumerate() {
                println!("B{j} = {b}");
            }
            println!("phase = {} (mod 8)", ms.phase);
        }
    }
}

fn stats(sys: &System, json: bool) {
    match sys {
        System::Z2(ps) => {
            let report = BoundsReport::of(ps);
            let violations = report.violations();
            if json {
                println!(
                    "{}",
                    json!({ "mode": "z2", "report": report, "bound_violations": violations })
                );
                return;
            }
            println!("mode z2");
            println!("h {}", report.h);
            for (j, (d, t)) in report
                .output_degrees
                .iter()
                .zip(&report.output_terms)
                .enumerate()
            {
                println!("B{j} degree {d} terms {t}");
            }
            println!(
                "phase degree {} terms {}",
                report.phase_degree, report.phase_terms
            );
            if violations.is_empty() {
                println!("bounds ok");
            } else {
                println!("bounds exceeded: {}", violations.join("; "));
            }
        }
        System::Mixed(ms) => {
            let canonical = ms.phase.canonicalize();
            let degree = canonical.degree();
            if json {
                println!(
                    "{}",
                    json!({
                        "mode": "mixed",
                        "h": ms.num_path_vars,
                        "output_degrees": ms.outputs.iter().map(|b| b.degree()).collect::<Vec<_>>(),
                        "output_terms": ms.outputs.iter().map(|b| b.num_terms()).collect::<Vec<_>>(),
                        "phase_terms": ms.phase.terms().len(),
                        "canonical_phase_terms": canonical.terms().len(),
                        "canonical_phase_degree": degree,
                    })
                );
                return;
            }
            println!("mode mixed");
            println!("h {}", ms.num_path_vars);
            for (j, b) in ms.outputs.iter().enumerate() {
                println!("B{j} degree {} terms {}", b.degree(), b.num_terms());
            }
            println!("phase indicator terms {}", ms.phase.terms().len());
            println!(
                "canonical phase degree {degree} terms {}",
                canonical.terms().len()
            );
            if degree > 2 {
                println!("note: canonical phase degree {degree} exceeds 2");
            }
        }
    }
}

fn transform(
    args: &TransformArgs,
    sign: bool,
    opts: &CountOptions,
    json: bool,
) -> Result<(), Failure> {
    let u = load_circuit(&args.circuit)?;
    let c = if sign {
        u.sign_transform(args.answer)?
    } else {
        u.decision_transform(args.answer)?
    };
    let Some(input) = &args.input else {
        print_circuit(&c, json);
        return Ok(());
    };
    let a = parse_basis(input)?;
    if a.len() != u.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: u.num_qubits(),
            found: a.len(),
        }
        .into());
    }
    let start = a.with_bit(false);
    let readouts: Vec<BasisString> = if sign {
        vec![start.clone()]
    } else {
        vec![start.clone(), a.with_bit(true)]
    };
    let mut rows = Vec::new();
    for b in readouts {
        let amp = System::compile(&c, &start)?.amplitude(&b, opts)?;
        rows.push((b, amp));
    }
    if json {
        let rows: serde_json::Map<_, _> = rows
            .iter()
            .map(|(b, amp)| (b.to_string(), amp.to_json()))
            .collect();
        println!(
            "{}",
            json!({ "input": start.to_string(), "amplitudes": rows })
        );
    } else {
        for (b, amp) in &rows {
            println!("<{b}|C|{start}> = {}", amp.line());
        }
    }
    Ok(())
}

fn verify(args: &VerifyArgs, opts: &CountOptions, json: bool) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let circuits: Vec<Circuit> = if args.target == "random" {
        if args.n == 0 {
            return Err(Failure::Usage("--n must be at least 1".into()));
        }
        let pool = match args.mode {
            PoolArg::Z2 => GatePool::Z2,
            PoolArg::Mixed => GatePool::Mixed,
        };
        (0..args.trials)
            .map(|_| random_circuit(&mut rng, pool, args.n, args.gates, args.max_h))
            .collect()
    } else {
        vec![load_circuit(args.target.as_ref())?]
    };

    let mut report = VerifyReport::default();
    for c in &circuits {
        let n = c.num_qubits();
        let pairs: Vec<(BasisString, BasisString)> = match args.pairs {
            None if 2 * n <= 12 => (0..1u64 << n)
                .flat_map(|a| (0..1u64 << n).map(move |b| (a, b)))
                .map(|(a, b)| (BasisString::from_index(a, n), BasisString::from_index(b, n)))
                .collect(),
            count => (0..count.unwrap_or(64))
                .map(|_| {
                    let a = random_basis(&mut rng, n);
                    let b = random_basis(&mut rng, n);
                    (a, b)
                })
                .collect(),
        };
        report.merge(verify_pairs(c, &pairs, opts, TOLERANCE)?);
    }

    if json {
        let mismatches: Vec<_> = report
            .mismatches
            .iter()
            .map(|m| {
                json!({
                    "in": m.input.to_string(),
                    "out": m.output.to_string(),
                    "pathsum": [m.pathsum.re, m.pathsum.im],
                    "reference": [m.reference.re, m.reference.im],
                })
            })
            .collect();
        println!(
            "{}",
            json!({
                "circuits": circuits.len(),
                "checked": report.checked,
                "max_error": report.max_error,
                "tolerance": TOLERANCE,
                "mismatches": mismatches,
            })
        );
    } else {
        for m in &report.mismatches {
            println!(
                "mismatch <{}|U|{}>: pathsum {} reference {}",
                m.output, m.input, m.pathsum, m.reference
            );
        }
        println!(
            "{} circuits, {} amplitudes, max |diff| {:.3e}, tolerance {TOLERANCE:e}",
            circuits.len(),
            report.checked,
            report.max_error
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!(
            "{} of {} amplitudes disagree",
            report.mismatches.len(),
            report.checked
        )))
    }
}
