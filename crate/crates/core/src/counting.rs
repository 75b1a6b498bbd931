//! Exact solution counting for compiled Z2 systems.
//!
//! `#(0)` and `#(1)` count the path assignments `x` with `B(x) = b` and
//! phase 0 or 1; the amplitude is `(#(0) - #(1)) / 2^(h/2)`.
//!
//! The enumeration walks each block of assignments in Gray-code order, so
//! one variable flips per step. Flipping `x_v` toggles a polynomial's value
//! exactly when an odd number of its monomials containing `x_v` have all
//! their other variables set; those "rest" masks are precomputed per
//! variable. All outputs and the phase are packed into one `u64` state word.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::circuit::BasisString;
use crate::compile::PathSystem;
use crate::error::{Error, Result};
use crate::gf2poly::Gf2Poly;

pub const DEFAULT_CAP: u32 = 30;
/// Hard limit of the bit-packed kernels.
pub const MAX_VARS: u32 = 62;
pub const MAX_DISTRIBUTION_QUBITS: usize = 24;
/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "PATHSUM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Largest number of variables enumerated exactly.
    pub cap: u32,
    pub threads: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            cap: DEFAULT_CAP,
            threads: default_threads(),
        }
    }
}

impl CountOptions {
    pub fn with_cap(cap: u32) -> Self {
        CountOptions {
            cap,
            ..Default::default()
        }
    }

    pub fn sequential() -> Self {
        CountOptions {
            cap: DEFAULT_CAP,
            threads: 1,
        }
    }

    pub(crate) fn check(&self, vars: u32) -> Result<()> {
        let cap = self.cap.min(MAX_VARS);
        if vars > cap {
            return Err(Error::CapExceeded { vars, cap });
        }
        Ok(())
    }
}

/// Available parallelism, capped by `PATHSUM_THREADS` when set.
pub fn default_threads() -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => n.min(avail),
        _ => avail,
    }
}

/// Runs `block(prefix, low_bits)` over a partition of `0..2^vars` into
/// contiguous blocks and merges the results. Counts are sums, so the split
/// does not change the outcome.
pub(crate) fn partitioned<T, F, M>(vars: u32, threads: usize, block: F, merge: M) -> T
where
    T: Send + Default,
    F: Fn(u64, u32) -> T + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    const MIN_PARALLEL_VARS: u32 = 14;
    if threads <= 1 || vars < MIN_PARALLEL_VARS {
        return block(0, vars);
    }
    let want = (threads * 8).next_power_of_two().trailing_zeros();
    let split = want.min(vars - 10);
    let low = vars - split;
    in_pool(threads, || {
        (0..1u64 << split)
            .into_par_iter()
            .map(|i| block(i << low, low))
            .reduce(T::default, &merge)
    })
}

/// Runs `f` on a rayon pool of `threads` workers.
pub(crate) fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// A polynomial as a list of monomial bit masks over variables `x1..`,
/// where `x_v` is bit `v - 1` and the constant monomial is mask 0.
#[derive(Debug, Clone, Default)]
pub(crate) struct MaskPoly(pub Vec<u64>);

impl MaskPoly {
    pub fn from_poly(p: &Gf2Poly, bit_of: impl Fn(u32) -> u32) -> Self {
        MaskPoly(
            p.monomials()
                .map(|m| m.vars().iter().fold(0u64, |acc, &v| acc | 1 << bit_of(v)))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> bool {
        self.0.iter().filter(|&&m| x & m == m).count() % 2 == 1
    }
}

/// Per-variable flip tables for a family of polynomials whose values are
/// packed into one word, polynomial `i` at bit `i`.
#[derive(Debug, Clone)]
pub(crate) struct GrayTables {
    polys: Vec<MaskPoly>,
    /// `flips[v]`: (rest mask, state bits toggled when all rest bits are set)
    flips: Vec<Vec<(u64, u64)>>,
}

impl GrayTables {
    pub fn new(polys: Vec<MaskPoly>, vars: u32) -> Self {
        let mut flips = Vec::with_capacity(vars as usize);
        for v in 0..vars {
            let bit = 1u64 << v;
            let mut by_rest: HashMap<u64, u64> = HashMap::new();
            for (i, p) in polys.iter().enumerate() {
                for &m in &p.0 {
                    if m & bit != 0 {
                        *by_rest.entry(m & !bit).or_default() ^= 1 << i;
                    }
                }
            }
            let mut list: Vec<(u64, u64)> = by_rest.into_iter().filter(|&(_, f)| f != 0).collect();
            list.sort_unstable();
            flips.push(list);
        }
        GrayTables { polys, flips }
    }

    pub fn state_at(&self, x: u64) -> u64 {
        self.polys
            .iter()
            .enumerate()
            .fold(0, |s, (i, p)| s | ((p.eval(x) as u64) << i))
    }

    /// Visits the packed state of every assignment `prefix | y`,
    /// `y < 2^low_bits`, in Gray-code order.
    #[inline]
    pub fn sweep(&self, prefix: u64, low_bits: u32, mut visit: impl FnMut(u64)) {
        let mut x = prefix;
        let mut state = self.state_at(x);
        visit(state);
        for i in 1..1u64 << low_bits {
            let v = i.trailing_zeros() as usize;
            self.apply_flip(v, x, &mut state);
            x ^= 1 << v;
            visit(state);
        }
    }

    /// Updates `state` for flipping variable bit `v` of assignment `x`.
    #[inline]
    pub fn apply_flip(&self, v: usize, x: u64, state: &mut u64) {
        for &(rest, flag) in &self.flips[v] {
            if x & rest == rest {
                *state ^= flag;
            }
        }
    }
}

/// `#(0)` and `#(1)` for one output string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountPair {
    pub count0: u64,
    pub count1: u64,
    pub h: u32,
}

impl CountPair {
    pub fn gap(&self) -> i64 {
        self.count0 as i64 - self.count1 as i64
    }

    pub fn amplitude(&self) -> RealAmplitude {
        RealAmplitude {
            gap: self.gap(),
            half_power: self.h,
        }
    }
}

/// `gap / 2^(half_power/2)`, held exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RealAmplitude {
    pub gap: i64,
    pub half_power: u32,
}

impl RealAmplitude {
    /// Lossy conversion.
    pub fn to_f64(&self) -> f64 {
        scale_by_sqrt2_power(self.gap as f64, self.half_power)
    }
}

/// `value / 2^(h/2)`.
pub(crate) fn scale_by_sqrt2_power(value: f64, h: u32) -> f64 {
    let even = value * 0.5f64.powi((h / 2) as i32);
    if h % 2 == 1 {
        even * std::f64::consts::FRAC_1_SQRT_2
    } else {
        even
    }
}

impl fmt::Display for RealAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gap == 0 {
            f.write_str("0")
        } else {
            write!(f, "{}/2^({}/2)", self.gap, self.half_power)
        }
    }
}

pub(crate) struct Z2Kernel {
    pub tables: GrayTables,
    pub out_mask: u64,
    pub phase_bit: u64,
}

impl Z2Kernel {
    pub fn new(ps: &PathSystem) -> Result<Self> {
        let n = ps.num_qubits();
        if n > 63 {
            return Err(Error::TooManyQubits {
                num_qubits: n,
                max: 63,
            });
        }
        let bit_of = |v: u32| v - 1;
        let polys = ps
            .outputs()
            .iter()
            .chain(std::iter::once(ps.phase()))
            .map(|p| MaskPoly::from_poly(p, bit_of))
            .collect();
        Ok(Z2Kernel {
            tables: GrayTables::new(polys, ps.num_path_vars()),
            out_mask: (1u64 << n) - 1,
            phase_bit: 1 << n,
        })
    }
}

pub(crate) fn check_target(ps: &PathSystem, b: &BasisString) -> Result<()> {
    if b.len() != ps.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: ps.num_qubits(),
            found: b.len(),
        });
    }
    Ok(())
}

pub fn count(ps: &PathSystem, b: &BasisString, opts: &CountOptions) -> Result<CountPair> {
    check_target(ps, b)?;
    let h = ps.num_path_vars();
    opts.check(h)?;
    let kernel = Z2Kernel::new(ps)?;
    let target = b.to_index();
    let (count0, count1) = partitioned(
        h,
        opts.threads,
        |prefix, low| {
            let (mut c0, mut c1) = (0u64, 0u64);
            kernel.tables.sweep(prefix, low, |s| {
                if s & kernel.out_mask == target {
                    if s & kernel.phase_bit == 0 {
                        c0 += 1;
                    } else {
                        c1 += 1;
                    }
                }
            });
            (c0, c1)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    Ok(CountPair { count0, count1, h })
}

/// Straightforward re-evaluation of every polynomial at every assignment.
/// Slow; kept as the reference for the Gray-code kernel.
pub fn count_naive(ps: &PathSystem, b: &BasisString) -> Result<CountPair> {
    check_target(ps, b)?;
    let h = ps.num_path_vars();
    CountOptions::with_cap(MAX_VARS).check(h)?;
    let mut pair = CountPair {
        h,
        ..Default::default()
    };
    for x in 0..1u64 << h {
        let value = |v: u32| Some((x >> (v - 1)) & 1 == 1);
        let mut hit = true;
        for (p, &bit) in ps.outputs().iter().zip(b.bits()) {
            if p.eval_with(value)? != bit {
                hit = false;
                break;
            }
        }
        if hit {
            if ps.phase().eval_with(value)? {
                pair.count1 += 1;
            } else {
                pair.count0 += 1;
            }
        }
    }
    Ok(pair)
}

pub fn amplitude(ps: &PathSystem, b: &BasisString, opts: &CountOptions) -> Result<RealAmplitude> {
    count(ps, b, opts).map(|c| c.amplitude())
}

/// Counts for every reachable output string, from a single sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub h: u32,
    pub entries: BTreeMap<BasisString, CountPair>,
}

impl Distribution {
    /// `None` when no assignment reaches `b` (the amplitude is 0).
    pub fn amplitude(&self, b: &BasisString) -> Option<RealAmplitude> {
        self.entries.get(b).map(CountPair::amplitude)
    }

    /// `sum_b (#(0) + #(1))`; always `2^h`.
    pub fn total_paths(&self) -> u128 {
        self.entries
            .values()
            .map(|c| (c.count0 + c.count1) as u128)
            .sum()
    }

    /// `sum_b (#(0) - #(1))^2`; equals `2^h` exactly since `U` is unitary.
    pub fn squared_gap_sum(&self) -> u128 {
        self.entries
            .values()
            .map(|c| (c.gap() as i128 * c.gap() as i128) as u128)
            .sum()
    }
}

pub fn distribution(ps: &PathSystem, opts: &CountOptions) -> Result<Distribution> {
    let n = ps.num_qubits();
    if n > MAX_DISTRIBUTION_QUBITS {
        return Err(Error::TooManyQubits {
            num_qubits: n,
            max: MAX_DISTRIBUTION_QUBITS,
        });
    }
    let h = ps.num_path_vars();
    opts.check(h)?;
    let kernel = Z2Kernel::new(ps)?;
    let buckets: HashMap<u64, [u64; 2]> = partitioned(
        h,
        opts.threads,
        |prefix, low| {
            let mut map: HashMap<u64, [u64; 2]> = HashMap::new();
            kernel.tables.sweep(prefix, low, |s| {
                let phase = (s & kernel.phase_bit != 0) as usize;
                map.entry(s & kernel.out_mask).or_default()[phase] += 1;
            });
            map
        },
        |mut a, b| {
            for (k, v) in b {
                let e = a.entry(k).or_default();
                e[0] += v[0];
                e[1] += v[1];
            }
            a
        },
    );
    let entries = buckets
        .into_iter()
        .map(|(idx, [c0, c1])| {
            (
                BasisString::from_index(idx, n),
                CountPair {
                    count0: c0,
                    count1: c1,
                    h,
                },
            )
        })
        .collect();
    Ok(Distribution { h, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Circuit, Gate, Mode};
    use crate::compile::compile;

    const EXAMPLE: &str = include_str!("../circuits/two_toffoli.circ");

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn single_h(a: &str) -> PathSystem {
        let c = Circuit::new(Mode::Z2, 1, vec![Gate::H(0)]).unwrap();
        compile(&c, &bs(a)).unwrap()
    }

    #[test]
    fn example_counts() {
        let c = parse_circuit(EXAMPLE).unwrap();
        let ps = compile(&c, &bs("000")).unwrap();
        let pair = count(&ps, &bs("000"), &CountOptions::default()).unwrap();
        assert_eq!(
            pair,
            CountPair {
                count0: 2,
                count1: 0,
                h: 4
            }
        );
        let amp = pair.amplitude();
        assert_eq!(
            amp,
            RealAmplitude {
                gap: 2,
                half_power: 4
            }
        );
        assert_eq!(amp.to_f64(), 0.5);
        assert_eq!(amp.to_string(), "2/2^(4/2)");
    }

    #[test]
    fn empty_circuit_counts() {
        let c = Circuit::new(Mode::Z2, 2, vec![]).unwrap();
        let ps = compile(&c, &bs("10")).unwrap();
        let opts = CountOptions::default();
        assert_eq!(
            count(&ps, &bs("10"), &opts).unwrap(),
            CountPair {
                count0: 1,
                count1: 0,
                h: 0
            }
        );
        assert_eq!(
            count(&ps, &bs("01"), &opts).unwrap(),
            CountPair {
                count0: 0,
                count1: 0,
                h: 0
            }
        );
        assert_eq!(amplitude(&ps, &bs("01"), &opts).unwrap().to_string(), "0");
    }

    #[test]
    fn single_hadamard() {
        let opts = CountOptions::default();
        assert_eq!(
            count(&single_h("1"), &bs("1"), &opts).unwrap(),
            CountPair {
                count0: 0,
                count1: 1,
                h: 1
            }
        );
        let a01 = amplitude(&single_h("0"), &bs("1"), &opts).unwrap();
        assert_eq!(
            a01,
            RealAmplitude {
                gap: 1,
                half_power: 1
            }
        );
        assert!((a01.to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let a11 = amplitude(&single_h("1"), &bs("1"), &opts).unwrap();
        assert_eq!(a11.gap, -1);
        assert!((a11.to_f64() + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cap_and_length_errors() {
        let c = Circuit::new(Mode::Z2, 1, vec![Gate::H(0); 5]).unwrap();
        let ps = compile(&c, &bs("0")).unwrap();
        assert_eq!(
            count(&ps, &bs("0"), &CountOptions::with_cap(4)),
            Err(Error::CapExceeded { vars: 5, cap: 4 })
        );
        assert!(matches!(
            count(&ps, &bs("00"), &CountOptions::default()),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(distribution(&ps, &CountOptions::with_cap(2)).is_err());
    }

    #[test]
    fn distributions() {
        let opts = CountOptions::default();
        let d = distribution(&single_h("0"), &opts).unwrap();
        assert_eq!(d.entries.len(), 2);
        assert_eq!(
            d.amplitude(&bs("0")),
            Some(RealAmplitude {
                gap: 1,
                half_power: 1
            })
        );
        assert_eq!(
            d.amplitude(&bs("1")),
            Some(RealAmplitude {
                gap: 1,
                half_power: 1
            })
        );

        let empty = Circuit::new(Mode::Z2, 3, vec![]).unwrap();
        let d = distribution(&compile(&empty, &bs("011")).unwrap(), &opts).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(
            d.amplitude(&bs("011")),
            Some(RealAmplitude {
                gap: 1,
                half_power: 0
            })
        );
        assert_eq!(d.amplitude(&bs("000")), None);

        let c = parse_circuit(EXAMPLE).unwrap();
        let ps = compile(&c, &bs("000")).unwrap();
        let d = distribution(&ps, &opts).unwrap();
        assert_eq!(d.total_paths(), 16);
        assert_eq!(d.squared_gap_sum(), 16);
        for idx in 0..8 {
            let b = BasisString::from_index(idx, 3);
            let expected = count(&ps, &b, &opts).unwrap();
            match d.entries.get(&b) {
                Some(pair) => assert_eq!(*pair, expected),
                None => assert_eq!(expected.count0 + expected.count1, 0),
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        // 18 Hadamards spread over 3 qubits with Toffolis in between
        let mut gates = Vec::new();
        for i in 0..6 {
            gates.extend([Gate::H(0), Gate::H(1), Gate::toffoli(0, 1, 2), Gate::H(2)]);
            gates.push(Gate::toffoli((i + 1) % 3, (i + 2) % 3, i % 3));
        }
        let c = Circuit::new(Mode::Z2, 3, gates).unwrap();
        let ps = compile(&c, &bs("101")).unwrap();
        assert_eq!(ps.num_path_vars(), 18);
        let par = CountOptions {
            cap: 30,
            threads: 4,
        };
        let seq = CountOptions::sequential();
        for idx in 0..8 {
            let b = BasisString::from_index(idx, 3);
            assert_eq!(count(&ps, &b, &par).unwrap(), count(&ps, &b, &seq).unwrap());
        }
        assert_eq!(
            distribution(&ps, &par).unwrap(),
            distribution(&ps, &seq).unwrap()
        );
        assert_eq!(distribution(&ps, &par).unwrap().squared_gap_sum(), 1 << 18);
    }
}
