//! The T/H/CNOT pipeline.
//!
//! Wires stay affine in the path variables, so the output constraints
//! `B(x) = b` are linear and can be solved by Gaussian elimination over Z2.
//! The phase is a Z8 combination of Z2-polynomial indicators:
//! `phase(x) = sum_i c_i * [p_i(x) = 1] mod 8`, contributing `w^phase(x)`
//! with `w = exp(i*pi/4)`. `P(k)` on wire `w` adds the term `(k, w)`; the
//! `j`-th Hadamard on wire `w` adds `(4, w * x_j)` since `-1 = w^4`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{BasisString, Circuit, Gate, Mode};
use crate::counting::{partitioned, CountOptions, GrayTables, MaskPoly};
use crate::cyclotomic::CyclotomicValue;
use crate::error::{Error, Result};
use crate::gf2poly::{Gf2Poly, Monomial};

/// `sum_i coeff_i * [indicator_i = 1] mod 8`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MixedPhase {
    terms: Vec<(u8, Gf2Poly)>,
}

impl MixedPhase {
    pub fn new() -> Self {
        MixedPhase::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u8, Gf2Poly)>) -> Self {
        let mut p = MixedPhase::new();
        for (c, ind) in terms {
            p.push(c, ind);
        }
        p
    }

    /// Adds a term; zero coefficients and zero indicators are dropped.
    pub fn push(&mut self, coeff: u8, indicator: Gf2Poly) {
        let coeff = coeff % 8;
        if coeff != 0 && !indicator.is_zero() {
            self.terms.push((coeff, indicator));
        }
    }

    pub fn terms(&self) -> &[(u8, Gf2Poly)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval_with(&self, mut value: impl FnMut(u32) -> Option<bool>) -> Result<u8> {
        let mut acc = 0u8;
        for (c, ind) in &self.terms {
            if ind.eval_with(&mut value)? {
                acc = (acc + c) % 8;
            }
        }
        Ok(acc)
    }

    pub fn substitute(&self, var: u32, replacement: &Gf2Poly) -> MixedPhase {
        MixedPhase::from_terms(
            self.terms
                .iter()
                .map(|(c, ind)| (*c, ind.substitute(var, replacement))),
        )
    }

    /// The unique multilinear polynomial over Z8 with the same values: one
    /// term per monomial, coefficients in `1..8`, graded-lex order.
    ///
    /// Each indicator is converted from XOR form to integer form with
    /// `[a xor q] = a + q - 2*a*q`, reducing mod 8 at every step.
    pub fn canonicalize(&self) -> MixedPhase {
        let mut total: BTreeMap<Monomial, u8> = BTreeMap::new();
        for (c, ind) in &self.terms {
            for (m, k) in integer_form(ind) {
                let e = total.entry(m).or_default();
                *e = (*e + c * k) % 8;
            }
        }
        MixedPhase {
            terms: total
                .into_iter()
                .filter(|&(_, k)| k != 0)
                .map(|(m, k)| (k, Gf2Poly::from_monomial(m)))
                .collect(),
        }
    }

    /// Largest indicator degree. On a canonical phase this is the degree of
    /// the multilinear Z8 polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, p)| p.degree())
            .max()
            .unwrap_or(0)
    }
}

/// Integer (mod 8) multilinear form of an XOR of monomials.
fn integer_form(p: &Gf2Poly) -> BTreeMap<Monomial, u8> {
    let mut acc: BTreeMap<Monomial, u8> = BTreeMap::new();
    for m in p.monomials() {
        // acc := m + acc - 2*m*acc
        let mut next = acc.clone();
        for (other, &k) in &acc {
            let e = next.entry(m.union(other)).or_default();
            *e = (*e + 8 - (2 * k) % 8) % 8;
        }
        let e = next.entry(m.clone()).or_default();
        *e = (*e + 1) % 8;
        next.retain(|_, k| *k != 0);
        acc = next;
    }
    acc
}

impl fmt::Display for MixedPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*[{p}]")?;
        }
        Ok(())
    }
}

/// A mixed-mode circuit compiled for one input string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedSystem {
    pub num_path_vars: u32,
    /// Affine output polynomials `B_j`.
    pub outputs: Vec<Gf2Poly>,
    pub phase: MixedPhase,
    pub input: BasisString,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixedSystemDoc {
    pub h: u32,
    pub input: BasisString,
    pub outputs: Vec<String>,
    pub phase_terms: Vec<(u8, String)>,
}

impl MixedSystem {
    pub fn to_json(&self) -> String {
        let doc = MixedSystemDoc {
            h: self.num_path_vars,
            input: self.input.clone(),
            outputs: self.outputs.iter().map(ToString::to_string).collect(),
            phase_terms: self
                .phase
                .terms()
                .iter()
                .map(|(c, p)| (*c, p.to_string()))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MixedSystemDoc =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        let outputs = doc
            .outputs
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Gf2Poly>>>()?;
        let mut phase = MixedPhase::new();
        for (c, p) in &doc.phase_terms {
            phase.push(*c, p.parse()?);
        }
        Ok(MixedSystem {
            num_path_vars: doc.h,
            outputs,
            phase,
            input: doc.input,
        })
    }

    pub fn eliminate(&self, b: &BasisString) -> Result<Elimination> {
        if b.len() != self.outputs.len() {
            return Err(Error::LengthMismatch {
                expected: self.outputs.len(),
                found: b.len(),
            });
        }
        eliminate(&self.outputs, b, &self.phase, self.num_path_vars)
    }

    pub fn amplitude(&self, b: &BasisString, opts: &CountOptions) -> Result<CyclotomicValue> {
        match self.eliminate(b)? {
            Elimination::Inconsistent => Ok(CyclotomicValue::zero(self.num_path_vars)),
            Elimination::Reduced(r) => {
                amplitude_mixed(&r.phase, &r.free_vars, self.num_path_vars, opts)
            }
        }
    }
}

pub fn compile_mixed(c: &Circuit, a: &BasisString) -> Result<MixedSystem> {
    c.expect_mode(Mode::Mixed)?;
    c.check_input(a)?;
    let mut wires: Vec<Gf2Poly> = a.bits().iter().map(|&b| Gf2Poly::constant(b)).collect();
    let mut phase = MixedPhase::new();
    let mut h = 0u32;
    for gate in c.gates() {
        match *gate {
            Gate::X(q) => wires[q] = &wires[q] + &Gf2Poly::one(),
            Gate::Cnot { control, target } => wires[target] = &wires[target] + &wires[control],
            Gate::Phase { power, qubit } => phase.push(power, wires[qubit].clone()),
            Gate::H(q) => {
                h += 1;
                let fresh = Gf2Poly::var(h);
                phase.push(4, &wires[q] * &fresh);
                wires[q] = fresh;
            }
            Gate::Toffoli { .. } => unreachable!("validated mixed circuit"),
        }
    }
    Ok(MixedSystem {
        num_path_vars: h,
        outputs: wires,
        phase,
        input: a.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elimination {
    /// `B(x) = b` has no solution; the amplitude is exactly zero.
    Inconsistent,
    Reduced(Reduced),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced {
    /// Unconstrained variables, ascending.
    pub free_vars: Vec<u32>,
    /// Each solved variable as an affine form in the free variables.
    pub pivots: Vec<(u32, Gf2Poly)>,
    /// The phase over the free variables only.
    pub phase: MixedPhase,
}

/// Solves the affine system `outputs[j] = b[j]` over variables `x1..=num_vars`
/// by Gauss-Jordan elimination and substitutes the solved variables into
/// the phase.
pub fn eliminate(
    outputs: &[Gf2Poly],
    b: &BasisString,
    phase: &MixedPhase,
    num_vars: u32,
) -> Result<Elimination> {
    for (j, p) in outputs.iter().enumerate() {
        if p.degree() > 1 {
            return Err(Error::NonLinearOutput {
                qubit: j,
                degree: p.degree(),
            });
        }
    }
    // each row is an equation `row = 0`; `pivots[i]` solves for `pivot_vars[i]`
    let mut pivot_rows: Vec<(u32, Gf2Poly)> = Vec::new();
    for (p, &bit) in outputs.iter().zip(b.bits()) {
        let mut row = p + &Gf2Poly::constant(bit);
        for (v, r) in &pivot_rows {
            if row.support().contains(v) {
                row = &row + r;
            }
        }
        match row.as_constant() {
            Some(false) => continue,
            Some(true) => return Ok(Elimination::Inconsistent),
            None => {}
        }
        let pivot = *row.support().last().expect("non-constant row");
        for (_, r) in pivot_rows.iter_mut() {
            if r.support().contains(&pivot) {
                *r = &*r + &row;
            }
        }
        pivot_rows.push((pivot, row));
    }

    let pivots: Vec<(u32, Gf2Poly)> = pivot_rows
        .into_iter()
        .map(|(v, r)| (v, &r + &Gf2Poly::var(v)))
        .collect();
    let free_vars = (1..=num_vars)
        .filter(|v| !pivots.iter().any(|(p, _)| p == v))
        .collect();
    let mut reduced = phase.clone();
    for (v, expr) in &pivots {
        reduced = reduced.substitute(*v, expr);
    }
    Ok(Elimination::Reduced(Reduced {
        free_vars,
        pivots,
        phase: reduced,
    }))
}

struct MixedKernel {
    chunks: Vec<GrayTables>,
    /// `class_masks[chunk][k]`: terms of the chunk with coefficient `k`
    class_masks: Vec<[u64; 8]>,
    offset: u8,
}

impl MixedKernel {
    fn new(phase: &MixedPhase, free_vars: &[u32]) -> Self {
        let bit_of = |v: u32| free_vars.binary_search(&v).expect("phase variable is free") as u32;
        // merge repeated indicators and fold constants
        let mut merged: BTreeMap<&Gf2Poly, u8> = BTreeMap::new();
        let mut offset = 0u8;
        for (c, ind) in phase.terms() {
            match ind.as_constant() {
                Some(true) => offset = (offset + c) % 8,
                Some(false) => {}
                None => {
                    let e = merged.entry(ind).or_default();
                    *e = (*e + c) % 8;
                }
            }
        }
        let terms: Vec<(u8, MaskPoly)> = merged
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(p, c)| (c, MaskPoly::from_poly(p, bit_of)))
            .collect();
        let mut chunks = Vec::new();
        let mut class_masks = Vec::new();
        for chunk in terms.chunks(64) {
            let mut masks = [0u64; 8];
            for (i, (c, _)) in chunk.iter().enumerate() {
                masks[*c as usize] |= 1 << i;
            }
            class_masks.push(masks);
            chunks.push(GrayTables::new(
                chunk.iter().map(|(_, p)| p.clone()).collect(),
                free_vars.len() as u32,
            ));
        }
        MixedKernel {
            chunks,
            class_masks,
            offset,
        }
    }

    fn phase_of(&self, states: &[u64]) -> usize {
        let mut acc = self.offset as u32;
        for (s, masks) in states.iter().zip(&self.class_masks) {
            for (k, m) in masks.iter().enumerate().skip(1) {
                acc += k as u32 * (s & m).count_ones();
            }
        }
        (acc % 8) as usize
    }

    fn tally(&self, prefix: u64, low_bits: u32) -> [u64; 8] {
        let mut counts = [0u64; 8];
        let mut x = prefix;
        let mut states: Vec<u64> = self.chunks.iter().map(|t| t.state_at(x)).collect();
        counts[self.phase_of(&states)] += 1;
        for i in 1..1u64 << low_bits {
            let v = i.trailing_zeros() as usize;
            for (t, s) in self.chunks.iter().zip(states.iter_mut()) {
                t.apply_flip(v, x, s);
            }
            x ^= 1 << v;
            counts[self.phase_of(&states)] += 1;
        }
        counts
    }
}

/// `sum_y w^phase(y)` over all assignments of `free_vars`, divided by
/// `2^(h/2)`. `h` is the total Hadamard count, not the number of free
/// variables.
pub fn amplitude_mixed(
    phase: &MixedPhase,
    free_vars: &[u32],
    h: u32,
    opts: &CountOptions,
) -> Result<CyclotomicValue> {
    let n = free_vars.len() as u32;
    opts.check(n)?;
    let kernel = MixedKernel::new(phase, free_vars);
    let counts = partitioned(
        n,
        opts.threads,
        |prefix, low| kernel.tally(prefix, low),
        |mut a, b| {
            for k in 0..8 {
                a[k] += b[k];
            }
            a
        },
    );
    Ok(CyclotomicValue::from_phase_counts(&counts, h))
}

/// Reference tally by direct evaluation at every assignment.
pub fn phase_counts_naive(phase: &MixedPhase, free_vars: &[u32]) -> Result<[u64; 8]> {
    let mut counts = [0u64; 8];
    for y in 0..1u64 << free_vars.len() {
        let k = phase.eval_with(|v| {
            free_vars
                .iter()
                .position(|&f| f == v)
                .map(|i| (y >> i) & 1 == 1)
        })?;
        counts[k as usize] += 1;
    }
    Ok(counts)
}

/// Compile, eliminate and count: `<b|U|a>` for a mixed-mode circuit.
pub fn amplitude(
    c: &Circuit,
    a: &BasisString,
    b: &BasisString,
    opts: &CountOptions,
) -> Result<CyclotomicValue> {
    compile_mixed(c, a)?.amplitude(b, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn hth() -> Circuit {
        Circuit::new(Mode::Mixed, 1, vec![Gate::H(0), Gate::t(0), Gate::H(0)]).unwrap()
    }

    #[test]
    fn compile_examples() {
        let sys = compile_mixed(&hth(), &bs("0")).unwrap();
        assert_eq!(sys.num_path_vars, 2);
        assert_eq!(sys.outputs, vec![p("x2")]);
        assert_eq!(sys.phase.terms(), &[(1, p("x1")), (4, p("x1*x2"))]);

        let c = Circuit::new(Mode::Mixed, 1, vec![Gate::phase(3, 0)]).unwrap();
        let sys = compile_mixed(&c, &bs("1")).unwrap();
        assert_eq!(sys.outputs, vec![Gf2Poly::one()]);
        assert_eq!(sys.phase.terms(), &[(3, Gf2Poly::one())]);
        assert_eq!(sys.num_path_vars, 0);

        let c = Circuit::new(Mode::Mixed, 2, vec![Gate::cnot(0, 1)]).unwrap();
        let sys = compile_mixed(&c, &bs("10")).unwrap();
        assert_eq!(sys.outputs, vec![Gf2Poly::one(), Gf2Poly::one()]);
        assert!(sys.phase.is_empty());

        let z2 = Circuit::new(Mode::Z2, 1, vec![]).unwrap();
        assert!(matches!(
            compile_mixed(&z2, &bs("0")),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn eliminate_examples() {
        let sys = compile_mixed(&hth(), &bs("0")).unwrap();
        let Elimination::Reduced(r) = sys.eliminate(&bs("0")).unwrap() else {
            panic!("consistent system");
        };
        assert_eq!(r.free_vars, vec![1]);
        assert_eq!(r.pivots, vec![(2, Gf2Poly::zero())]);
        assert_eq!(r.phase.terms(), &[(1, p("x1"))]);

        let out = [p("x1"), p("x1")];
        assert_eq!(
            eliminate(&out, &bs("01"), &MixedPhase::new(), 1).unwrap(),
            Elimination::Inconsistent
        );

        let Elimination::Reduced(r) =
            eliminate(&[p("x1 + 1")], &bs("0"), &MixedPhase::new(), 1).unwrap()
        else {
            panic!("consistent system");
        };
        assert!(r.free_vars.is_empty());
        assert_eq!(r.pivots, vec![(1, Gf2Poly::one())]);

        assert!(matches!(
            eliminate(&[p("x1*x2")], &bs("0"), &MixedPhase::new(), 2),
            Err(Error::NonLinearOutput { .. })
        ));
    }

    #[test]
    fn elimination_solves_dependent_rows() {
        // x1 + x2 = 1, x2 + x3 = 0, x1 + x3 = 1 (dependent), x4 unconstrained
        let out = [p("x1 + x2"), p("x2 + x3"), p("x1 + x3")];
        let phase = MixedPhase::from_terms([(1, p("x1")), (2, p("x2 + x4")), (3, p("x3"))]);
        let Elimination::Reduced(r) = eliminate(&out, &bs("101"), &phase, 4).unwrap() else {
            panic!("consistent system");
        };
        assert_eq!(r.pivots.len(), 2);
        assert_eq!(r.free_vars.len(), 2);
        assert!(r.free_vars.contains(&4));
        for y in 0..4u64 {
            let free = |v: u32| {
                r.free_vars
                    .iter()
                    .position(|&f| f == v)
                    .map(|i| (y >> i) & 1 == 1)
            };
            let mut full = BTreeMap::new();
            for &f in &r.free_vars {
                full.insert(f, free(f).unwrap());
            }
            for (v, e) in &r.pivots {
                full.insert(*v, e.eval_with(free).unwrap());
            }
            for (o, bit) in out.iter().zip(bs("101").bits()) {
                assert_eq!(o.evaluate(&full).unwrap(), *bit);
            }
            assert_eq!(
                r.phase.eval_with(free).unwrap(),
                phase.eval_with(|v| full.get(&v).copied()).unwrap()
            );
        }
    }

    #[test]
    fn canonicalize_examples() {
        let c = MixedPhase::from_terms([(4, p("x1 + x2"))]).canonicalize();
        assert_eq!(c.terms(), &[(4, p("x1")), (4, p("x2"))]);
        let c = MixedPhase::from_terms([(1, p("x1")), (7, p("x1"))]).canonicalize();
        assert!(c.is_empty());
        let c = MixedPhase::from_terms([(1, p("x1 + x2"))]).canonicalize();
        assert_eq!(c.terms(), &[(1, p("x1")), (1, p("x2")), (6, p("x1*x2"))]);
        // T on a three-way XOR leaves a cubic term with coefficient 4
        let c = MixedPhase::from_terms([(1, p("x1 + x2 + x3"))]).canonicalize();
        assert_eq!(c.degree(), 3);
        assert!(c.terms().contains(&(4, p("x1*x2*x3"))));
        // a pure XOR has no monomials of degree 4 or more mod 8
        let c = MixedPhase::from_terms([(1, p("x1 + x2 + x3 + x4 + x5"))]).canonicalize();
        assert_eq!(c.degree(), 3);
    }

    #[test]
    fn amplitude_examples() {
        let opts = CountOptions::sequential();
        let v = amplitude(&hth(), &bs("0"), &bs("0"), &opts).unwrap();
        assert_eq!(v.coeffs, [1, 1, 0, 0]);
        assert_eq!(v.half_power, 2);
        let z = v.to_complex();
        assert!((z.re - 0.853_553_391).abs() < 1e-9);
        assert!((z.im - 0.353_553_391).abs() < 1e-9);

        let t = Circuit::new(Mode::Mixed, 1, vec![Gate::t(0)]).unwrap();
        let v = amplitude(&t, &bs("1"), &bs("1"), &opts).unwrap();
        assert_eq!(v.coeffs, [0, 1, 0, 0]);
        assert_eq!(v.half_power, 0);
        let v = amplitude(&t, &bs("1"), &bs("0"), &opts).unwrap();
        assert!(v.is_zero());
    }

    fn arb_phase(n: u32) -> impl Strategy<Value = MixedPhase> {
        let poly = prop::collection::vec(prop::collection::btree_set(1..=n, 0..4), 0..5)
            .prop_map(|ms| Gf2Poly::from_monomials(ms.into_iter().map(Monomial::from_vars)));
        prop::collection::vec((0u8..8, poly), 0..6).prop_map(MixedPhase::from_terms)
    }

    fn values(p: &MixedPhase, n: u32) -> Vec<u8> {
        (0u32..1 << n)
            .map(|x| p.eval_with(|v| Some((x >> (v - 1)) & 1 == 1)).unwrap())
            .collect()
    }

    proptest! {
        #[test]
        fn canonical_form_is_functional(a in arb_phase(6), b in arb_phase(6)) {
            let (ca, cb) = (a.canonicalize(), b.canonicalize());
            prop_assert_eq!(values(&a, 6), values(&ca, 6));
            prop_assert_eq!(&ca, &ca.canonicalize());
            prop_assert_eq!(ca == cb, values(&a, 6) == values(&b, 6));
        }

        #[test]
        fn gray_tally_matches_naive(ph in arb_phase(8)) {
            let free: Vec<u32> = (1..=8).collect();
            let v = amplitude_mixed(&ph, &free, 8, &CountOptions::sequential()).unwrap();
            let naive = phase_counts_naive(&ph, &free).unwrap();
            prop_assert_eq!(v, CyclotomicValue::from_phase_counts(&naive, 8));
        }
    }

    #[test]
    fn many_terms_span_several_chunks() {
        let mut phase = MixedPhase::new();
        for i in 1..=10u32 {
            for j in i + 1..=10 {
                phase.push(((i + j) % 8) as u8, &Gf2Poly::var(i) * &Gf2Poly::var(j));
                phase.push(3, &Gf2Poly::var(i) + &Gf2Poly::var(j));
            }
        }
        assert!(phase.terms().len() > 64);
        let free: Vec<u32> = (1..=10).collect();
        let fast = amplitude_mixed(&phase, &free, 10, &CountOptions::sequential()).unwrap();
        let naive = phase_counts_naive(&phase, &free).unwrap();
        assert_eq!(fast, CyclotomicValue::from_phase_counts(&naive, 10));
    }

    #[test]
    fn json_round_trip() {
        let sys = compile_mixed(&hth(), &bs("1")).unwrap();
        assert_eq!(MixedSystem::from_json(&sys.to_json()).unwrap(), sys);
    }
}
