//! Multilinear polynomials over Z2 in algebraic normal form.
//!
//! A [`Monomial`] is a set of variable indices (the empty set is the
//! constant 1) and a [`Gf2Poly`] is a set of monomials (the empty set is 0).
//! Both are kept in canonical order, so structural equality is functional
//! equality.
//!
//! Rendering: variables as `x<i>`, monomials as `x1*x2`, terms joined by
//! ` + `, constants `0` and `1`. Monomials appear in graded-lexicographic
//! order (by degree, then by sorted variable list).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![v])
    }

    pub fn from_vars(vars: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = vars.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Product of two monomials: the union of their variables (`x*x = x`).
    pub fn union(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn without(&self, v: u32) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&x| x != v).collect())
    }

    pub fn eval_with(&self, mut value: impl FnMut(u32) -> Option<bool>) -> Result<bool> {
        for &v in &self.0 {
            if !value(v).ok_or(Error::MissingVariable(v))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf2Poly {
    terms: BTreeSet<Monomial>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly::default()
    }

    pub fn one() -> Self {
        Gf2Poly::from_monomial(Monomial::one())
    }

    pub fn constant(bit: bool) -> Self {
        if bit {
            Gf2Poly::one()
        } else {
            Gf2Poly::zero()
        }
    }

    pub fn var(v: u32) -> Self {
        Gf2Poly::from_monomial(Monomial::var(v))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Gf2Poly {
            terms: BTreeSet::from([m]),
        }
    }

    /// XOR of the given monomials; repeated monomials cancel in pairs.
    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Gf2Poly::zero();
        for m in ms {
            p.toggle(m);
        }
        p
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn monomials(&self) -> impl ExactSizeIterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(bit)` if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<bool> {
        match self.terms.len() {
            0 => Some(false),
            1 if self.terms.first().is_some_and(Monomial::is_one) => Some(true),
            _ => None,
        }
    }

    /// Largest monomial size; 0 for constants.
    pub fn degree(&self) -> usize {
        self.terms.last().map_or(0, Monomial::degree)
    }

    pub fn support(&self) -> BTreeSet<u32> {
        self.terms
            .iter()
            .flat_map(|m| m.vars().iter().copied())
            .collect()
    }

    pub fn eval_with(&self, mut value: impl FnMut(u32) -> Option<bool>) -> Result<bool> {
        let mut acc = false;
        for m in &self.terms {
            acc ^= m.eval_with(&mut value)?;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, assignment: &BTreeMap<u32, bool>) -> Result<bool> {
        self.eval_with(|v| assignment.get(&v).copied())
    }

    /// Replaces every occurrence of `var` by `replacement` and re-expands.
    pub fn substitute(&self, var: u32, replacement: &Gf2Poly) -> Gf2Poly {
        let mut out = Gf2Poly::zero();
        for m in &self.terms {
            if m.contains(var) {
                let rest = m.without(var);
                for r in &replacement.terms {
                    out.toggle(rest.union(r));
                }
            } else {
                out.toggle(m.clone());
            }
        }
        out
    }
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        Gf2Poly {
            terms: self
                .terms
                .symmetric_difference(&rhs.terms)
                .cloned()
                .collect(),
        }
    }
}

impl Add for Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        &self + &rhs
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        let mut out = Gf2Poly::zero();
        for a in &self.terms {
            for b in &rhs.terms {
                out.toggle(a.union(b));
            }
        }
        out
    }
}

impl Mul for Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: Gf2Poly) -> Gf2Poly {
        &self * &rhs
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Accepts the rendered form; terms may repeat (they cancel) and factors may
/// appear in any order.
impl FromStr for Gf2Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPolynomial(s.to_string());
        let mut p = Gf2Poly::zero();
        for term in s.split('+').map(str::trim) {
            if term == "0" {
                continue;
            }
            if term == "1" {
                p.toggle(Monomial::one());
                continue;
            }
            let vars = term
                .split('*')
                .map(|f| {
                    f.trim()
                        .strip_prefix('x')
                        .and_then(|i| i.parse::<u32>().ok())
                        .ok_or_else(bad)
                })
                .collect::<Result<Vec<_>>>()?;
            p.toggle(Monomial::from_vars(vars));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    fn eval_bits(p: &Gf2Poly, x: u32) -> bool {
        p.eval_with(|v| Some((x >> (v - 1)) & 1 == 1)).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(p("x1 + x2") + p("x2"), p("x1"));
        assert_eq!(p("x1*x3 + x2") + Gf2Poly::zero(), p("x1*x3 + x2"));
        assert_eq!(p("x1*x2 + 1") + p("x1*x2"), Gf2Poly::one());
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(p("x1 + x2") * p("x1"), p("x1 + x1*x2"));
        assert_eq!(p("x2*x5 + 1") * Gf2Poly::one(), p("x2*x5 + 1"));
        assert_eq!(p("x1 + 1") * p("x1"), Gf2Poly::zero());
    }

    #[test]
    fn evaluate_examples() {
        let b1 = p("x3 + x2*x4");
        let a = BTreeMap::from([(2, true), (3, false), (4, true)]);
        assert!(b1.evaluate(&a).unwrap());
        assert!(!Gf2Poly::zero().evaluate(&BTreeMap::new()).unwrap());
        assert!(p("x1*x3")
            .evaluate(&BTreeMap::from([(1, true), (3, true)]))
            .unwrap());
        assert_eq!(
            b1.evaluate(&BTreeMap::from([(2, true)])),
            Err(Error::MissingVariable(3))
        );
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(p("x1*x2").substitute(2, &p("x3 + 1")), p("x1*x3 + x1"));
        assert_eq!(p("x1").substitute(2, &p("x5*x6 + 1")), p("x1"));
        assert_eq!(p("x1 + x2").substitute(1, &p("x2")), Gf2Poly::zero());
    }

    #[test]
    fn degree_and_support() {
        assert_eq!(p("x1*x2*x4 + x4").degree(), 3);
        assert_eq!(Gf2Poly::zero().degree(), 0);
        assert!(Gf2Poly::zero().support().is_empty());
        let b1 = p("x3 + x2*x4");
        assert_eq!(b1.degree(), 2);
        assert_eq!(b1.support(), BTreeSet::from([2, 3, 4]));
    }

    #[test]
    fn rendering_is_graded_lex() {
        let q = Gf2Poly::from_monomials([
            Monomial::from_vars([4, 2]),
            Monomial::var(3),
            Monomial::one(),
            Monomial::from_vars([1, 2, 3]),
            Monomial::var(1),
        ]);
        assert_eq!(q.to_string(), "1 + x1 + x3 + x2*x4 + x1*x2*x3");
        assert_eq!(Gf2Poly::zero().to_string(), "0");
        assert_eq!(Gf2Poly::one().to_string(), "1");
        assert!("x1 + y2".parse::<Gf2Poly>().is_err());
        assert!("x".parse::<Gf2Poly>().is_err());
    }

    fn arb_poly(nvars: u32) -> impl Strategy<Value = Gf2Poly> {
        prop::collection::vec(prop::collection::btree_set(1..=nvars, 0..4), 0..8)
            .prop_map(|ms| Gf2Poly::from_monomials(ms.into_iter().map(Monomial::from_vars)))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(8), b in arb_poly(8), c in arb_poly(8)) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a + &a).is_zero());
            prop_assert_eq!(&a * &a, a.clone());
            let sum = &a + &b;
            let prod = &a * &b;
            for x in 0u32..256 {
                prop_assert_eq!(eval_bits(&sum, x), eval_bits(&a, x) ^ eval_bits(&b, x));
                prop_assert_eq!(eval_bits(&prod, x), eval_bits(&a, x) & eval_bits(&b, x));
            }
        }

        #[test]
        fn distinct_anf_differs_somewhere(a in arb_poly(12), b in arb_poly(12)) {
            let differs = (0u32..1 << 12).any(|x| eval_bits(&a, x) != eval_bits(&b, x));
            prop_assert_eq!(differs, a != b);
        }

        #[test]
        fn substitute_agrees_with_evaluate(q in arb_poly(6), r in arb_poly(6), v in 1u32..=6) {
            let s = q.substitute(v, &r);
            prop_assert!(!s.support().contains(&v) || r.support().contains(&v));
            for x in 0u32..64 {
                let rv = eval_bits(&r, x);
                let shifted = (x & !(1 << (v - 1))) | ((rv as u32) << (v - 1));
                prop_assert_eq!(eval_bits(&s, x), eval_bits(&q, shifted));
            }
        }

        #[test]
        fn render_parse_round_trip(a in arb_poly(10)) {
            prop_assert_eq!(a.to_string().parse::<Gf2Poly>().unwrap(), a);
        }
    }
}
