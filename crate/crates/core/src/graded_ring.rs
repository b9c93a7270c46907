//! Graded-commutative rings presented by generators, monomial relations and
//! single-monomial torsion relations, with exact integer coefficients.
//!
//! Every ring in this crate has the shape
//! `Z[g_1, ..., g_k] / (m_1, ..., m_r, k_1·t_1, ..., k_s·t_s)` where the
//! `m_i`, `t_j` are monomials. In that setting a monomial is either zero
//! (divisible by some `m_i`) or spans a cyclic summand whose order is read
//! off from the torsion monomials dividing it, so normal forms need no
//! Gröbner machinery.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::linalg::AbelianGroup;
use crate::space::SpaceSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("elements belong to different presentations")]
    MixedPresentations,
    #[error("monomial {0} is zero in the ring; its torsion modulus is undefined")]
    ZeroMonomial(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("cannot parse monomial `{0}`")]
    Parse(String),
    #[error("element is not homogeneous")]
    NonHomogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(degree: i64) -> Parity {
        if degree.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub name: String,
    /// Degree in the grading the ring is presented in (loop grading for
    /// loop homology, so it may be negative).
    pub loop_degree: i64,
    pub parity: Parity,
}

impl GeneratorInfo {
    pub fn new(name: impl Into<String>, loop_degree: i64) -> Self {
        GeneratorInfo {
            name: name.into(),
            loop_degree,
            parity: Parity::of(loop_degree),
        }
    }
}

/// Exponent vector in the presentation's generator order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(num_generators: usize) -> Self {
        Monomial(SmallVec::from_elem(0, num_generators))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, generator: usize) -> u32 {
        self.0[generator]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Exponent-wise sum, without reduction or sign.
    pub fn raw_product(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorsionRelation {
    pub modulus: u64,
    pub monomial: Monomial,
}

/// A ring `Z[generators] / (monomial relations, torsion relations)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPresentation {
    pub label: String,
    pub generators: Vec<GeneratorInfo>,
    pub monomial_relations: Vec<Monomial>,
    pub torsion_relations: Vec<TorsionRelation>,
    /// Dimension `d` of the underlying manifold: loop degree `k` is
    /// homology degree `k + d`.
    pub ambient_shift: i64,
}

/// Presentations are shared between all elements built over them.
pub type Ring = Arc<GradedPresentation>;

/// Upper bound on exponents of generators that no pure-power relation
/// truncates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoff {
    pub max_exponent: u32,
}

impl Cutoff {
    pub fn new(max_exponent: u32) -> Self {
        Cutoff { max_exponent }
    }
}

impl GradedPresentation {
    pub fn new(
        label: impl Into<String>,
        generators: Vec<GeneratorInfo>,
        monomial_relations: Vec<Monomial>,
        torsion_relations: Vec<TorsionRelation>,
        ambient_shift: i64,
    ) -> Result<Ring, RingError> {
        let p = GradedPresentation {
            label: label.into(),
            generators,
            monomial_relations,
            torsion_relations,
            ambient_shift,
        };
        p.validate()?;
        Ok(Arc::new(p))
    }

    fn validate(&self) -> Result<(), RingError> {
        let k = self.generators.len();
        let bad = |msg: String| Err(RingError::InvalidPresentation(msg));
        for g in &self.generators {
            if g.parity != Parity::of(g.loop_degree) {
                return bad(format!("parity of `{}` disagrees with its degree", g.name));
            }
        }
        let all = self
            .monomial_relations
            .iter()
            .chain(self.torsion_relations.iter().map(|t| &t.monomial));
        if all.clone().any(|m| m.0.len() != k) {
            return bad("relation has the wrong number of exponents".into());
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.parity == Parity::Odd && !matches!(self.pure_power_bound(i), Some(1 | 2)) {
                return bad(format!(
                    "odd generator `{}` needs the relation {}^2",
                    g.name, g.name
                ));
            }
        }
        for t in &self.torsion_relations {
            if t.modulus < 2 {
                return bad(format!("torsion modulus {} is below 2", t.modulus));
            }
            if self.is_zero_monomial(&t.monomial) {
                return bad(format!(
                    "torsion monomial {} already vanishes",
                    self.format_monomial(&t.monomial)
                ));
            }
        }
        Ok(())
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Result<usize, RingError> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| RingError::UnknownGenerator(name.to_string()))
    }

    pub fn generator_monomial(&self, name: &str) -> Result<Monomial, RingError> {
        let i = self.generator_index(name)?;
        let mut m = Monomial::one(self.num_generators());
        m.0[i] = 1;
        Ok(m)
    }

    pub fn one_monomial(&self) -> Monomial {
        Monomial::one(self.num_generators())
    }

    pub fn degree(&self, m: &Monomial) -> i64 {
        self.generators
            .iter()
            .zip(&m.0)
            .map(|(g, &e)| g.loop_degree * e as i64)
            .sum()
    }

    pub fn parity(&self, m: &Monomial) -> Parity {
        Parity::of(self.degree(m))
    }

    pub fn is_zero_monomial(&self, m: &Monomial) -> bool {
        self.monomial_relations.iter().any(|r| r.divides(m))
    }

    /// Koszul sign of `m1 · m2` brought into generator order, and the
    /// product monomial, or `None` if the product vanishes.
    pub fn monomial_product(&self, m1: &Monomial, m2: &Monomial) -> Option<(bool, Monomial)> {
        let product = m1.raw_product(m2);
        if self.is_zero_monomial(&product) {
            return None;
        }
        // each odd letter of m2 moves past every larger odd letter of m1
        let mut swaps = 0u64;
        for (j, gj) in self.generators.iter().enumerate() {
            if gj.parity == Parity::Even || m2.0[j] == 0 {
                continue;
            }
            for (i, gi) in self.generators.iter().enumerate().skip(j + 1) {
                if gi.parity == Parity::Odd {
                    swaps += m1.0[i] as u64 * m2.0[j] as u64;
                }
            }
        }
        Some((swaps % 2 == 1, product))
    }

    /// Least `k > 0` with `k·m = 0`, or `0` when `m` spans a free summand.
    pub fn torsion_modulus(&self, m: &Monomial) -> Result<u64, RingError> {
        if self.is_zero_monomial(m) {
            return Err(RingError::ZeroMonomial(self.format_monomial(m)));
        }
        Ok(self.modulus_unchecked(m))
    }

    fn modulus_unchecked(&self, m: &Monomial) -> u64 {
        self.torsion_relations
            .iter()
            .filter(|t| t.monomial.divides(m))
            .fold(0u64, |acc, t| acc.gcd(&t.modulus))
    }

    /// Smallest `k` such that a relation `g^k` holds, if any.
    fn pure_power_bound(&self, generator: usize) -> Option<u32> {
        self.monomial_relations
            .iter()
            .filter(|r| {
                r.0.iter()
                    .enumerate()
                    .all(|(i, &e)| i == generator || e == 0)
            })
            .map(|r| r.0[generator])
            .filter(|&e| e > 0)
            .min()
    }

    /// Largest exponent worth enumerating for each generator.
    pub fn exponent_bounds(&self, cutoff: Cutoff) -> Vec<u32> {
        (0..self.num_generators())
            .map(|i| {
                self.pure_power_bound(i)
                    .map_or(cutoff.max_exponent, |k| k - 1)
            })
            .collect()
    }

    /// A cutoff large enough that [`basis_in_degree`](Self::basis_in_degree)
    /// is complete for every degree up to `max_degree`. `None` if some
    /// untruncated generator has non-positive degree.
    pub fn cutoff_for_degree(&self, max_degree: i64) -> Option<Cutoff> {
        let bounds = self.exponent_bounds(Cutoff::new(0));
        let mut floor = 0i64;
        let mut step = i64::MAX;
        for (i, g) in self.generators.iter().enumerate() {
            if self.pure_power_bound(i).is_some() {
                floor += (g.loop_degree * bounds[i] as i64).min(0);
            } else if g.loop_degree <= 0 {
                return None;
            } else {
                step = step.min(g.loop_degree);
            }
        }
        if step == i64::MAX {
            return Some(Cutoff::new(0));
        }
        let span = (max_degree - floor).max(0);
        Some(Cutoff::new((span / step) as u32))
    }

    /// All nonzero normal-form monomials within the cutoff, in
    /// lexicographic exponent order.
    pub fn basis(&self, cutoff: Cutoff) -> Vec<Monomial> {
        let bounds = self.exponent_bounds(cutoff);
        let mut out = Vec::new();
        let mut current = Monomial::one(bounds.len());
        self.enumerate(&bounds, 0, &mut current, &mut out);
        out
    }

    fn enumerate(&self, bounds: &[u32], i: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == bounds.len() {
            if !self.is_zero_monomial(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=bounds[i] {
            cur.0[i] = e;
            self.enumerate(bounds, i + 1, cur, out);
        }
        cur.0[i] = 0;
    }

    pub fn basis_in_degree(&self, degree: i64, cutoff: Cutoff) -> Vec<Monomial> {
        self.basis(cutoff)
            .into_iter()
            .filter(|m| self.degree(m) == degree)
            .collect()
    }

    /// The degree-`degree` part of the ring as an abelian group.
    pub fn additive_group(&self, degree: i64, cutoff: Cutoff) -> AbelianGroup {
        let moduli: Vec<u64> = self
            .basis_in_degree(degree, cutoff)
            .iter()
            .map(|m| self.modulus_unchecked(m))
            .collect();
        let free = moduli.iter().filter(|&&k| k == 0).count();
        AbelianGroup::new(free, moduli)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = self
            .generators
            .iter()
            .zip(&m.0)
            .filter(|(_, &e)| e > 0)
            .map(|(g, &e)| {
                if e == 1 {
                    g.name.clone()
                } else {
                    format!("{}^{}", g.name, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Parses `g1^e1*g2*...` (or `1`) into a word of generator powers, in the
    /// order written.
    pub fn parse_word(&self, s: &str) -> Result<Vec<(usize, u32)>, RingError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Vec::new());
        }
        let parse_err = || RingError::Parse(s.to_string());
        let mut word = Vec::new();
        for factor in s.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(parse_err());
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<u32>().map_err(|_| parse_err())?),
                None => (factor, 1),
            };
            word.push((self.generator_index(name)?, exp));
        }
        Ok(word)
    }

    /// Parses a monomial string, requiring it to be written in canonical
    /// generator order (used for relation strings in serialized form).
    pub fn parse_monomial(&self, s: &str) -> Result<Monomial, RingError> {
        let mut m = self.one_monomial();
        let mut last = None;
        for (g, e) in self.parse_word(s)? {
            if last.is_some_and(|l| l >= g) {
                return Err(RingError::Parse(s.to_string()));
            }
            last = Some(g);
            m.0[g] = e;
        }
        Ok(m)
    }
}

/// The loop homology ring `H_*(LM; Z)` of a supported space, in the loop
/// grading, on generators `a`, `b`, `x`:
///
/// `Z[a, b, x] / (a^{h+1}, b^2, a^h·b, (h+1)·a^h·x)`.
pub fn build_presentation(space: &SpaceSpec) -> Ring {
    let h = space.top_power();
    let generators = vec![
        GeneratorInfo::new("a", -space.cell_degree()),
        GeneratorInfo::new("b", -1),
        GeneratorInfo::new("x", space.x_degree()),
    ];
    let rel = |a, b, x| Monomial::from_exponents(&[a, b, x]);
    GradedPresentation::new(
        format!("H_*(L{space})"),
        generators,
        vec![rel(h + 1, 0, 0), rel(0, 2, 0), rel(h, 1, 0)],
        vec![TorsionRelation {
            modulus: space.euler_multiple() as u64,
            monomial: rel(h, 0, 1),
        }],
        space.dimension(),
    )
    .expect("built-in presentations are valid")
}

/// Integer combination of normal-form monomials.
///
/// Coefficients of torsion monomials are kept in `[0, k)`; monomials that
/// vanish in the ring never appear.
#[derive(Clone)]
pub struct Element {
    ring: Ring,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Element {
    pub fn zero(ring: &Ring) -> Self {
        Element {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::monomial(ring, ring.one_monomial(), BigInt::one())
    }

    pub fn monomial(ring: &Ring, m: Monomial, coefficient: impl Into<BigInt>) -> Self {
        let mut e = Self::zero(ring);
        e.add_term(m, coefficient.into());
        e
    }

    pub fn generator(ring: &Ring, name: &str) -> Result<Self, RingError> {
        Ok(Self::monomial(ring, ring.generator_monomial(name)?, 1))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() || self.ring.is_zero_monomial(&m) {
            return;
        }
        let modulus = self.ring.modulus_unchecked(&m);
        let mut total = self.terms.remove(&m).unwrap_or_default() + c;
        if modulus > 0 {
            total = total.mod_floor(&BigInt::from(modulus));
        }
        if !total.is_zero() {
            self.terms.insert(m, total);
        }
    }

    fn same_ring(&self, other: &Element) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring
    }

    /// Common degree of all terms; `None` for the zero element.
    pub fn degree(&self) -> Result<Option<i64>, RingError> {
        let mut degrees = self.terms.keys().map(|m| self.ring.degree(m));
        let Some(first) = degrees.next() else {
            return Ok(None);
        };
        if degrees.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(RingError::NonHomogeneous)
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element, RingError> {
        if !self.same_ring(other) {
            return Err(RingError::MixedPresentations);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Element {
        let mut out = Element::zero(&self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    /// The loop product, bilinearly extended from monomials.
    pub fn multiply(&self, other: &Element) -> Result<Element, RingError> {
        if !self.same_ring(other) {
            return Err(RingError::MixedPresentations);
        }
        let mut out = Element::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((negative, m)) = self.ring.monomial_product(m1, m2) {
                    let c = c1 * c2;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }
}

/// Reduces a word of generator powers to normal form, applying the Koszul
/// sign for every transposition of two odd letters.
pub fn normal_form(ring: &Ring, word: &[(usize, u32)]) -> Result<Element, RingError> {
    let n = ring.num_generators();
    let mut m = Monomial::one(n);
    let mut odd_letters: Vec<usize> = Vec::new();
    for &(g, e) in word {
        if g >= n {
            return Err(RingError::UnknownGenerator(format!("#{g}")));
        }
        m.0[g] += e;
        if ring.generators[g].parity == Parity::Odd {
            odd_letters.extend(std::iter::repeat_n(g, e as usize));
        }
    }
    let inversions = (0..odd_letters.len())
        .flat_map(|i| (i + 1..odd_letters.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| odd_letters[i] > odd_letters[j])
        .count();
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    Ok(Element::monomial(ring, m, sign))
}

/// [`normal_form`] on a word given by generator names.
pub fn normal_form_named(ring: &Ring, word: &[(&str, u32)]) -> Result<Element, RingError> {
    let indexed = word
        .iter()
        .map(|&(name, e)| Ok((ring.generator_index(name)?, e)))
        .collect::<Result<Vec<_>, RingError>>()?;
    normal_form(ring, &indexed)
}

/// Parses and normalizes a monomial string such as `a^2*b*x`.
pub fn parse_element(ring: &Ring, s: &str) -> Result<Element, RingError> {
    normal_form(ring, &ring.parse_word(s)?)
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.terms == other.terms
    }
}

impl Eq for Element {}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let name = self.ring.format_monomial(m);
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{magnitude}·{name}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Element {
    type Output = Element;

    /// Panics if the operands live in different presentations.
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs)
            .expect("adding elements of different rings")
    }
}

impl Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        self.scale(&BigInt::from(-1))
    }
}

impl Sub for &Element {
    type Output = Element;

    fn sub(self, rhs: &Element) -> Element {
        self + &(-rhs)
    }
}

impl Mul for &Element {
    type Output = Element;

    /// Panics if the operands live in different presentations.
    fn mul(self, rhs: &Element) -> Element {
        self.multiply(rhs)
            .expect("multiplying elements of different rings")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cokernel, IntegerMatrix};

    fn hp(n: u32) -> Ring {
        build_presentation(&SpaceSpec::hp(n).unwrap())
    }

    fn el(ring: &Ring, s: &str) -> Element {
        parse_element(ring, s).unwrap()
    }

    #[test]
    fn presentations_match_the_ring_tables() {
        let r = hp(3);
        let names: Vec<_> = r
            .monomial_relations
            .iter()
            .map(|m| r.format_monomial(m))
            .collect();
        assert_eq!(names, ["a^4", "b^2", "a^3*b"]);
        assert_eq!(r.torsion_relations.len(), 1);
        assert_eq!(r.torsion_relations[0].modulus, 4);
        assert_eq!(r.format_monomial(&r.torsion_relations[0].monomial), "a^3*x");
        assert_eq!(r.ambient_shift, 12);

        let r = hp(1);
        let names: Vec<_> = r
            .monomial_relations
            .iter()
            .map(|m| r.format_monomial(m))
            .collect();
        assert_eq!(names, ["a^2", "b^2", "a*b"]);
        assert_eq!(r.torsion_relations[0].modulus, 2);
        assert_eq!(r.format_monomial(&r.torsion_relations[0].monomial), "a*x");

        let r = build_presentation(&SpaceSpec::op2());
        let names: Vec<_> = r
            .monomial_relations
            .iter()
            .map(|m| r.format_monomial(m))
            .collect();
        assert_eq!(names, ["a^3", "b^2", "a^2*b"]);
        assert_eq!(r.torsion_relations[0].modulus, 3);
        assert_eq!(r.format_monomial(&r.torsion_relations[0].monomial), "a^2*x");
        let degrees: Vec<_> = r.generators.iter().map(|g| g.loop_degree).collect();
        assert_eq!(degrees, [-8, -1, 22]);
    }

    #[test]
    fn normal_form_examples() {
        let r = hp(2);
        let ba = normal_form_named(&r, &[("b", 1), ("a", 1)]).unwrap();
        assert_eq!(ba, el(&r, "a*b"));
        assert!(normal_form_named(&r, &[("b", 1), ("b", 1)])
            .unwrap()
            .is_zero());
        assert!(normal_form_named(&r, &[("a", 2), ("a", 1)])
            .unwrap()
            .is_zero());
        assert_eq!(
            normal_form_named(&r, &[("q", 1)]).unwrap_err(),
            RingError::UnknownGenerator("q".into())
        );
    }

    #[test]
    fn koszul_sign_with_two_odd_generators() {
        let r = GradedPresentation::new(
            "exterior",
            vec![GeneratorInfo::new("u", 1), GeneratorInfo::new("v", 3)],
            vec![
                Monomial::from_exponents(&[2, 0]),
                Monomial::from_exponents(&[0, 2]),
            ],
            vec![],
            0,
        )
        .unwrap();
        let vu = normal_form_named(&r, &[("v", 1), ("u", 1)]).unwrap();
        assert_eq!(vu, -&el(&r, "u*v"));
        let u = el(&r, "u");
        let v = el(&r, "v");
        assert_eq!(&v * &u, -&(&u * &v));
    }

    #[test]
    fn odd_generator_without_square_relation_is_rejected() {
        let err =
            GradedPresentation::new("bad", vec![GeneratorInfo::new("u", 1)], vec![], vec![], 0);
        assert!(matches!(err, Err(RingError::InvalidPresentation(_))));
    }

    #[test]
    fn multiplication_examples() {
        for n in 1..5 {
            let r = hp(n);
            let a = el(&r, "a");
            let top = el(&r, &format!("a^{n}"));
            let below = if n == 1 {
                Element::one(&r)
            } else {
                el(&r, &format!("a^{}", n - 1))
            };
            assert_eq!(&below * &a, top);
            assert!((&top * &a).is_zero());
        }
        let r = hp(2);
        let e = el(&r, "a*b*x^2");
        assert_eq!(&Element::one(&r) * &e, e);
        let three = Element::monomial(&r, r.one_monomial(), 3);
        assert!((&three * &el(&r, "a^2*x")).is_zero());
        assert_eq!(el(&r, "a^2*x").scale(&BigInt::from(4)), el(&r, "a^2*x"));
    }

    #[test]
    fn mixed_presentations_are_rejected() {
        let (r2, r3) = (hp(2), hp(3));
        let err = el(&r2, "a").multiply(&el(&r3, "a")).unwrap_err();
        assert_eq!(err, RingError::MixedPresentations);
        // equal presentations built separately are compatible
        assert!(el(&r2, "a").multiply(&el(&hp(2), "x")).is_ok());
    }

    #[test]
    fn torsion_modulus_examples() {
        for n in 1..6u32 {
            let r = hp(n);
            for q in 1..5 {
                let m = r.parse_monomial(&format!("a^{n}*x^{q}")).unwrap();
                assert_eq!(r.torsion_modulus(&m).unwrap(), n as u64 + 1);
            }
            for p in 0..n {
                let m = r.parse_monomial(&format!("a^{p}*x^3")).unwrap();
                assert_eq!(r.torsion_modulus(&m).unwrap(), 0);
            }
            assert_eq!(r.torsion_modulus(&r.one_monomial()).unwrap(), 0);
            let zero = r.parse_monomial(&format!("a^{}", n + 1)).unwrap();
            assert!(matches!(
                r.torsion_modulus(&zero),
                Err(RingError::ZeroMonomial(_))
            ));
        }
    }

    /// Decides `k·m ∈ I` for the ideal `I` generated by the relations by
    /// brute force: `k·m` lies in `I` iff some relation generator divides
    /// `m` with a coefficient dividing `k` (monomial ideals over `Z`).
    fn brute_force_order(r: &Ring, m: &Monomial, search: u64) -> u64 {
        let gens: Vec<(u64, &Monomial)> = r
            .monomial_relations
            .iter()
            .map(|m| (1, m))
            .chain(r.torsion_relations.iter().map(|t| (t.modulus, &t.monomial)))
            .collect();
        (1..=search)
            .find(|k| gens.iter().any(|(c, g)| g.divides(m) && k % c == 0))
            .unwrap_or(0)
    }

    #[test]
    fn torsion_modulus_matches_ideal_membership() {
        for n in 1..5u32 {
            let r = hp(n);
            for m in r.basis(Cutoff::new(4)) {
                let expected = brute_force_order(&r, &m, 20);
                assert_eq!(
                    r.torsion_modulus(&m).unwrap(),
                    expected,
                    "{}",
                    r.format_monomial(&m)
                );
            }
        }
    }

    #[test]
    fn basis_examples() {
        let r = hp(2);
        let c = Cutoff::new(4);
        let show = |d| -> Vec<String> {
            r.basis_in_degree(d, c)
                .iter()
                .map(|m| r.format_monomial(m))
                .collect()
        };
        assert_eq!(show(0), ["1"]);
        assert_eq!(show(6), ["a*x"]);
        assert_eq!(show(2), ["a^2*x"]);
        assert!(show(1).is_empty());
    }

    #[test]
    fn additive_group_examples() {
        let r = hp(2);
        let c = Cutoff::new(4);
        assert_eq!(r.additive_group(2, c), AbelianGroup::cyclic(3));
        assert_eq!(r.additive_group(-8, c), AbelianGroup::free(1));
        assert!(r.additive_group(1, c).is_trivial());
        let o = build_presentation(&SpaceSpec::op2());
        for m in 1..5 {
            assert_eq!(
                o.additive_group(22 * m - 16, Cutoff::new(5)),
                AbelianGroup::cyclic(3)
            );
        }
    }

    #[test]
    fn cutoff_for_degree_covers_range() {
        let r = hp(2);
        let c = r.cutoff_for_degree(30).unwrap();
        // a^2*b*x^q is zero; a^2*x^4 has degree 32 > 30, a^2*x^3 has degree 22
        assert!(c.max_exponent >= 3);
        let bigger = Cutoff::new(c.max_exponent + 3);
        for d in -10..=30 {
            assert_eq!(r.basis_in_degree(d, c), r.basis_in_degree(d, bigger));
        }
    }

    /// Independent additive oracle: the free abelian group on all unreduced
    /// exponent vectors of degree `d`, modulo the relation submodule, via a
    /// cokernel computation.
    fn oracle_group(r: &Ring, d: i64, max_exp: u32) -> AbelianGroup {
        let k = r.num_generators();
        let mut words = Vec::new();
        let mut stack = vec![Vec::<u32>::new()];
        while let Some(w) = stack.pop() {
            if w.len() == k {
                let m = Monomial::from_exponents(&w);
                if r.degree(&m) == d {
                    words.push(m);
                }
                continue;
            }
            for e in 0..=max_exp {
                let mut next = w.clone();
                next.push(e);
                stack.push(next);
            }
        }
        let mut relation_columns = Vec::new();
        for (i, w) in words.iter().enumerate() {
            if r.monomial_relations.iter().any(|rel| rel.divides(w)) {
                relation_columns.push((i, 1i64));
            }
            for t in &r.torsion_relations {
                if t.monomial.divides(w) {
                    relation_columns.push((i, t.modulus as i64));
                }
            }
        }
        let mut rel = IntegerMatrix::zeros(words.len(), relation_columns.len());
        for (col, (row, c)) in relation_columns.into_iter().enumerate() {
            rel[(row, col)] = BigInt::from(c);
        }
        cokernel(&rel).unwrap()
    }

    #[test]
    fn additive_group_matches_relation_module_oracle() {
        for space in [
            SpaceSpec::hp(1).unwrap(),
            SpaceSpec::hp(2).unwrap(),
            SpaceSpec::hp(3).unwrap(),
            SpaceSpec::op2(),
        ] {
            let r = build_presentation(&space);
            let hi = 2 * space.x_degree();
            let cutoff = r.cutoff_for_degree(hi).unwrap();
            for d in -space.dimension() - 2..=hi {
                assert_eq!(
                    r.additive_group(d, cutoff),
                    oracle_group(&r, d, cutoff.max_exponent.max(space.top_power() + 1)),
                    "{space} degree {d}"
                );
            }
        }
    }

    #[test]
    fn display_and_parse() {
        let r = hp(2);
        let e = &el(&r, "a*x").scale(&BigInt::from(4)) + &el(&r, "b");
        assert_eq!(e.to_string(), "b + 4·a*x");
        assert_eq!(Element::one(&r).scale(&BigInt::from(2)).to_string(), "2·1");
        assert_eq!(Element::zero(&r).to_string(), "0");
        assert_eq!((-&el(&r, "x")).to_string(), "-x");
        assert!(parse_element(&r, "a**b").is_err());
        assert!(parse_element(&r, "a^z").is_err());
        assert!(r.parse_monomial("x*a").is_err());
        assert_eq!(parse_element(&r, "x*a").unwrap(), el(&r, "a*x"));
    }

    #[test]
    fn degree_of_elements() {
        let r = hp(2);
        assert_eq!(el(&r, "a*b*x").degree().unwrap(), Some(5));
        assert_eq!(Element::zero(&r).degree().unwrap(), None);
        let mixed = &el(&r, "a") + &el(&r, "b");
        assert_eq!(mixed.degree(), Err(RingError::NonHomogeneous));
    }
}
