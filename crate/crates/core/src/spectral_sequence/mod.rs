//! The loop-homology spectral sequence of `ΩM → LM → M`,
//! `E^2_{-p,q} = H^p(M; H_q(ΩM)) ⇒ H_{*+d}(LM)`, in a finite window.
//!
//! `E^2 = Z[a]/(a^{h+1}) ⊗ Z[x] ⊗ Λ[t]` is free, so every page up to the
//! first nonzero differential is free as well. The only nonzero
//! differential is on page `d = dim M`:
//! `d^d(a^i ⊗ x^k t) = s · a^{i+h} ⊗ x^{k+1}` with `s = χ(M)`, which is zero
//! unless `i = 0`. The classes `x^k` are permanent cycles.

mod gysin;

pub use gysin::{compare_einfty_vs_splitting, gysin_sphere_bundle, splitting_additive};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::{homology_at, AbelianGroup, IntegerMatrix, LinalgError};
use crate::space::SpaceSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SsError {
    #[error("page {found} given where page {expected} was expected")]
    WrongPage { expected: String, found: String },
    #[error("position ({p}, {q}) is not certified by the window q <= {max_q}")]
    Window { p: i64, q: i64, max_q: i64 },
    #[error("nonzero differential at ({p}, {q}) touches a group with torsion")]
    NonFreeDifferential { p: i64, q: i64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `a^a ⊗ x^x t^t`, with `a` from `H^*(M)` and `x^x t^t` from `H_*(ΩM)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub a: u32,
    pub x: u32,
    pub t: bool,
}

impl Label {
    /// `(p, q)` of the label.
    pub fn position(&self, space: &SpaceSpec) -> (i64, i64) {
        (
            -space.cell_degree() * self.a as i64,
            space.x_degree() * self.x as i64 + if self.t { space.t_degree() } else { 0 },
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let power = |g: &str, e: u32| match e {
            0 => None,
            1 => Some(g.to_string()),
            e => Some(format!("{g}^{e}")),
        };
        let left = power("a", self.a).unwrap_or_else(|| "1".into());
        let right: Vec<String> = [power("x", self.x), self.t.then(|| "t".to_string())]
            .into_iter()
            .flatten()
            .collect();
        let right = if right.is_empty() {
            "1".to_string()
        } else {
            right.join("")
        };
        write!(f, "{left}⊗{right}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub group: AbelianGroup,
    /// The `E^2` generators living at this position.
    pub labels: Vec<Label>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PageIndex {
    Finite(u32),
    Infinity,
}

impl fmt::Display for PageIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PageIndex::Finite(r) => write!(f, "E^{r}"),
            PageIndex::Infinity => write!(f, "E^∞"),
        }
    }
}

/// A nonzero entry `((p, q), E_{p,q})`.
pub type Placed = ((i64, i64), AbelianGroup);

/// One page within the window `p ∈ [-d, 0]`, `q ∈ [0, max_q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSPage {
    pub space: SpaceSpec,
    pub r: PageIndex,
    pub max_q: i64,
    pub entries: BTreeMap<(i64, i64), Entry>,
    /// `d^r` out of `(p, q)`; absent means zero.
    pub differentials: BTreeMap<(i64, i64), IntegerMatrix>,
}

/// `3|x| + 7`: three periods of the pattern in `q`.
pub fn default_max_q(space: &SpaceSpec) -> i64 {
    3 * space.x_degree() + 7
}

/// Smallest `max_q` certifying every antidiagonal with total degree up to `total`.
pub fn max_q_for_total(space: &SpaceSpec, total: i64) -> i64 {
    // q reaches total + d at p = -d; certification needs total + d - 1
    default_max_q(space).max(total + space.dimension())
}

/// `E^2` with all differentials zero.
pub fn build_e2(space: &SpaceSpec, max_q: Option<i64>) -> SSPage {
    let max_q = max_q.unwrap_or_else(|| default_max_q(space));
    let mut entries: BTreeMap<(i64, i64), Entry> = BTreeMap::new();
    for a in 0..=space.top_power() {
        for x in 0..=(max_q / space.x_degree()) as u32 {
            for t in [false, true] {
                let label = Label { a, x, t };
                let (p, q) = label.position(space);
                if q > max_q {
                    continue;
                }
                let e = entries.entry((p, q)).or_insert_with(|| Entry {
                    group: AbelianGroup::trivial(),
                    labels: Vec::new(),
                });
                e.labels.push(label);
                e.group = AbelianGroup::free(e.labels.len());
            }
        }
    }
    SSPage {
        space: *space,
        r: PageIndex::Finite(2),
        max_q,
        entries,
        differentials: BTreeMap::new(),
    }
}

impl SSPage {
    fn dimension(&self) -> i64 {
        self.space.dimension()
    }

    fn page_number(&self) -> Option<i64> {
        match self.r {
            PageIndex::Finite(r) => Some(r as i64),
            PageIndex::Infinity => None,
        }
    }

    /// Every differential on any page into or out of `(p, q)` stays inside the window.
    pub fn is_certified(&self, p: i64, q: i64) -> bool {
        // d^r out of (p, q) lands in the window's p-range only for r <= p + d
        p + self.dimension() < 2 || q + p + self.dimension() - 1 <= self.max_q
    }

    pub fn entry(&self, p: i64, q: i64) -> Option<&Entry> {
        self.entries.get(&(p, q))
    }

    /// `E_{p,q}`; outside `p ∈ [-d, 0]`, `q >= 0` it is zero. On `E^∞`,
    /// positions whose differentials may leave the window are an error.
    pub fn group(&self, p: i64, q: i64) -> Result<AbelianGroup, SsError> {
        if p > 0 || p < -self.dimension() || q < 0 {
            return Ok(AbelianGroup::trivial());
        }
        let certified = self.r != PageIndex::Infinity || self.is_certified(p, q);
        if q > self.max_q || !certified {
            return Err(SsError::Window {
                p,
                q,
                max_q: self.max_q,
            });
        }
        Ok(self
            .entry(p, q)
            .map(|e| e.group.clone())
            .unwrap_or_else(AbelianGroup::trivial))
    }

    fn rank(&self, p: i64, q: i64) -> usize {
        self.entry(p, q).map_or(0, |e| e.group.free_rank)
    }

    /// `d^r: E_{p,q} → E_{p-r,q+r-1}` on the free parts.
    pub fn differential(&self, p: i64, q: i64) -> IntegerMatrix {
        if let Some(m) = self.differentials.get(&(p, q)) {
            return m.clone();
        }
        match self.page_number() {
            Some(r) => IntegerMatrix::zeros(self.rank(p - r, q + r - 1), self.rank(p, q)),
            None => IntegerMatrix::zeros(0, self.rank(p, q)),
        }
    }

    /// Nonzero entries with `p + q = total`.
    pub fn antidiagonal(&self, total: i64) -> Result<Vec<Placed>, SsError> {
        let mut out = Vec::new();
        for p in -self.dimension()..=0 {
            let g = self.group(p, total - p)?;
            if !g.is_trivial() {
                out.push(((p, total - p), g));
            }
        }
        Ok(out)
    }

    /// Direct sum along an antidiagonal.
    pub fn total_group(&self, total: i64) -> Result<AbelianGroup, SsError> {
        Ok(self.antidiagonal(total)?.into_iter().map(|(_, g)| g).sum())
    }

    /// `Σ (-1)^{p+q} rank E_{p,q}` over the window.
    pub fn euler_characteristic(&self) -> i64 {
        self.entries
            .iter()
            .map(|(&(p, q), e)| {
                let r = e.group.free_rank as i64;
                if (p + q).rem_euclid(2) == 0 {
                    r
                } else {
                    -r
                }
            })
            .sum()
    }

    /// Positions where `d^r ∘ d^r ≠ 0`.
    pub fn d_squared_failures(&self) -> Vec<(i64, i64)> {
        let Some(r) = self.page_number() else {
            return Vec::new();
        };
        self.entries
            .keys()
            .filter(|&&(p, q)| {
                let first = self.differential(p, q);
                let second = self.differential(p - r, q + r - 1);
                second.cols() == first.rows() && !(&second * &first).is_zero()
            })
            .copied()
            .collect()
    }

    /// `E^{r+1} = ker d^r / im d^r`.
    pub fn turn(&self) -> Result<SSPage, SsError> {
        let Some(r) = self.page_number() else {
            return Err(SsError::WrongPage {
                expected: "a finite page".into(),
                found: self.r.to_string(),
            });
        };
        let mut entries = BTreeMap::new();
        for (&(p, q), e) in &self.entries {
            let d_in = self.differential(p + r, q - r + 1);
            let d_out = self.differential(p, q);
            let touched = !d_in.is_zero() || !d_out.is_zero();
            if touched && !e.group.is_free() {
                return Err(SsError::NonFreeDifferential { p, q });
            }
            let group = if touched {
                homology_at(&d_in, &d_out)?
            } else {
                e.group.clone()
            };
            if !group.is_trivial() {
                entries.insert(
                    (p, q),
                    Entry {
                        group,
                        labels: e.labels.clone(),
                    },
                );
            }
        }
        Ok(SSPage {
            space: self.space,
            r: PageIndex::Finite(r as u32 + 1),
            max_q: self.max_q,
            entries,
            differentials: BTreeMap::new(),
        })
    }
}

/// `d^d` on `E^2 = E^d` with scalar `s`: `a^i ⊗ x^k t ↦ s · a^{i+h} ⊗ x^{k+1}`
/// by the Leibniz rule from `d(t) = s a^h ⊗ x` and `d(x) = 0`.
/// Returns `E^d` with the differential installed; targets outside the
/// window are dropped.
pub fn install_differentials(page: &SSPage, scalar: &BigInt) -> Result<SSPage, SsError> {
    if page.r != PageIndex::Finite(2) || !page.differentials.is_empty() {
        return Err(SsError::WrongPage {
            expected: "a bare E^2".into(),
            found: page.r.to_string(),
        });
    }
    let space = page.space;
    let d = space.dimension();
    let h = space.top_power();
    let mut out = page.clone();
    out.r = PageIndex::Finite(d as u32);
    for (&(p, q), e) in &page.entries {
        let Some(target) = page.entry(p - d, q + d - 1) else {
            continue;
        };
        let mut m = IntegerMatrix::zeros(target.labels.len(), e.labels.len());
        for (j, src) in e.labels.iter().enumerate() {
            if !src.t {
                continue;
            }
            let image = Label {
                a: src.a + h,
                x: src.x + 1,
                t: false,
            };
            // a^{i+h} = 0 in H^*(M) unless i = 0
            if image.a > h {
                continue;
            }
            let i = target
                .labels
                .iter()
                .position(|l| *l == image)
                .expect("image label sits at the target position");
            m[(i, j)] = scalar.clone();
        }
        if !m.is_zero() {
            out.differentials.insert((p, q), m);
        }
    }
    Ok(out)
}

/// All pages from `E^2` to `E^∞` with `d^d` scaled by `scalar`.
pub fn run_pages(
    space: &SpaceSpec,
    max_q: Option<i64>,
    scalar: &BigInt,
) -> Result<Vec<SSPage>, SsError> {
    let e2 = build_e2(space, max_q);
    let ed = install_differentials(&e2, scalar)?;
    // every later d^r leaves the strip p ∈ [-d, 0]
    let mut einf = ed.turn()?;
    einf.r = PageIndex::Infinity;
    Ok(vec![e2, ed, einf])
}

/// `E^∞` with the differential `d^d = ×χ(M)`.
pub fn run_to_infinity(space: &SpaceSpec, max_q: Option<i64>) -> Result<SSPage, SsError> {
    let s = BigInt::from(space.euler_multiple());
    Ok(run_pages(space, max_q, &s)?.pop().expect("three pages"))
}

/// Scalars `s` among `candidates` for which `E^∞` matches the stable
/// splitting on ordinary degrees `0..=max_degree`.
pub fn solve_differential_scalar(
    space: &SpaceSpec,
    candidates: impl IntoIterator<Item = i64>,
    max_degree: i64,
) -> Result<Vec<i64>, SsError> {
    let d = space.dimension();
    let max_q = max_q_for_total(space, max_degree - d);
    let splitting = splitting_additive(space, 0..=max_degree);
    let mut hits = Vec::new();
    for s in candidates {
        let einf = run_pages(space, Some(max_q), &BigInt::from(s))?
            .pop()
            .expect("three pages");
        let mut ok = true;
        for k in 0..=max_degree {
            if einf.total_group(k - d)? != splitting[&k] {
                ok = false;
                break;
            }
        }
        if ok {
            hits.push(s);
        }
    }
    Ok(hits)
}

impl fmt::Display for SSPage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} of L{} (q <= {})", self.r, self.space, self.max_q)?;
        for (&(p, q), e) in &self.entries {
            let labels: Vec<String> = e.labels.iter().map(|l| l.to_string()).collect();
            write!(f, "  ({p}, {q}): {} [{}]", e.group, labels.join(", "))?;
            if let Some(m) = self.differentials.get(&(p, q)).filter(|m| !m.is_zero()) {
                write!(f, " d = {:?}", m)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
