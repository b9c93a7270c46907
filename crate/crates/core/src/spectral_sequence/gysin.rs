//! The additive answer from the stable splitting
//! `H_*(LM) ≅ H_*(M) ⊕ ⊕_{l>=1} H_{*-s_l}(S(η))`, where `S(η)` is the unit
//! tangent sphere bundle and `s_l` the Thom shift of the `l`-th summand.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;

use super::{max_q_for_total, run_to_infinity};
use crate::linalg::{cokernel, kernel, AbelianGroup, IntegerMatrix};
use crate::report::VerificationReport;
use crate::space::SpaceSpec;

/// `H_i(M)`: `Z` in degrees `0, c, ..., hc`.
fn base_rank(space: &SpaceSpec, i: i64) -> usize {
    let c = space.cell_degree();
    usize::from(i >= 0 && i <= space.dimension() && i % c == 0)
}

/// Cap product with the Euler class `χ·[M]^*`: `H_i(M) → H_{i-d}(M)`.
fn cap_euler(space: &SpaceSpec, i: i64) -> IntegerMatrix {
    let (src, dst) = (base_rank(space, i), base_rank(space, i - space.dimension()));
    let mut m = IntegerMatrix::zeros(dst, src);
    if src == 1 && dst == 1 {
        m[(0, 0)] = BigInt::from(space.euler_multiple());
    }
    m
}

/// `H_i(S(η))` for `0 <= i <= 2d - 1`, from the Gysin sequence
/// `H_{i+1}(M) → H_{i+1-d}(M) → H_i(S(η)) → H_i(M) → H_{i-d}(M)`.
///
/// The extension `coker → H_i(S(η)) → ker` splits because `ker` is free.
pub fn gysin_sphere_bundle(space: &SpaceSpec) -> BTreeMap<i64, AbelianGroup> {
    let top = 2 * space.dimension() - 1;
    (0..=top)
        .map(|i| {
            let coker = cokernel(&cap_euler(space, i + 1)).expect("shapes match");
            let ker = kernel(&cap_euler(space, i)).expect("shapes match");
            (i, coker.direct_sum(&ker))
        })
        .collect()
}

/// `H_k(LM)` for `k` in `degrees` (ordinary, unshifted degrees).
pub fn splitting_additive(
    space: &SpaceSpec,
    degrees: RangeInclusive<i64>,
) -> BTreeMap<i64, AbelianGroup> {
    let sphere_bundle = gysin_sphere_bundle(space);
    let mut out = BTreeMap::new();
    for k in degrees {
        let mut g = AbelianGroup::free(base_rank(space, k));
        let mut l = 1;
        while space.thom_shift(l) <= k {
            if let Some(h) = sphere_bundle.get(&(k - space.thom_shift(l))) {
                g = g.direct_sum(h);
            }
            l += 1;
        }
        out.insert(k, g);
    }
    out
}

/// Compares the antidiagonal sums of `E^∞` with the splitting in every
/// ordinary degree `k` of `degrees` (total degree `k - d` in the spectral
/// sequence), flagging antidiagonals with more than one nonzero entry.
pub fn compare_einfty_vs_splitting(
    space: &SpaceSpec,
    degrees: RangeInclusive<i64>,
) -> VerificationReport {
    let mut report = VerificationReport::new("einfty_vs_splitting", space.to_string());
    let d = space.dimension();
    let (lo, hi) = (*degrees.start(), *degrees.end());
    report.param("degrees", format!("{lo}..={hi}"));
    let max_q = max_q_for_total(space, hi - d);
    report.param("max_q", max_q);

    let einf = match run_to_infinity(space, Some(max_q)) {
        Ok(p) => p,
        Err(e) => {
            report.push("einfty", false, e.to_string());
            return report;
        }
    };
    let splitting = splitting_additive(space, degrees.clone());
    let (mut mismatches, mut ambiguous, mut torsion) = (Vec::new(), Vec::new(), Vec::new());
    for k in degrees {
        match einf.antidiagonal(k - d) {
            Ok(entries) => {
                if entries.len() > 1 {
                    ambiguous.push(k);
                }
                let total: AbelianGroup = entries.into_iter().map(|(_, g)| g).sum();
                if total != splitting[&k] {
                    mismatches.push(format!("H_{k}: E^∞ {total} vs splitting {}", splitting[&k]));
                }
                if !total.torsion.is_empty() {
                    torsion.push(format!("{total} at {k}"));
                }
            }
            Err(e) => mismatches.push(format!("H_{k}: {e}")),
        }
    }
    let detail = if mismatches.is_empty() {
        format!("agree on {lo}..={hi}; torsion: {}", torsion.join(", "))
    } else {
        mismatches.join("; ")
    };
    report.push("additive_agreement", mismatches.is_empty(), detail);
    let detail = if ambiguous.is_empty() {
        "every antidiagonal has at most one nonzero entry".to_string()
    } else {
        format!("several nonzero entries in degrees {ambiguous:?}")
    };
    report.push("extension_ambiguity", ambiguous.is_empty(), detail);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Z` at `0, 4, ..., 4n - 4` and `4n + 3, ..., 8n - 1`; `Z_{n+1}` at `4n - 1`.
    fn table(n: u32) -> BTreeMap<i64, AbelianGroup> {
        let n = n as i64;
        (0..=8 * n - 1)
            .map(|i| {
                let g = if i == 4 * n - 1 {
                    AbelianGroup::cyclic(n as u64 + 1)
                } else if (i < 4 * n && i % 4 == 0) || (i > 4 * n && (i - 4 * n - 3) % 4 == 0) {
                    AbelianGroup::free(1)
                } else {
                    AbelianGroup::trivial()
                };
                (i, g)
            })
            .collect()
    }

    #[test]
    fn gysin_examples() {
        let g = gysin_sphere_bundle(&SpaceSpec::hp(2).unwrap());
        let nonzero: Vec<(i64, String)> = g
            .iter()
            .filter(|(_, g)| !g.is_trivial())
            .map(|(i, g)| (*i, g.to_string()))
            .collect();
        assert_eq!(
            nonzero,
            vec![
                (0, "Z".into()),
                (4, "Z".into()),
                (7, "Z_3".into()),
                (11, "Z".into()),
                (15, "Z".into())
            ]
        );
        let g = gysin_sphere_bundle(&SpaceSpec::hp(1).unwrap());
        assert_eq!(g[&3], AbelianGroup::cyclic(2));
        assert_eq!(g[&7], AbelianGroup::free(1));
        assert_eq!(
            gysin_sphere_bundle(&SpaceSpec::hp(3).unwrap())[&11],
            AbelianGroup::cyclic(4)
        );
        for n in 1..=6 {
            assert_eq!(gysin_sphere_bundle(&SpaceSpec::hp(n).unwrap()), table(n));
        }
    }

    #[test]
    fn splitting_examples() {
        let s = splitting_additive(&SpaceSpec::hp(2).unwrap(), 0..=20);
        assert_eq!(s[&0], AbelianGroup::free(1));
        assert!(s[&20].torsion.contains(&3));
        let s = splitting_additive(&SpaceSpec::op2(), 0..=90);
        for m in 1..=4 {
            assert_eq!(s[&(22 * m)], AbelianGroup::cyclic(3));
        }
    }

    #[test]
    fn comparison_passes() {
        for (space, hi) in [
            (SpaceSpec::hp(2).unwrap(), 60),
            (SpaceSpec::hp(3).unwrap(), 80),
            (SpaceSpec::op2(), 90),
        ] {
            let r = compare_einfty_vs_splitting(&space, 0..=hi);
            assert!(r.passed(), "{r}");
        }
    }
}
