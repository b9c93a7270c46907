//! Verification suites driven by the command line.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bv_structure::{
    assemble_delta, bracket_properties, check_delta_squared, delta_b_powers, seven_term_sweep,
    torsion_coherence, BVTable,
};
use crate::graded_ring::{build_presentation, Cutoff};
use crate::linalg::{smith_normal_form, IntegerMatrix};
use crate::loop_models::{
    based_loop_ring, bialgebra_defect, coassociativity_defect, dualize, DividedPowerBasisElement,
};
use crate::report::VerificationReport;
use crate::space::SpaceSpec;
use crate::spectral_sequence::{
    compare_einfty_vs_splitting, default_max_q, run_pages, solve_differential_scalar,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bv,
    Ss,
    Duality,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bv" => Ok(Suite::Bv),
            "ss" => Ok(Suite::Ss),
            "duality" => Ok(Suite::Duality),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (expected bv, ss, duality or all)"
            )),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Bv => "bv",
            Suite::Ss => "ss",
            Suite::Duality => "duality",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Largest power of `x` in the sweeps.
    pub max_q: u32,
    /// Largest ordinary degree of `H_*(LM)` compared against the splitting;
    /// `None` picks four periods of `x`.
    pub max_degree: Option<i64>,
    pub seed: u64,
    /// Random matrices in the Smith normal form check.
    pub random_matrices: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_q: 6,
            max_degree: None,
            seed: 0x5eed,
            random_matrices: 50,
        }
    }
}

pub fn run(space: &SpaceSpec, suite: Suite, opts: &VerifyOptions) -> VerificationReport {
    match suite {
        Suite::Bv => bv_suite(space, opts),
        Suite::Ss => ss_suite(space, opts),
        Suite::Duality => duality_suite(space, opts),
        Suite::All => {
            let mut report = VerificationReport::new("all", space.to_string());
            for s in [Suite::Bv, Suite::Ss, Suite::Duality] {
                report.absorb(run(space, s, opts));
            }
            report
        }
    }
}

/// `Δ^2 = 0`, the seven-term identity, torsion coherence, the bracket and
/// the re-derivation of `Δ`.
pub fn bv_suite(space: &SpaceSpec, opts: &VerifyOptions) -> VerificationReport {
    let table = BVTable::closed_form(space);
    let cutoff = Cutoff::new(opts.max_q);
    let ring = table.ring().clone();
    let mut report = VerificationReport::new("bv", space.to_string());
    report.param("max_q", opts.max_q);

    let top = ring
        .basis(cutoff)
        .iter()
        .map(|m| ring.degree(m))
        .max()
        .unwrap_or(0);
    let lowest = -space.dimension() - 1;
    for r in [
        check_delta_squared(&table, lowest..=top, cutoff),
        seven_term_sweep(&table, cutoff),
        torsion_coherence(&table, opts.max_q),
        bracket_properties(&table, Cutoff::new(opts.max_q.min(1))),
    ] {
        for c in r.checks {
            report.push_check(c);
        }
    }

    match assemble_delta(space, opts.max_q) {
        Ok(d) => report.push(
            "derivation",
            true,
            format!(
                "ν = {}; λ = {}; ρ₁ = {}; matches the closed form",
                d.nu, d.lambda, d.rho.rho1
            ),
        ),
        Err(e) => report.push("derivation", false, e.to_string()),
    }

    if space.is_sphere() {
        // Δ(b x^q) = (1 + 2q) x^q on an even sphere
        let values = delta_b_powers(&table, opts.max_q);
        let expected: Vec<BigInt> = (0..=opts.max_q).map(|q| BigInt::from(1 + 2 * q)).collect();
        report.push(
            "sphere_agreement",
            values == expected,
            format!("Δ(b x^q) coefficients {values:?}"),
        );
    }
    report
}

/// `E^∞` against the splitting, the ring, and the inferred differential.
pub fn ss_suite(space: &SpaceSpec, opts: &VerifyOptions) -> VerificationReport {
    let mut report = VerificationReport::new("ss", space.to_string());
    let d = space.dimension();
    let max_degree = opts.max_degree.unwrap_or(4 * space.x_degree());
    report.param("max_degree", max_degree);

    for c in compare_einfty_vs_splitting(space, 0..=max_degree).checks {
        report.push_check(c);
    }

    let scalar = BigInt::from(space.euler_multiple());
    match run_pages(space, None, &scalar) {
        Ok(pages) => {
            let chis: Vec<i64> = pages.iter().map(|p| p.euler_characteristic()).collect();
            report.push(
                "euler_characteristic",
                chis.windows(2).all(|w| w[0] == w[1]),
                format!("{chis:?} across E^2, E^{d}, E^∞"),
            );
            let bad = pages[1].d_squared_failures();
            report.push("d_squared", bad.is_empty(), format!("failures at {bad:?}"));

            // loop degree i is the antidiagonal p + q = i
            let ring = build_presentation(space);
            let einf = &pages[2];
            let top = default_max_q(space) - d;
            let mismatches: Vec<String> = match ring.cutoff_for_degree(top) {
                Some(cutoff) => (-d..=top)
                    .filter_map(|i| match einf.total_group(i) {
                        Ok(g) if g == ring.additive_group(i, cutoff) => None,
                        Ok(g) => Some(format!(
                            "{i}: E^∞ {g}, ring {}",
                            ring.additive_group(i, cutoff)
                        )),
                        Err(e) => Some(e.to_string()),
                    })
                    .collect(),
                None => vec!["no cutoff covers the range".into()],
            };
            report.push(
                "ring_vs_einfty",
                mismatches.is_empty(),
                if mismatches.is_empty() {
                    format!("loop degrees {}..={top}", -d)
                } else {
                    mismatches.join("; ")
                },
            );
        }
        Err(e) => report.push("pages", false, e.to_string()),
    }

    let h = space.top_power() as i64;
    match solve_differential_scalar(space, 0..=h + 2, max_degree) {
        Ok(hits) => report.push(
            "solve_mode",
            hits == [h + 1],
            format!("scalars in 0..={} matching the splitting: {hits:?}", h + 2),
        ),
        Err(e) => report.push("solve_mode", false, e.to_string()),
    }

    report.push(
        "smith_normal_form",
        random_snf_check(opts.seed, opts.random_matrices),
        format!(
            "{} random matrices, seed {}",
            opts.random_matrices, opts.seed
        ),
    );
    report.param("seed", opts.seed);
    report
}

fn random_snf_check(seed: u64, count: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).all(|_| {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let m = IntegerMatrix::from_rows(&rows);
        let s = smith_normal_form(&m);
        let unimodular = |x: &IntegerMatrix| {
            let det = x.determinant();
            det == BigInt::from(1) || det == BigInt::from(-1)
        };
        &(&s.u * &m) * &s.v == s.d && unimodular(&s.u) && unimodular(&s.v)
    })
}

/// The Hopf algebra `Γ[α] ⊗ Λ[β]` and its dual.
pub fn duality_suite(space: &SpaceSpec, opts: &VerifyOptions) -> VerificationReport {
    let mut report = VerificationReport::new("duality", space.to_string());
    let cutoff = opts.max_q.max(2);
    report.param("alpha_cutoff", cutoff);

    let basis: Vec<_> = DividedPowerBasisElement::basis(cutoff).collect();
    let coassoc = basis.iter().all(|&e| coassociativity_defect(e).is_empty());
    report.push(
        "coassociativity",
        coassoc,
        format!("{} basis elements", basis.len()),
    );
    let bialgebra = basis.iter().all(|&u| {
        basis
            .iter()
            .all(|&v| bialgebra_defect(u, v).terms.is_empty())
    });
    report.push(
        "bialgebra",
        bialgebra,
        format!("{} pairs", basis.len().pow(2)),
    );

    let ring = match based_loop_ring(space) {
        Ok(r) => r,
        Err(e) => {
            report.push("based_loop_ring", true, format!("skipped: {e}"));
            return report;
        }
    };
    match dualize(space, cutoff) {
        Ok(table) => {
            report.push(
                "pairing_identity",
                table.pairing_is_identity(),
                "⟨e_i^*, e_j⟩ = δ_ij per degree",
            );
            match table.check_polynomial_pattern() {
                Ok(()) => report.push(
                    "polynomial_pattern",
                    true,
                    "x_i = x1^i, z_i = x1^i t, t^2 = 0",
                ),
                Err(e) => report.push("polynomial_pattern", false, e.to_string()),
            }
            report.push("associativity", table.is_associative(), "dual product");
            report.push(
                "graded_commutativity",
                table.is_graded_commutative(),
                "dual product",
            );
            let mut dual_degrees: Vec<i64> = basis.iter().map(|e| e.degree(space)).collect();
            let mut ring_degrees: Vec<i64> = ring
                .basis(Cutoff::new(cutoff))
                .iter()
                .map(|m| ring.degree(m))
                .collect();
            dual_degrees.sort_unstable();
            ring_degrees.sort_unstable();
            report.push(
                "based_loop_ring",
                dual_degrees == ring_degrees,
                format!("{} with matching degrees", ring.label),
            );
        }
        Err(e) => report.push("dualize", false, e.to_string()),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            max_q: 2,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn suites_pass() {
        for space in ["hp:1", "hp:2", "op2"] {
            let space: SpaceSpec = space.parse().unwrap();
            let r = run(&space, Suite::All, &quick());
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn sphere_check_only_on_spheres() {
        let hp1 = bv_suite(&SpaceSpec::hp(1).unwrap(), &quick());
        assert!(hp1.checks.iter().any(|c| c.id == "sphere_agreement"));
        let hp2 = bv_suite(&SpaceSpec::hp(2).unwrap(), &quick());
        assert!(!hp2.checks.iter().any(|c| c.id == "sphere_agreement"));
    }

    #[test]
    fn s8_skips_the_dual_product() {
        let r = duality_suite(&SpaceSpec::even_sphere(8).unwrap(), &quick());
        assert!(r.passed());
        assert!(r.checks.last().unwrap().detail.starts_with("skipped"));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Bv, Suite::Ss, Suite::Duality, Suite::All] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
