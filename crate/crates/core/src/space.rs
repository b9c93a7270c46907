//! The manifolds this crate knows about, reduced to the numeric invariants
//! the computations need.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("unsupported space `{0}` (expected hp:<n> with n >= 1, op2, s4 or s8)")]
    Unsupported(String),
}

/// Which family a [`SpaceSpec`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Quaternionic projective space `HP^n`. `HP^1` is the 4-sphere.
    Quaternionic { n: u32 },
    /// The octonionic projective plane `OP^2`.
    OctonionicPlane,
    /// The 8-sphere. Only used to calibrate the `OP^2` computation.
    Sphere8,
}

/// A closed manifold `M` whose integral cohomology is a truncated polynomial
/// ring `Z[a]/a^{h+1}` on a single generator of degree `c`.
///
/// Everything downstream is driven by the two numbers `c` (the cell
/// degree) and `h` (the top power):
///
/// * `dim M = c*h`, Euler characteristic `h + 1`;
/// * `H_*(ΩM) = Z[x] ⊗ Λ[t]` with `|t| = c - 1` and `|x| = dim M + c - 2`;
/// * loop homology generators `a`, `b`, `x` in loop degrees `-c`, `-1`, `|x|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub family: Family,
}

impl SpaceSpec {
    pub fn hp(n: u32) -> Result<Self, SpaceError> {
        if n == 0 {
            return Err(SpaceError::Unsupported("hp:0".into()));
        }
        Ok(SpaceSpec {
            family: Family::Quaternionic { n },
        })
    }

    pub fn op2() -> Self {
        SpaceSpec {
            family: Family::OctonionicPlane,
        }
    }

    /// `S^4` is `HP^1`; `S^8` is its own family.
    pub fn even_sphere(dim: u32) -> Result<Self, SpaceError> {
        match dim {
            4 => Self::hp(1),
            8 => Ok(SpaceSpec {
                family: Family::Sphere8,
            }),
            _ => Err(SpaceError::Unsupported(format!("s{dim}"))),
        }
    }

    /// Degree of the cohomology generator `a ∈ H^c(M)`.
    pub fn cell_degree(&self) -> i64 {
        match self.family {
            Family::Quaternionic { .. } => 4,
            Family::OctonionicPlane | Family::Sphere8 => 8,
        }
    }

    /// Largest `h` with `a^h != 0` in `H^*(M)`.
    pub fn top_power(&self) -> u32 {
        match self.family {
            Family::Quaternionic { n } => n,
            Family::OctonionicPlane => 2,
            Family::Sphere8 => 1,
        }
    }

    pub fn dimension(&self) -> i64 {
        self.cell_degree() * self.top_power() as i64
    }

    /// Euler characteristic; the Euler class of the tangent bundle is this
    /// multiple of the top class.
    pub fn euler_multiple(&self) -> i64 {
        self.top_power() as i64 + 1
    }

    /// Degree of the polynomial generator of `H_*(ΩM)`.
    pub fn x_degree(&self) -> i64 {
        self.dimension() + self.cell_degree() - 2
    }

    /// Degree of the exterior generator of `H_*(ΩM)`.
    pub fn t_degree(&self) -> i64 {
        self.cell_degree() - 1
    }

    /// Fibre dimension of the unit tangent sphere bundle `S(η) → M`.
    pub fn sphere_bundle_fibre_dim(&self) -> i64 {
        self.dimension() - 1
    }

    /// Rank of the bundle `lξ ⊕ (l-1)ζ` over `S(η)` whose Thom space is the
    /// `l`-th stable summand of `LM`. `ξ` has rank `c - 1`, `ζ` rank `dim M - 1`.
    pub fn thom_shift(&self, l: u32) -> i64 {
        assert!(l >= 1);
        let l = l as i64;
        (self.cell_degree() - 1) * l + (self.dimension() - 1) * (l - 1)
    }

    pub fn is_sphere(&self) -> bool {
        self.top_power() == 1
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Quaternionic { n } => write!(f, "hp:{n}"),
            Family::OctonionicPlane => write!(f, "op2"),
            Family::Sphere8 => write!(f, "s8"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "op2" => Ok(Self::op2()),
            "s4" => Self::even_sphere(4),
            "s8" => Self::even_sphere(8),
            other => {
                let n = other
                    .strip_prefix("hp:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| SpaceError::Unsupported(s.to_string()))?;
                Self::hp(n).map_err(|_| SpaceError::Unsupported(s.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let hp2 = SpaceSpec::hp(2).unwrap();
        assert_eq!(hp2.dimension(), 8);
        assert_eq!(hp2.x_degree(), 10);
        assert_eq!(hp2.t_degree(), 3);
        assert_eq!(hp2.euler_multiple(), 3);
        // 4n(l-1) + 2l + 1
        for n in 1..6u32 {
            let s = SpaceSpec::hp(n).unwrap();
            for l in 1..5u32 {
                let (n, l) = (n as i64, l as i64);
                assert_eq!(s.thom_shift(l as u32), 4 * n * (l - 1) + 2 * l + 1);
            }
        }
        let op2 = SpaceSpec::op2();
        assert_eq!(op2.dimension(), 16);
        assert_eq!(op2.x_degree(), 22);
        assert_eq!(op2.t_degree(), 7);
        assert_eq!(op2.thom_shift(1), 7);
        let s8 = SpaceSpec::even_sphere(8).unwrap();
        assert_eq!(s8.x_degree(), 14);
        assert_eq!(s8.euler_multiple(), 2);
    }

    #[test]
    fn parse_and_print() {
        for s in ["hp:1", "hp:7", "op2", "s8"] {
            assert_eq!(s.parse::<SpaceSpec>().unwrap().to_string(), s);
        }
        assert_eq!(
            "s4".parse::<SpaceSpec>().unwrap(),
            SpaceSpec::hp(1).unwrap()
        );
        assert!("hp:0".parse::<SpaceSpec>().is_err());
        assert!("cp:2".parse::<SpaceSpec>().is_err());
        assert!(SpaceSpec::even_sphere(6).is_err());
    }
}
