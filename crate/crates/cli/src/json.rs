//! Machine-readable ring tables.

use serde::{Deserialize, Serialize};

use bvloop::graded_ring::{
    Cutoff, GeneratorInfo, GradedPresentation, Monomial, Parity, Ring, TorsionRelation,
};
use bvloop::linalg::AbelianGroup;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    pub degree: i64,
    pub parity: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionJson {
    pub modulus: u64,
    pub monomial: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub degree: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    pub space: String,
    pub shift: i64,
    pub generators: Vec<GeneratorJson>,
    pub relations: Vec<String>,
    pub torsion: Vec<TorsionJson>,
    pub groups: Vec<GroupJson>,
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

impl RingJson {
    pub fn new(space: &str, ring: &Ring, degrees: std::ops::RangeInclusive<i64>) -> Self {
        let cutoff = ring
            .cutoff_for_degree(*degrees.end())
            .unwrap_or(Cutoff::new(0));
        RingJson {
            space: space.to_string(),
            shift: ring.ambient_shift,
            generators: ring
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    name: g.name.clone(),
                    degree: g.loop_degree,
                    parity: parity_name(g.parity).into(),
                })
                .collect(),
            relations: ring
                .monomial_relations
                .iter()
                .map(|m| ring.format_monomial(m))
                .collect(),
            torsion: ring
                .torsion_relations
                .iter()
                .map(|t| TorsionJson {
                    modulus: t.modulus,
                    monomial: ring.format_monomial(&t.monomial),
                })
                .collect(),
            groups: degrees
                .map(|degree| {
                    let g = ring.additive_group(degree, cutoff);
                    GroupJson {
                        degree,
                        rank: g.free_rank,
                        torsion: g.torsion,
                    }
                })
                .collect(),
        }
    }

    /// Rebuilds the presentation the table was printed from.
    pub fn to_presentation(&self, label: &str) -> Result<Ring, String> {
        let generators: Vec<GeneratorInfo> = self
            .generators
            .iter()
            .map(|g| GeneratorInfo::new(g.name.clone(), g.degree))
            .collect();
        for (g, j) in generators.iter().zip(&self.generators) {
            if parity_name(g.parity) != j.parity {
                return Err(format!("parity of `{}` disagrees with its degree", g.name));
            }
        }
        let parse = |s: &str| -> Result<Monomial, String> {
            let mut exps = vec![0u32; generators.len()];
            if s.trim() == "1" {
                return Ok(Monomial::from_exponents(&exps));
            }
            for factor in s.split('*') {
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u32>()
                            .map_err(|_| format!("bad exponent in `{s}`"))?,
                    ),
                    None => (factor, 1),
                };
                let i = generators
                    .iter()
                    .position(|g| g.name == name)
                    .ok_or_else(|| format!("unknown generator `{name}`"))?;
                exps[i] += e;
            }
            Ok(Monomial::from_exponents(&exps))
        };
        let relations = self
            .relations
            .iter()
            .map(|r| parse(r))
            .collect::<Result<Vec<_>, _>>()?;
        let torsion = self
            .torsion
            .iter()
            .map(|t| {
                Ok(TorsionRelation {
                    modulus: t.modulus,
                    monomial: parse(&t.monomial)?,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        GradedPresentation::new(label, generators, relations, torsion, self.shift)
            .map_err(|e| e.to_string())
    }

    pub fn group(&self, degree: i64) -> Option<AbelianGroup> {
        self.groups
            .iter()
            .find(|g| g.degree == degree)
            .map(|g| AbelianGroup::new(g.rank, g.torsion.iter().copied()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bvloop::{build_presentation, SpaceSpec};

    #[test]
    fn presentation_round_trips() {
        for s in ["hp:1", "hp:3", "op2", "s8"] {
            let space: SpaceSpec = s.parse().unwrap();
            let ring = build_presentation(&space);
            let json = RingJson::new(s, &ring, -20..=40);
            let text = serde_json::to_string_pretty(&json).unwrap();
            let back: RingJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, json);
            assert_eq!(*back.to_presentation(&ring.label).unwrap(), *ring);
        }
    }

    #[test]
    fn rejects_bad_parity() {
        let ring = build_presentation(&SpaceSpec::hp(2).unwrap());
        let mut json = RingJson::new("hp:2", &ring, 0..=0);
        json.generators[1].parity = "even".into();
        assert!(json.to_presentation("x").is_err());
    }
}
