//! Primitive universality over `Z_p`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::gap::{residue_isotropy, ResidueIsotropy};
use super::represent::{decide_class, is_universal_local, represents_all_units, UniversalCheck};
use crate::error::Result;
use crate::lattice::{
    is_isotropic, jordan_decompose, ComponentContent, FormMatrix, JordanSplitting,
};
use crate::padic::{check_prime, SquareClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Yes,
    No {
        class: Option<SquareClass>,
    },
    /// Every class of order at most `e_max` is primitively represented, and
    /// no sufficient condition applies.
    Bounded {
        e_max: u32,
    },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => f.write_str("YES"),
            Verdict::No { class: Some(c) } => write!(f, "NO ({c} not primitively represented)"),
            Verdict::No { class: None } => f.write_str("NO"),
            Verdict::Bounded { e_max } => write!(f, "BOUNDED({e_max})"),
        }
    }
}

/// One step of the decision procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// The norm ideal differs from `Z_p`, so some unit is missed.
    NormNotUnit { norm_exp: i64 },
    /// Anisotropic lattices miss every class of order at least `empirical_min`.
    Anisotropic { empirical_min: Option<u32> },
    /// Rank at least 5: universality and primitive universality coincide.
    HighRank { universal: bool },
    /// Unimodular at an odd prime of rank at least 3, or an isotropic plane.
    OddUnimodular,
    /// Improper and `½Z_2`-modular: of rank above 2, or an isotropic plane.
    ImproperHalfModular,
    /// Proper unimodular plane over `Z_2`: never universal.
    ProperUnimodularPlane,
    /// Proper unimodular of rank 3 over `Z_2`: decided by the unit pair test.
    ProperUnimodularTernary { opposite_pair: bool },
    /// Proper unimodular of rank 4 over `Z_2`: primitive iff 4 and 8 are.
    ProperUnimodularQuaternary {
        opposite_pair: bool,
        missing: Option<u32>,
    },
    /// An orthogonal summand built from Jordan pieces is universal.
    UniversalSummand { pieces: Vec<usize> },
    /// `⟨ε⟩ ⊥ K` with `K` representing every unit.
    UnitSplit { piece: usize },
    /// A class that is not primitively represented.
    ClassMissing { class: SquareClass },
    /// No class of order at most `e_max` is missing.
    NoObstructionUpTo { e_max: u32 },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::NormNotUnit { norm_exp } => {
                write!(
                    f,
                    "norm ideal has exponent {norm_exp}, not 0: units are missed"
                )
            }
            Rule::Anisotropic {
                empirical_min: Some(m),
            } => write!(f, "anisotropic: no primitive value is divisible by p^{m}"),
            Rule::Anisotropic {
                empirical_min: None,
            } => f.write_str("anisotropic"),
            Rule::HighRank { universal: true } => {
                f.write_str("rank at least 5 and universal, hence primitively universal")
            }
            Rule::HighRank { universal: false } => f.write_str("rank at least 5, not universal"),
            Rule::OddUnimodular => f.write_str("unimodular at odd p, rank >= 3 or isotropic plane"),
            Rule::ImproperHalfModular => {
                f.write_str("improper 1/2-modular, rank > 2 or isotropic plane")
            }
            Rule::ProperUnimodularPlane => {
                f.write_str("proper unimodular plane is never universal")
            }
            Rule::ProperUnimodularTernary { opposite_pair } => write!(
                f,
                "proper unimodular ternary: {}",
                if *opposite_pair {
                    "units e_i = -e_j mod 4 exist"
                } else {
                    "all units congruent mod 4"
                }
            ),
            Rule::ProperUnimodularQuaternary {
                opposite_pair: true,
                ..
            } => f.write_str("proper unimodular quaternary: units e_i = -e_j mod 4 exist"),
            Rule::ProperUnimodularQuaternary {
                missing: Some(m), ..
            } => write!(
                f,
                "proper unimodular quaternary: {m} not primitively represented"
            ),
            Rule::ProperUnimodularQuaternary { missing: None, .. } => {
                f.write_str("proper unimodular quaternary: 4 and 8 primitively represented")
            }
            Rule::UniversalSummand { pieces } => {
                write!(
                    f,
                    "orthogonal summand from Jordan pieces {pieces:?} is universal"
                )
            }
            Rule::UnitSplit { piece } => write!(
                f,
                "split by the unit piece {piece}; its complement represents all units"
            ),
            Rule::ClassMissing { class } => write!(f, "{class} not primitively represented"),
            Rule::NoObstructionUpTo { e_max } => {
                write!(f, "every class of order <= {e_max} primitively represented")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub e_max: u32,
    pub found: Vec<SquareClass>,
    pub missing: Vec<SquareClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub prime: u64,
    pub universal: bool,
    pub universal_check: Option<UniversalCheck>,
    pub primitively_universal: Verdict,
    pub trace: Vec<Rule>,
    pub spectrum: SpectrumSummary,
}

impl UniversalityReport {
    pub fn render(&self) -> String {
        let mut out = format!(
            "p = {}: universal {}, primitively universal {}\n",
            self.prime,
            if self.universal { "yes" } else { "no" },
            self.primitively_universal
        );
        for r in &self.trace {
            out.push_str(&format!("  - {r}\n"));
        }
        let names = |v: &[SquareClass]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "  primitive spectrum to order {}: found [{}] missing [{}]\n",
            self.spectrum.e_max,
            names(&self.spectrum.found),
            names(&self.spectrum.missing)
        ));
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UniversalityOptions {
    /// Depth of the necessary-condition scan; `None` means `t + 4`.
    pub e_max: Option<u32>,
}

pub fn is_primitively_universal_local(l: &FormMatrix, p: u64) -> Result<UniversalityReport> {
    is_primitively_universal_local_with(l, p, UniversalityOptions::default())
}

pub fn is_primitively_universal_local_with(
    l: &FormMatrix,
    p: u64,
    opts: UniversalityOptions,
) -> Result<UniversalityReport> {
    check_prime(p)?;
    let js = jordan_decompose(l, p)?;
    let e_max = opts
        .e_max
        .unwrap_or_else(|| (js.top_exp().max(0) + 4) as u32);
    let norm = js.norm_exp();
    if norm < 0 {
        // Values outside Z_p: the lattice is not integral here.
        return Ok(UniversalityReport {
            prime: p,
            universal: false,
            universal_check: None,
            primitively_universal: Verdict::No { class: None },
            trace: vec![Rule::NormNotUnit { norm_exp: norm }],
            spectrum: SpectrumSummary {
                e_max,
                found: vec![],
                missing: vec![],
            },
        });
    }
    let check = is_universal_local(l, p)?;
    let (verdict, trace) = decide(l, p, &js, &check, e_max)?;
    debug_assert!(!verdict.is_yes() || check.universal);
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for c in SquareClass::up_to(p, e_max) {
        if decide_class(l, &c, true)?.is_represented() {
            found.push(c);
        } else {
            missing.push(c);
        }
    }
    Ok(UniversalityReport {
        prime: p,
        universal: check.universal,
        universal_check: Some(check),
        primitively_universal: verdict,
        trace,
        spectrum: SpectrumSummary {
            e_max,
            found,
            missing,
        },
    })
}

fn unit_class(p: u64, order: u32) -> SquareClass {
    SquareClass {
        prime: p,
        order,
        unit_rep: 1,
    }
}

fn decide(
    l: &FormMatrix,
    p: u64,
    js: &JordanSplitting,
    check: &UniversalCheck,
    e_max: u32,
) -> Result<(Verdict, Vec<Rule>)> {
    let norm = js.norm_exp();
    if norm != 0 {
        return Ok((
            Verdict::No {
                class: Some(unit_class(p, 0)),
            },
            vec![Rule::NormNotUnit { norm_exp: norm }],
        ));
    }
    if !is_isotropic(l, p)? {
        let (class, empirical_min) = match residue_isotropy(l, p) {
            Ok(ResidueIsotropy::Anisotropic { empirical_min }) => {
                (Some(unit_class(p, empirical_min)), Some(empirical_min))
            }
            _ => (None, None),
        };
        return Ok((
            Verdict::No { class },
            vec![Rule::Anisotropic { empirical_min }],
        ));
    }
    let n = l.rank();
    if n >= 5 {
        let rule = Rule::HighRank {
            universal: check.universal,
        };
        return Ok(if check.universal {
            (Verdict::Yes, vec![rule])
        } else {
            (
                Verdict::No {
                    class: check.missing().first().copied(),
                },
                vec![rule],
            )
        });
    }
    if js.is_modular() {
        if let Some(out) = decide_modular(p, js, check)? {
            return Ok(out);
        }
    }
    decide_general(l, p, js, e_max)
}

fn decide_modular(
    p: u64,
    js: &JordanSplitting,
    check: &UniversalCheck,
) -> Result<Option<(Verdict, Vec<Rule>)>> {
    let c = &js.components[0];
    if p != 2 {
        return Ok(Some((Verdict::Yes, vec![Rule::OddUnimodular])));
    }
    let units = match &c.content {
        ComponentContent::Improper { .. } => {
            return Ok(Some((Verdict::Yes, vec![Rule::ImproperHalfModular])));
        }
        ComponentContent::Proper { units } => units,
    };
    let opposite_pair = units
        .iter()
        .enumerate()
        .any(|(i, a)| units[i + 1..].iter().any(|b| (a + b) % 4 == 0));
    Ok(match units.len() {
        2 => Some((
            Verdict::No {
                class: check.missing().first().copied(),
            },
            vec![Rule::ProperUnimodularPlane],
        )),
        3 => {
            let rule = Rule::ProperUnimodularTernary { opposite_pair };
            let verdict = if opposite_pair {
                Verdict::Yes
            } else {
                Verdict::No {
                    class: check.missing().first().copied(),
                }
            };
            Some((verdict, vec![rule]))
        }
        4 => {
            if opposite_pair {
                return Ok(Some((
                    Verdict::Yes,
                    vec![Rule::ProperUnimodularQuaternary {
                        opposite_pair,
                        missing: None,
                    }],
                )));
            }
            // All units agree mod 4, so their sum lies in 4Z_2.
            let sum: u64 = units.iter().sum();
            let (missing, class) = if sum % 8 == 4 {
                (8, unit_class(2, 3))
            } else {
                (4, unit_class(2, 2))
            };
            Some((
                Verdict::No { class: Some(class) },
                vec![Rule::ProperUnimodularQuaternary {
                    opposite_pair,
                    missing: Some(missing),
                }],
            ))
        }
        _ => None,
    })
}

fn decide_general(
    l: &FormMatrix,
    p: u64,
    js: &JordanSplitting,
    e_max: u32,
) -> Result<(Verdict, Vec<Rule>)> {
    let pieces: Vec<FormMatrix> = js.pieces().into_iter().map(|(_, f)| f).collect();
    let k = pieces.len();
    if k >= 2 {
        for mask in 1..(1u32 << k) - 1 {
            let chosen: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let sum = orthogonal_sum(chosen.iter().map(|&i| &pieces[i]));
            if is_universal_local(&sum, p)?.universal {
                return Ok((
                    Verdict::Yes,
                    vec![Rule::UniversalSummand { pieces: chosen }],
                ));
            }
        }
        for (i, piece) in pieces.iter().enumerate() {
            let is_unit = piece.rank() == 1
                && crate::padic::int_valuation(&piece.g2()[0][0], p) == Some(u32::from(p == 2));
            if !is_unit {
                continue;
            }
            let rest = orthogonal_sum(
                pieces
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, f)| f),
            );
            if represents_all_units(&rest, p)? {
                return Ok((Verdict::Yes, vec![Rule::UnitSplit { piece: i }]));
            }
        }
    }
    for c in SquareClass::up_to(p, e_max) {
        if !decide_class(l, &c, true)?.is_represented() {
            return Ok((
                Verdict::No { class: Some(c) },
                vec![Rule::ClassMissing { class: c }],
            ));
        }
    }
    Ok((
        Verdict::Bounded { e_max },
        vec![Rule::NoObstructionUpTo { e_max }],
    ))
}

fn orthogonal_sum<'a>(mut it: impl Iterator<Item = &'a FormMatrix>) -> FormMatrix {
    let first = it.next().expect("nonempty").clone();
    it.fold(first, |acc, f| acc.orthogonal_sum(f))
}
