//! A sufficient criterion for almost primitive universality.
//!
//! A positive definite classically integral form of rank `n >= 4` is almost
//! primitively universal when it represents an odd integer, no prime power
//! `p^(n-2)` divides its determinant, and either `n >= 5` or the determinant
//! is even.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::scan::enumerate_values;
use super::verdict::{
    almost_universality_verdict, check_positive_definite, gram_det_integer, relevant_primes,
};
use crate::error::{Error, Result};
use crate::lattice::{norm_exp, FormMatrix};

/// Default bound for the odd-value search.
pub const ODD_SEARCH_BOUND: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    RankAtLeastFour,
    RepresentsOdd,
    NoLargePrimePower,
    RankOrParity,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::RankAtLeastFour => "rank n >= 4",
            Hypothesis::RepresentsOdd => "represents an odd integer",
            Hypothesis::NoLargePrimePower => "p^(n-2) does not divide det for any prime p",
            Hypothesis::RankOrParity => "n >= 5, or n = 4 with even det",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Holds {
        detail: String,
    },
    Fails {
        detail: String,
    },
    /// The existential search found nothing up to its bound.
    Unverified {
        detail: String,
    },
}

impl Status {
    pub fn holds(&self) -> bool {
        matches!(self, Status::Holds { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CriterionVerdict {
    /// All hypotheses hold; `local_cross_check` is true when every local
    /// report is also YES.
    AlmostPrimitivelyUniversal {
        local_cross_check: bool,
    },
    NotApplicable {
        failed: Vec<Hypothesis>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub det: String,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Whether `q` takes odd values 2-adically, a necessary condition for an odd value.
    pub norm_is_unit_at_two: bool,
    pub verdict: CriterionVerdict,
}

impl CriterionReport {
    pub fn render(&self) -> String {
        let mut out = format!("det = {}\n", self.det);
        for h in &self.hypotheses {
            let (mark, detail) = match &h.status {
                Status::Holds { detail } => ("holds", detail),
                Status::Fails { detail } => ("FAILS", detail),
                Status::Unverified { detail } => ("unverified", detail),
            };
            out.push_str(&format!("  {}: {} ({})\n", h.hypothesis, mark, detail));
        }
        match &self.verdict {
            CriterionVerdict::AlmostPrimitivelyUniversal { local_cross_check } => {
                out.push_str(&format!(
                "verdict: almost primitively universal (local reports agree: {local_cross_check})\n"
            ))
            }
            CriterionVerdict::NotApplicable { failed } => {
                let names: Vec<String> = failed.iter().map(|h| h.to_string()).collect();
                out.push_str(&format!(
                    "verdict: not applicable; failed: {}\n",
                    names.join("; ")
                ));
            }
        }
        out
    }
}

pub fn criterion_check(l: &FormMatrix) -> Result<CriterionReport> {
    criterion_check_with(l, ODD_SEARCH_BOUND)
}

pub fn criterion_check_with(l: &FormMatrix, odd_bound: u64) -> Result<CriterionReport> {
    if !l.is_classically_integral() {
        return Err(Error::NotClassicallyIntegral);
    }
    check_positive_definite(l)?;
    let n = l.rank();
    let det = gram_det_integer(l).expect("classically integral");
    let mut hyps = Vec::new();

    hyps.push(HypothesisCheck {
        hypothesis: Hypothesis::RankAtLeastFour,
        status: if n >= 4 {
            Status::Holds {
                detail: format!("n = {n}"),
            }
        } else {
            Status::Fails {
                detail: format!("n = {n}"),
            }
        },
    });

    let scan = enumerate_values(l, odd_bound)?;
    let odd = scan.represented.iter().copied().find(|v| v % 2 == 1);
    hyps.push(HypothesisCheck {
        hypothesis: Hypothesis::RepresentsOdd,
        status: match odd {
            Some(v) => Status::Holds {
                detail: format!("{v} is represented"),
            },
            None => Status::Unverified {
                detail: format!("no odd value up to {odd_bound}"),
            },
        },
    });

    let mut offenders = Vec::new();
    for p in relevant_primes(l)? {
        let pe = BigInt::from(p).pow((n as u32).saturating_sub(2));
        if n >= 2 && det.is_multiple_of(&pe) {
            offenders.push(format!("{p}^{} divides {det}", n - 2));
        }
    }
    hyps.push(HypothesisCheck {
        hypothesis: Hypothesis::NoLargePrimePower,
        status: if offenders.is_empty() {
            Status::Holds {
                detail: format!("det = {det}"),
            }
        } else {
            Status::Fails {
                detail: offenders.join(", "),
            }
        },
    });

    let even = det.is_even();
    hyps.push(HypothesisCheck {
        hypothesis: Hypothesis::RankOrParity,
        status: if n >= 5 || (n == 4 && even) {
            Status::Holds {
                detail: format!("n = {n}, det = {det}"),
            }
        } else {
            Status::Fails {
                detail: format!("n = {n}, det = {det} {}", if even { "even" } else { "odd" }),
            }
        },
    });

    let failed: Vec<Hypothesis> = hyps
        .iter()
        .filter(|h| !h.status.holds())
        .map(|h| h.hypothesis)
        .collect();
    let verdict = if failed.is_empty() {
        let v = almost_universality_verdict(l)?;
        CriterionVerdict::AlmostPrimitivelyUniversal {
            local_cross_check: v.per_prime.iter().all(|r| r.primitively_universal.is_yes()),
        }
    } else {
        CriterionVerdict::NotApplicable { failed }
    };
    Ok(CriterionReport {
        det: det.to_string(),
        hypotheses: hyps,
        norm_is_unit_at_two: norm_exp(l, 2) == 0,
        verdict,
    })
}
