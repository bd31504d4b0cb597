use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scan::{enumerate_values, ScanReport};
use super::verdict::{almost_universality_verdict, GlobalVerdict, ProgressionWitness, TriState};
use crate::error::Result;
use crate::lattice::FormMatrix;
use crate::local::{Rule, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSummary {
    pub universal: bool,
    pub primitively_universal: Verdict,
    pub trace: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub almost_universal: TriState,
    pub almost_primitively_universal: TriState,
    pub notes: Vec<String>,
}

/// The combined scan and verdict report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub form: FormMatrix,
    pub bound: u64,
    pub represented_count: usize,
    pub excluded: Vec<u64>,
    pub primitive_excluded: Vec<u64>,
    /// Keyed by the prime in decimal.
    pub per_prime: BTreeMap<String, PrimeSummary>,
    pub verdicts: Option<Verdicts>,
    pub witnesses: Vec<ProgressionWitness>,
}

impl GlobalReport {
    /// The verdict part is omitted for ranks below 4.
    pub fn build(l: &FormMatrix, bound: u64) -> Result<Self> {
        let scan = enumerate_values(l, bound)?;
        let verdict = if l.rank() >= 4 {
            Some(almost_universality_verdict(l)?)
        } else {
            None
        };
        Ok(Self::assemble(l, &scan, verdict.as_ref()))
    }

    pub fn assemble(l: &FormMatrix, scan: &ScanReport, verdict: Option<&GlobalVerdict>) -> Self {
        let mut per_prime = BTreeMap::new();
        let mut witnesses = Vec::new();
        let mut verdicts = None;
        if let Some(v) = verdict {
            for r in &v.per_prime {
                per_prime.insert(
                    r.prime.to_string(),
                    PrimeSummary {
                        universal: r.universal,
                        primitively_universal: r.primitively_universal,
                        trace: r.trace.clone(),
                    },
                );
            }
            witnesses = v.progression_witnesses.clone();
            verdicts = Some(Verdicts {
                almost_universal: v.almost_universal,
                almost_primitively_universal: v.almost_primitively_universal,
                notes: v.notes.clone(),
            });
        }
        GlobalReport {
            form: l.clone(),
            bound: scan.bound,
            represented_count: scan.represented.len(),
            excluded: scan.excluded.clone(),
            primitive_excluded: scan.primitive_excluded.clone(),
            per_prime,
            verdicts,
            witnesses,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn render(&self) -> String {
        let mut out = format!("form {}\n", self.form);
        out.push_str(&format!(
            "scan to {}: {} represented\n",
            self.bound, self.represented_count
        ));
        out.push_str(&format!("excluded: {}\n", list(&self.excluded, 40)));
        out.push_str(&format!(
            "primitively excluded: {}\n",
            list(&self.primitive_excluded, 40)
        ));
        for (p, s) in &self.per_prime {
            out.push_str(&format!(
                "p = {p}: universal {}, primitively universal {}\n",
                if s.universal { "yes" } else { "no" },
                s.primitively_universal
            ));
            for r in &s.trace {
                out.push_str(&format!("  - {r}\n"));
            }
        }
        if let Some(v) = &self.verdicts {
            out.push_str(&format!("almost universal: {}\n", v.almost_universal));
            out.push_str(&format!(
                "almost primitively universal: {}\n",
                v.almost_primitively_universal
            ));
            for n in &v.notes {
                out.push_str(&format!("note: {n}\n"));
            }
        }
        for w in &self.witnesses {
            out.push_str(&format!("missed progression at p = {}: {w}\n", w.prime));
        }
        out
    }
}

fn list(v: &[u64], limit: usize) -> String {
    let shown: Vec<String> = v.iter().take(limit).map(|x| x.to_string()).collect();
    if v.len() > limit {
        format!("{{{}, ... ({} total)}}", shown.join(", "), v.len())
    } else {
        format!("{{{}}}", shown.join(", "))
    }
}
