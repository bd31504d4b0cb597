mod criterion;
mod report;
mod scan;
mod verdict;

pub use criterion::{
    criterion_check, criterion_check_with, CriterionReport, CriterionVerdict, Hypothesis,
    HypothesisCheck, Status, ODD_SEARCH_BOUND,
};
pub use report::{GlobalReport, PrimeSummary, Verdicts};
pub use scan::{enumerate_values, with_threads, ScanReport};
pub use verdict::{
    almost_universality_verdict, failure_classes, progression_witness, relevant_primes,
    GlobalVerdict, ProgressionWitness, TriState,
};
