mod gap;
mod represent;
mod residue;
mod universality;

pub use gap::{anisotropic_gap, residue_isotropy, AnisotropicGap, ResidueIsotropy};
pub use represent::{
    decide_representation, is_universal_local, spectrum, verify_witness, Decision, RepVerdict,
    UniversalCheck, Witness,
};
pub use universality::{
    is_primitively_universal_local, is_primitively_universal_local_with, Rule, SpectrumSummary,
    UniversalityOptions, UniversalityReport, Verdict,
};
