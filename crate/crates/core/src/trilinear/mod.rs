//! Invariant trilinear forms: the generic family `𝒦_𝛂` and the singular
//! forms `𝒯_k` on the planes `α₃ = −ρ−2k`.

pub mod closed_form;
pub mod kform;
pub mod lemmas;
pub mod params;
pub mod poles;
pub mod regres;
pub mod tform;

pub use closed_form::{k111_exact_n3, k111_gamma_ratio, k111_residue_expression};
pub use kform::{k_form, k_form_with, k_invariance_defect, DiagonalRule, KFormOptions, KMethod};
pub use lemmas::{astuce_lambda1, bernstein_kernel_defect, derker_split_defect, lemma_astuce_defect};
pub use params::{alpha_from_lambda, lambda_from_alpha, ParameterTriple};
pub use poles::{expected_poles, pole_scan, PoleFamily, PoleReport, ScanOptions, ScanTarget};
pub use regres::{closed_form_ratio_check, regres_defect, Alpha3Continuation, RegresOptions, RegresReport};
pub use tform::{t_form, t_form_fn, t_invariance_defect, TFormOptions, TFormValue};
