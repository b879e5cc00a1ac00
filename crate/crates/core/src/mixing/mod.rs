//! Mixing witnesses, classifiers and verifiers for torus endomorphisms.

pub mod classify;
pub mod criterion;
pub mod empirical;
pub mod roots;

pub use classify::{classify_map, classify_perm_power, detect_diagonal_degenerate, orbit_gcds_by_index, MixingVerdict};
pub use criterion::{
    circle_root_samples, criterion_check, orbit_root_samples, ConditionReport, ConvergenceRule, CriterionOptions,
    CriterionReport, CriterionSystem, SampleTrace, TorusCriterion, TorusSection, TracePoint, TraceStatus,
};
pub use empirical::{
    analytic_cover_n, arc_grid, empirical_mixing, grid_cover_n, grid_points, has_preimage_in, Hit, MixingReport,
    WitnessMethod,
};
pub use roots::{
    density_level, forward_collapse_check, psi_circle, psi_perm_power, root_family_points, CollapseCheck, PsiCircle,
    PsiPermPower, RootFamily,
};
