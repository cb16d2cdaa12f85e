//! Second cohomology of `𝔅(p)` with coefficients in the trivial module or a
//! free rank-one module.

mod cocycle;
mod module;
mod solver;
mod trivialize;

pub use cocycle::{
    coboundary, coboundary_value, cocycle_residual, named_cocycle, residual_grid, triples_pairwise,
    triples_total, CochainMap, NamedCocycle, TwoCocycle,
};
pub use module::{check_module_axioms, module_action, ModuleKind, ModuleParam, RankOneModule};
pub use solver::{
    cocycle_solver, coboundary_space, named_independence, nontriviality, CocycleBox, NamedIndependence,
    Nontriviality, QuotientClass, SolverReport,
};
pub use trivialize::trivialize;
