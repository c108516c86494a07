//! The dyadic basis of the snowflaked free p-space over the unit cube.
//!
//! `V_k = [0,1]^d ∩ 2^{-k} Z^d`. For `v ∈ V_k \ V_{k-1}` the basis vector is
//! `ι(e_v) = 2^{kα}(δ(v) − Σ_{u ∈ V_{k-1}} Λ(u, v) δ(u))`, a point evaluation
//! minus its multilinear interpolation from the coarser grid. The modules
//! below expand point evaluations and molecules in these vectors with
//! explicit coefficient costs.

mod analyze;
mod coeff;
mod element;
mod hat;
mod molecule;
mod norming;
mod path;
mod step;

pub use analyze::{analyze, analyze_free};
pub use coeff::{AlphaPoly, Coeff, Dyadic};
pub use element::{
    basis_element, basis_norm_check, snowflake_host, BasisCombination, BasisIndex, BasisNormCheck, DyadicElement,
    NormMethod,
};
pub use hat::{hat_bound, hat_decompose, hat_identity, Hat, HatTerm};
pub use molecule::{difference_decompose, molecule_bound, molecule_decompose};
pub use norming::{verify_norming, NormingReport, MOLECULE_BUDGET};
pub use path::{line_path, path_bound, path_cost, steps_are_mesh_adjacent};
pub use step::{step_cost_bound, step_decompose, step_target};
