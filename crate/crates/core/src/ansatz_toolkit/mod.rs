//! Explicit ansatz machinery: cutoff profiles and their moment `Γ_χ`, the
//! compactly supported radial potential with its sign audit, the constraint
//! solver, the gluing positivity check, the local `i∂∂̄` decomposition
//! relations, and σ-averaging.

mod constraint;
mod cutoff;
mod gluing;
mod iddbar;
mod radial;
mod sigma;

pub use constraint::{
    assembled_min_eigenvalue, constraint_solve, constraint_t0, ConstraintParams, ConstraintSolution,
};
pub use cutoff::{cutoff_gamma, CutoffKind, CutoffProfile};
pub use gluing::{glue_ansatz, positivity_check, GluedAnsatz, GluingInput};
pub use iddbar::{
    forward_construct, iddbar_decompose_check, DiskGrid, FiberedForm, Grid2, IddbarReport,
    PotentialSample,
};
pub use radial::{ode_residuals, radial_potential, RadialPotential, RadialSource, SignConvention};
pub use sigma::{sigma_average, EquivariantSamples};
