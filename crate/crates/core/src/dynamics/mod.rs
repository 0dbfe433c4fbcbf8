//! Potentials, momenta, Lagrangians, discrete actions and their
//! minimization over piecewise-linear paths.

mod action;
mod interaction;
mod minimize;
mod path;
mod potential;

pub use action::{action, action_gradient, FreeLagrangian, InteractionLagrangian, Lagrangian};
pub(crate) use interaction::combine_gie_values;
pub use interaction::{
    combine_gie, effective_momentum, effective_momentum_parts, interaction_factor_f, lagrangian_free,
    lagrangian_interaction, momentum, InteractionParams,
};
pub use minimize::{initial_path, minimize_action, minimize_action_from, MinimizeOptions, MinimizeOutcome, NodeFreedom};
pub use path::Path4;
pub use potential::{
    maxwell_residuals, potential_field, potential_single, CurrentDensity, MaxwellResiduals, PotentialSource,
    PotentialSpec,
};
