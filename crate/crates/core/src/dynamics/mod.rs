//! Sign variation along linear and nonlinear discrete-time systems.

mod example3;
mod linear;
mod nonlinear;
mod quadrature;
mod trajectory;

#[cfg(test)]
mod tests;

pub use example3::{example3_system, Coefficient, Example3, Example3Spec, MAX_PERIOD};
pub use linear::{
    monitor_lemma1, monitor_thm5, monitor_thm6, simulate_linear, LinearRun, LinearTimeVaryingSystem,
    OrderingOutcome, StepHypotheses,
};
pub use nonlinear::{
    averaged_jacobian, check_assumption1, check_cor4, check_entrainment, jacobian_error,
    monitor_difference_variation, simulate_nonlinear, simulate_nonlinear_pair, BoxDomain, Entrainment,
    Equilibrium, LinearMap, NonlinearSystem, BLOWUP_LIMIT, HYPOTHESIS_SAMPLES,
};
pub use quadrature::{GaussLegendre, DEFAULT_QUADRATURE_ORDER};
pub use trajectory::{
    detect_periodicity, Periodicity, StepAnnotation, TrajectoryRecord, ANNOTATION_ZERO_TOL, RESOLUTION_TOL,
};
