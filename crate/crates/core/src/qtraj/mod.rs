//! Finite-size dynamics: Floquet propagators, quantum-jump trajectories,
//! ensembles and a dense Lindblad reference integrator.

pub mod ensemble;
pub mod lindblad;
pub mod propagators;
pub mod trajectory;

pub use ensemble::{
    average, random_coherent_state, run_ensemble, run_ensemble_on, run_ensemble_with,
    EnsembleConfig, EnsembleResult, EnsembleSeries, InitialState, ProbeSeries,
};
pub use lindblad::{lindblad_dense_oracle, mz_of_density, pure_density, purity, ORACLE_MAX_SPINS};
pub use propagators::{
    build_propagators, build_propagators_with_limit, evolution_operator, free_hamiltonian,
    kick_diagonal, non_hermitian_hamiltonian, FloquetPropagators, DEFAULT_MAX_SPINS,
};
pub use trajectory::{
    evolve_state, qj_step, run_trajectory, run_trajectory_with, JumpScheme, ProbeEvaluator,
    ProbeKind, Probes, TrajectoryRecord,
};
