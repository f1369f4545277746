//! Thermodynamic-limit dynamics of the magnetization and its chaos diagnostics.

pub mod flow;
pub mod hausdorff;
pub mod lyapunov;
pub mod scan;

pub use flow::{
    mf_kick, mf_rhs, mf_step_period, mf_stroboscopic_orbit, MeanFieldFlow, OrbitSeries,
};
pub use hausdorff::{
    box_counting_dimension, count_boxes, default_epsilons, hausdorff_dimension, section_points,
    BoxCount, HausdorffConfig, HausdorffEstimate,
};
pub use lyapunov::{
    companion_of_pole, linspace, lyapunov_largest, lyapunov_map, LyapunovNode, LyapunovResult,
    DEFAULT_D0, DEFAULT_LYAPUNOV_PERIODS,
};
pub use scan::{
    bifurcation_scan, distinct_count, orbit_from_phase, poincare_orbits, random_phase_point,
    scan_rng, BifurcationColumn, Component,
};
