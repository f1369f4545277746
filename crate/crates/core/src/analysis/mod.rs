//! Steady-state extraction, scaling fits and magnetization statistics.

pub mod histogram;
pub mod scaling;
pub mod steady;

pub use histogram::{find_peaks, global_max_position, histogram_mz, Histogram, Peak};
pub use scaling::{
    delta_magic, fit, fit_log_linear, fit_power_law, linear_fit, DeltaMagic, FitModel, LinearFit,
    ScalingFit,
};
pub use steady::{mean_stderr, steady_average, variance_mz, MeanStderr};
