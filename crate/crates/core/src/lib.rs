//! Analysis of resonator scattering data distorted by Fano interference.
//!
//! A small leakage path `b e^{i phi}` around the resonator tilts and rescales
//! the resonance circle. Circle fits of such data cannot tell the leakage
//! phase apart, so this crate reports `Q_i` as a range for an assumed bound on
//! `b`, and calibrates `b` directly when the leakage phase is swept.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! at the crate root fix the scalar to `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circle;
pub mod error;
pub mod fit;
pub mod model;
pub mod scalar;
pub mod synth;
pub mod trace;
pub mod trajectory;
pub mod uncertainty;

pub use num_complex::Complex;

pub use circle::{fit_circle, fit_circle_weighted, Circle, CircleFit};
pub use error::{Error, Result, Stage};
pub use fit::{
    fit_phase_response, fit_pipeline, normalize_offresonant, remove_cable_delay, CircleFitResult, DelayRemoval,
    FitConfig, FitWarning, OffResonantEstimator, PhaseFit,
};
pub use model::{
    apply_fano, background_period, background_phase, background_phase_in, coupling_to_radius, leakage_db_to_linear,
    leakage_linear_to_db, normalize_fano, qualities_from_radius, radius_to_coupling, reflection_response, response,
    transmission_response, CableMedium, FanoBackground, MeasurementMode, Quality, ResonatorParams,
};
pub use scalar::Scalar;
pub use synth::{
    synth_background_pattern, synth_lineshape_gallery, synth_trace, synth_trajectory, Curve, Lineshape, SynthSpec,
    TrajectoryPhases,
};
pub use trace::Trace;
pub use trajectory::{
    calibrate_leakage, calibrate_trajectory, fit_center_trajectory, trajectory_report, CalibrationResult,
    CenterTrajectory, LeakageCalibration, TrajectoryFit, TrajectoryReport, TrajectoryWarning,
};
pub use uncertainty::{
    center_circle, invert_center, min_leakage, qi_range, qi_range_from, radii_range, uncertainty_band, BandRow,
    CenterCircle, LeakageBound, QiRange, Triple,
};

pub type Complex64 = Complex<f64>;
pub type Quality64 = Quality<f64>;
pub type ResonatorParams64 = ResonatorParams<f64>;
pub type FanoBackground64 = FanoBackground<f64>;
pub type Trace64 = Trace<f64>;
pub type FitConfig64 = FitConfig<f64>;
pub type CircleFitResult64 = CircleFitResult<f64>;
pub type QiRange64 = QiRange<f64>;
pub type CenterCircle64 = CenterCircle<f64>;
pub type BandRow64 = BandRow<f64>;
pub type SynthSpec64 = SynthSpec<f64>;
pub type CenterTrajectory64 = CenterTrajectory<f64>;
pub type TrajectoryFit64 = TrajectoryFit<f64>;
pub type CalibrationResult64 = CalibrationResult<f64>;

pub type Trace32 = Trace<f32>;
pub type ResonatorParams32 = ResonatorParams<f32>;
pub type CircleFitResult32 = CircleFitResult<f32>;
