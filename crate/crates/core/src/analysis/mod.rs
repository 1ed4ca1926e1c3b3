//! Analysis of probability tables: raw tomographic estimates, the permutation,
//! cyclic-spectrum and repetition tests, unitarity measures, accessible
//! volume, the CP-divisibility witness and bootstrap significance.

pub mod bootstrap;
pub mod calibration;
pub mod detectors;
pub mod report;
pub mod unitarity;

pub use bootstrap::{bootstrap_ci, Interval};
pub use calibration::{ideal_calibration, raw_estimate, CalibrationMatrices, RawEstimate};
pub use detectors::{
    accessible_volume, cp_witness, cyclic_fidelity_test, det_permutation_test, repetition_test,
    volume_test, AnalysisOptions, SeriesPoint,
};
pub use report::{MemberStat, Summary, TestKind, TestReport, Threshold, Verdict};
pub use unitarity::{unitarity_tilde, unitarity_u};

/// Upper bound on condition numbers of matrices that get inverted.
pub const MAX_CONDITION: f64 = 1e6;
