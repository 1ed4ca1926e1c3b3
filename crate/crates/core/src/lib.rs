//! Detecting context-dependent quantum gates from invariants of matrix
//! products.
//!
//! The crate has two halves. The simulator ([`ptm`], [`noise`],
//! [`experiment`]) builds Pauli transfer matrices for a measured qubit A
//! coupled to a hidden, persistent qubit B and turns gate sequences into
//! probability tables. The analysis layer ([`analysis`]) runs tests that are
//! insensitive to state-preparation and measurement errors:
//!
//! * `det P(S)` is invariant under any reordering of the gates in `S`;
//! * the spectrum of `P(S) P_0^{-1}` is invariant under cyclic rotations;
//! * `log|det|` of a repeated gate is affine in the repetition count.
//!
//! ```
//! use ctxdep::experiment::{evaluate_family, permutation_family, Sequence, Shots};
//! use ctxdep::noise::{GateSpec, NoiseParams, TwoQubitModel};
//! use ctxdep::analysis::{det_permutation_test, AnalysisOptions, Verdict};
//!
//! let model = TwoQubitModel::new(NoiseParams::reference().with_phi(1e-3)).unwrap();
//! let family = permutation_family(GateSpec::idle(), GateSpec::x(std::f64::consts::PI), 20);
//! let tables = evaluate_family(&family, &Sequence::empty(), &model, Shots::Exact, 0, "doc").unwrap();
//! let report = det_permutation_test(&tables, None, &AnalysisOptions::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::ContextDependent);
//! ```

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod noise;
pub mod ptm;
pub mod rng;

pub use error::{Error, Result};
