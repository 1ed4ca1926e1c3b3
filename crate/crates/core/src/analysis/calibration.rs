//! Calibration matrices `B`, `C` and the raw estimate `(B^-1)^T P C^-1`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use super::MAX_CONDITION;
use crate::error::{Error, Result};
use crate::experiment::ProbabilityTable;
use crate::linalg::{self, condition_number, RealMatrix};
use crate::noise::SPAM_GATES;
use crate::ptm::{qubit_projector, ComplexMatrix, EffectVector, OperatorBasis, StateVector};

/// Effect matrix `B_nk = Tr(P_n Π_k)/sqrt(d)` and preparation matrix
/// `C_mi = Tr(P_m ρ_i)/sqrt(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationMatrices {
    b: RealMatrix,
    c: RealMatrix,
    cond_b: f64,
    cond_c: f64,
}

impl CalibrationMatrices {
    pub fn new(b: RealMatrix, c: RealMatrix) -> Result<Self> {
        for m in [&b, &c] {
            if !m.is_square() {
                return Err(Error::IncompleteCalibration {
                    expected: m.nrows(),
                    got: m.ncols(),
                });
            }
        }
        let cond_b = condition_number(&b);
        let cond_c = condition_number(&c);
        for cond in [cond_b, cond_c] {
            if !(cond < MAX_CONDITION) {
                return Err(Error::IllConditioned(cond));
            }
        }
        Ok(Self {
            b,
            c,
            cond_b,
            cond_c,
        })
    }

    /// Builds `B` and `C` from the nominal effects and states.
    pub fn from_operators(
        effects: &[ComplexMatrix],
        states: &[ComplexMatrix],
        basis: &OperatorBasis,
    ) -> Result<Self> {
        let n = basis.len();
        for got in [effects.len(), states.len()] {
            if got != n {
                return Err(Error::IncompleteCalibration { expected: n, got });
            }
        }
        let b_cols: Vec<DVector<f64>> = effects
            .iter()
            .map(|e| EffectVector::from_operator(e, basis).coords().clone())
            .collect();
        let c_cols: Vec<DVector<f64>> = states
            .iter()
            .map(|s| StateVector::from_density(s, basis).coords().clone())
            .collect();
        Self::new(DMatrix::from_columns(&b_cols), DMatrix::from_columns(&c_cols))
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn condition_numbers(&self) -> (f64, f64) {
        (self.cond_b, self.cond_c)
    }

    /// `log|det B| + log|det C|`, the offset between `log|det P|` and
    /// `log|det S_raw|`.
    pub fn log_det_offset(&self) -> f64 {
        linalg::log_abs_det(&self.b) + linalg::log_abs_det(&self.c)
    }
}

/// Snaps entries to the exact values `0, ±1/sqrt(2)` they take for the
/// nominal single-qubit gate set.
fn snap(m: &mut RealMatrix) {
    for x in m.iter_mut() {
        if x.abs() < 1e-12 {
            *x = 0.0;
        } else if (x.abs() - FRAC_1_SQRT_2).abs() < 1e-12 {
            *x = FRAC_1_SQRT_2.copysign(*x);
        }
    }
}

/// Nominal calibration for qubit A: states `G|0><0|G^†` and effects
/// `G^†|1><1|G` over `{I, X_π, Y_-π/2, X_-π/2}`.
pub fn ideal_calibration() -> CalibrationMatrices {
    let basis = OperatorBasis::pauli(1);
    let zero = qubit_projector(0);
    let one = qubit_projector(1);
    let states: Vec<ComplexMatrix> = SPAM_GATES
        .iter()
        .map(|g| {
            let u = g.unitary();
            &u * &zero * u.adjoint()
        })
        .collect();
    let effects: Vec<ComplexMatrix> = SPAM_GATES
        .iter()
        .map(|g| {
            let u = g.unitary();
            u.adjoint() * &one * &u
        })
        .collect();
    let mut cal = CalibrationMatrices::from_operators(&effects, &states, &basis)
        .expect("nominal gate set is informationally complete");
    snap(&mut cal.b);
    snap(&mut cal.c);
    cal
}

/// Raw process estimate of one table.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEstimate {
    pub matrix: RealMatrix,
    pub label: String,
}

/// `(B^-1)^T P C^-1`, computed with two linear solves.
pub fn raw_estimate(table: &ProbabilityTable, cal: &CalibrationMatrices) -> Result<RawEstimate> {
    let worst = cal.cond_b.max(cal.cond_c);
    if !(worst < MAX_CONDITION) {
        return Err(Error::IllConditioned(worst));
    }
    let left = linalg::solve(&cal.b.transpose(), &table.entries)?;
    let matrix = linalg::solve_right(&left, &cal.c)?;
    Ok(RawEstimate {
        matrix,
        label: table.label.clone(),
    })
}
