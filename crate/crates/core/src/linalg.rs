//! Dense real linear algebra used throughout: matrix exponential, log-domain
//! determinants, trace powers and linear solves.
//!
//! All matrices here are small (at most 16x16), so everything works on
//! `nalgebra::DMatrix<f64>` without blocking or sparsity tricks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;

/// Degree-13 Padé numerator coefficients for `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant meets double precision.
const THETA_13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a [13/13] Padé approximant.
///
/// The argument is scaled by `2^-s` so that its 1-norm is below `THETA_13`,
/// the rational approximant is evaluated, and the result is squared `s` times.
pub fn expm(a: &RealMatrix) -> RealMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-squarings);

    let ident = RealMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Maximum absolute column sum.
pub fn one_norm(a: &RealMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `log |det M|` from LU with partial pivoting.
///
/// Sums the logs of the pivot magnitudes so that neither underflow nor
/// overflow of the determinant itself can occur. An exactly singular matrix
/// yields `f64::NEG_INFINITY`.
pub fn log_abs_det(m: &RealMatrix) -> f64 {
    assert!(m.is_square(), "log_abs_det needs a square matrix");
    let n = m.nrows();
    let mut lu = m.clone();
    let mut acc = 0.0;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, lu[(r, col)]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty pivot range");
        if pivot == 0.0 {
            return f64::NEG_INFINITY;
        }
        if pivot_row != col {
            lu.swap_rows(pivot_row, col);
        }
        acc += pivot.abs().ln();
        for r in (col + 1)..n {
            let factor = lu[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in (col + 1)..n {
                let v = lu[(col, c)];
                lu[(r, c)] -= factor * v;
            }
        }
    }
    acc
}

/// `Tr(M^r)` for `r = 1..=r_max`, by repeated multiplication.
pub fn trace_powers(m: &RealMatrix, r_max: usize) -> Vec<f64> {
    assert!(m.is_square(), "trace_powers needs a square matrix");
    let mut out = Vec::with_capacity(r_max);
    let mut power = m.clone();
    for r in 1..=r_max {
        if r > 1 {
            power = &power * m;
        }
        out.push(power.trace());
    }
    out
}

/// 2-norm condition number from singular values. Returns infinity when the
/// smallest singular value is zero.
pub fn condition_number(m: &RealMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `A X = B`.
pub fn solve(a: &RealMatrix, b: &RealMatrix) -> Result<RealMatrix> {
    a.clone().lu().solve(b).ok_or(Error::SingularMatrix)
}

/// Computes `X A^{-1}` as the solution of `X A = B` without forming `A^{-1}`.
pub fn solve_right(b: &RealMatrix, a: &RealMatrix) -> Result<RealMatrix> {
    Ok(solve(&a.transpose(), &b.transpose())?.transpose())
}
