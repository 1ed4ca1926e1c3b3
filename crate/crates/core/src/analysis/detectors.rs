//! Context-dependence tests on families of probability tables.
//!
//! All three family tests work directly on data:
//! * permutation: `log|det P(S_σ)|` cannot depend on the ordering σ;
//! * cyclic: the spectrum of `P(S_σ) P_0^{-1}` cannot depend on the rotation,
//!   checked through `F^(r) = Tr[(P P_0^{-1})^r] / d^2` for `r = 1..d^2`;
//! * repetition: `L_m = log|det S_raw(m)|` must be affine in `m`.
//!
//! Exact tables are judged against a fixed numerical tolerance. Finite-shot
//! tables are judged against parametric-bootstrap null distributions.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::bootstrap::{family_replicates, quantile, Interval};
use super::calibration::CalibrationMatrices;
use super::report::{MemberStat, Summary, TestKind, TestReport, Threshold, Verdict};
use super::MAX_CONDITION;
use crate::error::{Error, Result};
use crate::experiment::{FamilyKind, FamilyTables, ProbabilityTable, Shots};
use crate::linalg::{self, condition_number, RealMatrix};

/// Numerical tolerance for verdicts on exact tables.
pub const EXACT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub resamples: usize,
    pub seed: u64,
    pub exact_tolerance: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            resamples: 500,
            seed: 0,
            exact_tolerance: EXACT_TOLERANCE,
        }
    }
}

/// One point of a series indexed by `m` (or `k`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub index: u64,
    pub value: f64,
    pub std_err: Option<f64>,
}

fn require_kind(ft: &FamilyTables, expected: FamilyKind) -> Result<()> {
    if ft.kind != expected {
        return Err(Error::WrongFamilyKind {
            expected: expected.name(),
            got: ft.kind.name(),
        });
    }
    if ft.tables.is_empty() {
        return Err(Error::NotEnoughData("family has no members".into()));
    }
    Ok(())
}

fn is_finite_shots(ft: &FamilyTables) -> bool {
    ft.tables
        .iter()
        .chain(std::iter::once(&ft.reference))
        .any(|t| t.shots != Shots::Exact)
}

fn spread(values: &[f64]) -> f64 {
    let finite = values.iter().cloned().filter(|x| x.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    if lo > hi {
        f64::NAN
    } else {
        hi - lo
    }
}

fn sample_std(values: &[f64]) -> f64 {
    let finite: Vec<f64> = values.iter().cloned().filter(|x| x.is_finite()).collect();
    let n = finite.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mean = finite.iter().sum::<f64>() / n;
    (finite.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Null distribution of the spread: under context independence all members
/// share one true value, so each replicate's spread of centred deviations
/// `x_kb - x_k` samples the spread expected from shot noise alone.
fn null_spread_threshold(replicates: &[Vec<f64>], observed: &[f64]) -> Threshold {
    let resamples = replicates.first().map_or(0, Vec::len);
    let spreads: Vec<f64> = (0..resamples)
        .map(|b| {
            let devs: Vec<f64> = replicates
                .iter()
                .zip(observed)
                .filter(|(_, x)| x.is_finite())
                .map(|(rep, x)| rep[b] - x)
                .collect();
            spread(&devs)
        })
        .collect();
    Threshold::BootstrapNull {
        q95: quantile(&spreads, 0.95),
        q99: quantile(&spreads, 0.99),
    }
}

fn percentile_ci(replicates: &[f64]) -> Interval {
    Interval {
        lower: quantile(replicates, 0.025),
        upper: quantile(replicates, 0.975),
    }
}

/// One-sided normal quantile with a Bonferroni correction over `tests`.
fn bonferroni_z(alpha: f64, tests: usize) -> f64 {
    let n = Normal::standard();
    n.inverse_cdf(1.0 - alpha / tests.max(1) as f64)
}

/// Builds per-member stats and the verdict for a spread-type test.
fn spread_report(
    kind: TestKind,
    description: String,
    ft: &FamilyTables,
    observed: Vec<f64>,
    extras: Vec<Vec<f64>>,
    replicates: Option<Vec<Vec<f64>>>,
    opts: &AnalysisOptions,
) -> TestReport {
    let mut warnings = Vec::new();
    let members: Vec<MemberStat> = observed
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if !x.is_finite() {
                warnings.push(format!("member {} ({}) is singular", k + 1, ft.tables[k].label));
            }
            MemberStat {
                index: k as u64 + 1,
                statistic: x,
                ci: replicates.as_ref().map(|r| percentile_ci(&r[k])),
                extra: extras.get(k).cloned().unwrap_or_default(),
                flagged: !x.is_finite(),
            }
        })
        .collect();
    let statistic = spread(&observed);
    let threshold = match &replicates {
        None => Threshold::ExactTolerance {
            tolerance: opts.exact_tolerance,
        },
        Some(r) => null_spread_threshold(r, &observed),
    };
    let verdict = if statistic.is_nan() {
        Verdict::Inconclusive
    } else {
        threshold.verdict(statistic)
    };
    TestReport {
        kind,
        description,
        members,
        summary: Summary {
            spread: Some(statistic),
            ..Default::default()
        },
        statistic,
        threshold,
        verdict,
        warnings,
    }
}

/// `log|det P(S_σ)|` across a permutation family.
///
/// The verdict needs no calibration; when `cal` is given the reported values
/// are shifted to `log|det S_raw|`.
pub fn det_permutation_test(
    ft: &FamilyTables,
    cal: Option<&CalibrationMatrices>,
    opts: &AnalysisOptions,
) -> Result<TestReport> {
    require_kind(ft, FamilyKind::Permutation)?;
    let offset = cal.map_or(0.0, CalibrationMatrices::log_det_offset);
    let stat = |m: &RealMatrix, _: Option<&RealMatrix>| linalg::log_abs_det(m) - offset;
    let observed: Vec<f64> = ft.tables.iter().map(|t| stat(&t.entries, None)).collect();
    let replicates = is_finite_shots(ft)
        .then(|| family_replicates(&ft.tables, None, opts.resamples, opts.seed, stat));
    Ok(spread_report(
        TestKind::PermDet,
        "spread of log|det| across permutations".into(),
        ft,
        observed,
        Vec::new(),
        replicates,
        opts,
    ))
}

/// `Tr[(P P0^{-1})^r] / d^2` for `r = 1..=d^2`.
pub fn cyclic_fidelities(table: &RealMatrix, reference: &RealMatrix) -> Result<Vec<f64>> {
    let m = linalg::solve_right(table, reference)?;
    let n = m.nrows();
    Ok(linalg::trace_powers(&m, n)
        .into_iter()
        .map(|t| t / n as f64)
        .collect())
}

fn check_reference(reference: &ProbabilityTable) -> Result<()> {
    let cond = condition_number(&reference.entries);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularReference(cond));
    }
    Ok(())
}

/// `F^(r)` across a cyclic family, against the family's reference table.
/// Every `r = 1..d^2` is reported per member; the verdict uses `r`.
pub fn cyclic_fidelity_test(ft: &FamilyTables, r: usize, opts: &AnalysisOptions) -> Result<TestReport> {
    require_kind(ft, FamilyKind::Cyclic)?;
    check_reference(&ft.reference)?;
    let n = ft.reference.entries.nrows();
    if r == 0 || r > n {
        return Err(Error::NotEnoughData(format!("power r must lie in 1..={n}")));
    }
    let extras: Vec<Vec<f64>> = ft
        .tables
        .iter()
        .map(|t| cyclic_fidelities(&t.entries, &ft.reference.entries))
        .collect::<Result<_>>()?;
    let observed: Vec<f64> = extras.iter().map(|f| f[r - 1]).collect();
    let stat = |m: &RealMatrix, p0: Option<&RealMatrix>| {
        cyclic_fidelities(m, p0.expect("reference is resampled"))
            .map(|f| f[r - 1])
            .unwrap_or(f64::NAN)
    };
    let replicates = is_finite_shots(ft).then(|| {
        family_replicates(&ft.tables, Some(&ft.reference), opts.resamples, opts.seed, stat)
    });
    Ok(spread_report(
        TestKind::CyclicFid,
        format!("spread of F^({r}) across cyclic rotations"),
        ft,
        observed,
        extras,
        replicates,
        opts,
    ))
}

/// `L_m = log|det S_raw(m)|` for each member with bootstrap standard errors
/// when the tables are finite-shot.
pub fn repetition_series(
    ft: &FamilyTables,
    cal: Option<&CalibrationMatrices>,
    opts: &AnalysisOptions,
) -> Result<Vec<SeriesPoint>> {
    let m_values = ft
        .m_values
        .as_ref()
        .ok_or_else(|| Error::NotEnoughData("repetition family needs m values".into()))?;
    if m_values.len() != ft.tables.len() {
        return Err(Error::NotEnoughData("m values do not match tables".into()));
    }
    let offset = cal.map_or(0.0, CalibrationMatrices::log_det_offset);
    let stat = |m: &RealMatrix, _: Option<&RealMatrix>| linalg::log_abs_det(m) - offset;
    let replicates = is_finite_shots(ft)
        .then(|| family_replicates(&ft.tables, None, opts.resamples, opts.seed, stat));
    Ok(ft
        .tables
        .iter()
        .enumerate()
        .map(|(j, t)| SeriesPoint {
            index: m_values[j] as u64,
            value: stat(&t.entries, None),
            std_err: replicates.as_ref().map(|r| sample_std(&r[j])),
        })
        .collect())
}

struct LineFit {
    slope: f64,
    intercept: f64,
    slope_std_err: f64,
    residuals: Vec<f64>,
    chi_square: f64,
}

/// Weighted least squares `y ≈ slope x + intercept`. With `weights = None`
/// the slope error is estimated from the residual scatter.
fn fit_line(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> LineFit {
    let n = x.len();
    let w: Vec<f64> = weights.map_or_else(|| vec![1.0; n], <[f64]>::to_vec);
    let s: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x.iter().zip(y)).map(|(w, (x, y))| w * x * y).sum();
    let delta = s * sxx - sx * sx;
    let slope = (s * sxy - sx * sy) / delta;
    let intercept = (sxx * sy - sx * sxy) / delta;
    let residuals: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(x, y)| y - (slope * x + intercept))
        .collect();
    let chi_square: f64 = residuals.iter().zip(&w).map(|(r, w)| w * r * r).sum();
    let slope_var = if weights.is_some() {
        s / delta
    } else if n > 2 {
        chi_square / (n - 2) as f64 * s / delta
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        slope_std_err: slope_var.sqrt(),
        residuals,
        chi_square,
    }
}

/// Linearity of `L_m` in `m`. The slope estimates `log|det G|` and the
/// intercept `log|det(E_out E_in)|`. Singular members are dropped from the
/// fit with a warning.
pub fn repetition_test(
    ft: &FamilyTables,
    cal: Option<&CalibrationMatrices>,
    opts: &AnalysisOptions,
) -> Result<TestReport> {
    require_kind(ft, FamilyKind::Repetition)?;
    let series = repetition_series(ft, cal, opts)?;
    let mut warnings = Vec::new();
    let usable: Vec<&SeriesPoint> = series
        .iter()
        .filter(|p| {
            let ok = p.value.is_finite() && p.std_err.is_none_or(|s| s.is_finite() && s > 0.0);
            if !ok {
                warnings.push(format!("m = {} excluded from fit (singular table)", p.index));
            }
            ok
        })
        .collect();
    let mut distinct: Vec<u64> = usable.iter().map(|p| p.index).collect();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::NotEnoughData(format!(
            "linearity test needs at least 4 distinct m values, got {}",
            distinct.len()
        )));
    }
    let x: Vec<f64> = usable.iter().map(|p| p.index as f64).collect();
    let y: Vec<f64> = usable.iter().map(|p| p.value).collect();
    let finite = is_finite_shots(ft);
    let weights: Option<Vec<f64>> = finite.then(|| {
        usable
            .iter()
            .map(|p| 1.0 / p.std_err.expect("finite shots carry errors").powi(2))
            .collect()
    });
    let fit = fit_line(&x, &y, weights.as_deref());
    let residual_norm = fit.residuals.iter().map(|r| r * r).sum::<f64>().sqrt();

    let (statistic, threshold) = if finite {
        let dof = usable.len() - 2;
        let chi = ChiSquared::new(dof as f64).expect("dof >= 2");
        (
            fit.chi_square,
            Threshold::ChiSquare {
                dof,
                q95: chi.inverse_cdf(0.95),
                q99: chi.inverse_cdf(0.99),
            },
        )
    } else {
        (
            residual_norm,
            Threshold::ExactTolerance {
                tolerance: opts.exact_tolerance,
            },
        )
    };
    let audit = cp_witness(&series, opts)?;
    let members = series
        .iter()
        .map(|p| MemberStat {
            index: p.index,
            statistic: p.value,
            ci: p.std_err.map(|s| Interval {
                lower: p.value - 1.96 * s,
                upper: p.value + 1.96 * s,
            }),
            extra: Vec::new(),
            flagged: !p.value.is_finite(),
        })
        .collect();
    Ok(TestReport {
        kind: TestKind::RepLinearity,
        description: "linearity of log|det S_raw| in m".into(),
        members,
        summary: Summary {
            slope: Some(fit.slope),
            slope_std_err: Some(fit.slope_std_err),
            intercept: Some(fit.intercept),
            residual_norm: Some(residual_norm),
            chi_square: finite.then_some(fit.chi_square),
            increases: audit.summary.increases,
            ..Default::default()
        },
        statistic,
        threshold,
        verdict: threshold.verdict(statistic),
        warnings,
    })
}

/// Flags adjacent points where the series increases. For a context-
/// independent CP-divisible process `log|det|` can only decrease; this
/// presumes the SPAM maps themselves are not context dependent.
///
/// With standard errors, each increase is converted to a z-score and
/// compared with one-sided Bonferroni-corrected normal quantiles.
pub fn cp_witness(series: &[SeriesPoint], opts: &AnalysisOptions) -> Result<TestReport> {
    if series.len() < 2 {
        return Err(Error::NotEnoughData("CP witness needs at least 2 points".into()));
    }
    let pairs = series.len() - 1;
    let has_errors = series.iter().all(|p| p.std_err.is_some());
    let threshold = if has_errors {
        Threshold::PerPoint {
            z95: bonferroni_z(0.05, pairs),
            z99: bonferroni_z(0.01, pairs),
        }
    } else {
        Threshold::ExactTolerance {
            tolerance: opts.exact_tolerance,
        }
    };
    let score = |a: &SeriesPoint, b: &SeriesPoint| -> f64 {
        let rise = b.value - a.value;
        match (a.std_err, b.std_err) {
            (Some(sa), Some(sb)) if has_errors => rise / (sa * sa + sb * sb).sqrt(),
            _ => rise,
        }
    };
    let scores: Vec<f64> = series
        .windows(2)
        .map(|w| score(&w[0], &w[1]))
        .filter(|s| !s.is_nan())
        .collect();
    let statistic = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut increases = Vec::new();
    let mut members = vec![MemberStat {
        index: series[0].index,
        statistic: series[0].value,
        ci: None,
        extra: Vec::new(),
        flagged: false,
    }];
    for w in series.windows(2) {
        let s = score(&w[0], &w[1]);
        let flagged = threshold.verdict(s) == Verdict::ContextDependent;
        if flagged {
            increases.push((w[0].index, w[1].index));
        }
        members.push(MemberStat {
            index: w[1].index,
            statistic: w[1].value,
            ci: None,
            extra: vec![s],
            flagged,
        });
    }
    Ok(TestReport {
        kind: TestKind::CpWitness,
        description: "increases of log|det| along the series (CP-divisibility witness)".into(),
        members,
        summary: Summary {
            increases,
            ..Default::default()
        },
        statistic,
        threshold,
        verdict: threshold.verdict(statistic),
        warnings: Vec::new(),
    })
}

/// `|det S| = |det P / det P0|`.
pub fn accessible_volume(table: &ProbabilityTable, reference: &ProbabilityTable) -> Result<f64> {
    check_reference(reference)?;
    Ok((linalg::log_abs_det(&table.entries) - linalg::log_abs_det(&reference.entries)).exp())
}

/// Accessible volume of every member. A CPTP process cannot have volume
/// above one, so a significant excess is flagged.
pub fn volume_test(ft: &FamilyTables, opts: &AnalysisOptions) -> Result<TestReport> {
    if ft.tables.is_empty() {
        return Err(Error::NotEnoughData("family has no members".into()));
    }
    check_reference(&ft.reference)?;
    let stat = |m: &RealMatrix, p0: Option<&RealMatrix>| {
        linalg::log_abs_det(m) - linalg::log_abs_det(p0.expect("reference is resampled"))
    };
    let observed: Vec<f64> = ft
        .tables
        .iter()
        .map(|t| stat(&t.entries, Some(&ft.reference.entries)))
        .collect();
    let finite = is_finite_shots(ft);
    let replicates = finite.then(|| {
        family_replicates(&ft.tables, Some(&ft.reference), opts.resamples, opts.seed, stat)
    });
    let scores: Vec<f64> = observed
        .iter()
        .enumerate()
        .map(|(k, &lv)| match &replicates {
            Some(r) => lv / sample_std(&r[k]),
            None => lv,
        })
        .collect();
    let threshold = if finite {
        Threshold::PerPoint {
            z95: bonferroni_z(0.05, observed.len()),
            z99: bonferroni_z(0.01, observed.len()),
        }
    } else {
        Threshold::ExactTolerance {
            tolerance: opts.exact_tolerance,
        }
    };
    let statistic = scores.iter().cloned().filter(|s| !s.is_nan()).fold(f64::NEG_INFINITY, f64::max);
    let members = observed
        .iter()
        .enumerate()
        .map(|(k, &lv)| MemberStat {
            index: ft.m_values.as_ref().map_or(k as u64 + 1, |m| m[k] as u64),
            statistic: lv.exp(),
            ci: replicates.as_ref().map(|r| {
                let ci = percentile_ci(&r[k]);
                Interval {
                    lower: ci.lower.exp(),
                    upper: ci.upper.exp(),
                }
            }),
            extra: vec![lv],
            flagged: threshold.verdict(scores[k]) == Verdict::ContextDependent,
        })
        .collect();
    Ok(TestReport {
        kind: TestKind::Volume,
        description: "accessible volume |det P / det P0| per member".into(),
        members,
        summary: Summary::default(),
        statistic,
        threshold,
        verdict: threshold.verdict(statistic),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Shots;
    use nalgebra::DMatrix;

    fn family(kind: FamilyKind, tables: Vec<DMatrix<f64>>, m: Option<Vec<u32>>) -> FamilyTables {
        FamilyTables {
            kind,
            tables: tables
                .into_iter()
                .enumerate()
                .map(|(k, e)| ProbabilityTable::new(format!("m{k}"), e, Shots::Exact))
                .collect(),
            reference: ProbabilityTable::new("ref", DMatrix::identity(2, 2), Shots::Exact),
            m_values: m,
        }
    }

    #[test]
    fn identical_members_have_zero_spread() {
        let t = DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.1, 0.7]);
        let ft = family(FamilyKind::Permutation, vec![t.clone(), t.clone(), t], None);
        let r = det_permutation_test(&ft, None, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.verdict, Verdict::ContextIndependent);
    }

    #[test]
    fn wrong_kind_rejected() {
        let ft = family(FamilyKind::Cyclic, vec![DMatrix::identity(2, 2)], None);
        assert!(matches!(
            det_permutation_test(&ft, None, &AnalysisOptions::default()),
            Err(Error::WrongFamilyKind { .. })
        ));
    }

    #[test]
    fn singular_member_flagged() {
        let ft = family(
            FamilyKind::Permutation,
            vec![DMatrix::identity(2, 2), DMatrix::zeros(2, 2)],
            None,
        );
        let r = det_permutation_test(&ft, None, &AnalysisOptions::default()).unwrap();
        assert!(r.members[1].flagged);
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn cyclic_identity_model_unit_fidelity() {
        let ft = family(FamilyKind::Cyclic, vec![DMatrix::identity(2, 2)], None);
        let r = cyclic_fidelity_test(&ft, 1, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.members[0].statistic, 1.0);
        assert_eq!(r.members[0].extra, vec![1.0, 1.0]);
    }

    #[test]
    fn cyclic_singular_reference() {
        let mut ft = family(FamilyKind::Cyclic, vec![DMatrix::identity(2, 2)], None);
        ft.reference.entries = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            cyclic_fidelity_test(&ft, 1, &AnalysisOptions::default()),
            Err(Error::SingularReference(_))
        ));
    }

    #[test]
    fn repetition_without_decay_is_flat() {
        let t = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let ft = family(
            FamilyKind::Repetition,
            vec![t.clone(); 5],
            Some(vec![0, 1, 2, 3, 4]),
        );
        let r = repetition_test(&ft, None, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.summary.slope, Some(0.0));
        assert_eq!(r.summary.residual_norm, Some(0.0));
        assert_eq!(r.verdict, Verdict::ContextIndependent);
    }

    #[test]
    fn repetition_needs_four_points() {
        let ft = family(
            FamilyKind::Repetition,
            vec![DMatrix::identity(2, 2); 3],
            Some(vec![0, 1, 2]),
        );
        assert!(repetition_test(&ft, None, &AnalysisOptions::default()).is_err());
    }

    #[test]
    fn repetition_recovers_slope_and_flags_curvature() {
        let mk = |m: u32, curve: f64| {
            let l = -0.01 * m as f64 + curve * (m as f64).powi(2);
            DMatrix::from_diagonal_element(2, 2, (l / 2.0).exp())
        };
        let ms = vec![0, 10, 20, 30, 40];
        let ft = family(
            FamilyKind::Repetition,
            ms.iter().map(|&m| mk(m, 0.0)).collect(),
            Some(ms.clone()),
        );
        let r = repetition_test(&ft, None, &AnalysisOptions::default()).unwrap();
        assert!((r.summary.slope.unwrap() + 0.01).abs() < 1e-14);
        let ft = family(
            FamilyKind::Repetition,
            ms.iter().map(|&m| mk(m, 1e-4)).collect(),
            Some(ms),
        );
        let r = repetition_test(&ft, None, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ContextDependent);
    }

    fn series(values: &[f64]) -> Vec<SeriesPoint> {
        values
            .iter()
            .enumerate()
            .map(|(j, &v)| SeriesPoint {
                index: j as u64,
                value: v,
                std_err: None,
            })
            .collect()
    }

    #[test]
    fn cp_witness_cases() {
        let opts = AnalysisOptions::default();
        let r = cp_witness(&series(&[0.0, -1.0, -2.0]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::ContextIndependent);
        assert!(r.summary.increases.is_empty());
        let r = cp_witness(&series(&[-1.0, -1.0, -1.0]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::ContextIndependent);
        let r = cp_witness(&series(&[0.0, -1.0, -0.5, -2.0]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::ContextDependent);
        assert_eq!(r.summary.increases, vec![(1, 2)]);
        assert!(cp_witness(&series(&[0.0]), &opts).is_err());
    }

    #[test]
    fn cp_witness_with_errors_uses_z_scores() {
        let mut s = series(&[0.0, -1.0, -0.9]);
        for p in &mut s {
            p.std_err = Some(0.1);
        }
        // rise 0.1 over sqrt(0.02) is z = 0.71: not significant
        let r = cp_witness(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ContextIndependent);
        s[2].value = 0.0;
        let r = cp_witness(&s, &AnalysisOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ContextDependent);
    }

    #[test]
    fn accessible_volume_of_reference_is_one() {
        let p = ProbabilityTable::new("p", DMatrix::from_row_slice(2, 2, &[0.8, 0.3, 0.1, 0.6]), Shots::Exact);
        assert!((accessible_volume(&p, &p).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_fit_exact() {
        let f = fit_line(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0], None);
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!(f.slope_std_err < 1e-12);
    }
}
