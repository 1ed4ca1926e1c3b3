//! Structured test results.

use serde::Serialize;

use super::bootstrap::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    PermDet,
    CyclicFid,
    RepLinearity,
    Volume,
    CpWitness,
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestKind::PermDet => "perm_det",
            TestKind::CyclicFid => "cyclic_fid",
            TestKind::RepLinearity => "rep_linearity",
            TestKind::Volume => "volume",
            TestKind::CpWitness => "cp_witness",
        }
    }
}

/// For the CP witness and volume checks, `ContextDependent` means the
/// data cannot come from a CP-divisible, context-independent process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ContextIndependent,
    ContextDependent,
    Inconclusive,
}

/// How the verdict threshold was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Threshold {
    /// Exact tables: anything above numerical tolerance is significant.
    ExactTolerance { tolerance: f64 },
    /// Quantiles of a bootstrap null distribution of the statistic.
    BootstrapNull { q95: f64, q99: f64 },
    /// Chi-square quantiles for the given degrees of freedom.
    ChiSquare { dof: usize, q95: f64, q99: f64 },
    /// Per-pair one-sided z thresholds (CP witness, volume).
    PerPoint { z95: f64, z99: f64 },
}

impl Threshold {
    pub fn verdict(&self, statistic: f64) -> Verdict {
        let (weak, strong) = match *self {
            Threshold::ExactTolerance { tolerance } => (tolerance, tolerance),
            Threshold::BootstrapNull { q95, q99 } | Threshold::ChiSquare { q95, q99, .. } => (q95, q99),
            Threshold::PerPoint { z95, z99 } => (z95, z99),
        };
        if statistic > strong {
            Verdict::ContextDependent
        } else if statistic > weak {
            Verdict::Inconclusive
        } else {
            Verdict::ContextIndependent
        }
    }
}

/// Per-member statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberStat {
    /// Family index `k` (1-based) or repetition count `m`.
    pub index: u64,
    pub statistic: f64,
    pub ci: Option<Interval>,
    /// Extra per-member values, e.g. `F^(r)` for every `r`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_std_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_square: Option<f64>,
    /// Adjacent index pairs where the series increases significantly.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub increases: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub kind: TestKind,
    pub description: String,
    pub members: Vec<MemberStat>,
    pub summary: Summary,
    /// The scalar compared against `threshold`.
    pub statistic: f64,
    pub threshold: Threshold,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}
