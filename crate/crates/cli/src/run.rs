//! Scenario execution and output files.
//!
//! Layout under `output_dir`:
//!
//! ```text
//! summary.json
//! <family>_<test>.csv                       plot data, every phi
//! phi_<phi>/<family>/<test>.json            full report
//! phi_<phi>/<family>/tables/<member>.csv    probability tables
//! ```

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ctxdep::analysis::detectors::repetition_series;
use ctxdep::analysis::{
    cp_witness, cyclic_fidelity_test, det_permutation_test, repetition_test, volume_test, AnalysisOptions,
    TestKind, TestReport, Verdict,
};
use ctxdep::experiment::{
    cyclic_family, evaluate_family, permutation_family, random_permutation_family, repetition_family,
    FamilyTables, ProbabilityTable, Sequence, SequenceFamily,
};
use ctxdep::noise::{GateSpec, TwoQubitModel};
use log::info;
use serde::Serialize;

use crate::config::{CustomFamily, RunConfig, Scenario};

const FIG3A_GRID: (u32, u32, u32) = (0, 500, 50);
const FIG3B_GRID: (u32, u32, u32) = (0, 250, 25);

fn uses_reference(kind: TestKind) -> bool {
    matches!(kind, TestKind::CyclicFid | TestKind::Volume)
}

struct Plan {
    name: String,
    family: SequenceFamily,
    tests: Vec<TestKind>,
}

/// Verdict for one test on one family at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub phi: f64,
    pub family: String,
    pub test: String,
    pub verdict: Verdict,
    pub statistic: f64,
    /// Verdicts of the same test against each meta-reference, in config order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub meta_verdicts: Vec<Verdict>,
}

impl TestResult {
    /// Whether the meta-reference runs all agree with the main verdict.
    pub fn meta_consistent(&self) -> bool {
        self.meta_verdicts.iter().all(|v| *v == self.verdict)
    }
}

impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "phi={} {}/{}: {:?} (statistic {:.4e})",
            self.phi, self.family, self.test, self.verdict, self.statistic
        )?;
        if !self.meta_verdicts.is_empty() {
            let agree = self.meta_verdicts.iter().filter(|v| **v == self.verdict).count();
            write!(f, " meta-references agree {agree}/{}", self.meta_verdicts.len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub results: Vec<TestResult>,
}

impl RunOutcome {
    pub fn any_dependent(&self) -> bool {
        self.results.iter().any(|r| r.verdict == Verdict::ContextDependent)
    }
}

fn grid(values: &Option<Vec<u32>>, (start, stop, step): (u32, u32, u32)) -> Vec<u32> {
    values
        .clone()
        .unwrap_or_else(|| (start..=stop).step_by(step as usize).collect())
}

fn parse_block(text: &str) -> Vec<GateSpec> {
    Sequence::parse("block", text).expect("built-in block").gates
}

fn plans(cfg: &RunConfig) -> Vec<Plan> {
    use TestKind::*;
    let plan = |name: &str, family, tests: &[TestKind]| Plan {
        name: name.into(),
        family,
        tests: tests.to_vec(),
    };
    match cfg.scenario {
        Scenario::Fig2a => vec![plan(
            "permutation",
            permutation_family(GateSpec::idle(), GateSpec::x(PI), 250),
            &[PermDet],
        )],
        Scenario::Fig2b => {
            let base = Sequence::parse("base", "X180 I*500").expect("built-in sequence");
            vec![plan("cyclic", cyclic_family(&base), &[CyclicFid])]
        }
        Scenario::Fig3a => {
            let m = grid(&cfg.m_values, FIG3A_GRID);
            vec![plan("idle", repetition_family(&parse_block("I"), &m), &[RepLinearity, CpWitness])]
        }
        Scenario::Fig3b => {
            let m = grid(&cfg.m_values, FIG3B_GRID);
            [("x180", "X180"), ("x180_y180", "X180 Y180"), ("xm90_x90", "X-90 X90")]
                .into_iter()
                .map(|(name, block)| plan(name, repetition_family(&parse_block(block), &m), &[RepLinearity]))
                .collect()
        }
        Scenario::Custom => match cfg.custom.as_ref().expect("custom scenario carries a family") {
            CustomFamily::Permutation {
                gate_a,
                gate_b,
                n,
                random_permutations,
            } => {
                let family = if *random_permutations == 0 {
                    permutation_family(gate_a.gate, gate_b.gate, *n)
                } else {
                    random_permutation_family(gate_a.gate, gate_b.gate, *n, *random_permutations, cfg.seed)
                };
                vec![plan("permutation", family, &[PermDet, Volume])]
            }
            CustomFamily::Cyclic { sequence } => {
                vec![plan("cyclic", cyclic_family(&sequence.sequence), &[CyclicFid, Volume])]
            }
            CustomFamily::Repetition { block, m_values } => vec![plan(
                "repetition",
                repetition_family(&block.sequence.gates, m_values),
                &[RepLinearity, CpWitness],
            )],
        },
    }
}

fn run_test(choice: TestKind, ft: &FamilyTables, cfg: &RunConfig, opts: &AnalysisOptions) -> Result<TestReport> {
    let report = match choice {
        TestKind::PermDet => det_permutation_test(ft, None, opts),
        TestKind::CyclicFid => cyclic_fidelity_test(ft, cfg.fidelity_power, opts),
        TestKind::RepLinearity => repetition_test(ft, None, opts),
        TestKind::CpWitness => repetition_series(ft, None, opts).and_then(|s| cp_witness(&s, opts)),
        TestKind::Volume => volume_test(ft, opts),
    };
    Ok(report?)
}

fn phi_dir(phi: f64) -> String {
    format!("phi_{phi}")
}

/// Writes via a temporary sibling so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let name = path.file_name().context("output path has no file name")?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn write_table(path: &Path, table: &ProbabilityTable) -> Result<()> {
    write_atomic(path, table.to_csv().as_bytes())
}

fn json(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Serialize)]
struct PlotRow {
    index: u64,
    statistic: f64,
    ci_low: f64,
    ci_high: f64,
    phi: f64,
}

fn plot_rows(report: &TestReport, phi: f64) -> impl Iterator<Item = PlotRow> + '_ {
    report.members.iter().map(move |m| {
        let (ci_low, ci_high) = m.ci.map_or((m.statistic, m.statistic), |ci| (ci.lower, ci.upper));
        PlotRow {
            index: m.index,
            statistic: m.statistic,
            ci_low,
            ci_high,
            phi,
        }
    })
}

fn gates_in(plans: &[Plan], cfg: &RunConfig) -> Vec<GateSpec> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let sequences = plans
        .iter()
        .flat_map(|p| p.family.members.iter())
        .chain(std::iter::once(&cfg.reference.sequence))
        .chain(cfg.meta_references.iter().map(|m| &m.sequence));
    for seq in sequences {
        for g in &seq.gates {
            if seen.insert(g.to_string()) {
                out.push(*g);
            }
        }
    }
    out
}

/// Runs every family and test of the configured scenario at every coupling,
/// writing outputs under `cfg.output_dir`.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunOutcome> {
    let plans = plans(cfg);
    for p in &plans {
        if p.family.members.is_empty() {
            bail!("family `{}` has no members", p.name);
        }
    }
    let gates = gates_in(&plans, cfg);
    let opts = AnalysisOptions {
        resamples: cfg.bootstrap_resamples,
        seed: cfg.seed,
        ..AnalysisOptions::default()
    };
    let out = &cfg.output_dir;
    let mut results = Vec::new();
    let mut plots: Vec<(PathBuf, Vec<PlotRow>)> = Vec::new();

    for &phi in &cfg.phi_values {
        let model = TwoQubitModel::new(cfg.noise.with_phi(phi))
            .and_then(|m| m.with_gates(gates.iter().copied()))
            .with_context(|| format!("building the model at phi = {phi}"))?;
        for plan in &plans {
            info!(
                "{} at phi={phi}: {} members, {}",
                plan.name,
                plan.family.members.len(),
                plan.family.description
            );
            let tag = format!("{}/{}/phi={phi}", cfg.scenario, plan.name);
            let ft = evaluate_family(&plan.family, &cfg.reference.sequence, &model, cfg.shots, cfg.seed, &tag)?;
            let dir = out.join(phi_dir(phi)).join(&plan.name);
            for (member, table) in plan.family.members.iter().zip(&ft.tables) {
                write_table(&dir.join("tables").join(format!("{}.csv", member.label)), table)?;
            }
            write_table(&dir.join("tables").join("reference.csv"), &ft.reference)?;

            let meta_tables = if plan.tests.iter().any(|t| uses_reference(*t)) {
                cfg.meta_references
                    .iter()
                    .enumerate()
                    .map(|(j, meta)| {
                        let only_reference = SequenceFamily {
                            members: Vec::new(),
                            ..plan.family.clone()
                        };
                        let reference =
                            evaluate_family(&only_reference, &meta.sequence, &model, cfg.shots, cfg.seed, &tag)?
                                .reference;
                        write_table(
                            &dir.join("tables").join(format!("meta_reference_{}.csv", j + 1)),
                            &reference,
                        )?;
                        Ok(FamilyTables {
                            reference,
                            ..ft.clone()
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };

            for &test in &plan.tests {
                let report = run_test(test, &ft, cfg, &opts)
                    .with_context(|| format!("{} test on {} at phi = {phi}", test.name(), plan.name))?;
                for w in &report.warnings {
                    log::warn!("{}/{} at phi={phi}: {w}", plan.name, report.kind.name());
                }
                let meta_verdicts = if uses_reference(test) {
                    meta_tables
                        .iter()
                        .map(|mt| run_test(test, mt, cfg, &opts).map(|r| r.verdict))
                        .collect::<Result<Vec<_>>>()?
                } else {
                    Vec::new()
                };
                write_atomic(&dir.join(format!("{}.json", report.kind.name())), &json(&report)?)?;
                let plot_path = out.join(format!("{}_{}.csv", plan.name, report.kind.name()));
                let rows = plot_rows(&report, phi);
                match plots.iter_mut().find(|(p, _)| *p == plot_path) {
                    Some((_, existing)) => existing.extend(rows),
                    None => plots.push((plot_path, rows.collect())),
                }
                results.push(TestResult {
                    phi,
                    family: plan.name.clone(),
                    test: report.kind.name().into(),
                    verdict: report.verdict,
                    statistic: report.statistic,
                    meta_verdicts,
                });
            }
        }
    }

    for (path, rows) in &plots {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        write_atomic(path, &w.into_inner()?)?;
    }
    let outcome = RunOutcome {
        config: cfg.clone(),
        results,
    };
    write_atomic(&out.join("summary.json"), &json(&outcome)?)?;
    Ok(outcome)
}

