//! Gate sequences, probability tables (exact and finite-shot) and the
//! sequence families each test consumes.
//!
//! Sequences are stored in time order: `gates[0]` acts first. A table entry
//! `(k, i)` is the probability of the monitored outcome after preparation `i`,
//! the sequence, and measurement setting `k`.

use std::fmt::{self, Write as _};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{GateSpec, TwoQubitModel};
use crate::rng::{StreamKey, DOMAIN_SAMPLE};

/// An ordered list of gates, first-applied first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sequence {
    pub gates: Vec<GateSpec>,
    pub label: String,
}

impl Sequence {
    pub fn new(label: impl Into<String>, gates: Vec<GateSpec>) -> Self {
        Self {
            gates,
            label: label.into(),
        }
    }

    /// The empty reference experiment.
    pub fn empty() -> Self {
        Self::new("reference", Vec::new())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `self` followed by `later`.
    pub fn then(&self, later: &Sequence) -> Sequence {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&later.gates);
        Sequence::new(format!("{}+{}", self.label, later.label), gates)
    }

    /// Parses whitespace-separated gate tokens, each optionally repeated
    /// with `*<count>`; the inverse of [`compact`](Self::compact).
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        for token in text.split_whitespace() {
            let (gate, count) = match token.split_once('*') {
                Some((g, n)) => {
                    let n: usize = n.parse().map_err(|_| Error::GateSyntax {
                        token: token.to_string(),
                        reason: "repeat count must be a non-negative integer".into(),
                    })?;
                    (g, n)
                }
                None => (token, 1),
            };
            let gate: GateSpec = gate.parse()?;
            gates.extend(std::iter::repeat_n(gate, count));
        }
        Ok(Self::new(label, gates))
    }

    /// Compact run-length notation such as `X180 I*500`.
    pub fn compact(&self) -> String {
        let mut out = String::new();
        let mut iter = self.gates.iter().peekable();
        while let Some(g) = iter.next() {
            let mut run = 1;
            while iter.peek() == Some(&g) {
                iter.next();
                run += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            if run == 1 {
                let _ = write!(out, "{g}");
            } else {
                let _ = write!(out, "{g}*{run}");
            }
        }
        out
    }
}

/// Number of shots behind a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    Exact,
    Finite(u64),
}

impl Shots {
    pub fn count(&self) -> Option<u64> {
        match self {
            Shots::Exact => None,
            Shots::Finite(n) => Some(*n),
        }
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => write!(f, "exact"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// Outcome probabilities `P_{k|i}`; rows are measurement settings, columns
/// preparations.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub entries: DMatrix<f64>,
    pub shots: Shots,
    pub label: String,
}

impl ProbabilityTable {
    pub fn new(label: impl Into<String>, entries: DMatrix<f64>, shots: Shots) -> Self {
        Self {
            entries,
            shots,
            label: label.into(),
        }
    }

    /// CSV with `#` metadata lines, a header of preparation indices and one
    /// row per measurement setting. Values use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# label: {}", self.label);
        let _ = writeln!(out, "# shots: {}", self.shots);
        out.push_str("k\\i");
        for i in 0..self.entries.ncols() {
            let _ = write!(out, ",{i}");
        }
        out.push('\n');
        for k in 0..self.entries.nrows() {
            let _ = write!(out, "{k}");
            for i in 0..self.entries.ncols() {
                let _ = write!(out, ",{}", self.entries[(k, i)]);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let err = |line: usize, reason: &str| Error::TableParse {
            line,
            reason: reason.to_string(),
        };
        let mut label = None;
        let mut shots = None;
        let mut header: Option<usize> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "metadata line needs `key: value`"))?;
                let value = value.trim();
                match key.trim() {
                    "label" => label = Some(value.to_string()),
                    "shots" => {
                        shots = Some(if value == "exact" {
                            Shots::Exact
                        } else {
                            Shots::Finite(
                                value
                                    .parse()
                                    .map_err(|_| err(line_no, "shots must be `exact` or an integer"))?,
                            )
                        })
                    }
                    _ => {}
                }
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            match header {
                None => {
                    for (j, c) in cells.iter().enumerate().skip(1) {
                        if c.parse::<usize>() != Ok(j - 1) {
                            return Err(err(line_no, "header must list column indices 0..n"));
                        }
                    }
                    header = Some(cells.len() - 1);
                }
                Some(ncols) => {
                    if cells.len() != ncols + 1 {
                        return Err(err(line_no, "row length does not match header"));
                    }
                    if cells[0].parse::<usize>() != Ok(rows.len()) {
                        return Err(err(line_no, "row index out of order"));
                    }
                    let row = cells[1..]
                        .iter()
                        .map(|c| c.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| err(line_no, "non-numeric entry"))?;
                    rows.push(row);
                }
            }
        }
        let ncols = header.ok_or_else(|| err(0, "missing header"))?;
        if rows.is_empty() {
            return Err(err(0, "no data rows"));
        }
        let entries = DMatrix::from_fn(rows.len(), ncols, |k, i| rows[k][i]);
        Ok(Self {
            entries,
            shots: shots.ok_or_else(|| err(0, "missing `# shots:` line"))?,
            label: label.unwrap_or_default(),
        })
    }
}

/// Exact table of `seq` under `model`.
pub fn prob_table(seq: &Sequence, model: &TwoQubitModel) -> Result<ProbabilityTable> {
    let mut states = model.preparation_matrix().clone();
    for g in &seq.gates {
        states = model.gate(g)?.matrix() * &states;
    }
    let entries = model.measurement_matrix() * states;
    Ok(ProbabilityTable::new(seq.label.clone(), entries, Shots::Exact))
}

/// Binomial frequency for one cell.
pub(crate) fn binomial_frequency(p: f64, shots: u64, key: StreamKey) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let mut rng = key.rng();
    let hits = Binomial::new(shots, p)
        .expect("probability clamped to [0, 1]")
        .sample(&mut rng);
    hits as f64 / shots as f64
}

/// Finite-shot realization of an exact table. Each cell draws from its own
/// substream keyed by `(seed, label, k, i)`.
pub fn sample_table(exact: &ProbabilityTable, shots: u64, seed: u64) -> ProbabilityTable {
    assert!(shots >= 1, "need at least one shot");
    let key = StreamKey::new(seed).index(DOMAIN_SAMPLE).label(&exact.label);
    let entries = DMatrix::from_fn(exact.entries.nrows(), exact.entries.ncols(), |k, i| {
        binomial_frequency(
            exact.entries[(k, i)],
            shots,
            key.index(k as u64).index(i as u64),
        )
    });
    ProbabilityTable::new(exact.label.clone(), entries, Shots::Finite(shots))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Permutation,
    Cyclic,
    Repetition,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Permutation => "permutation",
            FamilyKind::Cyclic => "cyclic",
            FamilyKind::Repetition => "repetition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceFamily {
    pub kind: FamilyKind,
    pub members: Vec<Sequence>,
    pub description: String,
    /// Repetition counts, for repetition families only.
    pub m_values: Option<Vec<u32>>,
}

/// Member `k = 1..=n+1` is `a^(n-k+1) b^(n-k+1) (b a)^(k-1)`.
pub fn permutation_family(a: GateSpec, b: GateSpec, n: usize) -> SequenceFamily {
    assert!(n >= 1);
    let members = (1..=n + 1)
        .map(|k| {
            let head = n + 1 - k;
            let mut gates = Vec::with_capacity(2 * n);
            gates.extend(std::iter::repeat_n(a, head));
            gates.extend(std::iter::repeat_n(b, head));
            for _ in 0..k - 1 {
                gates.push(b);
                gates.push(a);
            }
            Sequence::new(format!("perm{k:04}"), gates)
        })
        .collect();
    SequenceFamily {
        kind: FamilyKind::Permutation,
        members,
        description: format!("{a}^{n} {b}^{n} -> ({b} {a})^{n}"),
        m_values: None,
    }
}

/// `count` uniformly random orderings of `a^n b^n`, seeded.
pub fn random_permutation_family(a: GateSpec, b: GateSpec, n: usize, count: usize, seed: u64) -> SequenceFamily {
    let key = StreamKey::new(seed).label("random-permutation");
    let mut base = vec![a; n];
    base.extend(std::iter::repeat_n(b, n));
    let members = (0..count)
        .map(|j| {
            let mut gates = base.clone();
            gates.shuffle(&mut key.index(j as u64).rng());
            Sequence::new(format!("rperm{:04}", j + 1), gates)
        })
        .collect();
    SequenceFamily {
        kind: FamilyKind::Permutation,
        members,
        description: format!("random orderings of {a}^{n} {b}^{n}"),
        m_values: None,
    }
}

/// All rotations of `seq`; member `j` has the first gate moved to position `j`.
pub fn cyclic_family(seq: &Sequence) -> SequenceFamily {
    assert!(!seq.is_empty(), "cyclic family needs a non-empty sequence");
    let len = seq.len();
    let members = (0..len)
        .map(|j| {
            let mut gates = seq.gates.clone();
            gates.rotate_right(j);
            Sequence::new(format!("rot{:04}", j + 1), gates)
        })
        .collect();
    SequenceFamily {
        kind: FamilyKind::Cyclic,
        members,
        description: format!("rotations of {}", seq.compact()),
        m_values: None,
    }
}

/// Member `j` is `block` repeated `m_values[j]` times.
pub fn repetition_family(block: &[GateSpec], m_values: &[u32]) -> SequenceFamily {
    assert!(
        m_values.windows(2).all(|w| w[0] < w[1]),
        "m_values must be strictly increasing"
    );
    let name = Sequence::new("", block.to_vec()).compact();
    let members = m_values
        .iter()
        .map(|&m| {
            let mut gates = Vec::with_capacity(block.len() * m as usize);
            for _ in 0..m {
                gates.extend_from_slice(block);
            }
            Sequence::new(format!("rep{m:05}"), gates)
        })
        .collect();
    SequenceFamily {
        kind: FamilyKind::Repetition,
        members,
        description: format!("({name})^m"),
        m_values: Some(m_values.to_vec()),
    }
}

/// Tables for every member of a family, plus the reference table.
#[derive(Debug, Clone)]
pub struct FamilyTables {
    pub kind: FamilyKind,
    pub tables: Vec<ProbabilityTable>,
    pub reference: ProbabilityTable,
    pub m_values: Option<Vec<u32>>,
}

/// Evaluates every member (and the reference sequence) on `model`, optionally
/// sampling each table with `shots` shots. Labels are prefixed with `tag` so
/// that sampling substreams differ between families.
pub fn evaluate_family(
    family: &SequenceFamily,
    reference: &Sequence,
    model: &TwoQubitModel,
    shots: Shots,
    seed: u64,
    tag: &str,
) -> Result<FamilyTables> {
    let finish = |seq: &Sequence| -> Result<ProbabilityTable> {
        let mut t = prob_table(seq, model)?;
        t.label = format!("{tag}/{}", seq.label);
        Ok(match shots {
            Shots::Exact => t,
            Shots::Finite(n) => sample_table(&t, n, seed),
        })
    };
    #[cfg(feature = "parallel")]
    let tables = {
        use rayon::prelude::*;
        family
            .members
            .par_iter()
            .map(finish)
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let tables = family
        .members
        .iter()
        .map(finish)
        .collect::<Result<Vec<_>>>()?;
    let mut reference = reference.clone();
    reference.label = format!("reference[{}]", reference.label);
    Ok(FamilyTables {
        kind: family.kind,
        tables,
        reference: finish(&reference)?,
        m_values: family.m_values.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseParams;
    use std::f64::consts::PI;

    fn a() -> GateSpec {
        GateSpec::idle()
    }
    fn b() -> GateSpec {
        GateSpec::x(PI)
    }

    #[test]
    fn permutation_family_small() {
        let f = permutation_family(a(), b(), 1);
        assert_eq!(f.members.len(), 2);
        assert_eq!(f.members[0].gates, vec![a(), b()]);
        assert_eq!(f.members[1].gates, vec![b(), a()]);
    }

    #[test]
    fn permutation_family_full_size() {
        let f = permutation_family(a(), b(), 250);
        assert_eq!(f.members.len(), 251);
        let first = &f.members[0];
        assert!(first.gates[..250].iter().all(|g| *g == a()));
        assert!(first.gates[250..].iter().all(|g| *g == b()));
        let last = &f.members[250];
        for pair in last.gates.chunks(2) {
            assert_eq!(pair, [b(), a()]);
        }
        // member 2 = a^249 b^249 (b a)
        let second = &f.members[1];
        assert_eq!(second.compact(), "I*249 X180*250 I");
        for m in &f.members {
            assert_eq!(m.len(), 500);
            assert_eq!(m.gates.iter().filter(|g| **g == a()).count(), 250);
        }
    }

    #[test]
    fn parse_inverts_compact() {
        let f = permutation_family(a(), b(), 250);
        for m in [&f.members[0], &f.members[1], &f.members[250]] {
            let back = Sequence::parse("p", &m.compact()).unwrap();
            assert_eq!(back.gates, m.gates);
        }
        let s = Sequence::parse("s", "X180 I*3 Y-90@2 X90*0").unwrap();
        assert_eq!(s.gates, vec![b(), a(), a(), a(), GateSpec::y(-PI / 2.0).with_duration(2)]);
        assert!(Sequence::parse("s", "").unwrap().is_empty());
        assert!(matches!(Sequence::parse("s", "X180*x"), Err(Error::GateSyntax { .. })));
    }

    #[test]
    fn random_permutations_are_permutations_and_seeded() {
        let f = random_permutation_family(a(), b(), 10, 5, 3);
        let g = random_permutation_family(a(), b(), 10, 5, 3);
        assert_eq!(f, g);
        for m in &f.members {
            assert_eq!(m.gates.iter().filter(|x| **x == b()).count(), 10);
        }
    }

    #[test]
    fn cyclic_family_rotations() {
        let c = GateSpec::y(PI);
        let f = cyclic_family(&Sequence::new("s", vec![a()]));
        assert_eq!(f.members.len(), 1);
        let f = cyclic_family(&Sequence::new("s", vec![a(), b(), c]));
        let got: Vec<_> = f.members.iter().map(|m| m.gates.clone()).collect();
        assert_eq!(got, vec![vec![a(), b(), c], vec![c, a(), b()], vec![b(), c, a()]]);
    }

    #[test]
    fn cyclic_family_of_x_idle500() {
        let mut gates = vec![b()];
        gates.extend(std::iter::repeat_n(a(), 500));
        let f = cyclic_family(&Sequence::new("s", gates));
        assert_eq!(f.members.len(), 501);
        assert_eq!(f.members[1].compact(), "I X180 I*499");
    }

    #[test]
    fn repetition_family_members() {
        let f = repetition_family(&[b()], &[0]);
        assert!(f.members[0].is_empty());
        let f = repetition_family(&[GateSpec::x(-PI / 2.0), GateSpec::x(PI / 2.0)], &[2]);
        assert_eq!(f.members[0].len(), 4);
        assert_eq!(f.m_values, Some(vec![2]));
    }

    #[test]
    #[should_panic]
    fn repetition_family_needs_increasing_m() {
        repetition_family(&[b()], &[3, 3]);
    }

    #[test]
    fn ideal_bit_flip_table() {
        let m = TwoQubitModel::new(NoiseParams::ideal()).unwrap();
        let t = prob_table(&Sequence::new("x", vec![b()]), &m).unwrap();
        // prepare |0> (i=0), flip, measure |1> directly (k=0)
        assert!((t.entries[(0, 0)] - 1.0).abs() < 1e-12);
        let empty = prob_table(&Sequence::empty(), &m).unwrap();
        assert!(empty.entries[(0, 0)].abs() < 1e-12);
        assert_eq!(empty.shots, Shots::Exact);
    }

    #[test]
    fn sampling_extremes_and_grid() {
        let t = ProbabilityTable::new(
            "t",
            DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 0.37]),
            Shots::Exact,
        );
        let s = sample_table(&t, 1000, 9);
        assert_eq!(s.entries[(0, 0)], 0.0);
        assert_eq!(s.entries[(0, 1)], 1.0);
        let scaled = s.entries[(0, 2)] * 1000.0;
        assert!((scaled - scaled.round()).abs() < 1e-9);
        assert_eq!(s.shots, Shots::Finite(1000));
        assert_eq!(sample_table(&t, 1000, 9), s);
    }

    #[test]
    fn csv_roundtrip_exact_bits() {
        let t = ProbabilityTable::new(
            "fig/perm0001",
            DMatrix::from_fn(4, 4, |k, i| (k as f64 + 0.1) / (i as f64 + 3.0)),
            Shots::Finite(12345),
        );
        let back = ProbabilityTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(ProbabilityTable::from_csv("# shots: exact\nk\\i,0\n0,abc\n").is_err());
        assert!(ProbabilityTable::from_csv("k\\i,0\n0,0.5\n").is_err());
        assert!(ProbabilityTable::from_csv("# shots: exact\nk\\i,0,1\n0,0.5\n").is_err());
    }
}
