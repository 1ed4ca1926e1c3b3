//! Two-qubit simulator: gates on qubit A leak into a persistent hidden qubit B
//! through an Ising coupling, on top of local Markovian decoherence.
//!
//! A noisy gate is `exp(J_G + k t_g V + k t_g D)` where `J_G` is the ideal
//! rotation generator on A, `V` the coupling generator, `D` the dissipator on
//! both qubits and `k` the duration multiplier. Composite operations are
//! always products of elementary noisy gates, and B is never reset.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ptm::{
    self, dissipator_generator, hamiltonian_generator, kron, pauli_matrix, qubit_projector,
    ComplexMatrix, DecoherenceRates, EffectVector, Generator, GeneratorKind, OperatorBasis,
    ProcessMatrix, StateVector,
};

/// Physical parameters of the two-qubit model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseParams {
    /// Relaxation rate, 1/s.
    pub gamma1: f64,
    /// Excitation rate, 1/s.
    pub gamma3: f64,
    /// Pure dephasing rate, 1/s.
    pub gamma_phi: f64,
    /// Ising coupling angular frequency `J`, rad/s.
    pub coupling: f64,
    /// Elementary gate duration `t_g`, s.
    pub gate_time: f64,
    /// Ground-state weight of each qubit's initial thermal mixture.
    pub p: f64,
    /// Detection efficiency of the `|1>` measurement on A.
    pub eta: f64,
}

impl NoiseParams {
    /// The reference working point: `p = 0.92`, `η = 0.95`, `1/γ1 = 60 µs`,
    /// `γφ = γ1/2`, `t_g = 20 ns`, and `γ3 = γ1 (1-p)/p` so the initial
    /// state is stationary under decoherence. No coupling.
    pub fn reference() -> Self {
        let p = 0.92;
        let gamma1 = 1.0 / 60e-6;
        Self {
            gamma1,
            gamma3: gamma1 * (1.0 - p) / p,
            gamma_phi: gamma1 / 2.0,
            coupling: 0.0,
            gate_time: 20e-9,
            p,
            eta: 0.95,
        }
    }

    /// Noise-free, perfectly prepared and measured limit.
    pub fn ideal() -> Self {
        Self {
            gamma1: 0.0,
            gamma3: 0.0,
            gamma_phi: 0.0,
            coupling: 0.0,
            gate_time: 20e-9,
            p: 1.0,
            eta: 1.0,
        }
    }

    /// Sets the coupling so that `J t_g = phi`.
    pub fn with_phi(mut self, phi: f64) -> Self {
        self.coupling = phi / self.gate_time;
        self
    }

    /// Dimensionless coupling per gate, `J t_g`.
    pub fn phi(&self) -> f64 {
        self.coupling * self.gate_time
    }

    pub fn rates(&self) -> DecoherenceRates {
        DecoherenceRates {
            gamma1: self.gamma1,
            gamma3: self.gamma3,
            gamma_phi: self.gamma_phi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rates().validate()?;
        if !self.coupling.is_finite() {
            return Err(invalid("coupling", "must be finite"));
        }
        if !(self.gate_time > 0.0 && self.gate_time.is_finite()) {
            return Err(invalid("gate_time", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(invalid("p", "must lie in [0, 1]"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.to_string(),
    }
}

/// Ideal action of a gate on qubit A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "angle", rename_all = "snake_case")]
pub enum GateLabel {
    Idle,
    /// Rotation about x by the given angle (rad).
    X(f64),
    /// Rotation about y by the given angle (rad).
    Y(f64),
}

/// A gate instruction on qubit A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateSpec {
    pub label: GateLabel,
    pub duration_multiplier: u32,
}

impl GateSpec {
    pub const fn new(label: GateLabel) -> Self {
        Self {
            label,
            duration_multiplier: 1,
        }
    }

    pub const fn idle() -> Self {
        Self::new(GateLabel::Idle)
    }

    pub const fn x(angle: f64) -> Self {
        Self::new(GateLabel::X(angle))
    }

    pub const fn y(angle: f64) -> Self {
        Self::new(GateLabel::Y(angle))
    }

    pub fn with_duration(mut self, multiplier: u32) -> Self {
        assert!(multiplier >= 1);
        self.duration_multiplier = multiplier;
        self
    }

    /// Hashable identity of the gate (angles compared bitwise).
    pub fn key(&self) -> GateKey {
        let (tag, angle) = match self.label {
            GateLabel::Idle => (0u8, 0u64),
            GateLabel::X(a) => (1, a.to_bits()),
            GateLabel::Y(a) => (2, a.to_bits()),
        };
        GateKey(tag, angle, self.duration_multiplier)
    }

    /// Ideal single-qubit unitary.
    pub fn unitary(&self) -> ComplexMatrix {
        let (axis, angle) = match self.label {
            GateLabel::Idle => return ComplexMatrix::identity(2, 2),
            GateLabel::X(a) => (1, a),
            GateLabel::Y(a) => (2, a),
        };
        let c = Complex64::new((angle / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(angle / 2.0).sin());
        ComplexMatrix::identity(2, 2) * c + pauli_matrix(axis) * s
    }

    /// Rotation Hamiltonian `(θ/2) σ` whose unit-time evolution is the gate.
    fn rotation_hamiltonian(&self) -> Option<ComplexMatrix> {
        let (axis, angle) = match self.label {
            GateLabel::Idle => return None,
            GateLabel::X(a) => (1, a),
            GateLabel::Y(a) => (2, a),
        };
        Some(pauli_matrix(axis) * Complex64::new(angle / 2.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateKey(u8, u64, u32);

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = |a: f64| {
            let d = a.to_degrees();
            if (d - d.round()).abs() < 1e-9 {
                format!("{}", d.round() as i64)
            } else {
                format!("{d}")
            }
        };
        match self.label {
            GateLabel::Idle => write!(f, "I")?,
            GateLabel::X(a) => write!(f, "X{}", deg(a))?,
            GateLabel::Y(a) => write!(f, "Y{}", deg(a))?,
        }
        if self.duration_multiplier != 1 {
            write!(f, "@{}", self.duration_multiplier)?;
        }
        Ok(())
    }
}

impl FromStr for GateSpec {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form: `I`, `X<deg>`, `Y<deg>`,
    /// each optionally followed by `@<multiplier>`.
    fn from_str(token: &str) -> Result<Self> {
        let fail = |reason: &str| Error::GateSyntax {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let (body, multiplier) = match token.split_once('@') {
            Some((b, m)) => {
                let m: u32 = m.parse().map_err(|_| fail("duration multiplier must be a positive integer"))?;
                if m == 0 {
                    return Err(fail("duration multiplier must be a positive integer"));
                }
                (b, m)
            }
            None => (token, 1),
        };
        let mut chars = body.chars();
        let head = chars.next().ok_or_else(|| fail("empty gate"))?;
        let rest = chars.as_str();
        let angle = || -> Result<f64> {
            let deg: f64 = rest.parse().map_err(|_| fail("expected an angle in degrees after the axis"))?;
            if !deg.is_finite() {
                return Err(fail("angle must be finite"));
            }
            // exact for multiples of 45 degrees, so keys match the cached gates
            Ok(deg / 180.0 * PI)
        };
        let gate = match head {
            'I' if rest.is_empty() => GateSpec::idle(),
            'I' => return Err(fail("idle takes no angle")),
            'X' => GateSpec::x(angle()?),
            'Y' => GateSpec::y(angle()?),
            _ => return Err(fail("gate must start with I, X or Y")),
        };
        Ok(gate.with_duration(multiplier))
    }
}

/// The in/out gate set `{I, X_π, Y_-π/2, X_-π/2}` used for preparations and
/// measurement rotations.
pub const SPAM_GATES: [GateSpec; 4] = [
    GateSpec::idle(),
    GateSpec::x(PI),
    GateSpec::y(-PI / 2.0),
    GateSpec::x(-PI / 2.0),
];

/// Generator of `ρ ↦ -i[(J/2) Z⊗Z, ρ]` on a two-qubit basis.
pub fn ising_generator(coupling: f64, basis: &OperatorBasis) -> Result<Generator> {
    assert_eq!(basis.num_qubits(), 2);
    let zz = kron(&pauli_matrix(3), &pauli_matrix(3)) * Complex64::new(coupling / 2.0, 0.0);
    let g = hamiltonian_generator(&zz, basis)?;
    Ok(Generator::new(
        basis.dim(),
        g.matrix().clone(),
        GeneratorKind::Coupling,
    ))
}

/// Ideal-gate generator on A tensored with identity on B (zero for idle).
pub fn gate_generator(gate: &GateSpec, basis: &OperatorBasis) -> Result<Generator> {
    match gate.rotation_hamiltonian() {
        None => Ok(Generator::zero(basis.dim(), GeneratorKind::Hamiltonian)),
        Some(h) => {
            let h = ptm::embed(&h, 0, basis.num_qubits());
            hamiltonian_generator(&h, basis)
        }
    }
}

/// Sum of the coupling and dissipator generators per unit time, shared by all
/// gates of a model.
fn background_generator(params: &NoiseParams, basis: &OperatorBasis) -> Result<Generator> {
    let v = ising_generator(params.coupling, basis)?;
    let rates = vec![params.rates(); basis.num_qubits()];
    let d = dissipator_generator(&rates, basis)?;
    Ok(v.plus(&d))
}

fn noisy_gate_with(gate: &GateSpec, params: &NoiseParams, background: &Generator, basis: &OperatorBasis) -> Result<ProcessMatrix> {
    let duration = params.gate_time * gate.duration_multiplier as f64;
    let total = gate_generator(gate, basis)?.plus(&background.scaled(duration));
    Ok(total.exp())
}

/// 16x16 PTM of a noisy gate on the two-qubit register.
pub fn noisy_gate(gate: &GateSpec, params: &NoiseParams, basis: &OperatorBasis) -> Result<ProcessMatrix> {
    params.validate()?;
    let background = background_generator(params, basis)?;
    noisy_gate_with(gate, params, &background, basis)
}

/// `(p|0><0| + (1-p)|1><1|)` on one qubit.
pub fn thermal_qubit(p: f64) -> ComplexMatrix {
    qubit_projector(0) * Complex64::new(p, 0.0) + qubit_projector(1) * Complex64::new(1.0 - p, 0.0)
}

/// Vectorized initial state: the thermal mixture on both qubits.
pub fn initial_state(params: &NoiseParams, basis: &OperatorBasis) -> StateVector {
    let q = thermal_qubit(params.p);
    StateVector::from_density(&kron(&q, &q), basis)
}

/// Fixed measured effect `η |1><1| ⊗ I_B`.
pub fn measured_effect(params: &NoiseParams, basis: &OperatorBasis) -> EffectVector {
    let m = kron(
        &(qubit_projector(1) * Complex64::new(params.eta, 0.0)),
        &ComplexMatrix::identity(2, 2),
    );
    EffectVector::from_operator(&m, basis)
}

/// Gates cached by [`TwoQubitModel::new`] beyond the SPAM set.
pub fn standard_gates() -> Vec<GateSpec> {
    vec![
        GateSpec::idle(),
        GateSpec::x(PI),
        GateSpec::y(PI),
        GateSpec::x(PI / 2.0),
        GateSpec::x(-PI / 2.0),
        GateSpec::y(PI / 2.0),
        GateSpec::y(-PI / 2.0),
    ]
}

/// A built simulator: cached noisy gates plus prepared states and effects.
#[derive(Debug, Clone)]
pub struct TwoQubitModel {
    params: NoiseParams,
    basis: OperatorBasis,
    background: Generator,
    gates: HashMap<GateKey, ProcessMatrix>,
    rho0: StateVector,
    spam_in: Vec<StateVector>,
    spam_out: Vec<EffectVector>,
    /// Columns are `spam_in`.
    prep_matrix: DMatrix<f64>,
    /// Rows are `spam_out`.
    meas_matrix: DMatrix<f64>,
}

impl TwoQubitModel {
    pub fn new(params: NoiseParams) -> Result<Self> {
        params.validate()?;
        let basis = OperatorBasis::pauli(2);
        let background = background_generator(&params, &basis)?;
        let mut gates = HashMap::new();
        for g in SPAM_GATES.iter().chain(standard_gates().iter()) {
            gates
                .entry(g.key())
                .or_insert(noisy_gate_with(g, &params, &background, &basis)?);
        }
        let rho0 = initial_state(&params, &basis);
        let m0 = measured_effect(&params, &basis);
        let spam_in: Vec<StateVector> = SPAM_GATES
            .iter()
            .map(|g| gates[&g.key()].apply(&rho0))
            .collect();
        let spam_out: Vec<EffectVector> = SPAM_GATES
            .iter()
            .map(|g| gates[&g.key()].pull_back(&m0))
            .collect();
        let mut model = Self {
            params,
            basis,
            background,
            gates,
            rho0,
            spam_in,
            spam_out,
            prep_matrix: DMatrix::zeros(0, 0),
            meas_matrix: DMatrix::zeros(0, 0),
        };
        model.rebuild_spam_matrices();
        Ok(model)
    }

    fn rebuild_spam_matrices(&mut self) {
        let cols: Vec<DVector<f64>> = self.spam_in.iter().map(|s| s.coords().clone()).collect();
        self.prep_matrix = DMatrix::from_columns(&cols);
        let rows: Vec<_> = self
            .spam_out
            .iter()
            .map(|e| e.coords().transpose())
            .collect();
        self.meas_matrix = DMatrix::from_rows(&rows);
    }

    /// Adds further gates to the cache.
    pub fn with_gates<I: IntoIterator<Item = GateSpec>>(mut self, gates: I) -> Result<Self> {
        for g in gates {
            if !self.gates.contains_key(&g.key()) {
                let pm = noisy_gate_with(&g, &self.params, &self.background, &self.basis)?;
                self.gates.insert(g.key(), pm);
            }
        }
        Ok(self)
    }

    /// Mixes preparations and measurement settings by fixed invertible
    /// matrices: `spam_in'[i] = Σ_j e_in[j,i] spam_in[j]` and likewise for
    /// the effects, so tables transform as `P ↦ e_out^T P e_in`.
    pub fn with_spam_distortion(mut self, e_in: &DMatrix<f64>, e_out: &DMatrix<f64>) -> Self {
        let n = self.spam_in.len();
        assert_eq!(e_in.shape(), (n, n));
        assert_eq!(e_out.shape(), (n, n));
        let prep = &self.prep_matrix * e_in;
        let meas = e_out.transpose() * &self.meas_matrix;
        self.spam_in = (0..n)
            .map(|i| StateVector::from_coords(4, prep.column(i).into_owned()))
            .collect();
        self.spam_out = (0..n)
            .map(|k| EffectVector::from_coords(4, meas.row(k).transpose()))
            .collect();
        self.rebuild_spam_matrices();
        self
    }

    pub fn params(&self) -> &NoiseParams {
        &self.params
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn gate(&self, g: &GateSpec) -> Result<&ProcessMatrix> {
        self.gates
            .get(&g.key())
            .ok_or_else(|| Error::UnknownGate(g.to_string()))
    }

    pub fn rho0(&self) -> &StateVector {
        &self.rho0
    }

    pub fn spam_in(&self) -> &[StateVector] {
        &self.spam_in
    }

    pub fn spam_out(&self) -> &[EffectVector] {
        &self.spam_out
    }

    /// 16x4 matrix whose columns are the prepared states.
    pub fn preparation_matrix(&self) -> &DMatrix<f64> {
        &self.prep_matrix
    }

    /// 4x16 matrix whose rows are the measurement effects.
    pub fn measurement_matrix(&self) -> &DMatrix<f64> {
        &self.meas_matrix
    }
}

/// Convenience wrapper.
pub fn build_model(params: NoiseParams) -> Result<TwoQubitModel> {
    TwoQubitModel::new(params)
}
