//! Pauli transfer matrices: operator bases, process matrices, Lindblad
//! generators and vectorized states/effects.
//!
//! Every real vector or matrix in this crate is expressed in the Pauli-string
//! basis returned by [`OperatorBasis::pauli`]: strings are ordered
//! lexicographically over `I, X, Y, Z` with the first qubit as the most
//! significant digit, so index 0 is always the identity. For two qubits the
//! first factor is qubit A (the measured one) and the second is qubit B.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, RealMatrix};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest imaginary residue tolerated when reading off a real PTM entry.
pub const IMAG_TOLERANCE: f64 = 1e-9;

/// Hermiticity tolerance for Hamiltonians.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli matrices in the order `I, X, Y, Z`.
pub fn pauli_matrix(index: usize) -> ComplexMatrix {
    let e = match index {
        0 => [C1, C0, C0, C1],
        1 => [C0, C1, C1, C0],
        2 => [C0, -CI, CI, C0],
        3 => [C1, C0, C0, -C1],
        _ => panic!("Pauli index {index} out of range"),
    };
    ComplexMatrix::from_row_slice(2, 2, &e)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `|b><b|` for a computational basis state `b` of a single qubit.
pub fn qubit_projector(bit: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(bit, bit)] = C1;
    m
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = C0;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Orthogonal Hermitian operator basis with `Tr(P_n P_m) = d δ_nm`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    num_qubits: usize,
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    /// Tensor-product Pauli strings on `num_qubits` qubits, identity first.
    pub fn pauli(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "a Pauli basis needs at least one qubit");
        assert!(num_qubits <= 6, "dense Pauli basis limited to 6 qubits");
        let dim = 1usize << num_qubits;
        let count = dim * dim;
        let singles: Vec<ComplexMatrix> = (0..4).map(pauli_matrix).collect();
        let elements = (0..count)
            .map(|idx| {
                let digits = pauli_digits(idx, num_qubits);
                digits
                    .iter()
                    .skip(1)
                    .fold(singles[digits[0]].clone(), |acc, &d| kron(&acc, &singles[d]))
            })
            .collect();
        Self {
            num_qubits,
            dim,
            elements,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `d^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, n: usize) -> &ComplexMatrix {
        &self.elements[n]
    }

    /// Pauli string of element `n`, e.g. `"XZ"`.
    pub fn label(&self, n: usize) -> String {
        pauli_digits(n, self.num_qubits)
            .into_iter()
            .map(|d| ['I', 'X', 'Y', 'Z'][d])
            .collect()
    }

    /// Complex coordinates `x_m = Tr(P_m X) / d` of an arbitrary operator,
    /// so that `X = Σ x_m P_m`.
    pub fn expand(&self, op: &ComplexMatrix) -> Vec<Complex64> {
        let d = self.dim as f64;
        self.elements
            .iter()
            .map(|p| trace_product(p, op) / d)
            .collect()
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn assemble(&self, coords: &[Complex64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.len());
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (c, p) in coords.iter().zip(&self.elements) {
            if *c != C0 {
                out += p * *c;
            }
        }
        out
    }

    /// `Tr(P_n X)/sqrt(d)` for every `n`; discards imaginary parts.
    fn real_coords(&self, op: &ComplexMatrix) -> DVector<f64> {
        let s = (self.dim as f64).sqrt();
        DVector::from_iterator(
            self.len(),
            self.elements.iter().map(|p| trace_product(p, op).re / s),
        )
    }
}

/// Base-4 digits of a Pauli string index, most significant (first qubit) first.
fn pauli_digits(mut idx: usize, num_qubits: usize) -> Vec<usize> {
    let mut digits = vec![0; num_qubits];
    for q in (0..num_qubits).rev() {
        digits[q] = idx % 4;
        idx /= 4;
    }
    digits
}

/// Real `d^2 x d^2` transfer matrix of a linear map on density operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    dim: usize,
    entries: RealMatrix,
}

impl ProcessMatrix {
    pub fn new(dim: usize, entries: RealMatrix) -> Self {
        assert_eq!(entries.nrows(), dim * dim);
        assert!(entries.is_square());
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, RealMatrix::identity(dim * dim, dim * dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.entries
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &ProcessMatrix) -> ProcessMatrix {
        assert_eq!(self.dim, first.dim);
        ProcessMatrix::new(self.dim, &self.entries * &first.entries)
    }

    pub fn log_abs_det(&self) -> f64 {
        linalg::log_abs_det(&self.entries)
    }

    /// Largest deviation of the first row from `(1, 0, ..., 0)`.
    pub fn trace_preservation_error(&self) -> f64 {
        self.entries
            .row(0)
            .iter()
            .enumerate()
            .map(|(j, &v)| if j == 0 { (v - 1.0).abs() } else { v.abs() })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        StateVector {
            dim: self.dim,
            coords: &self.entries * &state.coords,
        }
    }

    /// Heisenberg-picture action on an effect: `E ↦ S^T E`.
    pub fn pull_back(&self, effect: &EffectVector) -> EffectVector {
        EffectVector {
            dim: self.dim,
            coords: self.entries.tr_mul(&effect.coords),
        }
    }

    /// Applies the map to an arbitrary (possibly non-Hermitian) operator.
    pub fn apply_operator(&self, op: &ComplexMatrix, basis: &OperatorBasis) -> ComplexMatrix {
        assert_eq!(basis.dim(), self.dim);
        let x = basis.expand(op);
        let n = basis.len();
        let y: Vec<Complex64> = (0..n)
            .map(|row| {
                (0..n)
                    .map(|col| x[col] * self.entries[(row, col)])
                    .sum::<Complex64>()
            })
            .collect();
        basis.assemble(&y)
    }

    /// Choi matrix `Σ_ij |i><j| ⊗ S(|i><j|)`.
    pub fn choi_matrix(&self, basis: &OperatorBasis) -> ComplexMatrix {
        let d = self.dim;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = ComplexMatrix::zeros(d, d);
                unit[(i, j)] = C1;
                let image = self.apply_operator(&unit, basis);
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
            }
        }
        choi
    }

    /// Smallest eigenvalue of the (Hermitian part of the) Choi matrix.
    pub fn min_choi_eigenvalue(&self, basis: &OperatorBasis) -> f64 {
        let choi = self.choi_matrix(basis);
        let herm = (&choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Which physical mechanism a generator represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Hamiltonian,
    Dissipator,
    Coupling,
    Sum,
}

/// Real `d^2 x d^2` matrix of an infinitesimal superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    dim: usize,
    entries: RealMatrix,
    kind: GeneratorKind,
}

impl Generator {
    pub fn new(dim: usize, entries: RealMatrix, kind: GeneratorKind) -> Self {
        assert_eq!(entries.nrows(), dim * dim);
        assert!(entries.is_square());
        Self { dim, entries, kind }
    }

    pub fn zero(dim: usize, kind: GeneratorKind) -> Self {
        let n = dim * dim;
        Self::new(dim, RealMatrix::zeros(n, n), kind)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn scaled(&self, factor: f64) -> Generator {
        Generator::new(self.dim, &self.entries * factor, self.kind)
    }

    pub fn plus(&self, other: &Generator) -> Generator {
        assert_eq!(self.dim, other.dim);
        let kind = if self.kind == other.kind {
            self.kind
        } else {
            GeneratorKind::Sum
        };
        Generator::new(self.dim, &self.entries + &other.entries, kind)
    }

    /// `exp(self)`.
    pub fn exp(&self) -> ProcessMatrix {
        ProcessMatrix::new(self.dim, linalg::expm(&self.entries))
    }

    /// `exp(t * self)`.
    pub fn exp_scaled(&self, t: f64) -> ProcessMatrix {
        ProcessMatrix::new(self.dim, linalg::expm(&(&self.entries * t)))
    }
}

/// Vectorized density operator, coordinates `Tr(P_m ρ)/sqrt(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: usize,
    coords: DVector<f64>,
}

impl StateVector {
    pub fn from_density(rho: &ComplexMatrix, basis: &OperatorBasis) -> Self {
        Self {
            dim: basis.dim(),
            coords: basis.real_coords(rho),
        }
    }

    pub fn from_coords(dim: usize, coords: DVector<f64>) -> Self {
        assert_eq!(coords.len(), dim * dim);
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Reconstructs the density operator.
    pub fn to_density(&self, basis: &OperatorBasis) -> ComplexMatrix {
        let s = (self.dim as f64).sqrt();
        let c: Vec<Complex64> = self
            .coords
            .iter()
            .map(|&x| Complex64::new(x / s, 0.0))
            .collect();
        basis.assemble(&c)
    }
}

/// Vectorized POVM effect, coordinates `Tr(P_n Π)/sqrt(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectVector {
    dim: usize,
    coords: DVector<f64>,
}

impl EffectVector {
    pub fn from_operator(effect: &ComplexMatrix, basis: &OperatorBasis) -> Self {
        Self {
            dim: basis.dim(),
            coords: basis.real_coords(effect),
        }
    }

    pub fn from_coords(dim: usize, coords: DVector<f64>) -> Self {
        assert_eq!(coords.len(), dim * dim);
        Self { dim, coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// `Tr(Π ρ)`.
    pub fn probability(&self, state: &StateVector) -> f64 {
        self.coords.dot(&state.coords)
    }
}

/// PTM of a black-box linear map: `S_nm = Tr[P_n S(P_m)] / d`.
pub fn ptm_of_map<F>(apply: F, basis: &OperatorBasis) -> Result<ProcessMatrix>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let n = basis.len();
    let d = basis.dim() as f64;
    let mut entries = RealMatrix::zeros(n, n);
    for (col, pm) in basis.elements().iter().enumerate() {
        let image = apply(pm);
        for (row, pn) in basis.elements().iter().enumerate() {
            let v = trace_product(pn, &image) / d;
            if v.im.abs() > IMAG_TOLERANCE {
                return Err(Error::NonRealEntry {
                    row,
                    col,
                    imag: v.im,
                });
            }
            entries[(row, col)] = v.re;
        }
    }
    Ok(ProcessMatrix::new(basis.dim(), entries))
}

/// Generator of `ρ ↦ -i[H, ρ]`.
pub fn hamiltonian_generator(h: &ComplexMatrix, basis: &OperatorBasis) -> Result<Generator> {
    assert_eq!(h.nrows(), basis.dim());
    let dev = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitianInput(dev));
    }
    let pm = ptm_of_map(|rho| commutator(h, rho) * (-CI), basis)?;
    Ok(Generator::new(
        basis.dim(),
        pm.into_matrix(),
        GeneratorKind::Hamiltonian,
    ))
}

/// Per-qubit Markovian decoherence rates, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DecoherenceRates {
    /// Energy relaxation `|1> -> |0>`.
    pub gamma1: f64,
    /// Thermal excitation `|0> -> |1>`.
    pub gamma3: f64,
    /// Pure dephasing; transverse Bloch components decay at this rate.
    pub gamma_phi: f64,
}

impl DecoherenceRates {
    pub fn total(&self) -> f64 {
        self.gamma1 + self.gamma3 + self.gamma_phi
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma1", self.gamma1),
            ("gamma3", self.gamma3),
            ("gamma_phi", self.gamma_phi),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeRate { name, value });
            }
        }
        Ok(())
    }

    /// Jump operators `(L_j, weight_j)` for a single qubit.
    fn jumps(&self) -> [(ComplexMatrix, f64); 3] {
        let lower = ComplexMatrix::from_row_slice(2, 2, &[C0, C1, C0, C0]);
        let raise = ComplexMatrix::from_row_slice(2, 2, &[C0, C0, C1, C0]);
        [
            (lower, self.gamma1),
            (raise, self.gamma3),
            // rate γφ/2 on Z gives transverse decay at γφ
            (pauli_matrix(3), self.gamma_phi / 2.0),
        ]
    }
}

/// Embeds a single-qubit operator on `qubit` of an `n`-qubit register.
pub fn embed(op: &ComplexMatrix, qubit: usize, num_qubits: usize) -> ComplexMatrix {
    assert!(qubit < num_qubits);
    let id = ComplexMatrix::identity(2, 2);
    let mut out = if qubit == 0 { op.clone() } else { id.clone() };
    for q in 1..num_qubits {
        out = kron(&out, if q == qubit { op } else { &id });
    }
    out
}

/// Sum of local Lindblad dissipators, one [`DecoherenceRates`] per qubit.
///
/// Normalized so that a single qubit contributes `-2(γ1 + γ3 + γφ)` to the
/// generator trace on its own 4x4 block.
pub fn dissipator_generator(rates: &[DecoherenceRates], basis: &OperatorBasis) -> Result<Generator> {
    let n = basis.num_qubits();
    assert_eq!(rates.len(), n, "need one rate triple per qubit");
    for r in rates {
        r.validate()?;
    }
    let mut jumps = Vec::new();
    for (q, r) in rates.iter().enumerate() {
        for (op, rate) in r.jumps() {
            if rate > 0.0 {
                jumps.push((embed(&op, q, n), rate));
            }
        }
    }
    let half = Complex64::new(0.5, 0.0);
    let pm = ptm_of_map(
        |rho| {
            let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
            for (l, rate) in &jumps {
                let ld = l.adjoint();
                let ldl = &ld * l;
                let term = l * rho * &ld - (&ldl * rho + rho * &ldl) * half;
                out += term * Complex64::new(*rate, 0.0);
            }
            out
        },
        basis,
    )?;
    Ok(Generator::new(
        basis.dim(),
        pm.into_matrix(),
        GeneratorKind::Dissipator,
    ))
}
