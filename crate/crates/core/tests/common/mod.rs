//! Brute-force reference implementations for cross-checking the library.
//!
//! Everything here works on plain row-major complex arrays and shares no code
//! with the crate: Paulis are written out by hand, channels act through Kraus
//! operators, and Lindblad dynamics is integrated with fixed-step RK4.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub d: usize,
    pub a: Vec<C>,
}

impl Op {
    pub fn zeros(d: usize) -> Self {
        Self { d, a: vec![ZERO; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = ONE;
        }
        m
    }

    pub fn from_rows(d: usize, rows: &[C]) -> Self {
        assert_eq!(rows.len(), d * d);
        Self { d, a: rows.to_vec() }
    }

    pub fn at(&self, r: usize, c: usize) -> C {
        self.a[r * self.d + c]
    }

    pub fn mul(&self, o: &Op) -> Op {
        let d = self.d;
        let mut out = Op::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let x = self.a[r * d + k];
                if x == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.a[r * d + c] += x * o.a[k * d + c];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Op) -> Op {
        Op {
            d: self.d,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Op) -> Op {
        Op {
            d: self.d,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, s: C) -> Op {
        Op {
            d: self.d,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn dagger(&self) -> Op {
        let d = self.d;
        let mut out = Op::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.a[c * d + r] = self.a[r * d + c].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C {
        (0..self.d).map(|i| self.a[i * self.d + i]).sum()
    }

    pub fn kron(&self, o: &Op) -> Op {
        let d = self.d * o.d;
        let mut out = Op::zeros(d);
        for r1 in 0..self.d {
            for c1 in 0..self.d {
                let x = self.at(r1, c1);
                for r2 in 0..o.d {
                    for c2 in 0..o.d {
                        out.a[(r1 * o.d + r2) * d + c1 * o.d + c2] = x * o.at(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

pub fn pauli_i() -> Op {
    Op::from_rows(2, &[ONE, ZERO, ZERO, ONE])
}
pub fn pauli_x() -> Op {
    Op::from_rows(2, &[ZERO, ONE, ONE, ZERO])
}
pub fn pauli_y() -> Op {
    Op::from_rows(2, &[ZERO, -I, I, ZERO])
}
pub fn pauli_z() -> Op {
    Op::from_rows(2, &[ONE, ZERO, ZERO, -ONE])
}

/// `|0><1|`: takes `|1>` to `|0>`.
pub fn lowering() -> Op {
    Op::from_rows(2, &[ZERO, ONE, ZERO, ZERO])
}

pub fn raising() -> Op {
    lowering().dagger()
}

/// `|b><b|` on one qubit.
pub fn ket_bra(b: usize) -> Op {
    let mut m = Op::zeros(2);
    m.a[b * 2 + b] = ONE;
    m
}

/// Pauli strings ordered with the first qubit as the most significant digit.
pub fn pauli_basis(num_qubits: usize) -> Vec<Op> {
    let singles = [pauli_i(), pauli_x(), pauli_y(), pauli_z()];
    let mut basis = vec![Op::identity(1)];
    for _ in 0..num_qubits {
        basis = basis
            .iter()
            .flat_map(|b| singles.iter().map(move |s| b.kron(s)))
            .collect();
    }
    basis
}

/// `op` on qubit `q` of two.
pub fn on_qubit(op: &Op, q: usize) -> Op {
    if q == 0 {
        op.kron(&pauli_i())
    } else {
        pauli_i().kron(op)
    }
}

/// Transfer matrix of a linear map, `S_nm = Re Tr(P_n S(P_m)) / d`.
pub fn ptm<F: Fn(&Op) -> Op>(map: F, num_qubits: usize) -> DMatrix<f64> {
    let basis = pauli_basis(num_qubits);
    let d = (1usize << num_qubits) as f64;
    let n = basis.len();
    let images: Vec<Op> = basis.iter().map(&map).collect();
    DMatrix::from_fn(n, n, |r, c| basis[r].mul(&images[c]).trace().re / d)
}

/// Real coordinates `Tr(P_n ρ)` of a Hermitian operator.
pub fn coords(rho: &Op) -> Vec<f64> {
    let nq = rho.d.trailing_zeros() as usize;
    pauli_basis(nq).iter().map(|p| p.mul(rho).trace().re).collect()
}

#[derive(Debug, Clone)]
pub struct Kraus(pub Vec<Op>);

impl Kraus {
    pub fn apply(&self, rho: &Op) -> Op {
        self.0
            .iter()
            .fold(Op::zeros(rho.d), |acc, k| acc.add(&k.mul(rho).mul(&k.dagger())))
    }

    /// `Σ K†K`, equal to the identity for a trace-preserving channel.
    pub fn completeness(&self) -> Op {
        let d = self.0[0].d;
        self.0
            .iter()
            .fold(Op::zeros(d), |acc, k| acc.add(&k.dagger().mul(k)))
    }

    pub fn then(&self, later: &Kraus) -> Kraus {
        let mut out = Vec::new();
        for b in &later.0 {
            for a in &self.0 {
                out.push(b.mul(a));
            }
        }
        Kraus(out)
    }

    pub fn ptm(&self) -> DMatrix<f64> {
        let nq = self.0[0].d.trailing_zeros() as usize;
        ptm(|x| self.apply(x), nq)
    }
}

pub fn amplitude_damping(g: f64) -> Kraus {
    let s = C::new((1.0 - g).sqrt(), 0.0);
    let r = C::new(g.sqrt(), 0.0);
    Kraus(vec![
        Op::from_rows(2, &[ONE, ZERO, ZERO, s]),
        Op::from_rows(2, &[ZERO, r, ZERO, ZERO]),
    ])
}

pub fn unitary_channel(u: Op) -> Kraus {
    Kraus(vec![u])
}

fn gaussian_c<R: Rng>(rng: &mut R) -> C {
    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random channel from a Haar-like isometry `V: C^d -> C^(rank d)`, built by
/// Gram-Schmidt on a complex Gaussian matrix.
pub fn random_kraus<R: Rng>(d: usize, rank: usize, rng: &mut R) -> Kraus {
    let rows = d * rank;
    let mut cols: Vec<Vec<C>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut v: Vec<C> = (0..rows).map(|_| gaussian_c(rng)).collect();
        for u in &cols {
            let proj: C = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    let ops = (0..rank)
        .map(|j| {
            let mut k = Op::zeros(d);
            for r in 0..d {
                for c in 0..d {
                    k.a[r * d + c] = cols[c][j * d + r];
                }
            }
            k
        })
        .collect();
    Kraus(ops)
}

pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> Op {
    random_kraus(d, 1, rng).0.remove(0)
}

/// Random density matrix of full rank.
pub fn random_density<R: Rng>(d: usize, rng: &mut R) -> Op {
    let mut g = Op::zeros(d);
    for x in g.a.iter_mut() {
        *x = gaussian_c(rng);
    }
    let rho = g.mul(&g.dagger());
    let t = rho.trace();
    rho.scale(ONE / t)
}

/// Measure-and-prepare channel `ρ ↦ Tr(Πρ) σ0 + Tr((1-Π)ρ) σ1` for a
/// projector `Π`.
pub fn measure_prepare(pi: &Op, sigma0: &Op, sigma1: &Op) -> impl Fn(&Op) -> Op {
    let pi = pi.clone();
    let (s0, s1) = (sigma0.clone(), sigma1.clone());
    move |rho: &Op| {
        let t = rho.trace();
        let a = pi.mul(rho).trace();
        s0.scale(a).add(&s1.scale(t - a))
    }
}

/// Time-independent Lindblad equation with explicit jump operators.
#[derive(Debug, Clone)]
pub struct Lindblad {
    pub h: Op,
    /// `(L, rate)` pairs for `rate (L ρ L† - {L†L, ρ}/2)`.
    pub jumps: Vec<(Op, f64)>,
}

impl Lindblad {
    pub fn rhs(&self, rho: &Op) -> Op {
        let comm = self.h.mul(rho).sub(&rho.mul(&self.h));
        let mut out = comm.scale(-I);
        for (l, rate) in &self.jumps {
            let ld = l.dagger();
            let ldl = ld.mul(l);
            let term = l
                .mul(rho)
                .mul(&ld)
                .sub(&ldl.mul(rho).add(&rho.mul(&ldl)).scale(C::new(0.5, 0.0)));
            out = out.add(&term.scale(C::new(*rate, 0.0)));
        }
        out
    }

    /// Classical RK4 from 0 to `t` in `steps` equal steps.
    pub fn evolve(&self, rho: &Op, t: f64, steps: usize) -> Op {
        let h = t / steps as f64;
        let half = C::new(h / 2.0, 0.0);
        let full = C::new(h, 0.0);
        let mut x = rho.clone();
        for _ in 0..steps {
            let k1 = self.rhs(&x);
            let k2 = self.rhs(&x.add(&k1.scale(half)));
            let k3 = self.rhs(&x.add(&k2.scale(half)));
            let k4 = self.rhs(&x.add(&k3.scale(full)));
            let incr = k1
                .add(&k2.scale(C::new(2.0, 0.0)))
                .add(&k3.scale(C::new(2.0, 0.0)))
                .add(&k4);
            x = x.add(&incr.scale(C::new(h / 6.0, 0.0)));
        }
        x
    }

    /// Generator in transfer-matrix coordinates, read off from `rhs`.
    pub fn liouvillian(&self) -> DMatrix<f64> {
        let nq = self.h.d.trailing_zeros() as usize;
        ptm(|x| self.rhs(x), nq)
    }

    /// Transfer matrix of the evolution over `t`. For a linear autonomous
    /// equation one RK4 step is the degree-4 Taylor polynomial of `exp(hL)`,
    /// so the step is formed once and applied `steps` times; this equals
    /// running [`evolve`](Self::evolve) on every basis element.
    pub fn ptm(&self, t: f64, steps: usize) -> DMatrix<f64> {
        let hl = self.liouvillian() * (t / steps as f64);
        let n = hl.nrows();
        let mut step = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..=4 {
            term = &term * &hl / k as f64;
            step += &term;
        }
        let mut x = DMatrix::identity(n, n);
        for _ in 0..steps {
            x = &step * x;
        }
        x
    }
}

/// Local relaxation, excitation and dephasing on one qubit of two.
/// Dephasing is written as a `|1><1|` jump at rate `2 γφ`, which damps
/// coherences at `γφ`.
pub fn local_jumps(q: usize, gamma1: f64, gamma3: f64, gamma_phi: f64) -> Vec<(Op, f64)> {
    vec![
        (on_qubit(&lowering(), q), gamma1),
        (on_qubit(&raising(), q), gamma3),
        (on_qubit(&ket_bra(1), q), 2.0 * gamma_phi),
    ]
}

/// Full two-qubit dynamics of one gate: a constant drive on A that rotates by
/// `angle` about `axis` over `duration`, the `(J/2) Z⊗Z` coupling, and the
/// same decoherence on both qubits.
pub fn gate_lindblad(
    axis: Option<&Op>,
    angle: f64,
    duration: f64,
    coupling: f64,
    rates: (f64, f64, f64),
) -> Lindblad {
    let mut h = pauli_z().kron(&pauli_z()).scale(C::new(coupling / 2.0, 0.0));
    if let Some(sigma) = axis {
        h = h.add(&on_qubit(sigma, 0).scale(C::new(angle / (2.0 * duration), 0.0)));
    }
    let mut jumps = local_jumps(0, rates.0, rates.1, rates.2);
    jumps.extend(local_jumps(1, rates.0, rates.1, rates.2));
    Lindblad { h, jumps }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).amax()
}

pub fn to_nalgebra(op: &Op) -> DMatrix<C> {
    DMatrix::from_row_slice(op.d, op.d, &op.a)
}

pub fn from_nalgebra(m: &DMatrix<C>) -> Op {
    assert!(m.is_square());
    let d = m.nrows();
    Op {
        d,
        a: (0..d * d).map(|i| m[(i / d, i % d)]).collect(),
    }
}
