//! Operator algebra on the truncated space `CW ⊗ CCW ⊗ QD`.
//!
//! Basis states are `|n_cw, n_ccw, q⟩` with `q = 0` the ground state and
//! `q = 1` the excited state of the two-level system. The flat index is
//! `(n_cw · (n_max_ccw + 1) + n_ccw) · 2 + q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, Side};

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Which travelling-wave cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Cw,
    Ccw,
}

/// Truncated tensor-product space of two bosonic modes and one qubit.
///
/// The factor order (CW, CCW, QD) is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max_cw: usize,
    n_max_ccw: usize,
}

impl HilbertSpace {
    pub fn new(n_max_cw: usize, n_max_ccw: usize) -> Result<Self> {
        if n_max_cw == 0 || n_max_ccw == 0 {
            return Err(Error::invalid("n_max", "photon truncation must be at least 1"));
        }
        Ok(Self {
            n_max_cw,
            n_max_ccw,
        })
    }

    /// Same truncation for both modes.
    pub fn symmetric(n_max: usize) -> Result<Self> {
        Self::new(n_max, n_max)
    }

    pub fn n_max_cw(&self) -> usize {
        self.n_max_cw
    }

    pub fn n_max_ccw(&self) -> usize {
        self.n_max_ccw
    }

    pub fn n_max(&self, mode: Mode) -> usize {
        match mode {
            Mode::Cw => self.n_max_cw,
            Mode::Ccw => self.n_max_ccw,
        }
    }

    /// Total dimension `(n_max_cw + 1)(n_max_ccw + 1) · 2`.
    pub fn dim(&self) -> usize {
        (self.n_max_cw + 1) * (self.n_max_ccw + 1) * 2
    }

    pub fn index(&self, n_cw: usize, n_ccw: usize, excited: bool) -> usize {
        debug_assert!(n_cw <= self.n_max_cw && n_ccw <= self.n_max_ccw);
        (n_cw * (self.n_max_ccw + 1) + n_ccw) * 2 + usize::from(excited)
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn labels(&self, index: usize) -> (usize, usize, bool) {
        let q = index % 2;
        let rest = index / 2;
        (rest / (self.n_max_ccw + 1), rest % (self.n_max_ccw + 1), q == 1)
    }

    fn check(&self, other: &HilbertSpace) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Dense complex matrix acting on a [`HilbertSpace`], row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    data: Vec<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("space", &self.space)
            .field("nnz", &self.nonzeros().count())
            .finish()
    }
}

impl Operator {
    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            data: vec![ZERO; d * d],
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let mut op = Self::zeros(space);
        for i in 0..space.dim() {
            op.set(i, i, ONE);
        }
        op
    }

    /// Builds an operator from a row-major `d × d` array.
    pub fn from_row_major(space: HilbertSpace, data: Vec<C64>) -> Result<Self> {
        let d = space.dim();
        if data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: data.len(),
            });
        }
        Ok(Self { space, data })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        let d = self.dim();
        self.data[row * d + col] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let d = self.dim();
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != ZERO)
            .map(move |(k, v)| (k / d, k % d, *v))
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(self.space);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    /// Entrywise transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(self.space);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.space, other.space, "operator spaces differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A − A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut err = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                err = err.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        err
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(v.len(), d);
        (0..d)
            .map(|i| {
                self.data[i * d..(i + 1) * d]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = Mat::<C64>::from_fn(d, d, |i, j| {
            // symmetrize so rounding noise cannot leak into the lower triangle
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        });
        let mut ev = m
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("self-adjoint eigenvalue decomposition failed");
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        let d = self.dim();
        let mut out = Operator::zeros(self.space);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                let dst = &mut out.data[i * d..(i + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn add(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Photon annihilation operator for one travelling-wave mode, embedded as
/// `a ⊗ 1 ⊗ 1` (CW) or `1 ⊗ a ⊗ 1` (CCW).
pub fn annihilation(space: HilbertSpace, mode: Mode) -> Operator {
    let mut op = Operator::zeros(space);
    for col in 0..space.dim() {
        let (n_cw, n_ccw, q) = space.labels(col);
        let (n, row) = match mode {
            Mode::Cw if n_cw > 0 => (n_cw, space.index(n_cw - 1, n_ccw, q)),
            Mode::Ccw if n_ccw > 0 => (n_ccw, space.index(n_cw, n_ccw - 1, q)),
            _ => continue,
        };
        op.set(row, col, C64::new((n as f64).sqrt(), 0.0));
    }
    op
}

/// `a†a` for one mode.
pub fn number(space: HilbertSpace, mode: Mode) -> Operator {
    let mut op = Operator::zeros(space);
    for i in 0..space.dim() {
        let (n_cw, n_ccw, _) = space.labels(i);
        let n = match mode {
            Mode::Cw => n_cw,
            Mode::Ccw => n_ccw,
        };
        op.set(i, i, C64::new(n as f64, 0.0));
    }
    op
}

/// QD lowering operator `1 ⊗ 1 ⊗ σ₋` with `σ₋ = |g⟩⟨e|`.
pub fn qd_lowering(space: HilbertSpace) -> Operator {
    let mut op = Operator::zeros(space);
    for col in 0..space.dim() {
        let (n_cw, n_ccw, excited) = space.labels(col);
        if excited {
            op.set(space.index(n_cw, n_ccw, false), col, ONE);
        }
    }
    op
}

/// `σ₊ = σ₋†`.
pub fn qd_raising(space: HilbertSpace) -> Operator {
    qd_lowering(space).dagger()
}

/// `σ_z = diag(−1, +1)` on the QD factor, so that `[σ₊, σ₋] = σ_z`.
pub fn sigma_z(space: HilbertSpace) -> Operator {
    let mut op = Operator::zeros(space);
    for i in 0..space.dim() {
        let (_, _, excited) = space.labels(i);
        op.set(i, i, C64::new(if excited { 1.0 } else { -1.0 }, 0.0));
    }
    op
}

/// Standing-wave mode operators
/// `a_sw1 = (a_cw + e^{iξ} a_ccw)/√2`, `a_sw2 = (a_cw − e^{iξ} a_ccw)/√2`.
pub fn standing_wave_ops(space: HilbertSpace, xi: f64) -> (Operator, Operator) {
    let a_cw = annihilation(space, Mode::Cw);
    let a_ccw = annihilation(space, Mode::Ccw).scale(C64::from_polar(1.0, xi));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((&(&a_cw + &a_ccw) * s), (&(&a_cw - &a_ccw) * s))
}

/// Density matrix on a [`HilbertSpace`].
///
/// Physical states are Hermitian with unit trace. Operator seeds used by
/// the quantum-regression theorem (`a ρ a†`) share the representation but
/// carry `is_seed = true` and are exempt from trace normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
    is_seed: bool,
}

impl DensityMatrix {
    pub fn from_operator(matrix: Operator) -> Self {
        Self {
            matrix,
            is_seed: false,
        }
    }

    pub(crate) fn seed(matrix: Operator) -> Self {
        Self {
            matrix,
            is_seed: true,
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(space: HilbertSpace, psi: &[C64]) -> Result<Self> {
        let d = space.dim();
        if psi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: psi.len(),
            });
        }
        let mut m = Operator::zeros(space);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, psi[i] * psi[j].conj());
            }
        }
        Ok(Self::from_operator(m))
    }

    /// `|n_cw, n_ccw, q⟩⟨n_cw, n_ccw, q|`.
    pub fn basis(space: HilbertSpace, n_cw: usize, n_ccw: usize, excited: bool) -> Self {
        let mut m = Operator::zeros(space);
        let k = space.index(n_cw, n_ccw, excited);
        m.set(k, k, ONE);
        Self::from_operator(m)
    }

    /// Vacuum in both modes, QD in the ground state.
    pub fn ground(space: HilbertSpace) -> Self {
        Self::basis(space, 0, 0, false)
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self::from_operator(Operator::identity(space).scale(C64::new(1.0 / d as f64, 0.0)))
    }

    pub fn space(&self) -> HilbertSpace {
        self.matrix.space()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.matrix
    }

    pub fn is_seed(&self) -> bool {
        self.is_seed
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.hermiticity_error()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues()[0]
    }

    /// Column-stacked vectorization: `v[i + d·j] = ρ_ij`.
    pub fn to_vec(&self) -> Vec<C64> {
        let d = self.matrix.dim();
        let mut v = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                v[i + d * j] = self.matrix.get(i, j);
            }
        }
        v
    }

    pub fn from_vec(space: HilbertSpace, v: &[C64]) -> Result<Self> {
        Ok(Self::from_operator(unvec(space, v)?))
    }

    pub(crate) fn seed_from_vec(space: HilbertSpace, v: &[C64]) -> Result<Self> {
        Ok(Self::seed(unvec(space, v)?))
    }

    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        expectation(self, op)
    }
}

fn unvec(space: HilbertSpace, v: &[C64]) -> Result<Operator> {
    let d = space.dim();
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: v.len(),
        });
    }
    let mut m = Operator::zeros(space);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, v[i + d * j]);
        }
    }
    Ok(m)
}

/// `Tr[A ρ]`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    rho.space().check(&op.space())?;
    let d = op.dim();
    let r = rho.as_operator();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            let a = op.get(i, j);
            if a != ZERO {
                acc += a * r.get(j, i);
            }
        }
    }
    Ok(acc)
}
