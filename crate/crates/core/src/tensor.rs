//! Dense complex linear algebra for registers of at most five qubits.
//!
//! Qubit 0 is the leftmost ket symbol and the most significant bit of an
//! amplitude index, so `|0101>` on four qubits is index `0b0101`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::TensorError;

pub type C64 = Complex64;

/// Largest register handled by this module.
pub const MAX_QUBITS: usize = 5;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check_qubits(num_qubits: usize) -> Result<(), TensorError> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(TensorError::QubitCount(num_qubits));
    }
    Ok(())
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, TensorError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TensorError::Ragged);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(TensorError::Dimension {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, TensorError> {
        if self.cols != other.rows {
            return Err(TensorError::Dimension {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// A 2x2 complex matrix acting on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitOperator(pub [[C64; 2]; 2]);

impl QubitOperator {
    pub const fn new(m: [[C64; 2]; 2]) -> Self {
        Self(m)
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self::from_real([[a, 0.0], [0.0, b]])
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    pub fn zero() -> Self {
        Self::diag(0.0, 0.0)
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> Self {
        Self::diag(1.0, -1.0)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, k: f64) -> Self {
        let m = &self.0;
        Self([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        Self([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    /// `[a, b] -> self * [a, b]`.
    #[inline]
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.0[0][1].norm() <= tol && self.0[1][0].norm() <= tol
    }

    pub fn is_anti_diagonal(&self, tol: f64) -> bool {
        self.0[0][0].norm() <= tol && self.0[1][1].norm() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |r, c| self.0[r][c])
    }
}

impl Mul for QubitOperator {
    type Output = QubitOperator;

    fn mul(self, rhs: QubitOperator) -> QubitOperator {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        QubitOperator(out)
    }
}

/// `I^{⊗target} ⊗ op ⊗ I^{⊗(n-target-1)}`, stored factored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedOperator {
    num_qubits: usize,
    target: usize,
    op: QubitOperator,
}

/// Lifts a single-qubit operator to act on `target` of an `num_qubits` register.
pub fn lift(op: QubitOperator, num_qubits: usize, target: usize) -> Result<LiftedOperator, TensorError> {
    check_qubits(num_qubits)?;
    if target >= num_qubits {
        return Err(TensorError::QubitIndex {
            index: target,
            num_qubits,
        });
    }
    Ok(LiftedOperator {
        num_qubits,
        target,
        op,
    })
}

impl LiftedOperator {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn op(&self) -> &QubitOperator {
        &self.op
    }

    /// Product `self * other`; both must act on the same qubit of the same register.
    pub fn compose(&self, other: &LiftedOperator) -> Result<LiftedOperator, TensorError> {
        if self.num_qubits != other.num_qubits || self.target != other.target {
            return Err(TensorError::InvalidQubitSet(format!(
                "cannot compose operators on qubit {} of {} and qubit {} of {}",
                self.target, self.num_qubits, other.target, other.num_qubits
            )));
        }
        Ok(LiftedOperator {
            op: self.op * other.op,
            ..*self
        })
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn matrix(&self) -> CMatrix {
        let id = CMatrix::identity(2);
        let mut m = CMatrix::identity(1);
        for q in 0..self.num_qubits {
            m = if q == self.target {
                kron(&m, &self.op.to_matrix())
            } else {
                kron(&m, &id)
            };
        }
        m
    }
}

/// Anything that maps a register state to a register state.
pub trait Operator {
    fn apply_to(&self, s: &PureState) -> Result<PureState, TensorError>;
}

impl Operator for LiftedOperator {
    fn apply_to(&self, s: &PureState) -> Result<PureState, TensorError> {
        if s.num_qubits != self.num_qubits {
            return Err(TensorError::Dimension {
                expected: 1 << self.num_qubits,
                found: s.dim(),
            });
        }
        let stride = 1usize << (self.num_qubits - 1 - self.target);
        let mut amps = s.amps.clone();
        for base in 0..s.dim() {
            if base & stride != 0 {
                continue;
            }
            let [a, b] = self.op.apply([s.amps[base], s.amps[base | stride]]);
            amps[base] = a;
            amps[base | stride] = b;
        }
        Ok(PureState {
            num_qubits: s.num_qubits,
            amps,
        })
    }
}

impl Operator for CMatrix {
    fn apply_to(&self, s: &PureState) -> Result<PureState, TensorError> {
        if !self.is_square() || self.cols != s.dim() {
            return Err(TensorError::Dimension {
                expected: self.cols,
                found: s.dim(),
            });
        }
        let amps = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * s.amps[c]).sum())
            .collect();
        Ok(PureState {
            num_qubits: s.num_qubits,
            amps,
        })
    }
}

/// Matrix-vector product without renormalization.
pub fn apply<O: Operator + ?Sized>(op: &O, s: &PureState) -> Result<PureState, TensorError> {
    op.apply_to(s)
}

/// Amplitude vector over an `n`-qubit register; not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(num_qubits: usize, amps: Vec<C64>) -> Result<Self, TensorError> {
        check_qubits(num_qubits)?;
        if amps.len() != 1 << num_qubits {
            return Err(TensorError::Dimension {
                expected: 1 << num_qubits,
                found: amps.len(),
            });
        }
        Ok(Self { num_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, TensorError> {
        check_qubits(num_qubits)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(TensorError::QubitIndex { index, num_qubits });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { num_qubits, amps })
    }

    /// `sum_k coeff_k |index_k>`, unnormalized.
    pub fn from_kets(num_qubits: usize, kets: &[(usize, f64)]) -> Result<Self, TensorError> {
        let mut s = Self::new(num_qubits, vec![ZERO; 1 << num_qubits])?;
        for &(idx, coeff) in kets {
            if idx >= s.dim() {
                return Err(TensorError::QubitIndex { index: idx, num_qubits });
            }
            s.amps[idx] += c(coeff);
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amps: self.amps.iter().map(|&a| a * k).collect(),
        }
    }

    /// Returns `None` for a (numerically) zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Some(self.scale(c(1.0 / n.sqrt())))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64, TensorError> {
        if self.dim() != other.dim() {
            return Err(TensorError::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        if self.dim() != other.dim() {
            return Err(TensorError::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self, TensorError> {
        let n = self.num_qubits + other.num_qubits;
        check_qubits(n)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { num_qubits: n, amps })
    }

    /// `|self><self|`.
    pub fn to_density(&self) -> MixedState {
        let d = self.dim();
        MixedState {
            num_qubits: self.num_qubits,
            matrix: CMatrix::from_fn(d, d, |r, c| self.amps[r] * self.amps[c].conj()),
        }
    }
}

/// Density operator over an `n`-qubit register; not necessarily normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    num_qubits: usize,
    matrix: CMatrix,
}

impl MixedState {
    pub fn new(num_qubits: usize, matrix: CMatrix) -> Result<Self, TensorError> {
        check_qubits(num_qubits)?;
        let dim = 1 << num_qubits;
        if matrix.rows != dim || matrix.cols != dim {
            return Err(TensorError::Dimension {
                expected: dim,
                found: matrix.rows.max(matrix.cols),
            });
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.scale(c(k)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    /// Unit-trace copy; `None` when the trace vanishes.
    pub fn normalized(&self) -> Option<Self> {
        let t = self.trace();
        if !(t > 0.0) || !t.is_finite() {
            return None;
        }
        Some(self.scale(1.0 / t))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.is_hermitian(tol)
    }

    /// True when every eigenvalue exceeds `-tol`, decided by a Cholesky
    /// factorization of `rho + tol * I`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim();
        let mut a = self.matrix.clone();
        for i in 0..n {
            a[(i, i)] += c(tol);
        }
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let djj = d.sqrt();
            l[(j, j)] = c(djj);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        true
    }

    pub fn is_valid_density(&self, tol_herm: f64, tol_psd: f64, tol_trace: f64) -> bool {
        self.is_hermitian(tol_herm)
            && self.is_positive_semidefinite(tol_psd)
            && (self.trace() - 1.0).abs() <= tol_trace
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64, TensorError> {
        if psi.dim() != self.dim() {
            return Err(TensorError::Dimension {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for r in 0..self.dim() {
            if a[r] == ZERO {
                continue;
            }
            let row: C64 = (0..self.dim()).map(|col| self.matrix[(r, col)] * a[col]).sum();
            acc += a[r].conj() * row;
        }
        Ok(acc.re)
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self, TensorError> {
        let n = self.num_qubits + other.num_qubits;
        check_qubits(n)?;
        Ok(Self {
            num_qubits: n,
            matrix: kron(&self.matrix, &other.matrix),
        })
    }

    /// `U rho U^dagger` for a single-qubit register.
    pub fn conjugate_by(&self, u: &QubitOperator) -> Result<Self, TensorError> {
        if self.num_qubits != 1 {
            return Err(TensorError::Dimension {
                expected: 2,
                found: self.dim(),
            });
        }
        let u = u.to_matrix();
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self {
            num_qubits: 1,
            matrix: m,
        })
    }
}

/// Index tables splitting a register into `on` qubits (in the given order)
/// and the remaining qubits (ascending).
struct Split {
    on_offsets: Vec<usize>,
    rest_offsets: Vec<usize>,
    rest_qubits: usize,
}

fn offsets(num_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|v| {
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if v >> (k - 1 - pos) & 1 == 1 {
                    acc | 1 << (num_qubits - 1 - q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn split(num_qubits: usize, on: &[usize], allow_all: bool) -> Result<Split, TensorError> {
    if on.is_empty() {
        return Err(TensorError::InvalidQubitSet("empty qubit set".into()));
    }
    let mut seen = vec![false; num_qubits];
    for &q in on {
        if q >= num_qubits {
            return Err(TensorError::QubitIndex {
                index: q,
                num_qubits,
            });
        }
        if seen[q] {
            return Err(TensorError::InvalidQubitSet(format!("qubit {q} listed twice")));
        }
        seen[q] = true;
    }
    if !allow_all && on.len() == num_qubits {
        return Err(TensorError::InvalidQubitSet(
            "projection must leave at least one qubit".into(),
        ));
    }
    let rest: Vec<usize> = (0..num_qubits).filter(|&q| !seen[q]).collect();
    Ok(Split {
        on_offsets: offsets(num_qubits, on),
        rest_offsets: offsets(num_qubits, &rest),
        rest_qubits: rest.len(),
    })
}

/// Reduced density operator on `keep` (ascending order in the result).
pub fn partial_trace(rho: &MixedState, keep: &[usize]) -> Result<MixedState, TensorError> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let sp = split(rho.num_qubits, &keep, true)?;
    let kd = sp.on_offsets.len();
    let mut out = CMatrix::zeros(kd, kd);
    for (i, &oi) in sp.on_offsets.iter().enumerate() {
        for (j, &oj) in sp.on_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &sp.rest_offsets {
                acc += rho.matrix[(oi | t, oj | t)];
            }
            out[(i, j)] = acc;
        }
    }
    MixedState::new(keep.len(), out)
}

fn nonzero_amplitudes(basis_state: &PureState, on_qubits: &[usize]) -> Result<Vec<(usize, C64)>, TensorError> {
    if basis_state.dim() != 1 << on_qubits.len() {
        return Err(TensorError::Dimension {
            expected: 1 << on_qubits.len(),
            found: basis_state.dim(),
        });
    }
    Ok(basis_state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != ZERO)
        .map(|(i, a)| (i, *a))
        .collect())
}

/// `(<basis_state| ⊗ I) |s>`: the unnormalized state left on the complement
/// of `on_qubits`. Its squared norm is the outcome probability.
pub fn project(s: &PureState, basis_state: &PureState, on_qubits: &[usize]) -> Result<PureState, TensorError> {
    let sp = split(s.num_qubits, on_qubits, false)?;
    let nz = nonzero_amplitudes(basis_state, on_qubits)?;
    let amps = sp
        .rest_offsets
        .iter()
        .map(|&r| {
            nz.iter()
                .map(|&(b, eta)| eta.conj() * s.amps[sp.on_offsets[b] | r])
                .sum()
        })
        .collect();
    PureState::new(sp.rest_qubits, amps)
}

/// `(<basis_state| ⊗ I) rho (|basis_state> ⊗ I)` on the complement of
/// `on_qubits`; its trace is the outcome probability.
pub fn project_density(rho: &MixedState, basis_state: &PureState, on_qubits: &[usize]) -> Result<MixedState, TensorError> {
    let sp = split(rho.num_qubits, on_qubits, false)?;
    let nz = nonzero_amplitudes(basis_state, on_qubits)?;
    let rd = sp.rest_offsets.len();
    let mut out = CMatrix::zeros(rd, rd);
    for &(b, eb) in &nz {
        let ob = sp.on_offsets[b];
        for &(b2, eb2) in &nz {
            let ob2 = sp.on_offsets[b2];
            let w = eb.conj() * eb2;
            for (i, &ri) in sp.rest_offsets.iter().enumerate() {
                for (j, &rj) in sp.rest_offsets.iter().enumerate() {
                    out[(i, j)] += w * rho.matrix[(ob | ri, ob2 | rj)];
                }
            }
        }
    }
    MixedState::new(sp.rest_qubits, out)
}
