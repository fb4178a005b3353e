//! Liouville-space (Pauli transfer matrix) representation of channels.
//!
//! Operators on density matrices are stored as real `4^n × 4^n` matrices in
//! the Hilbert-Schmidt-normalized Pauli basis `τ_P = 2^{-n/2} P`.  The basis
//! is ordered with the identity component `τ₀` first and the remaining
//! elements lexicographic in the `(x, z)` masks, i.e. index `= (x << n) | z`
//! with qubit 0 as the most significant bit (see [`crate::pauli`]).
//!
//! Completely positive trace-preserving maps have a positive semidefinite
//! Choi state and first row `(1, 0, …, 0)`; both checks are exposed here.

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense Liouville matrices are refused above this qubit count.
pub const DENSE_QUBIT_CAP: usize = 6;

/// Dimension `4^n` of the Liouville space.
pub fn pauli_dim(n: usize) -> usize {
    1usize << (2 * n)
}

/// Guard for operations that materialize `4^n × 4^n` matrices.
pub fn check_dense_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("qubit count must be positive".into()));
    }
    if n > DENSE_QUBIT_CAP {
        return Err(Error::TooManyQubits { n, cap: DENSE_QUBIT_CAP });
    }
    Ok(())
}

/// A vector of Pauli-basis coefficients (a state, effect, or intermediate).
pub type PauliVec = DVector<f64>;

/// A superoperator in the normalized Pauli basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    n: usize,
    mat: DMatrix<f64>,
}

impl SuperOperator {
    /// The identity channel on `n` qubits.
    pub fn identity(n: usize) -> Result<Self> {
        check_dense_cap(n)?;
        let d = pauli_dim(n);
        Ok(Self { n, mat: DMatrix::identity(d, d) })
    }

    /// The all-zero map (useful as an accumulator).
    pub fn zeros(n: usize) -> Result<Self> {
        check_dense_cap(n)?;
        let d = pauli_dim(n);
        Ok(Self { n, mat: DMatrix::zeros(d, d) })
    }

    /// Wrap an explicit matrix; dimensions must be `4^n × 4^n`.
    pub fn from_matrix(n: usize, mat: DMatrix<f64>) -> Result<Self> {
        check_dense_cap(n)?;
        let d = pauli_dim(n);
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension(format!(
                "expected {d}×{d} matrix for n = {n}, got {}×{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { n, mat })
    }

    /// Diagonal map with the given Pauli-basis eigenvalues.
    pub fn from_diagonal(n: usize, diag: &[f64]) -> Result<Self> {
        check_dense_cap(n)?;
        let d = pauli_dim(n);
        if diag.len() != d {
            return Err(Error::Dimension(format!(
                "expected {d} diagonal entries, got {}",
                diag.len()
            )));
        }
        Ok(Self {
            n,
            mat: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        pauli_dim(self.n)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    /// Operator product `self · rhs`; `rhs` acts first.
    pub fn compose(&self, rhs: &SuperOperator) -> Result<SuperOperator> {
        if self.n != rhs.n {
            return Err(Error::Dimension(format!(
                "cannot compose maps on {} and {} qubits",
                self.n, rhs.n
            )));
        }
        Ok(SuperOperator { n: self.n, mat: &self.mat * &rhs.mat })
    }

    /// Adjoint map; in this real basis it is the matrix transpose.
    pub fn adjoint(&self) -> SuperOperator {
        SuperOperator { n: self.n, mat: self.mat.transpose() }
    }

    /// Apply to a Pauli-basis vector.
    pub fn apply(&self, v: &PauliVec) -> PauliVec {
        debug_assert_eq!(v.len(), self.dim());
        &self.mat * v
    }

    /// Tensor product with `rhs` on the trailing qubits.
    ///
    /// Because the basis interleaves `(x, z)` masks rather than stacking
    /// factor indices, this is a Kronecker product with explicit basis-index
    /// bookkeeping, not `kron` on the raw matrices.
    pub fn tensor(&self, rhs: &SuperOperator) -> Result<SuperOperator> {
        let n = self.n + rhs.n;
        check_dense_cap(n)?;
        let (na, nb) = (self.n, rhs.n);
        let d = pauli_dim(n);
        let mut mat = DMatrix::zeros(d, d);
        let da = pauli_dim(na);
        let db = pauli_dim(nb);
        let mask_a = (1usize << na) - 1;
        let mask_b = (1usize << nb) - 1;
        let join = |ia: usize, ib: usize| -> usize {
            let (xa, za) = (ia >> na, ia & mask_a);
            let (xb, zb) = (ib >> nb, ib & mask_b);
            let x = (xa << nb) | xb;
            let z = (za << nb) | zb;
            (x << n) | z
        };
        for ra in 0..da {
            for ca in 0..da {
                let va = self.mat[(ra, ca)];
                if va == 0.0 {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        let vb = rhs.mat[(rb, cb)];
                        if vb != 0.0 {
                            mat[(join(ra, rb), join(ca, cb))] = va * vb;
                        }
                    }
                }
            }
        }
        Ok(SuperOperator { n, mat })
    }

    /// Embed a map acting on `qubits` (distinct, each `< n`) into `n` qubits,
    /// acting as the identity elsewhere.
    pub fn embed(&self, qubits: &[usize], n: usize) -> Result<SuperOperator> {
        check_dense_cap(n)?;
        if qubits.len() != self.n {
            return Err(Error::Dimension(format!(
                "map acts on {} qubits but {} targets given",
                self.n,
                qubits.len()
            )));
        }
        let mut seen = 0u64;
        for &q in qubits {
            if q >= n {
                return Err(Error::InvalidParameter(format!(
                    "target qubit {q} out of range for n = {n}"
                )));
            }
            let bit = 1u64 << (n - 1 - q);
            if seen & bit != 0 {
                return Err(Error::InvalidParameter("duplicate target qubit".into()));
            }
            seen |= bit;
        }
        let k = self.n;
        let dk = pauli_dim(k);
        let rest_qubits: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
        // Scatter a k-qubit (x, z) mask pair onto the chosen target qubits.
        let scatter = |sub: usize, positions: &[usize]| -> (u64, u64) {
            let width = positions.len();
            let (xs, zs) = (sub >> width, sub & ((1 << width) - 1));
            let (mut x, mut z) = (0u64, 0u64);
            for (j, &q) in positions.iter().enumerate() {
                let src = 1usize << (width - 1 - j);
                let dst = 1u64 << (n - 1 - q);
                if xs & src != 0 {
                    x |= dst;
                }
                if zs & src != 0 {
                    z |= dst;
                }
            }
            (x, z)
        };
        let d = pauli_dim(n);
        let mut mat = DMatrix::zeros(d, d);
        let rest_count = pauli_dim(rest_qubits.len());
        for rest in 0..rest_count {
            let (rx, rz) = scatter(rest, &rest_qubits);
            for row in 0..dk {
                let (ox, oz) = scatter(row, qubits);
                let full_row = (((ox | rx) as usize) << n) | (oz | rz) as usize;
                for col in 0..dk {
                    let v = self.mat[(row, col)];
                    if v == 0.0 {
                        continue;
                    }
                    let (ix, iz) = scatter(col, qubits);
                    let full_col = (((ix | rx) as usize) << n) | (iz | rz) as usize;
                    mat[(full_row, full_col)] = v;
                }
            }
        }
        Ok(SuperOperator { n, mat })
    }

    /// Zero out all entries outside the projector's block.
    pub fn restrict(&self, irrep: &IrrepProjector) -> SuperOperator {
        debug_assert_eq!(irrep.num_qubits(), self.n);
        let d = self.dim();
        let mut mat = DMatrix::zeros(d, d);
        for r in 0..d {
            if !irrep.contains(r) {
                continue;
            }
            for c in 0..d {
                if irrep.contains(c) {
                    mat[(r, c)] = self.mat[(r, c)];
                }
            }
        }
        SuperOperator { n: self.n, mat }
    }

    /// Block-normalized unitarity `tr(P A P Aᵀ) / dim(P)`: the mean squared
    /// singular content of the map on the projector's subspace.  Equals 1 for
    /// any unitary conjugation restricted to an invariant block.
    pub fn unitarity(&self, irrep: &IrrepProjector) -> f64 {
        let mut sum = 0.0;
        for r in irrep.indices() {
            for c in irrep.indices() {
                let v = self.mat[(r, c)];
                sum += v * v;
            }
        }
        sum / irrep.dim() as f64
    }

    /// Normalized trace `tr(P A P) / dim(P)` over the projector's block.
    pub fn block_trace_normalized(&self, irrep: &IrrepProjector) -> f64 {
        let mut sum = 0.0;
        for r in irrep.indices() {
            sum += self.mat[(r, r)];
        }
        sum / irrep.dim() as f64
    }

    /// Normalized Choi state `J = 2^{-n} Σ_{ab} R_{ab} τ_bᵀ ⊗ τ_a`
    /// (input copy first).  Trace-preserving maps give `tr J = 1`.
    pub fn choi(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let dh = 1usize << n;
        let dim = dh * dh;
        let norm = 1.0 / ((1usize << n) as f64); // τ entries carry their own 2^{-n/2}
        let mut j = DMatrix::<Complex64>::zeros(dim, dim);
        for a in 0..self.dim() {
            let pa = PauliString::from_basis_index(n, a).expect("valid index");
            let a_nz = pauli_nonzeros(&pa);
            for b in 0..self.dim() {
                let r = self.mat[(a, b)];
                if r == 0.0 {
                    continue;
                }
                let pb = PauliString::from_basis_index(n, b).expect("valid index");
                // τ_bᵀ entries: (row, col, v) of τ_b become (col, row, v).
                for (r2, c2, v2) in pauli_nonzeros(&pb) {
                    for (r1, c1, v1) in &a_nz {
                        let row = c2 * dh + r1;
                        let col = r2 * dh + c1;
                        j[(row, col)] += Complex64::new(r * norm, 0.0) * v2 * v1;
                    }
                }
            }
        }
        j
    }

    /// Frobenius distance between the normalized Choi states of two maps.
    pub fn choi_hs_distance(&self, rhs: &SuperOperator) -> Result<f64> {
        if self.n != rhs.n {
            return Err(Error::Dimension(
                "Choi distance between maps of different widths".into(),
            ));
        }
        let d = self.choi() - rhs.choi();
        Ok(d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
    }

    /// Diagnostics for the CPTP test.
    pub fn cptp_report(&self) -> CptpReport {
        let d = self.dim();
        let mut tp_error = (self.mat[(0, 0)] - 1.0).abs();
        for c in 1..d {
            tp_error = tp_error.max(self.mat[(0, c)].abs());
        }
        let choi = self.choi();
        // The Choi matrix is Hermitian for any real transfer matrix;
        // symmetrize to shield the eigensolver from rounding.
        let herm = (&choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let min_choi_eigenvalue = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        CptpReport { tp_error, min_choi_eigenvalue }
    }

    /// Whether the map is completely positive and trace preserving within
    /// `tol` (both the trace row and the minimum Choi eigenvalue).
    pub fn is_cptp(&self, tol: f64) -> bool {
        let report = self.cptp_report();
        report.tp_error <= tol && report.min_choi_eigenvalue >= -tol
    }
}

/// Outcome of a CPTP check.
#[derive(Debug, Clone, Copy)]
pub struct CptpReport {
    /// Largest deviation of the first transfer-matrix row from `(1, 0, …)`.
    pub tp_error: f64,
    /// Minimum eigenvalue of the normalized Choi state.
    pub min_choi_eigenvalue: f64,
}

/// Sparse entries `(row, col, value)` of the *normalized* Pauli `τ = 2^{-n/2} P`.
///
/// `P = i^φ X^x Z^z` sends `|c⟩ ↦ i^φ (-1)^{|z∧c|} |c⊕x⟩`, so each column
/// holds exactly one nonzero.
fn pauli_nonzeros(p: &PauliString) -> Vec<(usize, usize, Complex64)> {
    let n = p.num_qubits();
    let dh = 1usize << n;
    let scale = (dh as f64).powf(-0.5);
    let phase = match p.phase_exponent() {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    (0..dh)
        .map(|c| {
            let sign = if ((p.z_bits() & c as u64).count_ones()) & 1 == 0 {
                1.0
            } else {
                -1.0
            };
            let row = c ^ p.x_bits() as usize;
            (row, c, phase * scale * sign)
        })
        .collect()
}

/// Dense complex matrix of the normalized Pauli `τ = 2^{-n/2} P`.
pub fn pauli_tau_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let dh = 1usize << p.num_qubits();
    let mut m = DMatrix::<Complex64>::zeros(dh, dh);
    for (r, c, v) in pauli_nonzeros(p) {
        m[(r, c)] = v;
    }
    m
}

/// Pauli-basis coefficients of the computational state `|x⟩⟨x|`:
/// `2^{-n/2} (-1)^{|z∧x|}` on every pure-Z index, zero elsewhere.
pub fn state_to_pauli_vec(n: usize, x: u64) -> Result<PauliVec> {
    check_dense_cap(n)?;
    if x >= (1u64 << n) {
        return Err(Error::InvalidParameter(format!(
            "outcome {x} out of range for n = {n}"
        )));
    }
    let mut v = DVector::zeros(pauli_dim(n));
    let scale = ((1u64 << n) as f64).powf(-0.5);
    for z in 0..(1u64 << n) {
        let sign = if ((z & x).count_ones()) & 1 == 0 { 1.0 } else { -1.0 };
        v[z as usize] = scale * sign;
    }
    Ok(v)
}

/// Dual vector of the projective effect `|x⟩⟨x|`; numerically identical to
/// [`state_to_pauli_vec`] because the effects are Hermitian projectors.
pub fn effect_to_pauli_vec(n: usize, x: u64) -> Result<PauliVec> {
    state_to_pauli_vec(n, x)
}

/// All computational-basis effects as rows of a `2^n × 4^n` matrix.
pub fn computational_povm(n: usize) -> Result<DMatrix<f64>> {
    check_dense_cap(n)?;
    let d = pauli_dim(n);
    let mut m = DMatrix::zeros(1 << n, d);
    for x in 0..(1u64 << n) {
        let row = effect_to_pauli_vec(n, x)?;
        for c in 0..d {
            m[(x as usize, c)] = row[c];
        }
    }
    Ok(m)
}

/// An orthogonal projector onto an invariant subspace of the Pauli basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrrepProjector {
    n: usize,
    kind: IrrepKind,
}

/// The supported invariant subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrrepKind {
    /// Traceless (adjoint) subspace: every index except `τ₀`.
    Adjoint,
    /// Fixed-support subspace for a local-qubit pattern `w`: basis Paulis
    /// acting non-trivially exactly on the qubits set in `w`.
    Local { w: u64 },
}

impl IrrepProjector {
    pub fn adjoint(n: usize) -> Result<Self> {
        check_dense_cap(n)?;
        Ok(Self { n, kind: IrrepKind::Adjoint })
    }

    pub fn local(n: usize, w: u64) -> Result<Self> {
        check_dense_cap(n)?;
        if w >= (1u64 << n) {
            return Err(Error::InvalidParameter(format!(
                "support pattern {w:#b} out of range for n = {n}"
            )));
        }
        Ok(Self { n, kind: IrrepKind::Local { w } })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> IrrepKind {
        self.kind
    }

    /// Dimension of the projected subspace: `4^n - 1` for the traceless
    /// block, `3^{|w|}` for a support pattern.
    pub fn dim(&self) -> usize {
        match self.kind {
            IrrepKind::Adjoint => pauli_dim(self.n) - 1,
            IrrepKind::Local { w } => 3usize.pow(w.count_ones()),
        }
    }

    /// Whether a basis index lies in the subspace.
    pub fn contains(&self, index: usize) -> bool {
        match self.kind {
            IrrepKind::Adjoint => index != 0,
            IrrepKind::Local { w } => {
                let x = (index >> self.n) as u64;
                let z = index as u64 & PauliString::full_mask(self.n);
                (x | z) == w
            }
        }
    }

    /// Basis indices of the subspace, ascending.
    pub fn indices(&self) -> Vec<usize> {
        (0..pauli_dim(self.n)).filter(|&i| self.contains(i)).collect()
    }

    /// Zero out coefficients outside the subspace.
    pub fn project_vec(&self, v: &mut PauliVec) {
        for i in 0..v.len() {
            if !self.contains(i) {
                v[i] = 0.0;
            }
        }
    }

    /// The projector as a diagonal 0/1 superoperator.
    pub fn superoperator(&self) -> SuperOperator {
        let d = pauli_dim(self.n);
        let diag: Vec<f64> = (0..d)
            .map(|i| if self.contains(i) { 1.0 } else { 0.0 })
            .collect();
        SuperOperator::from_diagonal(self.n, &diag).expect("projector dims")
    }
}

impl std::fmt::Display for IrrepProjector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            IrrepKind::Adjoint => write!(f, "ad"),
            IrrepKind::Local { w } => {
                write!(f, "w=")?;
                for q in (0..self.n).rev() {
                    // qubit 0 printed first (most significant bit)
                    let bit = (w >> q) & 1;
                    write!(f, "{bit}")?;
                }
                Ok(())
            }
        }
    }
}

/// Serialized form of a transfer matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PtmJson {
    pub n: usize,
    /// Basis convention tag; always `"xz-lex"` for this crate.
    pub basis: String,
    pub rows: Vec<Vec<f64>>,
}

impl From<&SuperOperator> for PtmJson {
    fn from(op: &SuperOperator) -> Self {
        let d = op.dim();
        let rows = (0..d)
            .map(|r| (0..d).map(|c| op.matrix()[(r, c)]).collect())
            .collect();
        PtmJson { n: op.num_qubits(), basis: "xz-lex".to_string(), rows }
    }
}

impl TryFrom<&PtmJson> for SuperOperator {
    type Error = Error;

    fn try_from(json: &PtmJson) -> Result<Self> {
        if json.basis != "xz-lex" {
            return Err(Error::Config(format!(
                "unknown transfer-matrix basis \"{}\"",
                json.basis
            )));
        }
        let d = pauli_dim(json.n);
        if json.rows.len() != d || json.rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension(format!(
                "transfer matrix for n = {} must be {d}×{d}",
                json.n
            )));
        }
        let mut mat = DMatrix::zeros(d, d);
        for (r, row) in json.rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                mat[(r, c)] = v;
            }
        }
        SuperOperator::from_matrix(json.n, mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn state_vector_single_qubit() {
        // |0⟩⟨0| = (I + Z)/2 = (τ₀ + τ_Z)/√2 with basis order (I, Z, X, Y).
        let v = state_to_pauli_vec(1, 0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(v[2], 0.0);
        assert_abs_diff_eq!(v[3], 0.0);
        let v1 = state_to_pauli_vec(1, 1).unwrap();
        assert_abs_diff_eq!(v1[1], -s, epsilon = 1e-15);
    }

    #[test]
    fn povm_rows_sum_to_identity_effect() {
        for n in 1..=3 {
            let povm = computational_povm(n).unwrap();
            let sum = povm.row_sum();
            assert_abs_diff_eq!(sum[0], ((1u64 << n) as f64).sqrt(), epsilon = 1e-12);
            for c in 1..pauli_dim(n) {
                assert_abs_diff_eq!(sum[c], 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn projector_dimensions() {
        assert_eq!(IrrepProjector::adjoint(2).unwrap().dim(), 15);
        assert_eq!(IrrepProjector::local(2, 0b11).unwrap().dim(), 9);
        assert_eq!(IrrepProjector::local(2, 0b01).unwrap().dim(), 3);
        assert_eq!(IrrepProjector::local(2, 0).unwrap().dim(), 1);
        // The support blocks partition the whole space.
        let total: usize = (0..4u64)
            .map(|w| IrrepProjector::local(2, w).unwrap().indices().len())
            .sum();
        assert_eq!(total, 16);
        for w in 0..4u64 {
            let p = IrrepProjector::local(2, w).unwrap();
            assert_eq!(p.indices().len(), p.dim());
        }
    }

    #[test]
    fn identity_is_cptp_transpose_is_not() {
        let id = SuperOperator::identity(1).unwrap();
        assert!(id.is_cptp(1e-9));
        // Transposition: diag(1, 1, 1, -1) on (I, Z, X, Y) — flips Y.
        let t = SuperOperator::from_diagonal(1, &[1.0, 1.0, 1.0, -1.0]).unwrap();
        let report = t.cptp_report();
        assert!(report.tp_error <= 1e-12);
        assert!(report.min_choi_eigenvalue < -0.4);
        assert!(!t.is_cptp(1e-9));
    }

    #[test]
    fn choi_of_identity_is_maximally_entangled_state() {
        let id = SuperOperator::identity(2).unwrap();
        let j = id.choi();
        let tr: Complex64 = (0..j.nrows()).map(|i| j[(i, i)]).sum();
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-12);
        // Rank-one projector with purity 1.
        let purity: f64 = (&j * &j).diagonal().iter().map(|c| c.re).sum();
        assert_abs_diff_eq!(purity, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn embed_on_single_qubit_matches_tensor() {
        // diag map on qubit 1 of 2: embed vs identity ⊗ map.
        let d = SuperOperator::from_diagonal(1, &[1.0, 0.9, 0.8, 0.7]).unwrap();
        let id = SuperOperator::identity(1).unwrap();
        let a = d.embed(&[1], 2).unwrap();
        let b = id.tensor(&d).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = d.embed(&[0], 2).unwrap();
        let e = d.tensor(&id).unwrap();
        assert_eq!(c.matrix(), e.matrix());
    }

    #[test]
    fn ptm_json_round_trip() {
        let d = SuperOperator::from_diagonal(1, &[1.0, 0.5, -0.25, 0.125]).unwrap();
        let json = PtmJson::from(&d);
        let back = SuperOperator::try_from(&json).unwrap();
        assert_eq!(d.matrix(), back.matrix());
    }
}
