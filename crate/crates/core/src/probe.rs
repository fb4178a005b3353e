//! Probe super-operators: the linear functionals a correlator estimates.
//!
//! A probe `A` is inserted between consecutive random gates during
//! post-processing.  Its sequence correlator decays as `B·p^{m-1}` with
//! `p = tr(P A P Λ)/tr(P)` — the probe picks out one spectral component
//! of the inter-gate noise channel `Λ` on the irreducible block `P` of
//! the gate ensemble.  Each probe therefore carries three things: its
//! action (dense matrix, Clifford tableau, or rank-one Pauli projector),
//! the block it lives on, and the ensemble-specific normalization `α`
//! that makes single-shot correlators unbiased.

use crate::clifford::{CliffordElement, LocalCliffordElement};
use crate::error::{Error, Result};
use crate::experiment::GateSet;
use crate::liouville::{pauli_dim, IrrepProjector, SuperOperator};
use crate::pauli::PauliString;

/// The action payload of a probe.
#[derive(Debug, Clone)]
pub enum ProbeKind {
    /// Arbitrary dense super-operator (projected onto the irrep block).
    Dense(SuperOperator),
    /// Conjugation by a Clifford element; admits fast correlators.
    CliffordUnitary(CliffordElement),
    /// Rank-one projector `|τ⟩⟩⟨⟨τ|` onto one Pauli component, for the
    /// Pauli-interleaved ensemble.
    RankOnePauli(PauliString),
}

/// A probe operator together with its irrep block and normalization.
#[derive(Debug, Clone)]
pub struct ProbeOperator {
    kind: ProbeKind,
    irrep: IrrepProjector,
    alpha: f64,
    gate_set: GateSet,
}

impl ProbeOperator {
    /// Probe `P_ad ω(c) P_ad` for the multi-qubit Clifford ensemble;
    /// `α = 2^n + 1`.
    pub fn clifford_adjoint(c: CliffordElement) -> Result<Self> {
        let n = c.num_qubits();
        Ok(Self {
            kind: ProbeKind::CliffordUnitary(c),
            irrep: IrrepProjector::adjoint(n)?,
            alpha: (1u64 << n) as f64 + 1.0,
            gate_set: GateSet::MultiQubitClifford,
        })
    }

    /// Fidelity probe for a target Clifford `u`: inserts the *inverse*
    /// conjugation `P_ad ω(u)⁻¹ P_ad`, so the estimated decay is that of
    /// `ω(u)⁻¹ Λ` — equal to 1 exactly when the noise implements `u`.
    pub fn clifford_fidelity(u: &CliffordElement) -> Result<Self> {
        Self::clifford_adjoint(u.invert()?)
    }

    /// Dense probe on the traceless block of the multi-qubit ensemble.
    pub fn dense_adjoint(a: SuperOperator) -> Result<Self> {
        let n = a.num_qubits();
        let irrep = IrrepProjector::adjoint(n)?;
        Ok(Self {
            kind: ProbeKind::Dense(project(&a, &irrep)),
            irrep,
            alpha: (1u64 << n) as f64 + 1.0,
            gate_set: GateSet::MultiQubitClifford,
        })
    }

    /// Fidelity probe for an arbitrary unitary channel given as its
    /// transfer matrix: inserts `P_ad ω(u)ᵀ P_ad` (the transpose of an
    /// orthogonal transfer matrix is its inverse).
    pub fn unitary_fidelity(omega_u: &SuperOperator) -> Result<Self> {
        let m = omega_u.matrix();
        let orth = (m * m.transpose()
            - nalgebra::DMatrix::<f64>::identity(omega_u.dim(), omega_u.dim()))
        .abs()
        .max();
        if orth > 1e-9 {
            return Err(Error::ProbeMismatch(format!(
                "fidelity probes need a unitary transfer matrix \
                 (orthogonality defect {orth:.2e})"
            )));
        }
        Self::dense_adjoint(omega_u.adjoint())
    }

    /// Probe `P_w ω(layer) P_w` for the local-Clifford ensemble on the
    /// support pattern `w`; `α = 2^n · 3^{|w|}`.
    pub fn local_clifford(layer: &LocalCliffordElement, w: u64) -> Result<Self> {
        let n = layer.num_qubits();
        let irrep = IrrepProjector::local(n, w)?;
        Ok(Self {
            kind: ProbeKind::CliffordUnitary(layer.to_clifford()?),
            irrep,
            alpha: local_alpha(n, w),
            gate_set: GateSet::LocalClifford,
        })
    }

    /// Dense probe on one support pattern of the local ensemble.
    pub fn dense_local(a: SuperOperator, w: u64) -> Result<Self> {
        let n = a.num_qubits();
        let irrep = IrrepProjector::local(n, w)?;
        Ok(Self {
            kind: ProbeKind::Dense(project(&a, &irrep)),
            irrep,
            alpha: local_alpha(n, w),
            gate_set: GateSet::LocalClifford,
        })
    }

    /// Rank-one probe `|τ⟩⟩⟨⟨τ|` for the Pauli-interleaved ensemble;
    /// `α = 2^n (2^n + 1)`.  `tau` must be a non-identity Hermitian Pauli
    /// with positive sign.
    pub fn pauli(tau: PauliString) -> Result<Self> {
        let d = (1u64 << tau.num_qubits()) as f64;
        Self::rank_one(tau, d * (d + 1.0), GateSet::PauliInterleaved)
    }

    /// Rank-one probe `|τ⟩⟩⟨⟨τ|` evaluated against multi-qubit Clifford
    /// records (useful for picking out single matrix elements of the noise
    /// on the traceless block); carries that ensemble's `α = 2^n + 1`.
    pub fn rank_one_ad(tau: PauliString) -> Result<Self> {
        let d = (1u64 << tau.num_qubits()) as f64;
        Self::rank_one(tau, d + 1.0, GateSet::MultiQubitClifford)
    }

    fn rank_one(tau: PauliString, alpha: f64, gate_set: GateSet) -> Result<Self> {
        let n = tau.num_qubits();
        if !tau.is_hermitian() || tau.hermitian_sign() < 0.0 || tau.is_identity_support() {
            return Err(Error::ProbeMismatch(
                "Pauli probe must be a positive non-identity Hermitian Pauli".into(),
            ));
        }
        Ok(Self {
            kind: ProbeKind::RankOnePauli(tau),
            // The rank-one projector lives inside the traceless block.
            irrep: IrrepProjector::adjoint(n)?,
            alpha,
            gate_set,
        })
    }

    pub fn kind(&self) -> &ProbeKind {
        &self.kind
    }

    pub fn irrep(&self) -> &IrrepProjector {
        &self.irrep
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The gate ensemble this probe's normalization assumes.
    pub fn gate_set(&self) -> GateSet {
        self.gate_set
    }

    pub fn num_qubits(&self) -> usize {
        self.irrep.num_qubits()
    }

    /// Dense realization `P A P` of the probe action.
    pub fn matrix(&self) -> Result<SuperOperator> {
        match &self.kind {
            ProbeKind::Dense(a) => Ok(a.clone()),
            ProbeKind::CliffordUnitary(c) => Ok(project(&c.to_ptm()?, &self.irrep)),
            ProbeKind::RankOnePauli(tau) => {
                let n = tau.num_qubits();
                let dim = pauli_dim(n);
                let mut mat = nalgebra::DMatrix::<f64>::zeros(dim, dim);
                let idx = tau.basis_index();
                mat[(idx, idx)] = 1.0;
                SuperOperator::from_matrix(n, mat)
            }
        }
    }

    /// The effective dimension `tr(P)` of the probe's block.
    pub fn block_dim(&self) -> usize {
        match &self.kind {
            ProbeKind::RankOnePauli(_) => 1,
            _ => self.irrep.dim(),
        }
    }

    /// Unitarity `u(A) = tr(A A†)/(4^n − 1)` of the realized probe.
    pub fn unitarity(&self) -> Result<f64> {
        let a = self.matrix()?;
        let dim = pauli_dim(self.num_qubits());
        Ok((a.matrix() * a.matrix().transpose()).trace() / (dim as f64 - 1.0))
    }
}

fn local_alpha(n: usize, w: u64) -> f64 {
    (1u64 << n) as f64 * 3.0f64.powi(w.count_ones() as i32)
}

fn project(a: &SuperOperator, irrep: &IrrepProjector) -> SuperOperator {
    let p = irrep.superoperator();
    p.compose(a)
        .and_then(|pa| pa.compose(&p))
        .expect("projector widths match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{c1_to_clifford, C1_HADAMARD};
    use crate::noise::rotation_z;

    #[test]
    fn alphas_follow_the_ensemble() {
        let h = CliffordElement::hadamard(2, 0).unwrap();
        let p = ProbeOperator::clifford_adjoint(h).unwrap();
        assert_eq!(p.alpha(), 5.0);
        assert_eq!(p.irrep().dim(), 15);

        let layer = LocalCliffordElement::identity(2);
        let pl = ProbeOperator::local_clifford(&layer, 0b11).unwrap();
        assert_eq!(pl.alpha(), 4.0 * 9.0);
        assert_eq!(pl.irrep().dim(), 9);

        let tau = PauliString::parse("ZI").unwrap();
        let pp = ProbeOperator::pauli(tau).unwrap();
        assert_eq!(pp.alpha(), 4.0 * 5.0);
        assert_eq!(pp.block_dim(), 1);
    }

    #[test]
    fn clifford_probe_matrix_is_projected_conjugation() {
        let h = c1_to_clifford(C1_HADAMARD);
        let p = ProbeOperator::clifford_adjoint(h.clone()).unwrap();
        let m = p.matrix().unwrap();
        // Identity row/column killed, rest matches the conjugation action.
        assert_eq!(m.matrix()[(0, 0)], 0.0);
        let full = h.to_ptm().unwrap();
        for i in 1..4 {
            for j in 1..4 {
                assert_eq!(m.matrix()[(i, j)], full.matrix()[(i, j)]);
            }
        }
    }

    #[test]
    fn fidelity_probe_inverts_the_target() {
        let s = CliffordElement::phase_s(1, 0).unwrap();
        let probe = ProbeOperator::clifford_fidelity(&s).unwrap();
        // Inserting the probe against the target itself gives decay 1:
        // tr(P ω(s)⁻¹ P ω(s)) / 3 = 1.
        let a = probe.matrix().unwrap();
        let lam = s.to_ptm().unwrap();
        let p = (a.matrix() * lam.matrix()).trace() / 3.0;
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_fidelity_rejects_nonunitary() {
        let rot = rotation_z(1, 0, 0.3).unwrap();
        assert!(ProbeOperator::unitary_fidelity(&rot).is_ok());
        let mut damp = SuperOperator::identity(1).unwrap();
        damp.matrix_mut()[(1, 1)] = 0.9;
        assert!(ProbeOperator::unitary_fidelity(&damp).is_err());
    }

    #[test]
    fn unitarity_of_unitary_probe_is_one() {
        let h = CliffordElement::hadamard(2, 0).unwrap();
        let p = ProbeOperator::clifford_adjoint(h).unwrap();
        assert!((p.unitarity().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_probe_validation() {
        assert!(ProbeOperator::pauli(PauliString::parse("-Z").unwrap()).is_err());
        assert!(ProbeOperator::pauli(PauliString::identity(2)).is_err());
        assert!(ProbeOperator::pauli(PauliString::parse("XY").unwrap()).is_ok());
    }
}
