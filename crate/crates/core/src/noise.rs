//! Markovian gate noise and state-preparation/measurement (SPAM) models.
//!
//! Every gate in a simulated sequence is implemented as `Λ_L ω(g) Λ_R`:
//! a gate-independent right (pre-gate) channel, the ideal gate action, and
//! a gate-independent left (post-gate) channel.  Between consecutive gates
//! the two factors merge into the effective sequence channel
//! `Λ = Λ_R Λ_L` (matrix product; `Λ_L` acts first), which is the object
//! the decay estimators recover.
//!
//! Channels are built from a small algebra of primitives — depolarizing
//! noise, Pauli channels, and coherent Pauli-axis rotations — combined in
//! listed order through [`NoiseConfig`], or supplied directly as transfer
//! matrices.  SPAM imperfections live in [`SpamModel`]: a noisy prepared
//! state and a noisy readout POVM, both validated for physicality.

use crate::error::{Error, Result};
use crate::liouville::{
    check_dense_cap, computational_povm, pauli_dim, pauli_tau_matrix, state_to_pauli_vec,
    PauliVec, SuperOperator,
};
use crate::pauli::PauliString;
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Tolerance used when validating channels and SPAM objects for
/// physicality (trace preservation, positivity).
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Depolarizing channel on the subsystem given by `qubit_mask` (qubit 0 is
/// the most significant bit): with probability `p` the marked subsystem is
/// replaced by the maximally mixed state.
///
/// In the Pauli basis this scales every basis element overlapping the mask
/// by `1 - p` and leaves the rest fixed.
pub fn depolarizing(n: usize, qubit_mask: u64, p: f64) -> Result<SuperOperator> {
    check_dense_cap(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing probability must lie in [0, 1], got {p}"
        )));
    }
    if qubit_mask == 0 || qubit_mask >= (1u64 << n) {
        return Err(Error::InvalidParameter(
            "depolarizing mask must select at least one valid qubit".into(),
        ));
    }
    let diag: Vec<f64> = (0..pauli_dim(n))
        .map(|i| {
            let support = PauliString::from_basis_index(n, i).expect("index").support();
            if support & qubit_mask != 0 {
                1.0 - p
            } else {
                1.0
            }
        })
        .collect();
    SuperOperator::from_diagonal(n, &diag)
}

/// Pauli channel `ρ ↦ Σ_P q_P P ρ P` with the given distribution over
/// n-qubit Paulis.  Diagonal in the Pauli basis with eigenvalues
/// `λ_j = Σ_P q_P (-1)^{[P, P_j anticommute]}`.
pub fn pauli_channel(n: usize, probs: &[(PauliString, f64)]) -> Result<SuperOperator> {
    check_dense_cap(n)?;
    if probs.is_empty() {
        return Err(Error::InvalidParameter("empty Pauli-channel distribution".into()));
    }
    let mut total = 0.0;
    for (p, q) in probs {
        if p.num_qubits() != n {
            return Err(Error::Dimension("Pauli-channel term width mismatch".into()));
        }
        if *q < -PHYSICALITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "negative Pauli-channel probability {q}"
            )));
        }
        total += q;
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "Pauli-channel probabilities sum to {total}, expected 1"
        )));
    }
    let diag: Vec<f64> = (0..pauli_dim(n))
        .map(|j| {
            let tau = PauliString::from_basis_index(n, j).expect("index");
            probs
                .iter()
                .map(|(p, q)| if p.commutes_with(&tau) { *q } else { -*q })
                .sum()
        })
        .collect();
    SuperOperator::from_diagonal(n, &diag)
}

/// Coherent rotation `exp(-i θ G / 2)` about a Hermitian Pauli axis `G`.
///
/// Basis elements commuting with `G` are fixed; an anticommuting `P` maps
/// to `cos θ · P + sin θ · (i P G)`.
pub fn pauli_rotation(n: usize, generator: &PauliString, theta: f64) -> Result<SuperOperator> {
    check_dense_cap(n)?;
    if generator.num_qubits() != n {
        return Err(Error::Dimension("rotation generator width mismatch".into()));
    }
    if !generator.is_hermitian() || generator.is_identity_support() {
        return Err(Error::InvalidParameter(
            "rotation generator must be a non-identity Hermitian Pauli".into(),
        ));
    }
    let dim = pauli_dim(n);
    let mut mat = DMatrix::<f64>::zeros(dim, dim);
    let (c, s) = (theta.cos(), theta.sin());
    for j in 0..dim {
        let p = PauliString::from_basis_index(n, j).expect("index");
        if p.commutes_with(generator) {
            mat[(j, j)] = 1.0;
        } else {
            mat[(j, j)] = c;
            let q = p.mul(generator).times_i_pow(1);
            mat[(q.basis_index(), j)] = s * q.hermitian_sign();
        }
    }
    SuperOperator::from_matrix(n, mat)
}

/// `R_Z(θ)` on one qubit of `n`.
pub fn rotation_z(n: usize, qubit: usize, theta: f64) -> Result<SuperOperator> {
    pauli_rotation(n, &PauliString::single(n, qubit, crate::pauli::Axis::Z)?, theta)
}

/// Two-qubit `exp(-i θ X_a X_b / 2)` coupling.
pub fn xx_coupling(n: usize, a: usize, b: usize, theta: f64) -> Result<SuperOperator> {
    let g = PauliString::single(n, a, crate::pauli::Axis::X)?
        .mul(&PauliString::single(n, b, crate::pauli::Axis::X)?);
    pauli_rotation(n, &g, theta)
}

/// Two-qubit `exp(-i θ Z_a Z_b / 2)` coupling.
pub fn zz_coupling(n: usize, a: usize, b: usize, theta: f64) -> Result<SuperOperator> {
    let g = PauliString::single(n, a, crate::pauli::Axis::Z)?
        .mul(&PauliString::single(n, b, crate::pauli::Axis::Z)?);
    pauli_rotation(n, &g, theta)
}

/// The gate-independent noise pair `(Λ_L, Λ_R)` bracketing every gate.
#[derive(Debug, Clone)]
pub struct GateNoiseModel {
    lambda_l: SuperOperator,
    lambda_r: SuperOperator,
}

impl GateNoiseModel {
    /// Noiseless model.
    pub fn ideal(n: usize) -> Result<Self> {
        Ok(Self {
            lambda_l: SuperOperator::identity(n)?,
            lambda_r: SuperOperator::identity(n)?,
        })
    }

    /// Build from both factors; each must be CPTP.
    pub fn new(lambda_l: SuperOperator, lambda_r: SuperOperator) -> Result<Self> {
        if lambda_l.num_qubits() != lambda_r.num_qubits() {
            return Err(Error::Dimension("noise factors act on different widths".into()));
        }
        for (name, ch) in [("left", &lambda_l), ("right", &lambda_r)] {
            if !ch.is_cptp(PHYSICALITY_TOL) {
                let report = ch.cptp_report();
                return Err(Error::NotCptp(format!(
                    "{name} noise factor: trace-preservation error {:.2e}, \
                     minimal Choi eigenvalue {:.2e}",
                    report.tp_error, report.min_choi_eigenvalue
                )));
            }
        }
        Ok(Self { lambda_l, lambda_r })
    }

    /// All noise on the left (post-gate) side.
    pub fn with_left(lambda_l: SuperOperator) -> Result<Self> {
        let id = SuperOperator::identity(lambda_l.num_qubits())?;
        Self::new(lambda_l, id)
    }

    /// All noise on the right (pre-gate) side.
    pub fn with_right(lambda_r: SuperOperator) -> Result<Self> {
        let id = SuperOperator::identity(lambda_r.num_qubits())?;
        Self::new(id, lambda_r)
    }

    pub fn num_qubits(&self) -> usize {
        self.lambda_l.num_qubits()
    }

    pub fn lambda_l(&self) -> &SuperOperator {
        &self.lambda_l
    }

    pub fn lambda_r(&self) -> &SuperOperator {
        &self.lambda_r
    }

    /// The effective inter-gate channel `Λ = Λ_R Λ_L` (`Λ_L` acts first).
    pub fn lambda(&self) -> SuperOperator {
        self.lambda_r.compose(&self.lambda_l).expect("matching widths")
    }

    pub fn is_ideal(&self) -> bool {
        let n = self.num_qubits();
        let id = SuperOperator::identity(n).expect("cap checked");
        (self.lambda_l.matrix() - id.matrix()).abs().max() == 0.0
            && (self.lambda_r.matrix() - id.matrix()).abs().max() == 0.0
    }
}

/// Noisy state preparation and readout.
///
/// `rho_tilde` is the actually prepared state (Pauli-basis vector) and
/// `povm_tilde` stacks the `2^n` actually measured effects as rows.
#[derive(Debug, Clone)]
pub struct SpamModel {
    n: usize,
    rho_tilde: PauliVec,
    povm_tilde: DMatrix<f64>,
}

impl SpamModel {
    /// Perfect preparation of `|0…0⟩` and computational-basis readout.
    pub fn ideal(n: usize) -> Result<Self> {
        Ok(Self {
            n,
            rho_tilde: state_to_pauli_vec(n, 0)?,
            povm_tilde: computational_povm(n)?,
        })
    }

    /// Build from explicit parts and validate physicality: `ρ̃` must be a
    /// state, each effect positive, and the effects must sum to identity.
    pub fn new(n: usize, rho_tilde: PauliVec, povm_tilde: DMatrix<f64>) -> Result<Self> {
        check_dense_cap(n)?;
        let dim = pauli_dim(n);
        let outcomes = 1usize << n;
        if rho_tilde.len() != dim || povm_tilde.nrows() != outcomes || povm_tilde.ncols() != dim {
            return Err(Error::Dimension("SPAM component dimensions mismatch".into()));
        }
        let rho = pauli_vec_to_matrix(n, &rho_tilde);
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "prepared state has trace {tr}, expected 1"
            )));
        }
        if min_hermitian_eigenvalue(&rho) < -PHYSICALITY_TOL {
            return Err(Error::InvalidParameter("prepared state is not positive".into()));
        }
        let mut sum = PauliVec::zeros(dim);
        for x in 0..outcomes {
            let row: PauliVec = povm_tilde.row(x).transpose();
            let eff = pauli_vec_to_matrix(n, &row);
            if min_hermitian_eigenvalue(&eff) < -PHYSICALITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "readout effect {x} is not positive"
                )));
            }
            sum += row;
        }
        let mut identity_effect = PauliVec::zeros(dim);
        identity_effect[0] = (outcomes as f64).sqrt();
        if (sum - identity_effect).abs().max() > 1e-6 {
            return Err(Error::InvalidParameter("readout effects do not sum to identity".into()));
        }
        Ok(Self { n, rho_tilde, povm_tilde })
    }

    /// Ideal readout preceded by independent classical bit flips with
    /// probability `r` on every qubit.
    pub fn with_readout_flip(n: usize, r: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "readout flip probability must lie in [0, 0.5], got {r}"
            )));
        }
        let mut flip = SuperOperator::identity(n)?;
        for i in 0..pauli_dim(n) {
            let p = PauliString::from_basis_index(n, i).expect("index");
            // A bit flip commutes with X; Y and Z components shrink.
            let damp = (p.z_bits().count_ones()) as i32;
            flip.matrix_mut()[(i, i)] = (1.0 - 2.0 * r).powi(damp);
        }
        let base = Self::ideal(n)?;
        // Effects transform contravariantly: Ẽ_x = Λ†(E_x).
        let povm_tilde = base.povm_tilde * flip.matrix();
        Self::new(n, base.rho_tilde, povm_tilde)
    }

    /// Apply a preparation-error channel to the ideal initial state.
    pub fn with_state_error(n: usize, channel: &SuperOperator) -> Result<Self> {
        if channel.num_qubits() != n {
            return Err(Error::Dimension("state-error channel width mismatch".into()));
        }
        let base = Self::ideal(n)?;
        let rho_tilde = channel.apply(&base.rho_tilde);
        Self::new(n, rho_tilde, base.povm_tilde)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rho_tilde(&self) -> &PauliVec {
        &self.rho_tilde
    }

    /// Effect of outcome bitstring `x` as a Pauli-basis row vector.
    pub fn effect(&self, x: u64) -> PauliVec {
        self.povm_tilde.row(x as usize).transpose()
    }

    pub fn povm(&self) -> &DMatrix<f64> {
        &self.povm_tilde
    }

    /// Outcome distribution for a state given as a Pauli-basis vector.
    pub fn outcome_probabilities(&self, state: &PauliVec) -> Vec<f64> {
        (&self.povm_tilde * state).iter().copied().collect()
    }

    /// Replace the prepared state (validated).
    pub fn map_state(&self, channel: &SuperOperator) -> Result<Self> {
        if channel.num_qubits() != self.n {
            return Err(Error::Dimension("state-error channel width mismatch".into()));
        }
        Self::new(self.n, channel.apply(&self.rho_tilde), self.povm_tilde.clone())
    }
}

/// Dense Hermitian matrix reconstructed from a Pauli-basis vector.
pub fn pauli_vec_to_matrix(n: usize, v: &PauliVec) -> DMatrix<Complex64> {
    let dh = 1usize << n;
    let mut out = DMatrix::<Complex64>::zeros(dh, dh);
    for (i, &c) in v.iter().enumerate() {
        if c != 0.0 {
            let p = PauliString::from_basis_index(n, i).expect("index");
            out += pauli_tau_matrix(&p) * Complex::new(c, 0.0);
        }
    }
    out
}

fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let sym = (m + m.adjoint()) * Complex::new(0.5, 0.0);
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// One primitive channel in a noise configuration.  Qubit lists use the
/// same numbering as Pauli labels (qubit 0 leftmost / most significant).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Depolarize the listed qubits jointly with probability `p`.
    Depolarizing { qubits: Vec<usize>, p: f64 },
    /// Pauli channel on the listed qubits; keys are Pauli labels of the
    /// same width (e.g. `"IX"`), values the probabilities.
    PauliChannel { qubits: Vec<usize>, probs: BTreeMap<String, f64> },
    /// `R_Z(θ)` on one qubit.
    RotationZ { qubit: usize, theta: f64 },
    /// `exp(-i θ X_a X_b / 2)`.
    XxCoupling { qubits: [usize; 2], theta: f64 },
    /// `exp(-i θ Z_a Z_b / 2)`.
    ZzCoupling { qubits: [usize; 2], theta: f64 },
}

impl ChannelSpec {
    /// Realize the primitive as an n-qubit transfer matrix.
    pub fn build(&self, n: usize) -> Result<SuperOperator> {
        match self {
            ChannelSpec::Depolarizing { qubits, p } => {
                depolarizing(n, qubit_mask(n, qubits)?, *p)
            }
            ChannelSpec::PauliChannel { qubits, probs } => {
                let k = qubits.len();
                if k == 0 {
                    return Err(Error::Config("Pauli channel needs at least one qubit".into()));
                }
                let terms: Vec<(PauliString, f64)> = probs
                    .iter()
                    .map(|(label, q)| {
                        let p = PauliString::parse(label)?;
                        if p.num_qubits() != k {
                            return Err(Error::Config(format!(
                                "Pauli label {label:?} does not match {k} listed qubits"
                            )));
                        }
                        Ok((p, *q))
                    })
                    .collect::<Result<_>>()?;
                qubit_mask(n, qubits)?; // validates the targets
                pauli_channel(k, &terms)?.embed(qubits, n)
            }
            ChannelSpec::RotationZ { qubit, theta } => rotation_z(n, *qubit, *theta),
            ChannelSpec::XxCoupling { qubits, theta } => {
                xx_coupling(n, qubits[0], qubits[1], *theta)
            }
            ChannelSpec::ZzCoupling { qubits, theta } => {
                zz_coupling(n, qubits[0], qubits[1], *theta)
            }
        }
    }
}

fn qubit_mask(n: usize, qubits: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    for &q in qubits {
        if q >= n {
            return Err(Error::Config(format!("qubit {q} out of range for n = {n}")));
        }
        let bit = 1u64 << (n - 1 - q);
        if mask & bit != 0 {
            return Err(Error::Config(format!("qubit {q} listed twice")));
        }
        mask |= bit;
    }
    Ok(mask)
}

/// Compose a channel list in listed order (first entry acts first).
pub fn compose_channel_list(n: usize, specs: &[ChannelSpec]) -> Result<SuperOperator> {
    let mut acc = SuperOperator::identity(n)?;
    for spec in specs {
        acc = spec.build(n)?.compose(&acc)?;
    }
    Ok(acc)
}

/// Declarative noise configuration: channel lists for both gate-noise
/// factors plus optional SPAM imperfections.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Post-gate factor `Λ_L`, applied in listed order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub left: Vec<ChannelSpec>,
    /// Pre-gate factor `Λ_R`, applied in listed order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub right: Vec<ChannelSpec>,
    /// Independent readout bit-flip probability per qubit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_flip: Option<f64>,
    /// Channels distorting the prepared state, applied in listed order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub state_error: Vec<ChannelSpec>,
}

impl NoiseConfig {
    pub fn is_trivial(&self) -> bool {
        self.left.is_empty()
            && self.right.is_empty()
            && self.readout_flip.is_none()
            && self.state_error.is_empty()
    }
}

/// Realize a configuration as validated gate-noise and SPAM models.
pub fn build_noise_model(n: usize, config: &NoiseConfig) -> Result<(GateNoiseModel, SpamModel)> {
    let lambda_l = compose_channel_list(n, &config.left)?;
    let lambda_r = compose_channel_list(n, &config.right)?;
    let gate_noise = GateNoiseModel::new(lambda_l, lambda_r)?;
    let mut spam = match config.readout_flip {
        Some(r) => SpamModel::with_readout_flip(n, r)?,
        None => SpamModel::ideal(n)?,
    };
    if !config.state_error.is_empty() {
        let ch = compose_channel_list(n, &config.state_error)?;
        spam = spam.map_state(&ch)?;
    }
    Ok((gate_noise, spam))
}
