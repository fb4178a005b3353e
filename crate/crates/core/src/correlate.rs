//! Sequence-correlation evaluation: turning raw records into numbers.
//!
//! The single-shot correlator of a record `(m, g⃗, x)` against a probe `A` is
//!
//! ```text
//! f_A(x, g⃗) = α ⟨⟨E_x| P ω(g_m) ∏_{i<m} (A ω(g_i)) |ρ*⟩⟩
//! ```
//!
//! evaluated entirely with *ideal* state and measurement operators — that is
//! the mechanism making fitted decay rates immune to state-preparation and
//! readout errors, which only rescale the prefactor.  `|ρ*⟩⟩` is the
//! computational all-zeros state restricted to the probe's block; for the
//! multi-qubit Clifford ensemble it carries the dual-frame weight
//! `2^n/(2^n−1)` that normalizes the ideal, noiseless sequence average to 1
//! at every length (the same reweighting that makes state-shadow estimators
//! unbiased).  The local-Clifford and Pauli-interleaved conventions are
//! already exactly normalized and use the plain projected state.
//!
//! Three evaluation strategies are provided:
//! * [`correlate_dense`] — the literal dense-matrix chain; the reference.
//! * [`correlate_pauli_prop`] — signed-Pauli propagation for Clifford gates
//!   and Clifford/rank-one probes; bit-level, equal to the dense value.
//! * [`correlate_pauli_tau`] — closed form for Pauli-interleaved records
//!   with a rank-one probe; `O(m·n)` per record.
//!
//! [`CompiledShadow`] caches per-record signed permutations once so that many
//! probes can be swept over the same shadow cheaply.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::clifford::PauliPermutation;
use crate::error::{Error, Result};
use crate::experiment::{GateSequence, GateSet, GateSetShadow};
use crate::liouville::{
    check_dense_cap, pauli_dim, state_to_pauli_vec, IrrepKind, PauliVec, SuperOperator,
};
use crate::pauli::PauliString;
use crate::probe::{ProbeKind, ProbeOperator};

/// Per-length collections of single-shot correlator values, in record order.
#[derive(Debug, Clone)]
pub struct CorrelatorTable {
    lengths: Vec<usize>,
    values: Vec<Vec<f64>>,
}

impl CorrelatorTable {
    pub fn new(lengths: Vec<usize>, values: Vec<Vec<f64>>) -> Result<Self> {
        if lengths.len() != values.len() {
            return Err(Error::Estimation(
                "correlator table lengths/values mismatch".into(),
            ));
        }
        Ok(Self { lengths, values })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Raw single-shot values at sequence length `m`.
    pub fn values_for(&self, m: usize) -> Option<&[f64]> {
        let li = self.lengths.iter().position(|&l| l == m)?;
        Some(&self.values[li])
    }

    /// Plain per-length means `(m, mean)`.
    pub fn sequence_means(&self) -> Vec<(usize, f64)> {
        self.lengths
            .iter()
            .zip(&self.values)
            .map(|(&m, v)| (m, mean(v)))
            .collect()
    }

    /// Mean over a resampled index multiset at length position `li`; the
    /// index list can be shared across tables so that bootstrap replicas of
    /// different probes stay correlated.
    pub fn mean_with_indices(&self, li: usize, indices: &[usize]) -> f64 {
        let v = &self.values[li];
        mean_indexed(v, indices)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_indexed(v: &[f64], indices: &[usize]) -> f64 {
    if indices.is_empty() {
        return f64::NAN;
    }
    indices.iter().map(|&i| v[i]).sum::<f64>() / indices.len() as f64
}

/// The ideal post-processing state vector for a probe: the all-zeros state
/// projected onto the probe's block, with the ensemble's normalization.
fn post_state(n: usize, probe: &ProbeOperator) -> Result<PauliVec> {
    let mut v = state_to_pauli_vec(n, 0)?;
    match probe.gate_set() {
        GateSet::MultiQubitClifford => {
            v[0] = 0.0;
            // Dual-frame weight: ⟨⟨ρ|P_ad|ρ⟩⟩ = (2^n−1)/2^n for |0…0⟩.
            let d = (1u64 << n) as f64;
            v *= d / (d - 1.0);
        }
        GateSet::PauliInterleaved => {
            v[0] = 0.0;
        }
        GateSet::LocalClifford => {
            let w = match probe.irrep().kind() {
                IrrepKind::Local { w } => w,
                IrrepKind::Adjoint => {
                    return Err(Error::ProbeMismatch(
                        "local-Clifford correlators need a local(w) probe".into(),
                    ))
                }
            };
            for idx in 0..v.len() {
                let (x, z) = split_index(n, idx);
                if x | z != w {
                    v[idx] = 0.0;
                }
            }
        }
    }
    Ok(v)
}

fn split_index(n: usize, idx: usize) -> (u64, u64) {
    let mask = (1u64 << n) - 1;
    ((idx as u64 >> n) & mask, idx as u64 & mask)
}

/// `⟨⟨E_x|v⟩⟩` for the computational-basis effect `E_x = |x⟩⟨x|`.  Only the
/// Z-type rows (basis indices `0..2^n`) contribute.
fn effect_dot(n: usize, x: u64, v: &PauliVec) -> f64 {
    let scale = 1.0 / ((1u64 << n) as f64).sqrt();
    let mut acc = 0.0;
    for z in 0..1u64 << n {
        let sign = if (x & z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        acc += sign * v[z as usize];
    }
    scale * acc
}

fn check_compat(probe: &ProbeOperator, gate_set: GateSet, n: usize) -> Result<()> {
    if probe.num_qubits() != n {
        return Err(Error::ProbeMismatch(format!(
            "probe acts on {} qubits, records on {n}",
            probe.num_qubits()
        )));
    }
    if probe.gate_set() != gate_set {
        return Err(Error::ProbeMismatch(format!(
            "probe normalized for {:?}, records from {:?}",
            probe.gate_set(),
            gate_set
        )));
    }
    Ok(())
}

fn sequence_gate_set(seq: &GateSequence) -> GateSet {
    match seq {
        GateSequence::MultiQubit(_) => GateSet::MultiQubitClifford,
        GateSequence::Local(_) => GateSet::LocalClifford,
        GateSequence::PauliInterleaved { .. } => GateSet::PauliInterleaved,
    }
}

/// Reference evaluation: the literal dense-matrix chain.
pub fn correlate_dense(probe: &ProbeOperator, seq: &GateSequence, outcome: u64) -> Result<f64> {
    let n = seq.num_qubits();
    check_dense_cap(n)?;
    check_compat(probe, sequence_gate_set(seq), n)?;
    let a = probe.matrix()?;
    let mut v = post_state(n, probe)?;

    match seq {
        GateSequence::MultiQubit(gates) => {
            for (i, g) in gates.iter().enumerate() {
                if i > 0 {
                    v = a.apply(&v);
                }
                v = g.to_ptm()?.apply(&v);
            }
        }
        GateSequence::Local(layers) => {
            for (i, layer) in layers.iter().enumerate() {
                if i > 0 {
                    v = a.apply(&v);
                }
                v = layer.to_clifford()?.to_ptm()?.apply(&v);
            }
        }
        GateSequence::PauliInterleaved { frame, paulis } => {
            v = frame.to_ptm()?.apply(&v);
            for (i, p) in paulis.iter().enumerate() {
                if i > 0 {
                    v = a.apply(&v);
                }
                v = pauli_conjugation_ptm(n, p)?.apply(&v);
            }
            v = frame.invert()?.to_ptm()?.apply(&v);
        }
    }
    Ok(probe.alpha() * effect_dot(n, outcome, &v))
}

/// The PTM of conjugation by a Pauli: diagonal ±1 signs.
fn pauli_conjugation_ptm(n: usize, p: &PauliString) -> Result<SuperOperator> {
    let dim = pauli_dim(n);
    let mut diag = DMatrix::<f64>::zeros(dim, dim);
    for idx in 0..dim {
        let b = PauliString::from_basis_index(n, idx)?;
        diag[(idx, idx)] = if p.commutes_with(&b) { 1.0 } else { -1.0 };
    }
    SuperOperator::from_matrix(n, diag)
}

/// A probe's action prepared for repeated fast application.
enum ProbeAction {
    Permutation(PauliPermutation),
    Dense(SuperOperator),
    RankOne(usize),
}

impl ProbeAction {
    fn build(probe: &ProbeOperator) -> Result<Self> {
        Ok(match probe.kind() {
            ProbeKind::CliffordUnitary(c) => {
                ProbeAction::Permutation(PauliPermutation::from_clifford(c)?)
            }
            ProbeKind::Dense(_) => ProbeAction::Dense(probe.matrix()?),
            ProbeKind::RankOnePauli(tau) => ProbeAction::RankOne(tau.basis_index()),
        })
    }

    fn apply(&self, probe: &ProbeOperator, v: &mut PauliVec, scratch: &mut PauliVec) {
        match self {
            ProbeAction::Permutation(perm) => {
                // P ω(a) P: project, permute (the permutation of a Clifford
                // preserves every block, so one projection suffices).
                probe.irrep().project_vec(v);
                perm.apply_into(v, scratch);
                std::mem::swap(v, scratch);
            }
            ProbeAction::Dense(a) => {
                let w = a.apply(v);
                v.copy_from(&w);
            }
            ProbeAction::RankOne(t) => {
                let c = v[*t];
                v.fill(0.0);
                v[*t] = c;
            }
        }
    }
}

/// One record, lowered to signed-permutation form.
struct CompiledRecord {
    outcome: u64,
    gates: CompiledGates,
}

enum CompiledGates {
    /// Multi-qubit or local Clifford sequences: one permutation per gate.
    Perms(Vec<PauliPermutation>),
    /// Pauli-interleaved sequences keep the frame action and raw Paulis.
    Interleaved {
        frame: PauliPermutation,
        frame_inv: PauliPermutation,
        paulis: Vec<PauliString>,
    },
}

/// A shadow with every record pre-lowered for fast correlation sweeps.
pub struct CompiledShadow {
    num_qubits: usize,
    gate_set: GateSet,
    lengths: Vec<usize>,
    records: Vec<Vec<CompiledRecord>>,
}

impl CompiledShadow {
    pub fn compile(shadow: &GateSetShadow) -> Result<Self> {
        let n = shadow.num_qubits();
        let gate_set = shadow.config().gate_set;
        let lengths = shadow.lengths();
        let mut records = Vec::with_capacity(lengths.len());
        for &m in &lengths {
            let mut bucket = Vec::new();
            for rec in shadow.records_for_length(m) {
                bucket.push(compile_record(&rec.gates, rec.outcome)?);
            }
            records.push(bucket);
        }
        Ok(Self {
            num_qubits: n,
            gate_set,
            lengths,
            records,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gate_set(&self) -> GateSet {
        self.gate_set
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Number of records at length `m`.
    pub fn count_for(&self, m: usize) -> usize {
        self.lengths
            .iter()
            .position(|&l| l == m)
            .map(|li| self.records[li].len())
            .unwrap_or(0)
    }

    /// Evaluate one probe against every record.
    pub fn correlate(&self, probe: &ProbeOperator) -> Result<CorrelatorTable> {
        check_compat(probe, self.gate_set, self.num_qubits)?;
        let n = self.num_qubits;
        let action = ProbeAction::build(probe)?;
        let state = post_state(n, probe)?;
        let values = self
            .records
            .par_iter()
            .map(|bucket| {
                bucket
                    .iter()
                    .map(|rec| eval_compiled(n, probe, &action, &state, rec))
                    .collect::<Vec<f64>>()
            })
            .collect();
        CorrelatorTable::new(self.lengths.clone(), values)
    }
}

fn compile_record(seq: &GateSequence, outcome: u64) -> Result<CompiledRecord> {
    let gates = match seq {
        GateSequence::MultiQubit(gates) => CompiledGates::Perms(
            gates
                .iter()
                .map(PauliPermutation::from_clifford)
                .collect::<Result<_>>()?,
        ),
        GateSequence::Local(layers) => CompiledGates::Perms(
            layers
                .iter()
                .map(|l| l.action())
                .collect::<Result<_>>()?,
        ),
        GateSequence::PauliInterleaved { frame, paulis } => CompiledGates::Interleaved {
            frame: PauliPermutation::from_clifford(frame)?,
            frame_inv: PauliPermutation::from_clifford(&frame.invert()?)?,
            paulis: paulis.clone(),
        },
    };
    Ok(CompiledRecord { outcome, gates })
}

fn eval_compiled(
    n: usize,
    probe: &ProbeOperator,
    action: &ProbeAction,
    state: &PauliVec,
    rec: &CompiledRecord,
) -> f64 {
    match (&rec.gates, action) {
        // Rank-one probes on interleaved records short-circuit to the
        // closed form; everything else walks the chain.
        (
            CompiledGates::Interleaved {
                frame_inv, paulis, ..
            },
            ProbeAction::RankOne(t),
        ) => rank_one_interleaved(n, probe.alpha(), frame_inv, paulis, *t, rec.outcome),
        (CompiledGates::Perms(perms), _) => {
            let mut v = state.clone();
            let mut scratch = v.clone();
            for (i, perm) in perms.iter().enumerate() {
                if i > 0 {
                    action.apply(probe, &mut v, &mut scratch);
                }
                perm.apply_into(&v, &mut scratch);
                std::mem::swap(&mut v, &mut scratch);
            }
            probe.alpha() * effect_dot(n, rec.outcome, &v)
        }
        (
            CompiledGates::Interleaved {
                frame,
                frame_inv,
                paulis,
            },
            _,
        ) => {
            let mut v = state.clone();
            let mut scratch = v.clone();
            frame.apply_into(&v, &mut scratch);
            std::mem::swap(&mut v, &mut scratch);
            for (i, p) in paulis.iter().enumerate() {
                if i > 0 {
                    action.apply(probe, &mut v, &mut scratch);
                }
                apply_pauli_signs(n, p, &mut v);
            }
            frame_inv.apply_into(&v, &mut scratch);
            std::mem::swap(&mut v, &mut scratch);
            probe.alpha() * effect_dot(n, rec.outcome, &v)
        }
    }
}

/// Conjugation by a Pauli, applied in place (diagonal ±1).
fn apply_pauli_signs(n: usize, p: &PauliString, v: &mut PauliVec) {
    let mask = (1u64 << n) - 1;
    let (px, pz) = (p.x_bits(), p.z_bits());
    for idx in 0..v.len() {
        let bx = (idx as u64 >> n) & mask;
        let bz = idx as u64 & mask;
        // Symplectic form ⟨p, b⟩ decides commutation.
        let par = ((px & bz).count_ones() + (pz & bx).count_ones()) % 2;
        if par == 1 {
            v[idx] = -v[idx];
        }
    }
}

/// Closed form for a rank-one probe `|τ⟩⟩⟨⟨τ|` against an interleaved record
/// `(c, p₁..p_m, x)`.  The chain factors through `|τ⟩⟩`: each Pauli
/// contributes its commutation sign with `τ`, and the two boundary overlaps
/// both contain `σ = c⁻¹τc`, whose conjugation sign therefore cancels.  The
/// value vanishes unless `σ` is Z-type.
fn rank_one_interleaved(
    n: usize,
    alpha: f64,
    frame_inv: &PauliPermutation,
    paulis: &[PauliString],
    t_idx: usize,
    outcome: u64,
) -> f64 {
    let d = (1u64 << n) as f64;
    if paulis.len() == 1 {
        // No insertion happens at m = 1: the record reduces to the single
        // conjugated Pauli q = c⁻¹p₁c flipping (or not) the outcome.
        let (q_idx, _) = frame_inv.map_index(paulis[0].basis_index());
        let q_x = (q_idx >> n) as u64;
        let hit = if outcome == q_x { 1.0 } else { 0.0 };
        return alpha * (hit - 1.0 / d);
    }
    let (sigma_idx, _) = frame_inv.map_index(t_idx);
    if sigma_idx >> n != 0 {
        return 0.0; // σ has an X component: no overlap with ⟨⟨x| or |0⟩⟩.
    }
    let sigma_z = sigma_idx as u64;
    let tau = PauliString::from_basis_index(n, t_idx).expect("cached index valid");
    let mut parity = 0u32;
    for p in paulis {
        if !p.commutes_with(&tau) {
            parity ^= 1;
        }
    }
    let sign = if parity == 0 { 1.0 } else { -1.0 };
    let readout = if (sigma_z & outcome).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    alpha * sign * readout / d
}

/// Signed-Pauli propagation for one record; equal to [`correlate_dense`].
pub fn correlate_pauli_prop(
    probe: &ProbeOperator,
    seq: &GateSequence,
    outcome: u64,
) -> Result<f64> {
    let n = seq.num_qubits();
    check_compat(probe, sequence_gate_set(seq), n)?;
    let action = ProbeAction::build(probe)?;
    let state = post_state(n, probe)?;
    let rec = compile_record(seq, outcome)?;
    Ok(eval_compiled(n, probe, &action, &state, &rec))
}

/// Closed-form correlator for a Pauli-interleaved record against `|τ⟩⟩⟨⟨τ|`.
pub fn correlate_pauli_tau(tau: &PauliString, seq: &GateSequence, outcome: u64) -> Result<f64> {
    let n = seq.num_qubits();
    let probe = ProbeOperator::pauli(tau.clone())?;
    match seq {
        GateSequence::PauliInterleaved { frame, paulis } => {
            if paulis.is_empty() {
                return Err(Error::Estimation("empty interleaved record".into()));
            }
            let frame_inv = PauliPermutation::from_clifford(&frame.invert()?)?;
            Ok(rank_one_interleaved(
                n,
                probe.alpha(),
                &frame_inv,
                paulis,
                tau.basis_index(),
                outcome,
            ))
        }
        _ => Err(Error::ProbeMismatch(
            "correlate_pauli_tau needs a Pauli-interleaved record".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{sample_clifford, sample_pauli, CliffordElement};
    use crate::experiment::{run_experiment, ExperimentConfig};
    use crate::noise::NoiseConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn noiseless_config(gate_set: GateSet, n: usize, lengths: Vec<usize>, s: usize) -> ExperimentConfig {
        ExperimentConfig {
            gate_set,
            num_qubits: n,
            lengths,
            sequences_per_length: s,
            shots_per_sequence: 1,
            seed: 7,
            noise: NoiseConfig::default(),
        }
    }

    #[test]
    fn identity_record_matches_hand_value() {
        // n=1, m=1, identity gate, outcome 0: dual-frame boundary gives
        // α·(d/(d−1))·‖P_ad|0⟩⟩‖² = 3 · 2 · 1/2 = 3.
        let probe = ProbeOperator::clifford_adjoint(CliffordElement::identity(1).unwrap()).unwrap();
        let seq = GateSequence::MultiQubit(vec![CliffordElement::identity(1).unwrap()]);
        let f = correlate_dense(&probe, &seq, 0).unwrap();
        assert!((f - 3.0).abs() < 1e-12, "f = {f}");
        assert!((correlate_pauli_prop(&probe, &seq, 0).unwrap() - 3.0).abs() < 1e-12);
        // Outcome 1 flips the Z-row sign.
        assert!((correlate_dense(&probe, &seq, 1).unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_multi_average_is_one_at_every_length() {
        let config = noiseless_config(GateSet::MultiQubitClifford, 2, vec![1, 2, 3], 4000);
        let shadow = run_experiment(&config).unwrap();
        let probe = ProbeOperator::clifford_adjoint(CliffordElement::identity(2).unwrap()).unwrap();
        let table = CompiledShadow::compile(&shadow)
            .unwrap()
            .correlate(&probe)
            .unwrap();
        for (m, mean) in table.sequence_means() {
            assert!(
                (mean - 1.0).abs() < 0.12,
                "noiseless mean at m={m} was {mean}"
            );
        }
    }

    #[test]
    fn noiseless_local_average_is_one() {
        let config = noiseless_config(GateSet::LocalClifford, 2, vec![1, 2, 4], 4000);
        let shadow = run_experiment(&config).unwrap();
        let layer = crate::clifford::LocalCliffordElement::identity(2);
        for w in [0b01u64, 0b11] {
            let probe = ProbeOperator::local_clifford(&layer, w).unwrap();
            let table = CompiledShadow::compile(&shadow)
                .unwrap()
                .correlate(&probe)
                .unwrap();
            for (m, mean) in table.sequence_means() {
                assert!(
                    (mean - 1.0).abs() < 0.25,
                    "w={w:b} noiseless mean at m={m} was {mean}"
                );
            }
        }
    }

    #[test]
    fn noiseless_interleaved_average_is_one_for_m_ge_2() {
        let config = noiseless_config(GateSet::PauliInterleaved, 2, vec![2, 3, 5], 4000);
        let shadow = run_experiment(&config).unwrap();
        let compiled = CompiledShadow::compile(&shadow).unwrap();
        let tau = PauliString::parse("ZX").unwrap();
        let probe = ProbeOperator::pauli(tau).unwrap();
        let table = compiled.correlate(&probe).unwrap();
        for (m, mean) in table.sequence_means() {
            assert!(
                (mean - 1.0).abs() < 0.25,
                "interleaved noiseless mean at m={m} was {mean}"
            );
        }
    }

    #[test]
    fn prop_equals_dense_on_random_records() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for n in 1..=2usize {
            let clifford_probe =
                ProbeOperator::clifford_adjoint(sample_clifford(n, &mut rng).unwrap()).unwrap();
            for m in [1usize, 2, 5] {
                let gates: Vec<_> = (0..m)
                    .map(|_| sample_clifford(n, &mut rng).unwrap())
                    .collect();
                let seq = GateSequence::MultiQubit(gates);
                for outcome in 0..1u64 << n {
                    let dense = correlate_dense(&clifford_probe, &seq, outcome).unwrap();
                    let prop = correlate_pauli_prop(&clifford_probe, &seq, outcome).unwrap();
                    assert!(
                        (dense - prop).abs() < 1e-10,
                        "n={n} m={m} x={outcome}: {dense} vs {prop}"
                    );
                }
            }
        }
    }

    #[test]
    fn tau_closed_form_matches_dense_chain() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 2;
        for m in [1usize, 2, 4] {
            let frame = sample_clifford(n, &mut rng).unwrap();
            let paulis: Vec<_> = (0..m)
                .map(|_| sample_pauli(n, &mut rng).unwrap())
                .collect();
            let seq = GateSequence::PauliInterleaved {
                frame: frame.clone(),
                paulis,
            };
            for t in 1..pauli_dim(n) {
                let tau = PauliString::from_basis_index(n, t).unwrap();
                let probe = ProbeOperator::pauli(tau.clone()).unwrap();
                for outcome in 0..1u64 << n {
                    let dense = correlate_dense(&probe, &seq, outcome).unwrap();
                    let fast = correlate_pauli_tau(&tau, &seq, outcome).unwrap();
                    assert!(
                        (dense - fast).abs() < 1e-10,
                        "m={m} τ#{t} x={outcome}: {dense} vs {fast}"
                    );
                }
            }
        }
    }

    #[test]
    fn probe_killed_component_gives_zero() {
        // A sequence whose first gate maps Z off the Z-axis: the rank-one
        // Z-probe's component is annihilated at the probe insertion.
        let h = CliffordElement::hadamard(1, 0).unwrap();
        let seq = GateSequence::MultiQubit(vec![h.clone(), h]);
        let tau = PauliString::parse("Z").unwrap();
        let probe = ProbeOperator::rank_one_ad(tau).unwrap();
        for outcome in 0..2 {
            let f = correlate_pauli_prop(&probe, &seq, outcome).unwrap();
            assert_eq!(f, 0.0);
        }
    }

    #[test]
    fn mismatched_probe_is_rejected() {
        let probe = ProbeOperator::clifford_adjoint(CliffordElement::identity(2).unwrap()).unwrap();
        let seq = GateSequence::Local(vec![crate::clifford::LocalCliffordElement::identity(2)]);
        assert!(correlate_dense(&probe, &seq, 0).is_err());
        let seq1 = GateSequence::MultiQubit(vec![CliffordElement::identity(1).unwrap()]);
        assert!(correlate_dense(&probe, &seq1, 0).is_err());
    }

    #[test]
    fn table_bookkeeping() {
        let t = CorrelatorTable::new(vec![1, 2], vec![vec![1.0, 3.0], vec![2.0]]).unwrap();
        assert_eq!(t.values_for(2), Some(&[2.0][..]));
        assert_eq!(t.sequence_means(), vec![(1, 2.0), (2, 2.0)]);
        assert_eq!(t.mean_with_indices(0, &[1, 1]), 3.0);
        assert!(CorrelatorTable::new(vec![1], vec![]).is_err());
    }
}
