//! Synthetic randomized-sequence experiments.
//!
//! An experiment draws random gate sequences of several lengths, pushes
//! the prepared state through the noisy implementation of each sequence,
//! and records a single measured bitstring per shot.  The collection of
//! (sequence, outcome) pairs — the *shadow* — is the only data the
//! estimators see; everything downstream is classical post-processing.
//!
//! Three sequence ensembles are supported:
//!
//! * [`GateSet::MultiQubitClifford`] — independent uniform n-qubit
//!   Cliffords at every time step;
//! * [`GateSet::LocalClifford`] — independent uniform single-qubit
//!   Cliffords on every qubit at every time step;
//! * [`GateSet::PauliInterleaved`] — a uniform Clifford frame `c`, then
//!   `m` uniform Paulis, closed by the ideal `c⁻¹`.  The frame and its
//!   inverse are treated as noiseless; the inter-gate channel acts once
//!   after every Pauli.
//!
//! Randomness is reproducible and order-independent: one master seed, one
//! dedicated stream per sequence (gates first, then outcomes), so a record
//! is identical no matter how many threads simulated its neighbours.

use crate::clifford::{
    sample_clifford, sample_local_clifford, sample_pauli, CliffordElement, LocalCliffordElement,
    PauliPermutation,
};
use crate::error::{Error, Result};
use crate::liouville::{check_dense_cap, PauliVec, SuperOperator};
use crate::noise::{build_noise_model, GateNoiseModel, NoiseConfig, SpamModel};
use crate::pauli::PauliString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The random-gate ensemble driving an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateSet {
    MultiQubitClifford,
    LocalClifford,
    PauliInterleaved,
}

/// Full description of a synthetic experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub gate_set: GateSet,
    pub num_qubits: usize,
    /// Sequence lengths `m` to cover.
    pub lengths: Vec<usize>,
    /// Independently drawn sequences per length.
    pub sequences_per_length: usize,
    /// Measured repetitions of each drawn sequence.
    #[serde(default = "default_shots")]
    pub shots_per_sequence: usize,
    /// Master seed; every sequence derives its own RNG stream from it.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "NoiseConfig::is_trivial")]
    pub noise: NoiseConfig,
}

fn default_shots() -> usize {
    1
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_dense_cap(self.num_qubits)?;
        if self.lengths.is_empty() {
            return Err(Error::Config("no sequence lengths given".into()));
        }
        if self.lengths.iter().any(|&m| m == 0) {
            return Err(Error::Config("sequence lengths must be positive".into()));
        }
        if self.sequences_per_length == 0 {
            return Err(Error::Config("sequences_per_length must be positive".into()));
        }
        if self.shots_per_sequence == 0 {
            return Err(Error::Config("shots_per_sequence must be positive".into()));
        }
        Ok(())
    }
}

/// The random gates of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSequence {
    MultiQubit(Vec<CliffordElement>),
    Local(Vec<LocalCliffordElement>),
    /// Frame `c`, the interleaved Paulis in time order, and the implicit
    /// closing `c⁻¹`.
    PauliInterleaved {
        frame: CliffordElement,
        paulis: Vec<PauliString>,
    },
}

impl GateSequence {
    /// Number of random time steps `m`.
    pub fn length(&self) -> usize {
        match self {
            GateSequence::MultiQubit(g) => g.len(),
            GateSequence::Local(g) => g.len(),
            GateSequence::PauliInterleaved { paulis, .. } => paulis.len(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            GateSequence::MultiQubit(g) => g[0].num_qubits(),
            GateSequence::Local(g) => g[0].num_qubits(),
            GateSequence::PauliInterleaved { frame, .. } => frame.num_qubits(),
        }
    }
}

/// One measured shot of one random sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRecord {
    /// Sequence length `m`.
    pub length: usize,
    pub gates: GateSequence,
    /// Measured bitstring; qubit 0 is the most significant bit.
    pub outcome: u64,
}

/// A full synthetic data set: the generating configuration plus all
/// (sequence, outcome) records in generation order.
#[derive(Debug, Clone)]
pub struct GateSetShadow {
    config: ExperimentConfig,
    records: Vec<ShadowRecord>,
}

impl GateSetShadow {
    pub fn new(config: ExperimentConfig, records: Vec<ShadowRecord>) -> Result<Self> {
        config.validate()?;
        for (i, r) in records.iter().enumerate() {
            if r.gates.num_qubits() != config.num_qubits {
                return Err(Error::Dimension(format!(
                    "record {i} acts on {} qubits, config says {}",
                    r.gates.num_qubits(),
                    config.num_qubits
                )));
            }
            if r.gates.length() != r.length {
                return Err(Error::Dimension(format!(
                    "record {i} declares length {} but stores {} steps",
                    r.length,
                    r.gates.length()
                )));
            }
            if r.outcome >= (1u64 << config.num_qubits) {
                return Err(Error::Dimension(format!(
                    "record {i} outcome {} out of range",
                    r.outcome
                )));
            }
        }
        Ok(Self { config, records })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn num_qubits(&self) -> usize {
        self.config.num_qubits
    }

    pub fn records(&self) -> &[ShadowRecord] {
        &self.records
    }

    /// Distinct lengths present, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        let mut ls: Vec<usize> = self.records.iter().map(|r| r.length).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn records_for_length(&self, m: usize) -> impl Iterator<Item = &ShadowRecord> {
        self.records.iter().filter(move |r| r.length == m)
    }
}

/// Compiled noisy action of one sequence on Pauli-basis vectors.
struct SequenceSimulator<'a> {
    noise: &'a GateNoiseModel,
    lambda: Option<SuperOperator>,
    noisy: bool,
}

impl<'a> SequenceSimulator<'a> {
    fn new(noise: &'a GateNoiseModel, gate_set: GateSet) -> Self {
        let noisy = !noise.is_ideal();
        let lambda = match gate_set {
            GateSet::PauliInterleaved if noisy => Some(noise.lambda()),
            _ => None,
        };
        Self { noise, lambda, noisy }
    }

    /// Final pre-measurement state for `gates` applied to `rho`.
    fn propagate(&self, gates: &GateSequence, rho: &PauliVec) -> Result<PauliVec> {
        let mut state = rho.clone();
        match gates {
            GateSequence::MultiQubit(seq) => {
                for g in seq {
                    state = self.noisy_gate(&g.action()?, state);
                }
            }
            GateSequence::Local(seq) => {
                for g in seq {
                    state = self.noisy_gate(&g.action()?, state);
                }
            }
            GateSequence::PauliInterleaved { frame, paulis } => {
                state = frame.action()?.apply(&state);
                for p in paulis {
                    state = pauli_sign_action(p, state);
                    if let Some(lambda) = &self.lambda {
                        state = lambda.apply(&state);
                    }
                }
                state = frame.invert()?.action()?.apply(&state);
            }
        }
        Ok(state)
    }

    fn noisy_gate(&self, action: &PauliPermutation, state: PauliVec) -> PauliVec {
        if self.noisy {
            let pre = self.noise.lambda_r().apply(&state);
            self.noise.lambda_l().apply(&action.apply(&pre))
        } else {
            action.apply(&state)
        }
    }
}

/// Conjugation by a Pauli: flips the sign of anticommuting basis elements.
fn pauli_sign_action(p: &PauliString, mut state: PauliVec) -> PauliVec {
    let n = p.num_qubits();
    for i in 0..state.len() {
        let tau = PauliString::from_basis_index(n, i).expect("index");
        if !tau.commutes_with(p) {
            state[i] = -state[i];
        }
    }
    state
}

fn draw_sequence<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    m: usize,
    rng: &mut R,
) -> Result<GateSequence> {
    let n = config.num_qubits;
    Ok(match config.gate_set {
        GateSet::MultiQubitClifford => GateSequence::MultiQubit(
            (0..m).map(|_| sample_clifford(n, rng)).collect::<Result<_>>()?,
        ),
        GateSet::LocalClifford => {
            GateSequence::Local((0..m).map(|_| sample_local_clifford(n, rng)).collect())
        }
        GateSet::PauliInterleaved => GateSequence::PauliInterleaved {
            frame: sample_clifford(n, rng)?,
            paulis: (0..m).map(|_| sample_pauli(n, rng)).collect::<Result<_>>()?,
        },
    })
}

fn draw_outcome<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<u64> {
    let mut total = 0.0;
    for &p in probs {
        if p < -1e-9 {
            return Err(Error::Estimation(format!(
                "negative outcome probability {p:.3e}: model is not physical"
            )));
        }
        total += p.max(0.0);
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Estimation(format!(
            "outcome probabilities sum to {total}, expected 1"
        )));
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (x, &p) in probs.iter().enumerate() {
        acc += p.max(0.0);
        if u < acc {
            return Ok(x as u64);
        }
    }
    Ok(probs.len() as u64 - 1)
}

/// Simulate one sequence and measure `shots` outcomes.
pub fn simulate_sequence<R: Rng + ?Sized>(
    gates: &GateSequence,
    noise: &GateNoiseModel,
    spam: &SpamModel,
    gate_set: GateSet,
    shots: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let sim = SequenceSimulator::new(noise, gate_set);
    let state = sim.propagate(gates, spam.rho_tilde())?;
    let probs = spam.outcome_probabilities(&state);
    (0..shots).map(|_| draw_outcome(&probs, rng)).collect()
}

/// Exact outcome distribution of one sequence under the given models.
pub fn sequence_distribution(
    gates: &GateSequence,
    noise: &GateNoiseModel,
    spam: &SpamModel,
    gate_set: GateSet,
) -> Result<Vec<f64>> {
    let sim = SequenceSimulator::new(noise, gate_set);
    let state = sim.propagate(gates, spam.rho_tilde())?;
    Ok(spam.outcome_probabilities(&state))
}

/// Run a full experiment with noise models built from the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<GateSetShadow> {
    config.validate()?;
    let (noise, spam) = build_noise_model(config.num_qubits, &config.noise)?;
    run_experiment_with(config, &noise, &spam)
}

/// Run a full experiment with explicitly supplied noise and SPAM models.
///
/// The configuration's own `noise` block is not consulted; callers using
/// this entry point are responsible for keeping the stored configuration
/// honest about what was simulated.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    noise: &GateNoiseModel,
    spam: &SpamModel,
) -> Result<GateSetShadow> {
    config.validate()?;
    if noise.num_qubits() != config.num_qubits || spam.num_qubits() != config.num_qubits {
        return Err(Error::Dimension("noise/SPAM width differs from configuration".into()));
    }
    let jobs: Vec<usize> = config
        .lengths
        .iter()
        .flat_map(|&m| std::iter::repeat(m).take(config.sequences_per_length))
        .collect();
    let per_sequence: Vec<Result<Vec<ShadowRecord>>> = jobs
        .par_iter()
        .enumerate()
        .map(|(job_index, &m)| {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            rng.set_stream(job_index as u64);
            let gates = draw_sequence(config, m, &mut rng)?;
            let outcomes = simulate_sequence(
                &gates,
                noise,
                spam,
                config.gate_set,
                config.shots_per_sequence,
                &mut rng,
            )?;
            Ok(outcomes
                .into_iter()
                .map(|outcome| ShadowRecord { length: m, gates: gates.clone(), outcome })
                .collect())
        })
        .collect();
    let mut records = Vec::with_capacity(jobs.len() * config.shots_per_sequence);
    for chunk in per_sequence {
        records.extend(chunk?);
    }
    GateSetShadow::new(config.clone(), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::depolarizing;

    fn base_config(gate_set: GateSet) -> ExperimentConfig {
        ExperimentConfig {
            gate_set,
            num_qubits: 2,
            lengths: vec![1, 3],
            sequences_per_length: 5,
            shots_per_sequence: 1,
            seed: 42,
            noise: NoiseConfig::default(),
        }
    }

    #[test]
    fn record_counts_and_lengths() {
        for gs in [
            GateSet::MultiQubitClifford,
            GateSet::LocalClifford,
            GateSet::PauliInterleaved,
        ] {
            let shadow = run_experiment(&base_config(gs)).unwrap();
            assert_eq!(shadow.records().len(), 10);
            assert_eq!(shadow.lengths(), vec![1, 3]);
            assert_eq!(shadow.records_for_length(3).count(), 5);
            for r in shadow.records() {
                assert_eq!(r.gates.length(), r.length);
                assert!(r.outcome < 4);
            }
        }
    }

    #[test]
    fn same_seed_reproduces_same_records() {
        let config = base_config(GateSet::MultiQubitClifford);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.records(), b.records());
        let mut shifted = config;
        shifted.seed = 43;
        let c = run_experiment(&shifted).unwrap();
        assert_ne!(a.records(), c.records());
    }

    #[test]
    fn noiseless_multiqubit_sequences_keep_state_pure() {
        // Clifford orbits of |00⟩ stay pure: outcome distribution always
        // deterministic up to the stabilizer structure; probabilities are
        // multiples of 1/4, and the propagated state has unit purity.
        let config = base_config(GateSet::MultiQubitClifford);
        let (noise, spam) = build_noise_model(2, &config.noise).unwrap();
        let shadow = run_experiment(&config).unwrap();
        for r in shadow.records() {
            let probs =
                sequence_distribution(&r.gates, &noise, &spam, config.gate_set).unwrap();
            let sum: f64 = probs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for p in probs {
                let quarters = p * 4.0;
                assert!((quarters - quarters.round()).abs() < 1e-9, "p = {p}");
            }
        }
    }

    #[test]
    fn pauli_interleaved_closes_to_identity_when_noiseless() {
        // With no noise the frame conjugates Paulis into a global-phase
        // action on |0..0⟩: the outcome is deterministic.
        let mut config = base_config(GateSet::PauliInterleaved);
        config.lengths = vec![2, 4];
        let shadow = run_experiment(&config).unwrap();
        let (noise, spam) = build_noise_model(2, &NoiseConfig::default()).unwrap();
        for r in shadow.records() {
            let probs = sequence_distribution(&r.gates, &noise, &spam, config.gate_set).unwrap();
            let max = probs.iter().cloned().fold(0.0, f64::max);
            assert!((max - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_noise_spreads_outcomes() {
        let mut config = base_config(GateSet::MultiQubitClifford);
        config.lengths = vec![6];
        config.sequences_per_length = 40;
        let noise =
            GateNoiseModel::with_left(depolarizing(2, 0b11, 0.5).unwrap()).unwrap();
        let spam = SpamModel::ideal(2).unwrap();
        let shadow = run_experiment_with(&config, &noise, &spam).unwrap();
        // After six strongly depolarizing steps every outcome distribution
        // is close to uniform.
        for r in shadow.records().iter().take(5) {
            let probs = sequence_distribution(&r.gates, &noise, &spam, config.gate_set).unwrap();
            for p in probs {
                assert!((p - 0.25).abs() < 0.05, "p = {p}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = base_config(GateSet::LocalClifford);
        c.lengths.clear();
        assert!(c.validate().is_err());
        let mut c2 = base_config(GateSet::LocalClifford);
        c2.lengths = vec![0];
        assert!(c2.validate().is_err());
        let mut c3 = base_config(GateSet::LocalClifford);
        c3.sequences_per_length = 0;
        assert!(c3.validate().is_err());
    }
}
