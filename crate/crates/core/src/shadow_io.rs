//! Line-oriented persistence for shadow data sets.
//!
//! The on-disk format is JSON Lines: the first line is a header carrying
//! a format version and the generating [`ExperimentConfig`]; every further
//! line is one [`ShadowRecord`].  Gate payloads are stored losslessly —
//! tableau generator images for multi-qubit Cliffords, canonical indices
//! for single-qubit layers, symplectic masks for Paulis — and re-validated
//! on read, so a truncated or hand-edited file fails loudly with the
//! offending line number.
//!
//! Writes go through a temporary file in the target directory followed by
//! an atomic rename; readers never observe a half-written shadow.

use crate::clifford::{CliffordElement, LocalCliffordElement};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, GateSequence, GateSet, GateSetShadow, ShadowRecord};
use crate::pauli::PauliString;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Version tag of the on-disk schema.
pub const SHADOW_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ShadowHeaderJson {
    format_version: u32,
    config: ExperimentConfig,
}

/// One signed Hermitian Pauli as symplectic masks plus sign.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PauliImageJson {
    x: u64,
    z: u64,
    sign: i8,
}

impl PauliImageJson {
    fn from_pauli(p: &PauliString) -> Self {
        Self {
            x: p.x_bits(),
            z: p.z_bits(),
            sign: p.hermitian_sign() as i8,
        }
    }

    fn to_pauli(&self, n: usize) -> Result<PauliString> {
        let mask = PauliString::full_mask(n);
        if self.x & !mask != 0 || self.z & !mask != 0 {
            return Err(Error::InvalidParameter("Pauli mask exceeds qubit count".into()));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::InvalidParameter(format!("invalid Pauli sign {}", self.sign)));
        }
        let p = PauliString::hermitian(n, self.x, self.z)?;
        Ok(if self.sign < 0 { p.negated() } else { p })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CliffordJson {
    x_images: Vec<PauliImageJson>,
    z_images: Vec<PauliImageJson>,
}

impl CliffordJson {
    fn from_element(c: &CliffordElement) -> Self {
        let n = c.num_qubits();
        Self {
            x_images: (0..n).map(|q| PauliImageJson::from_pauli(c.x_image(q))).collect(),
            z_images: (0..n).map(|q| PauliImageJson::from_pauli(c.z_image(q))).collect(),
        }
    }

    fn to_element(&self, n: usize) -> Result<CliffordElement> {
        if self.x_images.len() != n || self.z_images.len() != n {
            return Err(Error::Dimension("tableau image count differs from qubit count".into()));
        }
        let xs = self.x_images.iter().map(|p| p.to_pauli(n)).collect::<Result<Vec<_>>>()?;
        let zs = self.z_images.iter().map(|p| p.to_pauli(n)).collect::<Result<Vec<_>>>()?;
        CliffordElement::from_images(n, xs, zs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GateSequenceJson {
    MultiQubit { gates: Vec<CliffordJson> },
    Local { gates: Vec<Vec<u8>> },
    PauliInterleaved { frame: CliffordJson, paulis: Vec<PauliImageJson> },
}

impl GateSequenceJson {
    fn from_sequence(seq: &GateSequence) -> Self {
        match seq {
            GateSequence::MultiQubit(gates) => GateSequenceJson::MultiQubit {
                gates: gates.iter().map(CliffordJson::from_element).collect(),
            },
            GateSequence::Local(gates) => GateSequenceJson::Local {
                gates: gates.iter().map(|g| g.indices().to_vec()).collect(),
            },
            GateSequence::PauliInterleaved { frame, paulis } => {
                GateSequenceJson::PauliInterleaved {
                    frame: CliffordJson::from_element(frame),
                    paulis: paulis.iter().map(PauliImageJson::from_pauli).collect(),
                }
            }
        }
    }

    fn to_sequence(&self, n: usize, gate_set: GateSet) -> Result<GateSequence> {
        let matches_set = matches!(
            (self, gate_set),
            (GateSequenceJson::MultiQubit { .. }, GateSet::MultiQubitClifford)
                | (GateSequenceJson::Local { .. }, GateSet::LocalClifford)
                | (GateSequenceJson::PauliInterleaved { .. }, GateSet::PauliInterleaved)
        );
        if !matches_set {
            return Err(Error::InvalidParameter(
                "record gate kind differs from the header gate set".into(),
            ));
        }
        match self {
            GateSequenceJson::MultiQubit { gates } => Ok(GateSequence::MultiQubit(
                gates.iter().map(|g| g.to_element(n)).collect::<Result<_>>()?,
            )),
            GateSequenceJson::Local { gates } => Ok(GateSequence::Local(
                gates
                    .iter()
                    .map(|idx| {
                        if idx.len() != n {
                            return Err(Error::Dimension(
                                "local layer width differs from qubit count".into(),
                            ));
                        }
                        LocalCliffordElement::from_indices(idx.clone())
                    })
                    .collect::<Result<_>>()?,
            )),
            GateSequenceJson::PauliInterleaved { frame, paulis } => {
                Ok(GateSequence::PauliInterleaved {
                    frame: frame.to_element(n)?,
                    paulis: paulis
                        .iter()
                        .map(|p| {
                            let q = p.to_pauli(n)?;
                            if q.hermitian_sign() < 0.0 {
                                return Err(Error::InvalidParameter(
                                    "interleaved Paulis are stored sign-free".into(),
                                ));
                            }
                            Ok(q)
                        })
                        .collect::<Result<_>>()?,
                })
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ShadowRecordJson {
    m: usize,
    gates: GateSequenceJson,
    outcome: u64,
}

/// Write a shadow to `path` as JSON Lines, atomically.
pub fn write_shadow(shadow: &GateSetShadow, path: &Path) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        let header = ShadowHeaderJson {
            format_version: SHADOW_FORMAT_VERSION,
            config: shadow.config().clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for r in shadow.records() {
            let line = ShadowRecordJson {
                m: r.length,
                gates: GateSequenceJson::from_sequence(&r.gates),
                outcome: r.outcome,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ShadowFormat { line, msg: msg.into() }
}

/// Read a shadow back, validating the header and every record.
pub fn read_shadow(path: &Path) -> Result<GateSetShadow> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();
    let (_, header_line) = lines
        .next()
        .ok_or_else(|| format_err(1, "empty shadow file"))?;
    let header_line = header_line?;
    let header: ShadowHeaderJson = serde_json::from_str(&header_line)
        .map_err(|e| format_err(1, format!("bad header: {e}")))?;
    if header.format_version != SHADOW_FORMAT_VERSION {
        return Err(format_err(
            1,
            format!(
                "unsupported format version {} (expected {})",
                header.format_version, SHADOW_FORMAT_VERSION
            ),
        ));
    }
    header
        .config
        .validate()
        .map_err(|e| format_err(1, format!("bad config: {e}")))?;
    let n = header.config.num_qubits;
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: ShadowRecordJson = serde_json::from_str(&line)
            .map_err(|e| format_err(line_no, format!("bad record: {e}")))?;
        let gates = raw
            .gates
            .to_sequence(n, header.config.gate_set)
            .map_err(|e| format_err(line_no, e.to_string()))?;
        if gates.length() != raw.m {
            return Err(format_err(
                line_no,
                format!("record declares m = {} but stores {} steps", raw.m, gates.length()),
            ));
        }
        if raw.outcome >= (1u64 << n) {
            return Err(format_err(line_no, format!("outcome {} out of range", raw.outcome)));
        }
        records.push(ShadowRecord { length: raw.m, gates, outcome: raw.outcome });
    }
    GateSetShadow::new(header.config, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::run_experiment;
    use crate::noise::NoiseConfig;
    use std::io::Read;

    fn sample_shadow(gate_set: GateSet) -> GateSetShadow {
        let config = ExperimentConfig {
            gate_set,
            num_qubits: 2,
            lengths: vec![1, 2],
            sequences_per_length: 3,
            shots_per_sequence: 2,
            seed: 7,
            noise: NoiseConfig::default(),
        };
        run_experiment(&config).unwrap()
    }

    #[test]
    fn round_trip_all_gate_sets() {
        let dir = tempfile::tempdir().unwrap();
        for (i, gs) in [
            GateSet::MultiQubitClifford,
            GateSet::LocalClifford,
            GateSet::PauliInterleaved,
        ]
        .iter()
        .enumerate()
        {
            let shadow = sample_shadow(*gs);
            let path = dir.path().join(format!("shadow_{i}.jsonl"));
            write_shadow(&shadow, &path).unwrap();
            let back = read_shadow(&path).unwrap();
            assert_eq!(back.config(), shadow.config());
            assert_eq!(back.records(), shadow.records());
        }
    }

    #[test]
    fn header_carries_version_and_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        write_shadow(&sample_shadow(GateSet::LocalClifford), &path).unwrap();
        let mut text = String::new();
        File::open(&path).unwrap().read_to_string(&mut text).unwrap();
        let first = text.lines().next().unwrap();
        let v: serde_json::Value = serde_json::from_str(first).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["config"]["num_qubits"], 2);
    }

    #[test]
    fn corrupted_record_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        write_shadow(&sample_shadow(GateSet::MultiQubitClifford), &path).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        // Damage the third line (second record).
        let mut lines: Vec<&str> = text.lines().collect();
        let damaged = lines[2].replace("\"x\":", "\"q\":");
        lines[2] = &damaged;
        text = lines.join("\n");
        std::fs::write(&path, text).unwrap();
        match read_shadow(&path) {
            Err(Error::ShadowFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected ShadowFormat error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_tableau_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        write_shadow(&sample_shadow(GateSet::MultiQubitClifford), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        // Make the first X image equal to the first Z image: not symplectic.
        let mut rec: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
        rec["gates"]["gates"][0]["z_images"][0] =
            rec["gates"]["gates"][0]["x_images"][0].clone();
        lines[1] = serde_json::to_string(&rec).unwrap();
        std::fs::write(&path, lines.join("\n")).unwrap();
        match read_shadow(&path) {
            Err(Error::ShadowFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected ShadowFormat error, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_gate_kind_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        write_shadow(&sample_shadow(GateSet::LocalClifford), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        // Claim the header used multi-qubit Cliffords.
        let mut header: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
        header["config"]["gate_set"] = "multi_qubit_clifford".into();
        lines[0] = serde_json::to_string(&header).unwrap();
        std::fs::write(&path, lines.join("\n")).unwrap();
        assert!(read_shadow(&path).is_err());
    }
}
