//! In-process sensor/central-node harness.
//!
//! Each sensor runs on its own thread, encodes its coordinate of every trial
//! and pushes `(trial, message)` into one channel. The central node buffers
//! messages per trial and decodes once all `n` have arrived, so arrival order
//! does not affect the outcome.

use std::collections::{BTreeMap, HashMap};
use std::sync::mpsc;

use serde::Serialize;

use super::{DbpMessage, Protocol, ProtocolError, SourceSpec};
use crate::cvp::babai_coefficients;
use crate::lattice::LatticeBasis;
use crate::mc::worker_rng;

#[derive(Debug, Clone, Serialize)]
pub struct SensorStats {
    pub m: usize,
    /// Observed `s_m -> count`.
    pub s_counts: BTreeMap<String, u64>,
    pub u_tilde_min: i64,
    pub u_tilde_max: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TranscriptEntry {
    pub trial: u64,
    pub x: Vec<f64>,
    pub messages: Vec<DbpMessage>,
    pub decoded: Vec<i64>,
    pub babai: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    pub source: String,
    pub matches: u64,
    pub mismatches: u64,
    pub agreement: f64,
    pub sensors: Vec<SensorStats>,
    /// First few trials in full.
    pub transcript: Vec<TranscriptEntry>,
}

/// Number of trials kept verbatim in the transcript.
pub const TRANSCRIPT_LEN: usize = 8;

/// Draws `trials` inputs from `source` (triangular frame, one seeded stream),
/// runs the protocol across sensor threads and compares every decode with
/// the direct nearest-plane coefficients.
pub fn simulate(
    b: &LatticeBasis,
    protocol: &Protocol,
    source: &SourceSpec,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport, ProtocolError> {
    let n = b.dim();
    let r = b.triangular();
    let mut rng = worker_rng(seed, 0);
    let xs: Vec<Vec<f64>> = (0..trials).map(|_| source.sample(r, &mut rng)).collect();

    let (tx, rx) = mpsc::channel::<(u64, DbpMessage)>();
    let mut pending: HashMap<u64, Vec<Option<DbpMessage>>> = HashMap::new();
    let mut stats: Vec<(BTreeMap<i128, u64>, i64, i64)> = vec![(BTreeMap::new(), i64::MAX, i64::MIN); n];
    let mut matches = 0u64;
    let mut transcript = Vec::new();

    let outcome = std::thread::scope(|scope| -> Result<(), ProtocolError> {
        // sensors n, ..., 1
        for m in (1..=n).rev() {
            let tx = tx.clone();
            let xs = &xs;
            scope.spawn(move || {
                for (t, x) in xs.iter().enumerate() {
                    if tx.send((t as u64, protocol.encode(m, x[m - 1]))).is_err() {
                        return;
                    }
                }
            });
        }
        drop(tx);

        for (t, msg) in rx {
            let slot = pending.entry(t).or_insert_with(|| vec![None; n]);
            slot[msg.m - 1] = Some(msg);
            if slot.iter().any(Option::is_none) {
                continue;
            }
            let msgs: Vec<DbpMessage> = pending.remove(&t).unwrap().into_iter().flatten().collect();
            let decoded = protocol.decode(&msgs)?;
            let x = &xs[t as usize];
            let babai = babai_coefficients(r, x)?;
            for msg in &msgs {
                let st = &mut stats[msg.m - 1];
                *st.0.entry(msg.s).or_default() += 1;
                st.1 = st.1.min(msg.u_tilde);
                st.2 = st.2.max(msg.u_tilde);
            }
            if decoded == babai {
                matches += 1;
            }
            if (t as usize) < TRANSCRIPT_LEN {
                let mut messages = msgs;
                messages.sort_by_key(|m| std::cmp::Reverse(m.m));
                transcript.push(TranscriptEntry { trial: t, x: x.clone(), messages, decoded, babai });
            }
        }
        Ok(())
    });
    outcome?;
    if let Some((_, slot)) = pending.iter().next() {
        let m = slot.iter().position(Option::is_none).map_or(0, |i| i + 1);
        return Err(ProtocolError::MissingMessage { m });
    }
    transcript.sort_by_key(|e| e.trial);

    let sensors = stats
        .into_iter()
        .enumerate()
        .map(|(i, (counts, lo, hi))| SensorStats {
            m: i + 1,
            s_counts: counts.into_iter().map(|(s, c)| (s.to_string(), c)).collect(),
            u_tilde_min: if trials == 0 { 0 } else { lo },
            u_tilde_max: if trials == 0 { 0 } else { hi },
        })
        .collect();
    Ok(SimulationReport {
        trials,
        seed,
        source: source.to_string(),
        matches,
        mismatches: trials - matches,
        agreement: if trials == 0 { 1.0 } else { matches as f64 / trials as f64 },
        sensors,
        transcript,
    })
}
