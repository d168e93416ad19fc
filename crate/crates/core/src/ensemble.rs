//! Weighted families of conditional one-qubit channels.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::channel::{apply_logical_pauli, entropy, PauliProbVec};
use crate::error::{QecError, Result};
use crate::pauli::Letter;

pub const DEFAULT_DEDUP_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_PRUNE_FLOOR: f64 = 1e-15;

/// Order in which ties between equally likely corrections are broken.
const TIE_ORDER: [Letter; 4] = [Letter::I, Letter::X, Letter::Z, Letter::Y];

/// Logical Pauli that maximizes the surviving `p_I`, and the corrected
/// channel. Exact ties go to the earlier letter of `I, X, Z, Y`.
pub fn optimize_recovery(q: &PauliProbVec) -> (Letter, PauliProbVec) {
    let mut best = Letter::I;
    for l in TIE_ORDER {
        if q.get(l) > q.get(best) {
            best = l;
        }
    }
    (best, apply_logical_pauli(q, best))
}

fn cmp_with_tolerance(a: &PauliProbVec, b: &PauliProbVec, tol: f64) -> Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        if (x - y).abs() > tol {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// Representative of `q` under relabeling by logical Paulis: the largest
/// relabeling in lexicographic order, comparing components that differ by
/// more than `tol`. Its `p_I` is maximal, so it is an optimized channel, and
/// near-ties between corrections resolve the same way however rounding fell.
pub fn canonicalize(q: &PauliProbVec, tol: f64) -> (Letter, PauliProbVec) {
    let (mut best_l, mut best) = optimize_recovery(q);
    for l in TIE_ORDER {
        let cand = apply_logical_pauli(q, l);
        if cmp_with_tolerance(&cand, &best, tol) == Ordering::Greater {
            best_l = l;
            best = cand;
        }
    }
    (best_l, best)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub weight: f64,
    /// Normalized conditional channel.
    pub channel: PauliProbVec,
}

/// Probability-weighted set of conditional logical channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelEnsemble {
    entries: Vec<EnsembleEntry>,
    dedup_tolerance: f64,
}

impl ChannelEnsemble {
    /// One channel with probability one.
    pub fn singleton(channel: PauliProbVec) -> Result<Self> {
        let channel = channel.normalized()?;
        Ok(ChannelEnsemble {
            entries: vec![EnsembleEntry { weight: 1.0, channel }],
            dedup_tolerance: DEFAULT_DEDUP_TOLERANCE,
        })
    }

    /// Builds an ensemble from weighted normalized channels: every channel is
    /// canonicalized, duplicates merged, weights below `prune_floor` dropped
    /// and the rest renormalized to total one.
    pub fn from_weighted(
        items: impl IntoIterator<Item = (f64, PauliProbVec)>,
        dedup_tolerance: f64,
        prune_floor: f64,
    ) -> Result<Self> {
        let mut acc = Accumulator::new(dedup_tolerance);
        for (w, c) in items {
            acc.add(w, &c);
        }
        acc.finish(prune_floor)
    }

    pub fn entries(&self) -> &[EnsembleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dedup_tolerance(&self) -> f64 {
        self.dedup_tolerance
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Weighted mean of the conditional entropies, in bits.
    pub fn entropy(&self) -> f64 {
        self.entries.iter().map(|e| e.weight * entropy(&e.channel).expect("entries are normalized")).sum()
    }

    /// Weighted mean of `1 - max_sigma p_sigma`.
    pub fn mean_infidelity(&self) -> f64 {
        self.entries.iter().map(|e| e.weight * optimize_recovery(&e.channel).1.infidelity()).sum()
    }

    /// Weighted mean of the optimized conditional channels: the logical
    /// channel obtained when every syndrome history gets its best correction.
    pub fn optimized_average(&self) -> PauliProbVec {
        let mut avg = [0.0; 4];
        for e in &self.entries {
            let (_, c) = optimize_recovery(&e.channel);
            for (a, v) in avg.iter_mut().zip(c.0) {
                *a += e.weight * v;
            }
        }
        PauliProbVec(avg)
    }

    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<()> {
        let total = self.total_weight();
        if (total - 1.0).abs() > 1e-9 {
            return Err(QecError::InvalidArgument(format!("ensemble weights sum to {total}")));
        }
        if let Some(e) = self.entries.iter().find(|e| !(e.weight > 0.0)) {
            return Err(QecError::InvalidArgument(format!("non-positive ensemble weight {}", e.weight)));
        }
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                if a.channel.max_abs_diff(&b.channel) <= self.dedup_tolerance {
                    return Err(QecError::InvalidArgument("duplicate ensemble channels".into()));
                }
            }
        }
        Ok(())
    }
}

type Key = [i64; 4];

/// Streaming merge of weighted channels. Channels are canonicalized and
/// bucketed on a grid of the dedup tolerance; [`Accumulator::finish`] merges
/// the few duplicates that straddle grid lines. Insertion order is kept, so
/// the result depends only on the order of `add` calls.
#[derive(Debug)]
pub(crate) struct Accumulator {
    tol: f64,
    index: HashMap<Key, usize>,
    entries: Vec<EnsembleEntry>,
}

impl Accumulator {
    pub(crate) fn new(tol: f64) -> Self {
        Accumulator { tol, index: HashMap::new(), entries: Vec::new() }
    }

    fn key(&self, c: &PauliProbVec) -> Key {
        c.0.map(|v| (v / self.tol).round() as i64)
    }

    /// Adds a normalized channel with weight `w`; zero weights are ignored.
    pub(crate) fn add(&mut self, w: f64, c: &PauliProbVec) {
        if !(w > 0.0) {
            return;
        }
        let (_, canon) = canonicalize(c, self.tol);
        self.add_canonical(w, canon);
    }

    fn add_canonical(&mut self, w: f64, canon: PauliProbVec) {
        let key = self.key(&canon);
        match self.index.get(&key) {
            Some(&i) => self.entries[i].weight += w,
            None => {
                self.index.insert(key, self.entries.len());
                self.entries.push(EnsembleEntry { weight: w, channel: canon });
            }
        }
    }

    /// Folds another accumulator in, preserving its insertion order.
    pub(crate) fn merge(&mut self, other: Accumulator) {
        for e in other.entries {
            self.add_canonical(e.weight, e.channel);
        }
    }

    pub(crate) fn finish(self, prune_floor: f64) -> Result<ChannelEnsemble> {
        let tol = self.tol;
        let mut entries = self.entries;
        entries.sort_by(|a, b| a.channel.0[0].total_cmp(&b.channel.0[0]));
        let mut merged: Vec<EnsembleEntry> = Vec::with_capacity(entries.len());
        for e in entries {
            let hit = merged
                .iter_mut()
                .rev()
                .take_while(|m| e.channel.0[0] - m.channel.0[0] <= tol)
                .find(|m| m.channel.max_abs_diff(&e.channel) <= tol);
            match hit {
                Some(m) => m.weight += e.weight,
                None => merged.push(e),
            }
        }
        merged.retain(|e| e.weight >= prune_floor && e.weight > 0.0);
        // Pruned mass is returned proportionally to the surviving entries.
        let total: f64 = merged.iter().map(|e| e.weight).sum();
        if !(total > 0.0) {
            return Err(QecError::NonPositiveWeight(total));
        }
        for e in &mut merged {
            e.weight /= total;
        }
        // Heaviest first; ties keep the p_I order from above.
        merged.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        Ok(ChannelEnsemble { entries: merged, dedup_tolerance: tol })
    }
}
