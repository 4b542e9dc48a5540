//! Pluggable adversary strategies for the wiretap channel.
//!
//! A strategy hears the read-set components as they are revealed and commits
//! one write decision per component. Given the same random tape and the same
//! observations, a strategy is deterministic, so executions can be replayed
//! and views can be compared across messages under fixed adversary coins.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::BitString;
use crate::channel::{ChannelError, Direction, ReadWriteSets};
use crate::field::{FieldElement, PrimeModulus};
use crate::tape::{FieldSampler, SeededTape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("the four sets do not partition 0..{0}")]
    NotAPartition(usize),
    /// The paired two-round adversaries require `|S_b| = |S_d|`, i.e.
    /// `ρ_r = 1 − ρ_w`.
    #[error("set size mismatch: |S_b|={b} but |S_d|={d}")]
    SizeMismatch { b: usize, d: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Per-component write decision returned by a strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WriteDecision {
    /// Leave the component untouched.
    Keep,
    /// Add this error vector to the component.
    Add(Vec<FieldElement>),
    /// Replace the component with this fresh symbol; the channel records
    /// the equivalent additive error `new − old`.
    Replace(Vec<FieldElement>),
}

/// The interface the channel engine drives.
///
/// Per wiretap invocation the engine calls `begin_awtp`, then for each
/// component index in ascending order: `observe_component` when the index is
/// readable, then `decide`. Discussion traffic arrives via `observe_pd`.
pub trait AdversaryStrategy {
    fn begin_awtp(&mut self, n: usize, u: usize, q: PrimeModulus);
    fn observe_component(&mut self, index: usize, symbol: &[FieldElement]);
    fn decide(&mut self, index: usize) -> WriteDecision;
    fn observe_pd(&mut self, direction: Direction, bits: &BitString);
}

/// Built-in strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    /// Reads its set, never writes.
    Passive,
    /// Commits its sets and per-invocation uniform error vectors before
    /// observing anything.
    Adv1Uniform,
    /// Replaces every writable component with a fresh uniform symbol,
    /// stressing the verification step with hash collisions.
    Substitution,
}

impl AdversaryKind {
    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::Passive => "passive",
            AdversaryKind::Adv1Uniform => "adv1",
            AdversaryKind::Substitution => "substitution",
        }
    }

    pub fn parse(name: &str) -> Option<AdversaryKind> {
        match name {
            "passive" => Some(AdversaryKind::Passive),
            "adv1" | "adv1-uniform" | "uniform" => Some(AdversaryKind::Adv1Uniform),
            "substitution" | "subst" => Some(AdversaryKind::Substitution),
            _ => None,
        }
    }
}

/// A rebuildable adversary description: strategy, sets, and random tape
/// seed. `instantiate` always starts from the same coins, which is what
/// view comparisons condition on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryConfig {
    kind: AdversaryKind,
    sets: ReadWriteSets,
    seed: [u8; 32],
}

impl AdversaryConfig {
    pub fn new(kind: AdversaryKind, sets: ReadWriteSets, seed: [u8; 32]) -> AdversaryConfig {
        AdversaryConfig { kind, sets, seed }
    }

    pub fn kind(&self) -> AdversaryKind {
        self.kind
    }

    pub fn sets(&self) -> &ReadWriteSets {
        &self.sets
    }

    pub fn instantiate(&self) -> BuiltinAdversary {
        BuiltinAdversary {
            kind: self.kind,
            sets: self.sets.clone(),
            tape: SeededTape::new(self.seed),
            pending: BTreeMap::new(),
        }
    }
}

/// Convenience constructors mirroring the built-in kinds.
pub fn passive(sets: ReadWriteSets, seed: [u8; 32]) -> AdversaryConfig {
    AdversaryConfig::new(AdversaryKind::Passive, sets, seed)
}

pub fn adv1_uniform(sets: ReadWriteSets, seed: [u8; 32]) -> AdversaryConfig {
    AdversaryConfig::new(AdversaryKind::Adv1Uniform, sets, seed)
}

pub fn substitution(sets: ReadWriteSets, seed: [u8; 32]) -> AdversaryConfig {
    AdversaryConfig::new(AdversaryKind::Substitution, sets, seed)
}

/// Runtime state of a built-in strategy bound to one execution.
#[derive(Debug, Clone)]
pub struct BuiltinAdversary {
    kind: AdversaryKind,
    sets: ReadWriteSets,
    tape: SeededTape,
    pending: BTreeMap<usize, WriteDecision>,
}

impl BuiltinAdversary {
    pub fn sets(&self) -> &ReadWriteSets {
        &self.sets
    }
}

impl AdversaryStrategy for BuiltinAdversary {
    fn begin_awtp(&mut self, _n: usize, u: usize, q: PrimeModulus) {
        // Both active strategies draw their writes up front, before any
        // component of this invocation is revealed: the uniform-error
        // adversary is precommitted by definition, and the substitution
        // draws are observation-independent anyway.
        self.pending.clear();
        let writable: Vec<usize> = self.sets.write().iter().copied().collect();
        match self.kind {
            AdversaryKind::Passive => {}
            AdversaryKind::Adv1Uniform => {
                for i in writable {
                    let e = (0..u).map(|_| self.tape.draw(q)).collect();
                    self.pending.insert(i, WriteDecision::Add(e));
                }
            }
            AdversaryKind::Substitution => {
                for i in writable {
                    let fresh = (0..u).map(|_| self.tape.draw(q)).collect();
                    self.pending.insert(i, WriteDecision::Replace(fresh));
                }
            }
        }
    }

    fn observe_component(&mut self, _index: usize, _symbol: &[FieldElement]) {
        // Built-ins decide independently of observations; the engine still
        // reveals read symbols so the recorded view is the adversary's.
    }

    fn decide(&mut self, index: usize) -> WriteDecision {
        self.pending.remove(&index).unwrap_or(WriteDecision::Keep)
    }

    fn observe_pd(&mut self, _direction: Direction, _bits: &BitString) {}
}

/// Which of the paired precommitted adversaries to build from a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    /// `S_r = S_a ∪ S_b`, `S_w = S_b ∪ S_c`.
    Adv2,
    /// `S_r = S_a ∪ S_d`, `S_w = S_c ∪ S_d`.
    Adv2Hat,
}

/// Builds read/write sets from a partition of `[N]` into read-only `S_a`,
/// read-write `S_b`, write-only `S_c` and untouched `S_d` components.
///
/// Only the balanced case `|S_b| = |S_d|` (equivalently `ρ_r = 1 − ρ_w`) is
/// supported; the paired construction needs the two adversaries to exchange
/// exactly those components.
pub fn partition_sets(
    n: usize,
    mode: PartitionMode,
    s_a: &std::collections::BTreeSet<usize>,
    s_b: &std::collections::BTreeSet<usize>,
    s_c: &std::collections::BTreeSet<usize>,
    s_d: &std::collections::BTreeSet<usize>,
) -> Result<ReadWriteSets, AdversaryError> {
    let total = s_a.len() + s_b.len() + s_c.len() + s_d.len();
    let mut union = std::collections::BTreeSet::new();
    for set in [s_a, s_b, s_c, s_d] {
        union.extend(set.iter().copied());
    }
    if total != n || union.len() != n || union.iter().any(|&i| i >= n) {
        return Err(AdversaryError::NotAPartition(n));
    }
    if s_b.len() != s_d.len() {
        return Err(AdversaryError::SizeMismatch {
            b: s_b.len(),
            d: s_d.len(),
        });
    }
    let (read, write) = match mode {
        PartitionMode::Adv2 => (
            s_a.union(s_b).copied().collect(),
            s_b.union(s_c).copied().collect(),
        ),
        PartitionMode::Adv2Hat => (
            s_a.union(s_d).copied().collect(),
            s_c.union(s_d).copied().collect(),
        ),
    };
    Ok(ReadWriteSets::new(n, read, write)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::derive_seed;
    use std::collections::BTreeSet;

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn partition_adv2_and_hat() {
        let sets = partition_sets(
            4,
            PartitionMode::Adv2,
            &set(&[0]),
            &set(&[1]),
            &set(&[2]),
            &set(&[3]),
        )
        .unwrap();
        assert_eq!(*sets.read(), set(&[0, 1]));
        assert_eq!(*sets.write(), set(&[1, 2]));

        let sets = partition_sets(
            4,
            PartitionMode::Adv2Hat,
            &set(&[0]),
            &set(&[1]),
            &set(&[2]),
            &set(&[3]),
        )
        .unwrap();
        assert_eq!(*sets.read(), set(&[0, 3]));
        assert_eq!(*sets.write(), set(&[2, 3]));
    }

    #[test]
    fn partition_read_only_degenerate() {
        let sets = partition_sets(
            2,
            PartitionMode::Adv2,
            &set(&[0, 1]),
            &set(&[]),
            &set(&[]),
            &set(&[]),
        )
        .unwrap();
        assert_eq!(*sets.read(), set(&[0, 1]));
        assert!(sets.write().is_empty());
    }

    #[test]
    fn partition_rejects_overlap_and_gaps() {
        assert_eq!(
            partition_sets(4, PartitionMode::Adv2, &set(&[0, 1]), &set(&[1]), &set(&[2]), &set(&[3])),
            Err(AdversaryError::NotAPartition(4))
        );
        assert_eq!(
            partition_sets(4, PartitionMode::Adv2, &set(&[0]), &set(&[1]), &set(&[2]), &set(&[])),
            Err(AdversaryError::NotAPartition(4))
        );
        assert_eq!(
            partition_sets(5, PartitionMode::Adv2, &set(&[0]), &set(&[1, 2]), &set(&[3]), &set(&[4])),
            Err(AdversaryError::SizeMismatch { b: 2, d: 1 })
        );
    }

    #[test]
    fn passive_never_writes() {
        let q = PrimeModulus::new(5).unwrap();
        let sets = ReadWriteSets::restricted(3, set(&[0, 1, 2])).unwrap();
        let mut adv = passive(sets, derive_seed(1, 2, 3)).instantiate();
        adv.begin_awtp(3, 2, q);
        for i in 0..3 {
            adv.observe_component(i, &[q.element(1), q.element(2)]);
            assert_eq!(adv.decide(i), WriteDecision::Keep);
        }
    }

    #[test]
    fn adv1_draws_are_replayable() {
        let q = PrimeModulus::new(67).unwrap();
        let sets = ReadWriteSets::restricted(4, set(&[1, 3])).unwrap();
        let cfg = adv1_uniform(sets, derive_seed(5, 0, 0));
        let mut a = cfg.instantiate();
        let mut b = cfg.instantiate();
        a.begin_awtp(4, 2, q);
        b.begin_awtp(4, 2, q);
        for i in 0..4 {
            assert_eq!(a.decide(i), b.decide(i));
        }
    }

    #[test]
    fn substitution_replaces_every_writable_component() {
        let q = PrimeModulus::new(67).unwrap();
        let sets = ReadWriteSets::restricted(4, set(&[0, 2])).unwrap();
        let mut adv = substitution(sets, derive_seed(8, 0, 0)).instantiate();
        adv.begin_awtp(4, 2, q);
        for i in 0..4 {
            let d = adv.decide(i);
            if i == 0 || i == 2 {
                assert!(matches!(d, WriteDecision::Replace(ref s) if s.len() == 2));
            } else {
                assert_eq!(d, WriteDecision::Keep);
            }
        }
    }

    #[test]
    fn adv1_error_coordinates_are_uniform() {
        // Frequency-count oracle over 1e5 coordinate draws at fixed seed.
        let q = PrimeModulus::new(67).unwrap();
        let sets = ReadWriteSets::restricted(2, set(&[0, 1])).unwrap();
        let mut adv = adv1_uniform(sets, derive_seed(13, 0, 0)).instantiate();
        let mut counts = vec![0u64; 67];
        let mut total = 0u64;
        while total < 100_000 {
            adv.begin_awtp(2, 2, q);
            for i in 0..2 {
                if let WriteDecision::Add(e) = adv.decide(i) {
                    for coord in e {
                        counts[coord.value() as usize] += 1;
                        total += 1;
                    }
                }
            }
        }
        let expected = total as f64 / 67.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // Critical value for 66 degrees of freedom at tail mass ~1e-9.
        assert!(chi2 < 160.5, "chi2 = {chi2}");
    }
}
