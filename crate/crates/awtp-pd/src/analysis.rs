//! Information-theoretic measurement utilities, bound calculators, an
//! exhaustive secrecy verifier and a Monte Carlo reliability estimator.
//!
//! The secrecy verifier conditions on a fixed adversary tape and enumerates
//! every honest tape exactly, so a zero statistical distance is an integer
//! equality rather than a statistical statement. The reliability estimator
//! runs independent seeded executions and reports the empirical failure
//! fraction next to the analytic budget `u·N/q`.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::adversary::{AdversaryConfig, AdversaryKind};
use crate::channel::{ReadWriteSets, Transcript};
use crate::protocol::{
    decode_from_transcript, run_protocol, Message, ProtocolConfig, ProtocolError,
};
use crate::smt::{awtp_to_smt, smt_to_awtp, SmtError};
use crate::tape::{derive_seed, FixedTape, SeededTape};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("negative probability mass")]
    NegativeMass,
    #[error("enumeration size {size} exceeds budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("invalid query: {0}")]
    BadQuery(String),
    #[error("need at least one trial")]
    NoTrials,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Smt(#[from] SmtError),
}

/// A finite distribution over ordered keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<K: Ord> {
    mass: BTreeMap<K, f64>,
}

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

impl<K: Ord> Distribution<K> {
    pub fn from_weights(
        weights: impl IntoIterator<Item = (K, f64)>,
    ) -> Result<Distribution<K>, AnalysisError> {
        let mut mass = BTreeMap::new();
        for (k, w) in weights {
            if w < 0.0 {
                return Err(AnalysisError::NegativeMass);
            }
            *mass.entry(k).or_insert(0.0) += w;
        }
        let total: f64 = mass.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(AnalysisError::NotNormalized(total));
        }
        Ok(Distribution { mass })
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (K, u64)>) -> Distribution<K> {
        let mass: BTreeMap<K, u64> = counts.into_iter().collect();
        let total: u64 = mass.values().sum();
        Distribution {
            mass: mass
                .into_iter()
                .map(|(k, c)| (k, c as f64 / total as f64))
                .collect(),
        }
    }

    pub fn uniform(keys: impl IntoIterator<Item = K>) -> Distribution<K> {
        let keys: Vec<K> = keys.into_iter().collect();
        let p = 1.0 / keys.len() as f64;
        Distribution {
            mass: keys.into_iter().map(|k| (k, p)).collect(),
        }
    }

    pub fn point(key: K) -> Distribution<K> {
        Distribution {
            mass: [(key, 1.0)].into_iter().collect(),
        }
    }

    pub fn probability(&self, key: &K) -> f64 {
        self.mass.get(key).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.mass.keys()
    }

    /// Shannon entropy in bits.
    pub fn shannon_entropy(&self) -> f64 {
        -self
            .mass
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }

    /// Min-entropy in bits: `−log₂ max_x Pr(x)`.
    pub fn min_entropy(&self) -> f64 {
        let max = self.mass.values().fold(0.0f64, |a, &b| a.max(b));
        -max.log2()
    }
}

/// `½ Σ_x |P(x) − Q(x)|` over the union of supports.
pub fn statistical_distance<K: Ord + Clone>(p: &Distribution<K>, q: &Distribution<K>) -> f64 {
    let mut keys: Vec<&K> = p.mass.keys().chain(q.mass.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (p.probability(k) - q.probability(k)).abs())
        .sum::<f64>()
}

/// Binary entropy `H(d)` in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(d: f64) -> f64 {
    assert!((0.0..=1.0).contains(&d), "entropy argument {d} outside [0,1]");
    if d == 0.0 || d == 1.0 {
        return 0.0;
    }
    -d * d.log2() - (1.0 - d) * (1.0 - d).log2()
}

/// Inputs for the rate and transmission-rate bounds; fill the fields the
/// selected formula reads.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundsQuery {
    /// Touched fraction `ρ`.
    pub rho: f64,
    /// Secrecy loss `ε`.
    pub epsilon: f64,
    /// Failure bound `δ`.
    pub delta: f64,
    /// Total discussion bits `n`.
    pub pd_bits: f64,
    /// `log₂` of the wiretap/wire alphabet.
    pub alphabet_bits: f64,
    /// Number of codeword components / wires `N`.
    pub wires: u64,
    /// Corrupted wires `t`.
    pub corrupted: u64,
    /// `log₂ |M|`.
    pub message_bits: f64,
}

/// Upper bound on the achievable information rate:
/// `1 − ρ + 2ε(1 + log_{|Σ|}(1/ε)) + 2εn`, with `ε = 0` read as the limit
/// `1 − ρ`.
pub fn rate_upper_bound(query: &BoundsQuery) -> Result<f64, AnalysisError> {
    if !(0.0..=1.0).contains(&query.epsilon) {
        return Err(AnalysisError::BadQuery(format!(
            "epsilon {} outside [0,1]",
            query.epsilon
        )));
    }
    if !(0.0..=1.0).contains(&query.rho) {
        return Err(AnalysisError::BadQuery(format!(
            "rho {} outside [0,1]",
            query.rho
        )));
    }
    if query.epsilon == 0.0 {
        return Ok(1.0 - query.rho);
    }
    if query.alphabet_bits <= 0.0 {
        return Err(AnalysisError::BadQuery(
            "alphabet_bits must be positive when epsilon > 0".into(),
        ));
    }
    let eps = query.epsilon;
    let log_sigma_inv_eps = (1.0 / eps).log2() / query.alphabet_bits;
    Ok(1.0 - query.rho + 2.0 * eps * (1.0 + log_sigma_inv_eps) + 2.0 * eps * query.pd_bits)
}

/// Rate of the construction family at component width `u`:
/// `(u−1)(1−ρ)/u`.
pub fn family_rate(u: u64, rho: Ratio<u64>) -> Ratio<u64> {
    Ratio::new(u - 1, u) * (Ratio::from_integer(1) - rho)
}

/// Smallest `δ ∈ [0, ½]` with `2·H(δ) ≥ 1 − 1/|M|`, by bisection to 1e−9.
/// Any two-message-round protocol with both sends by Alice must fail at
/// least this often once `ρ_r + ρ_w ≥ 1`.
pub fn min_delta_two_round(message_space: f64) -> Result<f64, AnalysisError> {
    if message_space < 1.0 {
        return Err(AnalysisError::BadQuery(format!(
            "message space size {message_space} below 1"
        )));
    }
    let target = (1.0 - 1.0 / message_space) / 2.0;
    if target <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-9 {
        let mid = (lo + hi) / 2.0;
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Which transmission-rate lower bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrBoundVariant {
    /// `N / (N − t + ε′ + 2H(δ)N + δnN)` with
    /// `ε′ = 2Nε(1 + log_{|W|}(1/ε)) + 2εnN`.
    EpsilonSecrecy,
    /// The `ε = 0` case: `N / (N − t + 2H(δ)N + δnN)`.
    PerfectSecrecy,
    /// `N·(−log(1/|M| + 2ε) − H(√δ) − 2m√δ) / ((N−t)·m)` with `m = log|M|`.
    Ggo10,
}

/// Lower bound on the transmission rate of a one-way symmetric wire
/// protocol with discussion.
pub fn smt_tr_lower_bound(
    query: &BoundsQuery,
    variant: TrBoundVariant,
) -> Result<f64, AnalysisError> {
    let n = query.wires as f64;
    let t = query.corrupted as f64;
    if query.wires == 0 || query.corrupted >= query.wires {
        return Err(AnalysisError::BadQuery(format!(
            "need N > t >= 0, got N={} t={}",
            query.wires, query.corrupted
        )));
    }
    match variant {
        TrBoundVariant::EpsilonSecrecy => {
            let eps = query.epsilon;
            let eps_prime = if eps == 0.0 {
                0.0
            } else {
                if query.alphabet_bits <= 0.0 {
                    return Err(AnalysisError::BadQuery(
                        "alphabet_bits must be positive when epsilon > 0".into(),
                    ));
                }
                2.0 * n * eps * (1.0 + (1.0 / eps).log2() / query.alphabet_bits)
                    + 2.0 * eps * query.pd_bits * n
            };
            let denom =
                n - t + eps_prime + 2.0 * binary_entropy(query.delta) * n + query.delta * query.pd_bits * n;
            if denom <= 0.0 {
                return Err(AnalysisError::BadQuery(format!(
                    "non-positive denominator {denom}"
                )));
            }
            Ok(n / denom)
        }
        TrBoundVariant::PerfectSecrecy => {
            let denom =
                n - t + 2.0 * binary_entropy(query.delta) * n + query.delta * query.pd_bits * n;
            if denom <= 0.0 {
                return Err(AnalysisError::BadQuery(format!(
                    "non-positive denominator {denom}"
                )));
            }
            Ok(n / denom)
        }
        TrBoundVariant::Ggo10 => {
            let m = query.message_bits;
            if m <= 0.0 {
                return Err(AnalysisError::BadQuery(
                    "message_bits must be positive for the ggo10 bound".into(),
                ));
            }
            let inside = 1.0 / 2f64.powf(m) + 2.0 * query.epsilon;
            if inside <= 0.0 || inside >= 1.0 {
                return Err(AnalysisError::BadQuery(format!(
                    "log argument {inside} outside (0,1)"
                )));
            }
            let sqrt_delta = query.delta.sqrt();
            let numer = n * (-inside.log2() - binary_entropy(sqrt_delta) - 2.0 * m * sqrt_delta);
            Ok(numer / ((n - t) * m))
        }
    }
}

/// Rows of the wire-protocol comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table1Protocol {
    Shi,
    Garay1,
    Garay2,
    ThisWork,
}

impl Table1Protocol {
    pub const ALL: [Table1Protocol; 4] = [
        Table1Protocol::Shi,
        Table1Protocol::Garay1,
        Table1Protocol::Garay2,
        Table1Protocol::ThisWork,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table1Protocol::Shi => "shi",
            Table1Protocol::Garay1 => "garay1",
            Table1Protocol::Garay2 => "garay2",
            Table1Protocol::ThisWork => "this_work",
        }
    }
}

/// Asymptotic information rate of each comparison row: `1 − t/N − ξ` for
/// the rate-optimal protocols, `c·(1 − t/N)` with `c = 1/3` for the
/// discussion-thrifty one.
pub fn table1_rate(
    protocol: Table1Protocol,
    t: u64,
    n: u64,
    xi: f64,
) -> Result<f64, AnalysisError> {
    if n == 0 || t >= n {
        return Err(AnalysisError::BadQuery(format!("need 0 <= t < N, got t={t} N={n}")));
    }
    if xi < 0.0 {
        return Err(AnalysisError::BadQuery(format!("xi {xi} negative")));
    }
    let base = 1.0 - t as f64 / n as f64;
    Ok(match protocol {
        Table1Protocol::Shi | Table1Protocol::Garay1 | Table1Protocol::ThisWork => base - xi,
        Table1Protocol::Garay2 => base / 3.0,
    })
}

/// One message round: who sends over which channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageRound {
    WiretapAliceToBob,
    DiscussionAliceToBob,
    DiscussionBobToAlice,
}

/// The round structure of a candidate protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolShape(pub Vec<MessageRound>);

impl ProtocolShape {
    /// All five two-round shapes that use the wiretap channel.
    pub fn two_round_forms() -> [ProtocolShape; 5] {
        use MessageRound::*;
        [
            ProtocolShape(vec![WiretapAliceToBob, DiscussionAliceToBob]),
            ProtocolShape(vec![WiretapAliceToBob, WiretapAliceToBob]),
            ProtocolShape(vec![WiretapAliceToBob, DiscussionBobToAlice]),
            ProtocolShape(vec![DiscussionAliceToBob, WiretapAliceToBob]),
            ProtocolShape(vec![DiscussionBobToAlice, WiretapAliceToBob]),
        ]
    }
}

/// Verdict of the round-complexity checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeVerdict {
    RuledOut(RuledOutReason),
    NotRuledOut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuledOutReason {
    /// Every channel use is public, so nothing hides the message.
    NoWiretapRound,
    /// The decoder's only wiretap reception is a single one-way round,
    /// capping the rate at `1 − ρ_r − ρ_w ≤ 0`.
    SingleWiretapReception,
    /// Both sends are Alice's; the failure probability obeys
    /// `2H(δ) ≥ 1 − 1/|M|`, which no vanishing `δ` satisfies.
    TwoRoundEntropyBound,
}

/// Applies the round-complexity lower bound: with `ρ_r + ρ_w ≥ 1`, no
/// perfectly secret protocol with positive rate fits in fewer than three
/// message rounds. Shapes of three or more rounds are not judged.
pub fn check_message_rounds(
    shape: &ProtocolShape,
    rho_r: Ratio<u64>,
    rho_w: Ratio<u64>,
) -> ShapeVerdict {
    use MessageRound::*;
    if rho_r + rho_w < Ratio::from_integer(1) {
        return ShapeVerdict::NotRuledOut;
    }
    let rounds = &shape.0;
    if rounds.len() >= 3 {
        return ShapeVerdict::NotRuledOut;
    }
    let wiretap_rounds = rounds
        .iter()
        .filter(|r| matches!(r, WiretapAliceToBob))
        .count();
    if wiretap_rounds == 0 {
        return ShapeVerdict::RuledOut(RuledOutReason::NoWiretapRound);
    }
    match rounds.as_slice() {
        [WiretapAliceToBob, DiscussionAliceToBob]
        | [WiretapAliceToBob, WiretapAliceToBob] => {
            ShapeVerdict::RuledOut(RuledOutReason::TwoRoundEntropyBound)
        }
        _ => ShapeVerdict::RuledOut(RuledOutReason::SingleWiretapReception),
    }
}

/// Exact numerator/denominator of a measured statistical distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactFraction {
    pub numer: u128,
    pub denom: u128,
}

impl ExactFraction {
    pub fn is_zero(&self) -> bool {
        self.numer == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

/// Measured security quantities next to their analytic budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    /// Measured statistical distance between adversary views.
    pub measured_sd: Option<f64>,
    /// Exact fraction behind `measured_sd` when the measurement enumerated
    /// every tape.
    pub sd_exact: Option<ExactFraction>,
    /// Empirical decoding-failure fraction.
    pub measured_failure_rate: Option<f64>,
    pub failures: Option<u64>,
    pub trials: Option<u64>,
    /// Honest-tape count of an exhaustive enumeration.
    pub enumeration_size: Option<u128>,
    /// Secrecy budget: exactly zero when the secrecy condition holds.
    pub bound_sd: Option<f64>,
    /// Reliability budget `u·N/q`.
    pub bound_failure_rate: Option<f64>,
    /// Whether the measured values are exact rather than sampled.
    pub exhaustive: bool,
}

impl SecurityReport {
    /// True when the measured failure rate stays within the analytic bound
    /// plus `sigmas` binomial standard deviations of sampling slack.
    pub fn failure_within_bound(&self, sigmas: f64) -> Option<bool> {
        let (rate, bound, trials) = (
            self.measured_failure_rate?,
            self.bound_failure_rate?,
            self.trials? as f64,
        );
        let slack = sigmas * (bound * (1.0 - bound) / trials).sqrt();
        Some(rate <= bound + slack)
    }
}

/// Whether measurements run on native transcripts or through the wire
/// representation and back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Native,
    Smt,
}

fn view_key(transcript: &Transcript, representation: Representation) -> Result<Vec<u8>, AnalysisError> {
    let view = match representation {
        Representation::Native => transcript.adversary_view(),
        Representation::Smt => smt_to_awtp(&awtp_to_smt(transcript)?)?.adversary_view(),
    };
    Ok(view.canonical_bytes())
}

/// Enumerates every honest tape pair against a fixed adversary tape and
/// returns the exact statistical distance between the adversary's views of
/// the two messages.
pub fn verify_secrecy_exhaustive(
    config: &ProtocolConfig,
    m1: &Message,
    m2: &Message,
    adversary: &AdversaryConfig,
    budget: u128,
    representation: Representation,
) -> Result<SecurityReport, AnalysisError> {
    let q = config.q().get() as u128;
    let alice_len = config.alice_tape_len();
    let bob_len = config.bob_tape_len();
    let size = q
        .checked_pow((alice_len + bob_len) as u32)
        .ok_or(AnalysisError::BudgetExceeded {
            size: u128::MAX,
            budget,
        })?;
    if size > budget {
        return Err(AnalysisError::BudgetExceeded { size, budget });
    }

    let mut counts1: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut counts2: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut alice_tape = vec![0u64; alice_len];
    let mut bob_tape = vec![0u64; bob_len];
    loop {
        for (message, counts) in [(m1, &mut counts1), (m2, &mut counts2)] {
            let mut alice = FixedTape::new(alice_tape.clone());
            let mut bob = FixedTape::new(bob_tape.clone());
            let (_, transcript) = run_protocol(config, message, adversary, &mut alice, &mut bob)?;
            *counts
                .entry(view_key(&transcript, representation)?)
                .or_insert(0) += 1;
        }
        if !advance(&mut bob_tape, config.q().get()) && !advance(&mut alice_tape, config.q().get())
        {
            break;
        }
    }

    let mut keys: Vec<&Vec<u8>> = counts1.keys().chain(counts2.keys()).collect();
    keys.sort();
    keys.dedup();
    let numer: u128 = keys
        .into_iter()
        .map(|k| {
            let a = counts1.get(k).copied().unwrap_or(0) as i128;
            let b = counts2.get(k).copied().unwrap_or(0) as i128;
            a.abs_diff(b)
        })
        .sum();
    let exact = ExactFraction {
        numer,
        denom: 2 * size,
    };
    Ok(SecurityReport {
        measured_sd: Some(exact.to_f64()),
        sd_exact: Some(exact),
        measured_failure_rate: None,
        failures: None,
        trials: None,
        enumeration_size: Some(size),
        bound_sd: config.satisfies_secrecy_condition().then_some(0.0),
        bound_failure_rate: None,
        exhaustive: true,
    })
}

/// Mixed-radix increment; false when the tape wrapped to all zeros.
fn advance(tape: &mut [u64], q: u64) -> bool {
    for slot in tape.iter_mut().rev() {
        *slot += 1;
        if *slot < q {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Runs `trials` independent executions with per-trial derived seeds and
/// uniform messages, counting decoding failures.
pub fn estimate_reliability(
    config: &ProtocolConfig,
    kind: AdversaryKind,
    sets: &ReadWriteSets,
    trials: u64,
    master_seed: u64,
    representation: Representation,
) -> Result<SecurityReport, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let failures = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<u64, AnalysisError> {
            let mut alice = SeededTape::new(derive_seed(master_seed, 0, trial));
            let mut bob = SeededTape::new(derive_seed(master_seed, 1, trial));
            let mut msg_tape = SeededTape::new(derive_seed(master_seed, 2, trial));
            let adversary =
                AdversaryConfig::new(kind, sets.clone(), derive_seed(master_seed, 3, trial));
            let message = Message::uniform(config, &mut msg_tape);
            let (decoded, transcript) =
                run_protocol(config, &message, &adversary, &mut alice, &mut bob)?;
            let output = match representation {
                Representation::Native => decoded,
                Representation::Smt => {
                    let back = smt_to_awtp(&awtp_to_smt(&transcript)?)?;
                    decode_from_transcript(config, &back)?
                }
            };
            Ok((output != message) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    Ok(SecurityReport {
        measured_sd: None,
        sd_exact: None,
        measured_failure_rate: Some(failures as f64 / trials as f64),
        failures: Some(failures),
        trials: Some(trials),
        enumeration_size: None,
        bound_sd: None,
        bound_failure_rate: Some(config.reliability_bound()),
        exhaustive: false,
    })
}

/// Convenience: `ρ` as a float for bound queries.
pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    r.to_f64().expect("finite ratio")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{passive, substitution};
    use crate::field::PrimeModulus;

    fn dist(pairs: &[(u32, f64)]) -> Distribution<u32> {
        Distribution::from_weights(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn statistical_distance_examples() {
        let p = dist(&[(0, 0.5), (1, 0.5)]);
        assert_eq!(statistical_distance(&p, &p), 0.0);
        let q = dist(&[(2, 1.0)]);
        assert_eq!(statistical_distance(&dist(&[(0, 1.0)]), &q), 1.0);
        let r = dist(&[(0, 0.75), (1, 0.25)]);
        assert!((statistical_distance(&p, &r) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn distance_is_a_metric_on_samples() {
        let ds = [
            dist(&[(0, 0.2), (1, 0.8)]),
            dist(&[(0, 0.5), (1, 0.25), (2, 0.25)]),
            dist(&[(1, 1.0)]),
            dist(&[(0, 0.1), (1, 0.2), (2, 0.7)]),
        ];
        for a in &ds {
            assert_eq!(statistical_distance(a, a), 0.0);
            for b in &ds {
                let ab = statistical_distance(a, b);
                assert!((ab - statistical_distance(b, a)).abs() < 1e-15);
                for c in &ds {
                    assert!(
                        ab <= statistical_distance(a, c) + statistical_distance(c, b) + 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_denormalized_input() {
        assert!(matches!(
            Distribution::from_weights([(0u32, 0.5), (1, 0.6)]),
            Err(AnalysisError::NotNormalized(_))
        ));
        assert_eq!(
            Distribution::from_weights([(0u32, -0.25), (1, 1.25)]),
            Err(AnalysisError::NegativeMass)
        );
    }

    #[test]
    fn entropy_examples() {
        let u8dist = Distribution::uniform(0u32..8);
        assert!((u8dist.shannon_entropy() - 3.0).abs() < 1e-12);
        assert!((u8dist.min_entropy() - 3.0).abs() < 1e-12);
        let point = Distribution::point(7u32);
        assert_eq!(point.shannon_entropy(), 0.0);
        assert_eq!(point.min_entropy(), 0.0);
        assert!((binary_entropy(0.25) - 0.8112781244591328).abs() < 1e-12);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
    }

    #[test]
    fn rate_bound_examples() {
        let q = BoundsQuery {
            rho: 0.5,
            epsilon: 0.0,
            ..Default::default()
        };
        assert_eq!(rate_upper_bound(&q).unwrap(), 0.5);
        let q = BoundsQuery {
            rho: 1.0,
            epsilon: 0.0,
            ..Default::default()
        };
        assert_eq!(rate_upper_bound(&q).unwrap(), 0.0);
        let q = BoundsQuery {
            rho: 0.5,
            epsilon: 2f64.powi(-10),
            alphabet_bits: 10.0,
            pd_bits: 100.0,
            ..Default::default()
        };
        assert!((rate_upper_bound(&q).unwrap() - 0.69921875).abs() < 1e-12);
    }

    #[test]
    fn rate_bound_monotonicity() {
        let grid = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9];
        for (i, &rho) in grid.iter().enumerate() {
            for &rho2 in &grid[i + 1..] {
                let value = |rho| {
                    rate_upper_bound(&BoundsQuery {
                        rho,
                        epsilon: 1e-3,
                        alphabet_bits: 8.0,
                        pd_bits: 32.0,
                        ..Default::default()
                    })
                    .unwrap()
                };
                assert!(value(rho2) <= value(rho));
            }
        }
        for eps in [0.0, 1e-6, 1e-4, 1e-2] {
            for eps2 in [2e-2, 5e-2] {
                let value = |epsilon| {
                    rate_upper_bound(&BoundsQuery {
                        rho: 0.5,
                        epsilon,
                        alphabet_bits: 8.0,
                        pd_bits: 32.0,
                        ..Default::default()
                    })
                    .unwrap()
                };
                assert!(value(eps) <= value(eps2));
            }
        }
    }

    #[test]
    fn two_round_failure_floor() {
        // |M| -> infinity: H(delta) >= 1/2.
        let d = min_delta_two_round(1e18).unwrap();
        assert!((d - 0.110027864).abs() < 1e-6);
        // |M| = 2: H(delta) >= 1/4.
        let d = min_delta_two_round(2.0).unwrap();
        assert!((d - 0.041692690).abs() < 1e-6);
        assert!((2.0 * binary_entropy(d) - 0.5).abs() < 1e-7);
        // |M| = 1 is vacuous.
        assert_eq!(min_delta_two_round(1.0).unwrap(), 0.0);
    }

    #[test]
    fn tr_bound_examples() {
        let q = BoundsQuery {
            wires: 4,
            corrupted: 2,
            delta: 0.0,
            ..Default::default()
        };
        assert_eq!(smt_tr_lower_bound(&q, TrBoundVariant::PerfectSecrecy).unwrap(), 2.0);
        assert_eq!(smt_tr_lower_bound(&q, TrBoundVariant::EpsilonSecrecy).unwrap(), 2.0);

        // Worked comparison at N=16, t=8, |M|=2^16, eps=2^-16.
        let q = BoundsQuery {
            wires: 16,
            corrupted: 8,
            epsilon: 2f64.powi(-16),
            delta: 0.0,
            message_bits: 16.0,
            ..Default::default()
        };
        let ggo = smt_tr_lower_bound(&q, TrBoundVariant::Ggo10).unwrap();
        let direct = (16.0 / 8.0) * (1.0 - 3f64.log2() / 16.0);
        assert!((ggo - direct).abs() < 1e-9);
    }

    #[test]
    fn table1_examples() {
        assert!((table1_rate(Table1Protocol::ThisWork, 8, 16, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((table1_rate(Table1Protocol::Garay2, 8, 16, 0.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(table1_rate(Table1Protocol::Shi, 0, 16, 0.0).unwrap(), 1.0);
        assert_eq!(table1_rate(Table1Protocol::Garay1, 0, 16, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn family_rate_converges_from_below() {
        let half = Ratio::new(1u64, 2);
        for (xi_num, xi_den) in [(1u64, 5u64), (1, 10), (1, 20)] {
            let xi = Ratio::new(xi_num, xi_den);
            let u = (xi_den + xi_num - 1) / xi_num; // ceil(1/xi)
            let rate = family_rate(u, half);
            let target = Ratio::from_integer(1) - half - xi;
            assert!(rate >= target, "u={u}");
            assert!(rate <= Ratio::from_integer(1) - half);
        }
    }

    #[test]
    fn round_checker_rules_out_all_two_round_forms() {
        let half = Ratio::new(1u64, 2);
        for form in ProtocolShape::two_round_forms() {
            let verdict = check_message_rounds(&form, half, half);
            assert!(matches!(verdict, ShapeVerdict::RuledOut(_)), "{form:?}");
            // Below the threshold the theorem does not apply.
            assert_eq!(
                check_message_rounds(&form, Ratio::new(1, 4), half),
                ShapeVerdict::NotRuledOut
            );
        }
        use MessageRound::*;
        assert_eq!(
            check_message_rounds(
                &ProtocolShape(vec![DiscussionBobToAlice, DiscussionAliceToBob]),
                half,
                half
            ),
            ShapeVerdict::RuledOut(RuledOutReason::NoWiretapRound)
        );
        assert_eq!(
            check_message_rounds(
                &ProtocolShape(vec![
                    WiretapAliceToBob,
                    DiscussionBobToAlice,
                    DiscussionAliceToBob
                ]),
                half,
                half
            ),
            ShapeVerdict::NotRuledOut
        );
    }

    fn tiny_config() -> ProtocolConfig {
        let half = Ratio::new(1, 2);
        ProtocolConfig::new(2, 2, half, half, half)
            .unwrap()
            .with_modulus(PrimeModulus::new(5).unwrap())
            .unwrap()
    }

    #[test]
    fn identical_messages_have_zero_distance() {
        let config = tiny_config();
        let sets = ReadWriteSets::restricted(2, [0usize].into_iter().collect()).unwrap();
        let adversary = passive(sets, derive_seed(3, 3, 3));
        let m = Message::from_values(&config, &[2]).unwrap();
        let report =
            verify_secrecy_exhaustive(&config, &m, &m, &adversary, 10_000_000, Representation::Native)
                .unwrap();
        assert!(report.sd_exact.unwrap().is_zero());
        assert_eq!(report.enumeration_size, Some(5u128.pow(6)));
    }

    #[test]
    fn full_read_leaks() {
        // Negative control: the adversary reads every component while the
        // message keeps one element, so views must separate.
        let config = ProtocolConfig::explicit(
            2,
            2,
            PrimeModulus::new(5).unwrap(),
            Ratio::from_integer(1),
            Ratio::new(0, 1),
            Ratio::from_integer(1),
            1,
        )
        .unwrap();
        assert!(!config.satisfies_secrecy_condition());
        let sets = ReadWriteSets::new(
            2,
            [0usize, 1].into_iter().collect(),
            std::collections::BTreeSet::new(),
        )
        .unwrap();
        let adversary = passive(sets, derive_seed(4, 4, 4));
        let m1 = Message::from_values(&config, &[0]).unwrap();
        let m2 = Message::from_values(&config, &[1]).unwrap();
        let report = verify_secrecy_exhaustive(
            &config,
            &m1,
            &m2,
            &adversary,
            10_000_000,
            Representation::Native,
        )
        .unwrap();
        assert!(!report.sd_exact.unwrap().is_zero());
        assert_eq!(report.bound_sd, None);
    }

    #[test]
    fn budget_is_enforced() {
        let config = tiny_config();
        let sets = ReadWriteSets::restricted(2, [0usize].into_iter().collect()).unwrap();
        let adversary = passive(sets, derive_seed(0, 0, 0));
        let m = Message::from_values(&config, &[2]).unwrap();
        assert!(matches!(
            verify_secrecy_exhaustive(&config, &m, &m, &adversary, 100, Representation::Native),
            Err(AnalysisError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn passive_adversary_never_fails() {
        let half = Ratio::new(1, 2);
        let config = ProtocolConfig::new(4, 2, half, half, half).unwrap();
        let sets = ReadWriteSets::restricted(4, [0usize, 1].into_iter().collect()).unwrap();
        let report = estimate_reliability(
            &config,
            AdversaryKind::Passive,
            &sets,
            1000,
            42,
            Representation::Native,
        )
        .unwrap();
        assert_eq!(report.failures, Some(0));
        assert_eq!(report.failure_within_bound(3.0), Some(true));
    }

    #[test]
    fn substitution_failures_stay_under_budget() {
        let half = Ratio::new(1, 2);
        let config = ProtocolConfig::new(4, 2, half, half, half).unwrap();
        let sets = ReadWriteSets::restricted(4, [0usize, 1].into_iter().collect()).unwrap();
        let report = estimate_reliability(
            &config,
            AdversaryKind::Substitution,
            &sets,
            5000,
            42,
            Representation::Native,
        )
        .unwrap();
        assert!(report.measured_failure_rate.unwrap() > 0.0);
        assert_eq!(report.failure_within_bound(3.0), Some(true));
    }

    #[test]
    fn smt_representation_reports_identically() {
        let config = tiny_config();
        let sets = ReadWriteSets::restricted(2, [0usize].into_iter().collect()).unwrap();
        let adversary = substitution(sets.clone(), derive_seed(5, 5, 5));
        let m1 = Message::from_values(&config, &[0]).unwrap();
        let m2 = Message::from_values(&config, &[3]).unwrap();
        let native = verify_secrecy_exhaustive(
            &config,
            &m1,
            &m2,
            &adversary,
            10_000_000,
            Representation::Native,
        )
        .unwrap();
        let smt = verify_secrecy_exhaustive(
            &config,
            &m1,
            &m2,
            &adversary,
            10_000_000,
            Representation::Smt,
        )
        .unwrap();
        assert_eq!(native, smt);

        let rel_native = estimate_reliability(
            &config,
            AdversaryKind::Substitution,
            &sets,
            500,
            7,
            Representation::Native,
        )
        .unwrap();
        let rel_smt = estimate_reliability(
            &config,
            AdversaryKind::Substitution,
            &sets,
            500,
            7,
            Representation::Smt,
        )
        .unwrap();
        assert_eq!(rel_native, rel_smt);
    }
}
