//! Key distribution with an a-posteriori grant.
//!
//! Charles controls a singlet source and, for every pair, applies one of
//! `{I, sx, sy, sz}` to Bob's photon, chosen uniformly and kept secret.
//! Alice and Bob measure in their tetrahedron frames. Without Charles's list
//! of choices their pooled data are uncorrelated; once he announces it, Bob
//! relabels his outcomes (`l -> l xor c`) and recovers the singlet statistics.
//!
//! The parties are separate state machines that only talk through a
//! [`Channel`]; the physical source is modeled as its own component so
//! Charles never sees measurement outcomes.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::Configuration;
use crate::error::{Error, Result};
use crate::pauli::{bell_state, singlet_vector, DensityOperator, Label, PauliIndex};
use crate::sim::{estimate, joint_table, CountTable, JointProbabilityTable, STREAM_ALGORITHM};
use crate::wigner::{QuartitPhasePointSet, QuartitWigner};

/// Stream layout on top of [`STREAM_ALGORITHM`]: one ChaCha20 key from the
/// seed, stream 0 for the source's outcome sampling, stream 1 for Charles.
pub const SESSION_STREAMS: &str = "nature=stream0,charles=stream1";
const NATURE_STREAM: u64 = 0;
const CHARLES_STREAM: u64 = 1;

/// Default fidelity threshold of [`tomographic_check`].
pub const DEFAULT_ALARM_THRESHOLD: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionParams {
    pub pairs: u64,
    pub grant: bool,
    /// Werner visibility applied to every emitted pair; `None` is noiseless.
    pub noise: Option<f64>,
    pub seed: u64,
    pub config: Configuration,
}

impl SessionParams {
    pub fn validate(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::InvalidShots);
        }
        if let Some(v) = self.noise {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::OutOfRange { name: "visibility", value: v });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionMetadata {
    pub params: SessionParams,
    pub stream_algorithm: String,
    pub streams: String,
    pub messages_delivered: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    /// Detector index (0..3) that fired at Alice, per round.
    pub alice_outcomes: Vec<u8>,
    /// Detector index (0..3) that fired at Bob, per round.
    pub bob_outcomes: Vec<u8>,
    /// Charles's secret displacement per round.
    pub charles_choices: Vec<PauliIndex>,
    /// Charles's announcement per round, present only when granted.
    pub announcements: Option<Vec<PauliIndex>>,
    pub metadata: SessionMetadata,
}

impl SessionTranscript {
    pub fn pairs(&self) -> usize {
        self.alice_outcomes.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Party {
    Alice,
    Bob,
    Charles,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Message {
    /// A photon of pair `round` reached the recipient, firing detector `outcome`.
    PairDelivery { round: u64, outcome: Label },
    /// The sender has recorded its outcome for `round`.
    OutcomeRecorded { round: u64 },
    /// Charles discloses the displacement used in `round`.
    Announcement { round: u64, pauli: PauliIndex },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Envelope {
    pub from: Party,
    pub to: Party,
    pub message: Message,
}

/// Transport between parties.
pub trait Channel {
    fn send(&mut self, envelope: Envelope);
    /// Next pending message for `to`, in send order.
    fn receive(&mut self, to: Party) -> Option<Envelope>;
    fn delivered(&self) -> u64;
}

/// FIFO queues held in memory, one per recipient.
#[derive(Debug, Default)]
pub struct InMemoryChannel {
    queues: [VecDeque<Envelope>; 3],
    delivered: u64,
}

fn slot(p: Party) -> usize {
    match p {
        Party::Alice => 0,
        Party::Bob => 1,
        Party::Charles => 2,
    }
}

impl Channel for InMemoryChannel {
    fn send(&mut self, envelope: Envelope) {
        self.queues[slot(envelope.to)].push_back(envelope);
    }

    fn receive(&mut self, to: Party) -> Option<Envelope> {
        let e = self.queues[slot(to)].pop_front();
        if e.is_some() {
            self.delivered += 1;
        }
        e
    }

    fn delivered(&self) -> u64 {
        self.delivered
    }
}

/// Entangled-pair source: prepares the displaced state Charles asks for and
/// emits the measured photons. Outcomes go straight onto the channel.
struct Source {
    rng: ChaCha20Rng,
    cumulative: [[f64; 16]; 4],
    probs: [[f64; 16]; 4],
}

impl Source {
    fn new(seed: u64, tables: &[JointProbabilityTable; 4]) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(NATURE_STREAM);
        let probs = tables.map(|t| std::array::from_fn(|x| t.probabilities()[x / 4][x % 4]));
        let cumulative = probs.map(|p: [f64; 16]| {
            let mut acc = 0.0;
            p.map(|x| {
                acc += x;
                acc
            })
        });
        Self { rng, cumulative, probs }
    }

    fn emit(&mut self, round: u64, pauli: PauliIndex, channel: &mut impl Channel) {
        let c = pauli.index();
        let total = self.cumulative[c][15];
        let u = self.rng.random::<f64>() * total;
        let probs = &self.probs[c];
        let last = probs.iter().rposition(|&p| p > 0.0).expect("normalized table");
        let cell = self.cumulative[c]
            .iter()
            .zip(probs)
            .position(|(&cum, &p)| p > 0.0 && u < cum)
            .unwrap_or(last);
        for (to, idx) in [(Party::Alice, cell / 4), (Party::Bob, cell % 4)] {
            channel.send(Envelope {
                from: Party::Charles,
                to,
                message: Message::PairDelivery {
                    round,
                    outcome: Label::from_index(idx),
                },
            });
        }
    }
}

struct Charles {
    rng: ChaCha20Rng,
    choices: Vec<PauliIndex>,
    acknowledged: Vec<u8>,
}

impl Charles {
    fn new(seed: u64, pairs: usize) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(CHARLES_STREAM);
        Self {
            rng,
            choices: Vec::with_capacity(pairs),
            acknowledged: vec![0; pairs],
        }
    }

    fn choose(&mut self) -> PauliIndex {
        let c = Label::from_index(self.rng.random_range(0..4));
        self.choices.push(c);
        c
    }

    fn handle(&mut self, envelope: Envelope) {
        if let Message::OutcomeRecorded { round } = envelope.message {
            self.acknowledged[round as usize] += 1;
        }
    }

    fn announce(&self, channel: &mut impl Channel) {
        for (round, &pauli) in self.choices.iter().enumerate() {
            for to in [Party::Alice, Party::Bob] {
                channel.send(Envelope {
                    from: Party::Charles,
                    to,
                    message: Message::Announcement {
                        round: round as u64,
                        pauli,
                    },
                });
            }
        }
    }
}

struct Receiver {
    me: Party,
    outcomes: Vec<u8>,
    announcements: Vec<PauliIndex>,
}

impl Receiver {
    fn new(me: Party, pairs: usize) -> Self {
        Self {
            me,
            outcomes: Vec::with_capacity(pairs),
            announcements: Vec::new(),
        }
    }

    fn handle(&mut self, envelope: Envelope, channel: &mut impl Channel) {
        match envelope.message {
            Message::PairDelivery { round, outcome } => {
                debug_assert_eq!(round as usize, self.outcomes.len());
                self.outcomes.push(outcome.index() as u8);
                channel.send(Envelope {
                    from: self.me,
                    to: Party::Charles,
                    message: Message::OutcomeRecorded { round },
                });
            }
            Message::Announcement { round, pauli } => {
                debug_assert_eq!(round as usize, self.announcements.len());
                self.announcements.push(pauli);
            }
            Message::OutcomeRecorded { .. } => {}
        }
    }
}

/// Joint tables of the four displaced (and optionally Werner-degraded) states.
pub fn displaced_tables(config: Configuration, noise: Option<f64>) -> Result<[JointProbabilityTable; 4]> {
    let (pa, pb) = config.parities();
    let mixed = DensityOperator::maximally_mixed(4)?;
    let mut out = Vec::with_capacity(4);
    for c in Label::ALL {
        let pure = bell_state(c);
        let rho = match noise {
            Some(v) => pure.mix(&mixed, v)?,
            None => pure,
        };
        out.push(joint_table(&rho, pa, pb)?);
    }
    Ok(out.try_into().expect("four tables"))
}

pub fn run_session(params: &SessionParams) -> Result<SessionTranscript> {
    params.validate()?;
    let pairs = usize::try_from(params.pairs).map_err(|_| Error::OutOfRange {
        name: "pairs",
        value: params.pairs as f64,
    })?;
    let tables = displaced_tables(params.config, params.noise)?;
    let mut channel = InMemoryChannel::default();
    let mut source = Source::new(params.seed, &tables);
    let mut charles = Charles::new(params.seed, pairs);
    let mut alice = Receiver::new(Party::Alice, pairs);
    let mut bob = Receiver::new(Party::Bob, pairs);

    let pump = |channel: &mut InMemoryChannel, alice: &mut Receiver, bob: &mut Receiver, charles: &mut Charles| {
        while let Some(e) = channel.receive(Party::Alice) {
            alice.handle(e, channel);
        }
        while let Some(e) = channel.receive(Party::Bob) {
            bob.handle(e, channel);
        }
        while let Some(e) = channel.receive(Party::Charles) {
            charles.handle(e);
        }
    };

    for round in 0..params.pairs {
        let c = charles.choose();
        source.emit(round, c, &mut channel);
        pump(&mut channel, &mut alice, &mut bob, &mut charles);
    }
    debug_assert!(charles.acknowledged.iter().all(|&a| a == 2));
    let announcements = if params.grant {
        charles.announce(&mut channel);
        pump(&mut channel, &mut alice, &mut bob, &mut charles);
        debug_assert_eq!(alice.announcements, bob.announcements);
        Some(bob.announcements)
    } else {
        None
    };
    Ok(SessionTranscript {
        alice_outcomes: alice.outcomes,
        bob_outcomes: bob.outcomes,
        charles_choices: charles.choices,
        announcements,
        metadata: SessionMetadata {
            params: *params,
            stream_algorithm: STREAM_ALGORITHM.to_string(),
            streams: SESSION_STREAMS.to_string(),
            messages_delivered: channel.delivered(),
        },
    })
}

/// Independent sessions evaluated in parallel, returned in input order.
pub fn run_sessions(params: &[SessionParams]) -> Result<Vec<SessionTranscript>> {
    params.par_iter().map(run_session).collect()
}

/// Bob's outcomes relabeled with the announced displacements: `l -> l xor c`.
pub fn unscramble(transcript: &SessionTranscript) -> Result<Vec<u8>> {
    let ann = transcript.announcements.as_ref().ok_or(Error::MissingAnnouncements)?;
    Ok(relabel(&transcript.bob_outcomes, ann))
}

/// `l -> l xor c` per round; an involution for fixed announcements.
pub fn relabel(bob: &[u8], announcements: &[PauliIndex]) -> Vec<u8> {
    bob.iter()
        .zip(announcements)
        .map(|(&b, c)| Label::from_index(usize::from(b)).xor(*c).index() as u8)
        .collect()
}

/// Counts of `(x, y)` pairs, both in 0..3.
pub fn pair_counts(x: &[u8], y: &[u8]) -> [[u64; 4]; 4] {
    let mut counts = [[0u64; 4]; 4];
    for (&a, &b) in x.iter().zip(y) {
        counts[usize::from(a)][usize::from(b)] += 1;
    }
    counts
}

/// `I(A;B) = sum p log2(p / (p_a p_b))` in bits, with `0 log 0 = 0`.
pub fn mutual_information(p: &[[f64; 4]; 4]) -> f64 {
    let pa: [f64; 4] = p.map(|r| r.iter().sum());
    let pb: [f64; 4] = std::array::from_fn(|l| p.iter().map(|r| r[l]).sum());
    let mut mi = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            if p[k][l] > 0.0 {
                mi += p[k][l] * (p[k][l] / (pa[k] * pb[l])).log2();
            }
        }
    }
    mi.max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MiEstimate {
    /// Plug-in value on empirical frequencies.
    pub bits: f64,
    /// First-order upward bias `(4-1)(4-1) / (2 N ln 2)`.
    pub bias: f64,
    pub samples: u64,
}

pub fn mutual_information_counts(counts: &[[u64; 4]; 4]) -> Result<MiEstimate> {
    let n: u64 = counts.iter().flatten().sum();
    if n == 0 {
        return Err(Error::InvalidShots);
    }
    let p = counts.map(|r| r.map(|c| c as f64 / n as f64));
    Ok(MiEstimate {
        bits: mutual_information(&p),
        bias: 9.0 / (2.0 * n as f64 * std::f64::consts::LN_2),
        samples: n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapabilityReport {
    /// Alice vs Bob as recorded.
    pub pre_announcement_mi: MiEstimate,
    /// Alice vs relabeled Bob; absent when denied.
    pub post_announcement_mi: Option<MiEstimate>,
    /// Charles's choices vs Alice's outcomes.
    pub charles_alice_mi: MiEstimate,
    /// Rounds with relabeled Bob equal to Alice (the zero-probability cell
    /// of the TT singlet); reported for granted TT sessions only.
    pub forbidden_coincidences: Option<u64>,
}

pub fn capability_report(transcript: &SessionTranscript) -> Result<CapabilityReport> {
    let pre = mutual_information_counts(&pair_counts(&transcript.alice_outcomes, &transcript.bob_outcomes))?;
    let charles: Vec<u8> = transcript.charles_choices.iter().map(|c| c.index() as u8).collect();
    let charles_alice_mi = mutual_information_counts(&pair_counts(&charles, &transcript.alice_outcomes))?;
    let (post, forbidden) = match unscramble(transcript) {
        Ok(relabeled) => {
            let mi = mutual_information_counts(&pair_counts(&transcript.alice_outcomes, &relabeled))?;
            let forbidden = (transcript.metadata.params.config == Configuration::Tt).then(|| {
                transcript
                    .alice_outcomes
                    .iter()
                    .zip(&relabeled)
                    .filter(|(a, b)| a == b)
                    .count() as u64
            });
            (Some(mi), forbidden)
        }
        Err(Error::MissingAnnouncements) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(CapabilityReport {
        pre_announcement_mi: pre,
        post_announcement_mi: post,
        charles_alice_mi,
        forbidden_coincidences: forbidden,
    })
}

/// Detector-indexed Wigner distribution of the singlet in the given configuration.
pub fn singlet_reference(config: Configuration) -> QuartitWigner {
    let (pa, pb) = config.parities();
    let singlet = DensityOperator::pure(&singlet_vector()).expect("normalized");
    QuartitPhasePointSet::canonical(pa, pb)
        .coefficients(&singlet)
        .expect("two-qubit state")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographicCheck {
    pub rounds_used: u64,
    pub counts: CountTable,
    pub w_hat: QuartitWigner,
    pub min_eigenvalue: f64,
    pub fidelity: f64,
    pub threshold: f64,
    pub alarm: bool,
}

/// Sacrifices the first `ceil(fraction * pairs)` relabeled rounds to estimate
/// the fidelity with the singlet; raises the alarm below `threshold`.
pub fn tomographic_check(transcript: &SessionTranscript, fraction: f64, threshold: f64) -> Result<TomographicCheck> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::OutOfRange {
            name: "sacrifice fraction",
            value: fraction,
        });
    }
    let relabeled = unscramble(transcript)?;
    let used = ((fraction * transcript.pairs() as f64).ceil() as usize).clamp(1, transcript.pairs());
    let counts = CountTable::new(pair_counts(&transcript.alice_outcomes[..used], &relabeled[..used]))?;
    let config = transcript.metadata.params.config;
    let (pa, pb) = config.parities();
    let est = estimate(&counts, pa, pb)?;
    let fidelity = est.fidelity_vs(&singlet_reference(config))?;
    Ok(TomographicCheck {
        rounds_used: used as u64,
        counts,
        w_hat: est.w_hat,
        min_eigenvalue: est.min_eigenvalue,
        fidelity,
        threshold,
        alarm: fidelity < threshold,
    })
}
