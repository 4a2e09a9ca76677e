//! Eavesdropper and man-in-the-middle models.
//!
//! Three attacks are modeled. Intercept-resend measures qubits in flight and
//! forwards the collapsed states. The plain man-in-the-middle terminates
//! Alice's session and originates a fresh one with Bob, substituting content;
//! without certificates nothing detects it. Against the certified protocol
//! Eve still learns the full plaintext stream, but she holds no pair halves,
//! so she must forge the certificate bits Bob will extract — either by
//! guessing them outright or by guessing the placement offset and replaying
//! the block she saw at that offset.
//!
//! Eve never touches the master key or Bob's pair halves: no adversary entry
//! point accepts a [`BatchView`] for Bob's side, and the key parameter is
//! consumed only by the honest endpoints inside [`run_mitm_certified`].

use crate::bits::BitString;
use crate::cert::{
    assemble_stream, block_positions, collapse_certificate, extract_stream, issue_batch,
    positions_for, verify, AuthResult, Certificate, MasterKey, PlacementMode,
};
use crate::error::{Error, Result};
use crate::qsim::{measure1, StateVec1};
use crate::rng::RandomSource;
use crate::three_stage::{run_session, Interceptor, PartySecret, Stage};

/// How Eve picks the placement offset in the known-plaintext attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetGuessPolicy {
    /// Uniform over all valid offsets 0..=message_len.
    Uniform,
    /// Always the same offset.
    Fixed(usize),
}

/// Which attack to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveStrategy {
    /// Measure-and-resend tap at one stage of an otherwise honest session.
    InterceptResend(Stage),
    /// Full session-splitting MITM with no certificates in play.
    MitmPlain,
    /// Certified MITM: Eve guesses both the certificate bits and their
    /// placement offset uniformly.
    MitmGuessCert,
    /// Certified MITM: Eve guesses the offset per policy, lifts the block at
    /// that offset from Alice's plaintext stream, and re-embeds it at the
    /// same offset in her forged stream.
    MitmKnownPlaintextCert(OffsetGuessPolicy),
}

/// What an attack run produced.
#[derive(Debug, Clone)]
pub struct AttackOutcome {
    /// The plaintext stream Eve recovered from Alice's session.
    pub eve_learned: BitString,
    /// The message bits Bob ended up with.
    pub bob_received_message: BitString,
    /// Bob's authenticity check, when the protocol provides one.
    pub bob_auth: Option<AuthResult>,
    /// True exactly when `bob_auth` exists and rejected.
    pub detected: bool,
}

/// Measure-and-resend tap in the computational basis at one stage.
pub struct MeasureResendTap {
    stage: Stage,
    observed: BitString,
}

impl MeasureResendTap {
    pub fn new(stage: Stage) -> Self {
        MeasureResendTap {
            stage,
            observed: BitString::new(),
        }
    }

    pub fn observed(&self) -> &BitString {
        &self.observed
    }
}

impl Interceptor for MeasureResendTap {
    fn tap(
        &mut self,
        _stage: Stage,
        _qubit_index: usize,
        state: StateVec1,
        rng: &mut RandomSource,
    ) -> StateVec1 {
        let (bit, collapsed) = measure1(&state, rng);
        self.observed.push(bit);
        collapsed
    }

    fn taps(&self, stage: Stage) -> bool {
        stage == self.stage
    }
}

/// Session-splitting MITM without certificates.
///
/// Eve completes the exchange with Alice on the original message and runs a
/// separate exchange with Bob on `forged`. Both sessions are honest in
/// isolation, so Eve learns Alice's message exactly and Bob receives the
/// forgery exactly; nothing is there to detect it.
pub fn run_mitm_plain(
    alice: PartySecret,
    bob: PartySecret,
    eve: PartySecret,
    message: &BitString,
    forged: &BitString,
    rng: &mut RandomSource,
) -> Result<AttackOutcome> {
    if message.is_empty() || forged.is_empty() {
        return Err(Error::invalid("message and forged message must be nonempty"));
    }
    let upstream = run_session(alice, eve, message, None, rng)?;
    let downstream = run_session(eve, bob, forged, None, rng)?;
    Ok(AttackOutcome {
        eve_learned: upstream.received_bits,
        bob_received_message: downstream.received_bits,
        bob_auth: None,
        detected: false,
    })
}

/// Measure-and-resend eavesdropper at one stage of a single honest session.
pub fn run_intercept_resend(
    alice: PartySecret,
    bob: PartySecret,
    stage: Stage,
    message: &BitString,
    rng: &mut RandomSource,
) -> Result<AttackOutcome> {
    if message.is_empty() {
        return Err(Error::invalid("message must be nonempty"));
    }
    let mut tap = MeasureResendTap::new(stage);
    let transcript = run_session(alice, bob, message, Some(&mut tap), rng)?;
    Ok(AttackOutcome {
        eve_learned: tap.observed,
        bob_received_message: transcript.received_bits,
        bob_auth: None,
        detected: false,
    })
}

/// Session-splitting MITM against the certified protocol.
///
/// The authority issues pair halves to Alice and Bob only. Alice collapses
/// her certificate, embeds it at the key-derived positions, and runs her
/// session — terminated by Eve, who therefore sees the whole plaintext
/// stream but not the key. Eve forges a stream per `strategy` and plays it
/// to Bob, who extracts at the true positions, collapses his own halves,
/// and runs the XOR check.
///
/// Randomness is consumed in a fixed order: Alice's collapse, the upstream
/// session, Eve's guesses, the downstream session, Bob's collapse.
#[allow(clippy::too_many_arguments)]
pub fn run_mitm_certified(
    alice: PartySecret,
    bob: PartySecret,
    eve: PartySecret,
    message: &BitString,
    forged: &BitString,
    key: &MasterKey,
    mode: PlacementMode,
    strategy: EveStrategy,
    rng: &mut RandomSource,
) -> Result<AttackOutcome> {
    if message.is_empty() || forged.is_empty() {
        return Err(Error::invalid("message and forged message must be nonempty"));
    }
    if forged.len() != message.len() {
        return Err(Error::invalid(
            "forged message must match the original message length",
        ));
    }
    if !matches!(
        strategy,
        EveStrategy::MitmGuessCert | EveStrategy::MitmKnownPlaintextCert(_)
    ) {
        return Err(Error::invalid(
            "certified MITM requires a certificate-forging strategy",
        ));
    }

    let n = key.len();
    let true_positions = positions_for(mode, key, message.len());

    let (alice_view, bob_view) = issue_batch(key);
    let alice_cert = collapse_certificate(&alice_view, rng)?;
    let stream = assemble_stream(message, &alice_cert, &true_positions)?;

    // Upstream: Alice <-> Eve. Honest-session identity gives Eve the stream.
    let upstream = run_session(alice, eve, &stream, None, rng)?;
    let eve_stream = upstream.received_bits.clone();

    let forged_stream = match strategy {
        EveStrategy::MitmGuessCert => {
            let offset = match mode {
                PlacementMode::KeyedBlock => rng.next_below(forged.len() as u64 + 1) as usize,
                PlacementMode::AppendEnd => forged.len(),
            };
            let guessed = Certificate::from_bits(BitString::random(n, rng));
            assemble_stream(forged, &guessed, &block_positions(offset, n))?
        }
        EveStrategy::MitmKnownPlaintextCert(policy) => {
            let offset = match policy {
                OffsetGuessPolicy::Uniform => rng.next_below(message.len() as u64 + 1) as usize,
                OffsetGuessPolicy::Fixed(o) => o,
            };
            if offset + n > eve_stream.len() {
                return Err(Error::invalid("guessed offset out of range"));
            }
            let presumed = Certificate::from_bits(BitString::from_bits(
                (offset..offset + n).map(|i| eve_stream.bit(i)),
            )?);
            assemble_stream(forged, &presumed, &block_positions(offset, n))?
        }
        _ => unreachable!(),
    };

    // Downstream: Eve <-> Bob on the forged stream.
    let downstream = run_session(eve, bob, &forged_stream, None, rng)?;
    let (bob_message, received_cert) = extract_stream(&downstream.received_bits, &true_positions)?;

    let bob_cert = collapse_certificate(&bob_view, rng)?;
    let auth = verify(key, &received_cert, &bob_cert)?;
    let detected = !auth.authentic;

    Ok(AttackOutcome {
        eve_learned: eve_stream,
        bob_received_message: bob_message,
        bob_auth: Some(auth),
        detected,
    })
}
