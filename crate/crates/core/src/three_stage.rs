//! The three-stage exchange as an explicit state machine.
//!
//! Each message bit is encoded as a basis state and crosses the simulated
//! quantum channel three times: Alice applies her secret rotation and sends,
//! Bob applies his and returns, Alice undoes hers and sends again, and Bob
//! undoes his before measuring. Because rotations commute, an honest run
//! delivers the sent bits exactly. Every transmission can be tapped by an
//! [`Interceptor`], which is how the adversary models hook in.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::cert::{positions_for, assemble_stream, extract_stream, Certificate, MasterKey, PlacementMode};
use crate::error::{Error, Result};
use crate::qsim::{measure1, StateVec1, Unitary2};
use crate::rng::RandomSource;

/// A party's secret transformation parameter, canonicalized to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartySecret {
    angle: f64,
}

impl PartySecret {
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::invalid("party secret angle must be finite"));
        }
        Ok(PartySecret {
            angle: angle.rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Fresh secret drawn uniformly from [0, 2π).
    pub fn random(rng: &mut RandomSource) -> Self {
        PartySecret {
            angle: rng.next_f64() * std::f64::consts::TAU,
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn rotation(&self) -> Unitary2 {
        Unitary2::rotation(self.angle).expect("angle is finite by construction")
    }

    pub fn inverse_rotation(&self) -> Unitary2 {
        Unitary2::rotation(-self.angle).expect("angle is finite by construction")
    }
}

/// The three channel crossings of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// Alice → Bob, carrying R(θ_A)|b⟩.
    Stage1,
    /// Bob → Alice, carrying R(θ_B)R(θ_A)|b⟩.
    Stage2,
    /// Alice → Bob, carrying R(θ_B)|b⟩.
    Stage3,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Stage1, Stage::Stage2, Stage::Stage3];

    pub fn index(&self) -> usize {
        match self {
            Stage::Stage1 => 0,
            Stage::Stage2 => 1,
            Stage::Stage3 => 2,
        }
    }
}

/// Record of one channel crossing.
#[derive(Debug, Clone, Copy)]
pub struct Transmission {
    pub stage: Stage,
    pub qubit_index: usize,
    pub state_before_tap: StateVec1,
    pub state_after_tap: StateVec1,
}

/// Full record of one protocol run.
#[derive(Debug, Clone)]
pub struct SessionTranscript {
    pub sent_bits: BitString,
    pub received_bits: BitString,
    pub transmissions: Vec<Transmission>,
    pub tapped: [bool; 3],
}

/// A channel tap invoked on every transmission of the stages it covers.
///
/// The handler receives the in-flight state and returns the state to forward,
/// possibly after measuring or replacing it. The returned state must be
/// normalized.
pub trait Interceptor {
    fn tap(
        &mut self,
        stage: Stage,
        qubit_index: usize,
        state: StateVec1,
        rng: &mut RandomSource,
    ) -> StateVec1;

    /// Which stages this interceptor taps. Untapped stages pass through
    /// without invoking the handler.
    fn taps(&self, stage: Stage) -> bool {
        let _ = stage;
        true
    }
}

/// Encode a classical bit as the basis state |b⟩.
pub fn encode_bit(b: u8) -> StateVec1 {
    StateVec1::basis(b)
}

fn transmit(
    stage: Stage,
    qubit_index: usize,
    state: StateVec1,
    interceptor: &mut Option<&mut dyn Interceptor>,
    rng: &mut RandomSource,
    transcript: &mut SessionTranscript,
) -> StateVec1 {
    let after = match interceptor {
        Some(i) if i.taps(stage) => {
            transcript.tapped[stage.index()] = true;
            let forwarded = i.tap(stage, qubit_index, state, rng);
            debug_assert!(forwarded.is_normalized());
            forwarded
        }
        _ => state,
    };
    transcript.transmissions.push(Transmission {
        stage,
        qubit_index,
        state_before_tap: state,
        state_after_tap: after,
    });
    after
}

/// Run one three-stage session over `bits`.
///
/// With no interceptor the received bits equal the sent bits exactly: the
/// four rotations cancel, the pre-measurement state is a basis state up to
/// floating-point error, and measuring a basis state is deterministic.
pub fn run_session(
    alice: PartySecret,
    bob: PartySecret,
    bits: &BitString,
    mut interceptor: Option<&mut dyn Interceptor>,
    rng: &mut RandomSource,
) -> Result<SessionTranscript> {
    if bits.is_empty() {
        return Err(Error::invalid("message must be nonempty"));
    }

    let fwd_a = alice.rotation();
    let fwd_b = bob.rotation();
    let inv_a = alice.inverse_rotation();
    let inv_b = bob.inverse_rotation();

    let mut transcript = SessionTranscript {
        sent_bits: bits.clone(),
        received_bits: BitString::new(),
        transmissions: Vec::with_capacity(3 * bits.len()),
        tapped: [false; 3],
    };

    for (index, bit) in bits.iter().enumerate() {
        let mut state = fwd_a.apply(&encode_bit(bit));
        state = transmit(Stage::Stage1, index, state, &mut interceptor, rng, &mut transcript);
        state = fwd_b.apply(&state);
        state = transmit(Stage::Stage2, index, state, &mut interceptor, rng, &mut transcript);
        state = inv_a.apply(&state);
        state = transmit(Stage::Stage3, index, state, &mut interceptor, rng, &mut transcript);
        state = inv_b.apply(&state);
        let (received, _) = measure1(&state, rng);
        transcript.received_bits.push(received);
    }

    Ok(transcript)
}

/// Run a session carrying a message with an embedded certificate.
///
/// The combined stream is assembled with the key-derived placement, pushed
/// through [`run_session`], and split back into message and certificate at
/// the same positions on Bob's side.
#[allow(clippy::too_many_arguments)]
pub fn run_certified_session(
    alice: PartySecret,
    bob: PartySecret,
    message: &BitString,
    alice_cert: &Certificate,
    key: &MasterKey,
    mode: PlacementMode,
    interceptor: Option<&mut dyn Interceptor>,
    rng: &mut RandomSource,
) -> Result<(BitString, Certificate, SessionTranscript)> {
    if alice_cert.len() != key.len() {
        return Err(Error::invalid(format!(
            "certificate length {} does not match key length {}",
            alice_cert.len(),
            key.len()
        )));
    }
    let positions = positions_for(mode, key, message.len());
    let stream = assemble_stream(message, alice_cert, &positions)?;
    let transcript = run_session(alice, bob, &stream, interceptor, rng)?;
    let (received_message, received_cert) = extract_stream(&transcript.received_bits, &positions)?;
    Ok((received_message, received_cert, transcript))
}
