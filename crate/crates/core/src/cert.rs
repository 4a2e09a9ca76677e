//! Certificate authority: master keys, entangled-pair batches, certificate
//! collapse, key-derived placement, and the XOR authenticity check.
//!
//! The authority issues one Bell pair per master-key bit; the key bit selects
//! the pair's parity. Each party measures its halves to obtain a classical
//! certificate, and the two certificates XOR to the key. Bob authenticates a
//! received certificate by XOR-ing it with his own and with the key: an
//! all-zero residue means authentic.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::qsim::{BellType, EntangledPair, Side};
use crate::rng::RandomSource;

/// The pre-shared key between the authority and the clients. Each bit picks
/// the Bell parity of one issued pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterKey(BitString);

impl MasterKey {
    pub fn from_bits(bits: BitString) -> Self {
        MasterKey(bits)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The classical bit string obtained by collapsing one side's pair halves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate(BitString);

impl Certificate {
    pub fn from_bits(bits: BitString) -> Self {
        Certificate(bits)
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of the three-way XOR check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthResult {
    pub authentic: bool,
    pub residue: BitString,
}

/// Draw an n-bit master key.
pub fn gen_master_key(n: usize, rng: &mut RandomSource) -> MasterKey {
    MasterKey(BitString::random(n, rng))
}

/// One side's view of an issued batch. Both views share the same underlying
/// pairs, so collapsing one side constrains the other.
pub struct BatchView {
    side: Side,
    pairs: Vec<Arc<Mutex<EntangledPair>>>,
}

impl BatchView {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Snapshot of pair k, for inspecting joint state and outcomes.
    pub fn pair(&self, k: usize) -> EntangledPair {
        self.pairs[k].lock().expect("pair lock poisoned").clone()
    }
}

/// Create one entangled pair per key bit and hand the two halves out.
pub fn issue_batch(key: &MasterKey) -> (BatchView, BatchView) {
    let pairs: Vec<Arc<Mutex<EntangledPair>>> = key
        .bits()
        .iter()
        .map(|bit| {
            let bell = BellType::from_bit(bit).expect("key bits are 0/1");
            Arc::new(Mutex::new(EntangledPair::new(bell)))
        })
        .collect();
    let alice = BatchView {
        side: Side::A,
        pairs: pairs.clone(),
    };
    let bob = BatchView { side: Side::B, pairs };
    (alice, bob)
}

/// Measure every half on this side, in order, yielding the certificate.
///
/// Errors if any pair on this side was already collapsed.
pub fn collapse_certificate(view: &BatchView, rng: &mut RandomSource) -> Result<Certificate> {
    let mut bits = BitString::new();
    for pair in &view.pairs {
        let mut pair = pair.lock().expect("pair lock poisoned");
        bits.push(pair.measure_half(view.side, rng)?);
    }
    Ok(Certificate(bits))
}

/// Three-way XOR authenticity check: residue = key ⊕ received ⊕ local.
/// Authentic exactly when the residue contains no 1.
pub fn verify(key: &MasterKey, received: &Certificate, local: &Certificate) -> Result<AuthResult> {
    if key.len() != received.len() || key.len() != local.len() {
        return Err(Error::invalid(format!(
            "verify length mismatch: key {}, received {}, local {}",
            key.len(),
            received.len(),
            local.len()
        )));
    }
    let residue = key.bits().xor(received.bits())?.xor(local.bits())?;
    Ok(AuthResult {
        authentic: residue.is_zero(),
        residue,
    })
}

/// Where the certificate sits inside the combined stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementMode {
    /// Contiguous block at a key-derived offset.
    KeyedBlock,
    /// Certificate appended after the message.
    AppendEnd,
}

/// Key-derived certificate positions: a contiguous block of N indices
/// starting at offset (big-endian key value) mod (message_len + 1) within
/// the combined stream of length message_len + N.
pub fn placement_positions(key: &MasterKey, message_len: usize) -> Vec<usize> {
    block_positions(
        key.bits().value_mod(message_len as u64 + 1) as usize,
        key.len(),
    )
}

/// Positions of a contiguous N-bit block starting at `offset`.
pub fn block_positions(offset: usize, n: usize) -> Vec<usize> {
    (offset..offset + n).collect()
}

/// Certificate positions under the given placement mode.
pub fn positions_for(mode: PlacementMode, key: &MasterKey, message_len: usize) -> Vec<usize> {
    match mode {
        PlacementMode::KeyedBlock => placement_positions(key, message_len),
        PlacementMode::AppendEnd => block_positions(message_len, key.len()),
    }
}

fn check_positions(positions: &[usize], total_len: usize) -> Result<()> {
    let mut prev: Option<usize> = None;
    for &p in positions {
        if p >= total_len {
            return Err(Error::invalid(format!(
                "position {p} out of range for stream length {total_len}"
            )));
        }
        if let Some(q) = prev {
            if p <= q {
                return Err(Error::invalid("positions must be strictly increasing"));
            }
        }
        prev = Some(p);
    }
    Ok(())
}

/// Interleave certificate bits into the message at the given positions.
///
/// The result has length `message.len() + cert.len()`; certificate bits sit
/// at `positions`, message bits fill the remaining slots in order.
pub fn assemble_stream(
    message: &BitString,
    cert: &Certificate,
    positions: &[usize],
) -> Result<BitString> {
    if positions.len() != cert.len() {
        return Err(Error::invalid(format!(
            "{} positions for a {}-bit certificate",
            positions.len(),
            cert.len()
        )));
    }
    let total = message.len() + cert.len();
    check_positions(positions, total)?;

    let mut out = vec![u8::MAX; total];
    for (i, &p) in positions.iter().enumerate() {
        out[p] = cert.bits().bit(i);
    }
    let mut msg_iter = message.iter();
    for slot in out.iter_mut() {
        if *slot == u8::MAX {
            *slot = msg_iter.next().expect("slot count matches message length");
        }
    }
    BitString::from_bits(out)
}

/// Exact inverse of [`assemble_stream`].
pub fn extract_stream(stream: &BitString, positions: &[usize]) -> Result<(BitString, Certificate)> {
    check_positions(positions, stream.len())?;
    let mut cert = BitString::new();
    let mut message = BitString::new();
    let mut pos_iter = positions.iter().peekable();
    for (i, bit) in stream.iter().enumerate() {
        if pos_iter.peek() == Some(&&i) {
            cert.push(bit);
            pos_iter.next();
        } else {
            message.push(bit);
        }
    }
    Ok((message, Certificate(cert)))
}
