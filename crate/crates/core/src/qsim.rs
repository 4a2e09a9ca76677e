//! Exact small-scale quantum state simulation.
//!
//! One- and two-qubit states are stored as full complex amplitude vectors.
//! The gate set is deliberately tiny: real plane rotations, their adjoints,
//! and the identity. Rotations commute with each other, which is what lets
//! the two parties of the exchange undo their transformations in either
//! order. Measurement follows the Born rule; entangled pairs collapse lazily
//! (the first measured half samples the joint outcome, the second half reads
//! the stored correlated bit).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Tolerance for algebraic identities on matrices (unitarity, commutation).
pub const MATRIX_TOL: f64 = 1e-12;
/// Tolerance for state normalization after chained operations.
pub const NORM_TOL: f64 = 1e-9;

/// Single-qubit state: amplitudes of |0⟩ and |1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVec1 {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl StateVec1 {
    /// The computational basis state |b⟩.
    pub fn basis(b: u8) -> Self {
        debug_assert!(b <= 1);
        if b == 0 {
            StateVec1 {
                a0: Complex64::new(1.0, 0.0),
                a1: Complex64::new(0.0, 0.0),
            }
        } else {
            StateVec1 {
                a0: Complex64::new(0.0, 0.0),
                a1: Complex64::new(1.0, 0.0),
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        self.a0.is_finite()
            && self.a1.is_finite()
            && (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }
}

/// Two-qubit state: amplitudes of |00⟩, |01⟩, |10⟩, |11⟩ in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVec2 {
    pub amps: [Complex64; 4],
}

impl StateVec2 {
    pub fn basis(index: usize) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVec2 { amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.amps.iter().all(|a| a.is_finite()) && (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }
}

/// 2×2 complex matrix, row-major. All constructors yield unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Unitary2 {
            m: [[one, zero], [zero, one]],
        }
    }

    /// Real plane rotation by `theta`:
    /// [[cos θ, −sin θ], [sin θ, cos θ]].
    ///
    /// Rotations commute with each other, so a party can undo its own
    /// transformation regardless of what the other party applied in between.
    pub fn rotation(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("rotation angle must be finite"));
        }
        let (s, c) = theta.sin_cos();
        let re = |x: f64| Complex64::new(x, 0.0);
        Ok(Unitary2 {
            m: [[re(c), re(-s)], [re(s), re(c)]],
        })
    }

    /// Conjugate transpose. For rotations this is the inverse rotation.
    pub fn adjoint(&self) -> Self {
        Unitary2 {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    pub fn mul(&self, rhs: &Unitary2) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        Unitary2 { m }
    }

    pub fn apply(&self, psi: &StateVec1) -> StateVec1 {
        StateVec1 {
            a0: self.m[0][0] * psi.a0 + self.m[0][1] * psi.a1,
            a1: self.m[1][0] * psi.a0 + self.m[1][1] * psi.a1,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn is_unitary(&self) -> bool {
        let p = self.adjoint().mul(self);
        let id = Unitary2::identity();
        (0..2).all(|i| (0..2).all(|j| (p.m[i][j] - id.m[i][j]).norm() <= MATRIX_TOL))
    }

    /// Max entrywise absolute difference to another matrix.
    pub fn max_diff(&self, other: &Unitary2) -> f64 {
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }
}

/// Measure a single qubit in the computational basis.
///
/// Returns the outcome bit and the collapsed state, which is always an exact
/// basis state.
pub fn measure1(psi: &StateVec1, rng: &mut RandomSource) -> (u8, StateVec1) {
    let p0 = psi.a0.norm_sqr() / psi.norm_sqr();
    let outcome = if rng.next_f64() < p0 { 0 } else { 1 };
    (outcome, StateVec1::basis(outcome))
}

/// Which Bell state a pair was prepared in, selected by one parity bit.
///
/// Parity 0 is the equal-outcome state (|00⟩ + |11⟩)/√2; parity 1 is the
/// opposite-outcome state (|01⟩ + |10⟩)/√2. Once both halves are measured,
/// the XOR of the two outcomes equals the parity bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellType {
    parity: u8,
}

impl BellType {
    pub fn from_bit(parity: u8) -> Result<Self> {
        if parity > 1 {
            return Err(Error::invalid("bell parity must be 0 or 1"));
        }
        Ok(BellType { parity })
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }
}

/// Canonical state vector for a Bell type.
pub fn bell_state(t: BellType) -> StateVec2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if t.parity() == 0 {
        StateVec2 {
            amps: [h, zero, zero, h],
        }
    } else {
        StateVec2 {
            amps: [zero, h, h, zero],
        }
    }
}

/// Which half of an entangled pair is being acted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn name(&self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }
}

/// A shared Bell pair with collapse bookkeeping.
///
/// The joint state is stored in full so the parity invariant is checkable
/// rather than baked in. Collapse is lazy: the first `measure_half` on either
/// side samples the joint outcome per the Born rule and records both bits;
/// the second side reads its stored bit without consuming randomness.
#[derive(Debug, Clone)]
pub struct EntangledPair {
    bell: BellType,
    joint: StateVec2,
    outcome_a: Option<u8>,
    outcome_b: Option<u8>,
    taken_a: bool,
    taken_b: bool,
}

impl EntangledPair {
    pub fn new(bell: BellType) -> Self {
        EntangledPair {
            bell,
            joint: bell_state(bell),
            outcome_a: None,
            outcome_b: None,
            taken_a: false,
            taken_b: false,
        }
    }

    pub fn bell(&self) -> BellType {
        self.bell
    }

    pub fn joint(&self) -> &StateVec2 {
        &self.joint
    }

    pub fn outcome(&self, side: Side) -> Option<u8> {
        match side {
            Side::A => self.outcome_a,
            Side::B => self.outcome_b,
        }
    }

    /// Measure one half in the computational basis.
    ///
    /// Errors if the requested side was already measured.
    pub fn measure_half(&mut self, side: Side, rng: &mut RandomSource) -> Result<u8> {
        let taken = match side {
            Side::A => &mut self.taken_a,
            Side::B => &mut self.taken_b,
        };
        if *taken {
            return Err(Error::AlreadyCollapsed(side.name()));
        }
        *taken = true;

        if self.outcome_a.is_none() {
            // First measurement on either side: sample the joint outcome.
            let norm = self.joint.norm_sqr();
            let u = rng.next_f64() * norm;
            let mut acc = 0.0;
            let mut index = 3;
            for (i, amp) in self.joint.amps.iter().enumerate() {
                acc += amp.norm_sqr();
                if u < acc {
                    index = i;
                    break;
                }
            }
            self.outcome_a = Some((index >> 1) as u8);
            self.outcome_b = Some((index & 1) as u8);
            self.joint = StateVec2::basis(index);
        }

        Ok(match side {
            Side::A => self.outcome_a.unwrap(),
            Side::B => self.outcome_b.unwrap(),
        })
    }
}
