//! Independent oracles for the acceptance suite.
//!
//! Everything here is computed from first principles with its own tiny
//! 2×2 real matrix arithmetic and exhaustive enumeration — none of it calls
//! into the library under test.

pub type Mat2 = [[f64; 2]; 2];
pub type Vec2 = [f64; 2];

pub fn rot(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

pub fn matvec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn basis(b: usize) -> Vec2 {
    if b == 0 {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// Expected rates under a stage-1 computational-basis measure-and-resend
/// eavesdropper, from chaining the four rotations by hand.
///
/// Returns `(eve_match_rate, bob_bit_error_rate)`, averaged over a uniform
/// sent bit.
pub fn intercept_resend_rates(theta_a: f64, theta_b: f64) -> (f64, f64) {
    let fwd_a = rot(theta_a);
    let fwd_b = rot(theta_b);
    let inv_a = rot(-theta_a);
    let inv_b = rot(-theta_b);

    let mut eve_match = 0.0;
    let mut bob_error = 0.0;
    for b in 0..2 {
        let in_flight = matvec(&fwd_a, &basis(b));
        for e in 0..2 {
            let p_e = in_flight[e] * in_flight[e];
            if e == b {
                eve_match += 0.5 * p_e;
            }
            // Eve forwards the collapsed |e>; the remaining three
            // transformations act on it before Bob measures.
            let s = matvec(&fwd_b, &basis(e));
            let s = matvec(&inv_a, &s);
            let s = matvec(&inv_b, &s);
            bob_error += 0.5 * p_e * s[1 - b] * s[1 - b];
        }
    }
    (eve_match, bob_error)
}

/// Acceptance probability of the certificate-guessing MITM, by exhaustive
/// enumeration of every (guess, target) pattern pair. Feasible for n <= 8.
pub fn guess_acceptance_by_enumeration(n: u32) -> f64 {
    let total = 1u64 << n;
    let mut accepted = 0u64;
    for guess in 0..total {
        for target in 0..total {
            // Residue of the three-way XOR is zero exactly when the bits
            // Bob extracts equal the certificate Alice sent.
            if guess == target {
                accepted += 1;
            }
        }
    }
    accepted as f64 / (total * total) as f64
}

/// Expected detection rate of the known-plaintext offset-guess MITM, by
/// exhaustive enumeration over every reachable master key (hence every true
/// offset), every guessed offset, and every pattern of the forged bits that
/// land inside the extraction window.
///
/// The true offset is the key's big-endian value mod (message_len + 1); for
/// an n-bit key only 2^n offsets are reachable, each equally likely. The
/// guessed offset is uniform over all message_len + 1 valid offsets.
pub fn known_plaintext_detection_rate(message_len: usize, n: usize) -> f64 {
    let offsets = message_len + 1;
    let keys = 1u64 << n;
    let mut acceptance_sum = 0.0;
    for key in 0..keys {
        let true_offset = (key % offsets as u64) as usize;
        for guess in 0..offsets {
            // Positions Bob reads that fall inside Eve's replayed block
            // carry Alice's certificate bits and always match; the rest are
            // independent uniform forged bits.
            let overlap = {
                let lo = true_offset.max(guess);
                let hi = (true_offset + n).min(guess + n);
                hi.saturating_sub(lo)
            };
            let free = (n - overlap) as u32;
            let patterns = 1u64 << free;
            let mut matches = 0u64;
            for forged in 0..patterns {
                for target in 0..patterns {
                    if forged == target {
                        matches += 1;
                    }
                }
            }
            acceptance_sum += matches as f64 / (patterns * patterns) as f64;
        }
    }
    1.0 - acceptance_sum / (keys as f64 * offsets as f64)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn intercept_rates_match_closed_forms() {
        for theta in [0.2f64, std::f64::consts::FRAC_PI_4, 1.0] {
            let (eve, bob) = intercept_resend_rates(theta, 0.77);
            assert!((eve - theta.cos().powi(2)).abs() < 1e-12);
            assert!((bob - (2.0 * theta).sin().powi(2) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn guess_acceptance_is_two_to_minus_n() {
        for n in 0..=8 {
            assert_eq!(guess_acceptance_by_enumeration(n), 0.5f64.powi(n as i32));
        }
    }
}
