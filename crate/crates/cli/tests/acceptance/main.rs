//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Expected values come either from the worked verification example, from
//! exact protocol identities, or from the independent oracles in
//! `oracle.rs`; tolerances are stated inline.

mod oracle;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_8};
use std::fs;
use std::process::Command;

use entcert_core::bits::BitString;
use entcert_core::cert::{
    collapse_certificate, issue_batch, verify, Certificate, MasterKey, PlacementMode,
};
use entcert_core::harness::{run_trials, write_records, Scenario, ScenarioConfig};
use entcert_core::qsim::{Unitary2, MATRIX_TOL, NORM_TOL};
use entcert_core::rng::{split_seed, RandomSource};
use entcert_core::three_stage::{run_session, PartySecret};

fn pass(name: &str) {
    println!("PASS {name}");
}

fn config(scenario: Scenario, message_len: usize, cert_len: usize, trials: usize, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        scenario,
        message_len,
        cert_len,
        trials,
        seed,
        angles: None,
        placement_mode: PlacementMode::KeyedBlock,
        intercept_stage: None,
    }
}

#[test]
fn criterion_1_worked_example_golden() {
    let ok = verify(
        &MasterKey::from_bits("1001".parse().unwrap()),
        &Certificate::from_bits("0101".parse().unwrap()),
        &Certificate::from_bits("1100".parse().unwrap()),
    )
    .unwrap();
    assert!(ok.authentic);
    assert_eq!(ok.residue.to_string(), "0000");

    let bad = verify(
        &MasterKey::from_bits("1001".parse().unwrap()),
        &Certificate::from_bits("0001".parse().unwrap()),
        &Certificate::from_bits("1100".parse().unwrap()),
    )
    .unwrap();
    assert!(!bad.authentic);
    assert_eq!(bad.residue.to_string(), "0100");

    let out = Command::new(env!("CARGO_BIN_EXE_entcert"))
        .arg("demo")
        .output()
        .expect("demo runs");
    assert!(out.status.success());
    let golden = fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/demo.txt")).unwrap();
    assert_eq!(out.stdout, golden, "demo output diverged from golden");

    pass("criterion 1: worked verification example, byte-exact demo golden");
}

#[test]
fn criterion_2_honest_session_identity() {
    for i in 0..1_000u64 {
        let mut rng = RandomSource::from_seed(split_seed(0x2001, i));
        let alice = PartySecret::random(&mut rng);
        let bob = PartySecret::random(&mut rng);
        let bits = BitString::random(64, &mut rng);
        let t = run_session(alice, bob, &bits, None, &mut rng).unwrap();
        assert_eq!(t.received_bits, bits, "bit error in honest session {i}");
    }
    pass("criterion 2: 1,000 honest sessions, zero bit errors (exact)");
}

#[test]
fn criterion_3_bell_correlation_law() {
    for parity in [0u8, 1u8] {
        let key = MasterKey::from_bits(BitString::from_bits([parity]).unwrap());
        let mut ones_a = 0usize;
        let mut ones_b = 0usize;
        for i in 0..10_000u64 {
            let mut rng = RandomSource::from_seed(split_seed(0x3000 + parity as u64, i));
            let (alice, bob) = issue_batch(&key);
            let a = collapse_certificate(&alice, &mut rng).unwrap().bits().bit(0);
            let b = collapse_certificate(&bob, &mut rng).unwrap().bits().bit(0);
            assert_eq!(a ^ b, parity, "correlation law broken for parity {parity}");
            ones_a += a as usize;
            ones_b += b as usize;
        }
        for ones in [ones_a, ones_b] {
            let freq = ones as f64 / 10_000.0;
            assert!(
                (0.48..=0.52).contains(&freq),
                "parity {parity}: marginal {freq} outside [0.48, 0.52]"
            );
        }
    }
    pass("criterion 3: 10,000 pairs per parity — exact correlation, uniform marginals");
}

#[test]
fn criterion_4_plain_mitm_reproduction() {
    let cfg = config(Scenario::MitmPlain, 32, 0, 1_000, 0x4001);
    let (results, stats) = run_trials(&cfg).unwrap();
    assert_eq!(results.len(), 1_000);
    assert_eq!(stats.mean_eve_match, Some(1.0), "Eve must recover everything");
    assert_eq!(stats.mean_bob_ber, 0.0, "Bob must receive the forgery exactly");
    assert!(stats.detection_rate.is_none(), "no detection channel exists");
    assert!(results.iter().all(|r| r.detected.is_none()));
    pass("criterion 4: plain MITM — recovery 1.0, delivery 1.0, detection none");
}

#[test]
fn criterion_5_guessing_eve_detection_rates() {
    // Analytic acceptance 2^-N, validated here by exhaustive enumeration.
    for n in 1..=8u32 {
        assert_eq!(
            oracle::guess_acceptance_by_enumeration(n),
            0.5f64.powi(n as i32)
        );
    }

    let (_, stats4) = run_trials(&config(Scenario::MitmGuessCert, 16, 4, 20_000, 0x5004)).unwrap();
    let rate4 = stats4.detection_rate.unwrap();
    assert!(
        (rate4 - 0.9375).abs() <= 0.01,
        "N=4 detection {rate4} not within 0.01 of 0.9375"
    );

    let (_, stats8) = run_trials(&config(Scenario::MitmGuessCert, 16, 8, 20_000, 0x5008)).unwrap();
    let rate8 = stats8.detection_rate.unwrap();
    assert!(
        (rate8 - 0.996_093_75).abs() <= 0.005,
        "N=8 detection {rate8} not within 0.005 of 0.99609375"
    );

    pass("criterion 5: guessing MITM — detection 0.9375 (N=4, ±0.01), 0.99609375 (N=8, ±0.005)");
}

#[test]
fn criterion_6_intercept_resend_disturbance() {
    let theta_b = 1.234;
    for theta_a in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_3] {
        let (expected_eve, expected_ber) = oracle::intercept_resend_rates(theta_a, theta_b);
        let mut cfg = config(Scenario::InterceptResend, 1_000, 0, 10, 0x6001);
        cfg.angles = Some((theta_a, theta_b));
        let (_, stats) = run_trials(&cfg).unwrap();
        let ber = stats.mean_bob_ber;
        let eve = stats.mean_eve_match.unwrap();
        assert!(
            (ber - expected_ber).abs() <= 0.02,
            "theta_a={theta_a}: ber {ber} vs oracle {expected_ber}"
        );
        assert!(
            (eve - expected_eve).abs() <= 0.02,
            "theta_a={theta_a}: eve match {eve} vs oracle {expected_eve}"
        );
    }
    pass("criterion 6: intercept-resend rates match the matrix-chain oracle (±0.02 at 10,000 bits)");
}

#[test]
fn criterion_7_known_plaintext_offset_guess() {
    let expected = oracle::known_plaintext_detection_rate(16, 4);
    let (_, stats) =
        run_trials(&config(Scenario::MitmKnownPlaintextCert, 16, 4, 20_000, 0x7001)).unwrap();
    let rate = stats.detection_rate.unwrap();
    assert!(
        (rate - expected).abs() <= 0.02,
        "detection {rate} vs enumeration oracle {expected}"
    );
    pass("criterion 7: known-plaintext offset-guess detection matches enumeration oracle (±0.02)");
}

#[test]
fn criterion_8_algebraic_invariants() {
    let mut rng = RandomSource::from_seed(0x8001);
    let identity = Unitary2::identity();
    for _ in 0..1_000 {
        let a = Unitary2::rotation(rng.next_f64() * std::f64::consts::TAU).unwrap();
        let b = Unitary2::rotation(rng.next_f64() * std::f64::consts::TAU).unwrap();
        assert!(a.adjoint().mul(&a).max_diff(&identity) <= MATRIX_TOL);
        assert!(a.mul(&b).max_diff(&b.mul(&a)) <= MATRIX_TOL);
    }

    for i in 0..50u64 {
        let mut rng = RandomSource::from_seed(split_seed(0x8002, i));
        let alice = PartySecret::random(&mut rng);
        let bob = PartySecret::random(&mut rng);
        let bits = BitString::random(64, &mut rng);
        let t = run_session(alice, bob, &bits, None, &mut rng).unwrap();
        for tr in &t.transmissions {
            assert!((tr.state_before_tap.norm_sqr() - 1.0).abs() <= NORM_TOL);
            assert!((tr.state_after_tap.norm_sqr() - 1.0).abs() <= NORM_TOL);
        }
    }
    pass("criterion 8: unitarity/commutativity within 1e-12, session norms within 1e-9");
}

#[test]
fn criterion_9_reproducibility() {
    let cfg = config(Scenario::MitmGuessCert, 16, 4, 500, 0x9001);
    let (r1, s1) = run_trials(&cfg).unwrap();
    let (r2, s2) = run_trials(&cfg).unwrap();
    let mut buf1 = Vec::new();
    let mut buf2 = Vec::new();
    write_records(&mut buf1, &r1, &s1).unwrap();
    write_records(&mut buf2, &r2, &s2).unwrap();
    assert!(!buf1.is_empty());
    assert_eq!(buf1, buf2, "per-trial records and summary must be byte-identical");

    // Same property end to end through the binary.
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scenario.json");
    fs::write(
        &config_path,
        r#"{"scenario":"intercept-resend","message_len":64,"trials":100,"seed":77}"#,
    )
    .unwrap();
    let out_a = dir.path().join("a.jsonl");
    let out_b = dir.path().join("b.jsonl");
    for out in [&out_a, &out_b] {
        let run = Command::new(env!("CARGO_BIN_EXE_entcert"))
            .args([
                "run",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        assert!(run.status.success());
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
    pass("criterion 9: identical seeds give byte-identical records, in-process and via the CLI");
}
