//! Deterministic Monte-Carlo scenario runner.
//!
//! A [`ScenarioConfig`] fully determines an experiment. Trial `i` draws all
//! of its randomness from the stream seeded by `split_seed(seed, i)`, in a
//! fixed order that is part of the external contract:
//!
//! 1. θ_A, θ_B (skipped when `angles` pins them)
//! 2. θ_E — MITM scenarios only
//! 3. master key bits — certificate scenarios only
//! 4. message bits
//! 5. forged message bits — MITM scenarios only
//! 6. execution randomness (collapses, sessions, Eve's guesses)
//!
//! Reordering any of these draws would silently change every golden result,
//! so the order is pinned by tests.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::adversary::{
    run_intercept_resend, run_mitm_certified, run_mitm_plain, EveStrategy, OffsetGuessPolicy,
};
use crate::bits::BitString;
use crate::cert::{gen_master_key, PlacementMode};
use crate::error::{Error, Result};
use crate::rng::{split_seed, RandomSource};
use crate::three_stage::{run_session, PartySecret, Stage};

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Honest,
    InterceptResend,
    MitmPlain,
    MitmGuessCert,
    MitmKnownPlaintextCert,
}

impl Scenario {
    pub fn uses_certificates(&self) -> bool {
        matches!(self, Scenario::MitmGuessCert | Scenario::MitmKnownPlaintextCert)
    }

    pub fn is_mitm(&self) -> bool {
        matches!(
            self,
            Scenario::MitmPlain | Scenario::MitmGuessCert | Scenario::MitmKnownPlaintextCert
        )
    }
}

/// Complete, reproducible description of one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub message_len: usize,
    #[serde(default)]
    pub cert_len: usize,
    pub trials: usize,
    pub seed: u64,
    /// Fixed (θ_A, θ_B); absent means fresh secrets per trial.
    #[serde(default)]
    pub angles: Option<(f64, f64)>,
    #[serde(default = "default_placement")]
    pub placement_mode: PlacementMode,
    /// Stage to tap in the intercept-resend scenario. Defaults to stage 1.
    #[serde(default)]
    pub intercept_stage: Option<Stage>,
}

fn default_placement() -> PlacementMode {
    PlacementMode::KeyedBlock
}

impl ScenarioConfig {
    /// Field-level validation; the message names the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.message_len == 0 {
            return Err(Error::invalid("message_len: must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials: must be at least 1"));
        }
        if self.scenario.uses_certificates() {
            if self.cert_len == 0 {
                return Err(Error::invalid(
                    "cert_len: certificate scenarios need at least 1 certificate bit",
                ));
            }
        } else if self.cert_len != 0 {
            return Err(Error::invalid(
                "cert_len: must be 0 for scenarios without certificates",
            ));
        }
        if self.intercept_stage.is_some() && self.scenario != Scenario::InterceptResend {
            return Err(Error::invalid(
                "intercept_stage: only valid for the intercept-resend scenario",
            ));
        }
        if let Some((a, b)) = self.angles {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::invalid("angles: must be finite"));
            }
        }
        Ok(())
    }
}

/// One trial's record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: usize,
    /// Authenticity verdict; absent for scenarios with no check.
    pub detected: Option<bool>,
    /// Bit positions where Bob's message differs from what his peer sent.
    pub bob_bit_errors: usize,
    /// Bits of Alice's transmission Eve recovered correctly; absent when no
    /// eavesdropper is present.
    pub eve_match_count: Option<usize>,
    /// XOR residue of the authenticity check, when one ran.
    pub auth_residue: Option<BitString>,
}

/// Aggregates over a trial list, plus normal-approximation 95% binomial
/// confidence half-widths (1.96·√(p(1−p)/n)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub trials: usize,
    pub detection_rate: Option<f64>,
    pub detection_ci: Option<f64>,
    pub mean_bob_ber: f64,
    pub bob_ber_ci: f64,
    pub mean_eve_match: Option<f64>,
    pub eve_match_ci: Option<f64>,
}

/// Seed for trial `trial_index` under `master_seed`.
///
/// Two rounds of the SplitMix64 finalizer over `master_seed ^ trial_index`;
/// stable across platforms and injective per index.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    split_seed(master_seed, trial_index)
}

fn ci_half_width(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn run_one_trial(config: &ScenarioConfig, index: usize) -> Result<TrialResult> {
    let mut rng = RandomSource::from_seed(derive_trial_seed(config.seed, index as u64));

    let (alice, bob) = match config.angles {
        Some((a, b)) => (PartySecret::new(a)?, PartySecret::new(b)?),
        None => {
            let alice = PartySecret::random(&mut rng);
            let bob = PartySecret::random(&mut rng);
            (alice, bob)
        }
    };
    let eve = if config.scenario.is_mitm() {
        Some(PartySecret::random(&mut rng))
    } else {
        None
    };
    let key = if config.scenario.uses_certificates() {
        Some(gen_master_key(config.cert_len, &mut rng))
    } else {
        None
    };
    let message = BitString::random(config.message_len, &mut rng);
    let forged = if config.scenario.is_mitm() {
        Some(BitString::random(config.message_len, &mut rng))
    } else {
        None
    };

    match config.scenario {
        Scenario::Honest => {
            let t = run_session(alice, bob, &message, None, &mut rng)?;
            Ok(TrialResult {
                trial_index: index,
                detected: None,
                bob_bit_errors: t.received_bits.hamming(&message)?,
                eve_match_count: None,
                auth_residue: None,
            })
        }
        Scenario::InterceptResend => {
            let stage = config.intercept_stage.unwrap_or(Stage::Stage1);
            let out = run_intercept_resend(alice, bob, stage, &message, &mut rng)?;
            Ok(TrialResult {
                trial_index: index,
                detected: None,
                bob_bit_errors: out.bob_received_message.hamming(&message)?,
                eve_match_count: Some(
                    config.message_len - out.eve_learned.hamming(&message)?,
                ),
                auth_residue: None,
            })
        }
        Scenario::MitmPlain => {
            let forged = forged.expect("mitm draws a forged message");
            let out = run_mitm_plain(alice, bob, eve.unwrap(), &message, &forged, &mut rng)?;
            Ok(TrialResult {
                trial_index: index,
                detected: None,
                bob_bit_errors: out.bob_received_message.hamming(&forged)?,
                eve_match_count: Some(
                    config.message_len - out.eve_learned.hamming(&message)?,
                ),
                auth_residue: None,
            })
        }
        Scenario::MitmGuessCert | Scenario::MitmKnownPlaintextCert => {
            let forged = forged.expect("mitm draws a forged message");
            let strategy = if config.scenario == Scenario::MitmGuessCert {
                EveStrategy::MitmGuessCert
            } else {
                EveStrategy::MitmKnownPlaintextCert(OffsetGuessPolicy::Uniform)
            };
            let out = run_mitm_certified(
                alice,
                bob,
                eve.unwrap(),
                &message,
                &forged,
                key.as_ref().unwrap(),
                config.placement_mode,
                strategy,
                &mut rng,
            )?;
            // Eve sees the whole assembled stream; score how many of Alice's
            // message bits she recovered, splitting her view at the true
            // key-derived positions (known to the experimenter, not to Eve).
            let positions = crate::cert::positions_for(
                config.placement_mode,
                key.as_ref().unwrap(),
                config.message_len,
            );
            let (eve_message_view, _) =
                crate::cert::extract_stream(&out.eve_learned, &positions)?;
            let eve_match = config.message_len - eve_message_view.hamming(&message)?;
            let auth = out.bob_auth.expect("certified scenarios always verify");
            Ok(TrialResult {
                trial_index: index,
                detected: Some(!auth.authentic),
                bob_bit_errors: out.bob_received_message.hamming(&forged)?,
                eve_match_count: Some(eve_match),
                auth_residue: Some(auth.residue),
            })
        }
    }
}

/// Run every trial of the configured experiment and aggregate.
pub fn run_trials(config: &ScenarioConfig) -> Result<(Vec<TrialResult>, AggregateStats)> {
    config.validate()?;
    let results: Vec<TrialResult> = (0..config.trials)
        .map(|i| run_one_trial(config, i))
        .collect::<Result<_>>()?;
    let stats = aggregate(config, &results);
    Ok((results, stats))
}

/// Pure function of the trial list (plus the config's lengths); independent
/// of the order trials were produced in.
pub fn aggregate(config: &ScenarioConfig, results: &[TrialResult]) -> AggregateStats {
    let trials = results.len();
    let detect_samples: Vec<bool> = results.iter().filter_map(|r| r.detected).collect();
    let (detection_rate, detection_ci) = if detect_samples.is_empty() {
        (None, None)
    } else {
        let p = detect_samples.iter().filter(|&&d| d).count() as f64
            / detect_samples.len() as f64;
        (Some(p), Some(ci_half_width(p, detect_samples.len())))
    };

    let total_bits = trials * config.message_len;
    let bob_errors: usize = results.iter().map(|r| r.bob_bit_errors).sum();
    let mean_bob_ber = if total_bits == 0 {
        0.0
    } else {
        bob_errors as f64 / total_bits as f64
    };

    let eve_len = config.message_len;
    let eve_counts: Vec<usize> = results.iter().filter_map(|r| r.eve_match_count).collect();
    let (mean_eve_match, eve_match_ci) = if eve_counts.is_empty() {
        (None, None)
    } else {
        let n = eve_counts.len() * eve_len;
        let p = eve_counts.iter().sum::<usize>() as f64 / n as f64;
        (Some(p), Some(ci_half_width(p, n)))
    };

    AggregateStats {
        trials,
        detection_rate,
        detection_ci,
        mean_bob_ber,
        bob_ber_ci: ci_half_width(mean_bob_ber, total_bits),
        mean_eve_match,
        eve_match_ci,
    }
}

#[derive(Serialize)]
struct TrialLine<'a> {
    record: &'static str,
    #[serde(flatten)]
    body: &'a TrialResult,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    record: &'static str,
    #[serde(flatten)]
    body: &'a AggregateStats,
}

/// Persist results: one JSON object per line, trials first, summary last.
/// Field order is fixed by the struct definitions and pinned by goldens.
pub fn write_records<W: Write>(
    mut out: W,
    results: &[TrialResult],
    stats: &AggregateStats,
) -> Result<()> {
    for r in results {
        let line = serde_json::to_string(&TrialLine {
            record: "trial",
            body: r,
        })
        .expect("trial records serialize");
        writeln!(out, "{line}")?;
    }
    let line = serde_json::to_string(&SummaryLine {
        record: "summary",
        body: stats,
    })
    .expect("summary record serializes");
    writeln!(out, "{line}")?;
    Ok(())
}
