//! Monte Carlo estimates of the payload dropping probability (PDP) and the
//! payload hallucination probability (PHP).

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{sample_payloads, transmit, ChannelParams};
use crate::code::{Code, Payload};
use crate::error::{Error, Result};

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub users: usize,
    pub decoded: usize,
    /// Draws in `W` absent from the decoded set, counting repeats.
    pub dropped: usize,
    /// Decoded payloads that nobody sent.
    pub hallucinated: usize,
    /// Draws that repeated an earlier draw of the same trial.
    pub collided_payloads: usize,
}

impl TrialOutcome {
    pub fn pdp(&self) -> f64 {
        self.dropped as f64 / self.users as f64
    }

    /// 0 when nothing was decoded.
    pub fn php(&self) -> f64 {
        if self.decoded == 0 {
            0.0
        } else {
            self.hallucinated as f64 / self.decoded as f64
        }
    }
}

pub fn score_trial(sent: &[Payload], decoded: &BTreeSet<Payload>) -> TrialOutcome {
    let sent_set: BTreeSet<&Payload> = sent.iter().collect();
    TrialOutcome {
        users: sent.len(),
        decoded: decoded.len(),
        dropped: sent.iter().filter(|w| !decoded.contains(*w)).count(),
        hallucinated: decoded.iter().filter(|w| !sent_set.contains(w)).count(),
        collided_payloads: sent.len() - sent_set.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsRow {
    pub pdp: f64,
    pub php: f64,
    pub pdp_ci95: f64,
    pub php_ci95: f64,
    /// Total hallucinations over total decoded payloads.
    pub php_pooled: f64,
    pub trials: usize,
    pub avg_khat: f64,
    pub collisions: usize,
}

impl MetricsRow {
    /// Aggregates outcomes in the order given.
    pub fn from_outcomes(outcomes: &[TrialOutcome]) -> MetricsRow {
        let n = outcomes.len();
        let pdp: Vec<f64> = outcomes.iter().map(TrialOutcome::pdp).collect();
        let php: Vec<f64> = outcomes.iter().map(TrialOutcome::php).collect();
        let (pdp_mean, pdp_ci) = mean_ci(&pdp);
        let (php_mean, php_ci) = mean_ci(&php);
        let decoded: usize = outcomes.iter().map(|o| o.decoded).sum();
        let hallucinated: usize = outcomes.iter().map(|o| o.hallucinated).sum();
        MetricsRow {
            pdp: pdp_mean,
            php: php_mean,
            pdp_ci95: pdp_ci,
            php_ci95: php_ci,
            php_pooled: if decoded == 0 {
                0.0
            } else {
                hallucinated as f64 / decoded as f64
            },
            trials: n,
            avg_khat: if n == 0 { 0.0 } else { decoded as f64 / n as f64 },
            collisions: outcomes.iter().map(|o| o.collided_payloads).sum(),
        }
    }
}

/// Mean and 95% normal-approximation half-width.
fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, Z95 * (var / n as f64).sqrt())
}

/// The generator for trial `t`: stream `t + 1` of the master seed.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

/// Runs one trial: sample, encode, transmit, decode, score.
pub fn run_trial<C: Code + ?Sized>(
    code: &C,
    users: usize,
    erasure_prob: f64,
    master_seed: u64,
    trial: u64,
    path_cap: usize,
) -> Result<TrialOutcome> {
    let params = ChannelParams::new(users, erasure_prob)?;
    let mut rng = trial_rng(master_seed, trial);
    let sent = sample_payloads(users, code.payload_bits(), &mut rng)?;
    let codewords = sent
        .iter()
        .map(|w| code.encode(w))
        .collect::<Result<Vec<_>>>()?;
    let (output, _) = transmit(&codewords, code.section_bits(), &params, &mut rng)?;
    let result = code.decode(&output, path_cap).map_err(|e| Error::Trial {
        trial,
        source: Box::new(e),
    })?;
    Ok(score_trial(&sent, &result.decoded))
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub users: usize,
    pub erasure_prob: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub path_cap: usize,
}

impl Estimate {
    pub fn new(users: usize, erasure_prob: f64, trials: usize, master_seed: u64) -> Self {
        Estimate {
            users,
            erasure_prob,
            trials,
            master_seed,
            path_cap: crate::decoder::DEFAULT_PATH_CAP,
        }
    }

    pub fn with_path_cap(mut self, cap: usize) -> Self {
        self.path_cap = cap;
        self
    }

    /// Per-trial outcomes in trial-index order. Runs on the current rayon
    /// pool; the result does not depend on its size.
    pub fn outcomes<C: Code + ?Sized>(&self, code: &C) -> Result<Vec<TrialOutcome>> {
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is required"));
        }
        ChannelParams::new(self.users, self.erasure_prob)?;
        (0..self.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(code, self.users, self.erasure_prob, self.master_seed, t, self.path_cap))
            .collect()
    }

    pub fn run<C: Code + ?Sized>(&self, code: &C) -> Result<MetricsRow> {
        Ok(MetricsRow::from_outcomes(&self.outcomes(code)?))
    }
}

/// Convenience wrapper around [`Estimate::run`].
pub fn estimate<C: Code + ?Sized>(
    code: &C,
    users: usize,
    erasure_prob: f64,
    trials: usize,
    master_seed: u64,
) -> Result<MetricsRow> {
    Estimate::new(users, erasure_prob, trials, master_seed).run(code)
}

/// Probability that a single user's payload is lost by the two-phase
/// linked-loop decoder: anything but zero erasures, or one erasure outside
/// section 0.
pub fn llc_single_user_pdp(erasure_prob: f64, sections: usize) -> f64 {
    let q = 1.0 - erasure_prob;
    let l = sections as i32;
    1.0 - q.powi(l) - (l - 1) as f64 * erasure_prob * q.powi(l - 1)
}

/// Probability that at least one of a user's sections is erased.
pub fn any_erasure_prob(erasure_prob: f64, sections: usize) -> f64 {
    1.0 - (1.0 - erasure_prob).powi(sections as i32)
}
