//! Monte Carlo play of the estimation game: a referee draws Ω uniformly,
//! the measurement returns outcome k with probability c_k |⟨Ω_k|Ω⟩|^{2N},
//! and the guess Ω_k scores |⟨Ω|Ω_k⟩|².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{optimal_score, FinitePovm};
use crate::sphere::{overlap_sq_cartesian, Direction, SphereSampler, UnitVector};

/// Trials per RNG substream. Chunk i uses stream i of the seed, so results
/// do not depend on how chunks are scheduled.
pub const CHUNK_TRIALS: usize = 1 << 16;

/// Allowed |Σ_k P(k|Ω) − 1| before a trial is rejected.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    #[serde(rename = "N")]
    pub copies: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean_score: f64,
    /// Sample standard deviation over √trials; 0 for a single trial.
    pub std_error: f64,
    pub expected: f64,
    pub chunks: usize,
}

impl SimulationReport {
    /// |mean − expected| in units of the standard error.
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            (self.mean_score - self.expected).abs() / self.std_error
        } else if self.mean_score == self.expected {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Element data prepared for repeated probability evaluation.
struct Prepared {
    copies: i32,
    elements: Vec<(f64, UnitVector)>,
}

impl Prepared {
    fn new(p: &FinitePovm) -> Self {
        Prepared {
            copies: p.copies() as i32,
            elements: p
                .elements()
                .iter()
                .map(|e| (e.c, e.direction.to_cartesian()))
                .collect(),
        }
    }

    /// Fills P(k|Ω) and single-copy fidelities; returns Σ_k P(k|Ω).
    fn fill(&self, v: &UnitVector, probs: &mut [f64], fidelity: &mut [f64]) -> f64 {
        let mut total = 0.0;
        for (k, (c, u)) in self.elements.iter().enumerate() {
            let f = overlap_sq_cartesian(u, v);
            let p = c * f.powi(self.copies);
            fidelity[k] = f;
            probs[k] = p;
            total += p;
        }
        total
    }
}

/// Outcome probabilities P(k|Ω) = c_k |⟨Ω_k|Ω⟩|^{2N}.
pub fn outcome_probabilities(p: &FinitePovm, d: &Direction) -> Vec<f64> {
    let prep = Prepared::new(p);
    let mut probs = vec![0.0; p.len()];
    let mut fid = vec![0.0; p.len()];
    prep.fill(&d.to_cartesian(), &mut probs, &mut fid);
    probs
}

/// Inverse-CDF draw from unnormalized weights using one uniform u ∈ [0,1).
pub fn sample_outcome(probs: &[f64], total: f64, u: f64) -> usize {
    let target = u * total;
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if target < acc {
            return k;
        }
    }
    // rounding can leave target just above the final partial sum
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

struct ChunkSums {
    sum: f64,
    sum_sq: f64,
}

fn run_chunk(
    prep: &Prepared,
    n: usize,
    seed: u64,
    chunk: usize,
    trials: usize,
) -> Result<ChunkSums> {
    let mut sampler = SphereSampler::with_stream(seed, chunk as u64);
    let mut probs = vec![0.0; n];
    let mut fid = vec![0.0; n];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let omega = sampler.sample();
        let v = omega.to_cartesian();
        let total = prep.fill(&v, &mut probs, &mut fid);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized {
                theta: omega.theta(),
                phi: omega.phi(),
                sum: total,
            });
        }
        let k = sample_outcome(&probs, total, sampler.uniform());
        let score = fid[k];
        sum += score;
        sum_sq += score * score;
    }
    Ok(ChunkSums { sum, sum_sq })
}

/// Plays `trials` rounds of the game with `p` and reports the mean score.
/// Bit-for-bit reproducible for a fixed seed.
pub fn run_game(p: &FinitePovm, trials: usize, seed: u64) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let prep = Prepared::new(p);
    let n = p.len();
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let size = |i: usize| (trials - i * CHUNK_TRIALS).min(CHUNK_TRIALS);

    #[cfg(feature = "parallel")]
    let parts: Vec<Result<ChunkSums>> = {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|i| run_chunk(&prep, n, seed, i, size(i)))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<ChunkSums>> = (0..chunks)
        .map(|i| run_chunk(&prep, n, seed, i, size(i)))
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for part in parts {
        let part = part?;
        sum += part.sum;
        sum_sq += part.sum_sq;
    }
    let t = trials as f64;
    let mean = sum / t;
    let std_error = if trials > 1 {
        let var = ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0);
        (var / t).sqrt()
    } else {
        0.0
    };
    Ok(SimulationReport {
        copies: p.copies(),
        trials,
        seed,
        mean_score: mean,
        std_error,
        expected: optimal_score(p.copies()),
        chunks,
    })
}

/// E[score | Ω] = Σ_k P(k|Ω) |⟨Ω_k|Ω⟩|² at each grid direction.
pub fn score_by_direction(p: &FinitePovm, grid: &[Direction]) -> Vec<f64> {
    let prep = Prepared::new(p);
    let mut probs = vec![0.0; p.len()];
    let mut fid = vec![0.0; p.len()];
    grid.iter()
        .map(|d| {
            prep.fill(&d.to_cartesian(), &mut probs, &mut fid);
            probs.iter().zip(&fid).map(|(p, f)| p * f).sum()
        })
        .collect()
}
