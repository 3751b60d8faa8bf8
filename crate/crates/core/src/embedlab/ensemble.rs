//! Random sparse coefficient ensembles and the sequence-space embedding
//! checks built on them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::{ols, EmbeddingSpec, Theorem};
use crate::error::{Error, Result};
use crate::frames::CoeffSeq;
use crate::grid::MAX_DIM;
use crate::seqspace::seq_norm;

/// Ensemble size, depth and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub draws: usize,
    pub levels: usize,
    pub seed: u64,
}

/// Cells per level above which occupied positions are drawn by rejection
/// instead of a Bernoulli sweep.
const SWEEP_LIMIT: u64 = 4096;

fn magnitude(rng: &mut ChaCha8Rng) -> Complex64 {
    // Pareto, index 2, with a uniform phase.
    let u: f64 = rng.random();
    let r = (1.0 - u).powf(-0.5);
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Per level `k`, cells of `[-1, 1)^n` occupied with density `2^{-nk/2}`.
fn diffuse(rng: &mut ChaCha8Rng, seq: &mut CoeffSeq, n: usize, levels: usize) -> Result<()> {
    for k in 0..=levels {
        let side = 1i64 << (k + 1);
        let cells = (side as u64).pow(n as u32);
        let density = (-(n as f64) * k as f64 / 2.0).exp2();
        let mut m = [0i64; MAX_DIM];
        if cells <= SWEEP_LIMIT {
            for c in 0..cells {
                if rng.random_bool(density) {
                    let mut rest = c as i64;
                    for slot in m.iter_mut().take(n) {
                        *slot = rest % side - side / 2;
                        rest /= side;
                    }
                    let v = magnitude(rng);
                    seq.insert(k, &m[..n], v)?;
                }
            }
        } else {
            let count = Binomial::new(cells, density).unwrap().sample(rng);
            let mut placed = 0;
            while placed < count {
                for slot in m.iter_mut().take(n) {
                    *slot = rng.random_range(-side / 2..side / 2);
                }
                if seq.get(k, &m[..n]) == Complex64::default() {
                    let v = magnitude(rng);
                    seq.insert(k, &m[..n], v)?;
                    placed += 1;
                }
            }
        }
    }
    Ok(())
}

/// One to three spikes at random levels; each coordinate sits at a
/// geometrically distributed dyadic distance from the origin.
fn sparse(rng: &mut ChaCha8Rng, seq: &mut CoeffSeq, n: usize, levels: usize) -> Result<()> {
    let spikes = rng.random_range(1..=3);
    for _ in 0..spikes {
        let k = rng.random_range(0..=levels);
        let bound = 1i64 << k;
        let mut m = [0i64; MAX_DIM];
        for slot in m.iter_mut().take(n) {
            let mut j = 0;
            while j <= k && rng.random_bool(0.5) {
                j += 1;
            }
            let mag = if j == 0 { 0 } else { rng.random_range(1i64 << (j - 1)..1i64 << j) };
            let mut v = if rng.random_bool(0.5) { mag } else { -mag - 1 };
            if v < -bound || v >= bound {
                v = 0;
            }
            *slot = v;
        }
        let v = magnitude(rng);
        seq.insert(k, &m[..n], v)?;
    }
    Ok(())
}

/// Draw number `index` of the ensemble: a fair mixture of the diffuse and
/// the sparse regime. Each draw has its own ChaCha stream, so draws are
/// reproducible individually and in any order.
pub fn draw_coefficients(n: usize, levels: usize, seed: u64, index: u64) -> Result<CoeffSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut seq = CoeffSeq::new(n, levels)?;
    loop {
        if rng.random_bool(0.5) {
            diffuse(&mut rng, &mut seq, n, levels)?;
        } else {
            sparse(&mut rng, &mut seq, n, levels)?;
        }
        if !seq.is_empty() {
            return Ok(seq);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub theorem: Theorem,
    pub config: EnsembleConfig,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Draw index attaining `max_ratio`.
    pub argmax: u64,
}

/// `max ‖λ‖_target / ‖λ‖_source` over the ensemble.
pub fn seq_embedding_check(spec: &EmbeddingSpec, config: EnsembleConfig) -> Result<EnsembleReport> {
    spec.check_hypotheses()?;
    if config.draws == 0 {
        return Err(Error::Empty("ensemble (zero draws)"));
    }
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut argmax = 0;
    for index in 0..config.draws as u64 {
        let seq = draw_coefficients(spec.n(), config.levels, config.seed, index)?;
        let ratio = seq_norm(&seq, spec.target())? / seq_norm(&seq, spec.source())?;
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = index;
        }
        min_ratio = min_ratio.min(ratio);
    }
    Ok(EnsembleReport {
        theorem: spec.theorem(),
        config,
        max_ratio,
        min_ratio,
        argmax,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub reports: Vec<EnsembleReport>,
    /// OLS slope of `log₂ max_ratio` against `K`.
    pub slope: f64,
}

/// Runs [`seq_embedding_check`] for each depth `K` with the same seed and
/// fits the growth of the maximal ratio.
pub fn level_sweep(spec: &EmbeddingSpec, levels: &[usize], draws: usize, seed: u64) -> Result<SweepReport> {
    let reports = levels
        .iter()
        .map(|&k| {
            seq_embedding_check(
                spec,
                EnsembleConfig {
                    draws,
                    levels: k,
                    seed,
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = levels.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.max_ratio.log2()).collect();
    Ok(SweepReport {
        slope: ols(&xs, &ys)?.slope,
        reports,
    })
}
