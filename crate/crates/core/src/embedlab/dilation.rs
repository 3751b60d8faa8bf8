//! Exponent fits along the dilation family `f_N = ω(2^N ·)`.
//!
//! `f_N` has its spectrum in `3/4·2^N < |ξ| < 2^N`, so it activates a single
//! resolution-of-unity block and every norm of it is a pure power of `2^N`
//! times a constant. Fitting `log₂` of norms or norm ratios against `N`
//! recovers those powers.

use super::{ols, EmbeddingSpec, Theorem};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::herz::{mixed_herz_norm, HerzParams};
use crate::lpdecomp::{build_resolution, SpectralSystem, Witness};
use crate::spaces::{function_norm, SpaceParams};

#[derive(Debug, Clone, PartialEq)]
pub struct DilationReport {
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    /// OLS slope of `log₂ value` against `N`.
    pub slope: f64,
    /// The exponent the theory predicts.
    pub predicted: f64,
}

fn level_range(n_min: usize, n_max: usize) -> Result<Vec<usize>> {
    if n_max <= n_min {
        return Err(Error::Inadmissible(format!("need n_min < n_max, got {n_min}..={n_max}")));
    }
    Ok((n_min..=n_max).collect())
}

fn fit(levels: &[usize], values: &[f64]) -> Result<f64> {
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Unresolvable(format!("dilation norm {v} is not positive and finite")));
    }
    let xs: Vec<f64> = levels.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    Ok(ols(&xs, &ys)?.slope)
}

fn witnesses(grid: Grid, levels: &[usize], seed: u64) -> Result<Vec<crate::grid::SampledField>> {
    let w = Witness::new(grid.n(), seed);
    levels.iter().map(|&k| w.sample(grid, k)).collect()
}

fn system_for(grid: Grid, n_max: usize) -> Result<SpectralSystem> {
    build_resolution(grid, n_max)
}

/// `‖f_N‖_Ė` for `N = n_min..=n_max`; the predicted slope is `-(α + 1/p)`
/// (bold sums).
pub fn herz_dilation_scan(params: &HerzParams, grid: Grid, n_min: usize, n_max: usize, seed: u64) -> Result<DilationReport> {
    let levels = level_range(n_min, n_max)?;
    let values = witnesses(grid, &levels, seed)?
        .iter()
        .map(|f| mixed_herz_norm(f, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(DilationReport {
        slope: fit(&levels, &values)?,
        predicted: -(params.alpha_bold() + params.inv_p_bold()),
        levels,
        values,
    })
}

/// `‖f_N‖` in the smoothness space; predicted slope `s - α - 1/p`.
pub fn dilation_scan(params: &SpaceParams, grid: Grid, n_min: usize, n_max: usize, seed: u64) -> Result<DilationReport> {
    let levels = level_range(n_min, n_max)?;
    let system = system_for(grid, n_max)?;
    let values = witnesses(grid, &levels, seed)?
        .iter()
        .map(|f| function_norm(f, params, &system))
        .collect::<Result<Vec<_>>>()?;
    Ok(DilationReport {
        slope: fit(&levels, &values)?,
        predicted: params.s() - params.herz().alpha_bold() - params.herz().inv_p_bold(),
        levels,
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NecessityReport {
    pub levels: Vec<usize>,
    /// `‖f_N‖_target / ‖f_N‖_source`.
    pub ratios: Vec<f64>,
    /// Fitted growth exponent `c`.
    pub fitted: f64,
    /// `s₁ - s₂ - α₁ + α₂ - 1/p + 1/q`.
    pub predicted: f64,
}

/// Fits `‖f_N‖_target / ‖f_N‖_source ≈ C·2^{cN}` for a Besov-to-Besov spec.
/// `c <= 0` exactly when the smoothness balance holds.
pub fn necessity_fit(spec: &EmbeddingSpec, grid: Grid, n_min: usize, n_max: usize, seed: u64) -> Result<NecessityReport> {
    if spec.theorem() != Theorem::BesovSobolev {
        return Err(Error::Hypothesis(format!(
            "the necessity fit applies to the Besov embedding, not {}",
            spec.theorem()
        )));
    }
    spec.check_hypotheses()?;
    let levels = level_range(n_min, n_max)?;
    let system = system_for(grid, n_max)?;
    let ratios = witnesses(grid, &levels, seed)?
        .iter()
        .map(|f| Ok(function_norm(f, spec.target(), &system)? / function_norm(f, spec.source(), &system)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(NecessityReport {
        fitted: fit(&levels, &ratios)?,
        predicted: spec.necessity_exponent(),
        levels,
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpnReport {
    pub levels: Vec<usize>,
    /// `‖f_N‖_target / (2^{Nγ} ‖f_N‖_source)`.
    pub ratios: Vec<f64>,
    pub gamma: f64,
    pub slope: f64,
}

/// `γ = 1/p - 1/s + α₂ - α₁` (bold sums), after checking the hypotheses
/// `α₁_i + 1/s_i > 0`, `p_i <= s_i`, `α₂_i >= α₁_i`, and `θ_i = r_i` wherever
/// `α₂_i = α₁_i`. The source is `Ė_p^{α₂,θ}`, the target `K̇_s^{α₁,r}`.
pub fn ppn_exponent(source: &HerzParams, target: &HerzParams) -> Result<f64> {
    if source.n() != target.n() {
        return Err(Error::ShapeMismatch("source and target dimensions differ".into()));
    }
    for i in 0..source.n() {
        let (p, s) = (source.p()[i], target.p()[i]);
        let (a2, a1) = (source.alpha()[i], target.alpha()[i]);
        if !(a1 + s.recip() > 0.0) {
            return Err(Error::Hypothesis(format!("axis {i}: need α₁ + 1/s > 0, got α₁ = {a1}, s = {s}")));
        }
        if p.get() > s.get() {
            return Err(Error::Hypothesis(format!("axis {i}: need p <= s, got p = {p}, s = {s}")));
        }
        if a2 < a1 {
            return Err(Error::Hypothesis(format!("axis {i}: need α₂ >= α₁, got α₂ = {a2}, α₁ = {a1}")));
        }
        if a2 == a1 && source.q()[i] != target.q()[i] {
            return Err(Error::Hypothesis(format!(
                "axis {i}: α₂ = α₁ forces θ = r, got θ = {}, r = {}",
                source.q()[i],
                target.q()[i]
            )));
        }
    }
    Ok(source.inv_p_bold() - target.inv_p_bold() + source.alpha_bold() - target.alpha_bold())
}

/// Sharpness of the Plancherel-Polya-Nikolskij inequality on the dilation
/// family: the normalized ratio should neither grow nor decay in `N`.
pub fn ppn_check(source: &HerzParams, target: &HerzParams, grid: Grid, n_min: usize, n_max: usize, seed: u64) -> Result<PpnReport> {
    let gamma = ppn_exponent(source, target)?;
    let levels = level_range(n_min, n_max)?;
    let ratios = witnesses(grid, &levels, seed)?
        .iter()
        .zip(&levels)
        .map(|(f, &k)| Ok(mixed_herz_norm(f, target)? / ((k as f64 * gamma).exp2() * mixed_herz_norm(f, source)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PpnReport {
        slope: fit(&levels, &ratios)?,
        gamma,
        levels,
        ratios,
    })
}
