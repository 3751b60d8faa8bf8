//! Besov and Triebel-Lizorkin norms over mixed Herz spaces.
//!
//! Both norms are built from the Littlewood-Paley blocks `F^{-1}(m_k·Ff)`,
//! `k = 0..=K`, of a [`SpectralSystem`]. Inputs are expected to be
//! band-limited to the system's band so that truncating at `K` is exact.

use crate::error::{Error, Result};
use crate::herz::{ell_norm, mixed_herz_abs, Exponent, HerzParams};
use crate::lpdecomp::{lp_blocks, SpectralSystem};
use crate::grid::SampledField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Besov: Herz norm of each block, then `ℓ^β` over levels.
    B,
    /// Triebel-Lizorkin: pointwise `ℓ^β` over levels, then the Herz norm.
    F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceParams {
    herz: HerzParams,
    s: f64,
    beta: Exponent,
    family: Family,
}

impl SpaceParams {
    pub fn new(herz: HerzParams, s: f64, beta: Exponent, family: Family) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::Inadmissible(format!("smoothness {s} is not finite")));
        }
        if family == Family::F
            && herz.p().iter().chain(herz.q()).any(|e| !e.is_finite())
        {
            return Err(Error::Inadmissible(
                "the F family needs finite p and q on every axis".into(),
            ));
        }
        Ok(Self {
            herz,
            s,
            beta,
            family,
        })
    }

    pub fn herz(&self) -> &HerzParams {
        &self.herz
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn beta(&self) -> Exponent {
        self.beta
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.herz.n()
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.herz.clone(), s, self.beta, self.family)
    }

    pub fn with_beta(&self, beta: Exponent) -> Result<Self> {
        Self::new(self.herz.clone(), self.s, beta, self.family)
    }

    pub fn with_herz(&self, herz: HerzParams) -> Result<Self> {
        Self::new(herz, self.s, self.beta, self.family)
    }
}

fn check(field: &SampledField, params: &SpaceParams, family: Family) -> Result<()> {
    if params.family != family {
        return Err(Error::Inadmissible(format!(
            "{:?}-family parameters passed to the {family:?} norm",
            params.family
        )));
    }
    if params.n() != field.n() {
        return Err(Error::ShapeMismatch(format!(
            "{}-dimensional parameters for a {}-dimensional field",
            params.n(),
            field.n()
        )));
    }
    Ok(())
}

/// Weighted Herz norms `2^{ks}‖block_k‖` for `k = 0..=K`.
pub fn besov_terms(field: &SampledField, params: &SpaceParams, system: &SpectralSystem) -> Result<Vec<f64>> {
    if params.n() != field.n() {
        return Err(Error::ShapeMismatch("parameter and field dimensions differ".into()));
    }
    let grid = field.grid();
    Ok(lp_blocks(field, system)?
        .iter()
        .enumerate()
        .map(|(k, b)| (k as f64 * params.s).exp2() * mixed_herz_abs(b.abs_values(), grid, &params.herz))
        .collect())
}

/// `(Σ_k 2^{ksβ} ‖block_k‖_Ė^β)^{1/β}`.
pub fn besov_norm(field: &SampledField, params: &SpaceParams, system: &SpectralSystem) -> Result<f64> {
    check(field, params, Family::B)?;
    Ok(ell_norm(&besov_terms(field, params, system)?, params.beta))
}

/// `‖(Σ_k 2^{ksβ} |block_k|^β)^{1/β}‖_Ė`.
pub fn triebel_norm(field: &SampledField, params: &SpaceParams, system: &SpectralSystem) -> Result<f64> {
    check(field, params, Family::F)?;
    let grid = field.grid();
    let blocks = lp_blocks(field, system)?;
    let weights: Vec<f64> = (0..blocks.len()).map(|k| (k as f64 * params.s).exp2()).collect();
    let mut terms = vec![0.0; blocks.len()];
    let envelope: Vec<f64> = (0..grid.len())
        .map(|j| {
            for (k, b) in blocks.iter().enumerate() {
                terms[k] = weights[k] * b.values()[j].norm();
            }
            ell_norm(&terms, params.beta)
        })
        .collect();
    Ok(mixed_herz_abs(envelope, grid, &params.herz))
}

/// Besov or Triebel-Lizorkin norm according to `params.family()`.
pub fn function_norm(field: &SampledField, params: &SpaceParams, system: &SpectralSystem) -> Result<f64> {
    match params.family {
        Family::B => besov_norm(field, params, system),
        Family::F => triebel_norm(field, params, system),
    }
}

/// `(Σ_{k>=0} 2^{-kεβ})^{1/β}`: the price of lowering smoothness by `ε`
/// while raising the fine index to `β` in the Besov scale.
pub fn smoothness_drop_constant(epsilon: f64, beta: Exponent) -> f64 {
    if !beta.is_finite() {
        return 1.0;
    }
    let b = beta.get();
    (1.0 - (-epsilon * b).exp2()).powf(-1.0 / b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RatioStats {
    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Empty("ratio ensemble"));
        }
        Ok(Self {
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            count: ratios.len(),
        })
    }
}

/// Ratios `‖f‖ (Frazier-Jawerth blocks) / ‖f‖ (resolution of unity)`.
/// Fields of zero norm are skipped.
pub fn norm_equivalence_report(
    fields: &[SampledField],
    params: &SpaceParams,
    fj: &SpectralSystem,
    resolution: &SpectralSystem,
) -> Result<RatioStats> {
    if fields.is_empty() {
        return Err(Error::Empty("field ensemble"));
    }
    if fj.levels() != resolution.levels() {
        return Err(Error::ShapeMismatch("systems are built at different K".into()));
    }
    let mut ratios = Vec::with_capacity(fields.len());
    for f in fields {
        let a = function_norm(f, params, fj)?;
        let b = function_norm(f, params, resolution)?;
        if a > 0.0 && b > 0.0 {
            ratios.push(a / b);
        }
    }
    RatioStats::from_ratios(&ratios)
}
