//! Radial Fourier multipliers: the smooth resolution of unity, the
//! Frazier-Jawerth pair, Littlewood-Paley blocks and band-limited witnesses.
//!
//! All multipliers are built from
//!
//! ```text
//! s(t) = exp(-1/t) for t > 0, 0 otherwise
//! T(t) = s(t) / (s(t) + s(1 - t))
//! ```
//!
//! which is exactly 0 for `t <= 0` and exactly 1 for `t >= 1`, so supports are
//! hard zeros on the grid.
//!
//! Resolution of unity: `ϑ(x) = 1 - T(2(|x| - 1))`, `ψ_0 = ϑ` and
//! `ψ_k(ξ) = ϑ(2^{-k}ξ) - ϑ(2^{-k+1}ξ)`.
//!
//! Frazier-Jawerth pair: `ρ(ξ) = 1 - T(2|ξ| - 1)`, `FΦ(ξ) = √ρ(ξ/2)`,
//! `Fφ(ξ) = √(ρ(ξ/2) - ρ(ξ))`, with `Ψ = Φ` and `ψ = φ`. The level-`k`
//! multiplier is `Fφ(2^{-k}ξ)`, and `FΦ² + Σ_{k=1}^{K} Fφ(2^{-k}·)²`
//! telescopes to `ρ(2^{-K-1}·)`, which is 1 on `|ξ| <= 2^K`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{fft_in_place, Domain, FftScratch, Grid, SampledField, MAX_DIM};

fn smooth_step_base(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `T(t)`: 0 for `t <= 0`, 1 for `t >= 1`, smooth and increasing between.
pub fn transition(t: f64) -> f64 {
    let a = smooth_step_base(t);
    let b = smooth_step_base(1.0 - t);
    a / (a + b)
}

/// `ϑ(x) = 1 - T(2(|x| - 1))`: 1 on `|x| <= 1`, 0 on `|x| >= 3/2`.
pub fn theta(x: f64) -> f64 {
    1.0 - transition(2.0 * (x.abs() - 1.0))
}

/// `ρ(ξ) = 1 - T(2|ξ| - 1)`: 1 on `|ξ| <= 1/2`, 0 on `|ξ| >= 1`.
pub fn rho(x: f64) -> f64 {
    1.0 - transition(2.0 * x.abs() - 1.0)
}

/// `FΦ(ξ)`, as a function of `|ξ|`.
pub fn fj_phi0(r: f64) -> f64 {
    rho(0.5 * r).sqrt()
}

/// `Fφ(ξ)`, as a function of `|ξ|`.
pub fn fj_phi(r: f64) -> f64 {
    (rho(0.5 * r) - rho(r)).max(0.0).sqrt()
}

/// `ψ_k(ξ)` of the resolution of unity, as a function of `|ξ|`.
pub fn resolution_psi(k: usize, r: f64) -> f64 {
    let t = (-(k as f64)).exp2() * r;
    if k == 0 {
        theta(t)
    } else {
        theta(t) - theta(2.0 * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    ResolutionOfUnity,
    FjPair,
}

/// Tabulated radial multipliers for levels `0..=K` on a frequency grid.
#[derive(Debug, Clone)]
pub struct SpectralSystem {
    kind: SystemKind,
    grid: Grid,
    tables: Vec<Vec<f64>>,
}

/// Support bounds and positivity constants of the Frazier-Jawerth pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FjBounds {
    /// `min FΦ` over `|ξ| <= 5/3`.
    pub phi0_min: f64,
    /// `min Fφ` over `3/5 <= |ξ| <= 5/3`.
    pub phi_min: f64,
}

impl SpectralSystem {
    fn build(kind: SystemKind, grid: Grid, levels: usize) -> Result<Self> {
        let reach = match kind {
            SystemKind::ResolutionOfUnity => 1.5,
            SystemKind::FjPair => 2.0,
        } * (levels as f64).exp2();
        if reach > grid.max_frequency() {
            return Err(Error::Unresolvable(format!(
                "level {levels} needs |ξ| up to {reach}, grid resolves {}",
                grid.max_frequency()
            )));
        }
        let norms = grid.frequency_norms();
        let tables = (0..=levels)
            .map(|k| {
                norms
                    .iter()
                    .map(|&r| match (kind, k) {
                        (SystemKind::ResolutionOfUnity, _) => resolution_psi(k, r),
                        (SystemKind::FjPair, 0) => fj_phi0(r),
                        (SystemKind::FjPair, _) => fj_phi((-(k as f64)).exp2() * r),
                    })
                    .collect()
            })
            .collect();
        Ok(Self { kind, grid, tables })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Finest level `K`.
    pub fn levels(&self) -> usize {
        self.tables.len() - 1
    }

    /// Analysis multiplier at level `k`, in frequency storage order.
    pub fn multiplier(&self, k: usize) -> Result<&[f64]> {
        self.tables
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::LevelOutOfRange {
                level: k,
                max: self.levels(),
            })
    }

    /// Synthesis multiplier at level `k`. The pair is self-dual (`Ψ = Φ`,
    /// `ψ = φ`), so this is the analysis table.
    pub fn synthesis_multiplier(&self, k: usize) -> Result<&[f64]> {
        self.multiplier(k)
    }

    /// Radius below which the levels reproduce every frequency exactly.
    pub fn band(&self) -> f64 {
        (self.levels() as f64).exp2()
    }

    /// `max |Σ_k m_k(ξ) - 1|` over grid frequencies with `|ξ| <= 2^K`, where
    /// `m_k = ψ_k` for the resolution of unity and `m_k = FΦ_k · FΨ_k`
    /// (the Calderón sum) for the pair.
    pub fn identity_deviation(&self) -> f64 {
        let band = self.band();
        self.grid
            .frequency_norms()
            .iter()
            .enumerate()
            .filter(|(_, &r)| r <= band)
            .map(|(b, _)| {
                let sum: f64 = self
                    .tables
                    .iter()
                    .map(|t| match self.kind {
                        SystemKind::ResolutionOfUnity => t[b],
                        SystemKind::FjPair => t[b] * t[b],
                    })
                    .sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Level-`k` multiplier as a frequency-domain field.
    pub fn export_multiplier(&self, k: usize) -> Result<SampledField> {
        let t = self.multiplier(k)?;
        SampledField::from_values(
            self.grid,
            t.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Domain::Frequency,
        )
    }
}

/// `{ψ_k}_{k=0..=K}` on the frequency grid of `grid`.
pub fn build_resolution(grid: Grid, levels: usize) -> Result<SpectralSystem> {
    SpectralSystem::build(SystemKind::ResolutionOfUnity, grid, levels)
}

/// `{FΦ, Fφ(2^{-k}·)}_{k=1..=K}` on the frequency grid of `grid`.
pub fn build_fj_pair(grid: Grid, levels: usize) -> Result<SpectralSystem> {
    SpectralSystem::build(SystemKind::FjPair, grid, levels)
}

/// Lower bounds of `FΦ` and `Fφ` on their inner regions, sampled finely.
pub fn fj_bounds() -> FjBounds {
    let samples = 20_001;
    let grid_min = |lo: f64, hi: f64, f: fn(f64) -> f64| {
        (0..samples)
            .map(|i| f(lo + (hi - lo) * i as f64 / (samples - 1) as f64))
            .fold(f64::INFINITY, f64::min)
    };
    FjBounds {
        phi0_min: grid_min(0.0, 5.0 / 3.0, fj_phi0),
        phi_min: grid_min(0.6, 5.0 / 3.0, fj_phi),
    }
}

fn check_space(field: &SampledField, system: &SpectralSystem) -> Result<()> {
    if field.domain() != Domain::Space {
        return Err(Error::DomainMismatch {
            expected: Domain::Space,
            found: field.domain(),
        });
    }
    if field.grid() != system.grid() {
        return Err(Error::ShapeMismatch(
            "field and spectral system live on different grids".into(),
        ));
    }
    Ok(())
}

/// Unnormalized spectrum of a space-domain field.
pub(crate) fn spectrum(field: &SampledField, scratch: &mut FftScratch) -> Vec<Complex64> {
    let mut data = field.values().to_vec();
    fft_in_place(&mut data, field.grid(), false, scratch);
    data
}

/// Inverse of [`spectrum`] applied to `spec · mult`.
pub(crate) fn filtered(
    spec: &[Complex64],
    mult: &[f64],
    grid: Grid,
    scratch: &mut FftScratch,
) -> Vec<Complex64> {
    let scale = 1.0 / grid.len() as f64;
    let mut data: Vec<Complex64> = spec
        .iter()
        .zip(mult)
        .map(|(s, &m)| s * (m * scale))
        .collect();
    fft_in_place(&mut data, grid, true, scratch);
    data
}

/// `F^{-1}(m_k · Ff)`.
pub fn lp_block(field: &SampledField, k: usize, system: &SpectralSystem) -> Result<SampledField> {
    check_space(field, system)?;
    let mult = system.multiplier(k)?;
    let mut scratch = FftScratch::default();
    let spec = spectrum(field, &mut scratch);
    let out = filtered(&spec, mult, field.grid(), &mut scratch);
    Ok(SampledField::from_parts_unchecked(field.grid(), out, Domain::Space))
}

/// All blocks `k = 0..=K`, sharing one forward transform.
pub fn lp_blocks(field: &SampledField, system: &SpectralSystem) -> Result<Vec<SampledField>> {
    check_space(field, system)?;
    let mut scratch = FftScratch::default();
    let spec = spectrum(field, &mut scratch);
    (0..=system.levels())
        .map(|k| {
            let out = filtered(&spec, system.multiplier(k)?, field.grid(), &mut scratch);
            Ok(SampledField::from_parts_unchecked(field.grid(), out, Domain::Space))
        })
        .collect()
}

/// `exp(-1/(u(1-u)))` on `u ∈ (0, 1)`, 0 elsewhere, with `u = 4(r - 3/4)`:
/// a smooth bump supported in `3/4 < r < 1`.
fn shell_bump(r: f64) -> f64 {
    let u = 4.0 * (r - 0.75);
    if u > 0.0 && u < 1.0 {
        (-1.0 / (u * (1.0 - u))).exp()
    } else {
        0.0
    }
}

/// Fourier transform of the witness `ω` with `supp Fω ⊂ {3/4 < |ξ| < 1}`.
///
/// `Fω(ξ) = bump(|ξ|) · (c_0 + Σ_i c_i ξ_i/|ξ|) · e^{-iξ·x_0}` with complex
/// Gaussian `c` and a shift `x_0 ∈ [-1/2, 1/2)^n`, both drawn from `seed`.
/// The modulation is smooth, so `ω` stays a rapidly decaying function near
/// `x_0`.
#[derive(Debug, Clone)]
pub struct Witness {
    n: usize,
    coeffs: [Complex64; MAX_DIM + 1],
    shift: [f64; MAX_DIM],
}

impl Witness {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        let mut coeffs = [Complex64::default(); MAX_DIM + 1];
        for c in coeffs.iter_mut().take(n + 1) {
            *c = Complex64::new(normal(), normal());
        }
        // Keep the constant term dominant so the bump is never cancelled.
        coeffs[0] += Complex64::new(3.0, 0.0);
        let mut shift = [0.0; MAX_DIM];
        for s in shift.iter_mut().take(n) {
            *s = rng.random_range(-0.5..0.5);
        }
        Self { n, coeffs, shift }
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift[..self.n]
    }

    /// `Fω(ξ)`.
    pub fn spectrum_at(&self, xi: &[f64]) -> Complex64 {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let b = shell_bump(r);
        if b == 0.0 {
            return Complex64::default();
        }
        let mut amp = self.coeffs[0];
        for (c, x) in self.coeffs[1..].iter().zip(&xi[..self.n]) {
            amp += c * (x / r);
        }
        let phase: f64 = (0..self.n).map(|i| xi[i] * self.shift[i]).sum();
        amp * b * Complex64::from_polar(1.0, -phase)
    }

    /// Samples `ω(2^N ·)` on `grid`, via its Fourier series on the torus.
    pub fn sample(&self, grid: Grid, level: usize) -> Result<SampledField> {
        if grid.n() != self.n {
            return Err(Error::ShapeMismatch("witness dimension differs from grid".into()));
        }
        let scale = (level as f64).exp2();
        if scale > grid.max_frequency() {
            return Err(Error::Unresolvable(format!(
                "witness level {level} needs |ξ| < {scale}, grid resolves {}",
                grid.max_frequency()
            )));
        }
        sample_spectrum(grid, |xi| {
            let mut eta = [0.0; MAX_DIM];
            for i in 0..self.n {
                eta[i] = xi[i] / scale;
            }
            self.spectrum_at(&eta[..self.n]) / scale.powi(self.n as i32)
        })
    }
}

/// Sampled inverse Fourier transform of a spectrum supported inside the grid
/// band: `f(x_j) = (2π)^{-n/2} (2π/L)^n Σ_b Ff(ξ_b) e^{iξ_b·x_j}`.
pub(crate) fn sample_spectrum<F>(grid: Grid, mut spec: F) -> Result<SampledField>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let n = grid.n();
    let tau = std::f64::consts::TAU;
    let weight = (tau / grid.period()).powi(n as i32) / tau.powf(n as f64 / 2.0);
    let half = grid.points() / 2;
    let mut data: Vec<Complex64> = grid
        .frequency_vectors()
        .iter()
        .enumerate()
        .map(|(b, xi)| {
            let idx = grid.multi_index(b);
            // e^{iξ_b·(-L/2)} = (-1)^{b_signed}.
            let odd = idx[..n].iter().map(|&bi| bi + if bi >= half { 1 } else { 0 }).sum::<usize>() % 2;
            let sign = if odd == 1 { -1.0 } else { 1.0 };
            spec(&xi[..n]) * (weight * sign)
        })
        .collect();
    fft_in_place(&mut data, grid, true, &mut FftScratch::default());
    SampledField::from_values(grid, data, Domain::Space)
}

/// `f_N = ω(2^N ·)` for the witness drawn from `seed`.
pub fn bandlimited_witness(grid: Grid, level: usize, seed: u64) -> Result<SampledField> {
    Witness::new(grid.n(), seed).sample(grid, level)
}

/// A random field whose spectrum is supported in `|ξ| <= radius`.
///
/// Bin amplitudes are complex Gaussians tapered by `ρ(|ξ|/radius)`-like
/// smoothness, so the field is smooth and its energy sits well inside the
/// band.
pub fn random_bandlimited(grid: Grid, radius: f64, seed: u64) -> Result<SampledField> {
    if radius > grid.max_frequency() {
        return Err(Error::Unresolvable(format!(
            "radius {radius} exceeds grid band {}",
            grid.max_frequency()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..grid.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
    sample_spectrum(grid, |xi| {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let taper = 1.0 - transition(r / radius);
        // Localize around a random centre so Herz weights see structure.
        let phase: f64 = xi.iter().zip(&shift).map(|(x, s)| x * s).sum();
        Complex64::new(re, im) * taper * Complex64::from_polar(1.0, -phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_field_on, spectral_transform, Direction};

    fn grid1(points: usize, period: f64) -> Grid {
        Grid::new(1, period, points).unwrap()
    }

    #[test]
    fn transition_profile() {
        assert_eq!(transition(-0.1), 0.0);
        assert_eq!(transition(0.0), 0.0);
        assert_eq!(transition(1.0), 1.0);
        assert_eq!(transition(2.0), 1.0);
        assert!((transition(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 5..96 {
            let t = transition(i as f64 / 100.0);
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn resolution_examples() {
        assert_eq!(resolution_psi(0, 0.0), 1.0);
        for r in [0.0, 0.3, 0.99, 1.0] {
            assert_eq!(resolution_psi(1, r), 0.0);
        }
        for k in 1..8 {
            for r in [0.0, 0.5 * (k as f64 - 1.0).exp2() * 0.999, 3.0 * (k as f64 - 1.0).exp2() * 1.001] {
                assert_eq!(resolution_psi(k, r), 0.0, "k={k} r={r}");
            }
        }
        let levels = 5;
        let r = (levels as f64 - 1.0).exp2();
        let sum: f64 = (0..=levels).map(|k| resolution_psi(k, r)).sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fj_examples() {
        assert_eq!(fj_phi0(0.0), 1.0);
        assert_eq!(fj_phi0(2.0), 0.0);
        for r in [0.0, 0.2, 0.49] {
            assert_eq!(fj_phi(r), 0.0);
        }
        assert_eq!(fj_phi(2.0), 0.0);
        assert_eq!(fj_phi(3.0), 0.0);
        let b = fj_bounds();
        assert!(b.phi0_min >= 1e-6 && b.phi_min >= 1e-6, "{b:?}");
    }

    #[test]
    fn identities_on_grid() {
        let grid = grid1(1024, 16.0);
        for levels in 0..=6 {
            let rou = build_resolution(grid, levels).unwrap();
            assert!(rou.identity_deviation() <= 1e-12);
            let fj = build_fj_pair(grid, levels).unwrap();
            assert!(fj.identity_deviation() <= 1e-12);
        }
        let g2 = Grid::new(2, 8.0, 512).unwrap();
        assert!(build_fj_pair(g2, 6).unwrap().identity_deviation() <= 1e-12);
        assert!(build_fj_pair(grid1(64, 16.0), 4).is_err());
        assert!(build_resolution(grid1(64, 16.0), 4).is_err());
    }

    #[test]
    fn multiplier_supports_are_hard_zeros() {
        let grid = grid1(2048, 32.0);
        let fj = build_fj_pair(grid, 5).unwrap();
        let rou = build_resolution(grid, 5).unwrap();
        let norms = grid.frequency_norms();
        for k in 0..=5 {
            let s = (k as f64).exp2();
            for (b, &r) in norms.iter().enumerate() {
                let m = fj.multiplier(k).unwrap()[b];
                let outside = if k == 0 { r > 2.0 } else { r < 0.5 * s || r > 2.0 * s };
                if outside {
                    assert_eq!(m, 0.0);
                }
                let psi = rou.multiplier(k).unwrap()[b];
                let outside = if k == 0 { r >= 1.5 } else { r <= 0.5 * s || r >= 1.5 * s };
                if outside {
                    assert_eq!(psi, 0.0);
                }
            }
        }
        assert!(fj.multiplier(6).is_err());
    }

    #[test]
    fn block_of_exponential_is_diagonal() {
        let grid = grid1(256, 16.0);
        let fj = build_fj_pair(grid, 3).unwrap();
        let b0 = 5;
        let xi0 = grid.frequency(b0);
        let f = make_field_on(grid, |x| Complex64::from_polar(1.0, xi0 * x[0])).unwrap();
        for k in 0..=3 {
            let m = fj.multiplier(k).unwrap()[b0];
            let block = lp_block(&f, k, &fj).unwrap();
            assert!(block.max_abs_diff(&f.scaled(Complex64::new(m, 0.0))) < 1e-12);
        }
        let z = SampledField::zeros(grid);
        assert!(lp_block(&z, 2, &fj).unwrap().values().iter().all(|v| v.norm() == 0.0));
        assert!(lp_block(&z, 4, &fj).is_err());
    }

    #[test]
    fn blocks_sum_to_bandlimited_field() {
        let grid = Grid::new(2, 8.0, 64).unwrap();
        let rou = build_resolution(grid, 3).unwrap();
        let f = random_bandlimited(grid, 8.0, 9).unwrap();
        let blocks = lp_blocks(&f, &rou).unwrap();
        let mut sum = SampledField::zeros(grid);
        for b in &blocks {
            sum = sum.try_add(b).unwrap();
        }
        assert!(sum.max_abs_diff(&f) < 1e-12 * f.abs_values().iter().cloned().fold(0.0, f64::max));
        for (k, b) in blocks.iter().enumerate() {
            assert!(lp_block(&f, k, &rou).unwrap().max_abs_diff(b) < 1e-14);
        }
    }

    #[test]
    fn witness_is_bandlimited_and_selective() {
        let grid = grid1(4096, 256.0);
        let rou = build_resolution(grid, 5).unwrap();
        for level in 0..=4 {
            let f = bandlimited_witness(grid, level, 17).unwrap();
            let spec = spectral_transform(&f, Direction::Forward).unwrap();
            let s = (level as f64).exp2();
            let peak = spec.abs_values().iter().cloned().fold(0.0, f64::max);
            for (b, v) in spec.values().iter().enumerate() {
                let r = grid.frequency(b).abs();
                if r <= 0.75 * s || r >= s {
                    assert!(v.norm() <= 1e-12 * peak);
                }
            }
            let fmax = f.abs_values().iter().cloned().fold(0.0, f64::max);
            for k in 0..=5 {
                let block = lp_block(&f, k, &rou).unwrap();
                if k == level {
                    assert!(block.max_abs_diff(&f) <= 1e-12 * fmax);
                } else {
                    assert!(block.abs_values().iter().all(|&v| v <= 1e-12 * fmax));
                }
            }
        }
    }

    #[test]
    fn witness_dilation() {
        let grid = grid1(8192, 1024.0);
        let w = Witness::new(1, 4);
        let f0 = w.sample(grid, 0).unwrap();
        let f2 = w.sample(grid, 2).unwrap();
        let ratio = f2.l2_norm() / f0.l2_norm();
        assert!((ratio - 0.5).abs() < 1e-10, "{ratio}");
        // f_2(x_j) = ω(4 x_j): on-grid points 4x_j of the coarse samples.
        let h = grid.spacing();
        for j in (grid.points() / 2 - 64)..(grid.points() / 2 + 64) {
            let x = grid.coordinate(j);
            let jj = ((4.0 * x + 512.0) / h).round() as usize;
            assert!((f2.values()[j] - f0.values()[jj]).norm() < 1e-10);
        }
        assert!(w.sample(grid, 13).is_err());
    }
}
