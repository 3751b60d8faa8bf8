//! Axiswise Hardy-Littlewood maximal operators, the `η_{R,N}` kernels and
//! numerical checks of the vector-valued maximal inequality and the r-trick.
//!
//! The maximal function is the centered one over grid radii: at sample `j`
//! the averages over samples `j-R..=j+R` for `R = 0..G/2-1`, periodically.
//! This lower-bounds the continuum supremum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{cube_indicator, fft_in_place, Domain, FftScratch, Grid, SampledField, MAX_DIM};
use crate::herz::{mixed_herz_abs, Exponent, HerzParams};

/// `η_{R,N}(x) = R^n Π_i (1 + R|x_i|)^{-N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaKernel {
    scale: f64,
    decay: f64,
    n: usize,
}

impl EtaKernel {
    pub fn new(n: usize, scale: f64, decay: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::Inadmissible(format!(
                "η kernel needs R > 0 and N > 0, got R = {scale}, N = {decay}"
            )));
        }
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {n}")));
        }
        Ok(Self { scale, decay, n })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// One axis factor `R(1 + R|x|)^{-N}`.
    pub fn axis_factor(&self, x: f64) -> f64 {
        self.scale * (1.0 + self.scale * x.abs()).powf(-self.decay)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        x.iter().take(self.n).map(|&xi| self.axis_factor(xi)).product()
    }

    /// `∫_a^b R(1 + R|x|)^{-N} dx`.
    pub fn axis_mass(&self, a: f64, b: f64) -> f64 {
        let (r, n) = (self.scale, self.decay);
        // Antiderivative on x >= 0, odd-extended.
        let prim = |x: f64| {
            let u = 1.0 + r * x.abs();
            let v = if n == 1.0 { u.ln() } else { (1.0 - u.powf(1.0 - n)) / (n - 1.0) };
            v.copysign(x)
        };
        prim(b) - prim(a)
    }

    /// `∫ η = (2/(N-1))^n`, infinite for `N <= 1`.
    pub fn integral(&self) -> f64 {
        if self.decay <= 1.0 {
            f64::INFINITY
        } else {
            (2.0 / (self.decay - 1.0)).powi(self.n as i32)
        }
    }
}

/// Applies `op` to every lane of `values` along `axis`.
fn map_lanes(values: &mut [f64], grid: Grid, axis: usize, mut op: impl FnMut(&[f64], &mut [f64])) {
    let g = grid.points();
    let stride = g.pow(axis as u32);
    let block = stride * g;
    let mut lane = vec![0.0; g];
    let mut out = vec![0.0; g];
    for outer in 0..values.len() / block {
        for inner in 0..stride {
            let base = outer * block + inner;
            for j in 0..g {
                lane[j] = values[base + j * stride];
            }
            op(&lane, &mut out);
            for j in 0..g {
                values[base + j * stride] = out[j];
            }
        }
    }
}

/// Centered periodic maximal function of one nonnegative lane.
fn lane_maximal(lane: &[f64], out: &mut [f64]) {
    let g = lane.len();
    // Prefix sums over three periods so every window is a single difference.
    let mut prefix = Vec::with_capacity(3 * g + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for j in 0..3 * g {
        acc += lane[j % g];
        prefix.push(acc);
    }
    for (i, slot) in out.iter_mut().enumerate() {
        let c = i + g;
        let mut best = lane[i];
        for r in 1..g / 2 {
            let avg = (prefix[c + r + 1] - prefix[c - r]) / (2 * r + 1) as f64;
            best = best.max(avg);
        }
        *slot = best;
    }
}

fn check_space(field: &SampledField) -> Result<()> {
    if field.domain() != Domain::Space {
        return Err(Error::DomainMismatch {
            expected: Domain::Space,
            found: field.domain(),
        });
    }
    Ok(())
}

fn real_field(grid: Grid, values: Vec<f64>) -> SampledField {
    SampledField::from_parts_unchecked(
        grid,
        values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        Domain::Space,
    )
}

fn maximal_abs(mut values: Vec<f64>, grid: Grid, axis: usize) -> Vec<f64> {
    map_lanes(&mut values, grid, axis, lane_maximal);
    values
}

/// `M_i f`: the one-dimensional maximal function of `|f|` along `axis`.
pub fn axis_maximal(field: &SampledField, axis: usize) -> Result<SampledField> {
    check_space(field)?;
    if axis >= field.n() {
        return Err(Error::InvalidAxis { axis, n: field.n() });
    }
    let grid = field.grid();
    Ok(real_field(grid, maximal_abs(field.abs_values(), grid, axis)))
}

fn iterated_abs(values: &[f64], grid: Grid, t: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().map(|x| x.powf(t)).collect();
    for axis in 0..grid.n() {
        v = maximal_abs(v, grid, axis);
    }
    v.iter_mut().for_each(|x| *x = x.powf(1.0 / t));
    v
}

/// `M_t f = (M_n ⋯ M_1 |f|^t)^{1/t}`.
pub fn iterated_maximal(field: &SampledField, t: f64) -> Result<SampledField> {
    check_space(field)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Inadmissible(format!("maximal exponent t = {t} must be positive")));
    }
    let grid = field.grid();
    Ok(real_field(grid, iterated_abs(&field.abs_values(), grid, t)))
}

/// Refuses parameters outside the vector-valued maximal inequality:
/// finite `p, q`, `-1/p_i < α_i < 1 - 1/p_i` and `0 < t < min(β, p_-, q_-)`.
pub fn check_maximal_hypotheses(params: &HerzParams, beta: Exponent, t: f64) -> Result<()> {
    for i in 0..params.n() {
        let (p, q, a) = (params.p()[i], params.q()[i], params.alpha()[i]);
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::Hypothesis(format!("axis {i}: p and q must be finite")));
        }
        let inv = 1.0 / p.get();
        if !(a > -inv && a < 1.0 - inv) {
            return Err(Error::Hypothesis(format!(
                "axis {i}: need -1/p < α < 1 - 1/p, got α = {a}, p = {p}"
            )));
        }
    }
    let cap = beta.min(params.p_minus()).min(params.q_minus()).get();
    if !(t > 0.0 && t < cap) {
        return Err(Error::Hypothesis(format!(
            "need 0 < t < min(β, p_-, q_-) = {cap}, got t = {t}"
        )));
    }
    Ok(())
}

/// Checks that `|f|` vanishes outside `[-L/8, L/8)^n`, so that periodic
/// windows never wrap onto the support.
pub fn check_support(field: &SampledField) -> Result<()> {
    let grid = field.grid();
    let bound = grid.period() / 8.0;
    for (j, v) in field.values().iter().enumerate() {
        if v.norm() == 0.0 {
            continue;
        }
        let idx = grid.multi_index(j);
        let inside = idx[..grid.n()].iter().all(|&i| {
            let x = grid.coordinate(i);
            x >= -bound && x < bound
        });
        if !inside {
            return Err(Error::Hypothesis(format!(
                "field support leaves [-L/8, L/8)^n (sample {j}); periodic windows would wrap"
            )));
        }
    }
    Ok(())
}

fn envelope(values: &[Vec<f64>], beta: Exponent) -> Vec<f64> {
    let len = values[0].len();
    (0..len)
        .map(|j| {
            if beta.is_finite() {
                let b = beta.get();
                values.iter().map(|v| v[j].powf(b)).sum::<f64>().powf(1.0 / b)
            } else {
                values.iter().map(|v| v[j]).fold(0.0, f64::max)
            }
        })
        .collect()
}

/// `‖(Σ_j (M_t f_j)^β)^{1/β}‖_Ė / ‖(Σ_j |f_j|^β)^{1/β}‖_Ė`.
pub fn fs_vector_check(family: &[SampledField], params: &HerzParams, beta: Exponent, t: f64) -> Result<f64> {
    check_maximal_hypotheses(params, beta, t)?;
    let first = family.first().ok_or(Error::Empty("maximal family"))?;
    let grid = first.grid();
    if params.n() != grid.n() {
        return Err(Error::ShapeMismatch("parameter and field dimensions differ".into()));
    }
    for f in family {
        check_space(f)?;
        if f.grid() != grid {
            return Err(Error::ShapeMismatch("family members live on different grids".into()));
        }
        check_support(f)?;
    }
    let raw: Vec<Vec<f64>> = family.iter().map(|f| f.abs_values()).collect();
    let maxed: Vec<Vec<f64>> = raw.iter().map(|v| iterated_abs(v, grid, t)).collect();
    let den = mixed_herz_abs(envelope(&raw, beta), grid, params);
    if den == 0.0 {
        return Err(Error::Empty("maximal family (all members vanish)"));
    }
    Ok(mixed_herz_abs(envelope(&maxed, beta), grid, params) / den)
}

/// `η_{R,N} * u` on the torus, with `u` constant on the cells centred at the
/// samples and the kernel integrated exactly over each cell.
pub fn eta_convolve(kernel: &EtaKernel, values: &[f64], grid: Grid) -> Result<Vec<f64>> {
    if kernel.n != grid.n() || values.len() != grid.len() {
        return Err(Error::ShapeMismatch("kernel, values and grid disagree".into()));
    }
    let g = grid.points();
    let h = grid.spacing();
    let factors: Vec<f64> = (0..g)
        .map(|j| {
            let d = if j < g / 2 { j as f64 } else { j as f64 - g as f64 };
            kernel.axis_mass((d - 0.5) * h, (d + 0.5) * h)
        })
        .collect();
    let mut ker: Vec<Complex64> = (0..grid.len())
        .map(|b| {
            let idx = grid.multi_index(b);
            Complex64::new(idx[..grid.n()].iter().map(|&i| factors[i]).product(), 0.0)
        })
        .collect();
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut scratch = FftScratch::default();
    fft_in_place(&mut ker, grid, false, &mut scratch);
    fft_in_place(&mut data, grid, false, &mut scratch);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().zip(&ker).for_each(|(d, k)| *d *= k * scale);
    fft_in_place(&mut data, grid, true, &mut scratch);
    Ok(data.iter().map(|c| c.re.max(0.0)).collect())
}

/// `count` weighted dyadic-cube indicators `c_j χ_{Q_j}` inside
/// `[-L/8, L/8)^n`, with side lengths `L/8 · 2^{-i}`, `i = 0..=3`.
///
/// The cubes depend on `(n, L, seed)` only, so the same family can be sampled
/// on grids of different resolution.
pub fn cube_family(grid: Grid, count: usize, seed: u64) -> Result<Vec<SampledField>> {
    if count == 0 {
        return Err(Error::Empty("maximal family"));
    }
    let eighth = grid.period() / 8.0;
    if eighth.log2().fract() != 0.0 {
        return Err(Error::InvalidGrid(format!("L/8 = {eighth} is not a power of two")));
    }
    let coarsest = -(eighth.log2() as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = coarsest + rng.random_range(0..=3);
            let per_side = 1i64 << (v - coarsest);
            let m: Vec<i64> = (0..grid.n()).map(|_| rng.random_range(-per_side..per_side)).collect();
            let c: f64 = rng.random_range(0.5..2.0);
            Ok(cube_indicator(grid, v, &m)?.scaled(Complex64::new(c, 0.0)))
        })
        .collect()
}

/// Relative spectral amplitude allowed outside the declared ball.
const LEAKAGE: f64 = 1e-10;

/// `min_x (η_{2^j, m/n} * |g|^r)^{1/r}(x) / |g(x)|` over samples with
/// `|g| > 10^{-9} max|g|`.
pub fn rtrick_check(g: &SampledField, level: usize, r: f64, m: f64) -> Result<f64> {
    check_space(g)?;
    let grid = g.grid();
    let n = grid.n() as f64;
    if !(r > 0.0) {
        return Err(Error::Hypothesis(format!("need r > 0, got {r}")));
    }
    if !(m > n) {
        return Err(Error::Hypothesis(format!("need m > n = {n}, got m = {m}")));
    }
    let radius = (level as f64 + 1.0).exp2();
    let mut spec = g.values().to_vec();
    fft_in_place(&mut spec, grid, false, &mut FftScratch::default());
    let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let norms = grid.frequency_norms();
    let leak = spec
        .iter()
        .zip(&norms)
        .filter(|(_, &xi)| xi > radius)
        .map(|(c, _)| c.norm())
        .fold(0.0, f64::max);
    if leak > LEAKAGE * peak {
        return Err(Error::Hypothesis(format!(
            "spectrum leaks outside |ξ| <= {radius} (relative amplitude {:e})",
            leak / peak
        )));
    }
    let kernel = EtaKernel::new(grid.n(), radius / 2.0, m / n)?;
    let abs = g.abs_values();
    let top = abs.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::Empty("r-trick check (g vanishes)"));
    }
    let powered: Vec<f64> = abs.iter().map(|v| v.powf(r)).collect();
    let conv = eta_convolve(&kernel, &powered, grid)?;
    Ok(abs
        .iter()
        .zip(&conv)
        .filter(|(&v, _)| v > 1e-9 * top)
        .map(|(&v, &c)| c.powf(1.0 / r) / v)
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{cube_indicator, make_field_on};
    use crate::lpdecomp::bandlimited_witness;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    /// Direct radius sweep without prefix sums.
    fn brute_maximal(lane: &[f64]) -> Vec<f64> {
        let g = lane.len() as i64;
        (0..g)
            .map(|i| {
                (0..g / 2)
                    .map(|r| (i - r..=i + r).map(|j| lane[j.rem_euclid(g) as usize]).sum::<f64>() / (2 * r + 1) as f64)
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    #[test]
    fn constants_are_fixed() {
        let grid = Grid::new(2, 8.0, 32).unwrap();
        let f = make_field_on(grid, |_| Complex64::new(-2.5, 0.0)).unwrap();
        for axis in 0..2 {
            let m = axis_maximal(&f, axis).unwrap();
            assert!(m.values().iter().all(|v| (v.re - 2.5).abs() < 1e-13));
        }
        for t in [0.5, 1.0, 3.0] {
            let m = iterated_maximal(&f, t).unwrap();
            assert!(m.values().iter().all(|v| (v.re - 2.5).abs() < 1e-12));
        }
        assert!(iterated_maximal(&f, 0.0).is_err());
        assert!(axis_maximal(&f, 2).is_err());
    }

    #[test]
    fn interval_indicator_at_two() {
        let grid = Grid::new(1, 16.0, 4096).unwrap();
        let f = make_field_on(grid, |x| Complex64::new(if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 }, 0.0)).unwrap();
        let m = axis_maximal(&f, 0).unwrap();
        let j = grid.points() / 2 + (2.0 / grid.spacing()) as usize;
        assert!((grid.coordinate(j) - 2.0).abs() < 1e-15);
        assert!((m.values()[j].re - 0.25).abs() < 2.0 * grid.spacing());
    }

    #[test]
    fn prefix_sums_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = Grid::new(1, 8.0, 64).unwrap();
        for _ in 0..20 {
            let lane: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..1.0f64).powi(3)).collect();
            let f = SampledField::from_real(grid, &lane).unwrap();
            let fast = axis_maximal(&f, 0).unwrap();
            for (a, b) in fast.values().iter().zip(brute_maximal(&lane)) {
                assert!((a.re - b).abs() < 1e-13);
            }
            assert!(fast.values().iter().zip(&lane).all(|(m, v)| m.re >= *v));
        }
    }

    #[test]
    fn monotone_and_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = Grid::new(2, 8.0, 32).unwrap();
        let a: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = a.iter().map(|v| v + rng.random_range(0.0..0.5)).collect();
        let fa = SampledField::from_real(grid, &a).unwrap();
        let fb = SampledField::from_real(grid, &b).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let ma = iterated_maximal(&fa, t).unwrap();
            let mb = iterated_maximal(&fb, t).unwrap();
            assert!(ma.values().iter().zip(mb.values()).all(|(x, y)| x.re <= y.re * (1.0 + 1e-12)));
            assert!(ma.values().iter().zip(&a).all(|(x, y)| x.re >= y * (1.0 - 1e-12)));
            let scaled = iterated_maximal(&fa.scaled(Complex64::new(3.5, 0.0)), t).unwrap();
            for (s, m) in scaled.values().iter().zip(ma.values()) {
                assert!((s.re - 3.5 * m.re).abs() <= 1e-12 * s.re);
            }
        }
    }

    #[test]
    fn separable_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g1: Vec<f64> = (0..32).map(|_| rng.random_range(0.0..1.0)).collect();
        let g2: Vec<f64> = (0..32).map(|_| rng.random_range(0.0..1.0)).collect();
        let grid = Grid::new(2, 8.0, 32).unwrap();
        let prod: Vec<f64> = (0..grid.len()).map(|j| g1[j % 32] * g2[j / 32]).collect();
        let f = SampledField::from_real(grid, &prod).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let m = iterated_maximal(&f, t).unwrap();
            let lane = |g: &[f64]| -> Vec<f64> {
                brute_maximal(&g.iter().map(|v| v.powf(t)).collect::<Vec<_>>())
                    .into_iter()
                    .map(|v| v.powf(1.0 / t))
                    .collect()
            };
            let (m1, m2) = (lane(&g1), lane(&g2));
            for (j, v) in m.values().iter().enumerate() {
                let expect = m1[j % 32] * m2[j / 32];
                assert!((v.re - expect).abs() < 1e-12 * expect.max(1e-300));
            }
        }
        let line = Grid::new(1, 8.0, 32).unwrap();
        let f1 = SampledField::from_real(line, &g1).unwrap();
        assert_eq!(iterated_maximal(&f1, 1.0).unwrap(), axis_maximal(&f1, 0).unwrap());
    }

    #[test]
    fn vector_check_contract() {
        let grid = Grid::new(1, 64.0, 512).unwrap();
        let params = HerzParams::uniform(1, 2.0, 0.2, 2.0).unwrap();
        let family: Vec<SampledField> = (0..8)
            .map(|i| cube_indicator(grid, 0, &[i - 4]).unwrap())
            .collect();
        let ratio = fs_vector_check(&family, &params, e(2.0), 0.5).unwrap();
        assert!((1.0..=100.0).contains(&ratio), "{ratio}");
        let scaled: Vec<_> = family.iter().map(|f| f.scaled(Complex64::new(7.0, 0.0))).collect();
        let again = fs_vector_check(&scaled, &params, e(2.0), 0.5).unwrap();
        assert!((again - ratio).abs() < 1e-12 * ratio);

        // t must stay below min(β, p_-, q_-); α below 1 - 1/p.
        let err = fs_vector_check(&family, &params, e(2.0), 2.0).unwrap_err();
        assert!(err.to_string().contains("min(β, p_-, q_-)"));
        let bad = HerzParams::uniform(1, 2.0, 0.6, 2.0).unwrap();
        assert!(fs_vector_check(&family, &bad, e(2.0), 0.5).is_err());
        // Support guard.
        let wide = vec![cube_indicator(grid, 0, &[20]).unwrap()];
        assert!(fs_vector_check(&wide, &params, e(2.0), 0.5).is_err());
    }

    #[test]
    fn eta_kernel_mass() {
        let k = EtaKernel::new(1, 4.0, 3.0).unwrap();
        assert!((k.integral() - 1.0).abs() < 1e-15);
        let grid = Grid::new(1, 256.0, 1 << 14).unwrap();
        let conv = eta_convolve(&k, &vec![1.0; grid.len()], grid).unwrap();
        // Truncation at |x| = L/2: tail 2∫_{128}^∞ 4(1+4x)^{-3} = (1+512)^{-2}.
        for c in conv {
            assert!((c - 1.0).abs() < 1e-4, "{c}");
        }
        assert!(EtaKernel::new(1, 0.0, 2.0).is_err());
    }

    #[test]
    fn rtrick_margins() {
        let grid = Grid::new(1, 256.0, 4096).unwrap();
        let g = make_field_on(grid, |_| Complex64::new(2.0, 0.0)).unwrap();
        let flat = rtrick_check(&g, 3, 0.5, 2.0).unwrap();
        let plane = make_field_on(grid, |x| Complex64::from_polar(3.0, 2.0 * std::f64::consts::TAU / 256.0 * 8.0 * x[0])).unwrap();
        let wave = rtrick_check(&plane, 3, 0.5, 2.0).unwrap();
        assert!((flat - wave).abs() < 1e-9 * flat);
        // (∫η)^{1/r} with N = 2 is 2^{1/r} = 4, up to quadrature.
        assert!((flat - 4.0).abs() < 0.05, "{flat}");

        let mut last = None;
        for j in 1..=4 {
            let w = bandlimited_witness(grid, j, 11).unwrap();
            let m = rtrick_check(&w, j, 1.0, 2.0).unwrap();
            let m2 = rtrick_check(&w.scaled(Complex64::new(0.0, 5.0)), j, 1.0, 2.0).unwrap();
            assert!((m - m2).abs() < 1e-9 * m);
            assert!(m > 0.0);
            if let Some(prev) = last {
                assert!(m / prev > 0.5 && m / prev < 2.0);
            }
            last = Some(m);
        }
        let w = bandlimited_witness(grid, 4, 11).unwrap();
        assert!(rtrick_check(&w, 2, 1.0, 2.0).is_err());
        assert!(rtrick_check(&w, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn cube_family_is_resolution_free() {
        let params = HerzParams::uniform(1, 2.0, 0.25, 2.0).unwrap();
        let beta = Exponent::new(2.0).unwrap();
        let mut ratios = Vec::new();
        for g in [256, 512, 1024] {
            let grid = Grid::new(1, 64.0, g).unwrap();
            let fam = cube_family(grid, 16, 3).unwrap();
            let mass: f64 = fam.iter().map(|f| f.l2_norm().powi(2)).sum();
            ratios.push((mass, fs_vector_check(&fam, &params, beta, 0.5).unwrap()));
        }
        for w in ratios.windows(2) {
            assert!((w[0].0 - w[1].0).abs() < 1e-9 * w[0].0);
            assert!((w[1].1 / w[0].1).log2().abs() < 0.05, "{ratios:?}");
        }
        assert!(ratios.iter().all(|r| r.1 >= 1.0));
        assert!(cube_family(Grid::new(1, 64.0, 256).unwrap(), 0, 1).is_err());
    }
}
