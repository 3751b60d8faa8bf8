//! Lebesgue and Herz norms, one axis at a time.
//!
//! Every reduction works on cells: a lane of values along one axis is a list
//! of `(m, |v|)` pairs, the value `|v|` held on `[m·h, (m+1)·h)`. Cells away
//! from the origin fall into exactly one annulus `R_k`. The two cells
//! touching the origin (`m = 0` and `m = -1`) meet every annulus with
//! `2^k <= h`; their contribution
//!
//! ```text
//! Σ_{k <= log2 h} 2^{kαq} ((|c₋|^p + |c₊|^p)·2^{k-1})^{q/p}
//! ```
//!
//! is a geometric series (ratio `2^{-(α+1/p)q}`, convergent by admissibility)
//! and is added in closed form.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{annulus_of_cell, Domain, Grid, SampledField, MAX_DIM};

/// A Lebesgue or fine exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(v: f64) -> Result<Self> {
        if v > 0.0 && !v.is_nan() {
            Ok(Self(v))
        } else {
            Err(Error::Inadmissible(format!("exponent {v} not in (0, inf]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.0.is_finite() {
            1.0 / self.0
        } else {
            0.0
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(Self::INFINITY),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::Inadmissible(format!("cannot parse exponent {other:?}")))?;
                Self::new(v)
            }
        }
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

/// `(p⃗, α⃗, q⃗)` for a mixed-norm Herz space.
#[derive(Debug, Clone, PartialEq)]
pub struct HerzParams {
    p: Vec<Exponent>,
    alpha: Vec<f64>,
    q: Vec<Exponent>,
}

impl HerzParams {
    pub fn new(p: Vec<Exponent>, alpha: Vec<f64>, q: Vec<Exponent>) -> Result<Self> {
        let n = p.len();
        if !(1..=MAX_DIM).contains(&n) || alpha.len() != n || q.len() != n {
            return Err(Error::Inadmissible(format!(
                "parameter vectors have lengths {}, {}, {}",
                p.len(),
                alpha.len(),
                q.len()
            )));
        }
        for i in 0..n {
            check_admissible(p[i], alpha[i])?;
        }
        Ok(Self { p, alpha, q })
    }

    /// Same `(p, α, q)` on every axis.
    pub fn uniform(n: usize, p: f64, alpha: f64, q: f64) -> Result<Self> {
        Self::new(
            vec![Exponent::new(p)?; n],
            vec![alpha; n],
            vec![Exponent::new(q)?; n],
        )
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[Exponent] {
        &self.p
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn q(&self) -> &[Exponent] {
        &self.q
    }

    /// Bold `1/p = Σ 1/p_i`.
    pub fn inv_p_bold(&self) -> f64 {
        self.p.iter().map(|p| p.recip()).sum()
    }

    /// Bold `α = Σ α_i`.
    pub fn alpha_bold(&self) -> f64 {
        self.alpha.iter().sum()
    }

    pub fn p_minus(&self) -> Exponent {
        self.p.iter().copied().fold(Exponent::INFINITY, Exponent::min)
    }

    pub fn q_minus(&self) -> Exponent {
        self.q.iter().copied().fold(Exponent::INFINITY, Exponent::min)
    }

    /// The same parameters with the fine exponents replaced.
    pub fn with_q(&self, q: Vec<Exponent>) -> Result<Self> {
        Self::new(self.p.clone(), self.alpha.clone(), q)
    }
}

fn check_admissible(p: Exponent, alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= -p.recip() {
        return Err(Error::Inadmissible(format!(
            "alpha = {alpha} must exceed -1/p = {}",
            -p.recip()
        )));
    }
    Ok(())
}

#[inline]
fn pow_p(v: f64, p: f64) -> f64 {
    if p == 2.0 {
        v * v
    } else if p == 1.0 {
        v
    } else {
        v.powf(p)
    }
}

#[inline]
fn root_p(s: f64, p: f64) -> f64 {
    if p == 2.0 {
        s.sqrt()
    } else if p == 1.0 {
        s
    } else {
        s.powf(1.0 / p)
    }
}

/// `ℓ^q` norm of nonnegative terms, scaled by the largest term so that a
/// single nonzero term is returned exactly.
pub(crate) fn ell_norm(terms: &[f64], q: Exponent) -> f64 {
    let top = terms.iter().copied().fold(0.0, f64::max);
    if top == 0.0 || !q.is_finite() {
        return top;
    }
    let qv = q.get();
    let sum: f64 = terms.iter().map(|&t| pow_p(t / top, qv)).sum();
    top * root_p(sum, qv)
}

/// `(Σ |v|^p h)^{1/p}` (or the max for `p = ∞`) of a lane of magnitudes.
pub(crate) fn lp_of_lane(lane: &[f64], h: f64, p: Exponent) -> f64 {
    let p = p.get();
    if p.is_infinite() {
        lane.iter().copied().fold(0.0, f64::max)
    } else {
        root_p(lane.iter().map(|&v| pow_p(v, p)).sum::<f64>() * h, p)
    }
}

/// Per-annulus sums `Σ |v|^p · (cell count)` (or maxima when `p = ∞`) of a
/// one-dimensional cellwise constant function, indexed by `floor(log2 |m'|)`
/// where `m' = m` for `m >= 1` and `m' = -m - 1` for `m <= -2`.
struct AnnulusAcc {
    p: f64,
    acc: [f64; 64],
    /// Values on the cells `m = -1` and `m = 0`.
    inner: [f64; 2],
}

impl AnnulusAcc {
    fn new(p: Exponent) -> Self {
        Self {
            p: p.get(),
            acc: [0.0; 64],
            inner: [0.0; 2],
        }
    }

    #[inline]
    fn add(&mut self, slot: usize, v: f64, count: i64) {
        let s = &mut self.acc[slot];
        if self.p.is_infinite() {
            *s = s.max(v);
        } else {
            *s += pow_p(v, self.p) * count as f64;
        }
    }

    #[inline]
    fn cell(&mut self, m: i64, v: f64) {
        if v == 0.0 {
            return;
        }
        match annulus_of_cell(m, 0) {
            None => self.inner[(m == 0) as usize] = v,
            Some(i) => self.add((i - 1) as usize, v, 1),
        }
    }

    /// Mirrored cells `[lo, hi)` with `lo >= 1`.
    fn mirrored_run(&mut self, lo: i64, hi: i64, v: f64) {
        let mut a = lo;
        while a < hi {
            let i = 63 - a.leading_zeros() as usize;
            let end = hi.min(1i64 << (i + 1));
            self.add(i, v, end - a);
            a = end;
        }
    }

    /// Cells `a..b` all holding `v`.
    fn run(&mut self, a: i64, b: i64, v: f64) {
        if v == 0.0 || a >= b {
            return;
        }
        if a <= 0 && b > 0 {
            self.inner[1] = v;
        }
        if a <= -1 && b > -1 {
            self.inner[0] = v;
        }
        self.mirrored_run(a.max(1), b, v);
        let e = b.min(-1);
        if a < e {
            self.mirrored_run(-e, -a, v);
        }
    }

    fn finish(&self, log2_h: i32, alpha: f64, p: Exponent, q: Exponent) -> f64 {
        let pv = self.p;
        let h = (log2_h as f64).exp2();
        let qv = q.get();
        let mut total = 0.0f64;
        let mut push = |term: f64| {
            if qv.is_infinite() {
                total = total.max(term);
            } else {
                total += term.powf(qv);
            }
        };

        for (i, &s) in self.acc.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let k = i as i32 + log2_h + 1;
            let norm = if pv.is_infinite() { s } else { root_p(s * h, pv) };
            push((k as f64 * alpha).exp2() * norm);
        }

        let inner = self.inner;
        if inner[0] != 0.0 || inner[1] != 0.0 {
            let k0 = log2_h as f64;
            let gamma = alpha + p.recip();
            let inner_p = if pv.is_infinite() {
                inner[0].max(inner[1])
            } else {
                root_p(pow_p(inner[0], pv) + pow_p(inner[1], pv), pv)
            };
            let edge = inner_p * (-p.recip()).exp2() * (k0 * gamma).exp2();
            if qv.is_infinite() {
                push(edge);
            } else {
                // Σ_{k <= k0} edge^q 2^{(k-k0)γq}, as one term of the q-sum.
                let series = 1.0 / (1.0 - (-gamma * qv).exp2());
                push(edge * series.powf(1.0 / qv));
            }
        }

        if qv.is_infinite() {
            total
        } else {
            total.powf(1.0 / qv)
        }
    }
}

/// One-dimensional Herz norm of a cellwise constant function.
///
/// `cells` yields `(m, |v|)` for the cells `[m·h, (m+1)·h)` with
/// `h = 2^log2_h`; absent cells are zero. Each cell must appear at most once.
pub(crate) fn herz_of_cells<I>(cells: I, log2_h: i32, p: Exponent, alpha: f64, q: Exponent) -> f64
where
    I: IntoIterator<Item = (i64, f64)>,
{
    let mut acc = AnnulusAcc::new(p);
    for (m, v) in cells {
        acc.cell(m, v);
    }
    acc.finish(log2_h, alpha, p, q)
}

/// As [`herz_of_cells`], for disjoint runs `(a, b, |v|)` covering cells
/// `a..b`.
pub(crate) fn herz_of_runs<I>(runs: I, log2_h: i32, p: Exponent, alpha: f64, q: Exponent) -> f64
where
    I: IntoIterator<Item = (i64, i64, f64)>,
{
    let mut acc = AnnulusAcc::new(p);
    for (a, b, v) in runs {
        acc.run(a, b, v);
    }
    acc.finish(log2_h, alpha, p, q)
}

/// Collapses `axis` of an `n_cur`-dimensional array of magnitudes.
fn reduce_axis<F>(values: &[f64], points: usize, n_cur: usize, axis: usize, mut lane_fn: F) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    debug_assert!(axis < n_cur);
    let stride = points.pow(axis as u32);
    let block = stride * points;
    let outer = values.len() / block;
    let mut out = Vec::with_capacity(outer * stride);
    if stride == 1 {
        out.extend(values.chunks_exact(points).map(&mut lane_fn));
        return out;
    }
    out.resize(outer * stride, 0.0);
    let mut lane = vec![0.0; points];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * block + inner;
            for (j, slot) in lane.iter_mut().enumerate() {
                *slot = values[base + j * stride];
            }
            out[o * stride + inner] = lane_fn(&lane);
        }
    }
    out
}

fn check_field(field: &SampledField, axis: usize) -> Result<()> {
    if field.domain() != Domain::Space {
        return Err(Error::DomainMismatch {
            expected: Domain::Space,
            found: field.domain(),
        });
    }
    if axis >= field.n() {
        return Err(Error::InvalidAxis {
            axis,
            n: field.n(),
        });
    }
    Ok(())
}

fn lane_herz(grid: Grid, p: Exponent, alpha: f64, q: Exponent) -> impl Fn(&[f64]) -> f64 {
    let half = (grid.points() / 2) as i64;
    let log2_h = grid.log2_spacing();
    move |lane: &[f64]| {
        herz_of_cells(
            lane.iter().enumerate().map(|(j, &v)| (j as i64 - half, v)),
            log2_h,
            p,
            alpha,
            q,
        )
    }
}

fn collapsed(field: &SampledField, values: Vec<f64>) -> SampledField {
    let grid = field.grid().with_dim(field.n() - 1);
    SampledField::from_parts_unchecked(
        grid,
        values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        Domain::Space,
    )
}

/// `L^p` norm along one axis; the result has that axis removed.
pub fn axis_lp_norm(field: &SampledField, axis: usize, p: Exponent) -> Result<SampledField> {
    check_field(field, axis)?;
    let grid = field.grid();
    let h = grid.spacing();
    let out = reduce_axis(&field.abs_values(), grid.points(), grid.n(), axis, |lane| {
        lp_of_lane(lane, h, p)
    });
    Ok(collapsed(field, out))
}

/// Herz norm `K̇_p^{α,q}` along one axis; the result has that axis removed.
pub fn axis_herz_norm(
    field: &SampledField,
    axis: usize,
    p: Exponent,
    alpha: f64,
    q: Exponent,
) -> Result<SampledField> {
    check_field(field, axis)?;
    check_admissible(p, alpha)?;
    let grid = field.grid();
    let out = reduce_axis(
        &field.abs_values(),
        grid.points(),
        grid.n(),
        axis,
        lane_herz(grid, p, alpha, q),
    );
    Ok(collapsed(field, out))
}

/// Iterated Herz norm of an array of magnitudes laid out on `grid`.
pub(crate) fn mixed_herz_abs(mut values: Vec<f64>, grid: Grid, params: &HerzParams) -> f64 {
    debug_assert_eq!(params.n(), grid.n());
    for i in 0..grid.n() {
        let lane = lane_herz(grid, params.p[i], params.alpha[i], params.q[i]);
        values = reduce_axis(&values, grid.points(), grid.n() - i, 0, lane);
    }
    values[0]
}

/// `‖f‖_{Ė_p⃗^{α⃗,q⃗}}`: axis 0 innermost, one axis collapsed per step.
pub fn mixed_herz_norm(field: &SampledField, params: &HerzParams) -> Result<f64> {
    check_field(field, 0)?;
    if params.n() != field.n() {
        return Err(Error::ShapeMismatch(format!(
            "{}-dimensional parameters for a {}-dimensional field",
            params.n(),
            field.n()
        )));
    }
    Ok(mixed_herz_abs(field.abs_values(), field.grid(), params))
}

/// `‖f‖_{L^p⃗}`: axis 0 innermost.
pub fn mixed_lebesgue_norm(field: &SampledField, p: &[Exponent]) -> Result<f64> {
    check_field(field, 0)?;
    if p.len() != field.n() {
        return Err(Error::ShapeMismatch(format!(
            "{} exponents for a {}-dimensional field",
            p.len(),
            field.n()
        )));
    }
    let grid = field.grid();
    let h = grid.spacing();
    let mut values = field.abs_values();
    for (i, &pi) in p.iter().enumerate() {
        values = reduce_axis(&values, grid.points(), grid.n() - i, 0, |lane| {
            lp_of_lane(lane, h, pi)
        });
    }
    Ok(values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{annulus_mask_axis, make_field, make_field_on};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn indicator(n: usize, period: f64, points: usize, lo: f64, hi: f64) -> SampledField {
        make_field(n, period, points, |x| {
            let inside = x.iter().all(|&xi| (lo..hi).contains(&xi));
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap()
    }

    fn random_field(rng: &mut ChaCha8Rng, grid: Grid) -> SampledField {
        make_field_on(grid, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    fn scalar(f: &SampledField) -> f64 {
        assert_eq!(f.n(), 0);
        f.values()[0].re
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INFINITY);
        assert_eq!("2.5".parse::<Exponent>().unwrap().get(), 2.5);
        assert!("0".parse::<Exponent>().is_err());
        assert!("-1".parse::<Exponent>().is_err());
        assert_eq!(Exponent::INFINITY.recip(), 0.0);
    }

    #[test]
    fn admissibility() {
        assert!(HerzParams::uniform(1, 2.0, -0.5, 2.0).is_err());
        assert!(HerzParams::uniform(1, 2.0, -0.49, 2.0).is_ok());
        assert!(HerzParams::uniform(1, f64::INFINITY, 0.0, 2.0).is_err());
        let grid = Grid::new(1, 8.0, 64).unwrap();
        let f = SampledField::zeros(grid);
        assert!(axis_herz_norm(&f, 0, e(1.0), -1.0, e(1.0)).is_err());
    }

    #[test]
    fn lp_examples() {
        let f = indicator(1, 8.0, 64, 0.0, 1.0);
        assert!((scalar(&axis_lp_norm(&f, 0, e(2.0)).unwrap()) - 1.0).abs() < 1e-15);
        assert_eq!(scalar(&axis_lp_norm(&f, 0, Exponent::INFINITY).unwrap()), 1.0);
        let z = SampledField::zeros(f.grid());
        assert_eq!(scalar(&axis_lp_norm(&z, 0, e(2.0)).unwrap()), 0.0);
        assert!(axis_lp_norm(&z, 1, e(2.0)).is_err());
    }

    #[test]
    fn herz_single_annulus() {
        let grid = Grid::new(1, 8.0, 64).unwrap();
        let r0 = annulus_mask_axis(grid, 0, 0).unwrap();
        let v = scalar(&axis_herz_norm(&r0, 0, e(1.0), 0.0, e(1.0)).unwrap());
        assert!((v - 1.0).abs() < 1e-14);
        let r2 = annulus_mask_axis(grid, 0, 2).unwrap();
        for q in [0.5, 1.0, 3.0, f64::INFINITY] {
            let v = scalar(&axis_herz_norm(&r2, 0, e(2.0), 0.5, e(q)).unwrap());
            assert!((v - 4.0).abs() < 1e-13, "q={q}: {v}");
        }
        let z = SampledField::zeros(grid);
        assert_eq!(scalar(&axis_herz_norm(&z, 0, e(2.0), 0.5, e(2.0)).unwrap()), 0.0);
    }

    #[test]
    fn mixed_examples() {
        let f = indicator(2, 8.0, 64, 0.5, 1.0);
        let params = HerzParams::uniform(2, 2.0, 0.0, 2.0).unwrap();
        assert!((mixed_herz_norm(&f, &params).unwrap() - 0.5).abs() < 1e-14);
        let g = f.scaled(Complex64::new(0.0, 3.0));
        assert!((mixed_herz_norm(&g, &params).unwrap() - 1.5).abs() < 1e-14);

        let cube = indicator(2, 8.0, 64, 0.0, 1.0);
        for p in [[1.0, 2.0], [2.0, 1.0]] {
            let v = mixed_lebesgue_norm(&cube, &[e(p[0]), e(p[1])]).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
        let z = SampledField::zeros(cube.grid());
        assert_eq!(mixed_lebesgue_norm(&z, &[e(1.0), e(2.0)]).unwrap(), 0.0);
    }

    #[test]
    fn unit_cube_at_origin_uses_inner_tail() {
        // χ_[0,1): annuli R_k for k <= 0 each carry measure 2^{k-1}.
        let f = indicator(1, 8.0, 64, 0.0, 1.0);
        let v = scalar(&axis_herz_norm(&f, 0, e(2.0), 0.0, e(2.0)).unwrap());
        assert!((v - 1.0).abs() < 1e-14);
        // p = 1, α = 1/2, q = 1: Σ_{k<=0} 2^{k/2} 2^{k-1} = 1/(2(1 - 2^{-3/2})).
        let v = scalar(&axis_herz_norm(&f, 0, e(1.0), 0.5, e(1.0)).unwrap());
        let expect = 0.5 / (1.0 - (-1.5f64).exp2());
        assert!((v - expect).abs() < 1e-14);
        // q = ∞ picks the largest annulus term, k = 0: 2^{0}·(1/2)^{1/1}.
        let v = scalar(&axis_herz_norm(&f, 0, e(1.0), 0.5, Exponent::INFINITY).unwrap());
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inner_tail_independent_of_resolution() {
        for points in [32, 64, 256, 1024] {
            let f = indicator(1, 8.0, points, -0.5, 0.75);
            let v = scalar(&axis_herz_norm(&f, 0, e(1.5), 0.3, e(0.7)).unwrap());
            // Exact: [-1/2,0) ∪ [0,1/2) gives Σ_{k<=-1} 2^{0.3k q}(2^{k})^{q/p},
            // plus R_0 ∩ [1/2, 3/4) with measure 1/4.
            let (p, a, q) = (1.5f64, 0.3f64, 0.7f64);
            let g = (a + 1.0 / p) * q;
            let inner = (-g).exp2() / (1.0 - (-g).exp2());
            let outer = 0.25f64.powf(q / p);
            let exact = (inner + outer).powf(1.0 / q);
            assert!((v - exact).abs() < 1e-13 * exact, "G={points}: {v} vs {exact}");
        }
    }

    #[test]
    fn coincides_with_lebesgue() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, g) in [(1, 1024), (2, 64), (3, 16)] {
            let grid = Grid::new(n, 8.0, g).unwrap();
            for p in [1.0, 2.0, 4.0, 0.7] {
                let f = random_field(&mut rng, grid);
                let herz = mixed_herz_norm(&f, &HerzParams::uniform(n, p, 0.0, p).unwrap()).unwrap();
                let leb = mixed_lebesgue_norm(&f, &vec![e(p); n]).unwrap();
                assert!((herz - leb).abs() <= 1e-12 * leb);
            }
        }
    }

    #[test]
    fn fine_index_monotone_and_quasi_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = Grid::new(2, 8.0, 32).unwrap();
        for _ in 0..20 {
            let f = random_field(&mut rng, grid);
            let g = random_field(&mut rng, grid);
            let p = vec![e(rng.random_range(0.5..4.0)), e(rng.random_range(0.5..4.0))];
            let alpha = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let q1 = vec![e(rng.random_range(0.5..2.0)), e(rng.random_range(0.5..2.0))];
            let q2 = vec![e(q1[0].get() + 1.0), e(q1[1].get() + 0.5)];
            let a = HerzParams::new(p.clone(), alpha.clone(), q1).unwrap();
            let b = HerzParams::new(p, alpha, q2).unwrap();
            assert!(mixed_herz_norm(&f, &b).unwrap() <= mixed_herz_norm(&f, &a).unwrap());

            let d = a.p_minus().min(a.q_minus()).get().min(1.0);
            let sum = f.try_add(&g).unwrap();
            let lhs = mixed_herz_norm(&sum, &a).unwrap().powf(d);
            let rhs = mixed_herz_norm(&f, &a).unwrap().powf(d) + mixed_herz_norm(&g, &a).unwrap().powf(d);
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dilation_by_grid_refinement() {
        // A function on one annulus per axis, dilated by 2 on a finer grid.
        let params = HerzParams::new(vec![e(1.5), e(3.0)], vec![0.25, -0.1], vec![e(2.0), e(0.8)]).unwrap();
        let base = |x: &[f64]| {
            let inside = (1.0..2.0).contains(&x[0]) && (-4.0..-2.0).contains(&x[1]);
            Complex64::new(if inside { 1.0 + x[0] * x[1] } else { 0.0 }, 0.0)
        };
        let f = make_field(2, 16.0, 64, base).unwrap();
        let f1 = make_field(2, 16.0, 128, |x| base(&[2.0 * x[0], 2.0 * x[1]])).unwrap();
        let ratio = mixed_herz_norm(&f1, &params).unwrap() / mixed_herz_norm(&f, &params).unwrap();
        let expect = (-(params.alpha_bold() + params.inv_p_bold())).exp2();
        assert!((ratio - expect).abs() < 1e-12);
    }

    #[test]
    fn runs_match_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let mut cuts: Vec<i64> = (0..6).map(|_| rng.random_range(-300i64..300)).collect();
            cuts.sort();
            cuts.dedup();
            let runs: Vec<(i64, i64, f64)> = cuts
                .windows(2)
                .map(|w| (w[0], w[1], rng.random_range(0.0..2.0)))
                .collect();
            let cells: Vec<(i64, f64)> = runs
                .iter()
                .flat_map(|&(a, b, v)| (a..b).map(move |m| (m, v)))
                .collect();
            for (p, alpha, q) in [(2.0, 0.0, 2.0), (0.7, 0.4, 1.3), (f64::INFINITY, 0.2, 0.5), (3.0, -0.2, f64::INFINITY)] {
                let (p, q) = (e(p), e(q));
                let a = herz_of_runs(runs.iter().copied(), -3, p, alpha, q);
                let b = herz_of_cells(cells.iter().copied(), -3, p, alpha, q);
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    proptest! {
        #[test]
        fn homogeneity(seed in 0u64..1000, re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let grid = Grid::new(2, 4.0, 16).unwrap();
            let f = random_field(&mut rng, grid);
            let params = HerzParams::new(
                vec![e(rng.random_range(0.5..4.0)), Exponent::INFINITY],
                vec![rng.random_range(-0.2..1.0), 0.5],
                vec![e(rng.random_range(0.5..4.0)), e(1.0)],
            ).unwrap();
            let c = Complex64::new(re, im);
            let lhs = mixed_herz_norm(&f.scaled(c), &params).unwrap();
            let rhs = c.norm() * mixed_herz_norm(&f, &params).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }
}
