//! Sequence-space norms, the λ* majorant and non-increasing rearrangements.
//!
//! The norms are exact: `Σ_m λ_{k,m} χ_{k,m}` is constant on dyadic cubes, so
//! it is stored on a compressed product grid whose breakpoints are the cube
//! faces, and the iterated Herz norm is evaluated run by run with the cell
//! kernel of [`crate::herz`]. No sampling is involved.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frames::{CoeffSeq, LatticeIndex};
use crate::grid::MAX_DIM;
use crate::herz::{ell_norm, herz_of_runs, Exponent, HerzParams};
use crate::spaces::{Family, SpaceParams};

/// Sequence spaces share the parameter set of the function spaces;
/// [`Family::B`] selects `Ėb` and [`Family::F`] selects `Ėf`.
pub type SeqSpaceParams = SpaceParams;

/// A box `[lo, hi)` of cells (in units of the working level) with a value.
#[derive(Debug, Clone, Copy)]
struct Block {
    lo: LatticeIndex,
    hi: LatticeIndex,
    value: f64,
}

/// A piecewise constant function on a product of breakpoint intervals.
struct Compressed {
    n: usize,
    breaks: Vec<Vec<i64>>,
    values: Vec<f64>,
}

impl Compressed {
    /// Accumulates `combine(slot, block.value)` over every block.
    fn build(n: usize, blocks: &[Block], combine: impl Fn(&mut f64, f64)) -> Self {
        let breaks: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut b: Vec<i64> = blocks.iter().flat_map(|q| [q.lo[i], q.hi[i]]).collect();
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        let dims: Vec<usize> = breaks.iter().map(|b| b.len().saturating_sub(1)).collect();
        let mut values = vec![0.0; dims.iter().product()];
        let pos = |axis: usize, x: i64| breaks[axis].binary_search(&x).unwrap();
        for q in blocks {
            let mut lo = [0usize; MAX_DIM];
            let mut hi = [1usize; MAX_DIM];
            for i in 0..n {
                lo[i] = pos(i, q.lo[i]);
                hi[i] = pos(i, q.hi[i]);
            }
            let d0 = dims.first().copied().unwrap_or(1);
            let d1 = dims.get(1).copied().unwrap_or(1);
            for t2 in lo[2]..hi[2] {
                for t1 in lo[1]..hi[1] {
                    let row = (t2 * d1 + t1) * d0;
                    for slot in &mut values[row + lo[0]..row + hi[0]] {
                        combine(slot, q.value);
                    }
                }
            }
        }
        Self { n, breaks, values }
    }

    fn map(mut self, f: impl Fn(f64) -> f64) -> Self {
        self.values.iter_mut().for_each(|v| *v = f(*v));
        self
    }

    /// Iterated Herz norm, axis 0 innermost, cells of side `2^log2_h`.
    fn herz(&self, log2_h: i32, params: &HerzParams) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let mut values = self.values.clone();
        for i in 0..self.n {
            let b = &self.breaks[i];
            let len = b.len() - 1;
            values = values
                .chunks_exact(len)
                .map(|lane| {
                    herz_of_runs(
                        lane.iter().enumerate().map(|(t, &v)| (b[t], b[t + 1], v)),
                        log2_h,
                        params.p()[i],
                        params.alpha()[i],
                        params.q()[i],
                    )
                })
                .collect();
        }
        values[0]
    }
}

fn check(coeffs: &CoeffSeq, params: &SeqSpaceParams, family: Family) -> Result<()> {
    if params.family() != family {
        return Err(Error::Inadmissible(format!(
            "{:?}-family parameters passed to the {family:?} sequence norm",
            params.family()
        )));
    }
    if params.n() != coeffs.n() {
        return Err(Error::ShapeMismatch(format!(
            "{}-dimensional parameters for {}-dimensional coefficients",
            params.n(),
            coeffs.n()
        )));
    }
    Ok(())
}

fn level_weight(k: usize, params: &SeqSpaceParams) -> f64 {
    (k as f64 * (params.s() + params.n() as f64 / 2.0)).exp2()
}

/// `‖Σ_m λ_{k,m} χ_{k,m}‖_Ė` for one level, exactly.
pub fn level_herz_norm(coeffs: &CoeffSeq, k: usize, herz: &HerzParams) -> f64 {
    let Some(level) = coeffs.level(k) else {
        return 0.0;
    };
    let n = coeffs.n();
    let blocks: Vec<Block> = level
        .iter()
        .map(|(m, v)| {
            let mut hi = *m;
            for x in hi.iter_mut().take(n) {
                *x += 1;
            }
            Block {
                lo: *m,
                hi,
                value: v.norm(),
            }
        })
        .collect();
    if blocks.is_empty() {
        return 0.0;
    }
    Compressed::build(n, &blocks, |slot, v| *slot = v).herz(-(k as i32), herz)
}

/// `‖λ‖_{Ėb^s_β} = (Σ_k 2^{k(s+n/2)β} ‖Σ_m λ_{k,m}χ_{k,m}‖_Ė^β)^{1/β}`.
pub fn b_norm(coeffs: &CoeffSeq, params: &SeqSpaceParams) -> Result<f64> {
    check(coeffs, params, Family::B)?;
    let terms: Vec<f64> = (0..=coeffs.max_level())
        .map(|k| level_weight(k, params) * level_herz_norm(coeffs, k, params.herz()))
        .collect();
    Ok(ell_norm(&terms, params.beta()))
}

/// `‖λ‖_{Ėf^s_β} = ‖(Σ_{k,m} 2^{k(s+n/2)β} |λ_{k,m}|^β χ_{k,m})^{1/β}‖_Ė`,
/// evaluated at the finest occupied level.
pub fn f_norm(coeffs: &CoeffSeq, params: &SeqSpaceParams) -> Result<f64> {
    check(coeffs, params, Family::F)?;
    let Some((_, finest)) = coeffs.occupied_levels() else {
        return Ok(0.0);
    };
    let n = coeffs.n();
    let beta = params.beta();
    let blocks: Vec<Block> = coeffs
        .iter()
        .map(|(k, m, v)| {
            let side = 1i64 << (finest - k);
            let mut lo = [0; MAX_DIM];
            let mut hi = [0; MAX_DIM];
            for i in 0..n {
                lo[i] = m[i] * side;
                hi[i] = (m[i] + 1) * side;
            }
            Block {
                lo,
                hi,
                value: level_weight(k, params) * v.norm(),
            }
        })
        .collect();
    let field = if beta.is_finite() {
        let b = beta.get();
        Compressed::build(n, &blocks, |slot, v| *slot += v.powf(b)).map(|s| s.powf(1.0 / b))
    } else {
        Compressed::build(n, &blocks, |slot, v| *slot = slot.max(v))
    };
    Ok(field.herz(-(finest as i32), params.herz()))
}

/// `b_norm` or `f_norm` according to the family.
pub fn seq_norm(coeffs: &CoeffSeq, params: &SeqSpaceParams) -> Result<f64> {
    match params.family() {
        Family::B => b_norm(coeffs, params),
        Family::F => f_norm(coeffs, params),
    }
}

/// Default λ* window margin: 64 lattice cells in 1D, 16 otherwise.
pub fn default_window(n: usize) -> usize {
    if n == 1 {
        64
    } else {
        16
    }
}

/// The majorant `λ*_{k,m} = (Σ_h |λ_{k,h}|^r (1 + |h - m|)^{-d})^{1/r}`.
///
/// `m` ranges over the bounding box of the occupied indices at level `k`,
/// widened by `window` cells on every side. For `r = ∞` the weight keeps the
/// exponent `d`: `λ*_{k,m} = sup_h |λ_{k,h}| (1 + |h - m|)^{-d}`.
pub fn lambda_star(coeffs: &CoeffSeq, r: Exponent, d: f64, window: usize) -> Result<CoeffSeq> {
    if coeffs.is_empty() {
        return Err(Error::Empty("λ* window (no occupied coefficients)"));
    }
    if !(d > 0.0) {
        return Err(Error::Inadmissible(format!("decay exponent d = {d} must be positive")));
    }
    let n = coeffs.n();
    let w = window as i64;
    let mut out = CoeffSeq::new(n, coeffs.max_level())?;
    for k in 0..=coeffs.max_level() {
        let level = coeffs.level(k).unwrap();
        if level.is_empty() {
            continue;
        }
        let occupied: Vec<(LatticeIndex, f64)> = level.iter().map(|(m, v)| (*m, v.norm())).collect();
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for i in 0..n {
            lo[i] = occupied.iter().map(|(m, _)| m[i]).min().unwrap() - w;
            hi[i] = occupied.iter().map(|(m, _)| m[i]).max().unwrap() + w + 1;
        }
        let mut m = lo;
        loop {
            let mut acc = 0.0f64;
            for (h, v) in &occupied {
                let dist = (0..n).map(|i| ((h[i] - m[i]) as f64).powi(2)).sum::<f64>().sqrt();
                if r.is_finite() {
                    acc += v.powf(r.get()) * (1.0 + dist).powf(-d);
                } else {
                    acc = acc.max(v * (1.0 + dist).powf(-d));
                }
            }
            let value = if r.is_finite() { acc.powf(1.0 / r.get()) } else { acc };
            out.insert(k, &m[..n], Complex64::new(value, 0.0))?;
            // Advance the multi-index, axis 0 fastest.
            let mut i = 0;
            while i < n {
                m[i] += 1;
                if m[i] < hi[i] {
                    break;
                }
                m[i] = lo[i];
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Ok(out)
}

/// Non-increasing rearrangement of a step function: `f*(t) = v_i` on
/// `[t_{i-1}, t_i)`, zero beyond the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl RearrangedProfile {
    /// `t_0 = 0 < t_1 < …`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `v_1 >= v_2 >= … > 0`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measure of the support.
    pub fn support(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let i = self.breakpoints.partition_point(|&b| b <= t);
        self.values.get(i.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    /// `‖f*‖_{L^p(0,∞)}`.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        if !p.is_finite() {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let s: f64 = self
            .values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(v, w)| v.powf(p.get()) * (w[1] - w[0]))
            .sum();
        s.powf(1.0 / p.get())
    }

    /// `(Σ_{j∈ℤ} 2^j f*(2^j)^p)^{1/p}`, with the geometric head (all `j`
    /// with `2^j` below the first breakpoint) summed in closed form.
    pub fn dyadic_norm(&self, p: Exponent) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let pv = p.get();
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            // Dyadic points 2^j in [a, b).
            let top = b.log2().ceil() as i32 - 1;
            let top = if (top as f64).exp2() >= b { top - 1 } else { top };
            let weight = if a == 0.0 {
                (top as f64 + 1.0).exp2()
            } else {
                let mut first = a.log2().ceil() as i32;
                if ((first - 1) as f64).exp2() >= a {
                    first -= 1;
                }
                if first > top {
                    0.0
                } else {
                    (top as f64 + 1.0).exp2() - (first as f64).exp2()
                }
            };
            total += weight * v.powf(pv);
        }
        total.powf(1.0 / pv)
    }
}

/// Rearranges `|v_i|` held on sets of measure `measures[i]`.
pub fn rearrange(values: &[f64], measures: &[f64]) -> Result<RearrangedProfile> {
    if values.len() != measures.len() {
        return Err(Error::ShapeMismatch("values and measures differ in length".into()));
    }
    if let Some(i) = values
        .iter()
        .chain(measures)
        .position(|v| !v.is_finite())
    {
        return Err(Error::NonFinite(i % values.len().max(1)));
    }
    let mut cells: Vec<(f64, f64)> = values
        .iter()
        .zip(measures)
        .map(|(v, m)| (v.abs(), *m))
        .filter(|(v, m)| *v > 0.0 && *m > 0.0)
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut breakpoints = vec![0.0];
    let mut out = Vec::with_capacity(cells.len());
    for (v, m) in cells {
        let t = breakpoints.last().unwrap() + m;
        if out.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = t;
        } else {
            breakpoints.push(t);
            out.push(v);
        }
    }
    Ok(RearrangedProfile {
        breakpoints,
        values: out,
    })
}
