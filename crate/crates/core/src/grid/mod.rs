//! Periodic dyadic grids.
//!
//! A [`Grid`] is the torus `[-L/2, L/2)^n` sampled with `G` points per axis.
//! Sample `j` sits at `x_j = -L/2 + j·h` with `h = L/G`, and stands for the
//! cell `[x_j, x_j + h)`: the field is read as piecewise constant on cells.
//! Both `G` and `h` are powers of two, so every dyadic annulus boundary
//! `2^(k-1)` with `2^(k-1) >= h` and every dyadic cube of side `>= h` is a
//! union of whole cells.
//!
//! Values are stored with axis 0 varying fastest, i.e. row-major over the
//! index tuple `(j_{n-1}, …, j_0)`.

mod fft;
mod snapshot;

pub use fft::{spectral_transform, Direction};
pub use snapshot::{read_snapshot, write_snapshot};

pub(crate) use fft::{fft_in_place, FftScratch};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Space,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    period: f64,
    points: usize,
    log2_spacing: i32,
}

impl Grid {
    pub fn new(n: usize, period: f64, points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..={MAX_DIM}")));
        }
        if !points.is_power_of_two() || points < 2 {
            return Err(Error::NotPowerOfTwo(points));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period {period} must be positive")));
        }
        let h = period / points as f64;
        let e = h.log2().round();
        if (e.exp2() - h).abs() > 1e-12 * h {
            return Err(Error::InvalidGrid(format!(
                "spacing L/G = {h} is not a power of two"
            )));
        }
        Ok(Self {
            n,
            period,
            points,
            log2_spacing: e as i32,
        })
    }

    /// Same period and resolution with a different number of axes (0 allowed).
    pub(crate) fn with_dim(self, n: usize) -> Self {
        Self { n, ..self }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.log2_spacing as f64).exp2()
    }

    pub fn log2_spacing(&self) -> i32 {
        self.log2_spacing
    }

    /// Total number of samples, `G^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.period + j as f64 * self.spacing()
    }

    /// Signed cell index `m` with `x_j = m·h`.
    pub fn cell_index(&self, j: usize) -> i64 {
        j as i64 - (self.points / 2) as i64
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for slot in idx.iter_mut().take(self.n) {
            *slot = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.n)
            .rev()
            .fold(0, |acc, &j| acc * self.points + j)
    }

    /// Angular frequency of DFT bin `b` (natural FFT order).
    pub fn frequency(&self, b: usize) -> f64 {
        let signed = if b < self.points / 2 {
            b as f64
        } else {
            b as f64 - self.points as f64
        };
        std::f64::consts::TAU / self.period * signed
    }

    /// Largest frequency representable symmetrically on every axis.
    pub fn max_frequency(&self) -> f64 {
        std::f64::consts::TAU / self.period * (self.points / 2 - 1) as f64
    }

    /// `|ξ|` for every bin of the frequency grid, in storage order.
    pub fn frequency_norms(&self) -> Vec<f64> {
        let freqs: Vec<f64> = (0..self.points).map(|b| self.frequency(b)).collect();
        (0..self.len())
            .map(|flat| {
                let idx = self.multi_index(flat);
                idx[..self.n]
                    .iter()
                    .map(|&b| freqs[b] * freqs[b])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Frequency vectors for every bin, in storage order.
    pub fn frequency_vectors(&self) -> Vec<[f64; MAX_DIM]> {
        (0..self.len())
            .map(|flat| {
                let idx = self.multi_index(flat);
                let mut xi = [0.0; MAX_DIM];
                for i in 0..self.n {
                    xi[i] = self.frequency(idx[i]);
                }
                xi
            })
            .collect()
    }

    pub fn geometry(&self) -> DyadicGeometry {
        let log2_points = self.points.trailing_zeros() as i32;
        DyadicGeometry {
            k_min: self.log2_spacing + 1,
            k_max: self.log2_spacing + log2_points - 1,
            v_max: -self.log2_spacing,
        }
    }
}

/// Resolvable dyadic scales of a grid.
///
/// Annuli `R_k` with `k_min <= k <= k_max` consist of whole cells; the two
/// cells touching the origin carry every finer annulus, and those are summed
/// in closed form by the Herz reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGeometry {
    pub k_min: i32,
    pub k_max: i32,
    pub v_max: i32,
}

/// Annulus index of the cell `[m·h, (m+1)·h)`, or `None` for the two cells
/// adjacent to the origin (which meet infinitely many annuli).
#[inline]
pub fn annulus_of_cell(m: i64, log2_h: i32) -> Option<i32> {
    // Cells left of the origin mirror onto |m+1| on the right.
    let mirrored = if m >= 0 { m } else { -m - 1 };
    if mirrored == 0 {
        return None;
    }
    let floor_log2 = 63 - mirrored.leading_zeros() as i32;
    Some(floor_log2 + log2_h + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
    domain: Domain,
}

impl SampledField {
    pub fn from_values(grid: Grid, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            grid,
            values,
            domain,
        })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::from_values(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Domain::Space,
        )
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            domain: Domain::Space,
        }
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>, domain: Domain) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            values,
            domain,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.domain != other.domain {
            return Err(Error::ShapeMismatch("fields live on different grids".into()));
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    /// `(Σ |f_j|² h^n)^{1/2}`; the discrete `L²` norm on the torus.
    pub fn l2_norm(&self) -> f64 {
        let cell = self.grid.spacing().powi(self.grid.n as i32);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    /// `max_j |f_j - g_j|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Samples `generator` at every grid coordinate.
pub fn make_field<F>(n: usize, period: f64, points: usize, generator: F) -> Result<SampledField>
where
    F: FnMut(&[f64]) -> Complex64,
{
    make_field_on(Grid::new(n, period, points)?, generator)
}

pub fn make_field_on<F>(grid: Grid, mut generator: F) -> Result<SampledField>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let mut x = [0.0; MAX_DIM];
    let mut values = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        for i in 0..grid.n {
            x[i] = grid.coordinate(idx[i]);
        }
        values.push(generator(&x[..grid.n]));
    }
    SampledField::from_values(grid, values, Domain::Space)
}

/// Indicator of the cells lying in `R_k = {2^(k-1) <= |x_axis| < 2^k}`.
pub fn annulus_mask_axis(grid: Grid, axis: usize, k: i32) -> Result<SampledField> {
    if axis >= grid.n {
        return Err(Error::InvalidAxis { axis, n: grid.n });
    }
    let geo = grid.geometry();
    if k < geo.k_min || k > geo.k_max {
        return Err(Error::AnnulusOutOfRange {
            k,
            min: geo.k_min,
            max: geo.k_max,
        });
    }
    let values = (0..grid.len())
        .map(|flat| {
            let j = grid.multi_index(flat)[axis];
            let inside = annulus_of_cell(grid.cell_index(j), grid.log2_spacing) == Some(k);
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    Ok(SampledField::from_parts_unchecked(grid, values, Domain::Space))
}

/// Indicator of the dyadic cube `Q_{v,m} = 2^{-v}([0,1)^n + m)`.
pub fn cube_indicator(grid: Grid, v: i32, m: &[i64]) -> Result<SampledField> {
    if m.len() != grid.n {
        return Err(Error::ShapeMismatch(format!(
            "cube index has {} components, grid has {} axes",
            m.len(),
            grid.n
        )));
    }
    let geo = grid.geometry();
    if v > geo.v_max {
        return Err(Error::Unresolvable(format!(
            "cube level {v} is finer than the grid (finest {})",
            geo.v_max
        )));
    }
    // Side length in cells.
    let side = 1i64 << (geo.v_max - v);
    let mut any = false;
    let values = (0..grid.len())
        .map(|flat| {
            let idx = grid.multi_index(flat);
            let inside = (0..grid.n).all(|i| grid.cell_index(idx[i]).div_euclid(side) == m[i]);
            any |= inside;
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    if !any {
        return Err(Error::CubeOutsideWindow { v });
    }
    Ok(SampledField::from_parts_unchecked(grid, values, Domain::Space))
}
