//! The φ-transform and its inverse on the periodic grid.
//!
//! With `M_k f = F^{-1}(m_k · Ff)` the level-`k` multiplier of a
//! Frazier-Jawerth pair, analysis is
//!
//! ```text
//! λ_{k,m} = 2^{-kn/2} (M_k f)(2^{-k} m)
//! ```
//!
//! and synthesis is `Σ_k M_k(Σ_m λ_{k,m} 2^{-kn/2} δ_{2^{-k}m})`, a Dirac
//! comb on the level-`k` lattice filtered by the same multiplier. Lattice
//! points are grid points. The comb replicates the level-`k` spectrum at
//! multiples of `2π·2^k`; those copies lie beyond the support `|ξ| <= 2^{k+1}`
//! of the filter, so the Calderón identity makes the round trip exact up to
//! rounding.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{fft_in_place, Domain, FftScratch, Grid, SampledField, MAX_DIM};
use crate::lpdecomp::{filtered, spectrum, SpectralSystem, SystemKind};

pub type LatticeIndex = [i64; MAX_DIM];

/// Sparse coefficients `λ_{k,m}`, `k = 0..=K`, `m ∈ ℤ^n`.
///
/// The level-`k` lattice has spacing `2^{-k}`; `λ_{k,m}` belongs to the cube
/// `Q_{k,m} = 2^{-k}([0,1)^n + m)`. Absent entries are zero and stored
/// entries are finite and nonzero. Unused trailing index components are 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffSeq {
    n: usize,
    levels: Vec<BTreeMap<LatticeIndex, Complex64>>,
}

impl CoeffSeq {
    pub fn new(n: usize, max_level: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..={MAX_DIM}")));
        }
        Ok(Self {
            n,
            levels: vec![BTreeMap::new(); max_level + 1],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest level `K` this sequence can hold.
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn key(&self, m: &[i64]) -> Result<LatticeIndex> {
        if m.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "lattice index has {} components, expected {}",
                m.len(),
                self.n
            )));
        }
        let mut key = [0; MAX_DIM];
        key[..self.n].copy_from_slice(m);
        Ok(key)
    }

    /// Sets `λ_{k,m}`; a zero value removes the entry.
    pub fn insert(&mut self, k: usize, m: &[i64], value: Complex64) -> Result<()> {
        let key = self.key(m)?;
        let max = self.max_level();
        let level = self
            .levels
            .get_mut(k)
            .ok_or(Error::LevelOutOfRange { level: k, max })?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        if value == Complex64::default() {
            level.remove(&key);
        } else {
            level.insert(key, value);
        }
        Ok(())
    }

    pub fn get(&self, k: usize, m: &[i64]) -> Complex64 {
        let Ok(key) = self.key(m) else {
            return Complex64::default();
        };
        self.levels
            .get(k)
            .and_then(|l| l.get(&key))
            .copied()
            .unwrap_or_default()
    }

    pub fn level(&self, k: usize) -> Option<&BTreeMap<LatticeIndex, Complex64>> {
        self.levels.get(k)
    }

    /// `(k, m, λ_{k,m})` in level order, then lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &LatticeIndex, Complex64)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(k, l)| l.iter().map(move |(m, v)| (k, m, *v)))
    }

    /// Lowest and highest occupied levels.
    pub fn occupied_levels(&self) -> Option<(usize, usize)> {
        let mut it = (0..self.levels.len()).filter(|&k| !self.levels[k].is_empty());
        let lo = it.next()?;
        Some((lo, it.next_back().unwrap_or(lo)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = Self {
            n: self.n,
            levels: vec![BTreeMap::new(); self.levels.len()],
        };
        for (k, m, v) in self.iter() {
            let w = v * c;
            if w != Complex64::default() {
                out.levels[k].insert(*m, w);
            }
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch("sequences have different dimensions".into()));
        }
        let mut out = self.clone();
        if other.levels.len() > out.levels.len() {
            out.levels.resize(other.levels.len(), BTreeMap::new());
        }
        for (k, m, v) in other.iter() {
            let slot = out.levels[k].entry(*m).or_default();
            *slot += v;
            if *slot == Complex64::default() {
                out.levels[k].remove(m);
            }
        }
        Ok(out)
    }

    /// `max |λ_{k,m} - μ_{k,m}|` over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.iter().map(|(k, m, v)| (v - other.get(k, &m[..self.n])).norm());
        let b = other.iter().map(|(k, m, v)| (v - self.get(k, &m[..other.n])).norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Writes the text coefficient format (see `docs/formats.md`).
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "herzlab-coeffs 1")?;
        writeln!(out, "n {}", self.n)?;
        writeln!(out, "K {}", self.max_level())?;
        writeln!(out, "lattice dyadic")?;
        for (k, m, v) in self.iter() {
            write!(out, "{k}")?;
            for mi in &m[..self.n] {
                write!(out, " {mi}")?;
            }
            writeln!(out, " {:?} {:?}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let mut header = |expect: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format("truncated header".into()))??;
            let rest = line
                .strip_prefix(expect)
                .ok_or_else(|| Error::Format(format!("expected {expect:?}, found {line:?}")))?;
            Ok(rest.trim().to_string())
        };
        let version = header("herzlab-coeffs")?;
        if version != "1" {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let bad = |what: &str| Error::Format(format!("bad {what}"));
        let n: usize = header("n")?.parse().map_err(|_| bad("dimension"))?;
        let max_level: usize = header("K")?.parse().map_err(|_| bad("level count"))?;
        if header("lattice")? != "dyadic" {
            return Err(bad("lattice convention"));
        }
        let mut seq = Self::new(n, max_level)?;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != n + 3 {
                return Err(Error::Format(format!("record {} has {} fields", i + 1, fields.len())));
            }
            let k: usize = fields[0].parse().map_err(|_| bad("level"))?;
            let m = fields[1..=n]
                .iter()
                .map(|s| s.parse::<i64>().map_err(|_| bad("lattice index")))
                .collect::<Result<Vec<_>>>()?;
            let re: f64 = fields[n + 1].parse().map_err(|_| bad("real part"))?;
            let im: f64 = fields[n + 2].parse().map_err(|_| bad("imaginary part"))?;
            seq.insert(k, &m, Complex64::new(re, im))?;
        }
        Ok(seq)
    }
}

/// Grid steps between level-`k` lattice points.
fn lattice_step(grid: Grid, k: usize) -> Result<usize> {
    let geo = grid.geometry();
    if grid.period() < 1.0 {
        return Err(Error::Unresolvable(format!(
            "period {} is shorter than the level-0 lattice spacing",
            grid.period()
        )));
    }
    if k as i32 > geo.v_max {
        return Err(Error::Unresolvable(format!(
            "level-{k} lattice is finer than the grid (finest level {})",
            geo.v_max
        )));
    }
    Ok(1 << (geo.v_max - k as i32))
}

fn check_pair(system: &SpectralSystem) -> Result<()> {
    if system.kind() != SystemKind::FjPair {
        return Err(Error::Inadmissible(
            "the φ-transform needs a Frazier-Jawerth pair".into(),
        ));
    }
    Ok(())
}

/// Visits every lattice point `(flat grid index, m)` at step `step`.
fn for_lattice<F: FnMut(usize, &[i64])>(grid: Grid, step: usize, mut f: F) {
    let per_axis = grid.points() / step;
    let half = (per_axis / 2) as i64;
    let n = grid.n();
    let count = per_axis.pow(n as u32);
    let mut idx = [0usize; MAX_DIM];
    let mut m = [0i64; MAX_DIM];
    for c in 0..count {
        let mut rest = c;
        for i in 0..n {
            let t = rest % per_axis;
            rest /= per_axis;
            idx[i] = t * step;
            m[i] = t as i64 - half;
        }
        f(grid.flat_index(&idx[..n]), &m[..n]);
    }
}

/// `S_φ f`: coefficients `λ_{k,m}` for `k = 0..=K` and every lattice point
/// in the window.
pub fn analyze(field: &SampledField, system: &SpectralSystem) -> Result<CoeffSeq> {
    check_pair(system)?;
    if field.domain() != Domain::Space {
        return Err(Error::DomainMismatch {
            expected: Domain::Space,
            found: field.domain(),
        });
    }
    let grid = field.grid();
    if grid != system.grid() {
        return Err(Error::ShapeMismatch("field and system grids differ".into()));
    }
    let n = grid.n() as i32;
    let mut scratch = FftScratch::default();
    let spec = spectrum(field, &mut scratch);
    let mut seq = CoeffSeq::new(grid.n(), system.levels())?;
    for k in 0..=system.levels() {
        let step = lattice_step(grid, k)?;
        let block = filtered(&spec, system.multiplier(k)?, grid, &mut scratch);
        let weight = (-(k as f64) * n as f64 / 2.0).exp2();
        let level = &mut seq.levels[k];
        for_lattice(grid, step, |flat, m| {
            let v = block[flat] * weight;
            if v != Complex64::default() {
                let mut key = [0; MAX_DIM];
                key[..m.len()].copy_from_slice(m);
                level.insert(key, v);
            }
        });
    }
    Ok(seq)
}

/// `T_ψ λ` sampled on `grid`.
pub fn synthesize(coeffs: &CoeffSeq, system: &SpectralSystem, grid: Grid) -> Result<SampledField> {
    check_pair(system)?;
    if grid != system.grid() || coeffs.n() != grid.n() {
        return Err(Error::ShapeMismatch("coefficients, system and grid disagree".into()));
    }
    if let Some((_, hi)) = coeffs.occupied_levels() {
        if hi > system.levels() {
            return Err(Error::LevelOutOfRange {
                level: hi,
                max: system.levels(),
            });
        }
    }
    let n = grid.n();
    let cell = grid.spacing().powi(n as i32);
    let mut scratch = FftScratch::default();
    let mut total = vec![Complex64::default(); grid.len()];
    let mut comb = vec![Complex64::default(); grid.len()];
    for k in 0..=coeffs.max_level().min(system.levels()) {
        let level = &coeffs.levels[k];
        if level.is_empty() {
            continue;
        }
        let step = lattice_step(grid, k)?;
        let per_axis = (grid.points() / step) as i64;
        let weight = (-(k as f64) * n as f64 / 2.0).exp2() / cell;
        comb.iter_mut().for_each(|v| *v = Complex64::default());
        for (m, v) in level {
            let mut idx = [0usize; MAX_DIM];
            for i in 0..n {
                // Lattice points outside the window wrap periodically.
                let t = (m[i] + per_axis / 2).rem_euclid(per_axis);
                idx[i] = t as usize * step;
            }
            comb[grid.flat_index(&idx[..n])] += v * weight;
        }
        fft_in_place(&mut comb, grid, false, &mut scratch);
        let mult = system.synthesis_multiplier(k)?;
        for ((t, c), &w) in total.iter_mut().zip(&comb).zip(mult) {
            *t += c * w;
        }
    }
    let scale = 1.0 / grid.len() as f64;
    total.iter_mut().for_each(|v| *v *= scale);
    fft_in_place(&mut total, grid, true, &mut scratch);
    SampledField::from_values(grid, total, Domain::Space)
}

/// `‖T_ψ S_φ f - f‖_{L²} / ‖f‖_{L²}`; 0 for the zero field.
pub fn roundtrip_error(field: &SampledField, system: &SpectralSystem) -> Result<f64> {
    let coeffs = analyze(field, system)?;
    let back = synthesize(&coeffs, system, field.grid())?;
    let norm = field.l2_norm();
    if norm == 0.0 {
        return Ok(back.l2_norm());
    }
    let diff = back.try_add(&field.scaled(Complex64::new(-1.0, 0.0)))?;
    Ok(diff.l2_norm() / norm)
}
