//! The discrete Hardy inequality for geometric convolutions in `ℓ^q`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::herz::{ell_norm, Exponent};

/// `C(a, q) = (Σ_{i>=0} a^{i d})^{1/d} = (1 - a^d)^{-1/d}` with `d = min(1, q)`.
pub fn hardy_constant(a: f64, q: Exponent) -> Result<f64> {
    check_a(a)?;
    let d = q.get().min(1.0);
    Ok((1.0 - a.powf(d)).powf(-1.0 / d))
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!("need 0 < a < 1, got a = {a}")))
    }
}

/// `‖x‖_q` where `x_k = x_last · a^{k - last}` continues geometrically past
/// the last computed index; the tail is summed in closed form.
fn norm_with_tail(head: &[f64], a: f64, q: Exponent) -> f64 {
    let last = *head.last().unwrap();
    if !q.is_finite() || last == 0.0 {
        return ell_norm(head, q);
    }
    let qv = q.get();
    let tail = last.powf(qv) * a.powf(qv) / (1.0 - a.powf(qv));
    // Rescale as ell_norm does to keep large magnitudes finite.
    let top = head.iter().copied().fold(0.0, f64::max);
    let s: f64 = head.iter().map(|x| (x / top).powf(qv)).sum::<f64>() + tail / top.powf(qv);
    top * s.powf(1.0 / qv)
}

/// `max(‖δ‖_q, ‖η‖_q) / ‖ε‖_q` with `δ_k = Σ_{j<=k} a^{k-j} ε_j` and
/// `η_k = Σ_{j>=k} a^{j-k} ε_j`, for `ε` supported on `0..len`. Both
/// sequences are exact: their geometric tails outside `0..len` are summed in
/// closed form. Returns 0 for `ε ≡ 0`.
pub fn hardy_check(a: f64, q: Exponent, eps: &[f64]) -> Result<f64> {
    check_a(a)?;
    if let Some(i) = eps.iter().position(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::Inadmissible(format!("ε_{i} must be finite and nonnegative")));
    }
    let den = ell_norm(eps, q);
    if den == 0.0 {
        return Ok(0.0);
    }
    let mut delta = Vec::with_capacity(eps.len());
    let mut acc = 0.0;
    for &e in eps {
        acc = a * acc + e;
        delta.push(acc);
    }
    let mut eta = vec![0.0; eps.len()];
    let mut acc = 0.0;
    for (k, &e) in eps.iter().enumerate().rev() {
        acc = a * acc + e;
        eta[k] = acc;
    }
    // η_k for k < 0 continues as a^{-k} η_0: mirror it to reuse the tail sum.
    eta.reverse();
    let num = norm_with_tail(&delta, a, q).max(norm_with_tail(&eta, a, q));
    Ok(num / den)
}

/// Relative floating-point slack when comparing against `C(a, q)`. The bound
/// is attained by a single spike for `q <= 1`, so the two sides can differ
/// by rounding alone.
pub const HARDY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub a: f64,
    pub q: Exponent,
    pub max_ratio: f64,
    pub constant: f64,
    pub samples: usize,
}

impl HardyReport {
    pub fn within_bound(&self) -> bool {
        self.max_ratio <= self.constant * (1.0 + HARDY_SLACK)
    }
}

/// `hardy_check` over `samples` random sparse nonnegative sequences of
/// length `len`, each on its own ChaCha stream.
pub fn hardy_ensemble(a: f64, q: Exponent, samples: usize, len: usize, seed: u64) -> Result<HardyReport> {
    let constant = hardy_constant(a, q)?;
    if samples == 0 || len == 0 {
        return Err(Error::Empty("Hardy ensemble"));
    }
    let mut max_ratio: f64 = 0.0;
    for index in 0..samples as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let fill: f64 = rng.random_range(0.05..1.0);
        let eps: Vec<f64> = (0..len)
            .map(|_| if rng.random_bool(fill) { (1.0 - rng.random::<f64>()).powf(-0.5) } else { 0.0 })
            .collect();
        max_ratio = max_ratio.max(hardy_check(a, q, &eps)?);
    }
    Ok(HardyReport {
        a,
        q,
        max_ratio,
        constant,
        samples,
    })
}
