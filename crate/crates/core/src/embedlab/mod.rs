//! Numerical checks of the embedding theorems.
//!
//! An [`EmbeddingSpec`] pairs a source and a target parameter set with the
//! [`Theorem`] that is supposed to connect them. Every check first verifies
//! the theorem's hypotheses and refuses with [`Error::Hypothesis`], naming the
//! failed condition, unless the spec is flagged as a necessity control (in
//! which case only the smoothness balance is waived).

mod dilation;
mod ensemble;
mod hardy;

pub use dilation::{dilation_scan, herz_dilation_scan, necessity_fit, ppn_check, ppn_exponent, DilationReport, NecessityReport, PpnReport};
pub use ensemble::{
    draw_coefficients, level_sweep, seq_embedding_check, EnsembleConfig, EnsembleReport, SweepReport,
};
pub use hardy::{hardy_check, hardy_constant, hardy_ensemble, HardyReport, HARDY_SLACK};

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::herz::HerzParams;
use crate::spaces::{Family, SpaceParams};

/// Tolerance for the smoothness-balance equalities.
pub const BALANCE_TOL: f64 = 1e-12;

/// The theorem a spec claims, which fixes its hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Source and target coincide; every ratio is 1.
    Identity,
    /// `Ė_q^{α₂,r} f^{s₂}_θ ↪ Ė_p^{α₁,r} f^{s₁}_β`, `α₂ >= α₁`.
    Sobolev,
    /// `Ė_q^{α₂,r₂} f^{s₂}_θ ↪ Ė_p^{α₁,r₁} b^{s₁}_{r₂,n}`, `α₂ > α₁`.
    Jawerth1,
    /// `Ė_q^{α,r} f^{s₂}_θ ↪ Ė_p^{α,r} b^{s₁}_{max(r_n, q_n)}`.
    Jawerth2,
    /// `Ė_q^{α₂,r} b^{s₂}_{r_n} ↪ Ė_p^{α₁,r} f^{s₁}_θ`, `α₂ > α₁`.
    Franke1,
    /// `Ė_q^{α,r} b^{s₂}_δ ↪ Ė_p^{α,r} f^{s₁}_θ`, `δ = min(r_n, p_n)`.
    Franke2,
    /// Function-space Besov embedding `Ė_q^{α₂,θ} B^{s₂}_β ↪ Ė_p^{α₁,r} B^{s₁}_β`
    /// under the inequality `s₁ - 1/p - α₁ <= s₂ - 1/q - α₂`.
    BesovSobolev,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::Identity,
        Theorem::Sobolev,
        Theorem::Jawerth1,
        Theorem::Jawerth2,
        Theorem::Franke1,
        Theorem::Franke2,
        Theorem::BesovSobolev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Identity => "identity",
            Theorem::Sobolev => "sobolev",
            Theorem::Jawerth1 => "jawerth1",
            Theorem::Jawerth2 => "jawerth2",
            Theorem::Franke1 => "franke1",
            Theorem::Franke2 => "franke2",
            Theorem::BesovSobolev => "besov-sobolev",
        }
    }

    /// Families `(source, target)` the theorem is stated for.
    pub fn families(self) -> Option<(Family, Family)> {
        match self {
            Theorem::Identity => None,
            Theorem::Sobolev => Some((Family::F, Family::F)),
            Theorem::Jawerth1 | Theorem::Jawerth2 => Some((Family::F, Family::B)),
            Theorem::Franke1 | Theorem::Franke2 => Some((Family::B, Family::F)),
            Theorem::BesovSobolev => Some((Family::B, Family::B)),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown theorem {s:?}")))
    }
}

/// A claimed embedding `source ↪ target`.
///
/// Naming follows the theorems: the target carries `(p⃗, α⃗₁, s₁)`, the source
/// `(q⃗, α⃗₂, s₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpec {
    theorem: Theorem,
    source: SpaceParams,
    target: SpaceParams,
    control: bool,
}

fn hyp(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Hypothesis(msg()))
    }
}

impl EmbeddingSpec {
    pub fn new(theorem: Theorem, source: SpaceParams, target: SpaceParams) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::ShapeMismatch(format!(
                "source is {}-dimensional, target {}-dimensional",
                source.n(),
                target.n()
            )));
        }
        Ok(Self {
            theorem,
            source,
            target,
            control: false,
        })
    }

    /// Marks the spec as a necessity control: the smoothness balance is not
    /// enforced, every other hypothesis still is.
    pub fn as_control(mut self) -> Self {
        self.control = true;
        self
    }

    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    pub fn source(&self) -> &SpaceParams {
        &self.source
    }

    pub fn target(&self) -> &SpaceParams {
        &self.target
    }

    pub fn is_control(&self) -> bool {
        self.control
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    /// `s₁ - 1/p - α₁` (target side).
    pub fn target_balance(&self) -> f64 {
        balance(&self.target)
    }

    /// `s₂ - 1/q - α₂` (source side).
    pub fn source_balance(&self) -> f64 {
        balance(&self.source)
    }

    /// `s₁ - s₂ - α₁ + α₂ - 1/p + 1/q`: the exponent with which
    /// `‖f_N‖_target / ‖f_N‖_source` grows along the dilation family.
    pub fn necessity_exponent(&self) -> f64 {
        self.target_balance() - self.source_balance()
    }

    /// Sign of `target_balance - source_balance`, with equality up to
    /// [`BALANCE_TOL`].
    pub fn classify_balance(&self) -> Ordering {
        let c = self.necessity_exponent();
        if c.abs() <= BALANCE_TOL {
            Ordering::Equal
        } else if c < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// `s₂^v = s₂ - 1/q_v + 1/p_v - α₁,v + α₂,v`, sums over axes `v..n`
    /// (`v` counted from 1).
    pub fn shifted_smoothness(&self, v: usize) -> Result<f64> {
        let n = self.n();
        if v == 0 || v > n {
            return Err(Error::InvalidAxis { axis: v, n });
        }
        let (src, tgt) = (self.source.herz(), self.target.herz());
        let tail = |h: &HerzParams| -> (f64, f64) {
            (
                h.p()[v - 1..].iter().map(|p| p.recip()).sum(),
                h.alpha()[v - 1..].iter().sum(),
            )
        };
        let (inv_q, a2) = tail(src);
        let (inv_p, a1) = tail(tgt);
        Ok(self.source.s() - inv_q + inv_p - a1 + a2)
    }

    /// Per-axis source outer index required by the Besov embedding: equal to
    /// the target's `r_i` where `α₂_i = α₁_i`, free otherwise.
    pub fn theta_rule(&self) -> Vec<Option<f64>> {
        let (src, tgt) = (self.source.herz(), self.target.herz());
        (0..self.n())
            .map(|i| (src.alpha()[i] == tgt.alpha()[i]).then(|| tgt.q()[i].get()))
            .collect()
    }

    /// Jawerth target fine index: `r_n` of the source (first theorem), or
    /// `max(r_n, q_n)` (second).
    pub fn jawerth_index(&self) -> f64 {
        let src = self.source.herz();
        let n = self.n();
        let r = src.q()[n - 1].get();
        match self.theorem {
            Theorem::Jawerth2 => r.max(src.p()[n - 1].get()),
            _ => r,
        }
    }

    /// Franke source fine index: `r_n` (first theorem) or `δ`, which is `r_n`
    /// when `r_n <= p_n` and `p_n` otherwise (second).
    pub fn franke_index(&self) -> f64 {
        let n = self.n();
        let r = self.source.herz().q()[n - 1].get();
        let p = self.target.herz().p()[n - 1].get();
        match self.theorem {
            Theorem::Franke2 if r > p => p,
            _ => r,
        }
    }

    /// Verifies every hypothesis of the claimed theorem.
    pub fn check_hypotheses(&self) -> Result<()> {
        let (src, tgt) = (&self.source, &self.target);
        if self.theorem == Theorem::Identity {
            return hyp(src == tgt, || "identity spec needs source = target".into());
        }
        let (fs, ft) = self.theorem.families().unwrap();
        hyp(src.family() == fs && tgt.family() == ft, || {
            format!(
                "{} relates {fs:?} to {ft:?}, got {:?} to {:?}",
                self.theorem,
                src.family(),
                tgt.family()
            )
        })?;
        let (hs, ht) = (src.herz(), tgt.herz());
        let name = self.theorem;
        let n = self.n();
        for i in 0..n {
            let (q, p) = (hs.p()[i].get(), ht.p()[i].get());
            let (a2, a1) = (hs.alpha()[i], ht.alpha()[i]);
            if name == Theorem::BesovSobolev {
                hyp(q <= p, || format!("axis {i}: need q <= p, got q = {q}, p = {p}"))?;
            } else {
                hyp(q < p && p.is_finite(), || {
                    format!("axis {i}: need q < p < ∞, got q = {q}, p = {p}")
                })?;
            }
            hyp(a1 > -1.0 / p, || format!("axis {i}: need α₁ > -1/p, got α₁ = {a1}, p = {p}"))?;
            match name {
                Theorem::Sobolev | Theorem::BesovSobolev => {
                    hyp(a2 >= a1, || format!("axis {i}: need α₂ >= α₁, got α₂ = {a2}, α₁ = {a1}"))?
                }
                Theorem::Jawerth1 | Theorem::Franke1 => {
                    hyp(a2 > a1, || format!("axis {i}: need α₂ > α₁, got α₂ = {a2}, α₁ = {a1}"))?
                }
                Theorem::Jawerth2 | Theorem::Franke2 => {
                    hyp(a2 == a1, || format!("axis {i}: need α₂ = α₁, got α₂ = {a2}, α₁ = {a1}"))?
                }
                Theorem::Identity => unreachable!(),
            }
            let (rs, rt) = (hs.q()[i], ht.q()[i]);
            let same_r = || format!("axis {i}: need equal outer indices r, got {rs} and {rt}");
            match name {
                Theorem::Sobolev | Theorem::Jawerth2 | Theorem::Franke1 | Theorem::Franke2 => {
                    hyp(rs == rt, same_r)?
                }
                Theorem::BesovSobolev if a2 == a1 => hyp(rs == rt, || {
                    format!("axis {i}: α₂ = α₁ forces θ = r, got θ = {rs}, r = {rt}")
                })?,
                _ => {}
            }
        }
        match name {
            Theorem::Jawerth1 | Theorem::Jawerth2 => {
                let want = self.jawerth_index();
                hyp(tgt.beta().get() == want, || {
                    format!("{name}: target fine index must be {want}, got {}", tgt.beta())
                })?;
            }
            Theorem::Franke1 | Theorem::Franke2 => {
                let want = self.franke_index();
                hyp(src.beta().get() == want, || {
                    format!("{name}: source fine index must be {want}, got {}", src.beta())
                })?;
            }
            Theorem::BesovSobolev => hyp(src.beta() == tgt.beta(), || {
                format!("{name}: fine indices must agree, got {} and {}", src.beta(), tgt.beta())
            })?,
            _ => {}
        }
        if self.control {
            return Ok(());
        }
        let (l, r) = (self.target_balance(), self.source_balance());
        match name {
            Theorem::BesovSobolev => hyp(self.classify_balance() != Ordering::Greater, || {
                format!("balance: need s₁ - 1/p - α₁ <= s₂ - 1/q - α₂, got {l} > {r}")
            }),
            _ => hyp(self.classify_balance() == Ordering::Equal, || {
                format!("balance: need s₁ - 1/p - α₁ = s₂ - 1/q - α₂, got {l} and {r}")
            }),
        }
    }
}

fn balance(p: &SpaceParams) -> f64 {
    p.s() - p.herz().inv_p_bold() - p.herz().alpha_bold()
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch("fit abscissae and ordinates differ in length".into()));
    }
    if xs.len() < 2 {
        return Err(Error::Empty("least-squares fit (fewer than two points)"));
    }
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Inadmissible("fit abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herz::Exponent;

    pub(super) fn space(family: Family, s: f64, p: f64, alpha: f64, q: f64, beta: f64) -> SpaceParams {
        SpaceParams::new(
            HerzParams::uniform(1, p, alpha, q).unwrap(),
            s,
            Exponent::new(beta).unwrap(),
            family,
        )
        .unwrap()
    }

    #[test]
    fn fit_recovers_lines() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| -1.5 * x + 0.25).collect();
        let fit = ols(&xs, &ys).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-15 && (fit.intercept - 0.25).abs() < 1e-15);
        assert!(ols(&[1.0], &[1.0]).is_err());
        assert!(ols(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn conforming_specs_pass() {
        let cases = [
            (Theorem::Sobolev, space(Family::F, 0.0, 1.0, 0.0, 2.0, 2.0), space(Family::F, -0.5, 2.0, 0.0, 2.0, 2.0)),
            (Theorem::Jawerth1, space(Family::F, 0.0, 1.0, 0.5, 2.0, 2.0), space(Family::B, -1.0, 2.0, 0.0, 2.0, 2.0)),
            (Theorem::Jawerth2, space(Family::F, 0.0, 1.0, 0.0, 2.0, 2.0), space(Family::B, -0.5, 2.0, 0.0, 2.0, 2.0)),
            (Theorem::Franke1, space(Family::B, 0.0, 1.0, 0.5, 2.0, 2.0), space(Family::F, -1.0, 2.0, 0.0, 2.0, 2.0)),
            (Theorem::Franke2, space(Family::B, 0.0, 1.0, 0.0, 2.0, 2.0), space(Family::F, -0.5, 2.0, 0.0, 2.0, 2.0)),
            (Theorem::BesovSobolev, space(Family::B, 0.0, 1.0, 0.0, 2.0, 2.0), space(Family::B, -0.75, 2.0, 0.0, 2.0, 2.0)),
        ];
        for (t, s, g) in cases {
            let spec = EmbeddingSpec::new(t, s, g).unwrap();
            spec.check_hypotheses().unwrap_or_else(|e| panic!("{t}: {e}"));
        }
    }

    #[test]
    fn refusals_name_the_condition() {
        let src = space(Family::F, 0.0, 1.0, 0.0, 2.0, 2.0);
        let broken = src.with_s(-0.25).unwrap();
        let tgt = space(Family::F, -0.5, 2.0, 0.0, 2.0, 2.0);
        let spec = EmbeddingSpec::new(Theorem::Sobolev, broken, tgt.clone()).unwrap();
        let err = spec.check_hypotheses().unwrap_err().to_string();
        assert!(err.contains("balance"), "{err}");
        assert!(spec.clone().as_control().check_hypotheses().is_ok());
        assert!((spec.necessity_exponent() - 0.25).abs() < 1e-15);

        // q < p fails.
        let spec = EmbeddingSpec::new(Theorem::Sobolev, tgt.clone(), src.clone()).unwrap();
        assert!(spec.check_hypotheses().unwrap_err().to_string().contains("q < p"));
        // Jawerth1 needs α₂ > α₁ strictly.
        let spec = EmbeddingSpec::new(Theorem::Jawerth1, src.clone(), space(Family::B, -0.5, 2.0, 0.0, 2.0, 2.0)).unwrap();
        assert!(spec.check_hypotheses().unwrap_err().to_string().contains("α₂ > α₁"));
        // Jawerth2 fine index max(r_n, q_n) = 2.
        let spec = EmbeddingSpec::new(Theorem::Jawerth2, src.clone(), space(Family::B, -0.5, 2.0, 0.0, 2.0, 1.0)).unwrap();
        assert!(spec.check_hypotheses().unwrap_err().to_string().contains("fine index"));
        // Wrong families.
        let spec = EmbeddingSpec::new(Theorem::Franke1, src, tgt).unwrap();
        assert!(spec.check_hypotheses().unwrap_err().to_string().contains("relates"));
    }

    #[test]
    fn derived_exponents() {
        let h2 = HerzParams::new(
            vec![Exponent::new(1.0).unwrap(), Exponent::new(2.0).unwrap()],
            vec![0.5, 0.25],
            vec![Exponent::new(2.0).unwrap(); 2],
        )
        .unwrap();
        let h1 = HerzParams::new(
            vec![Exponent::new(2.0).unwrap(), Exponent::new(4.0).unwrap()],
            vec![0.0, 0.25],
            vec![Exponent::new(2.0).unwrap(), Exponent::new(3.0).unwrap()],
        )
        .unwrap();
        let two = Exponent::new(2.0).unwrap();
        let src = SpaceParams::new(h2, 1.0, two, Family::B).unwrap();
        let tgt = SpaceParams::new(h1, 0.0, two, Family::B).unwrap();
        let spec = EmbeddingSpec::new(Theorem::BesovSobolev, src, tgt).unwrap();
        // s₂ - (1 + 1/2) + (1/2 + 1/4) - 1/4 + 3/4 = 1 - 0.25
        assert!((spec.shifted_smoothness(1).unwrap() - 0.75).abs() < 1e-15);
        // axis 2 only: 1 - 1/2 + 1/4 - 1/4 + 1/4
        assert!((spec.shifted_smoothness(2).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(spec.theta_rule(), vec![None, Some(3.0)]);
        // θ₂ must equal r₂ = 3 where α agrees.
        assert!(spec.check_hypotheses().unwrap_err().to_string().contains("θ = r"));
        assert_eq!("jawerth2".parse::<Theorem>().unwrap(), Theorem::Jawerth2);
    }
}
