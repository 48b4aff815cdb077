//! Floating-point routes to the generalized Bell numbers.
//!
//! `bell_dobinski` evaluates the infinite Gamma-ratio series
//!
//! ```text
//! B_{r,1}(n) = (r−1)^{n−1}/e · Σ_{k≥0} Γ(n + c_k) / [k! Γ(1 + c_k)],
//! c_k = (k+1)/(r−1)                                         (r >= 2)
//! B_{1,1}(n) = (1/e) Σ_{k≥0} k^n / k!                       (r = 1)
//! ```
//!
//! whose every term is positive, so partial sums increase monotonically
//! towards the limit.  At n = 0 the series gives 1 for r = 1 and
//! (e−1)/e for every r >= 2.  `bell_hypergeom` provides the independent
//! confluent/generalized hypergeometric closed forms for r = 2, 3.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::bigreal::{ln_biguint, ratio_f64};
use crate::boson::{bell_exact_with, BellValues, Limits};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, pfq};
use crate::sum::sum_series;

/// Truncation policy shared by every infinite series in the crate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesConfig {
    /// Relative smallness threshold for accepting truncation.
    pub rel_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
    /// Number of successive below-threshold terms required to stop.
    pub consecutive_small: u32,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            rel_tol: 1e-13,
            max_terms: 10_000,
            consecutive_small: 3,
        }
    }
}

impl SeriesConfig {
    /// Default policy with a caller-chosen relative tolerance.
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        let cfg = SeriesConfig {
            rel_tol,
            ..SeriesConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::invalid(format!(
                "rel_tol must lie in (0, 1e-6], got {}",
                self.rel_tol
            )));
        }
        if self.max_terms < 10 {
            return Err(Error::invalid(format!(
                "max_terms must be >= 10, got {}",
                self.max_terms
            )));
        }
        if self.consecutive_small == 0 {
            return Err(Error::invalid("consecutive_small must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Generalized Bell number `B_{r,1}(n)` by the Dobiński-style series.
///
/// Accepts n = 0 (where the value is non-integer for r >= 2).
pub fn bell_dobinski(r: u32, n: u32, cfg: &SeriesConfig) -> Result<f64> {
    if r < 1 {
        return Err(Error::invalid("bell_dobinski requires r >= 1".to_string()));
    }
    let nf = n as f64;
    if r == 1 {
        // (1/e) Σ k^n / k!, with the k = 0 term equal to [n == 0].
        let eval = sum_series(cfg, "bell_dobinski r=1", |k| {
            if k == 0 {
                return if n == 0 { (-1.0f64).exp() } else { 0.0 };
            }
            let kf = k as f64;
            (nf * kf.ln() - ln_gamma(kf + 1.0) - 1.0).exp()
        })?;
        return Ok(eval.value);
    }
    let rm = (r - 1) as f64;
    let prefactor_ln = (nf - 1.0) * rm.ln() - 1.0;
    let eval = sum_series(cfg, "bell_dobinski", |k| {
        let ck = (k as f64 + 1.0) / rm;
        (prefactor_ln + ln_gamma(nf + ck) - ln_gamma(1.0 + ck) - ln_gamma(k as f64 + 1.0)).exp()
    })?;
    Ok(eval.value)
}

/// Closed hypergeometric forms for `B_{r,1}(n)`, available at r = 2, 3:
///
/// ```text
/// B_{2,1}(n) = (n!/e) ₁F₁(n+1; 2; 1)
/// B_{3,1}(n) = (2^{n−1}/e) [ 2Γ(n+½)/√π ₁F₂(n+½; ½, 3⁄2; ¼)
///                            + n! ₁F₂(n+1; 3⁄2, 2; ¼) ]
/// ```
pub fn bell_hypergeom(r: u32, n: u32, cfg: &SeriesConfig) -> Result<f64> {
    let nf = n as f64;
    match r {
        2 => {
            let factor = (ln_gamma(nf + 1.0) - 1.0).exp();
            Ok(factor * pfq(&[nf + 1.0], &[2.0], 1.0, cfg)?)
        }
        3 => {
            let sqrt_pi = std::f64::consts::PI.sqrt();
            let even = 2.0 * (ln_gamma(nf + 0.5)).exp() / sqrt_pi
                * pfq(&[nf + 0.5], &[0.5, 1.5], 0.25, cfg)?;
            let odd = (ln_gamma(nf + 1.0)).exp() * pfq(&[nf + 1.0], &[1.5, 2.0], 0.25, cfg)?;
            Ok(2.0f64.powi(n as i32 - 1) / std::f64::consts::E * (even + odd))
        }
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// The sequence `ρ_p(n) = B_{r,1}(n + p)` held both exactly and as reals.
///
/// For p = 0 the n = 0 entry uses the deformed-oscillator convention
/// `[0]! = 1` (the Dobiński value B_{r,1}(0) = (e−1)/e is not an integer
/// for r >= 2 and belongs to the measure side, not to the state labels).
#[derive(Clone, Debug)]
pub struct RhoSequence {
    r: u32,
    p: u32,
    exact: Vec<BigUint>,
    real: Vec<f64>,
    ln_real: Vec<f64>,
}

impl RhoSequence {
    /// Build `len` values ρ_p(0..len).
    pub fn build(r: u32, p: u32, len: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::invalid("rho sequence requires r >= 1".to_string()));
        }
        if len == 0 {
            return Err(Error::invalid("rho sequence length must be >= 1".to_string()));
        }
        let bell_count = len - 1 + p as usize;
        let mut bells: Vec<BigUint> = Vec::with_capacity(bell_count);
        if bell_count > 0 {
            bells.extend(BellValues::new(r, 1)?.take(bell_count));
        }
        let mut exact = Vec::with_capacity(len);
        for n in 0..len {
            let idx = n + p as usize;
            if idx == 0 {
                exact.push(BigUint::one());
            } else {
                exact.push(bells[idx - 1].clone());
            }
        }
        let real: Vec<f64> = exact
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        let ln_real: Vec<f64> = exact.iter().map(ln_biguint).collect();
        Ok(RhoSequence {
            r,
            p,
            exact,
            real,
            ln_real,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn exact(&self, n: usize) -> &BigUint {
        &self.exact[n]
    }

    pub fn real(&self, n: usize) -> f64 {
        self.real[n]
    }

    pub fn ln(&self, n: usize) -> f64 {
        self.ln_real[n]
    }

    /// `[n] = ρ(n)/ρ(n−1)` as an exact big-integer ratio rounded once.
    pub fn ratio(&self, n: usize) -> f64 {
        assert!(n >= 1 && n < self.exact.len(), "ratio index {n} out of range");
        ratio_f64(&self.exact[n], &self.exact[n - 1])
    }
}

/// `ρ_p(n) = B_{r,1}(n+p)` as an exact integer; requires n + p >= 1.
///
/// Desk-scale guard: n + p is bounded by the default table limit.
pub fn rho(r: u32, p: u32, n: u32) -> Result<BigUint> {
    if n + p < 1 {
        return Err(Error::invalid(
            "rho(r, p, n) requires n + p >= 1; the (0,0) value is convention-dependent"
                .to_string(),
        ));
    }
    bell_exact_with(r, 1, n + p, &Limits::default())
}

/// Box function `[n] = B_{r,1}(n+1)/B_{r,1}(n)` for n >= 1.
///
/// The n = 0 value is not exposed: the natural extension would divide by
/// the non-integer B_{r,1}(0) while the oscillator convention fixes
/// [0] = 1, so callers choose explicitly via `RhoSequence::ratio`.
pub fn box_ratio(r: u32, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("box_ratio requires n >= 1".to_string()));
    }
    let num = bell_exact_with(r, 1, n + 1, &Limits::default())?;
    let den = bell_exact_with(r, 1, n, &Limits::default())?;
    Ok(ratio_f64(&num, &den))
}
