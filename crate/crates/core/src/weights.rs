//! Stieltjes measures whose moments reproduce the B_{r,1} sequences.
//!
//! For r >= 2 the measure is a continuous density on [0, ∞),
//!
//! ```text
//! W_{r,1}(x) = e^{-x/(r-1) - 1}/(r-1) Σ_k (x/(r-1))^{c_k} / (k! Γ(1+c_k)),
//! c_k = (k+1)/(r-1),
//! ```
//!
//! with ∫ xⁿ W_{r,1}(x) dx = B_{r,1}(n+1).  For r = 1 the measure is a
//! Dirac comb on the positive integers with strength e⁻¹/(k-1)! at x = k.
//! The p-shifted family ρ(n) = B(n+p) is resolved by the density
//! x^{p-1} W_{r,1}(x), so every moment here is ∫ x^{n+p-1} W dx.
//!
//! Moments are computed by composite Gauss–Legendre quadrature with the
//! first panel mapped through x = u^{r-1}, which turns every fractional
//! power x^{c_k} into an integer power of u and leaves an analytic
//! integrand at the origin.  An exponential envelope fitted on the outer
//! nodes certifies the truncated tail.

use std::f64::consts::PI;

use crate::coherent::{normalization, CoherentFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::sequences::SeriesConfig;
use crate::special::ln_gamma;
use crate::sum::{sum_series, CompensatedSum};

/// Whether a weight is a density or a point measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// Dirac comb on the positive integers (r = 1).
    Discrete,
    /// Density on [0, ∞) (r >= 2).
    Continuous,
}

/// Identifies the measure for the family ρ(n) = B_{r,1}(n+p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightSpec {
    pub r: u32,
    pub p: u32,
}

impl WeightSpec {
    pub fn new(r: u32, p: u32) -> Result<Self> {
        if r < 1 || r > 8 {
            return Err(Error::invalid(format!(
                "weight order r must be in 1..=8, got {r}"
            )));
        }
        if p > 12 {
            return Err(Error::invalid(format!("weight shift p <= 12, got {p}")));
        }
        Ok(WeightSpec { r, p })
    }

    pub fn kind(&self) -> MeasureKind {
        if self.r == 1 {
            MeasureKind::Discrete
        } else {
            MeasureKind::Continuous
        }
    }
}

/// Quadrature controls for continuous moments.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Upper integration limit; `None` picks 40(r-1) + 20(n+p).
    pub x_max: Option<f64>,
    /// Number of equal panels; `None` picks max(16, x_max/4).
    pub panels: Option<usize>,
    /// Gauss–Legendre points per panel.
    pub points_per_panel: usize,
    /// Certified-tail budget relative to the accumulated integral.
    pub tail_rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            x_max: None,
            panels: None,
            points_per_panel: 32,
            tail_rel_tol: 1e-9,
        }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<()> {
        if let Some(x) = self.x_max {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::invalid(format!("x_max must be positive, got {x}")));
            }
        }
        if let Some(p) = self.panels {
            if p < 2 {
                return Err(Error::invalid("need at least 2 panels".to_string()));
            }
        }
        if self.points_per_panel < 4 || self.points_per_panel > 128 {
            return Err(Error::invalid(format!(
                "points_per_panel must be in 4..=128, got {}",
                self.points_per_panel
            )));
        }
        if !(self.tail_rel_tol > 0.0 && self.tail_rel_tol <= 1e-3) {
            return Err(Error::invalid(format!(
                "tail_rel_tol must be in (0, 1e-3], got {}",
                self.tail_rel_tol
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// nodes ascending.  Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "rule needs at least 2 points");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (n + 1) / 2;
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..64 {
            let (p, d) = legendre_with_derivative(n, x);
            deriv = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                let (p2, d2) = legendre_with_derivative(n, x);
                deriv = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[half - 1] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    let d = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, d)
}

fn check_continuous_order(r: u32) -> Result<f64> {
    if r < 2 {
        return Err(Error::invalid(
            "r = 1 carries a discrete measure; use the Dirac-comb ops".to_string(),
        ));
    }
    if r > 8 {
        return Err(Error::invalid(format!("weight order r <= 8, got {r}")));
    }
    Ok((r - 1) as f64)
}

/// W_{r,1}(x) from its defining series (any r in 2..=8).
pub fn weight_series(r: u32, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let rm1 = check_continuous_order(r)?;
    cfg.validate()?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("weight needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let xs = x / rm1;
    let ln_xs = xs.ln();
    let base = -xs - 1.0 - rm1.ln();
    let eval = sum_series(cfg, "weight series", |k| {
        let ck = (k as f64 + 1.0) / rm1;
        (base + ck * ln_xs - ln_gamma(k as f64 + 1.0) - ln_gamma(1.0 + ck)).exp()
    })?;
    Ok(eval.value)
}

/// W_{r,1}(x) in closed form (r in {2, 3, 4} only).
///
/// r = 2 reduces to a scaled Bessel I₁, r = 3 to a pair of ₀F₂ values
/// and r = 4 to three ₀F₃ values, one per residue class of the series
/// index modulo r-1.
pub fn weight_closed(r: u32, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("weight needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    match r {
        2 => {
            // e^{-x-1} √x I₁(2√x), evaluated with the scaled Bessel so
            // the exponent never overflows: √x e^{-(√x-1)²} [e^{-y}I₁(y)].
            let s = x.sqrt();
            let scaled = crate::special::bessel_i_scaled(1.0, 2.0 * s, cfg)?;
            Ok(s * (-(s - 1.0) * (s - 1.0)).exp() * scaled)
        }
        3 => {
            let h = (x / 2.0).sqrt();
            let even = crate::special::pfq(&[], &[0.5, 1.5], x / 8.0, cfg)?;
            let odd = crate::special::pfq(&[], &[1.5, 2.0], x / 8.0, cfg)?;
            Ok(0.5 * h * (-x / 2.0 - 1.0).exp() * (2.0 / PI.sqrt() * even + h * odd))
        }
        4 => {
            let w = x / 81.0;
            let f0 = crate::special::pfq(&[], &[1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0], w, cfg)?;
            let f1 = crate::special::pfq(&[], &[2.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0], w, cfg)?;
            let f2 = crate::special::pfq(&[], &[4.0 / 3.0, 5.0 / 3.0, 2.0], w, cfg)?;
            let third = x / 3.0;
            let g43 = ln_gamma(4.0 / 3.0).exp();
            let g53 = ln_gamma(5.0 / 3.0).exp();
            Ok((-third - 1.0).exp() / 3.0
                * (third.powf(1.0 / 3.0) / g43 * f0
                    + third.powf(2.0 / 3.0) / g53 * f1
                    + third / 2.0 * f2))
        }
        other => Err(Error::UnsupportedOrder(other)),
    }
}

/// Strength e⁻¹/(k-1)! of the r = 1 comb at x = k (k >= 1).
pub fn dirac_comb_strength(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("comb support starts at k = 1".to_string()));
    }
    Ok((-1.0 - ln_gamma(k as f64)).exp())
}

/// n-th moment of the r = 1 comb: e⁻¹ Σ_{k>=1} kⁿ/(k-1)! = B_{1,1}(n+1).
pub fn dirac_comb_moment(n: u32, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    let eval = sum_series(cfg, "comb moment", |j| {
        let k = j as f64 + 1.0;
        (n as f64 * k.ln() - 1.0 - ln_gamma(k)).exp()
    })?;
    Ok(eval.value)
}

/// ∫ xⁿ dμ_p(x) where dμ_p = x^{p-1} W_{r,1} dx (or the shifted comb).
///
/// Equals B_{r,1}(n+p) for n+p >= 1 and (e-1)/e for n = p = 0.  The
/// continuous branch integrates the series form by panelled quadrature
/// and fails with [`Error::TailBound`] if the certified tail exceeds
/// `tail_rel_tol` relative to the result.
pub fn moment(
    spec: &WeightSpec,
    n: u32,
    qcfg: &QuadratureConfig,
    scfg: &SeriesConfig,
) -> Result<f64> {
    qcfg.validate()?;
    scfg.validate()?;
    let q = n as i64 + spec.p as i64 - 1;
    if spec.kind() == MeasureKind::Discrete {
        let eval = sum_series(scfg, "comb moment", |j| {
            let k = j as f64 + 1.0;
            (q as f64 * k.ln() - 1.0 - ln_gamma(k)).exp()
        })?;
        return Ok(eval.value);
    }
    let rm1 = (spec.r - 1) as f64;
    let x_max = qcfg
        .x_max
        .unwrap_or(40.0 * rm1 + 20.0 * (n + spec.p) as f64);
    let panels = qcfg
        .panels
        .unwrap_or_else(|| ((x_max / 4.0).ceil() as usize).max(16));
    let (gl_x, gl_w) = gauss_legendre_rule(qcfg.points_per_panel);
    let h = x_max / panels as f64;
    // Envelope scale for the tail bound: W(x) <= C e^{-x/a} beyond x_max.
    let a = 2.0 * rm1;
    let mut env_c = 0.0f64;
    let mut total = CompensatedSum::new();
    let mut accumulate = |x: f64, weight: f64, env_c: &mut f64| -> Result<()> {
        let w = weight_series(spec.r, x, scfg)?;
        total.add(weight * powi64(x, q) * w);
        if x >= 0.5 * x_max {
            *env_c = env_c.max(w * (x / a).exp());
        }
        Ok(())
    };
    // First panel through x = u^{r-1}: the integrand becomes analytic at 0.
    let u_hi = h.powf(1.0 / rm1);
    let e = (spec.r - 1) as i32;
    for (xi, wi) in gl_x.iter().zip(&gl_w) {
        let u = 0.5 * u_hi * (xi + 1.0);
        let x = u.powi(e);
        let jac = 0.5 * u_hi * rm1 * u.powi(e - 1);
        accumulate(x, wi * jac, &mut env_c)?;
    }
    for panel in 1..panels {
        let x0 = panel as f64 * h;
        for (xi, wi) in gl_x.iter().zip(&gl_w) {
            let x = x0 + 0.5 * h * (xi + 1.0);
            accumulate(x, wi * 0.5 * h, &mut env_c)?;
        }
    }
    let value = total.value();
    // Tail: 2C ∫_{x_max}^∞ x^q e^{-x/a} dx, incomplete gamma in closed form.
    let s = x_max / a;
    let tail = if q < 0 {
        2.0 * env_c * (a / x_max) * (-s).exp()
    } else {
        2.0 * env_c * a.powi(q as i32 + 1) * upper_gamma_integer(q as u32, s)
    };
    if tail > qcfg.tail_rel_tol * value.max(f64::MIN_POSITIVE) {
        return Err(Error::TailBound(format!(
            "certified tail {tail:.3e} exceeds {:.1e} of the integral {value:.6e}; \
             raise x_max (currently {x_max})",
            qcfg.tail_rel_tol
        )));
    }
    Ok(value)
}

/// Γ(q+1, s) = q! e^{-s} Σ_{j<=q} s^j/j! for integer q >= 0.
fn upper_gamma_integer(q: u32, s: f64) -> f64 {
    let mut inner = CompensatedSum::new();
    let mut term = 1.0;
    inner.add(term);
    for j in 1..=q {
        term *= s / j as f64;
        inner.add(term);
    }
    let mut q_fact = 1.0;
    for j in 2..=q {
        q_fact *= j as f64;
    }
    q_fact * (-s).exp() * inner.value()
}

fn powi64(x: f64, q: i64) -> f64 {
    x.powi(q as i32)
}

/// Husimi-style radial density W̃(x) = N(x) x^{p-1} W_{r,1}(x) / π for the
/// continuous families; integrating W̃ against dφ dx over the plane in
/// polar form resolves the identity.
pub fn weight_tilde(
    spec: &WeightSpec,
    x: f64,
    family: &CoherentFamily,
    cfg: &SeriesConfig,
) -> Result<f64> {
    if spec.kind() != MeasureKind::Continuous {
        return Err(Error::invalid(
            "weight_tilde is defined for the continuous (r >= 2) measures".to_string(),
        ));
    }
    if family.kind() != (FamilyKind::Bell { r: spec.r, p: spec.p }) {
        return Err(Error::invalid(format!(
            "family {:?} does not match weight spec (r = {}, p = {})",
            family.kind(),
            spec.r,
            spec.p
        )));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!(
            "weight_tilde needs x > 0, got {x}"
        )));
    }
    let w = weight_series(spec.r, x, cfg)?;
    let norm = normalization(family, x, 0, cfg)?;
    Ok(norm * powi64(x, spec.p as i64 - 1) * w / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boson::bell_exact;
    use crate::coherent::FamilyOptions;
    use approx::assert_relative_eq;
    use num_traits::ToPrimitive;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_rule(8);
        assert_eq!(x.len(), 8);
        for k in 0..16usize {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert_relative_eq!(got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn gauss_rule_weights_sum_to_two() {
        for n in [4usize, 15, 32, 64] {
            let (x, w) = gauss_legendre_rule(n);
            let s: f64 = w.iter().sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-12);
            assert!(x.windows(2).all(|p| p[0] < p[1]), "nodes not ascending");
        }
    }

    #[test]
    fn series_small_x_matches_leading_terms() {
        // W_{2,1}(x) = e^{-x-1} Σ x^{k+1}/(k!(k+1)!) near 0.
        let x = 0.01f64;
        let leading =
            (-x - 1.0).exp() * (x + x * x / 2.0 + x * x * x / 12.0 + x * x * x * x / 144.0);
        let w = weight_series(2, x, &cfg()).unwrap();
        assert_relative_eq!(w, leading, max_relative = 1e-9);
    }

    #[test]
    fn series_matches_closed_forms() {
        for r in [2u32, 3, 4] {
            for &x in &[0.01, 0.1, 1.0, 5.0, 10.0, 25.0] {
                let series = weight_series(r, x, &cfg()).unwrap();
                let closed = weight_closed(r, x, &cfg()).unwrap();
                assert_relative_eq!(series, closed, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn closed_form_r2_matches_unscaled_bessel() {
        let x = 4.0f64;
        let direct =
            (-x - 1.0).exp() * x.sqrt() * crate::special::bessel_i(1.0, 2.0 * x.sqrt(), &cfg()).unwrap();
        assert_relative_eq!(weight_closed(2, x, &cfg()).unwrap(), direct, max_relative = 1e-12);
    }

    #[test]
    fn weight_vanishes_at_origin() {
        for r in [2u32, 3, 4] {
            assert_eq!(weight_series(r, 0.0, &cfg()).unwrap(), 0.0);
            assert_eq!(weight_closed(r, 0.0, &cfg()).unwrap(), 0.0);
        }
    }

    #[test]
    fn comb_moments_are_bell_numbers() {
        // e⁻¹ Σ kⁿ/(k-1)! = B_{1,1}(n+1): 1, 2, 5, 15, 52, 203.
        let want = [1.0, 2.0, 5.0, 15.0, 52.0, 203.0];
        for (n, w) in want.iter().enumerate() {
            let got = dirac_comb_moment(n as u32, &cfg()).unwrap();
            assert_relative_eq!(got, *w, max_relative = 1e-12);
        }
    }

    #[test]
    fn comb_strengths_sum_to_one() {
        let mut s = 0.0;
        for k in 1..40 {
            s += dirac_comb_strength(k).unwrap();
        }
        assert_relative_eq!(s, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn continuous_moments_match_exact_bell_numbers() {
        let qcfg = QuadratureConfig::default();
        for r in [2u32, 3] {
            let spec = WeightSpec::new(r, 1).unwrap();
            for n in 0..=4u32 {
                let want = bell_exact(r, 1, n + 1).unwrap().to_f64().unwrap();
                let got = moment(&spec, n, &qcfg, &cfg()).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn zeroth_moment_of_unshifted_measure() {
        // p = 0: ∫ x⁻¹ W dx = (e-1)/e, continuous and discrete alike.
        let want = (std::f64::consts::E - 1.0) / std::f64::consts::E;
        for r in [1u32, 2, 4] {
            let spec = WeightSpec::new(r, 0).unwrap();
            let got = moment(&spec, 0, &QuadratureConfig::default(), &cfg()).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn discrete_moments_shift_with_p() {
        // r = 1, p = 1: moments are B(n+1); n = 2 -> 5, n = 5 -> 203.
        let spec = WeightSpec::new(1, 1).unwrap();
        let qcfg = QuadratureConfig::default();
        assert_relative_eq!(moment(&spec, 2, &qcfg, &cfg()).unwrap(), 5.0, max_relative = 1e-12);
        assert_relative_eq!(moment(&spec, 5, &qcfg, &cfg()).unwrap(), 203.0, max_relative = 1e-12);
    }

    #[test]
    fn tail_bound_rejects_short_interval() {
        let spec = WeightSpec::new(2, 1).unwrap();
        let qcfg = QuadratureConfig {
            x_max: Some(5.0),
            ..QuadratureConfig::default()
        };
        let res = moment(&spec, 4, &qcfg, &cfg());
        assert!(matches!(res, Err(Error::TailBound(_))), "got {res:?}");
    }

    #[test]
    fn weight_tilde_matches_manual_product() {
        let spec = WeightSpec::new(2, 1).unwrap();
        let fam = CoherentFamily::bell(2, 1, &FamilyOptions::default()).unwrap();
        let x = 2.5;
        let manual = weight_series(2, x, &cfg()).unwrap()
            * normalization(&fam, x, 0, &cfg()).unwrap()
            / PI;
        assert_relative_eq!(
            weight_tilde(&spec, x, &fam, &cfg()).unwrap(),
            manual,
            epsilon = 1e-15
        );
    }

    #[test]
    fn weight_tilde_guards() {
        let spec = WeightSpec::new(2, 1).unwrap();
        let wrong = CoherentFamily::bell(3, 1, &FamilyOptions::default()).unwrap();
        assert!(weight_tilde(&spec, 1.0, &wrong, &cfg()).is_err());
        let fam = CoherentFamily::bell(2, 1, &FamilyOptions::default()).unwrap();
        assert!(weight_tilde(&spec, 0.0, &fam, &cfg()).is_err());
        assert!(weight_tilde(&WeightSpec::new(1, 1).unwrap(), 1.0, &fam, &cfg()).is_err());
    }

    #[test]
    fn parameter_guards() {
        assert!(WeightSpec::new(0, 1).is_err());
        assert!(WeightSpec::new(9, 1).is_err());
        assert!(weight_series(1, 1.0, &cfg()).is_err());
        assert!(weight_series(2, -1.0, &cfg()).is_err());
        assert!(matches!(
            weight_closed(5, 1.0, &cfg()),
            Err(Error::UnsupportedOrder(5))
        ));
    }
}
