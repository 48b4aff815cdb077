//! Special-function kernels: `log_gamma`, generalized hypergeometric
//! series `pFq`, and modified Bessel functions of the first kind.
//!
//! Everything here is an ascending series with a term-ratio recurrence
//! driven by the shared convergence rule in [`crate::sum`]; `log_gamma`
//! is the one closed-form kernel the series lean on.

use crate::error::{Error, Result};
use crate::sequences::SeriesConfig;
use crate::sum::sum_series;

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// Lanczos g = 10.900511 coefficients, Pugh (2004) p. 116.
const GAMMA_R: f64 = 10.900511;
const GAMMA_DK: &[f64] = &[
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

/// ln Γ(x) for x > 0; Lanczos approximation good to ~14 digits.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::invalid(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// Unchecked ln Γ; callers must guarantee x > 0.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (t.0 as f64 - x));
        LN_PI
            - (std::f64::consts::PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + GAMMA_R) / std::f64::consts::E).ln()
    } else {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (x + t.0 as f64 - 1.0));
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + GAMMA_R) / std::f64::consts::E).ln()
    }
}

/// Generalized hypergeometric series
/// `pFq(a; b; x) = Σ_k (a_1)_k…(a_p)_k / [(b_1)_k…(b_q)_k] x^k / k!`.
///
/// Supports `p <= q` (entire) and `p == q + 1` with `|x| < 1`.  Lower
/// parameters must avoid nonpositive integers; a nonpositive-integer
/// upper parameter terminates the series (polynomial case).
pub fn pfq(upper: &[f64], lower: &[f64], x: f64, cfg: &SeriesConfig) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!("pfq requires x >= 0, got {x}")));
    }
    if upper.len() > lower.len() + 1 {
        return Err(Error::invalid(format!(
            "pfq with p = {} > q + 1 = {} diverges",
            upper.len(),
            lower.len() + 1
        )));
    }
    if upper.len() == lower.len() + 1 && x >= 1.0 {
        return Err(Error::invalid(
            "pfq with p = q + 1 requires |x| < 1".to_string(),
        ));
    }
    for &b in lower {
        if b <= 0.0 && b == b.floor() {
            return Err(Error::Pole(b));
        }
    }
    let mut term = 1.0f64;
    let mut terminated = false;
    let eval = sum_series(cfg, "pfq", |k| {
        if k == 0 {
            return term;
        }
        if terminated {
            return 0.0;
        }
        let kf = (k - 1) as f64;
        let mut ratio = x / (kf + 1.0);
        for &a in upper {
            ratio *= a + kf;
        }
        for &b in lower {
            ratio /= b + kf;
        }
        term *= ratio;
        if term == 0.0 {
            terminated = true;
        }
        term
    })?;
    Ok(eval.value)
}

/// Modified Bessel function I_ν(y), ascending series, ν >= 0, 0 <= y <= 700.
pub fn bessel_i(nu: f64, y: f64, cfg: &SeriesConfig) -> Result<f64> {
    bessel_series(nu, y, false, cfg)
}

/// Exponentially scaled modified Bessel function e^{-y} I_ν(y).
///
/// The scale factor is folded into the leading term of the recurrence so
/// no intermediate overflows even where I_ν itself would.
pub fn bessel_i_scaled(nu: f64, y: f64, cfg: &SeriesConfig) -> Result<f64> {
    bessel_series(nu, y, true, cfg)
}

fn bessel_series(nu: f64, y: f64, scaled: bool, cfg: &SeriesConfig) -> Result<f64> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::invalid(format!("bessel_i requires nu >= 0, got {nu}")));
    }
    if !y.is_finite() || y < 0.0 {
        return Err(Error::invalid(format!("bessel_i requires y >= 0, got {y}")));
    }
    if y > 700.0 {
        return Err(Error::invalid(format!(
            "bessel_i overflow guard: y = {y} > 700"
        )));
    }
    if y == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * y;
    let mut ln_t0 = nu * half.ln() - ln_gamma(nu + 1.0);
    if scaled {
        ln_t0 -= y;
    }
    let quarter_sq = half * half;
    let mut term = ln_t0.exp();
    let eval = sum_series(cfg, "bessel_i", |k| {
        if k == 0 {
            return term;
        }
        let kf = k as f64;
        term *= quarter_sq / (kf * (kf + nu));
        term
    })?;
    Ok(eval.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn log_gamma_at_one_is_zero() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn log_gamma_at_half_is_ln_sqrt_pi() {
        let expected = 0.5 * std::f64::consts::PI.ln();
        assert_relative_eq!(log_gamma(0.5).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn log_gamma_at_eleven_is_ln_ten_factorial() {
        // 10! = 3628800 exactly.
        let expected = 3_628_800f64.ln();
        assert_relative_eq!(log_gamma(11.0).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn log_gamma_recurrence() {
        // ln Γ(x+1) - ln Γ(x) = ln x across the working range.  The
        // subtraction cancels, so the tolerance scales with |ln Γ| itself.
        for &x in &[0.5, 0.73, 1.0, 2.5, 10.0, 31.4, 100.0, 1000.0, 10000.0] {
            let upper = ln_gamma(x + 1.0);
            let diff = (upper - ln_gamma(x) - x.ln()).abs();
            assert!(
                diff <= 1e-14 * upper.abs().max(1.0),
                "recurrence off by {diff:e} at x = {x}"
            );
        }
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn pfq_empty_upper_at_zero_is_one() {
        assert_eq!(pfq(&[], &[0.5, 1.5], 0.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn pfq_1f1_one_two_one() {
        // ₁F₁(1;2;1) = Σ 1/(k+1)! = e - 1; oracle summed independently.
        let mut oracle = 0.0f64;
        let mut fact = 1.0f64;
        for k in 1..=25u32 {
            fact *= k as f64;
            oracle += 1.0 / fact;
        }
        let got = pfq(&[1.0], &[2.0], 1.0, &cfg()).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-13);
        assert_relative_eq!(got, std::f64::consts::E - 1.0, max_relative = 1e-13);
    }

    #[test]
    fn pfq_1f1_two_two_one_is_e() {
        // (2)_k/(2)_k cancels termwise, leaving exp(1).
        let got = pfq(&[2.0], &[2.0], 1.0, &cfg()).unwrap();
        assert_relative_eq!(got, std::f64::consts::E, max_relative = 1e-13);
    }

    #[test]
    fn pfq_rejects_pole() {
        assert!(matches!(
            pfq(&[1.0], &[-2.0], 0.5, &cfg()),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn pfq_rejects_divergent_order() {
        assert!(pfq(&[1.0, 1.0, 1.0], &[2.0], 0.5, &cfg()).is_err());
        assert!(pfq(&[1.0, 1.0], &[2.0], 1.0, &cfg()).is_err());
    }

    #[test]
    fn pfq_polynomial_termination() {
        // ₁F₁(-2;1;x) = 1 - 2x + x²/2 terminates; x = 0.5 -> 0.125.
        let got = pfq(&[-2.0], &[1.0], 0.5, &cfg()).unwrap();
        assert_relative_eq!(got, 0.125, max_relative = 1e-14);
    }

    #[test]
    fn bessel_i1_at_zero_is_zero() {
        assert_eq!(bessel_i(1.0, 0.0, &cfg()).unwrap(), 0.0);
        assert_eq!(bessel_i(0.0, 0.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn bessel_i1_at_two() {
        // I₁(2) = Σ_k 1/(k!(k+1)!) summed independently as the oracle.
        let mut oracle = 0.0f64;
        let mut kfact = 1.0f64;
        let mut k1fact = 1.0f64;
        for k in 0..30u32 {
            if k > 0 {
                kfact *= k as f64;
                k1fact *= (k + 1) as f64;
            }
            oracle += 1.0 / (kfact * k1fact);
        }
        let got = bessel_i(1.0, 2.0, &cfg()).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-13);
    }

    #[test]
    fn bessel_scaled_matches_unscaled() {
        for &y in &[0.5, 2.0, 10.0, 50.0] {
            let plain = bessel_i(1.0, y, &cfg()).unwrap();
            let scaled = bessel_i_scaled(1.0, y, &cfg()).unwrap();
            assert_relative_eq!(scaled, plain * (-y).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_scaled_stays_finite_at_large_argument() {
        let v = bessel_i_scaled(1.0, 650.0, &cfg()).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn bessel_rejects_beyond_guard() {
        assert!(bessel_i(1.0, 701.0, &cfg()).is_err());
    }

    #[test]
    fn bessel_vs_hypergeometric_identity() {
        // √x I₁(2√x) = x ₀F₁(;2;x): two kernels, one function.
        for &x in &[0.1f64, 1.0, 4.0, 9.0] {
            let lhs = x.sqrt() * bessel_i(1.0, 2.0 * x.sqrt(), &cfg()).unwrap();
            let rhs = x * pfq(&[], &[2.0], x, &cfg()).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }
}
