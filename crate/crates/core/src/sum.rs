//! Compensated summation and the shared series-convergence driver.

use crate::error::{Error, Result};
use crate::sequences::SeriesConfig;

/// Neumaier-compensated accumulator.
///
/// Keeps a running correction so that sums of many small terms retain
/// close to full double precision regardless of ordering.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Outcome of a converged series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub value: f64,
    pub terms_used: usize,
    pub last_term: f64,
}

/// Sums `term(k)` for `k = 0, 1, 2, …` until `cfg.consecutive_small`
/// successive terms fall below `cfg.rel_tol` times the running sum.
///
/// The driver is shared by every series in the crate so that truncation
/// semantics are identical everywhere.  Terms must be finite; a
/// non-finite term or exhaustion of `cfg.max_terms` is reported as
/// `NoConvergence`.
pub fn sum_series<F>(cfg: &SeriesConfig, context: &str, mut term: F) -> Result<SeriesEval>
where
    F: FnMut(usize) -> f64,
{
    cfg.validate()?;
    let mut acc = CompensatedSum::new();
    let mut small_run = 0u32;
    let mut last = 0.0f64;
    for k in 0..cfg.max_terms {
        let t = term(k);
        if !t.is_finite() {
            return Err(Error::NoConvergence(format!(
                "{context}: non-finite term at k = {k}"
            )));
        }
        acc.add(t);
        last = t;
        let scale = acc.value().abs();
        if t.abs() <= cfg.rel_tol * scale {
            small_run += 1;
            if small_run >= cfg.consecutive_small {
                return Ok(SeriesEval {
                    value: acc.value(),
                    terms_used: k + 1,
                    last_term: last,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NoConvergence(format!(
        "{context}: {} terms exhausted (last term {last:e})",
        cfg.max_terms
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_sums_to_two() {
        let cfg = SeriesConfig::default();
        let eval = sum_series(&cfg, "geometric", |k| 0.5f64.powi(k as i32)).unwrap();
        assert!((eval.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn compensation_beats_naive_summation() {
        // 1 + eps/2 added many times: naive f64 addition loses the small parts.
        let eps = f64::EPSILON / 2.0;
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(eps);
        }
        assert!(acc.value() > 1.0);
    }

    #[test]
    fn divergent_series_errors() {
        let cfg = SeriesConfig {
            max_terms: 50,
            ..SeriesConfig::default()
        };
        let err = sum_series(&cfg, "harmonic tail", |k| 1.0 / (k as f64 + 1.0));
        assert!(err.is_err());
    }

    #[test]
    fn all_zero_terms_terminate() {
        let cfg = SeriesConfig::default();
        let eval = sum_series(&cfg, "zeros", |_| 0.0).unwrap();
        assert_eq!(eval.value, 0.0);
        assert!(eval.terms_used <= cfg.consecutive_small as usize);
    }
}
