//! Nonlinear coherent states and their quantum-optical diagnostics.
//!
//! A family is labelled by a positive sequence `ρ(n)`; the states are
//!
//! ```text
//! |z⟩ = N(|z|²)^{-1/2} Σ_n  zⁿ/√ρ(n)  |n⟩,      N(x) = Σ_n xⁿ/ρ(n).
//! ```
//!
//! Families built here use `ρ(n) = B_{r,1}(n+p)` (exact big integers;
//! the p = 0 family takes ρ(0) = 1, the empty-product value of `[0]!`),
//! plus the conventional reference `ρ(n) = n!` that must reproduce the
//! textbook values Q = 0, s_q = s_p = 1/2, ω = 1, σ̄ = 0.
//!
//! All series are summed by ratio recurrences: consecutive `ρ` ratios are
//! exact big-integer quotients rounded once to `f64`, so no term ever
//! round-trips through an overflowing float.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::bigreal::{ln_biguint, ratio_f64};
use crate::boson::BellValues;
use crate::error::{Error, Result};
use crate::sequences::SeriesConfig;
use crate::sum::CompensatedSum;

/// Dropped-probability budget for truncated Fock vectors.
const FOCK_TAIL_TOL: f64 = 1e-14;

/// Construction options for a coherent-state family.
#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Largest |z|² the family's series tables must support.
    pub x_max: f64,
    /// Fock-space truncation order for state-vector operations.
    pub n_fock_max: usize,
    /// Hard cap on the ρ table length.
    pub max_len: usize,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            x_max: 40.0,
            n_fock_max: 64,
            max_len: 5000,
        }
    }
}

impl FamilyOptions {
    fn validate(&self) -> Result<()> {
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::invalid(format!(
                "x_max must be positive and finite, got {}",
                self.x_max
            )));
        }
        if self.n_fock_max < 8 {
            return Err(Error::invalid("n_fock_max must be >= 8".to_string()));
        }
        if self.max_len < self.n_fock_max + 8 {
            return Err(Error::invalid(
                "max_len must exceed n_fock_max by at least 8".to_string(),
            ));
        }
        Ok(())
    }
}

/// Which ρ sequence a family carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// ρ(n) = B_{r,1}(n+p).
    Bell { r: u32, p: u32 },
    /// ρ(n) = n! (conventional coherent states).
    Conventional,
}

/// A coherent-state family with precomputed exact ρ values.
#[derive(Debug, Clone)]
pub struct CoherentFamily {
    kind: FamilyKind,
    rho_exact: Vec<BigUint>,
    /// ratio[n] = ρ(n)/ρ(n−1) for n >= 1 (ratio[0] unused).
    ratio: Vec<f64>,
    rho0: f64,
    n_fock_max: usize,
    x_max: f64,
}

impl CoherentFamily {
    /// Family with ρ(n) = B_{r,1}(n+p).
    ///
    /// The table is extended until the normalization series at
    /// `opts.x_max` is converged with a wide margin, so every series op
    /// at x <= x_max terminates inside the table.
    pub fn bell(r: u32, p: u32, opts: &FamilyOptions) -> Result<Self> {
        opts.validate()?;
        if r < 1 {
            return Err(Error::invalid("family requires r >= 1".to_string()));
        }
        if p > 12 {
            return Err(Error::invalid(
                "family shift p is limited to p <= 12".to_string(),
            ));
        }
        let mut values = BellValues::new(r, 1)?;
        let mut bells: Vec<BigUint> = Vec::new();
        let mut rho_exact: Vec<BigUint> = Vec::new();
        let mut next_rho = |bells: &mut Vec<BigUint>, idx: usize| -> BigUint {
            if idx == 0 {
                return BigUint::one();
            }
            while bells.len() < idx {
                bells.push(values.next().expect("BellValues is infinite"));
            }
            bells[idx - 1].clone()
        };
        let mut n = 0usize;
        let mut ln_rho = 0.0f64;
        let mut ln_term_max = f64::NEG_INFINITY;
        let ln_x = opts.x_max.ln();
        let mut small_run = 0u32;
        loop {
            let v = next_rho(&mut bells, n + p as usize);
            if n >= 1 {
                let prev = &rho_exact[n - 1];
                ln_rho += ln_biguint(&v) - ln_biguint(prev);
            } else {
                ln_rho = ln_biguint(&v);
            }
            rho_exact.push(v);
            let ln_term = n as f64 * ln_x - ln_rho;
            ln_term_max = ln_term_max.max(ln_term);
            // Stop once terms of N(x_max) are 1e-20 below the peak.
            if n > opts.n_fock_max + 2 && ln_term < ln_term_max - 46.1 {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            n += 1;
            if n >= opts.max_len {
                return Err(Error::ResourceGuard(format!(
                    "family table cap {} reached before convergence at x_max = {}",
                    opts.max_len, opts.x_max
                )));
            }
        }
        Ok(Self::from_rho(
            FamilyKind::Bell { r, p },
            rho_exact,
            opts,
        ))
    }

    /// Conventional reference family, ρ(n) = n!.
    pub fn conventional(opts: &FamilyOptions) -> Result<Self> {
        opts.validate()?;
        let mut rho_exact = vec![BigUint::one()];
        let mut ln_rho = 0.0f64;
        let mut ln_term_max = 0.0f64;
        let ln_x = opts.x_max.ln();
        let mut n = 1usize;
        let mut small_run = 0u32;
        loop {
            let v = rho_exact[n - 1].clone() * BigUint::from(n);
            ln_rho += (n as f64).ln();
            rho_exact.push(v);
            let ln_term = n as f64 * ln_x - ln_rho;
            ln_term_max = ln_term_max.max(ln_term);
            if n > opts.n_fock_max + 2 && ln_term < ln_term_max - 46.1 {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            n += 1;
            if n >= opts.max_len {
                return Err(Error::ResourceGuard(format!(
                    "family table cap {} reached before convergence at x_max = {}",
                    opts.max_len, opts.x_max
                )));
            }
        }
        Ok(Self::from_rho(FamilyKind::Conventional, rho_exact, opts))
    }

    fn from_rho(kind: FamilyKind, rho_exact: Vec<BigUint>, opts: &FamilyOptions) -> Self {
        let mut ratio = vec![f64::NAN];
        for n in 1..rho_exact.len() {
            ratio.push(ratio_f64(&rho_exact[n], &rho_exact[n - 1]));
        }
        let rho0 = rho_exact[0].to_f64().unwrap_or(f64::INFINITY);
        CoherentFamily {
            kind,
            rho_exact,
            ratio,
            rho0,
            n_fock_max: opts.n_fock_max,
            x_max: opts.x_max,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.rho_exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_exact.is_empty()
    }

    pub fn n_fock_max(&self) -> usize {
        self.n_fock_max
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Exact ρ(n).
    pub fn rho_exact(&self, n: usize) -> &BigUint {
        &self.rho_exact[n]
    }

    /// Deformed occupation `[n] = ρ(n)/ρ(n−1)`, n >= 1.
    pub fn box_value(&self, n: usize) -> f64 {
        assert!(n >= 1 && n < self.ratio.len(), "box index {n} out of range");
        self.ratio[n]
    }
}

pub(crate) struct NormDerivs {
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
}

/// N, N′, N″ at x in one pass over the shared term sequence.
pub(crate) fn normalization_all(
    family: &CoherentFamily,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<NormDerivs> {
    cfg.validate()?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("normalization needs x >= 0, got {x}")));
    }
    let len = family.len();
    if x == 0.0 {
        let t0 = 1.0 / family.rho0;
        let t1 = t0 / family.ratio[1];
        let t2 = t1 / family.ratio[2];
        return Ok(NormDerivs {
            n0: t0,
            n1: t1,
            n2: 2.0 * t2,
        });
    }
    let mut s0 = CompensatedSum::new();
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    let mut t = 1.0 / family.rho0;
    s0.add(t);
    let mut small_run = 0u32;
    let mut converged = false;
    for n in 1..len {
        t *= x / family.ratio[n];
        if !t.is_finite() {
            return Err(Error::NoConvergence(format!(
                "normalization overflow at x = {x}"
            )));
        }
        let nf = n as f64;
        s0.add(t);
        s1.add(nf * t);
        s2.add(nf * (nf - 1.0) * t);
        if n >= 2 {
            let small = t <= cfg.rel_tol * s0.value()
                && nf * t <= cfg.rel_tol * s1.value()
                && nf * (nf - 1.0) * t <= cfg.rel_tol * s2.value();
            if small {
                small_run += 1;
                if small_run >= cfg.consecutive_small {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "normalization series not converged within the family table \
             (x = {x}, table supports x_max = {})",
            family.x_max
        )));
    }
    Ok(NormDerivs {
        n0: s0.value(),
        n1: s1.value() / x,
        n2: s2.value() / (x * x),
    })
}

/// Normalization function N(x) or its first or second derivative,
/// differentiated term by term (`derivative_order` 0, 1 or 2).
pub fn normalization(
    family: &CoherentFamily,
    x: f64,
    derivative_order: u8,
    cfg: &SeriesConfig,
) -> Result<f64> {
    let d = normalization_all(family, x, cfg)?;
    match derivative_order {
        0 => Ok(d.n0),
        1 => Ok(d.n1),
        2 => Ok(d.n2),
        other => Err(Error::invalid(format!(
            "derivative_order must be 0, 1 or 2, got {other}"
        ))),
    }
}

/// Mean occupation ⟨n̂⟩ = x N′(x)/N(x).
pub fn mean_occupation(family: &CoherentFamily, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let d = normalization_all(family, x, cfg)?;
    Ok(x * d.n1 / d.n0)
}

/// Mandel parameter Q(x) = x (N″/N′ − N′/N); zero for Poissonian
/// statistics, negative sub-Poissonian, positive super-Poissonian.
pub fn mandel_q(family: &CoherentFamily, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let d = normalization_all(family, x, cfg)?;
    Ok(x * (d.n2 / d.n1 - d.n1 / d.n0))
}

/// Metric factor ω(x) = d/dx [x N′/N] = (N′ + xN″)/N − x (N′/N)².
pub fn metric_factor(family: &CoherentFamily, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let d = normalization_all(family, x, cfg)?;
    let slope = d.n1 / d.n0;
    Ok((d.n1 + x * d.n2) / d.n0 - x * slope * slope)
}

/// ⟨z| a^m |z⟩ = z^m Σ_n x^n √((n+m)!/n!) / √(ρ(n)ρ(n+m)) / N(x).
pub fn expectation_a_power(
    family: &CoherentFamily,
    z: Complex64,
    m: u32,
    cfg: &SeriesConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let x = z.norm_sqr();
    if x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n0 = normalization_all(family, x, cfg)?.n0;
    let len = family.len();
    let mu = m as usize;
    if mu + 2 >= len {
        return Err(Error::invalid(format!(
            "power m = {m} too large for family table of length {len}"
        )));
    }
    // u_0 = √(m! / (ρ(0) ρ(m))) from exact integers.
    let mut m_fact = BigUint::one();
    for k in 1..=mu {
        m_fact *= BigUint::from(k);
    }
    let den = family.rho_exact(0) * family.rho_exact(mu);
    let mut u = ratio_f64(&m_fact, &den).sqrt();
    let mut sum = CompensatedSum::new();
    sum.add(u);
    let mut small_run = 0u32;
    let mut converged = false;
    for n in 1..len - mu {
        let nf = n as f64;
        u *= x * ((nf + m as f64) / nf / family.ratio[n] / family.ratio[n + mu]).sqrt();
        if !u.is_finite() {
            return Err(Error::NoConvergence(format!(
                "expectation series overflow at x = {x}"
            )));
        }
        sum.add(u);
        if u <= cfg.rel_tol * sum.value() {
            small_run += 1;
            if small_run >= cfg.consecutive_small {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "expectation series not converged within the family table (x = {x})"
        )));
    }
    Ok(z.powu(m) * sum.value() / n0)
}

/// Quadrature variances over 2 for Q = a + a† and P = (a − a†)/i.
///
/// Conventional coherent states give s_q = s_p = 1/2; values below 1/2
/// indicate squeezing of that quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Squeezing {
    pub s_q: f64,
    pub s_p: f64,
}

pub fn squeezing(family: &CoherentFamily, z: Complex64, cfg: &SeriesConfig) -> Result<Squeezing> {
    let (var_q, var_p, _) = quadrature_variances(family, z, cfg)?;
    Ok(Squeezing {
        s_q: 0.5 * var_q,
        s_p: 0.5 * var_p,
    })
}

/// Signal-to-noise ratio σ = ⟨Q⟩²/⟨(ΔQ)²⟩ and its excess over the
/// conventional-CS value, σ̄ = σ − 4|z|².
#[derive(Debug, Clone, Copy)]
pub struct Snr {
    pub sigma: f64,
    pub sigma_bar: f64,
}

pub fn snr(family: &CoherentFamily, z: Complex64, cfg: &SeriesConfig) -> Result<Snr> {
    let (var_q, _, mean_q) = quadrature_variances(family, z, cfg)?;
    if var_q <= 0.0 {
        return Err(Error::NoConvergence(format!(
            "quadrature variance not positive ({var_q}) at z = {z}"
        )));
    }
    let sigma = mean_q * mean_q / var_q;
    Ok(Snr {
        sigma,
        sigma_bar: sigma - 4.0 * z.norm_sqr(),
    })
}

/// (⟨(ΔQ)²⟩, ⟨(ΔP)²⟩, ⟨Q⟩) from ⟨a⟩, ⟨a²⟩ and ⟨a†a⟩ = xN′/N.
fn quadrature_variances(
    family: &CoherentFamily,
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<(f64, f64, f64)> {
    let x = z.norm_sqr();
    let d = normalization_all(family, x, cfg)?;
    let nbar = x * d.n1 / d.n0;
    let ea = expectation_a_power(family, z, 1, cfg)?;
    let ea2 = expectation_a_power(family, z, 2, cfg)?;
    let mean_q = 2.0 * ea.re;
    let mean_p = 2.0 * ea.im;
    let var_q = 2.0 * ea2.re + 1.0 + 2.0 * nbar - mean_q * mean_q;
    let var_p = -2.0 * ea2.re + 1.0 + 2.0 * nbar - mean_p * mean_p;
    Ok((var_q, var_p, mean_q))
}

/// Truncated Fock expansion of |z⟩ with normalized amplitudes.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    tail: f64,
    z: Complex64,
}

impl StateVector {
    /// Amplitudes a_n = zⁿ/√(ρ(n) N), n = 0..=n_fock_max.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Bound on the dropped probability Σ_{n>cap} |a_n|².
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Retained probability mass Σ|a_n|².
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Build the truncated state vector, enforcing the tail budget.
pub fn state_vector(family: &CoherentFamily, z: Complex64, cfg: &SeriesConfig) -> Result<StateVector> {
    let x = z.norm_sqr();
    let n0 = normalization_all(family, x, cfg)?.n0;
    let cap = family.n_fock_max().min(family.len() - 2);
    let mut amps = Vec::with_capacity(cap + 1);
    let mut a = Complex64::new((family.rho0 * n0).sqrt().recip(), 0.0);
    amps.push(a);
    for n in 1..=cap {
        a *= z / family.ratio[n].sqrt();
        amps.push(a);
    }
    // Tail: continue |a_n|² beyond the cap through the table, then bound
    // the remainder geometrically.
    let mut tail = 0.0f64;
    let mut t = amps[cap].norm_sqr();
    let mut q = 0.0f64;
    for n in cap + 1..family.len() {
        q = x / family.ratio[n];
        t *= q;
        tail += t;
    }
    if q >= 1.0 {
        return Err(Error::TruncationInsufficient(format!(
            "amplitude tail still growing at the table end (x = {x})"
        )));
    }
    tail += t * q / (1.0 - q);
    if tail > FOCK_TAIL_TOL {
        return Err(Error::TruncationInsufficient(format!(
            "dropped tail {tail:.3e} exceeds {FOCK_TAIL_TOL:.0e}; raise n_fock_max \
             (currently {})",
            family.n_fock_max()
        )));
    }
    Ok(StateVector {
        amplitudes: amps,
        tail,
        z,
    })
}

/// The deformed ladder pair A, A† with A|n⟩ = √[n] |n−1⟩,
/// A†|n⟩ = √[n+1] |n+1⟩, acting on truncated Fock vectors.
pub struct DeformedOscillator<'a> {
    family: &'a CoherentFamily,
}

impl<'a> DeformedOscillator<'a> {
    pub fn new(family: &'a CoherentFamily) -> Self {
        DeformedOscillator { family }
    }

    /// `[n]`; n = 0 gives 0 (A annihilates the vacuum).
    pub fn box_value(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.family.box_value(n)
        }
    }

    /// A applied to an amplitude vector (same length; top slot empties).
    pub fn apply_annihilation(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for n in 0..amps.len() - 1 {
            out[n] = self.family.box_value(n + 1).sqrt() * amps[n + 1];
        }
        out
    }

    /// A† applied to an amplitude vector (the top amplitude is dropped
    /// by the truncation).
    pub fn apply_creation(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for n in 1..amps.len() {
            out[n] = self.family.box_value(n).sqrt() * amps[n - 1];
        }
        out
    }
}

/// ‖(A − z)|z⟩‖ on the truncated space; zero in exact arithmetic, so the
/// result measures truncation plus rounding.
pub fn eigenvalue_residual(
    family: &CoherentFamily,
    z: Complex64,
    cfg: &SeriesConfig,
) -> Result<f64> {
    let sv = state_vector(family, z, cfg)?;
    let op = DeformedOscillator::new(family);
    let lowered = op.apply_annihilation(sv.amplitudes());
    let mut sum = 0.0f64;
    for (l, a) in lowered.iter().zip(sv.amplitudes()) {
        sum += (l - z * a).norm_sqr();
    }
    Ok(sum.sqrt())
}

/// Residual of ⟨n|[A, A†]|n⟩ = [n+1] − [n], evaluated through the
/// operator applications on one side and the box values on the other.
pub fn box_commutator_check(family: &CoherentFamily, n: usize) -> Result<f64> {
    if n + 2 >= family.len() {
        return Err(Error::invalid(format!(
            "box_commutator_check needs n + 2 < table length {}",
            family.len()
        )));
    }
    let op = DeformedOscillator::new(family);
    let dim = n + 2;
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    basis[n] = Complex64::new(1.0, 0.0);
    let raised_then_lowered = op.apply_annihilation(&op.apply_creation(&basis));
    let lowered_then_raised = op.apply_creation(&op.apply_annihilation(&basis));
    let lhs = raised_then_lowered[n].re - lowered_then_raised[n].re;
    let rhs = op.box_value(n + 1) - op.box_value(n);
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    fn opts() -> FamilyOptions {
        FamilyOptions::default()
    }

    #[test]
    fn conventional_normalization_is_exp() {
        let fam = CoherentFamily::conventional(&opts()).unwrap();
        for &x in &[0.0, 0.5, 1.0, 10.0, 35.0] {
            let n = normalization(&fam, x, 0, &cfg()).unwrap();
            assert_relative_eq!(n, x.exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn conventional_mandel_vanishes() {
        let fam = CoherentFamily::conventional(&opts()).unwrap();
        for &x in &[0.3, 5.0, 20.0, 35.0] {
            assert!(mandel_q(&fam, x, &cfg()).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn conventional_squeezing_is_half_half() {
        let fam = CoherentFamily::conventional(&opts()).unwrap();
        let s = squeezing(&fam, Complex64::new(1.0, 0.5), &cfg()).unwrap();
        assert_relative_eq!(s.s_q, 0.5, epsilon = 1e-10);
        assert_relative_eq!(s.s_p, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn conventional_snr_excess_vanishes() {
        let fam = CoherentFamily::conventional(&opts()).unwrap();
        for &zr in &[0.5, 2.0, 6.0] {
            let s = snr(&fam, Complex64::new(zr, 0.0), &cfg()).unwrap();
            assert_relative_eq!(s.sigma, 4.0 * zr * zr, epsilon = 1e-8);
            assert!(s.sigma_bar.abs() < 1e-8);
        }
    }

    #[test]
    fn conventional_metric_is_one() {
        let fam = CoherentFamily::conventional(&opts()).unwrap();
        for &x in &[0.0, 1.0, 17.5, 35.0] {
            assert_relative_eq!(metric_factor(&fam, x, &cfg()).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn conventional_expectation_of_a_is_z() {
        let fam = CoherentFamily::conventional(&opts()).unwrap();
        let z = Complex64::new(1.2, -0.7);
        let ea = expectation_a_power(&fam, z, 1, &cfg()).unwrap();
        assert_relative_eq!(ea.re, z.re, epsilon = 1e-12);
        assert_relative_eq!(ea.im, z.im, epsilon = 1e-12);
    }

    #[test]
    fn bell_family_normalization_matches_direct_sum() {
        // r = 2, p = 1: N(1) = Σ 1/B_{2,1}(n+1), reference summed from the
        // exact normal-ordering integers.
        let fam = CoherentFamily::bell(2, 1, &opts()).unwrap();
        let direct: f64 = BellValues::new(2, 1)
            .unwrap()
            .take(25)
            .map(|b| 1.0 / b.to_f64().unwrap())
            .sum();
        let n = normalization(&fam, 1.0, 0, &cfg()).unwrap();
        assert_relative_eq!(n, direct, max_relative = 1e-12);
    }

    #[test]
    fn normalization_at_zero_hits_rho0() {
        let fam = CoherentFamily::bell(1, 1, &opts()).unwrap();
        assert_relative_eq!(normalization(&fam, 0.0, 0, &cfg()).unwrap(), 1.0, epsilon = 1e-15);
        // N'(0) = 1/ρ(1) = 1/B(2) = 1/2.
        assert_relative_eq!(normalization(&fam, 0.0, 1, &cfg()).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mandel_positive_for_shifted_family() {
        let fam = CoherentFamily::bell(1, 1, &opts()).unwrap();
        for &x in &[1.0, 5.0, 15.0, 30.0, 35.0] {
            assert!(mandel_q(&fam, x, &cfg()).unwrap() > 0.0, "x = {x}");
        }
    }

    #[test]
    fn mandel_crossover_for_unshifted_r2() {
        let fam = CoherentFamily::bell(2, 0, &opts()).unwrap();
        let small = mandel_q(&fam, 0.5, &cfg()).unwrap();
        let large = mandel_q(&fam, 30.0, &cfg()).unwrap();
        assert!(small < 0.0, "expected sub-Poissonian at x = 0.5, got {small}");
        assert!(large > 0.0, "expected super-Poissonian at x = 30, got {large}");
    }

    #[test]
    fn metric_factor_at_zero_is_rho_ratio() {
        // ω(0) = ρ(0)/ρ(1) = B(1)/B(2) = 1/2 for r = 1, p = 1.
        let fam = CoherentFamily::bell(1, 1, &opts()).unwrap();
        assert_relative_eq!(metric_factor(&fam, 0.0, &cfg()).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn expectation_power_zero_is_unity() {
        let fam = CoherentFamily::bell(3, 1, &opts()).unwrap();
        let v = expectation_a_power(&fam, Complex64::new(0.3, 0.1), 0, &cfg()).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn expectation_real_positive_for_real_z() {
        let fam = CoherentFamily::bell(2, 1, &opts()).unwrap();
        let v = expectation_a_power(&fam, Complex64::new(1.5, 0.0), 1, &cfg()).unwrap();
        assert!(v.re > 0.0);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn squeezing_phase_symmetry() {
        // Rotating z by i swaps the two quadratures.
        let fam = CoherentFamily::bell(2, 1, &opts()).unwrap();
        for &alpha in &[1.0, 3.0] {
            let along_q = squeezing(&fam, Complex64::new(alpha, 0.0), &cfg()).unwrap();
            let along_p = squeezing(&fam, Complex64::new(0.0, alpha), &cfg()).unwrap();
            assert_relative_eq!(along_q.s_q, along_p.s_p, epsilon = 1e-10);
            assert_relative_eq!(along_q.s_p, along_p.s_q, epsilon = 1e-10);
        }
    }

    #[test]
    fn squeezing_below_half_in_p_for_bell_family() {
        let fam = CoherentFamily::bell(1, 1, &opts()).unwrap();
        let s = squeezing(&fam, Complex64::new(1.0, 0.0), &cfg()).unwrap();
        assert!(s.s_p < 0.5 && s.s_q > 0.5, "s_q = {}, s_p = {}", s.s_q, s.s_p);
        // Uncertainty floor.
        assert!(s.s_q * s.s_p >= 0.25 - 1e-12);
    }

    #[test]
    fn snr_excess_negative_for_bell_family() {
        let fam = CoherentFamily::bell(1, 1, &opts()).unwrap();
        let s = snr(&fam, Complex64::new(1.0, 0.0), &cfg()).unwrap();
        assert!(s.sigma_bar < 0.0);
    }

    #[test]
    fn snr_at_origin_is_zero() {
        let fam = CoherentFamily::bell(2, 1, &opts()).unwrap();
        let s = snr(&fam, Complex64::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(s.sigma, 0.0);
        assert_eq!(s.sigma_bar, 0.0);
    }

    #[test]
    fn state_vector_norm_and_tail() {
        let fam = CoherentFamily::bell(2, 1, &opts()).unwrap();
        let sv = state_vector(&fam, Complex64::new(1.0, 1.0), &cfg()).unwrap();
        assert!(sv.tail_bound() < 1e-14);
        assert_relative_eq!(sv.norm_sq(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn truncation_error_when_cap_too_small() {
        let fam = CoherentFamily::bell(
            1,
            0,
            &FamilyOptions {
                n_fock_max: 16,
                ..FamilyOptions::default()
            },
        )
        .unwrap();
        // x = 9 needs far more than 16 Fock levels for a 1e-14 tail.
        let res = state_vector(&fam, Complex64::new(3.0, 0.0), &cfg());
        assert!(matches!(res, Err(Error::TruncationInsufficient(_))));
    }

    #[test]
    fn eigenvalue_residual_is_tiny() {
        let fam = CoherentFamily::bell(2, 1, &opts()).unwrap();
        for &z in &[
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(3.0, 0.0),
        ] {
            let r = eigenvalue_residual(&fam, z, &cfg()).unwrap();
            assert!(r <= 1e-10, "residual {r} at z = {z}");
        }
    }

    #[test]
    fn box_commutator_residual_vanishes() {
        let fam = CoherentFamily::bell(3, 1, &opts()).unwrap();
        for n in 0..10 {
            let resid = box_commutator_check(&fam, n).unwrap();
            assert!(resid.abs() < 1e-12, "n = {n}: {resid}");
        }
    }

    #[test]
    fn family_guards() {
        assert!(CoherentFamily::bell(0, 1, &opts()).is_err());
        assert!(CoherentFamily::bell(2, 40, &opts()).is_err());
        let bad = FamilyOptions {
            x_max: -1.0,
            ..FamilyOptions::default()
        };
        assert!(CoherentFamily::bell(2, 1, &bad).is_err());
    }

    #[test]
    fn normalization_errors_beyond_x_max() {
        let fam = CoherentFamily::bell(
            1,
            1,
            &FamilyOptions {
                x_max: 2.0,
                ..FamilyOptions::default()
            },
        )
        .unwrap();
        assert!(normalization(&fam, 200.0, 0, &cfg()).is_err());
    }
}
