//! Combinatorics of boson normal ordering and the coherent states built from it.
//!
//! The crate is organised around one pipeline:
//!
//! 1. [`boson`]: exact normal ordering of words in the boson operators
//!    `a`, `a†` with `[a, a†] = 1`.  Powers of `(a†)^r a^s` yield the
//!    generalized Stirling numbers `S_{r,s}(n,k)` and their row sums, the
//!    generalized Bell numbers `B_{r,s}(n)`, as arbitrary-precision integers.
//! 2. [`sequences`]: floating-point routes to the same numbers — the
//!    Dobiński-style series of Gamma-function ratios and, for low orders,
//!    closed hypergeometric forms.
//! 3. [`weights`]: positive weight functions on `[0, ∞)` whose power
//!    moments reproduce the Bell numbers (a Stieltjes moment problem),
//!    evaluated both from closed forms and from a term-by-term inverse
//!    Mellin series, plus composite Gauss-Legendre quadrature to verify
//!    the moment identities.
//! 4. [`coherent`]: nonlinear coherent states with `ρ(n) = B_{r,1}(n+p)`
//!    and their quantum-optical diagnostics (Mandel parameter, quadrature
//!    squeezing, signal-to-noise ratio, metric factor, deformed-oscillator
//!    eigenvalue checks).
//!
//! [`special`] supplies the shared kernels: `log_gamma`, generalized
//! hypergeometric series `pFq`, and modified Bessel functions `I_ν`.

pub mod boson;
pub mod coherent;
pub mod error;
pub mod sequences;
pub mod special;
pub mod sum;
pub mod weights;

mod bigreal;

pub use boson::{bell_exact, build_table, normal_order, stirling_exact};
pub use boson::{BellTable, BosonWord, Letter, Limits, OperatorPolynomial};
pub use coherent::{
    box_commutator_check, eigenvalue_residual, expectation_a_power, mandel_q, mean_occupation,
    metric_factor, normalization, snr, squeezing, state_vector, CoherentFamily,
    DeformedOscillator, FamilyKind, FamilyOptions, Snr, Squeezing, StateVector,
};
pub use error::{Error, Result};
pub use sequences::{bell_dobinski, bell_hypergeom, box_ratio, rho, RhoSequence, SeriesConfig};
pub use weights::{
    dirac_comb_moment, dirac_comb_strength, gauss_legendre_rule, moment, weight_closed,
    weight_series, weight_tilde, MeasureKind, QuadratureConfig, WeightSpec,
};
