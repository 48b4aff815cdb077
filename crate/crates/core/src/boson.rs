//! Exact normal ordering of boson operator words.
//!
//! A word is a finite product of the ladder operators `a` and `a†` with
//! `[a, a†] = 1`.  Its normal form is a sum `Σ c_{ij} (a†)^i a^j` with
//! nonnegative integer coefficients, obtained by exhaustively commuting
//! each `a` past each `a†` to its right (`a·a† → a†·a + 1`).  The engine
//! keeps every intermediate expression normally ordered and merges equal
//! monomials, so the rewrite cost is polynomial in the word length even
//! though the coefficient sums grow super-exponentially.
//!
//! Powers of `(a†)^r a^s` expand as
//! `[(a†)^r a^s]^n = (a†)^{n(r−s)} Σ_{k=s}^{ns} S_{r,s}(n,k) (a†)^k a^k`,
//! which defines the generalized Stirling numbers `S_{r,s}(n,k)`; their
//! row sums are the generalized Bell numbers `B_{r,s}(n)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// One letter of a boson word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Create,
    Annihilate,
}

/// A product of ladder operators, leftmost factor first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BosonWord {
    letters: Vec<Letter>,
}

impl BosonWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        BosonWord { letters }
    }

    /// The word `[(a†)^r a^s]^n`.
    pub fn monomial_power(r: u32, s: u32, n: u32) -> Self {
        let mut letters = Vec::with_capacity(((r + s) * n) as usize);
        for _ in 0..n {
            letters.extend(std::iter::repeat(Letter::Create).take(r as usize));
            letters.extend(std::iter::repeat(Letter::Annihilate).take(s as usize));
        }
        BosonWord { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of creations minus annihilations; conserved by rewriting,
    /// so every monomial (i, j) of the normal form has i − j equal to it.
    pub fn creation_excess(&self) -> i64 {
        self.letters.iter().fold(0i64, |acc, l| match l {
            Letter::Create => acc + 1,
            Letter::Annihilate => acc - 1,
        })
    }
}

/// Configurable resource guards for the exact engine.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Largest exponent n accepted by table builders.
    pub max_table_n: u32,
    /// Largest creation order r accepted by table builders.
    pub max_r: u32,
    /// Longest word accepted by `normal_order`.
    pub max_word_len: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_table_n: 12,
            max_r: 6,
            max_word_len: 200,
        }
    }
}

impl Limits {
    /// Guards wide enough for internal long-sequence construction.
    pub fn relaxed() -> Self {
        Limits {
            max_table_n: u32::MAX,
            max_r: 64,
            max_word_len: usize::MAX,
        }
    }
}

/// A normally ordered polynomial: map from `(i, j)` to the coefficient
/// of `(a†)^i a^j`.  Coefficients are exact nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperatorPolynomial {
    terms: BTreeMap<(u32, u32), BigUint>,
}

impl OperatorPolynomial {
    /// The multiplicative identity (empty product).
    pub fn identity() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), BigUint::one());
        OperatorPolynomial { terms }
    }

    /// The single monomial `(a†)^i a^j`.
    pub fn monomial(i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((i, j), BigUint::one());
        OperatorPolynomial { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigUint)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `(a†)^i a^j` (zero if absent).
    pub fn coefficient(&self, i: u32, j: u32) -> BigUint {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigUint::zero)
    }

    /// Sum of all coefficients (the Bell number when `self` is a power
    /// of a monomial).
    pub fn coefficient_sum(&self) -> BigUint {
        self.terms.values().sum()
    }

    fn insert_add(&mut self, key: (u32, u32), value: BigUint) {
        if value.is_zero() {
            return;
        }
        *self.terms.entry(key).or_insert_with(BigUint::zero) += value;
    }

    /// Multiply on the right by one ladder operator, renormalizing.
    ///
    /// `(a†)^i a^j · a† = (a†)^{i+1} a^j + j (a†)^i a^{j−1}` realises the
    /// leftmost `a·a†` rewrite with equal monomials merged; `· a` simply
    /// extends the annihilator string.
    pub fn mul_letter(&self, letter: Letter) -> Self {
        let mut out = OperatorPolynomial::default();
        for (&(i, j), c) in &self.terms {
            match letter {
                Letter::Create => {
                    out.insert_add((i + 1, j), c.clone());
                    if j > 0 {
                        out.insert_add((i, j - 1), c * BigUint::from(j));
                    }
                }
                Letter::Annihilate => {
                    out.insert_add((i, j + 1), c.clone());
                }
            }
        }
        out
    }

    /// Multiply on the right by the monomial `(a†)^p a^q`, contracting
    /// the inner `a^j (a†)^p` block in one pass:
    /// `a^j (a†)^p = Σ_t t! C(j,t) C(p,t) (a†)^{p−t} a^{j−t}`.
    pub fn mul_monomial(&self, p: u32, q: u32) -> Self {
        let mut out = OperatorPolynomial::default();
        for (&(i, j), c) in &self.terms {
            let t_max = j.min(p);
            // kappa_t = t! C(j,t) C(p,t), built up by the exact ratio
            // kappa_t / kappa_{t-1} = (j-t+1)(p-t+1)/t.
            let mut kappa = BigUint::one();
            for t in 0..=t_max {
                if t > 0 {
                    kappa = kappa * BigUint::from(j - t + 1) * BigUint::from(p - t + 1)
                        / BigUint::from(t);
                }
                out.insert_add((i + p - t, j - t + q), c * &kappa);
            }
        }
        out
    }

    /// General normally ordered product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = OperatorPolynomial::default();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let t_max = j1.min(i2);
                let mut kappa = BigUint::one();
                let cc = c1 * c2;
                for t in 0..=t_max {
                    if t > 0 {
                        kappa = kappa * BigUint::from(j1 - t + 1) * BigUint::from(i2 - t + 1)
                            / BigUint::from(t);
                    }
                    out.insert_add((i1 + i2 - t, j1 + j2 - t), &cc * &kappa);
                }
            }
        }
        out
    }
}

/// Normal-order a word with the default resource guard.
pub fn normal_order(word: &BosonWord) -> Result<OperatorPolynomial> {
    normal_order_with(word, &Limits::default())
}

/// Normal-order a word, folding letters left to right so the prefix is
/// always in normal form (the memoized leftmost-rewrite strategy).
pub fn normal_order_with(word: &BosonWord, limits: &Limits) -> Result<OperatorPolynomial> {
    if word.len() > limits.max_word_len {
        return Err(Error::ResourceGuard(format!(
            "word length {} exceeds limit {}",
            word.len(),
            limits.max_word_len
        )));
    }
    let mut poly = OperatorPolynomial::identity();
    for &letter in word.letters() {
        poly = poly.mul_letter(letter);
    }
    Ok(poly)
}

fn check_power_params(r: u32, s: u32, n: u32, limits: &Limits) -> Result<()> {
    if s == 0 || r < s {
        return Err(Error::invalid(format!(
            "generalized Stirling numbers need r >= s >= 1, got r = {r}, s = {s}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid(
            "operator power n must be >= 1 (the n = 0 value is not defined by the expansion)"
                .to_string(),
        ));
    }
    if r > limits.max_r {
        return Err(Error::ResourceGuard(format!(
            "r = {r} exceeds limit {}",
            limits.max_r
        )));
    }
    if n > limits.max_table_n {
        return Err(Error::ResourceGuard(format!(
            "n = {n} exceeds limit {}",
            limits.max_table_n
        )));
    }
    Ok(())
}

/// Normal form of `[(a†)^r a^s]^n`, built by repeated monomial products.
fn power_polynomial(r: u32, s: u32, n: u32) -> OperatorPolynomial {
    let mut poly = OperatorPolynomial::identity();
    for _ in 0..n {
        poly = poly.mul_monomial(r, s);
    }
    poly
}

/// Generalized Stirling number `S_{r,s}(n, k)` as an exact integer.
///
/// Zero outside the band `s <= k <= n·s`.
pub fn stirling_exact(r: u32, s: u32, n: u32, k: u32) -> Result<BigUint> {
    stirling_exact_with(r, s, n, k, &Limits::default())
}

pub fn stirling_exact_with(r: u32, s: u32, n: u32, k: u32, limits: &Limits) -> Result<BigUint> {
    check_power_params(r, s, n, limits)?;
    if k < s || k > n * s {
        return Ok(BigUint::zero());
    }
    let poly = power_polynomial(r, s, n);
    Ok(poly.coefficient(n * (r - s) + k, k))
}

/// Generalized Bell number `B_{r,s}(n) = Σ_k S_{r,s}(n, k)`.
pub fn bell_exact(r: u32, s: u32, n: u32) -> Result<BigUint> {
    bell_exact_with(r, s, n, &Limits::default())
}

pub fn bell_exact_with(r: u32, s: u32, n: u32, limits: &Limits) -> Result<BigUint> {
    check_power_params(r, s, n, limits)?;
    Ok(power_polynomial(r, s, n).coefficient_sum())
}

/// Full table of Stirling rows and Bell row sums for n = 1..=n_max.
#[derive(Clone, Debug)]
pub struct BellTable {
    r: u32,
    s: u32,
    n_max: u32,
    /// rows[n-1][k-s] = S(n, k) for k in [s, n*s].
    rows: Vec<Vec<BigUint>>,
    bells: Vec<BigUint>,
}

impl BellTable {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `S_{r,s}(n, k)`; zero outside the band.
    pub fn stirling(&self, n: u32, k: u32) -> BigUint {
        assert!(n >= 1 && n <= self.n_max, "row {n} outside table");
        if k < self.s || k > n * self.s {
            return BigUint::zero();
        }
        self.rows[(n - 1) as usize][(k - self.s) as usize].clone()
    }

    /// Row of `S_{r,s}(n, ·)` for `k = s..=n*s`.
    pub fn row(&self, n: u32) -> &[BigUint] {
        assert!(n >= 1 && n <= self.n_max, "row {n} outside table");
        &self.rows[(n - 1) as usize]
    }

    /// `B_{r,s}(n)`.
    pub fn bell(&self, n: u32) -> &BigUint {
        assert!(n >= 1 && n <= self.n_max, "row {n} outside table");
        &self.bells[(n - 1) as usize]
    }
}

/// Build the Stirling/Bell table for n = 1..=n_max under the default guard.
pub fn build_table(r: u32, s: u32, n_max: u32) -> Result<BellTable> {
    build_table_with(r, s, n_max, &Limits::default())
}

pub fn build_table_with(r: u32, s: u32, n_max: u32, limits: &Limits) -> Result<BellTable> {
    check_power_params(r, s, n_max, limits)?;
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut bells = Vec::with_capacity(n_max as usize);
    let mut poly = OperatorPolynomial::identity();
    for n in 1..=n_max {
        poly = poly.mul_monomial(r, s);
        let excess = (n * (r - s)) as u32;
        let mut row = Vec::with_capacity((n * s - s + 1) as usize);
        for k in s..=n * s {
            row.push(poly.coefficient(excess + k, k));
        }
        bells.push(row.iter().sum());
        rows.push(row);
    }
    Ok(BellTable {
        r,
        s,
        n_max,
        rows,
        bells,
    })
}

/// Iterator over `B_{r,s}(n)` for n = 1, 2, …, holding only the current
/// power polynomial (O(n·s) terms) rather than the whole table.
pub struct BellValues {
    r: u32,
    s: u32,
    poly: OperatorPolynomial,
}

impl BellValues {
    pub fn new(r: u32, s: u32) -> Result<Self> {
        if s == 0 || r < s {
            return Err(Error::invalid(format!(
                "Bell sequence needs r >= s >= 1, got r = {r}, s = {s}"
            )));
        }
        Ok(BellValues {
            r,
            s,
            poly: OperatorPolynomial::identity(),
        })
    }
}

impl Iterator for BellValues {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        self.poly = self.poly.mul_monomial(self.r, self.s);
        Some(self.poly.coefficient_sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn single_commutation() {
        // a a† = a† a + 1.
        let word = BosonWord::new(vec![Letter::Annihilate, Letter::Create]);
        let poly = normal_order(&word).unwrap();
        assert_eq!(poly.coefficient(1, 1), big(1));
        assert_eq!(poly.coefficient(0, 0), big(1));
        assert_eq!(poly.num_terms(), 2);
    }

    #[test]
    fn number_operator_squared() {
        // (a† a)² = a†² a² + a† a.
        let word = BosonWord::monomial_power(1, 1, 2);
        let poly = normal_order(&word).unwrap();
        assert_eq!(poly.coefficient(2, 2), big(1));
        assert_eq!(poly.coefficient(1, 1), big(1));
        assert_eq!(poly.num_terms(), 2);
    }

    #[test]
    fn squared_r2_monomial() {
        // (a†² a)² = a†⁴ a² + 2 a†³ a.
        let word = BosonWord::monomial_power(2, 1, 2);
        let poly = normal_order(&word).unwrap();
        assert_eq!(poly.coefficient(4, 2), big(1));
        assert_eq!(poly.coefficient(3, 1), big(2));
        assert_eq!(poly.num_terms(), 2);
    }

    #[test]
    fn empty_word_is_identity() {
        let poly = normal_order(&BosonWord::new(vec![])).unwrap();
        assert_eq!(poly, OperatorPolynomial::identity());
    }

    #[test]
    fn already_normal_word_is_untouched() {
        let word = BosonWord::new(vec![Letter::Create, Letter::Annihilate]);
        let poly = normal_order(&word).unwrap();
        assert_eq!(poly, OperatorPolynomial::monomial(1, 1));
    }

    #[test]
    fn word_guard_trips() {
        let word = BosonWord::new(vec![Letter::Create; 201]);
        assert!(matches!(
            normal_order(&word),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling_exact(1, 1, 3, 2).unwrap(), big(3));
        assert_eq!(stirling_exact(2, 1, 2, 1).unwrap(), big(2));
        // Outside the band.
        assert_eq!(stirling_exact(1, 1, 3, 0).unwrap(), big(0));
        assert_eq!(stirling_exact(1, 1, 3, 4).unwrap(), big(0));
    }

    #[test]
    fn classical_stirling_row_four() {
        // S(4, k) = 1, 7, 6, 1 for k = 1..4.
        let expected = [1u64, 7, 6, 1];
        for (k, &e) in (1..=4).zip(expected.iter()) {
            assert_eq!(stirling_exact(1, 1, 4, k).unwrap(), big(e));
        }
    }

    #[test]
    fn bell_examples() {
        assert_eq!(bell_exact(1, 1, 5).unwrap(), big(52));
        assert_eq!(bell_exact(3, 1, 4).unwrap(), big(211));
        assert_eq!(bell_exact(4, 1, 6).unwrap(), big(117_941));
    }

    #[test]
    fn printed_sequences() {
        let expected: [(u32, [u64; 6]); 4] = [
            (1, [1, 2, 5, 15, 52, 203]),
            (2, [1, 3, 13, 73, 501, 4051]),
            (3, [1, 4, 25, 211, 2236, 28471]),
            (4, [1, 5, 41, 465, 6721, 117_941]),
        ];
        for (r, seq) in expected {
            let table = build_table(r, 1, 6).unwrap();
            for (n, &e) in (1..=6u32).zip(seq.iter()) {
                assert_eq!(table.bell(n), &big(e), "B_{{{r},1}}({n})");
            }
        }
    }

    #[test]
    fn table_rows_sum_to_bells() {
        let table = build_table(3, 2, 6).unwrap();
        for n in 1..=6 {
            let sum: BigUint = table.row(n).iter().sum();
            assert_eq!(&sum, table.bell(n));
        }
    }

    #[test]
    fn falling_factorial_identity() {
        // Σ_k S(n,k) m^(k) = m^n with m^(k) the falling factorial.
        for n in 1..=8u32 {
            let table = build_table(1, 1, n).unwrap();
            for m in 1..=8u64 {
                let mut sum = BigUint::zero();
                for k in 1..=n {
                    let mut falling = BigUint::one();
                    for t in 0..k as u64 {
                        if m <= t {
                            falling = BigUint::zero();
                            break;
                        }
                        falling *= BigUint::from(m - t);
                    }
                    sum += table.stirling(n, k) * falling;
                }
                assert_eq!(sum, BigUint::from(m).pow(n), "m = {m}, n = {n}");
            }
        }
    }

    #[test]
    fn parameter_guards() {
        assert!(matches!(bell_exact(1, 2, 3), Err(Error::InvalidParameters(_))));
        assert!(matches!(bell_exact(2, 0, 3), Err(Error::InvalidParameters(_))));
        assert!(matches!(bell_exact(2, 1, 0), Err(Error::InvalidParameters(_))));
        assert!(matches!(bell_exact(7, 1, 3), Err(Error::ResourceGuard(_))));
        assert!(matches!(bell_exact(2, 1, 13), Err(Error::ResourceGuard(_))));
    }

    #[test]
    fn relaxed_limits_allow_larger_r() {
        let v = bell_exact_with(7, 1, 2, &Limits::relaxed()).unwrap();
        // S_{r,1}(2,1) = r, S_{r,1}(2,2) = 1.
        assert_eq!(v, big(8));
    }

    #[test]
    fn bell_values_iterator_matches_table() {
        let table = build_table(2, 1, 8).unwrap();
        let values: Vec<BigUint> = BellValues::new(2, 1).unwrap().take(8).collect();
        for (n, v) in (1..=8u32).zip(values.iter()) {
            assert_eq!(v, table.bell(n));
        }
    }

    #[test]
    fn general_product_matches_letter_fold() {
        // ((a†)^2 a)^2 · (a† a^2) two ways.
        let left = power_polynomial(2, 1, 2);
        let right = OperatorPolynomial::monomial(1, 2);
        let via_mul = left.mul(&right);
        let mut word = BosonWord::monomial_power(2, 1, 2).letters().to_vec();
        word.push(Letter::Create);
        word.push(Letter::Annihilate);
        word.push(Letter::Annihilate);
        let via_fold = normal_order(&BosonWord::new(word)).unwrap();
        assert_eq!(via_mul, via_fold);
    }

    #[test]
    fn excess_is_conserved() {
        let word = BosonWord::monomial_power(3, 2, 4);
        let poly = normal_order(&word).unwrap();
        let excess = word.creation_excess();
        for (&(i, j), _) in poly.terms() {
            assert_eq!(i as i64 - j as i64, excess);
        }
    }
}
