//! Truncated formal power series in one variable over exact rationals.
//!
//! A series carries its truncation degree `N` and stores plain coefficients
//! `c_0..c_N` (not divided-power coefficients; conversions such as
//! `α_k = a_k k!` are explicit at the call sites that need them). Binary
//! operations require equal truncation degrees and truncate eagerly, which is
//! lossless per degree.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::combinat::factorial_rat;
use crate::error::{Result, UmbraError};
use crate::rational::{int, pow, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries1D {
    coeffs: Vec<Rational>, // length degree()+1
}

impl PowerSeries1D {
    /// Series from coefficients `c_0..c_N`; the truncation degree is `len-1`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); degree + 1] }
    }

    pub fn one(degree: usize) -> Self {
        Self::constant(Rational::one(), degree)
    }

    pub fn constant(c: Rational, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = c;
        s
    }

    /// The identity series `u`.
    pub fn identity(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, v: Rational) {
        assert!(k <= self.degree(), "coefficient index beyond truncation degree");
        self.coeffs[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Substitute `u -> s*u`: coefficient `k` becomes `c_k s^k`.
    pub fn scale_argument(&self, s: &Rational) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * pow(s, k))
            .collect();
        Self { coeffs }
    }

    fn assert_same_degree(&self, other: &Self) {
        assert_eq!(
            self.degree(),
            other.degree(),
            "truncation degree mismatch: {} vs {}",
            self.degree(),
            other.degree()
        );
    }

    /// Cauchy product truncated to the common degree.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_degree(other);
        let n = self.degree();
        let mut out = Self::zero(n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let term = &self.coeffs[i] * &other.coeffs[j];
                out.coeffs[i + j] += term;
            }
        }
        out
    }

    /// `self ∘ f`, defined when `f` has no constant term.
    pub fn compose(&self, f: &Self) -> Result<Self> {
        self.assert_same_degree(f);
        if !f.coeffs[0].is_zero() {
            return Err(UmbraError::NonzeroConstantTerm);
        }
        let n = self.degree();
        let mut out = Self::constant(self.coeffs[0].clone(), n);
        // accumulate r_m f^m; f has valuation >= 1 so f^m has valuation >= m
        let mut power = Self::one(n);
        for m in 1..=n {
            power = power.mul(f);
            if self.coeffs[m].is_zero() {
                continue;
            }
            for k in m..=n {
                let term = &self.coeffs[m] * &power.coeffs[k];
                out.coeffs[k] += term;
            }
        }
        Ok(out)
    }

    /// Compositional inverse: the unique `a` with `self ∘ a = a ∘ self = u`,
    /// defined when the constant term vanishes and the linear one does not.
    ///
    /// Degree-by-degree triangular recursion: `a_1 = 1/q_1` and
    /// `a_n = -(1/q_1) Σ_{m=2..n} q_m Σ_{k_1+..+k_m=n} a_{k_1}⋯a_{k_m}`.
    pub fn compositional_inverse(&self) -> Result<Self> {
        let n = self.degree();
        if !self.coeffs[0].is_zero() {
            return Err(UmbraError::NonzeroConstantTerm);
        }
        if n == 0 || self.coeffs[1].is_zero() {
            return Err(UmbraError::ZeroLinearCoefficient);
        }
        let q1_inv = self.coeffs[1].recip();
        let mut a = Self::zero(n);
        a.coeffs[1] = q1_inv.clone();
        for deg in 2..=n {
            // coefficient of u^deg in q ∘ a_partial, excluding the q_1 a_deg term;
            // only a_1..a_{deg-1} enter because every part count m >= 2
            let mut acc = Rational::zero();
            for m in 2..=deg {
                if self.coeffs[m].is_zero() {
                    continue;
                }
                let e = sum_over_compositions(&a.coeffs, deg, m);
                acc += &self.coeffs[m] * e;
            }
            a.coeffs[deg] = -&q1_inv * acc;
        }
        Ok(a)
    }

    /// Multiplicative inverse via the triangular recursion
    /// `g_0 = 1/f_0`, `g_n = -(1/f_0) Σ_{i<n} f_{n-i} g_i`.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(UmbraError::ZeroConstantTerm);
        }
        let n = self.degree();
        let f0_inv = self.coeffs[0].recip();
        let mut g = Self::zero(n);
        g.coeffs[0] = f0_inv.clone();
        for deg in 1..=n {
            let mut acc = Rational::zero();
            for i in 0..deg {
                if g.coeffs[i].is_zero() || self.coeffs[deg - i].is_zero() {
                    continue;
                }
                acc += &self.coeffs[deg - i] * &g.coeffs[i];
            }
            g.coeffs[deg] = -&f0_inv * acc;
        }
        Ok(g)
    }

    // -- named series -------------------------------------------------------

    /// `exp u = Σ u^k / k!`.
    pub fn exp(degree: usize) -> Self {
        let coeffs = (0..=degree).map(|k| factorial_rat(k).recip()).collect();
        Self { coeffs }
    }

    /// `log(1+u) = Σ (-1)^{k+1} u^k / k`.
    pub fn log1p(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for k in 1..=degree {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            s.coeffs[k] = rat(sign, k as i64);
        }
        s
    }

    /// `e^u - 1`, the difference-operator symbol of the falling factorials.
    pub fn expm1(degree: usize) -> Self {
        let mut s = Self::exp(degree);
        s.coeffs[0] = Rational::zero();
        s
    }

    /// `-log(1-u) = Σ u^k / k`, the generating series of the rising factorials.
    pub fn neg_log1m(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for k in 1..=degree {
            s.coeffs[k] = rat(1, k as i64);
        }
        s
    }

    /// `u/(1+u) = Σ (-1)^{k+1} u^k`.
    pub fn u_over_one_plus_u(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for k in 1..=degree {
            s.coeffs[k] = int(if k % 2 == 1 { 1 } else { -1 });
        }
        s
    }

    /// `u/(1-u) = Σ u^k`.
    pub fn u_over_one_minus_u(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for k in 1..=degree {
            s.coeffs[k] = Rational::one();
        }
        s
    }

    /// The inverse of `u e^{αu}` around zero, `α^{-1} W(αu)`, with degree-k
    /// coefficient `(-αk)^{k-1} / k!`.
    pub fn abel_inverse(alpha: &Rational, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for k in 1..=degree {
            let base = -(alpha * int(k as i64));
            s.coeffs[k] = pow(&base, k - 1) / factorial_rat(k);
        }
        s
    }

    /// `u e^{αu}`, the delta-operator symbol of the Abel polynomials.
    pub fn abel_forward(alpha: &Rational, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        for k in 1..=degree {
            s.coeffs[k] = pow(alpha, k - 1) / factorial_rat(k - 1);
        }
        s
    }
}

/// `Σ_{k_1+..+k_m = n, k_i >= 1} Π coeffs[k_i]` computed by dynamic
/// programming over the part count.
fn sum_over_compositions(coeffs: &[Rational], n: usize, m: usize) -> Rational {
    // table[j] = sum over compositions of j into the parts consumed so far
    let mut table = vec![Rational::zero(); n + 1];
    table[0] = Rational::one();
    for _ in 0..m {
        let mut next = vec![Rational::zero(); n + 1];
        for j in 0..=n {
            if table[j].is_zero() {
                continue;
            }
            for (k, c) in coeffs.iter().enumerate().take(n - j + 1).skip(1) {
                if !c.is_zero() {
                    let term = &table[j] * c;
                    next[j + k] += term;
                }
            }
        }
        table = next;
    }
    table[n].clone()
}

impl Add for &PowerSeries1D {
    type Output = PowerSeries1D;
    fn add(self, rhs: &PowerSeries1D) -> PowerSeries1D {
        self.assert_same_degree(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        PowerSeries1D { coeffs }
    }
}

impl Sub for &PowerSeries1D {
    type Output = PowerSeries1D;
    fn sub(self, rhs: &PowerSeries1D) -> PowerSeries1D {
        self.assert_same_degree(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        PowerSeries1D { coeffs }
    }
}

impl Neg for &PowerSeries1D {
    type Output = PowerSeries1D;
    fn neg(self) -> PowerSeries1D {
        PowerSeries1D { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &PowerSeries1D {
    type Output = PowerSeries1D;
    fn mul(self, rhs: &PowerSeries1D) -> PowerSeries1D {
        PowerSeries1D::mul(self, rhs)
    }
}

/// Coefficients of the monic one-dimensional Sheffer polynomial
/// `p_n(t) = n! [u^n] exp(t a(u) - vol * c(a(u)))`; pass `c = None` for the
/// plain binomial-type sequence `exp(t a(u))`.
pub fn one_dim_sheffer_value(
    a: &PowerSeries1D,
    c: Option<&PowerSeries1D>,
    vol: &Rational,
    t: &Rational,
    n: usize,
) -> Rational {
    let degree = a.degree();
    assert!(n <= degree, "requested degree beyond truncation");
    let mut exponent = a.scale(t);
    if let Some(c) = c {
        let c_of_a = c.compose(a).expect("a has no constant term");
        exponent = &exponent - &c_of_a.scale(vol);
    }
    let series = PowerSeries1D::exp(degree)
        .compose(&exponent)
        .expect("exponent has no constant term");
    series.coeff(n) * factorial_rat(n)
}
