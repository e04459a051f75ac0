//! Diagonal lifting of classical one-variable binomial-type sequences.
//!
//! A series `a(u) = Σ a_k u^k` with `a_0 = 0`, `a_1 = 1` lifts to the vector
//! series with slots `a_k · Diag_k`, whose binomial family has generating
//! series `exp⟨ω, a(ξ)⟩`. Three independent evaluation routes are kept side
//! by side and cross-checked in the tests and verification suites:
//!
//! * the family's coefficient arrays (`BinomialFamily::eval_basic`),
//! * the set-partition sum `Σ_π Π_B α_{|B|} ⟨ω, ξ^{|B|}⟩` with `α_k = a_k k!`
//!   (enumerated over restricted growth strings, plus a partition-type
//!   multinomial fast path),
//! * coefficient extraction from `exp[Σ_x ω_x a(t ξ_x)]` as a series in `t`.

use itertools::Itertools;

use num_traits::{One, Zero};

use crate::combinat::{factorial_rat, rgs_block_sizes, rgs_blocks, set_partitions};
use crate::error::{Result, UmbraError};
use crate::family::BinomialFamily;
use crate::rational::{from_big, int, pow, Rational};
use crate::series::PowerSeries1D;
use crate::tensor::{multisets, Distribution, SiteSpace, SymTensor, TestFunction};
use crate::tenseries::VectorTensorSeries;

/// A binomial family obtained by diagonally lifting a one-variable series.
#[derive(Debug, Clone)]
pub struct LiftedBinomialSpec {
    space: SiteSpace,
    a: PowerSeries1D,
    q: PowerSeries1D,
    family: BinomialFamily,
}

impl LiftedBinomialSpec {
    /// Lift `a` (requires `a_0 = 0`, `a_1 = 1`). `q` is its compositional
    /// inverse, the delta-operator symbol.
    pub fn new(space: SiteSpace, a: PowerSeries1D) -> Result<Self> {
        if !a.coeff(0).is_zero() || a.coeff(1) != Rational::one() {
            return Err(UmbraError::BadLiftNormalization(
                a.coeff(0).to_string(),
                a.coeff(1).to_string(),
            ));
        }
        let q = a.compositional_inverse().expect("normalized series is invertible");
        let lifted = VectorTensorSeries::diagonal_lift(&a, space.site_count());
        let family = BinomialFamily::from_a_series(&lifted).expect("a_1 = 1 gives a monic family");
        Ok(Self { space, a, q, family })
    }

    /// Falling factorials: `a(u) = log(1+u)`, delta operator the forward
    /// difference `e^D - 1`.
    pub fn falling(space: SiteSpace, degree: usize) -> Self {
        Self::new(space, PowerSeries1D::log1p(degree)).expect("log(1+u) is normalized")
    }

    /// Rising factorials: `a(u) = -log(1-u)`, delta operator `1 - e^{-D}`.
    pub fn rising(space: SiteSpace, degree: usize) -> Self {
        Self::new(space, PowerSeries1D::neg_log1m(degree)).expect("-log(1-u) is normalized")
    }

    /// Abel polynomials with parameter `α ≠ 0`: `a(u) = α^{-1} W(αu)`,
    /// delta operator `D e^{αD}`.
    pub fn abel(space: SiteSpace, degree: usize, alpha: &Rational) -> Result<Self> {
        if alpha.is_zero() {
            return Err(UmbraError::ZeroAbelParameter);
        }
        Self::new(space, PowerSeries1D::abel_inverse(alpha, degree))
    }

    /// Laguerre polynomials of binomial type: `a(u) = u/(1+u)`, delta
    /// operator symbol `u/(1-u)`.
    pub fn laguerre_binomial(space: SiteSpace, degree: usize) -> Self {
        Self::new(space, PowerSeries1D::u_over_one_plus_u(degree)).expect("u/(1+u) is normalized")
    }

    pub fn space(&self) -> &SiteSpace {
        &self.space
    }

    pub fn site_count(&self) -> usize {
        self.space.site_count()
    }

    pub fn degree(&self) -> usize {
        self.a.degree()
    }

    pub fn a_series(&self) -> &PowerSeries1D {
        &self.a
    }

    /// The delta-operator symbol `q`, the compositional inverse of `a`.
    pub fn q_series(&self) -> &PowerSeries1D {
        &self.q
    }

    pub fn family(&self) -> &BinomialFamily {
        &self.family
    }

    /// Divided-power coefficient `α_k = a_k k!`.
    pub fn alpha_coeff(&self, k: usize) -> Rational {
        self.a.coeff(k) * factorial_rat(k)
    }

    /// `b_k = q_k k!`, the divided-power coefficients of the delta symbol;
    /// the order-k slot of the stored inverse series is `b_k/k! · Diag_k`.
    pub fn b_coeff(&self, k: usize) -> Rational {
        self.q.coeff(k) * factorial_rat(k)
    }

    /// `⟨Pⁿ(ω), ξ^{⊗n}⟩` by set-partition enumeration:
    /// `Σ_{π} Π_{B∈π} α_{|B|} ⟨ω, ξ^{|B|}⟩`.
    pub fn eval_partition(
        &self,
        omega: &Distribution,
        xi: &TestFunction,
        n: usize,
    ) -> Rational {
        assert!(n <= self.degree(), "degree beyond truncation");
        if n == 0 {
            return Rational::one();
        }
        let weights = self.block_weights(omega, xi, n);
        let mut acc = Rational::zero();
        for rgs in set_partitions(n) {
            let mut term = Rational::one();
            for size in rgs_block_sizes(&rgs) {
                term *= &weights[size];
                if term.is_zero() {
                    break;
                }
            }
            acc += term;
        }
        acc
    }

    /// Partition-type multinomial fast path for the same value:
    /// `Σ_{j_1+2j_2+…=n} n!/(Π j_i! (i!)^{j_i}) Π (α_i ⟨ω,ξ^i⟩)^{j_i}`.
    pub fn eval_partition_types(
        &self,
        omega: &Distribution,
        xi: &TestFunction,
        n: usize,
    ) -> Rational {
        assert!(n <= self.degree(), "degree beyond truncation");
        if n == 0 {
            return Rational::one();
        }
        let weights = self.block_weights(omega, xi, n);
        let mut acc = Rational::zero();
        let mut counts = vec![0usize; n + 1];
        fn rec(
            i: usize,
            remaining: usize,
            counts: &mut Vec<usize>,
            weights: &[Rational],
            n: usize,
            acc: &mut Rational,
        ) {
            if remaining == 0 {
                let mut term = factorial_rat(n);
                for (size, &j) in counts.iter().enumerate().skip(1) {
                    if j == 0 {
                        continue;
                    }
                    term *= pow(&weights[size], j);
                    term /= factorial_rat(j);
                    term /= pow(&factorial_rat(size), j);
                }
                *acc += term;
                return;
            }
            if i > remaining {
                return;
            }
            for j in 0..=remaining / i {
                counts[i] = j;
                rec(i + 1, remaining - i * j, counts, weights, n, acc);
            }
            counts[i] = 0;
        }
        rec(1, n, &mut counts, &weights, n, &mut acc);
        acc
    }

    fn block_weights(&self, omega: &Distribution, xi: &TestFunction, n: usize) -> Vec<Rational> {
        (0..=n)
            .map(|size| {
                if size == 0 {
                    Rational::zero()
                } else {
                    self.alpha_coeff(size) * omega.pair(&xi.pointwise_pow(size))
                }
            })
            .collect()
    }

    /// `n! [tⁿ] exp[Σ_x ω_x a(t ξ_x)]` — the generating-function route.
    pub fn generating_coefficient(
        &self,
        omega: &Distribution,
        xi: &TestFunction,
        n: usize,
    ) -> Rational {
        assert!(n <= self.degree(), "degree beyond truncation");
        let degree = self.degree();
        let mut exponent = PowerSeries1D::zero(degree);
        for (x, w) in omega.masses().iter().enumerate() {
            if !w.is_zero() {
                exponent = &exponent + &self.a.scale_argument(xi.value(x)).scale(w);
            }
        }
        let series = PowerSeries1D::exp(degree)
            .compose(&exponent)
            .expect("a(0) = 0 keeps the exponent constant-free");
        series.coeff(n) * factorial_rat(n)
    }

    /// Tensor form of the partition sum:
    /// `Pⁿ(ω) = Σ_π Π α_{|B|} · ⊙_B Diag*_{|B|} ω` — an independent route to
    /// the same kernel the coefficient arrays produce.
    pub fn partition_tensor(&self, omega: &Distribution, n: usize) -> SymTensor {
        let m = self.site_count();
        if n == 0 {
            return SymTensor::scalar(m, Rational::one());
        }
        let diag: Vec<SymTensor> = (0..=n)
            .map(|k| {
                if k == 0 {
                    SymTensor::scalar(m, Rational::one())
                } else {
                    SymTensor::diag_embed(omega.masses(), k)
                }
            })
            .collect();
        let mut acc = SymTensor::zero(m, n);
        for rgs in set_partitions(n) {
            let mut scale = Rational::one();
            let mut prod = SymTensor::scalar(m, Rational::one());
            for size in rgs_block_sizes(&rgs) {
                scale *= self.alpha_coeff(size);
                prod = prod.sym_product(&diag[size]);
            }
            acc = &acc + &prod.scale(&scale);
        }
        acc
    }

    /// Exact verifier for the disjoint-support factorization
    /// `⟨P^{(k+n)}(ω), ξ^{⊗k} ⊙ φ^{⊗n}⟩ = ⟨P^{(k)}(ω), ξ^{⊗k}⟩ ⟨P^{(n)}(ω), φ^{⊗n}⟩`.
    pub fn disjoint_support_check(
        &self,
        omega: &Distribution,
        xi: &TestFunction,
        phi: &TestFunction,
        k: usize,
        n: usize,
    ) -> Result<bool> {
        if let Some(site) = xi.support_overlap(phi) {
            return Err(UmbraError::OverlappingSupports(site));
        }
        if k + n > self.degree() {
            return Err(UmbraError::DegreeOverflow { degree: k + n, max: self.degree() });
        }
        let mixed = SymTensor::from_power(xi.values(), k)
            .sym_product(&SymTensor::from_power(phi.values(), n));
        let lhs = self.family.eval_basic(omega, k + n).expect("degree checked").pair(&mixed);
        let rhs = self.family.eval_basic(omega, k).expect("k <= k+n").eval_power(xi)
            * self.family.eval_basic(omega, n).expect("n <= k+n").eval_power(phi);
        Ok(lhs == rhs)
    }
}

/// Integer-mass configuration (a multiset of sites).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration(Vec<u64>);

impl Configuration {
    pub fn new(masses: Vec<u64>) -> Self {
        Self(masses)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn masses(&self) -> &[u64] {
        &self.0
    }

    pub fn to_distribution(&self) -> Distribution {
        Distribution::new(self.0.iter().map(|&v| int(v as i64)).collect())
    }

    /// Number of points in a site subset.
    pub fn points_in(&self, sites: &[usize]) -> u64 {
        sites.iter().map(|&x| self.0[x]).sum()
    }

    /// Simple configurations have at most one point per site.
    pub fn is_simple(&self) -> bool {
        self.0.iter().all(|&v| v <= 1)
    }
}

/// Falling factorial kernel by the explicit product formula: the entry at
/// `(x_1,…,x_n)` is `Π_i (ω(x_i) - Σ_{j<i} δ_{x_j}(x_i))`, which per site
/// telescopes to an ordinary falling factorial of the site mass.
pub fn falling_factorial_product(omega: &Distribution, n: usize) -> SymTensor {
    let m = omega.len();
    if n == 0 {
        return SymTensor::scalar(m, Rational::one());
    }
    let mut out = SymTensor::zero(m, n);
    for idx in multisets(m, n) {
        let mut value = Rational::one();
        for (site, count) in idx.runs() {
            for j in 0..count {
                value *= omega.mass(site) - int(j as i64);
                if value.is_zero() {
                    break;
                }
            }
        }
        out.set_coeff(idx, value);
    }
    out
}

/// Rising factorial kernel via `(ω)ⁿ = (-1)ⁿ (-ω)_n`.
pub fn rising_factorial(omega: &Distribution, n: usize) -> SymTensor {
    let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
    falling_factorial_product(&omega.neg(), n).scale(&sign)
}

/// `γ choose n`: the falling factorial of the configuration divided by `n!`.
/// For simple configurations this is the sum of `δ ⊙ … ⊙ δ` over all
/// `n`-point subsets of the occupied sites.
pub fn binom_choose(gamma: &Configuration, n: usize) -> SymTensor {
    falling_factorial_product(&gamma.to_distribution(), n).scale(&factorial_rat(n).recip())
}

/// Total mass of a kernel over `Λⁿ` for a site subset `Λ`.
pub fn restrict_to_box(f: &SymTensor, sites: &[usize]) -> Rational {
    f.mass_on(sites)
}

/// Ordered-block evaluator for the binomial-type Laguerre polynomials:
/// the sum over families of disjoint sequences covering `{1..n}`, each
/// sequence `b` weighted `⟨-ω, (-ξ)^{|b|}⟩`.
pub fn laguerre_ordered_block_eval(
    omega: &Distribution,
    xi: &TestFunction,
    n: usize,
) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    let minus_omega = omega.neg();
    let weights: Vec<Rational> = (0..=n)
        .map(|size| {
            if size == 0 {
                Rational::zero()
            } else {
                let mut neg_xi_pow = xi.pointwise_pow(size);
                if size % 2 == 1 {
                    neg_xi_pow =
                        TestFunction::new(neg_xi_pow.values().iter().map(|v| -v).collect());
                }
                minus_omega.pair(&neg_xi_pow)
            }
        })
        .collect();
    let mut acc = Rational::zero();
    for rgs in set_partitions(n) {
        let blocks = rgs_blocks(&rgs);
        // every assignment of a linear order to every block is one term
        let order_counts: Vec<usize> = blocks
            .iter()
            .map(|b| b.iter().permutations(b.len()).count())
            .collect();
        let mut term = Rational::one();
        for b in &blocks {
            term *= &weights[b.len()];
        }
        let copies: usize = order_counts.iter().product();
        acc += term * from_big(copies.into());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::tensor::MultiIndex;

    fn uniform(m: usize) -> SiteSpace {
        SiteSpace::uniform(m)
    }

    fn dist(vals: &[i64]) -> Distribution {
        Distribution::new(vals.iter().map(|&v| int(v)).collect())
    }

    fn tf(vals: &[i64]) -> TestFunction {
        TestFunction::new(vals.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn lift_normalization_is_enforced() {
        let bad = PowerSeries1D::exp(4); // constant term 1
        assert!(matches!(
            LiftedBinomialSpec::new(uniform(2), bad),
            Err(UmbraError::BadLiftNormalization(..))
        ));
        assert_eq!(
            LiftedBinomialSpec::abel(uniform(2), 4, &Rational::zero()).unwrap_err(),
            UmbraError::ZeroAbelParameter
        );
    }

    #[test]
    fn identity_series_lifts_to_monomials() {
        let spec = LiftedBinomialSpec::new(uniform(2), PowerSeries1D::identity(4)).unwrap();
        let omega = dist(&[3, -2]);
        for n in 0..=4 {
            assert_eq!(
                spec.family().eval_basic(&omega, n).unwrap(),
                SymTensor::from_power(omega.masses(), n)
            );
        }
    }

    #[test]
    fn partition_eval_examples() {
        let falling = LiftedBinomialSpec::falling(uniform(2), 5);
        let omega = dist(&[2, 1]);
        let xi = tf(&[1, 3]);
        // n = 1: single partition
        assert_eq!(falling.eval_partition(&omega, &xi, 1), omega.pair(&xi));
        // falling n = 2: α_2 = -1
        let expected = {
            let p = omega.pair(&xi);
            &p * &p - omega.pair(&xi.pointwise_pow(2))
        };
        assert_eq!(falling.eval_partition(&omega, &xi, 2), expected);

        // binomial Laguerre n = 2 at one site reduces to t^2 - 2t
        let lag = LiftedBinomialSpec::laguerre_binomial(uniform(1), 5);
        let t = rat(7, 2);
        let val = lag.eval_partition(
            &Distribution::new(vec![t.clone()]),
            &TestFunction::new(vec![int(1)]),
            2,
        );
        assert_eq!(val, &t * &t - int(2) * &t);
    }

    #[test]
    fn three_way_oracle_equivalence() {
        let space = uniform(2);
        let omega = dist(&[2, -1]);
        let xi = TestFunction::new(vec![rat(1, 2), int(1)]);
        let specs = vec![
            LiftedBinomialSpec::falling(space.clone(), 6),
            LiftedBinomialSpec::rising(space.clone(), 6),
            LiftedBinomialSpec::abel(space.clone(), 6, &int(1)).unwrap(),
            LiftedBinomialSpec::laguerre_binomial(space.clone(), 6),
        ];
        for spec in specs {
            for n in 0..=6 {
                let by_partition = spec.eval_partition(&omega, &xi, n);
                let by_types = spec.eval_partition_types(&omega, &xi, n);
                let by_series = spec.generating_coefficient(&omega, &xi, n);
                let by_family = spec.family().eval_basic(&omega, n).unwrap().eval_power(&xi);
                assert_eq!(by_partition, by_types, "n={n}");
                assert_eq!(by_partition, by_series, "n={n}");
                assert_eq!(by_partition, by_family, "n={n}");
            }
        }
    }

    #[test]
    fn partition_tensor_matches_family_kernel() {
        let spec = LiftedBinomialSpec::laguerre_binomial(uniform(3), 4);
        let omega = Distribution::new(vec![int(1), rat(-1, 2), int(2)]);
        for n in 0..=4 {
            assert_eq!(
                spec.partition_tensor(&omega, n),
                spec.family().eval_basic(&omega, n).unwrap()
            );
        }
    }

    #[test]
    fn falling_product_formula() {
        let omega = dist(&[2, 1]);
        let t = falling_factorial_product(&omega, 2);
        assert_eq!(t.coeff(&MultiIndex::new(vec![0, 0])), int(2));
        assert_eq!(t.coeff(&MultiIndex::new(vec![1, 1])), int(0));
        assert_eq!(t.coeff(&MultiIndex::new(vec![0, 1])), int(2));

        assert_eq!(
            falling_factorial_product(&omega, 1),
            SymTensor::from_power(omega.masses(), 1)
        );

        // product formula == family construction, for several masses
        let spec = LiftedBinomialSpec::falling(uniform(3), 5);
        let eta = Distribution::new(vec![int(3), rat(1, 2), int(-2)]);
        for n in 0..=5 {
            assert_eq!(
                falling_factorial_product(&eta, n),
                spec.family().eval_basic(&eta, n).unwrap()
            );
        }
    }

    #[test]
    fn falling_recurrence() {
        // ⟨(ω)_{n+1}, ξ^{⊗(n+1)}⟩ = ⟨(ω)_n ⊙ ω, ξ^{⊗(n+1)}⟩ - n⟨(ω)_n, ξ²⊙ξ^{⊗(n-1)}⟩
        let omega = Distribution::new(vec![int(3), rat(-1, 2), int(1)]);
        let xi = TestFunction::new(vec![int(1), int(2), rat(1, 3)]);
        for n in 1..=4usize {
            let lhs = falling_factorial_product(&omega, n + 1).eval_power(&xi);
            let fn_tensor = falling_factorial_product(&omega, n);
            let with_omega = fn_tensor
                .sym_product(&SymTensor::from_power(omega.masses(), 1))
                .eval_power(&xi);
            let xi_sq = SymTensor::from_power(xi.pointwise_pow(2).values(), 1);
            let test_tensor = xi_sq.sym_product(&SymTensor::from_power(xi.values(), n - 1));
            let correction = fn_tensor.pair(&test_tensor);
            assert_eq!(lhs, with_omega - int(n as i64) * correction);
        }
    }

    #[test]
    fn rising_factorials() {
        // m = 1: (t)^2 = t(t+1)
        let t = rat(5, 2);
        let r = rising_factorial(&Distribution::new(vec![t.clone()]), 2);
        assert_eq!(r.coeff(&MultiIndex::diagonal(0, 2)), &t * (&t + int(1)));

        let omega = dist(&[2, -1]);
        assert_eq!(rising_factorial(&omega, 1), SymTensor::from_power(omega.masses(), 1));

        // equals the lift of -log(1-u)
        let spec = LiftedBinomialSpec::rising(uniform(2), 4);
        for n in 0..=4 {
            assert_eq!(
                rising_factorial(&omega, n),
                spec.family().eval_basic(&omega, n).unwrap()
            );
        }
    }

    #[test]
    fn choose_kernel_examples() {
        let gamma = Configuration::new(vec![1, 1, 1]);
        let c = binom_choose(&gamma, 2);
        for idx in multisets(3, 2) {
            let expected = if idx.sites()[0] == idx.sites()[1] { int(0) } else { rat(1, 2) };
            assert_eq!(c.coeff(&idx), expected, "at {idx}");
        }
        assert_eq!(binom_choose(&gamma, 0), SymTensor::scalar(3, int(1)));
        assert!(binom_choose(&Configuration::new(vec![1, 0]), 2).is_zero());
    }

    #[test]
    fn choose_restriction_counts_subsets() {
        // over all 0/1 configurations at m = 4: mass over Λ^n is C(γ(Λ), n)
        let m = 4usize;
        for bits in 0u32..(1 << m) {
            let gamma = Configuration::new((0..m).map(|x| u64::from(bits >> x & 1)).collect());
            for lam_bits in 0u32..(1 << m) {
                let lam: Vec<usize> = (0..m).filter(|&x| lam_bits >> x & 1 == 1).collect();
                let points = gamma.points_in(&lam);
                for n in 0..=3usize {
                    let mass = restrict_to_box(&binom_choose(&gamma, n), &lam);
                    let expected = crate::combinat::binomial_rat(points as usize, n);
                    assert_eq!(mass, expected, "γ={bits:04b} Λ={lam:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn box_restriction_reduces_to_one_dim() {
        use crate::series::one_dim_sheffer_value;
        let spec = LiftedBinomialSpec::falling(uniform(3), 5);
        let eta = dist(&[2, 3, 1]);
        let lam = vec![0, 2];
        let t = eta.mass_on(&lam);
        for n in 1..=5 {
            let mass = restrict_to_box(&spec.family().eval_basic(&eta, n).unwrap(), &lam);
            let p_n = one_dim_sheffer_value(spec.a_series(), None, &Rational::one(), &t, n);
            assert_eq!(mass, p_n);
        }
        assert_eq!(restrict_to_box(&spec.family().eval_basic(&eta, 2).unwrap(), &[]), int(0));
    }

    #[test]
    fn disjoint_support_factorization() {
        let spec = LiftedBinomialSpec::falling(uniform(2), 4);
        let omega = dist(&[3, 5]);
        let xi = tf(&[2, 0]);
        let phi = tf(&[0, 1]);
        assert!(spec.disjoint_support_check(&omega, &xi, &phi, 1, 1).unwrap());
        assert!(spec.disjoint_support_check(&omega, &xi, &phi, 0, 2).unwrap());

        let lag = LiftedBinomialSpec::laguerre_binomial(uniform(4), 4);
        let omega4 = dist(&[1, -2, 3, 1]);
        let xi4 = TestFunction::new(vec![int(1), rat(1, 2), int(0), int(0)]);
        let phi4 = TestFunction::new(vec![int(0), int(0), int(2), int(-1)]);
        assert!(lag.disjoint_support_check(&omega4, &xi4, &phi4, 2, 2).unwrap());

        assert_eq!(
            spec.disjoint_support_check(&omega, &tf(&[1, 1]), &phi, 1, 1).unwrap_err(),
            UmbraError::OverlappingSupports(1)
        );
    }

    #[test]
    fn ordered_block_sum_matches_partition_eval() {
        let spec = LiftedBinomialSpec::laguerre_binomial(uniform(2), 5);
        let omega = dist(&[2, -1]);
        let xi = TestFunction::new(vec![rat(1, 2), int(1)]);
        for n in 0..=5 {
            assert_eq!(
                laguerre_ordered_block_eval(&omega, &xi, n),
                spec.eval_partition(&omega, &xi, n),
                "n={n}"
            );
        }
    }

    #[test]
    fn abel_spot_values() {
        // α = 1: a_2 = -1, a_3 = 3/2, a_4 = -8/3
        let spec = LiftedBinomialSpec::abel(uniform(1), 4, &int(1)).unwrap();
        assert_eq!(spec.a_series().coeff(2), int(-1));
        assert_eq!(spec.a_series().coeff(3), rat(3, 2));
        assert_eq!(spec.a_series().coeff(4), rat(-8, 3));
        // q(u) = u e^u
        assert_eq!(spec.q_series().coeff(1), int(1));
        assert_eq!(spec.q_series().coeff(2), int(1));
        assert_eq!(spec.q_series().coeff(3), rat(1, 2));
    }
}
