//! Sheffer families: a binomial-type base together with an invertible
//! shift-invariant operator, encoded by the series `τ` with `τ(0) = 1`.
//!
//! The kernels are `Sⁿ(ω) = Σ_k C(n,k) ρ^{(k)} ⊙ P^{(n-k)}(ω)` where the
//! constant kernels `ρ^{(n)} = Sⁿ(0)` come from `1/τ(A(ξ))` and the inverse
//! sequence `κ` from `τ(A(ξ))`. Lifted families are built from a pair of
//! one-variable series `(a, c)` with `λ(u) = -c(a(u))`; their `ρ` kernels are
//! computed both by the set-partition formula in `λ` and through the series
//! reciprocal, and the two routes are required to agree at construction time.
//!
//! Orthogonality is checked by exact moments of product measures whose
//! per-site laws are read off the Laplace transform: Gaussian with variance
//! `w_x` for Hermite, Poisson with intensity `w_x` for Charlier, and Gamma
//! with shape `w_x` (unit scale) for the orthogonal Laguerre family.

use itertools::Itertools;

use num_traits::{One, Zero};

use crate::combinat::{
    binomial_rat, cycles_of, double_factorial_odd, factorial_rat, rgs_block_sizes, set_partitions,
    stirling2,
};
use crate::error::{Result, UmbraError};
use crate::family::{contract_sequence, lower_in_sequence_basis, Basis, BinomialFamily, PolyInBasis};
use crate::lifted::LiftedBinomialSpec;
use crate::rational::{from_big, int, pow, Rational};
use crate::series::PowerSeries1D;
use crate::tensor::{Distribution, MultiIndex, SiteSpace, SymTensor, TestFunction};
use crate::tenseries::ScalarTensorSeries;

/// Per-site law of the product orthogonality measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Gaussian,
    Poisson,
    Gamma,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Gaussian => "gaussian",
            MeasureKind::Poisson => "poisson",
            MeasureKind::Gamma => "gamma",
        }
    }
}

/// A product measure over the sites, with the per-site parameter taken from
/// the site weight.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    kind: MeasureKind,
    space: SiteSpace,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind, space: SiteSpace) -> Self {
        Self { kind, space }
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn space(&self) -> &SiteSpace {
        &self.space
    }

    /// Raw moment `E[ω_x^p]` of the per-site law.
    pub fn moment_power(&self, site: usize, p: usize) -> Rational {
        let w = self.space.weight(site);
        match self.kind {
            // variance w: odd moments vanish, E[x^{2r}] = (2r-1)!! w^r
            MeasureKind::Gaussian => {
                if p % 2 == 1 {
                    Rational::zero()
                } else {
                    from_big(double_factorial_odd(p / 2)) * pow(w, p / 2)
                }
            }
            // intensity w: Touchard value Σ_j S(p,j) w^j
            MeasureKind::Poisson => (1..=p)
                .map(|j| from_big(stirling2(p, j)) * pow(w, j))
                .fold(if p == 0 { Rational::one() } else { Rational::zero() }, |a, b| a + b),
            // shape w, unit scale: E[x^p] = w (w+1) ⋯ (w+p-1)
            MeasureKind::Gamma => {
                let mut acc = Rational::one();
                for j in 0..p {
                    acc *= w + int(j as i64);
                }
                acc
            }
        }
    }

    /// Mixed moment `E[ω_{x_1} ⋯ ω_{x_n}]` — sites are independent, so the
    /// value factors over the runs of the index.
    pub fn moment(&self, idx: &MultiIndex) -> Rational {
        let mut acc = Rational::one();
        for (site, count) in idx.runs() {
            acc *= self.moment_power(site, count);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// The moment kernel `E[ω^{⊗n}]` as a symmetric tensor.
    pub fn moment_tensor(&self, n: usize) -> SymTensor {
        let m = self.space.site_count();
        let mut t = SymTensor::zero(m, n);
        for idx in crate::tensor::multisets(m, n) {
            t.set_coeff(idx.clone(), self.moment(&idx));
        }
        t
    }
}

/// One-variable data of a lifted Sheffer family.
#[derive(Debug, Clone)]
pub struct LiftedShefferSeries {
    a: PowerSeries1D,
    q: PowerSeries1D,
    c: PowerSeries1D,
    lambda: PowerSeries1D,
}

impl LiftedShefferSeries {
    pub fn a(&self) -> &PowerSeries1D {
        &self.a
    }

    pub fn q(&self) -> &PowerSeries1D {
        &self.q
    }

    pub fn c(&self) -> &PowerSeries1D {
        &self.c
    }

    /// `λ(u) = -c(a(u))`, stored with plain coefficients.
    pub fn lambda(&self) -> &PowerSeries1D {
        &self.lambda
    }

    /// Divided coefficient `α_k = a_k k!`.
    pub fn alpha_coeff(&self, k: usize) -> Rational {
        self.a.coeff(k) * factorial_rat(k)
    }

    /// Divided coefficient `λ_k` with `λ(u) = Σ λ_k u^k / k!`.
    pub fn lambda_coeff(&self, k: usize) -> Rational {
        self.lambda.coeff(k) * factorial_rat(k)
    }
}

/// A Sheffer family: base binomial family plus the `τ`/`ρ`/`κ` data.
#[derive(Debug, Clone)]
pub struct ShefferFamily {
    base: BinomialFamily,
    space: SiteSpace,
    /// Stored in divided form: slot `k` is `τ^{(k)}/k!`.
    tau: ScalarTensorSeries,
    rho: Vec<SymTensor>,
    kappa: Vec<SymTensor>,
    lifted: Option<LiftedShefferSeries>,
    measure: Option<MeasureKind>,
}

impl ShefferFamily {
    /// Sheffer family for the base's delta operators with generating series
    /// `exp⟨ω, A(ξ)⟩ / τ(A(ξ))`. The series is passed in divided form
    /// (slot `k` holds `τ^{(k)}/k!`) and must have `τ(0) = 1`.
    pub fn from_tau(
        base: BinomialFamily,
        space: SiteSpace,
        tau: ScalarTensorSeries,
    ) -> Result<Self> {
        assert_eq!(base.site_count(), space.site_count(), "site count mismatch");
        assert_eq!(tau.site_count(), base.site_count(), "site count mismatch");
        assert_eq!(tau.degree(), base.degree(), "truncation degree mismatch");
        if tau.slot(0).scalar_value() != Rational::one() {
            return Err(UmbraError::BadTauNormalization(tau.slot(0).scalar_value().to_string()));
        }
        let kappa_series = tau.compose_vector(base.a_series());
        let rho_series = kappa_series.reciprocal().expect("τ(0) = 1");
        let rho = undivide(&rho_series);
        let kappa = undivide(&kappa_series);
        Ok(Self { base, space, tau, rho, kappa, lifted: None, measure: None })
    }

    /// Lift a one-variable Sheffer pair `(a, c)`: base the diagonal lift of
    /// `a`, and `τ(ξ) = exp⟨c(ξ)⟩` against the site weights. Requires
    /// `a_0 = 0`, `a_1 = 1` and `c_0 = 0`.
    pub fn lift(space: SiteSpace, a: PowerSeries1D, c: PowerSeries1D) -> Result<Self> {
        assert_eq!(a.degree(), c.degree(), "truncation degree mismatch");
        if !c.coeff(0).is_zero() {
            return Err(UmbraError::BadShiftSeriesNormalization(c.coeff(0).to_string()));
        }
        let spec = LiftedBinomialSpec::new(space.clone(), a.clone())?;
        let degree = a.degree();
        let m = space.site_count();

        // τ = exp ∘ ⟨c(ξ)⟩, with slot k of the exponent c_k · Diag_k* applied
        // to the weight vector
        let mut c_slots = Vec::with_capacity(degree + 1);
        c_slots.push(SymTensor::zero(m, 0));
        for k in 1..=degree {
            let ck = c.coeff(k);
            c_slots.push(if ck.is_zero() {
                SymTensor::zero(m, k)
            } else {
                SymTensor::diag_embed(space.weights(), k).scale(&ck)
            });
        }
        let c_series = ScalarTensorSeries::from_slots(c_slots);
        let tau = ScalarTensorSeries::compose_1d(&PowerSeries1D::exp(degree), &c_series)
            .expect("c(0) = 0");

        let lambda = -&c.compose(&a).expect("a(0) = 0");
        let data = LiftedShefferSeries { a, q: spec.q_series().clone(), c, lambda };

        let mut fam = Self::from_tau(spec.family().clone(), space, tau)?;

        // the Faà di Bruno route to ρ must agree with the series route
        for (n, rho_n) in fam.rho.iter().enumerate() {
            let by_partitions =
                partition_diag_tensor(|size| data.lambda_coeff(size), fam.space.weights(), n);
            assert_eq!(*rho_n, by_partitions, "ρ route mismatch at order {n}");
        }

        fam.lifted = Some(data);
        Ok(fam)
    }

    /// Hermite family: Appell with `c(u) = u²/2`; orthogonal under the
    /// Gaussian product measure.
    pub fn hermite(space: SiteSpace, degree: usize) -> Self {
        let a = PowerSeries1D::identity(degree);
        let mut c = PowerSeries1D::zero(degree);
        if degree >= 2 {
            c.set_coeff(2, crate::rational::rat(1, 2));
        }
        let mut fam = Self::lift(space, a, c).expect("normalized pair");
        fam.measure = Some(MeasureKind::Gaussian);
        fam
    }

    /// Charlier family: `a(u) = log(1+u)`, `c(u) = e^u - 1`; orthogonal under
    /// the Poisson product measure.
    pub fn charlier(space: SiteSpace, degree: usize) -> Self {
        let a = PowerSeries1D::log1p(degree);
        let c = PowerSeries1D::expm1(degree);
        let mut fam = Self::lift(space, a, c).expect("normalized pair");
        fam.measure = Some(MeasureKind::Poisson);
        fam
    }

    /// Orthogonal Laguerre family: `a(u) = u/(1+u)`, `c(u) = -log(1-u)`;
    /// orthogonal under the Gamma product measure.
    pub fn laguerre_orthogonal(space: SiteSpace, degree: usize) -> Self {
        let a = PowerSeries1D::u_over_one_plus_u(degree);
        let c = PowerSeries1D::neg_log1m(degree);
        let mut fam = Self::lift(space, a, c).expect("normalized pair");
        fam.measure = Some(MeasureKind::Gamma);
        fam
    }

    /// Appell family for a given `τ`: the base is the monomial family.
    pub fn appell(space: SiteSpace, tau: ScalarTensorSeries) -> Result<Self> {
        let base = BinomialFamily::monomial(space.site_count(), tau.degree());
        Self::from_tau(base, space, tau)
    }

    pub fn base(&self) -> &BinomialFamily {
        &self.base
    }

    pub fn space(&self) -> &SiteSpace {
        &self.space
    }

    pub fn site_count(&self) -> usize {
        self.base.site_count()
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    pub fn lifted_series(&self) -> Option<&LiftedShefferSeries> {
        self.lifted.as_ref()
    }

    pub fn measure_kind(&self) -> Option<MeasureKind> {
        self.measure
    }

    /// `τ` in divided form (slot `k` holds `τ^{(k)}/k!`).
    pub fn tau_series(&self) -> &ScalarTensorSeries {
        &self.tau
    }

    /// `τ^{(k)}`, the plain coefficient kernel.
    pub fn tau_coeff(&self, k: usize) -> SymTensor {
        self.tau.slot(k).scale(&factorial_rat(k))
    }

    /// `ρ^{(k)} = S^{(k)}(0)`.
    pub fn rho(&self, k: usize) -> &SymTensor {
        &self.rho[k]
    }

    /// `κ^{(k)}`, the divided expansion of `τ(A(ξ))` rescaled by `k!`.
    pub fn kappa(&self, k: usize) -> &SymTensor {
        &self.kappa[k]
    }

    /// `Sⁿ(ω) = Σ_k C(n,k) ρ^{(k)} ⊙ P^{(n-k)}(ω)`.
    pub fn eval_sheffer(&self, omega: &Distribution, n: usize) -> Result<SymTensor> {
        if n > self.degree() {
            return Err(UmbraError::DegreeOverflow { degree: n, max: self.degree() });
        }
        let mut acc = SymTensor::zero(self.site_count(), n);
        for k in 0..=n {
            let term = self.rho[k].sym_product(&self.base.eval_basic(omega, n - k)?);
            acc = &acc + &term.scale(&binomial_rat(n, k));
        }
        Ok(acc)
    }

    /// The umbral operator `T`: sends `Σ⟨Sⁿ, f⁽ⁿ⁾⟩` to `Σ⟨Pⁿ, f⁽ⁿ⁾⟩`
    /// (identical coefficients, relabeled basis).
    pub fn t_apply(&self, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(p.basis(), Basis::S, "T acts on Sheffer-basis coefficients");
        PolyInBasis::new(Basis::P, p.slots().to_vec())
    }

    /// The inverse umbral operator `T⁻¹`.
    pub fn t_inverse_apply(&self, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(p.basis(), Basis::P, "T⁻¹ acts on family-basis coefficients");
        PolyInBasis::new(Basis::S, p.slots().to_vec())
    }

    /// Rewrite a Sheffer-basis polynomial in the base family's basis: the
    /// `ρ` kernels contract into the coefficients.
    pub fn sheffer_to_basic(&self, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(p.basis(), Basis::S, "input must be in the Sheffer basis");
        PolyInBasis::new(Basis::P, contract_sequence(&self.rho, p))
    }

    /// Rewrite a family-basis polynomial in the Sheffer basis via the `κ`
    /// kernels.
    pub fn basic_to_sheffer(&self, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(p.basis(), Basis::P, "input must be in the family basis");
        PolyInBasis::new(Basis::S, contract_sequence(&self.kappa, p))
    }

    /// Any basis to the monomial basis.
    pub fn to_monomial(&self, p: &PolyInBasis) -> PolyInBasis {
        match p.basis() {
            Basis::Monomial => p.clone(),
            Basis::P => self.base.basic_to_monomial(p),
            Basis::S => self.base.basic_to_monomial(&self.sheffer_to_basic(p)),
        }
    }

    fn from_monomial(&self, p: &PolyInBasis, target: Basis) -> PolyInBasis {
        match target {
            Basis::Monomial => p.clone(),
            Basis::P => self.base.monomial_to_basic(p),
            Basis::S => self.basic_to_sheffer(&self.base.monomial_to_basic(p)),
        }
    }

    /// The family's lowering operator `Q(ζ)`: on Sheffer-basis coefficients
    /// it is the plain annihilation action, which is the defining property of
    /// a Sheffer sequence.
    pub fn lower(&self, zeta: &Distribution, p: &PolyInBasis) -> PolyInBasis {
        match p.basis() {
            Basis::S => lower_in_sequence_basis(zeta, p),
            _ => self.base.lower(zeta, p),
        }
    }

    /// Shift `ω ↦ P(ω + ζ)` in any basis.
    pub fn shift(&self, zeta: &Distribution, p: &PolyInBasis) -> PolyInBasis {
        let target = p.basis();
        let mono = self.to_monomial(p);
        let shifted = self.base.shift(zeta, &mono);
        self.from_monomial(&shifted, target)
    }

    /// Value of the polynomial at a distribution.
    pub fn eval_poly(&self, p: &PolyInBasis, omega: &Distribution) -> Rational {
        match p.basis() {
            Basis::S => {
                let mut acc = Rational::zero();
                for n in 0..=p.degree() {
                    let f = p.slot(n);
                    if !f.is_zero() {
                        acc += self.eval_sheffer(omega, n).expect("degree checked").pair(&f);
                    }
                }
                acc
            }
            _ => self.base.eval_poly(p, omega),
        }
    }

    /// Exact check of the Sheffer binomial law
    /// `Sⁿ(ω+ζ) = Σ_k C(n,k) S^{(k)}(ω) ⊙ P^{(n-k)}(ζ)`.
    pub fn binomial_identity_check(
        &self,
        omega: &Distribution,
        zeta: &Distribution,
        n: usize,
    ) -> Result<bool> {
        let lhs = self.eval_sheffer(&omega.add(zeta), n)?;
        let mut rhs = SymTensor::zero(self.site_count(), n);
        for k in 0..=n {
            let term =
                self.eval_sheffer(omega, k)?.sym_product(&self.base.eval_basic(zeta, n - k)?);
            rhs = &rhs + &term.scale(&binomial_rat(n, k));
        }
        Ok(lhs == rhs)
    }

    /// `⟨Sⁿ(ω), ξ^{⊗n}⟩` by the marked-partition sum: every block of a set
    /// partition independently carries either the mark `+` with weight
    /// `α_{|B|} ⟨ω, ξ^{|B|}⟩` or the mark `-` with weight `λ_{|B|} ⟨ξ^{|B|}⟩`.
    pub fn marked_partition_eval(
        &self,
        omega: &Distribution,
        xi: &TestFunction,
        n: usize,
    ) -> Result<Rational> {
        let data = self.lifted.as_ref().ok_or(UmbraError::NotLifted)?;
        if n > self.degree() {
            return Err(UmbraError::DegreeOverflow { degree: n, max: self.degree() });
        }
        if n == 0 {
            return Ok(Rational::one());
        }
        let plus: Vec<Rational> = (0..=n)
            .map(|s| {
                if s == 0 {
                    Rational::zero()
                } else {
                    data.alpha_coeff(s) * omega.pair(&xi.pointwise_pow(s))
                }
            })
            .collect();
        let minus: Vec<Rational> = (0..=n)
            .map(|s| {
                if s == 0 {
                    Rational::zero()
                } else {
                    data.lambda_coeff(s) * self.space.integral_power(xi, s)
                }
            })
            .collect();
        let mut acc = Rational::zero();
        for rgs in set_partitions(n) {
            let sizes = rgs_block_sizes(&rgs);
            let blocks = sizes.len();
            for marks in 0u32..(1 << blocks) {
                let mut term = Rational::one();
                for (i, &size) in sizes.iter().enumerate() {
                    term *= if marks >> i & 1 == 1 { &plus[size] } else { &minus[size] };
                    if term.is_zero() {
                        break;
                    }
                }
                acc += term;
            }
        }
        Ok(acc)
    }

    /// `n! [tⁿ] exp[Σ_x ω_x a(tξ_x) - Σ_x w_x c(a(tξ_x))]` — the
    /// generating-function route for lifted families.
    pub fn generating_coefficient(
        &self,
        omega: &Distribution,
        xi: &TestFunction,
        n: usize,
    ) -> Result<Rational> {
        let data = self.lifted.as_ref().ok_or(UmbraError::NotLifted)?;
        if n > self.degree() {
            return Err(UmbraError::DegreeOverflow { degree: n, max: self.degree() });
        }
        let degree = self.degree();
        let lambda = &data.lambda;
        let mut exponent = PowerSeries1D::zero(degree);
        for (x, w) in omega.masses().iter().enumerate() {
            if !w.is_zero() {
                exponent = &exponent + &data.a.scale_argument(xi.value(x)).scale(w);
            }
        }
        // -⟨c(a(tξ))⟩ = Σ_x w_x λ(t ξ_x)
        for (x, w) in self.space.weights().iter().enumerate() {
            exponent = &exponent + &lambda.scale_argument(xi.value(x)).scale(w);
        }
        let series = PowerSeries1D::exp(degree).compose(&exponent).expect("constant-free");
        Ok(series.coeff(n) * factorial_rat(n))
    }

    /// One-dimensional reduction: the value of the classical Sheffer
    /// polynomial with generating series `exp[t a(u) - vol · c(a(u))]`.
    pub fn one_dim_value(&self, t: &Rational, vol: &Rational, n: usize) -> Result<Rational> {
        let data = self.lifted.as_ref().ok_or(UmbraError::NotLifted)?;
        Ok(crate::series::one_dim_sheffer_value(&data.a, Some(&data.c), vol, t, n))
    }
}

/// Rescale divided series slots into plain coefficient kernels.
fn undivide(series: &ScalarTensorSeries) -> Vec<SymTensor> {
    series
        .slots()
        .iter()
        .enumerate()
        .map(|(n, t)| t.scale(&factorial_rat(n)))
        .collect()
}

/// `Σ_π Π_B weight(|B|) · ⊙_B Diag*_{|B|} v` — the tensor-level Faà di Bruno
/// sum over set partitions.
pub(crate) fn partition_diag_tensor<F>(weight: F, values: &[Rational], n: usize) -> SymTensor
where
    F: Fn(usize) -> Rational,
{
    let m = values.len();
    if n == 0 {
        return SymTensor::scalar(m, Rational::one());
    }
    let diag: Vec<SymTensor> = (0..=n)
        .map(|k| {
            if k == 0 {
                SymTensor::scalar(m, Rational::one())
            } else {
                SymTensor::diag_embed(values, k)
            }
        })
        .collect();
    let mut acc = SymTensor::zero(m, n);
    for rgs in set_partitions(n) {
        let mut scale = Rational::one();
        let mut prod = SymTensor::scalar(m, Rational::one());
        for size in rgs_block_sizes(&rgs) {
            scale *= weight(size);
            if scale.is_zero() {
                break;
            }
            prod = prod.sym_product(&diag[size]);
        }
        if !scale.is_zero() {
            acc = &acc + &prod.scale(&scale);
        }
    }
    acc
}

/// Marked-permutation evaluator for the orthogonal Laguerre family:
/// every cycle `ν` of a permutation carries `+` with weight
/// `|ν| ⟨-ω, (-ξ)^{|ν|}⟩` or `-` with weight `⟨(-ξ)^{|ν|}⟩`.
pub fn laguerre_marked_permutation_eval(
    space: &SiteSpace,
    omega: &Distribution,
    xi: &TestFunction,
    n: usize,
) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    let neg_xi = TestFunction::new(xi.values().iter().map(|v| -v).collect());
    let minus_omega = omega.neg();
    let plus: Vec<Rational> = (0..=n)
        .map(|l| {
            if l == 0 {
                Rational::zero()
            } else {
                int(l as i64) * minus_omega.pair(&neg_xi.pointwise_pow(l))
            }
        })
        .collect();
    let minus: Vec<Rational> = (0..=n)
        .map(|l| if l == 0 { Rational::zero() } else { space.integral_power(&neg_xi, l) })
        .collect();
    let mut acc = Rational::zero();
    for perm in (0..n).permutations(n) {
        let cycles = cycles_of(&perm);
        for marks in 0u32..(1 << cycles.len()) {
            let mut term = Rational::one();
            for (i, cycle) in cycles.iter().enumerate() {
                term *= if marks >> i & 1 == 1 { &plus[cycle.len()] } else { &minus[cycle.len()] };
                if term.is_zero() {
                    break;
                }
            }
            acc += term;
        }
    }
    acc
}

/// Exact expectation `E[p(ω) q(ω)]` under the matched product measure.
/// The family must carry the measure tag that `spec` uses.
pub fn orth_inner(
    fam: &ShefferFamily,
    spec: &MeasureSpec,
    p: &PolyInBasis,
    q: &PolyInBasis,
) -> Result<Rational> {
    match fam.measure_kind() {
        Some(kind) if kind == spec.kind() => {}
        kind => {
            return Err(UmbraError::MeasureMismatch {
                family: kind.map_or("untagged".to_string(), |k| k.name().to_string()),
                measure: spec.kind().name().to_string(),
            });
        }
    }
    let p_mono = fam.to_monomial(p);
    let q_mono = fam.to_monomial(q);
    let mut acc = Rational::zero();
    for j in 0..=p_mono.degree() {
        let f = p_mono.slot(j);
        if f.is_zero() {
            continue;
        }
        for n in 0..=q_mono.degree() {
            let g = q_mono.slot(n);
            if g.is_zero() {
                continue;
            }
            for (fi, fv) in f.entries() {
                for (gi, gv) in g.entries() {
                    let moment = spec.moment(&fi.union(gi));
                    if moment.is_zero() {
                        continue;
                    }
                    acc += fi.orbit_size_rat() * gi.orbit_size_rat() * fv * gv * moment;
                }
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::tensor::multisets;

    fn uniform(m: usize) -> SiteSpace {
        SiteSpace::uniform(m)
    }

    fn dist(vals: &[i64]) -> Distribution {
        Distribution::new(vals.iter().map(|&v| int(v)).collect())
    }

    fn tf(vals: &[i64]) -> TestFunction {
        TestFunction::new(vals.iter().map(|&v| int(v)).collect())
    }

    fn single_site_value(fam: &ShefferFamily, t: &Rational, n: usize) -> Rational {
        let omega = Distribution::new(vec![t.clone()]);
        let xi = TestFunction::new(vec![Rational::one()]);
        fam.eval_sheffer(&omega, n).unwrap().eval_power(&xi)
    }

    #[test]
    fn unit_tau_gives_the_basic_sequence() {
        let base = BinomialFamily::monomial(2, 4);
        let fam =
            ShefferFamily::from_tau(base, uniform(2), ScalarTensorSeries::unit(2, 4)).unwrap();
        let omega = dist(&[2, -1]);
        for n in 0..=4 {
            assert_eq!(
                fam.eval_sheffer(&omega, n).unwrap(),
                fam.base().eval_basic(&omega, n).unwrap()
            );
        }
    }

    #[test]
    fn tau_normalization_enforced() {
        let base = BinomialFamily::monomial(2, 3);
        let bad = ScalarTensorSeries::unit(2, 3).scale(&int(2));
        assert!(matches!(
            ShefferFamily::from_tau(base, uniform(2), bad),
            Err(UmbraError::BadTauNormalization(_))
        ));
        let a = PowerSeries1D::identity(3);
        let c = PowerSeries1D::one(3); // c_0 = 1
        assert!(matches!(
            ShefferFamily::lift(uniform(2), a, c),
            Err(UmbraError::BadShiftSeriesNormalization(_))
        ));
    }

    #[test]
    fn charlier_single_site_values() {
        // S²(t) = t² - 3t + 1 at unit weight
        let fam = ShefferFamily::charlier(uniform(1), 4);
        let t = rat(9, 2);
        assert_eq!(single_site_value(&fam, &t, 2), &t * &t - int(3) * &t + int(1));
        // ρ⁽¹⁾ is minus the weight vector
        assert_eq!(*fam.rho(1), SymTensor::from_power(&[int(1)], 1).neg());
    }

    #[test]
    fn charlier_rho_is_minus_weights_multi_site() {
        let space = SiteSpace::new(vec![rat(1, 2), int(2)]).unwrap();
        let fam = ShefferFamily::charlier(space.clone(), 3);
        let w = SymTensor::from_power(space.weights(), 1);
        assert_eq!(*fam.rho(1), w.neg());
    }

    #[test]
    fn hermite_values_and_rho() {
        let fam = ShefferFamily::hermite(uniform(1), 4);
        let t = rat(-3, 2);
        assert_eq!(single_site_value(&fam, &t, 2), &t * &t - int(1));

        // ρ⁽²⁾ pairs to -⟨ξ²⟩
        let fam2 = ShefferFamily::hermite(uniform(2), 4);
        let xi = tf(&[2, 3]);
        assert_eq!(fam2.rho(2).eval_power(&xi), -fam2.space().integral_power(&xi, 2));
        assert!(fam2.rho(1).is_zero());
    }

    #[test]
    fn monic_laguerre_single_site() {
        // binomial-type Laguerre base: p_2(t) = t² - 2t
        let fam = ShefferFamily::laguerre_orthogonal(uniform(1), 4);
        let t = rat(7, 3);
        let omega = Distribution::new(vec![t.clone()]);
        let xi = TestFunction::new(vec![int(1)]);
        let p2 = fam.base().eval_basic(&omega, 2).unwrap().eval_power(&xi);
        assert_eq!(p2, &t * &t - int(2) * &t);
    }

    #[test]
    fn kappa_rho_reciprocity() {
        let fam = ShefferFamily::charlier(uniform(2), 4);
        for n in 1..=4usize {
            let mut acc = SymTensor::zero(2, n);
            for k in 0..=n {
                let term = fam.kappa(k).sym_product(fam.rho(n - k));
                acc = &acc + &term.scale(&binomial_rat(n, k));
            }
            assert!(acc.is_zero(), "order {n}");
        }
    }

    #[test]
    fn sheffer_binomial_identity() {
        let fam = ShefferFamily::charlier(uniform(2), 4);
        let omega = dist(&[3, 1]);
        let zeta = dist(&[1, 2]);
        for n in 0..=4 {
            assert!(fam.binomial_identity_check(&omega, &zeta, n).unwrap());
        }
    }

    #[test]
    fn kappa_inversion_recovers_the_base() {
        // Pⁿ(ω) = Σ C(n,k) κ^{(k)} ⊙ S^{(n-k)}(ω)
        let fam = ShefferFamily::laguerre_orthogonal(uniform(2), 4);
        let omega = dist(&[2, -1]);
        for n in 0..=4usize {
            let mut acc = SymTensor::zero(2, n);
            for k in 0..=n {
                let term = fam.kappa(k).sym_product(&fam.eval_sheffer(&omega, n - k).unwrap());
                acc = &acc + &term.scale(&binomial_rat(n, k));
            }
            assert_eq!(acc, fam.base().eval_basic(&omega, n).unwrap());
        }
    }

    #[test]
    fn lowering_law_in_the_sheffer_basis() {
        // Q(ζ)⟨Sⁿ, f⟩ = ⟨S^{n-1}, 𝔄(ζ) f⟩: the direct annihilation action
        // agrees with conversion into the base family and back
        let fam = ShefferFamily::charlier(uniform(2), 4);
        let zeta = dist(&[1, -1]);
        for n in 1..=4usize {
            for idx in multisets(2, n) {
                let mut f = SymTensor::zero(2, n);
                f.set_coeff(idx, rat(3, 2));
                let p = PolyInBasis::from_slot(Basis::S, f);
                let direct = fam.lower(&zeta, &p);
                let via_base =
                    fam.basic_to_sheffer(&fam.base().lower(&zeta, &fam.sheffer_to_basic(&p)));
                assert_eq!(direct, via_base);
            }
        }
    }

    #[test]
    fn umbral_operator_is_the_kappa_operator() {
        use crate::family::ShiftInvariantOp;
        let fam = ShefferFamily::charlier(uniform(2), 4);
        let f = SymTensor::from_power(&[int(1), int(2)], 3);
        let p = PolyInBasis::from_slot(Basis::S, f.clone());
        // T relabels the coefficients
        let tp = fam.t_apply(&p);
        assert_eq!(tp.basis(), Basis::P);
        assert_eq!(tp.slots(), p.slots());
        // and T equals the κ-sequence operator acting on the P-expansion
        let kappa_op = ShiftInvariantOp::from_slots(
            (0..=fam.degree()).map(|k| fam.kappa(k).clone()).collect(),
        );
        let expanded = fam.sheffer_to_basic(&p);
        assert_eq!(kappa_op.apply(fam.base(), &expanded), tp);
        // round trip
        assert_eq!(fam.t_inverse_apply(&tp), p);
        // conversions are mutually inverse
        assert_eq!(fam.basic_to_sheffer(&fam.sheffer_to_basic(&p)), p);
    }

    #[test]
    fn marked_partition_matches_kernels() {
        let omega = dist(&[2, -1]);
        let xi = TestFunction::new(vec![rat(1, 2), int(1)]);
        for fam in [
            ShefferFamily::hermite(uniform(2), 5),
            ShefferFamily::charlier(uniform(2), 5),
            ShefferFamily::laguerre_orthogonal(uniform(2), 5),
        ] {
            for n in 0..=5 {
                let by_marks = fam.marked_partition_eval(&omega, &xi, n).unwrap();
                let by_kernel = fam.eval_sheffer(&omega, n).unwrap().eval_power(&xi);
                let by_series = fam.generating_coefficient(&omega, &xi, n).unwrap();
                assert_eq!(by_marks, by_kernel, "n={n}");
                assert_eq!(by_marks, by_series, "n={n}");
            }
        }
    }

    #[test]
    fn marked_partition_linear_term() {
        // n = 1: α_1⟨ω,ξ⟩ + λ_1⟨ξ⟩
        let fam = ShefferFamily::charlier(uniform(2), 3);
        let omega = dist(&[3, 2]);
        let xi = tf(&[1, 2]);
        let data = fam.lifted_series().unwrap();
        let expected = data.alpha_coeff(1) * omega.pair(&xi)
            + data.lambda_coeff(1) * fam.space().integral(&xi);
        assert_eq!(fam.marked_partition_eval(&omega, &xi, 1).unwrap(), expected);
    }

    #[test]
    fn hermite_marked_partition_quadratic() {
        let fam = ShefferFamily::hermite(uniform(2), 4);
        let omega = dist(&[1, 2]);
        let xi = tf(&[2, -1]);
        let pairing = omega.pair(&xi);
        let expected = &pairing * &pairing - fam.space().integral_power(&xi, 2);
        assert_eq!(fam.marked_partition_eval(&omega, &xi, 2).unwrap(), expected);
    }

    #[test]
    fn laguerre_marked_permutation_sum() {
        let space = uniform(2);
        let fam = ShefferFamily::laguerre_orthogonal(space.clone(), 4);
        let omega = dist(&[2, 1]);
        let xi = TestFunction::new(vec![rat(1, 3), int(1)]);
        for n in 0..=4 {
            assert_eq!(
                laguerre_marked_permutation_eval(&space, &omega, &xi, n),
                fam.eval_sheffer(&omega, n).unwrap().eval_power(&xi),
                "n={n}"
            );
        }
    }

    #[test]
    fn hermite_reduces_to_one_dimension() {
        // any ξ with ⟨ξ²⟩ = 1 collapses Sⁿ to the classical Hermite value
        let space = SiteSpace::new(vec![rat(1, 4), rat(3, 4)]).unwrap();
        let fam = ShefferFamily::hermite(space.clone(), 6);
        let xi = tf(&[1, 1]);
        assert_eq!(space.integral_power(&xi, 2), int(1));
        let omega = Distribution::new(vec![rat(5, 2), int(-1)]);
        let t = omega.pair(&xi);
        for n in 0..=6 {
            let lhs = fam.eval_sheffer(&omega, n).unwrap().eval_power(&xi);
            let rhs = fam.one_dim_value(&t, &int(1), n).unwrap();
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn charlier_dual_expansions() {
        use crate::lifted::falling_factorial_product;
        // S in falling factorials with ⟨-ξ⟩ powers, and the inverse expansion
        let space = uniform(2);
        let fam = ShefferFamily::charlier(space.clone(), 5);
        let omega = dist(&[3, 1]);
        let xi = TestFunction::new(vec![rat(1, 2), int(2)]);
        let bracket = space.integral(&xi);
        for n in 0..=5usize {
            let s_val = fam.eval_sheffer(&omega, n).unwrap().eval_power(&xi);
            let mut forward = Rational::zero();
            let mut backward = Rational::zero();
            for k in 0..=n {
                let fall = falling_factorial_product(&omega, n - k).eval_power(&xi);
                forward += binomial_rat(n, k) * pow(&-bracket.clone(), k) * fall;
                let s_low = fam.eval_sheffer(&omega, n - k).unwrap().eval_power(&xi);
                backward += binomial_rat(n, k) * pow(&bracket, k) * s_low;
            }
            assert_eq!(s_val, forward, "forward n={n}");
            assert_eq!(
                falling_factorial_product(&omega, n).eval_power(&xi),
                backward,
                "backward n={n}"
            );
        }
    }

    #[test]
    fn box_restriction_with_volume() {
        // (Sⁿ(η))(Λⁿ) equals the classical value with vol(Λ) in the exponent
        let space = SiteSpace::new(vec![rat(1, 2), rat(1, 2), int(2)]).unwrap();
        for fam in [
            ShefferFamily::charlier(space.clone(), 5),
            ShefferFamily::laguerre_orthogonal(space.clone(), 5),
        ] {
            let eta = dist(&[2, 1, 3]);
            for lam in [vec![0usize, 1], vec![2], vec![0, 2]] {
                let vol = space.vol(&lam);
                let t = eta.mass_on(&lam);
                for n in 1..=5 {
                    let mass = fam.eval_sheffer(&eta, n).unwrap().mass_on(&lam);
                    assert_eq!(mass, fam.one_dim_value(&t, &vol, n).unwrap(), "n={n} Λ={lam:?}");
                }
            }
        }
    }

    #[test]
    fn moment_values() {
        let spec1 = MeasureSpec::new(MeasureKind::Gaussian, uniform(1));
        assert_eq!(spec1.moment_power(0, 4), int(3));
        assert_eq!(spec1.moment_power(0, 3), int(0));
        let spec2 = MeasureSpec::new(MeasureKind::Poisson, uniform(1));
        assert_eq!(spec2.moment_power(0, 2), int(2));
        assert_eq!(spec2.moment_power(0, 0), int(1));
        let spec3 = MeasureSpec::new(MeasureKind::Gamma, uniform(1));
        assert_eq!(spec3.moment_power(0, 2), int(2));
        assert_eq!(spec3.moment_power(0, 3), int(6));

        // mixed moments factor over sites
        let spec = MeasureSpec::new(MeasureKind::Poisson, uniform(2));
        let idx = MultiIndex::new(vec![0, 0, 1]);
        assert_eq!(spec.moment(&idx), int(2));
    }

    #[test]
    fn tau_equals_measure_moments() {
        let space = SiteSpace::new(vec![int(1), rat(1, 2)]).unwrap();
        for (fam, kind) in [
            (ShefferFamily::hermite(space.clone(), 4), MeasureKind::Gaussian),
            (ShefferFamily::charlier(space.clone(), 4), MeasureKind::Poisson),
            (ShefferFamily::laguerre_orthogonal(space.clone(), 4), MeasureKind::Gamma),
        ] {
            let spec = MeasureSpec::new(kind, space.clone());
            for n in 0..=4 {
                assert_eq!(fam.tau_coeff(n), spec.moment_tensor(n), "{} n={n}", kind.name());
            }
        }
    }

    #[test]
    fn orthogonality_hermite_and_charlier() {
        let space = SiteSpace::new(vec![int(1), rat(1, 2)]).unwrap();
        for (fam, kind) in [
            (ShefferFamily::hermite(space.clone(), 6), MeasureKind::Gaussian),
            (ShefferFamily::charlier(space.clone(), 6), MeasureKind::Poisson),
        ] {
            let spec = MeasureSpec::new(kind, space.clone());
            let xi = TestFunction::new(vec![int(1), rat(1, 2)]);
            let psi = TestFunction::new(vec![rat(1, 2), int(2)]);
            let inner_w = space.weighted_inner(&xi, &psi);
            for j in 0..=3usize {
                for n in 0..=3usize {
                    let p =
                        PolyInBasis::from_slot(Basis::S, SymTensor::from_power(xi.values(), j));
                    let q =
                        PolyInBasis::from_slot(Basis::S, SymTensor::from_power(psi.values(), n));
                    let val = orth_inner(&fam, &spec, &p, &q).unwrap();
                    let expected = if j == n {
                        factorial_rat(n) * pow(&inner_w, n)
                    } else {
                        Rational::zero()
                    };
                    assert_eq!(val, expected, "{} j={j} n={n}", kind.name());
                }
            }
        }
    }

    #[test]
    fn orthogonality_laguerre_cycle_formula() {
        let space = SiteSpace::new(vec![int(1), rat(3, 2)]).unwrap();
        let fam = ShefferFamily::laguerre_orthogonal(space.clone(), 6);
        let spec = MeasureSpec::new(MeasureKind::Gamma, space.clone());
        let xi = TestFunction::new(vec![int(1), rat(-1, 2)]);
        let psi = TestFunction::new(vec![rat(1, 2), int(1)]);
        let prod = xi.pointwise_mul(&psi);
        for j in 0..=3usize {
            for n in 0..=3usize {
                let p = PolyInBasis::from_slot(Basis::S, SymTensor::from_power(xi.values(), j));
                let q = PolyInBasis::from_slot(Basis::S, SymTensor::from_power(psi.values(), n));
                let val = orth_inner(&fam, &spec, &p, &q).unwrap();
                let expected = if j == n {
                    let mut sum = Rational::zero();
                    for perm in (0..n).permutations(n) {
                        let mut term = Rational::one();
                        for cycle in cycles_of(&perm) {
                            term *= space.integral_power(&prod, cycle.len());
                        }
                        sum += term;
                    }
                    factorial_rat(n) * sum
                } else {
                    Rational::zero()
                };
                assert_eq!(val, expected, "j={j} n={n}");
            }
        }
    }

    #[test]
    fn measure_mismatch_is_flagged() {
        let space = uniform(2);
        let fam = ShefferFamily::hermite(space.clone(), 3);
        let spec = MeasureSpec::new(MeasureKind::Poisson, space);
        let p = PolyInBasis::from_slot(Basis::S, SymTensor::from_power(&[int(1), int(0)], 1));
        assert!(matches!(
            orth_inner(&fam, &spec, &p, &p),
            Err(UmbraError::MeasureMismatch { .. })
        ));
    }

    #[test]
    fn charlier_poisson_variance() {
        // ⟨S¹, ξ⟩ with ξ = 1 is t - 1: unit variance under Poisson(1)
        let fam = ShefferFamily::charlier(uniform(1), 3);
        let spec = MeasureSpec::new(MeasureKind::Poisson, uniform(1));
        let p = PolyInBasis::from_slot(Basis::S, SymTensor::from_power(&[int(1)], 1));
        assert_eq!(orth_inner(&fam, &spec, &p, &p).unwrap(), int(1));
    }

    #[test]
    fn hermite_rank_one_norm() {
        // ‖ξ‖²_w = s gives E[⟨S², ξ^{⊗2}⟩²] = 2 s²
        let space = SiteSpace::new(vec![int(2), int(1)]).unwrap();
        let fam = ShefferFamily::hermite(space.clone(), 5);
        let spec = MeasureSpec::new(MeasureKind::Gaussian, space.clone());
        let xi = tf(&[1, 1]);
        let s = space.integral_power(&xi, 2);
        let p = PolyInBasis::from_slot(Basis::S, SymTensor::from_power(xi.values(), 2));
        assert_eq!(orth_inner(&fam, &spec, &p, &p).unwrap(), int(2) * &s * &s);
    }

    #[test]
    fn appell_uses_the_full_path() {
        // Appell with τ the Gaussian moments is the Hermite family
        let space = uniform(2);
        let hermite = ShefferFamily::hermite(space.clone(), 4);
        let appell = ShefferFamily::appell(space, hermite.tau_series().clone()).unwrap();
        let omega = dist(&[1, -2]);
        for n in 0..=4 {
            assert_eq!(
                appell.eval_sheffer(&omega, n).unwrap(),
                hermite.eval_sheffer(&omega, n).unwrap()
            );
        }
    }
}
