//! Binomial-type polynomial families and the operator calculus around them.
//!
//! A family is built from a vector tensor series `A` with identity linear
//! slot. Its basic polynomials `Pⁿ(ω) = Σ_k U_{n,k} ω^{⊗k}` have the
//! generating function `exp⟨ω, A(ξ)⟩`; the coefficient operators come from
//! the exponential formula
//!
//! ```text
//! U_{n,k} = (n!/k!) Σ_{i_1+…+i_k = n} Sym (A_{i_1}* ⊗ … ⊗ A_{i_k}*),
//! ```
//!
//! which is exact and independently checkable against composing `exp⟨ω, ξ⟩`
//! with `A`. Polynomials are always manipulated through their coefficient
//! sequences in a tagged basis; operators act on coefficients, never on
//! point evaluations.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::combinat::{binomial_rat, compositions, factorial_rat};
use crate::error::{Result, UmbraError};
use crate::rational::{int, Rational};
use crate::tensor::{multisets, Distribution, MultiIndex, SymTensor};
use crate::tenseries::{adjoint_factors_apply, ScalarTensorSeries, SymToVecMap, VectorTensorSeries};

/// Which expansion a coefficient sequence is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `⟨ω^{⊗k}, f^{(k)}⟩`
    Monomial,
    /// `⟨P^{(k)}(ω), f^{(k)}⟩` for a binomial family
    P,
    /// `⟨S^{(k)}(ω), f^{(k)}⟩` for a Sheffer family
    S,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Monomial => "monomial",
            Basis::P => "p",
            Basis::S => "s",
        }
    }
}

/// A polynomial represented by its test-side coefficient tensors in a tagged
/// basis. Trailing zero slots are trimmed so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyInBasis {
    basis: Basis,
    m: usize,
    coeffs: Vec<SymTensor>,
}

impl PolyInBasis {
    pub fn new(basis: Basis, coeffs: Vec<SymTensor>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least the constant slot");
        let m = coeffs[0].site_count();
        for (n, t) in coeffs.iter().enumerate() {
            assert_eq!(t.order(), n, "slot {n} must hold an order-{n} tensor");
            assert_eq!(t.site_count(), m, "site count mismatch in slot {n}");
        }
        let mut p = Self { basis, m, coeffs };
        p.trim();
        p
    }

    pub fn zero(basis: Basis, m: usize) -> Self {
        Self { basis, m, coeffs: vec![SymTensor::zero(m, 0)] }
    }

    /// Single-slot polynomial `⟨·, f⟩` in the given basis.
    pub fn from_slot(basis: Basis, f: SymTensor) -> Self {
        let m = f.site_count();
        let order = f.order();
        let mut coeffs: Vec<SymTensor> = (0..order).map(|n| SymTensor::zero(m, n)).collect();
        coeffs.push(f);
        Self::new(basis, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().is_zero() {
            self.coeffs.pop();
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn slot(&self, n: usize) -> SymTensor {
        self.coeffs.get(n).cloned().unwrap_or_else(|| SymTensor::zero(self.m, n))
    }

    pub fn slots(&self) -> &[SymTensor] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(SymTensor::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        assert_eq!(self.m, other.m, "site count mismatch");
        let degree = self.degree().max(other.degree());
        let coeffs = (0..=degree).map(|n| &self.slot(n) + &other.slot(n)).collect();
        Self::new(self.basis, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.basis, self.coeffs.iter().map(|t| t.scale(s)).collect())
    }

    /// Evaluate a monomial-basis polynomial at a distribution.
    pub fn eval_monomial(&self, omega: &Distribution) -> Rational {
        assert_eq!(self.basis, Basis::Monomial, "eval_monomial needs the monomial basis");
        let mut acc = Rational::zero();
        for (n, f) in self.coeffs.iter().enumerate() {
            if !f.is_zero() {
                acc += SymTensor::from_power(omega.masses(), n).pair(f);
            }
        }
        acc
    }
}

/// Linear map between symmetric tensor spaces, stored by the orbit-common
/// values of its full matrix (`rows[out][in]`). The action reinstates the
/// orbit size of the input index; the adjoint is the plain transpose. Under
/// this convention the identity map stores `1/mult(λ)` on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorMap {
    m: usize,
    out_order: usize,
    in_order: usize,
    rows: BTreeMap<MultiIndex, BTreeMap<MultiIndex, Rational>>,
}

impl TensorMap {
    pub fn zero(m: usize, out_order: usize, in_order: usize) -> Self {
        Self { m, out_order, in_order, rows: BTreeMap::new() }
    }

    pub fn identity(m: usize, order: usize) -> Self {
        let mut map = Self::zero(m, order, order);
        for idx in multisets(m, order) {
            let v = idx.orbit_size_rat().recip();
            map.set_entry(idx.clone(), idx, v);
        }
        map
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn out_order(&self) -> usize {
        self.out_order
    }

    pub fn in_order(&self) -> usize {
        self.in_order
    }

    pub fn set_entry(&mut self, out: MultiIndex, input: MultiIndex, value: Rational) {
        assert_eq!(out.order(), self.out_order, "output order mismatch");
        assert_eq!(input.order(), self.in_order, "input order mismatch");
        let row = self.rows.entry(out.clone()).or_default();
        if value.is_zero() {
            row.remove(&input);
            if row.is_empty() {
                self.rows.remove(&out);
            }
        } else {
            row.insert(input, value);
        }
    }

    pub fn entry(&self, out: &MultiIndex, input: &MultiIndex) -> Rational {
        self.rows
            .get(out)
            .and_then(|row| row.get(input))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&MultiIndex, &BTreeMap<MultiIndex, Rational>)> {
        self.rows.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn apply(&self, f: &SymTensor) -> SymTensor {
        assert_eq!(f.order(), self.in_order, "input order mismatch");
        assert_eq!(f.site_count(), self.m, "site count mismatch");
        let mut out = SymTensor::zero(self.m, self.out_order);
        for (out_idx, row) in &self.rows {
            let mut acc = Rational::zero();
            for (in_idx, v) in row {
                let c = f.coeff(in_idx);
                if !c.is_zero() {
                    acc += in_idx.orbit_size_rat() * v * c;
                }
            }
            out.add_to_coeff(out_idx.clone(), &acc);
        }
        out
    }

    pub fn adjoint(&self) -> TensorMap {
        let mut out = TensorMap::zero(self.m, self.in_order, self.out_order);
        for (out_idx, row) in &self.rows {
            for (in_idx, v) in row {
                out.set_entry(in_idx.clone(), out_idx.clone(), v.clone());
            }
        }
        out
    }

    /// `self ∘ other`, consistent with `apply(self, apply(other, f))`.
    pub fn compose(&self, other: &TensorMap) -> TensorMap {
        assert_eq!(self.in_order, other.out_order, "composition order mismatch");
        assert_eq!(self.m, other.m, "site count mismatch");
        let mut out = TensorMap::zero(self.m, self.out_order, other.in_order);
        for (out_idx, row) in &self.rows {
            for (mid_idx, v) in row {
                let Some(other_row) = other.rows.get(mid_idx) else {
                    continue;
                };
                let weight = mid_idx.orbit_size_rat() * v;
                for (in_idx, w) in other_row {
                    let updated = out.entry(out_idx, in_idx) + &weight * w;
                    out.set_entry(out_idx.clone(), in_idx.clone(), updated);
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, other: &TensorMap, s: &Rational) -> TensorMap {
        assert_eq!(self.in_order, other.in_order, "input order mismatch");
        assert_eq!(self.out_order, other.out_order, "output order mismatch");
        let mut out = self.clone();
        for (out_idx, row) in &other.rows {
            for (in_idx, v) in row {
                let updated = out.entry(out_idx, in_idx) + v * s;
                out.set_entry(out_idx.clone(), in_idx.clone(), updated);
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> TensorMap {
        if s.is_zero() {
            return TensorMap::zero(self.m, self.out_order, self.in_order);
        }
        let rows = self
            .rows
            .iter()
            .map(|(o, row)| (o.clone(), row.iter().map(|(i, v)| (i.clone(), v * s)).collect()))
            .collect();
        TensorMap { m: self.m, out_order: self.out_order, in_order: self.in_order, rows }
    }

    /// Reinterpret a map with order-1 output as a vector-series slot.
    pub fn to_sym_to_vec(&self) -> SymToVecMap {
        assert_eq!(self.out_order, 1, "output order must be 1");
        let mut out = SymToVecMap::zero(self.m, self.in_order);
        for (out_idx, row) in &self.rows {
            let site = out_idx.sites()[0];
            for (in_idx, v) in row {
                out.set_entry(site, in_idx.clone(), v.clone());
            }
        }
        out
    }
}

/// A monic polynomial sequence of binomial type, held as its coefficient
/// arrays. `u[n][k]` maps order-`k` distribution tensors to order-`n` ones
/// (unitriangular, with `u[n][0] = 0` for `n >= 1` so that `Pⁿ(0) = 0`);
/// `v` and `r` are the induced test-side arrays, mutually inverse block
/// triangular systems. `b` is the stored compositional inverse of `a`, whose
/// order-`k` slot equals `R_{1,k}/k!`.
#[derive(Debug, Clone)]
pub struct BinomialFamily {
    m: usize,
    degree: usize,
    a: VectorTensorSeries,
    b: VectorTensorSeries,
    u: Vec<Vec<TensorMap>>,
    v: Vec<Vec<TensorMap>>,
    r: Vec<Vec<TensorMap>>,
}

impl BinomialFamily {
    /// Build the unique monic binomial-type family with generating series
    /// `exp⟨ω, A(ξ)⟩`. Requires the linear slot of `A` to be the identity.
    pub fn from_a_series(a: &VectorTensorSeries) -> Result<Self> {
        if !a.linear_is_identity() {
            return Err(UmbraError::NonMonicLinearPart);
        }
        let m = a.site_count();
        let degree = a.degree();
        let b = a.inverse().expect("identity linear slot is invertible");

        // u[n][k], 0 <= k <= n
        let mut u: Vec<Vec<TensorMap>> = Vec::with_capacity(degree + 1);
        for n in 0..=degree {
            let mut row = Vec::with_capacity(n + 1);
            for k in 0..=n {
                row.push(if n == 0 && k == 0 {
                    TensorMap::identity(m, 0)
                } else if k == 0 {
                    TensorMap::zero(m, n, 0)
                } else {
                    build_u_cell(a, n, k)
                });
            }
            u.push(row);
        }

        // v[k][n] = u[n][k]^T for k <= n
        let mut v: Vec<Vec<TensorMap>> = Vec::with_capacity(degree + 1);
        for k in 0..=degree {
            let mut row = Vec::with_capacity(degree - k + 1);
            for n in k..=degree {
                row.push(u[n][k].adjoint());
            }
            v.push(row);
        }

        // r[k][n] from back-substitution of the unitriangular system:
        // r[n][n] = id, r[j][n] = -Σ_{k=j+1..n} v[j][k] ∘ r[k][n]
        let mut r: Vec<Vec<TensorMap>> = (0..=degree)
            .map(|k| (k..=degree).map(|n| TensorMap::zero(m, k, n)).collect())
            .collect();
        for n in 0..=degree {
            r[n][0] = TensorMap::identity(m, n);
            for j in (0..n).rev() {
                let mut acc = TensorMap::zero(m, j, n);
                for k in j + 1..=n {
                    let term = v[j][k - j].compose(&r[k][n - k]);
                    acc = acc.add_scaled(&term, &int(-1));
                }
                r[j][n - j] = acc;
            }
        }

        Ok(Self { m, degree, a: a.clone(), b, u, v, r })
    }

    /// The family of plain tensor powers (`A` the identity series).
    pub fn monomial(m: usize, degree: usize) -> Self {
        Self::from_a_series(&VectorTensorSeries::identity(m, degree))
            .expect("identity series is monic")
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn a_series(&self) -> &VectorTensorSeries {
        &self.a
    }

    pub fn b_series(&self) -> &VectorTensorSeries {
        &self.b
    }

    /// `U_{n,k}`, `0 <= k <= n <= degree`.
    pub fn u(&self, n: usize, k: usize) -> &TensorMap {
        &self.u[n][k]
    }

    /// `V_{k,n} = U_{n,k}*`, `k <= n`.
    pub fn v(&self, k: usize, n: usize) -> &TensorMap {
        &self.v[k][n - k]
    }

    /// `R_{k,n}` from the inverse triangular system, `k <= n`.
    pub fn r(&self, k: usize, n: usize) -> &TensorMap {
        &self.r[k][n - k]
    }

    /// The basic polynomial kernel `Pⁿ(ω) = Σ_k U_{n,k} ω^{⊗k}`.
    pub fn eval_basic(&self, omega: &Distribution, n: usize) -> Result<SymTensor> {
        if n > self.degree {
            return Err(UmbraError::DegreeOverflow { degree: n, max: self.degree });
        }
        assert_eq!(omega.len(), self.m, "site count mismatch");
        if n == 0 {
            return Ok(SymTensor::scalar(self.m, Rational::one()));
        }
        let mut acc = SymTensor::zero(self.m, n);
        for k in 1..=n {
            let power = SymTensor::from_power(omega.masses(), k);
            acc = &acc + &self.u[n][k].apply(&power);
        }
        Ok(acc)
    }

    fn assert_degree(&self, p: &PolyInBasis) {
        assert!(
            p.degree() <= self.degree,
            "polynomial degree {} exceeds family degree {}",
            p.degree(),
            self.degree
        );
        assert_eq!(p.site_count(), self.m, "site count mismatch");
    }

    /// Rewrite a monomial-basis polynomial in the family's basis:
    /// `g^{(k)} = f^{(k)} + Σ_{n>k} R_{k,n} f^{(n)}`.
    pub fn monomial_to_basic(&self, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(p.basis(), Basis::Monomial, "input must be in the monomial basis");
        self.assert_degree(p);
        let degree = p.degree();
        let coeffs = (0..=degree)
            .map(|k| {
                let mut acc = p.slot(k);
                for n in k + 1..=degree {
                    acc = &acc + &self.r(k, n).apply(&p.slot(n));
                }
                acc
            })
            .collect();
        PolyInBasis::new(Basis::P, coeffs)
    }

    /// Rewrite a family-basis polynomial in the monomial basis:
    /// `f^{(k)} = g^{(k)} + Σ_{n>k} V_{k,n} g^{(n)}`.
    pub fn basic_to_monomial(&self, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(p.basis(), Basis::P, "input must be in the family basis");
        self.assert_degree(p);
        let degree = p.degree();
        let coeffs = (0..=degree)
            .map(|k| {
                let mut acc = p.slot(k);
                for n in k + 1..=degree {
                    acc = &acc + &self.v(k, n).apply(&p.slot(n));
                }
                acc
            })
            .collect();
        PolyInBasis::new(Basis::Monomial, coeffs)
    }

    fn to_basic(&self, p: &PolyInBasis) -> PolyInBasis {
        match p.basis() {
            Basis::Monomial => self.monomial_to_basic(p),
            Basis::P => p.clone(),
            Basis::S => panic!("Sheffer-basis polynomials need the Sheffer family"),
        }
    }

    fn from_basic(&self, p: PolyInBasis, target: Basis) -> PolyInBasis {
        match target {
            Basis::Monomial => self.basic_to_monomial(&p),
            Basis::P => p,
            Basis::S => panic!("Sheffer-basis polynomials need the Sheffer family"),
        }
    }

    /// Lowering operator `Q(ζ)` of the family: on the family basis, slot `n`
    /// feeds `n · (ζ contracted into one argument)` to slot `n-1`. The result
    /// is returned in the basis of the input.
    pub fn lower(&self, zeta: &Distribution, p: &PolyInBasis) -> PolyInBasis {
        let target = p.basis();
        let q = self.to_basic(p);
        let lowered = lower_in_sequence_basis(zeta, &q);
        self.from_basic(lowered, target)
    }

    /// Shift operator `E(ζ)`: represents `ω ↦ P(ω + ζ)`, computed in the
    /// monomial basis by binomial expansion of `(ω + ζ)^{⊗n}`.
    pub fn shift(&self, zeta: &Distribution, p: &PolyInBasis) -> PolyInBasis {
        let target = p.basis();
        let mono = match p.basis() {
            Basis::Monomial => p.clone(),
            Basis::P => self.basic_to_monomial(p),
            Basis::S => panic!("Sheffer-basis polynomials need the Sheffer family"),
        };
        let shifted = shift_monomial(zeta, &mono);
        self.from_basic(self.monomial_to_basic(&shifted), target)
    }

    /// Value of the polynomial at a distribution.
    pub fn eval_poly(&self, p: &PolyInBasis, omega: &Distribution) -> Rational {
        match p.basis() {
            Basis::Monomial => p.eval_monomial(omega),
            Basis::P => {
                let mut acc = Rational::zero();
                for n in 0..=p.degree() {
                    let f = p.slot(n);
                    if !f.is_zero() {
                        acc += self.eval_basic(omega, n).expect("degree checked").pair(&f);
                    }
                }
                acc
            }
            Basis::S => panic!("Sheffer-basis polynomials need the Sheffer family"),
        }
    }
}

/// The coefficient action shared by operator application and the
/// Sheffer-basis rewrites: `out[j] = Σ_k C(j+k, k) · contract(g[k], f^{(j+k)})`.
pub(crate) fn contract_sequence(g_slots: &[SymTensor], p: &PolyInBasis) -> Vec<SymTensor> {
    let m = p.site_count();
    let degree = p.degree();
    (0..=degree)
        .map(|j| {
            let mut acc = SymTensor::zero(m, j);
            for k in 0..=degree - j {
                let Some(g) = g_slots.get(k) else {
                    break;
                };
                if g.is_zero() {
                    continue;
                }
                let f = p.slot(j + k);
                if f.is_zero() {
                    continue;
                }
                acc = &acc + &f.contract(g).scale(&binomial_rat(j + k, k));
            }
            acc
        })
        .collect()
}

/// Annihilation action shared by every sequence basis: slot `n` contributes
/// `n · contract(ζ, f^{(n)})` to slot `n-1`.
pub(crate) fn lower_in_sequence_basis(zeta: &Distribution, p: &PolyInBasis) -> PolyInBasis {
    let m = p.site_count();
    let zeta_tensor = SymTensor::from_power(zeta.masses(), 1);
    let degree = p.degree();
    if degree == 0 {
        return PolyInBasis::zero(p.basis(), m);
    }
    let coeffs = (0..degree)
        .map(|n| {
            let f = p.slot(n + 1);
            if f.is_zero() {
                SymTensor::zero(m, n)
            } else {
                f.contract(&zeta_tensor).scale(&int((n + 1) as i64))
            }
        })
        .collect();
    PolyInBasis::new(p.basis(), coeffs)
}

/// Shift in the monomial basis:
/// `f^{(k)} += C(n,k) · (ζ^{⊗(n-k)} contracted into f^{(n)})` for `n >= k`.
fn shift_monomial(zeta: &Distribution, p: &PolyInBasis) -> PolyInBasis {
    let degree = p.degree();
    let coeffs = (0..=degree)
        .map(|k| {
            let mut acc = p.slot(k);
            for n in k + 1..=degree {
                let f = p.slot(n);
                if f.is_zero() {
                    continue;
                }
                let zeta_power = SymTensor::from_power(zeta.masses(), n - k);
                acc = &acc + &f.contract(&zeta_power).scale(&binomial_rat(n, k));
            }
            acc
        })
        .collect();
    PolyInBasis::new(Basis::Monomial, coeffs)
}

fn build_u_cell(a: &VectorTensorSeries, n: usize, k: usize) -> TensorMap {
    let m = a.site_count();
    let mut cell = TensorMap::zero(m, n, k);
    let scale = factorial_rat(n) / factorial_rat(k);
    for comp in compositions(n, k) {
        let factors: Vec<&SymToVecMap> = comp.iter().map(|&i| a.map(i)).collect();
        for lambda_in in multisets(m, k) {
            let mut basis = SymTensor::zero(m, k);
            basis.set_coeff(lambda_in.clone(), Rational::one());
            let image = adjoint_factors_apply(&factors, &basis);
            if image.is_zero() {
                continue;
            }
            let mult_in = lambda_in.orbit_size_rat();
            for (lambda_out, value) in image.entries() {
                let updated = cell.entry(lambda_out, &lambda_in) + &scale * value / &mult_in;
                cell.set_entry(lambda_out.clone(), lambda_in.clone(), updated);
            }
        }
    }
    cell
}

/// A shift-invariant operator in the coefficient coordinates of a chosen
/// family: the sequence `G⁰..G^N` with action
/// `T = Σ_k (1/k!) ⟨G^{(k)}, Q(x_1)…Q(x_k)⟩`. Stored unscaled; the `1/k!`
/// lives in the application and product formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftInvariantOp {
    m: usize,
    slots: Vec<SymTensor>,
}

impl ShiftInvariantOp {
    pub fn from_slots(slots: Vec<SymTensor>) -> Self {
        assert!(!slots.is_empty(), "operator needs at least the constant slot");
        let m = slots[0].site_count();
        for (k, t) in slots.iter().enumerate() {
            assert_eq!(t.order(), k, "slot {k} must hold an order-{k} tensor");
            assert_eq!(t.site_count(), m, "site count mismatch in slot {k}");
        }
        Self { m, slots }
    }

    /// The identity operator `(1, 0, 0, …)`.
    pub fn identity(m: usize, degree: usize) -> Self {
        let mut slots: Vec<SymTensor> = (0..=degree).map(|k| SymTensor::zero(m, k)).collect();
        slots[0] = SymTensor::scalar(m, Rational::one());
        Self { m, slots }
    }

    /// Image of the shift `E(ζ)` under the family's isomorphism:
    /// slot `k` is `P^{(k)}(ζ)`.
    pub fn shift_op(fam: &BinomialFamily, zeta: &Distribution) -> Self {
        let slots = (0..=fam.degree())
            .map(|k| fam.eval_basic(zeta, k).expect("within family degree"))
            .collect();
        Self { m: fam.site_count(), slots }
    }

    /// Image of the directional derivative `D(ζ)` (equivalently of `Q(ζ)` in
    /// the family's own coordinates): only slot 1 is set, to `ζ`.
    pub fn lowering_op(zeta: &Distribution, degree: usize) -> Self {
        let m = zeta.len();
        let mut slots: Vec<SymTensor> = (0..=degree).map(|k| SymTensor::zero(m, k)).collect();
        slots[1] = SymTensor::from_power(zeta.masses(), 1);
        Self { m, slots }
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn slot(&self, k: usize) -> &SymTensor {
        &self.slots[k]
    }

    pub fn slots(&self) -> &[SymTensor] {
        &self.slots
    }

    /// Apply to a polynomial, interpreting the coefficient sequence relative
    /// to `fam`: in the family basis, slot `n-k` receives
    /// `C(n,k) ⟨G^{(k)}, ·⟩` contracted into `f^{(n)}`. Returns the result in
    /// the basis of the input.
    pub fn apply(&self, fam: &BinomialFamily, p: &PolyInBasis) -> PolyInBasis {
        assert_eq!(self.m, fam.site_count(), "site count mismatch");
        let target = p.basis();
        let q = fam.to_basic(p);
        let coeffs = contract_sequence(&self.slots, &q);
        fam.from_basic(PolyInBasis::new(Basis::P, coeffs), target)
    }

    /// Operator product through the isomorphism: the divided sequences
    /// `(G^{(k)}/k!)` multiply by symmetric-tensor convolution, so
    /// `G^{(j)} = Σ_k C(j,k) F^{(k)} ⊙ G^{(j-k)}`.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "site count mismatch");
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        let degree = self.degree();
        let slots = (0..=degree)
            .map(|j| {
                let mut acc = SymTensor::zero(self.m, j);
                for k in 0..=j {
                    if self.slots[k].is_zero() || other.slots[j - k].is_zero() {
                        continue;
                    }
                    let term = self.slots[k].sym_product(&other.slots[j - k]);
                    acc = &acc + &term.scale(&binomial_rat(j, k));
                }
                acc
            })
            .collect();
        Self { m: self.m, slots }
    }

    /// Inverse through the isomorphism, defined when the operator does not
    /// annihilate constants (`G⁰ ≠ 0`).
    pub fn invert(&self) -> Result<Self> {
        if self.slots[0].scalar_value().is_zero() {
            return Err(UmbraError::NonInvertibleOperator);
        }
        let series = self.to_divided_series();
        let inv = series.reciprocal().expect("nonzero constant slot");
        Ok(Self::from_divided_series(&inv))
    }

    /// The scalar series with slots `G^{(k)}/k!`.
    pub fn to_divided_series(&self) -> ScalarTensorSeries {
        let slots = self
            .slots
            .iter()
            .enumerate()
            .map(|(k, g)| g.scale(&factorial_rat(k).recip()))
            .collect();
        ScalarTensorSeries::from_slots(slots)
    }

    pub fn from_divided_series(series: &ScalarTensorSeries) -> Self {
        let slots = series
            .slots()
            .iter()
            .enumerate()
            .map(|(k, g)| g.scale(&factorial_rat(k)))
            .collect();
        Self::from_slots(slots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::series::PowerSeries1D;
    use crate::tensor::TestFunction;

    fn falling_family(m: usize, degree: usize) -> BinomialFamily {
        let a = VectorTensorSeries::diagonal_lift(&PowerSeries1D::log1p(degree), m);
        BinomialFamily::from_a_series(&a).unwrap()
    }

    fn dist(vals: &[i64]) -> Distribution {
        Distribution::new(vals.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn monomial_family_is_trivial() {
        let fam = BinomialFamily::monomial(2, 4);
        for n in 0..=4 {
            assert_eq!(*fam.u(n, n), TensorMap::identity(2, n));
            for k in 0..n {
                assert!(fam.u(n, k).is_zero(), "U_{{{n},{k}}} should vanish");
            }
        }
        let omega = dist(&[2, -1]);
        for n in 0..=4 {
            assert_eq!(
                fam.eval_basic(&omega, n).unwrap(),
                SymTensor::from_power(omega.masses(), n)
            );
        }
        // basis change is the identity
        let p = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(&[int(1), int(2)], 3));
        let q = fam.monomial_to_basic(&p);
        assert_eq!(q.slots(), p.slots());
        assert_eq!(fam.basic_to_monomial(&q), p);
    }

    #[test]
    fn non_monic_series_is_rejected() {
        let mut a = VectorTensorSeries::identity(2, 3);
        a.set_map(1, SymToVecMap::diagonal(2, 1, int(2)));
        assert_eq!(
            BinomialFamily::from_a_series(&a).unwrap_err(),
            UmbraError::NonMonicLinearPart
        );
    }

    #[test]
    fn falling_factorial_kernel_m2() {
        let fam = falling_family(2, 4);
        let omega = dist(&[2, 1]);
        let p2 = fam.eval_basic(&omega, 2).unwrap();
        assert_eq!(p2.coeff(&MultiIndex::new(vec![0, 0])), int(2));
        assert_eq!(p2.coeff(&MultiIndex::new(vec![1, 1])), int(0));
        assert_eq!(p2.coeff(&MultiIndex::new(vec![0, 1])), int(2));

        // U_{2,1} is minus the diagonal embedding
        let u21 = fam.u(2, 1);
        let image = u21.apply(&SymTensor::from_power(omega.masses(), 1));
        assert_eq!(image, SymTensor::diag_embed(omega.masses(), 2).neg());

        // Pⁿ(0) = 0
        let zero = Distribution::zero(2);
        for n in 1..=4 {
            assert!(fam.eval_basic(&zero, n).unwrap().is_zero());
        }
        assert_eq!(fam.eval_basic(&zero, 0).unwrap().scalar_value(), Rational::one());

        assert_eq!(
            fam.eval_basic(&omega, 9).unwrap_err(),
            UmbraError::DegreeOverflow { degree: 9, max: 4 }
        );
    }

    #[test]
    fn stirling_shape_basis_change_m1() {
        // single site of weight one: t^2 = (t)_2 + (t)_1
        let fam = falling_family(1, 4);
        let t_squared = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(&[int(1)], 2));
        let in_basic = fam.monomial_to_basic(&t_squared);
        assert_eq!(in_basic.slot(2).coeff(&MultiIndex::diagonal(0, 2)), int(1));
        assert_eq!(in_basic.slot(1).coeff(&MultiIndex::single(0)), int(1));
        assert!(in_basic.slot(0).is_zero());

        // and back: (t)_2 = t^2 - t
        let basic2 = PolyInBasis::from_slot(Basis::P, SymTensor::from_power(&[int(1)], 2));
        let mono = fam.basic_to_monomial(&basic2);
        assert_eq!(mono.slot(2).coeff(&MultiIndex::diagonal(0, 2)), int(1));
        assert_eq!(mono.slot(1).coeff(&MultiIndex::single(0)), int(-1));
    }

    #[test]
    fn basis_round_trip_random() {
        let fam = falling_family(2, 4);
        let mut p_coeffs = Vec::new();
        for n in 0..=4usize {
            let mut t = SymTensor::zero(2, n);
            for (i, idx) in multisets(2, n).into_iter().enumerate() {
                t.set_coeff(idx, rat((i as i64 % 7) - 3, 1 + (i as i64 % 3)));
            }
            p_coeffs.push(t);
        }
        let p = PolyInBasis::new(Basis::Monomial, p_coeffs);
        let round = fam.basic_to_monomial(&fam.monomial_to_basic(&p));
        assert_eq!(round, p);
    }

    #[test]
    fn lowering_on_monomials_is_differentiation() {
        let fam = BinomialFamily::monomial(2, 4);
        let xi = TestFunction::new(vec![int(1), int(3)]);
        let zeta = dist(&[1, -2]);
        // Q(ζ) on ⟨·^{⊗2}, ξ^{⊗2}⟩ gives 2⟨ζ,ξ⟩⟨·,ξ⟩
        let p = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(xi.values(), 2));
        let lowered = fam.lower(&zeta, &p);
        let omega = dist(&[5, 7]);
        let expected = int(2) * zeta.pair(&xi) * omega.pair(&xi);
        assert_eq!(fam.eval_poly(&lowered, &omega), expected);
    }

    #[test]
    fn falling_lowering_is_the_difference_operator() {
        let fam = falling_family(2, 4);
        let omega = dist(&[3, -1]);
        for x in 0..2 {
            let delta = Distribution::dirac(2, x);
            for n in 0..=3usize {
                let mut poly_coeffs: Vec<SymTensor> = (0..n).map(|j| SymTensor::zero(2, j)).collect();
                let mut top = SymTensor::zero(2, n);
                for (i, idx) in multisets(2, n).into_iter().enumerate() {
                    top.set_coeff(idx, rat(2 * (i as i64) - 3, 2));
                }
                poly_coeffs.push(top);
                let p = PolyInBasis::new(Basis::Monomial, poly_coeffs);
                let lowered = fam.lower(&delta, &p);
                let forward = fam.eval_poly(&p, &omega.add(&delta)) - fam.eval_poly(&p, &omega);
                assert_eq!(fam.eval_poly(&lowered, &omega), forward);
            }
        }
    }

    #[test]
    fn shift_group_law() {
        let fam = falling_family(2, 4);
        let zeta = dist(&[1, 2]);
        let eta = dist(&[-1, 1]);
        let p = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(&[int(1), rat(1, 2)], 3));
        assert_eq!(fam.shift(&Distribution::zero(2), &p), p);
        let through = fam.shift(&eta, &fam.shift(&zeta, &p));
        let direct = fam.shift(&zeta.add(&eta), &p);
        assert_eq!(through, direct);
        // shift is evaluation at the translate
        let omega = dist(&[2, 2]);
        assert_eq!(
            fam.eval_poly(&fam.shift(&zeta, &p), &omega),
            fam.eval_poly(&p, &omega.add(&zeta))
        );
    }

    #[test]
    fn shift_commutes_with_lowering() {
        let fam = falling_family(2, 4);
        let zeta = dist(&[2, -1]);
        let eta = dist(&[1, 1]);
        for n in 0..=4usize {
            for idx in multisets(2, n) {
                let mut t = SymTensor::zero(2, n);
                t.set_coeff(idx, Rational::one());
                let p = PolyInBasis::from_slot(Basis::Monomial, t);
                let a = fam.shift(&eta, &fam.lower(&zeta, &p));
                let b = fam.lower(&zeta, &fam.shift(&eta, &p));
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn delta_operator_axioms() {
        let fam = falling_family(2, 3);
        let zeta = dist(&[2, 3]);
        let xi = TestFunction::new(vec![int(1), int(-1)]);
        // Q(ζ)⟨·,ξ⟩ = ⟨ζ,ξ⟩ · 1
        let linear = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(xi.values(), 1));
        let lowered = fam.lower(&zeta, &linear);
        assert_eq!(lowered.degree(), 0);
        assert_eq!(lowered.slot(0).scalar_value(), zeta.pair(&xi));
        // Q(ζ) 1 = 0
        let one = PolyInBasis::from_slot(Basis::Monomial, SymTensor::scalar(2, Rational::one()));
        assert!(fam.lower(&zeta, &one).is_zero());
    }

    #[test]
    fn binomial_identity_small() {
        let fam = falling_family(2, 4);
        let omega = dist(&[2, -1]);
        let zeta = dist(&[1, 3]);
        for n in 1..=4usize {
            let lhs = fam.eval_basic(&omega.add(&zeta), n).unwrap();
            let mut rhs = SymTensor::zero(2, n);
            for k in 0..=n {
                let term = fam
                    .eval_basic(&omega, k)
                    .unwrap()
                    .sym_product(&fam.eval_basic(&zeta, n - k).unwrap());
                rhs = &rhs + &term.scale(&binomial_rat(n, k));
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn b_series_matches_first_row_of_r() {
        let fam = falling_family(2, 4);
        for k in 1..=4usize {
            let expected = fam.r(1, k).to_sym_to_vec().scale(&factorial_rat(k).recip());
            assert_eq!(*fam.b_series().map(k), expected, "slot {k}");
        }
        // and for the falling factorials B_k = 𝔻_k* (b_k = 1)
        for k in 1..=4usize {
            let expected = SymToVecMap::diagonal(2, k, factorial_rat(k).recip());
            assert_eq!(*fam.b_series().map(k), expected);
        }
    }

    #[test]
    fn operator_identity_and_shift_reproduction() {
        let fam = falling_family(2, 4);
        let id = ShiftInvariantOp::identity(2, 4);
        let p = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(&[int(2), int(1)], 3));
        assert_eq!(id.apply(&fam, &p), p);

        let zeta = dist(&[1, -1]);
        let shift_op = ShiftInvariantOp::shift_op(&fam, &zeta);
        assert_eq!(shift_op.apply(&fam, &p), fam.shift(&zeta, &p));

        // in the family's own coordinates, Q(ζ) has the single slot ζ
        let q_op = ShiftInvariantOp::lowering_op(&zeta, 4);
        assert_eq!(q_op.apply(&fam, &p), fam.lower(&zeta, &p));
    }

    #[test]
    fn j_product_of_derivatives() {
        let zeta = dist(&[1, 2]);
        let eta = dist(&[3, -1]);
        let dz = ShiftInvariantOp::lowering_op(&zeta, 4);
        let de = ShiftInvariantOp::lowering_op(&eta, 4);
        let prod = dz.product(&de);
        let zt = SymTensor::from_power(zeta.masses(), 1);
        let et = SymTensor::from_power(eta.masses(), 1);
        assert_eq!(*prod.slot(2), zt.sym_product(&et).scale(&int(2)));
        assert!(prod.slot(0).is_zero());
        assert!(prod.slot(1).is_zero());
    }

    #[test]
    fn j_product_matches_operator_composition() {
        let fam = falling_family(2, 4);
        let s = ShiftInvariantOp::shift_op(&fam, &dist(&[1, 0]));
        let t = ShiftInvariantOp::lowering_op(&dist(&[0, 2]), 4);
        let p = PolyInBasis::from_slot(Basis::Monomial, SymTensor::from_power(&[int(1), int(1)], 4));
        let via_product = s.product(&t).apply(&fam, &p);
        let via_composition = s.apply(&fam, &t.apply(&fam, &p));
        assert_eq!(via_product, via_composition);
        // commutativity
        assert_eq!(s.product(&t), t.product(&s));
    }

    #[test]
    fn operator_inverse() {
        let fam = falling_family(2, 4);
        let id = ShiftInvariantOp::identity(2, 4);
        assert_eq!(id.invert().unwrap(), id);

        let zeta = dist(&[1, -2]);
        let e = ShiftInvariantOp::shift_op(&fam, &zeta);
        let e_inv = e.invert().unwrap();
        assert_eq!(e.product(&e_inv), id);
        assert_eq!(e_inv, ShiftInvariantOp::shift_op(&fam, &zeta.neg()));

        let bad = ShiftInvariantOp::lowering_op(&zeta, 4);
        assert_eq!(bad.invert().unwrap_err(), UmbraError::NonInvertibleOperator);
    }

    #[test]
    fn polynomial_expansion_reconstructs() {
        let fam = falling_family(2, 4);
        // random-ish polynomial in the monomial basis
        let mut coeffs = Vec::new();
        for n in 0..=4usize {
            let mut t = SymTensor::zero(2, n);
            for (i, idx) in multisets(2, n).into_iter().enumerate() {
                t.set_coeff(idx, rat((3 * i as i64) % 5 - 2, 1 + (i as i64 % 2)));
            }
            coeffs.push(t);
        }
        let p = PolyInBasis::new(Basis::Monomial, coeffs);

        // g^{(k)}(x_1..x_k) = (Q(x_1)…Q(x_k) P)(0); the family-basis slots of
        // the reconstruction are g^{(k)}/k!
        let mut rebuilt_slots = Vec::new();
        for k in 0..=4usize {
            let mut g = SymTensor::zero(2, k);
            for idx in multisets(2, k) {
                let mut lowered = p.clone();
                for &x in idx.sites() {
                    lowered = fam.lower(&Distribution::dirac(2, x), &lowered);
                }
                g.set_coeff(idx, fam.eval_poly(&lowered, &Distribution::zero(2)));
            }
            rebuilt_slots.push(g.scale(&factorial_rat(k).recip()));
        }
        let rebuilt = fam.basic_to_monomial(&PolyInBasis::new(Basis::P, rebuilt_slots));
        assert_eq!(rebuilt, p);
    }
}
