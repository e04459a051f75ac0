//! Truncated tensor power series: scalar-valued series (slot `n` holds an
//! order-`n` symmetric tensor) and vector-valued series (slot `k` holds a
//! linear map from order-`k` symmetric tensors to site vectors), together
//! with their product, reciprocal, compositions and compositional inverse.
//!
//! Weight convention, fixed once for every linear map in this crate: a map is
//! stored by the orbit-common values of its full (permutation-symmetric)
//! matrix, and its action reinstates the orbit size of the *input* index,
//!
//! ```text
//! (L f)[out] = Σ_in mult(in) · L[out][in] · f[in].
//! ```
//!
//! Under this convention the adjoint is the plain transpose of the stored
//! matrix: `⟨L* ω, f⟩ = ⟨ω, L f⟩` holds exactly with both pairings
//! multiplicity-weighted. All composition sums iterate over ordered integer
//! compositions exactly as in the defining formulas and then symmetrize;
//! no partition-collapsed shortcut is taken here.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::combinat::compositions;
use crate::error::{Result, UmbraError};
use crate::rational::Rational;
use crate::series::PowerSeries1D;
use crate::tensor::{multisets, MultiIndex, SymTensor, TestFunction};

/// Linear map from order-`k` symmetric tensors to site vectors, stored
/// sparsely as `rows[site][multiset]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymToVecMap {
    m: usize,
    order: usize,
    rows: BTreeMap<usize, BTreeMap<MultiIndex, Rational>>,
}

impl SymToVecMap {
    pub fn zero(m: usize, order: usize) -> Self {
        assert!(order >= 1, "vector series slots start at order 1");
        Self { m, order, rows: BTreeMap::new() }
    }

    /// The identity on site vectors (order 1).
    pub fn identity(m: usize) -> Self {
        let mut map = Self::zero(m, 1);
        for x in 0..m {
            map.set_entry(x, MultiIndex::single(x), Rational::one());
        }
        map
    }

    /// `scale · Diag_k`: sends `f` to the site vector `x ↦ scale · f(x,..,x)`.
    /// Its adjoint is the scaled diagonal embedding.
    pub fn diagonal(m: usize, order: usize, scale: Rational) -> Self {
        let mut map = Self::zero(m, order);
        if !scale.is_zero() {
            for x in 0..m {
                map.set_entry(x, MultiIndex::diagonal(x, order), scale.clone());
            }
        }
        map
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn set_entry(&mut self, site: usize, idx: MultiIndex, value: Rational) {
        assert!(site < self.m, "site out of range");
        assert_eq!(idx.order(), self.order, "index order mismatch");
        let row = self.rows.entry(site).or_default();
        if value.is_zero() {
            row.remove(&idx);
            if row.is_empty() {
                self.rows.remove(&site);
            }
        } else {
            row.insert(idx, value);
        }
    }

    pub fn entry(&self, site: usize, idx: &MultiIndex) -> Rational {
        self.rows
            .get(&site)
            .and_then(|row| row.get(idx))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &BTreeMap<MultiIndex, Rational>)> {
        self.rows.iter().map(|(&s, row)| (s, row))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1 && *self == Self::identity(self.m)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.m, self.order);
        }
        let rows = self
            .rows
            .iter()
            .map(|(&x, row)| (x, row.iter().map(|(k, v)| (k.clone(), v * s)).collect()))
            .collect();
        Self { m: self.m, order: self.order, rows }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "site count mismatch");
        assert_eq!(self.order, other.order, "order mismatch");
        let mut out = self.clone();
        for (&x, row) in &other.rows {
            for (idx, v) in row {
                let updated = out.entry(x, idx) + v;
                out.set_entry(x, idx.clone(), updated);
            }
        }
        out
    }

    /// Apply to a symmetric tensor, producing a site vector.
    pub fn apply(&self, f: &SymTensor) -> Vec<Rational> {
        assert_eq!(f.site_count(), self.m, "site count mismatch");
        assert_eq!(f.order(), self.order, "order mismatch");
        let mut out = vec![Rational::zero(); self.m];
        for (&x, row) in &self.rows {
            for (idx, v) in row {
                let c = f.coeff(idx);
                if !c.is_zero() {
                    out[x] += idx.orbit_size_rat() * v * c;
                }
            }
        }
        out
    }

    /// Apply to the rank-one power of a site vector whose entries are
    /// one-variable series (used by the generating-function oracles):
    /// `(L u^{⊗k})_x = Σ_λ mult(λ) L[x][λ] Π_{s∈λ} u_s`.
    pub fn apply_series_power(&self, u: &[PowerSeries1D]) -> Vec<PowerSeries1D> {
        assert_eq!(u.len(), self.m, "site count mismatch");
        let degree = u[0].degree();
        let mut out = vec![PowerSeries1D::zero(degree); self.m];
        for (&x, row) in &self.rows {
            for (idx, v) in row {
                let mut prod = PowerSeries1D::constant(idx.orbit_size_rat() * v, degree);
                for &s in idx.sites() {
                    prod = prod.mul(&u[s]);
                }
                out[x] = &out[x] + &prod;
            }
        }
        out
    }

    /// Adjoint action: a site vector to an order-`k` tensor, the transpose of
    /// the stored matrix.
    pub fn adjoint_apply(&self, omega: &[Rational]) -> SymTensor {
        assert_eq!(omega.len(), self.m, "site count mismatch");
        let mut out = SymTensor::zero(self.m, self.order);
        for (&x, row) in &self.rows {
            if omega[x].is_zero() {
                continue;
            }
            for (idx, v) in row {
                out.add_to_coeff(idx.clone(), &(&omega[x] * v));
            }
        }
        out
    }

    /// Dense site matrix of an order-1 map.
    fn to_site_matrix(&self) -> Vec<Vec<Rational>> {
        assert_eq!(self.order, 1, "site matrix requires an order-1 map");
        let mut mat = vec![vec![Rational::zero(); self.m]; self.m];
        for (&x, row) in &self.rows {
            for (idx, v) in row {
                mat[x][idx.sites()[0]] = v.clone();
            }
        }
        mat
    }
}

/// Exact inverse of a square rational matrix by Gauss-Jordan elimination.
fn invert_matrix(mut a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &pivot;
            inv[col][j] = &inv[col][j] / &pivot;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let s = &factor * &a[col][j];
                    a[r][j] = &a[r][j] - &s;
                    let s = &factor * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &s;
                }
            }
        }
    }
    Some(inv)
}

/// Symmetrized tensor product of the adjoints of the factor maps, applied to
/// an input tensor of order `factors.len()`:
/// `Sym (A₁* ⊗ … ⊗ A_p*) q`, an order `Σ orders` tensor.
pub(crate) fn adjoint_factors_apply(factors: &[&SymToVecMap], q: &SymTensor) -> SymTensor {
    let p = factors.len();
    assert_eq!(q.order(), p, "input order must match the factor count");
    let m = q.site_count();
    let out_order: usize = factors.iter().map(|f| f.order()).sum();
    let sizes: Vec<usize> = factors.iter().map(|f| f.order()).collect();
    let mut out = SymTensor::zero(m, out_order);
    if q.is_zero() {
        return out;
    }
    for lambda in multisets(m, out_order) {
        let mut acc = Rational::zero();
        for split in lambda.splits(&sizes) {
            // sites y_i for which factor_i has a nonzero entry at split part i
            let candidates: Vec<Vec<(usize, Rational)>> = split
                .iter()
                .zip(factors)
                .map(|(mu, f)| {
                    f.rows()
                        .filter_map(|(x, row)| row.get(mu).map(|v| (x, v.clone())))
                        .collect()
                })
                .collect();
            if candidates.iter().any(Vec::is_empty) {
                continue;
            }
            let mut weight = Rational::one();
            for mu in &split {
                weight *= mu.orbit_size_rat();
            }
            let mut inner = Rational::zero();
            let mut stack: Vec<usize> = vec![0; p];
            'product: loop {
                let mut term = Rational::one();
                let mut y = Vec::with_capacity(p);
                for (i, s) in stack.iter().enumerate() {
                    let (site, ref v) = candidates[i][*s];
                    y.push(site);
                    term *= v;
                }
                let qv = q.coeff(&MultiIndex::new(y));
                if !qv.is_zero() {
                    inner += term * qv;
                }
                // odometer over candidate lists
                for i in (0..p).rev() {
                    stack[i] += 1;
                    if stack[i] < candidates[i].len() {
                        continue 'product;
                    }
                    stack[i] = 0;
                }
                break;
            }
            acc += weight * inner;
        }
        if !acc.is_zero() {
            let value = acc / lambda.orbit_size_rat();
            out.set_coeff(lambda, value);
        }
    }
    out
}

/// `outer ∘ Sym (B₁ ⊗ … ⊗ B_p)` applied to an input tensor of order
/// `Σ orders(B_i)`, producing a site vector. `outer` must have order `p`.
pub(crate) fn forward_factors_apply(
    outer: &SymToVecMap,
    factors: &[&SymToVecMap],
    f: &SymTensor,
) -> Vec<Rational> {
    let p = factors.len();
    assert_eq!(outer.order(), p, "outer order must match the factor count");
    let m = f.site_count();
    let sizes: Vec<usize> = factors.iter().map(|b| b.order()).collect();
    assert_eq!(f.order(), sizes.iter().sum::<usize>(), "input order mismatch");
    let mut out = vec![Rational::zero(); m];
    for (lambda, fv) in f.entries() {
        for split in lambda.splits(&sizes) {
            let candidates: Vec<Vec<(usize, Rational)>> = split
                .iter()
                .zip(factors)
                .map(|(mu, b)| {
                    b.rows()
                        .filter_map(|(x, row)| row.get(mu).map(|v| (x, v.clone())))
                        .collect()
                })
                .collect();
            if candidates.iter().any(Vec::is_empty) {
                continue;
            }
            let mut weight = fv.clone();
            for mu in &split {
                weight *= mu.orbit_size_rat();
            }
            let mut stack: Vec<usize> = vec![0; p];
            'product: loop {
                let mut term = weight.clone();
                let mut y = Vec::with_capacity(p);
                for (i, s) in stack.iter().enumerate() {
                    let (site, ref v) = candidates[i][*s];
                    y.push(site);
                    term *= v;
                }
                let y_idx = MultiIndex::new(y);
                for (x, row) in outer.rows() {
                    if let Some(a) = row.get(&y_idx) {
                        out[x] += &term * a;
                    }
                }
                for i in (0..p).rev() {
                    stack[i] += 1;
                    if stack[i] < candidates[i].len() {
                        continue 'product;
                    }
                    stack[i] = 0;
                }
                break;
            }
        }
    }
    out
}

/// Truncated scalar-valued tensor power series: slot `n` is an order-`n`
/// symmetric tensor, `n = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarTensorSeries {
    m: usize,
    slots: Vec<SymTensor>,
}

impl ScalarTensorSeries {
    pub fn from_slots(slots: Vec<SymTensor>) -> Self {
        assert!(!slots.is_empty(), "series needs at least the constant slot");
        let m = slots[0].site_count();
        for (n, t) in slots.iter().enumerate() {
            assert_eq!(t.order(), n, "slot {n} must hold an order-{n} tensor");
            assert_eq!(t.site_count(), m, "site count mismatch in slot {n}");
        }
        Self { m, slots }
    }

    pub fn zero(m: usize, degree: usize) -> Self {
        Self { m, slots: (0..=degree).map(|n| SymTensor::zero(m, n)).collect() }
    }

    /// The unit series `(1, 0, 0, …)`.
    pub fn unit(m: usize, degree: usize) -> Self {
        let mut s = Self::zero(m, degree);
        s.slots[0] = SymTensor::scalar(m, Rational::one());
        s
    }

    /// `exp ⟨ω, ξ⟩`: slot `n` is `ω^{⊗n}/n!`.
    pub fn exp_linear(omega: &[Rational], degree: usize) -> Self {
        let m = omega.len();
        let mut s = Self::zero(m, degree);
        let mut fact = Rational::one();
        for n in 0..=degree {
            if n > 0 {
                fact *= crate::rational::int(n as i64);
            }
            s.slots[n] = SymTensor::from_power(omega, n).scale(&fact.recip());
        }
        s
    }

    /// Series with only the linear slot `⟨ω, ξ⟩`.
    pub fn linear(omega: &[Rational], degree: usize) -> Self {
        let m = omega.len();
        let mut s = Self::zero(m, degree);
        s.slots[1] = SymTensor::from_power(omega, 1);
        s
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn slot(&self, n: usize) -> &SymTensor {
        &self.slots[n]
    }

    pub fn set_slot(&mut self, n: usize, t: SymTensor) {
        assert_eq!(t.order(), n, "slot order mismatch");
        assert_eq!(t.site_count(), self.m, "site count mismatch");
        self.slots[n] = t;
    }

    pub fn slots(&self) -> &[SymTensor] {
        &self.slots
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.m, other.m, "site count mismatch");
        assert_eq!(self.degree(), other.degree(), "truncation degree mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let slots = self.slots.iter().zip(&other.slots).map(|(a, b)| a + b).collect();
        Self { m: self.m, slots }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { m: self.m, slots: self.slots.iter().map(|t| t.scale(s)).collect() }
    }

    /// Slotwise convolution with the symmetric tensor product.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let degree = self.degree();
        let mut out = Self::zero(self.m, degree);
        for i in 0..=degree {
            if self.slots[i].is_zero() {
                continue;
            }
            for j in 0..=degree - i {
                if other.slots[j].is_zero() {
                    continue;
                }
                let term = self.slots[i].sym_product(&other.slots[j]);
                out.slots[i + j] = &out.slots[i + j] + &term;
            }
        }
        out
    }

    /// Multiplicative inverse: `G⁰ = 1/F⁰`, then
    /// `Gⁿ = -(1/F⁰) Σ_{i<n} F^{n-i} ⊙ G^i`.
    pub fn reciprocal(&self) -> Result<Self> {
        let f0 = self.slots[0].scalar_value();
        if f0.is_zero() {
            return Err(UmbraError::ZeroConstantTerm);
        }
        let degree = self.degree();
        let neg_f0_inv = -f0.recip();
        let mut out = Self::zero(self.m, degree);
        out.slots[0] = SymTensor::scalar(self.m, f0.recip());
        for n in 1..=degree {
            let mut acc = SymTensor::zero(self.m, n);
            for i in 0..n {
                if out.slots[i].is_zero() || self.slots[n - i].is_zero() {
                    continue;
                }
                acc = &acc + &self.slots[n - i].sym_product(&out.slots[i]);
            }
            out.slots[n] = acc.scale(&neg_f0_inv);
        }
        Ok(out)
    }

    /// Composition `R ∘ F` of a one-variable series with a scalar series that
    /// has no constant term:
    /// `Gⁿ = Σ_p r_p Σ_{k_1+..+k_p=n} F^{k_1} ⊙ … ⊙ F^{k_p}`, `G⁰ = r_0`.
    pub fn compose_1d(r: &PowerSeries1D, f: &Self) -> Result<Self> {
        assert_eq!(r.degree(), f.degree(), "truncation degree mismatch");
        if !f.slots[0].is_zero() {
            return Err(UmbraError::NonzeroConstantTerm);
        }
        let degree = f.degree();
        let m = f.m;
        let mut out = Self::zero(m, degree);
        out.slots[0] = SymTensor::scalar(m, r.coeff(0));
        for n in 1..=degree {
            let mut acc = SymTensor::zero(m, n);
            for parts in 1..=n {
                let rp = r.coeff(parts);
                if rp.is_zero() {
                    continue;
                }
                for comp in compositions(n, parts) {
                    let mut prod = SymTensor::scalar(m, Rational::one());
                    let mut dead = false;
                    for &k in &comp {
                        if f.slots[k].is_zero() {
                            dead = true;
                            break;
                        }
                        prod = prod.sym_product(&f.slots[k]);
                    }
                    if !dead {
                        acc = &acc + &prod.scale(&rp);
                    }
                }
            }
            out.slots[n] = acc;
        }
        Ok(out)
    }

    /// Composition `F ∘ A` with a vector series:
    /// `Gⁿ = Σ_p Σ_{k_1+..+k_p=n} Sym (A_{k_1}* ⊗ … ⊗ A_{k_p}*) F^p`.
    pub fn compose_vector(&self, a: &VectorTensorSeries) -> Self {
        assert_eq!(self.m, a.site_count(), "site count mismatch");
        assert_eq!(self.degree(), a.degree(), "truncation degree mismatch");
        let degree = self.degree();
        let mut out = Self::zero(self.m, degree);
        out.slots[0] = self.slots[0].clone();
        for n in 1..=degree {
            let mut acc = SymTensor::zero(self.m, n);
            for parts in 1..=n {
                if self.slots[parts].is_zero() {
                    continue;
                }
                for comp in compositions(n, parts) {
                    let factors: Vec<&SymToVecMap> = comp.iter().map(|&k| a.map(k)).collect();
                    acc = &acc + &adjoint_factors_apply(&factors, &self.slots[parts]);
                }
            }
            out.slots[n] = acc;
        }
        out
    }

    /// Collapse along a direction: the one-variable series
    /// `t ↦ Σ_n t^n ⟨Fⁿ, ξ^{⊗n}⟩` (oracle helper).
    pub fn eval_direction(&self, xi: &TestFunction) -> PowerSeries1D {
        let degree = self.degree();
        let mut s = PowerSeries1D::zero(degree);
        for n in 0..=degree {
            s.set_coeff(n, self.slots[n].eval_power(xi));
        }
        s
    }
}

/// Truncated vector-valued tensor power series: slots `A_1..A_N`, no
/// order-0 slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorTensorSeries {
    m: usize,
    maps: Vec<SymToVecMap>, // maps[k-1] is the order-k slot
}

impl VectorTensorSeries {
    pub fn from_maps(maps: Vec<SymToVecMap>) -> Self {
        assert!(!maps.is_empty(), "vector series needs at least the linear slot");
        let m = maps[0].site_count();
        for (i, map) in maps.iter().enumerate() {
            assert_eq!(map.order(), i + 1, "slot {} must hold an order-{} map", i + 1, i + 1);
            assert_eq!(map.site_count(), m, "site count mismatch in slot {}", i + 1);
        }
        Self { m, maps }
    }

    /// The identity series: linear slot identity, everything else zero.
    pub fn identity(m: usize, degree: usize) -> Self {
        let mut maps = Vec::with_capacity(degree);
        maps.push(SymToVecMap::identity(m));
        for k in 2..=degree {
            maps.push(SymToVecMap::zero(m, k));
        }
        Self { m, maps }
    }

    /// Diagonal lift of a one-variable series with `a_0 = 0`: slot `k` is
    /// `a_k · Diag_k`, so the series acts as `ξ ↦ a(ξ)` pointwise.
    pub fn diagonal_lift(a: &PowerSeries1D, m: usize) -> Self {
        assert!(a.coeff(0).is_zero(), "diagonal lift needs a vanishing constant term");
        let degree = a.degree();
        let maps = (1..=degree)
            .map(|k| SymToVecMap::diagonal(m, k, a.coeff(k)))
            .collect();
        Self { m, maps }
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.maps.len()
    }

    /// The order-`k` slot, `1 <= k <= degree`.
    pub fn map(&self, k: usize) -> &SymToVecMap {
        &self.maps[k - 1]
    }

    pub fn set_map(&mut self, k: usize, map: SymToVecMap) {
        assert_eq!(map.order(), k, "slot order mismatch");
        assert_eq!(map.site_count(), self.m, "site count mismatch");
        self.maps[k - 1] = map;
    }

    pub fn maps(&self) -> &[SymToVecMap] {
        &self.maps
    }

    pub fn linear_is_identity(&self) -> bool {
        self.maps[0].is_identity()
    }

    /// Composition `C = self ∘ other`:
    /// `C_n = Σ_p Σ_{k_1+..+k_p=n} A_p ∘ Sym (B_{k_1} ⊗ … ⊗ B_{k_p})`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "site count mismatch");
        assert_eq!(self.degree(), other.degree(), "truncation degree mismatch");
        let degree = self.degree();
        let mut out_maps = Vec::with_capacity(degree);
        for n in 1..=degree {
            let mut slot = SymToVecMap::zero(self.m, n);
            for lambda in multisets(self.m, n) {
                let basis = basis_tensor(self.m, &lambda);
                let mut column = vec![Rational::zero(); self.m];
                for parts in 1..=n {
                    let outer = self.map(parts);
                    if outer.is_zero() {
                        continue;
                    }
                    for comp in compositions(n, parts) {
                        let factors: Vec<&SymToVecMap> =
                            comp.iter().map(|&k| other.map(k)).collect();
                        let contribution = forward_factors_apply(outer, &factors, &basis);
                        for (x, v) in contribution.into_iter().enumerate() {
                            column[x] += v;
                        }
                    }
                }
                let mult = lambda.orbit_size_rat();
                for (x, v) in column.into_iter().enumerate() {
                    if !v.is_zero() {
                        slot.set_entry(x, lambda.clone(), v / &mult);
                    }
                }
            }
            out_maps.push(slot);
        }
        Self { m: self.m, maps: out_maps }
    }

    /// Two-sided compositional inverse, defined when the linear slot is an
    /// invertible site matrix:
    /// `B_1 = A_1^{-1}`, then
    /// `B_n = -A_1^{-1} Σ_{p=2..n} Σ_{k_1+..+k_p=n} A_p ∘ Sym (B_{k_1} ⊗ … ⊗ B_{k_p})`.
    pub fn inverse(&self) -> Result<Self> {
        let a1 = self.maps[0].to_site_matrix();
        let a1_inv = invert_matrix(a1).ok_or(UmbraError::SingularLinearPart)?;
        let degree = self.degree();
        let mut inv_maps: Vec<SymToVecMap> = Vec::with_capacity(degree);
        let mut b1 = SymToVecMap::zero(self.m, 1);
        for (x, row) in a1_inv.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    b1.set_entry(x, MultiIndex::single(y), v.clone());
                }
            }
        }
        inv_maps.push(b1);
        for n in 2..=degree {
            let mut slot = SymToVecMap::zero(self.m, n);
            for lambda in multisets(self.m, n) {
                let basis = basis_tensor(self.m, &lambda);
                let mut column = vec![Rational::zero(); self.m];
                for parts in 2..=n {
                    let outer = self.map(parts);
                    if outer.is_zero() {
                        continue;
                    }
                    for comp in compositions(n, parts) {
                        // every part is < n, so the needed slots exist already
                        let factors: Vec<&SymToVecMap> =
                            comp.iter().map(|&k| &inv_maps[k - 1]).collect();
                        let contribution = forward_factors_apply(outer, &factors, &basis);
                        for (x, v) in contribution.into_iter().enumerate() {
                            column[x] += v;
                        }
                    }
                }
                let mult = lambda.orbit_size_rat();
                for x in 0..self.m {
                    let mut v = Rational::zero();
                    for (y, c) in column.iter().enumerate() {
                        if !c.is_zero() {
                            v += &a1_inv[x][y] * c;
                        }
                    }
                    if !v.is_zero() {
                        slot.set_entry(x, lambda.clone(), -v / &mult);
                    }
                }
            }
            inv_maps.push(slot);
        }
        Ok(Self { m: self.m, maps: inv_maps })
    }

    /// The site vector of one-variable series `A(tξ) = Σ_k t^k A_k ξ^{⊗k}`
    /// (oracle helper for composition checks).
    pub fn eval_direction(&self, xi: &TestFunction) -> Vec<PowerSeries1D> {
        let degree = self.degree();
        let mut out = vec![PowerSeries1D::zero(degree); self.m];
        for k in 1..=degree {
            let power = SymTensor::from_power(xi.values(), k);
            let v = self.map(k).apply(&power);
            for (x, c) in v.into_iter().enumerate() {
                out[x].set_coeff(k, c);
            }
        }
        out
    }
}

/// Basis tensor with coefficient 1 at the given multiset.
fn basis_tensor(m: usize, idx: &MultiIndex) -> SymTensor {
    let mut t = SymTensor::zero(m, idx.order());
    t.set_coeff(idx.clone(), Rational::one());
    t
}

/// `A(B(tξ))` evaluated as one-variable series per site, by brute-force
/// substitution — the definitional oracle for `compose`.
pub fn compose_eval_oracle(
    a: &VectorTensorSeries,
    b: &VectorTensorSeries,
    xi: &TestFunction,
) -> Vec<PowerSeries1D> {
    let inner = b.eval_direction(xi);
    let degree = a.degree();
    let mut out = vec![PowerSeries1D::zero(degree); a.site_count()];
    for k in 1..=degree {
        let term = a.map(k).apply_series_power(&inner);
        for (x, s) in term.into_iter().enumerate() {
            out[x] = &out[x] + &s;
        }
    }
    out
}

/// `F(A(tξ))` as a one-variable series — the oracle for `compose_vector`.
pub fn scalar_compose_eval_oracle(
    f: &ScalarTensorSeries,
    a: &VectorTensorSeries,
    xi: &TestFunction,
) -> PowerSeries1D {
    let inner = a.eval_direction(xi);
    let degree = f.degree();
    let mut out = PowerSeries1D::constant(f.slot(0).scalar_value(), degree);
    for n in 1..=degree {
        // ⟨Fⁿ, u^{⊗n}⟩ with series-valued u: Σ_λ mult(λ) Fⁿ_λ Π u_s
        for (idx, c) in f.slot(n).entries() {
            let mut prod = PowerSeries1D::constant(idx.orbit_size_rat() * c, degree);
            for &s in idx.sites() {
                prod = prod.mul(&inner[s]);
            }
            out = &out + &prod;
        }
    }
    out
}
