//! Symmetric tensors over a finite site space.
//!
//! An order-`n` symmetric tensor is stored sparsely by multiset index: the
//! sorted tuple of `n` sites, with the coefficient understood as the common
//! entry at every permutation of that tuple. Pairings and evaluations
//! reinstate the orbit size (`n!` over the repetition factorials), so an
//! order-`n` tensor costs `C(m+n-1, n)` coefficients instead of `m^n`.
//!
//! The same representation carries both sides of the duality: distribution
//! side tensors (tensor powers of a mass vector, diagonal embeddings) and
//! test-function side coefficient tensors use identical coordinates, which
//! makes every adjoint in this crate a plain transpose.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinat::{binomial, factorial};
use crate::error::{Result, UmbraError};
use crate::rational::{from_big, pow, Rational};

/// Finite model of the underlying space: `m` sites with a positive reference
/// weight per site playing the role of the reference measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSpace {
    m: usize,
    weights: Vec<Rational>,
}

impl SiteSpace {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| *w <= Rational::zero()) {
            return Err(UmbraError::BadSiteSpace);
        }
        Ok(Self { m: weights.len(), weights })
    }

    /// `m` sites of unit weight.
    pub fn uniform(m: usize) -> Self {
        Self::new(vec![Rational::one(); m]).expect("unit weights are positive")
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn weight(&self, site: usize) -> &Rational {
        &self.weights[site]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Reference integral `⟨ξ⟩ = Σ_x w_x ξ_x`.
    pub fn integral(&self, xi: &TestFunction) -> Rational {
        assert_eq!(xi.len(), self.m, "site count mismatch");
        self.weights.iter().zip(xi.values()).map(|(w, v)| w * v).sum()
    }

    /// `⟨ξ^k⟩`, the integral of the pointwise power.
    pub fn integral_power(&self, xi: &TestFunction, k: usize) -> Rational {
        assert_eq!(xi.len(), self.m, "site count mismatch");
        self.weights
            .iter()
            .zip(xi.values())
            .map(|(w, v)| w * pow(v, k))
            .sum()
    }

    /// Volume of a set of sites.
    pub fn vol(&self, sites: &[usize]) -> Rational {
        sites.iter().map(|&x| self.weights[x].clone()).sum()
    }

    /// Weighted inner product `Σ_x w_x ξ_x ψ_x`.
    pub fn weighted_inner(&self, xi: &TestFunction, psi: &TestFunction) -> Rational {
        assert_eq!(xi.len(), self.m, "site count mismatch");
        assert_eq!(psi.len(), self.m, "site count mismatch");
        self.weights
            .iter()
            .zip(xi.values().iter().zip(psi.values()))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }
}

/// Test function: one rational value per site. Pointwise powers are taken
/// componentwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFunction(Vec<Rational>);

impl TestFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        Self(values)
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![Rational::zero(); m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn value(&self, site: usize) -> &Rational {
        &self.0[site]
    }

    /// Pointwise power `ξ^k`.
    pub fn pointwise_pow(&self, k: usize) -> Self {
        Self(self.0.iter().map(|v| pow(v, k)).collect())
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "site count mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "site count mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Sites where the two functions are both nonzero, if any.
    pub fn support_overlap(&self, other: &Self) -> Option<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .position(|(a, b)| !a.is_zero() && !b.is_zero())
    }

    /// Indicator of a set of sites.
    pub fn indicator(m: usize, sites: &[usize]) -> Self {
        let mut v = vec![Rational::zero(); m];
        for &x in sites {
            v[x] = Rational::one();
        }
        Self(v)
    }
}

/// Distribution: one rational mass per site; `δ_x` is the unit vector at `x`
/// and the dual pairing is `⟨ω, ξ⟩ = Σ_x ω_x ξ_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution(Vec<Rational>);

impl Distribution {
    pub fn new(masses: Vec<Rational>) -> Self {
        Self(masses)
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![Rational::zero(); m])
    }

    pub fn dirac(m: usize, site: usize) -> Self {
        let mut v = vec![Rational::zero(); m];
        v[site] = Rational::one();
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn masses(&self) -> &[Rational] {
        &self.0
    }

    pub fn mass(&self, site: usize) -> &Rational {
        &self.0[site]
    }

    /// `⟨ω, ξ⟩`.
    pub fn pair(&self, xi: &TestFunction) -> Rational {
        assert_eq!(self.len(), xi.len(), "site count mismatch");
        self.0.iter().zip(xi.values()).map(|(a, b)| a * b).sum()
    }

    /// Total mass on a set of sites.
    pub fn mass_on(&self, sites: &[usize]) -> Rational {
        sites.iter().map(|&x| self.0[x].clone()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "site count mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "site count mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * s).collect())
    }
}

/// Canonical coordinate of a symmetric tensor entry: the non-decreasing tuple
/// of site indices (0-based internally; rendered 1-based in JSON).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Sorts the tuple; any order is accepted.
    pub fn new(mut sites: Vec<usize>) -> Self {
        sites.sort_unstable();
        Self(sites)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(site: usize) -> Self {
        Self(vec![site])
    }

    /// `k` copies of the same site — a diagonal index.
    pub fn diagonal(site: usize, k: usize) -> Self {
        Self(vec![site; k])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn max_site(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Number of distinct permutations of the tuple, `n!/Π c_s!`.
    pub fn orbit_size(&self) -> BigInt {
        let mut denom = BigInt::one();
        let mut run = 1usize;
        for i in 1..self.0.len() {
            if self.0[i] == self.0[i - 1] {
                run += 1;
            } else {
                denom *= factorial(run);
                run = 1;
            }
        }
        denom *= factorial(run);
        factorial(self.0.len()) / denom
    }

    pub fn orbit_size_rat(&self) -> Rational {
        from_big(self.orbit_size())
    }

    /// Site multiplicities as (site, count) runs.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &s in &self.0 {
            match out.last_mut() {
                Some((site, count)) if *site == s => *count += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// Multiset union (concatenate and sort).
    pub fn union(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Self::new(v)
    }

    /// All sub-multisets of the given size, each paired with the complement.
    pub fn sub_multisets(&self, size: usize) -> Vec<(MultiIndex, MultiIndex)> {
        let runs = self.runs();
        let mut out = Vec::new();
        let mut counts = vec![0usize; runs.len()];
        fn rec(
            runs: &[(usize, usize)],
            i: usize,
            remaining: usize,
            counts: &mut Vec<usize>,
            out: &mut Vec<(MultiIndex, MultiIndex)>,
        ) {
            if i == runs.len() {
                if remaining == 0 {
                    let mut taken = Vec::new();
                    let mut left = Vec::new();
                    for (j, &(site, avail)) in runs.iter().enumerate() {
                        taken.extend(std::iter::repeat(site).take(counts[j]));
                        left.extend(std::iter::repeat(site).take(avail - counts[j]));
                    }
                    out.push((MultiIndex(taken), MultiIndex(left)));
                }
                return;
            }
            let cap = runs[i].1.min(remaining);
            for take in 0..=cap {
                counts[i] = take;
                rec(runs, i + 1, remaining - take, counts, out);
            }
            counts[i] = 0;
        }
        if size <= self.0.len() {
            rec(&runs, 0, size, &mut counts, &mut out);
        }
        out
    }

    /// Ordered splits of the multiset into parts of the given sizes.
    pub fn splits(&self, sizes: &[usize]) -> Vec<Vec<MultiIndex>> {
        assert_eq!(sizes.iter().sum::<usize>(), self.0.len(), "split sizes must sum to the order");
        if sizes.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (head, rest) in self.sub_multisets(sizes[0]) {
            for mut tail in rest.splits(&sizes[1..]) {
                let mut split = Vec::with_capacity(sizes.len());
                split.push(head.clone());
                split.append(&mut tail);
                out.push(split);
            }
        }
        out
    }

    /// Number of position subsets of a tuple with content `self` that select
    /// the sub-multiset `sub`: `Π_s C(c_s(self), c_s(sub))`.
    pub fn selection_count(&self, sub: &MultiIndex) -> BigInt {
        let mut acc = BigInt::one();
        let runs = self.runs();
        let sub_runs = sub.runs();
        let mut j = 0;
        for &(site, take) in &sub_runs {
            while j < runs.len() && runs[j].0 < site {
                j += 1;
            }
            if j == runs.len() || runs[j].0 != site || runs[j].1 < take {
                return BigInt::zero();
            }
            acc *= binomial(runs[j].1, take);
        }
        acc
    }

    /// True when every entry lies in the given site set.
    pub fn within(&self, sites: &[usize]) -> bool {
        self.0.iter().all(|s| sites.contains(s))
    }
}

impl fmt::Display for MultiIndex {
    /// 1-based, comma-joined: the JSON key format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| (s + 1).to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl MultiIndex {
    /// Parse the 1-based comma-joined key format ("" is the empty index).
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(Self::empty());
        }
        let mut sites = Vec::new();
        for part in t.split(',') {
            let v: usize = part
                .trim()
                .parse()
                .map_err(|_| UmbraError::Parse(format!("bad multiset key: {s:?}")))?;
            if v == 0 {
                return Err(UmbraError::Parse(format!("multiset keys are 1-based: {s:?}")));
            }
            sites.push(v - 1);
        }
        Ok(Self::new(sites))
    }
}

/// All multisets of the given order over `m` sites, in increasing order.
pub fn multisets(m: usize, order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(order);
    fn rec(m: usize, order: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if current.len() == order {
            out.push(MultiIndex(current.clone()));
            return;
        }
        for s in start..m {
            current.push(s);
            rec(m, order, s, current, out);
            current.pop();
        }
    }
    rec(m, order, 0, &mut current, &mut out);
    out
}

/// All tuples in `{0..m}^k` (used when a sum genuinely runs over positions).
pub fn site_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * m);
        for t in &out {
            for s in 0..m {
                let mut u = t.clone();
                u.push(s);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Sparse symmetric tensor of a fixed order over `m` sites. Order zero is a
/// scalar (the vacuum component). Absent keys are zero coefficients; zero
/// coefficients are never stored, so equality is map equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymTensor {
    m: usize,
    order: usize,
    coeffs: BTreeMap<MultiIndex, Rational>,
}

impl SymTensor {
    pub fn zero(m: usize, order: usize) -> Self {
        Self { m, order, coeffs: BTreeMap::new() }
    }

    /// Order-0 tensor holding a scalar.
    pub fn scalar(m: usize, value: Rational) -> Self {
        let mut t = Self::zero(m, 0);
        t.set_coeff(MultiIndex::empty(), value);
        t
    }

    pub fn site_count(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Rational {
        self.coeffs.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set_coeff(&mut self, idx: MultiIndex, value: Rational) {
        assert_eq!(idx.order(), self.order, "index order mismatch");
        debug_assert!(idx.max_site().is_none_or(|s| s < self.m), "site out of range");
        if value.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, value);
        }
    }

    pub fn add_to_coeff(&mut self, idx: MultiIndex, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let updated = self.coeff(&idx) + value;
        self.set_coeff(idx, updated);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Scalar value of an order-0 tensor.
    pub fn scalar_value(&self) -> Rational {
        assert_eq!(self.order, 0, "not an order-0 tensor");
        self.coeff(&MultiIndex::empty())
    }

    /// `n`-th tensor power of a site vector: coefficient `Π_i v_{λ_i}`.
    pub fn from_power(values: &[Rational], n: usize) -> Self {
        let m = values.len();
        let mut t = Self::zero(m, n);
        for idx in multisets(m, n) {
            let mut c = Rational::one();
            for &s in idx.sites() {
                c *= &values[s];
            }
            t.set_coeff(idx, c);
        }
        t
    }

    /// Diagonal embedding of a site vector at order `k`: mass `v_x` at the
    /// index `(x,..,x)`, zero elsewhere. Pairs as `⟨ζ, ξ^k⟩` against `ξ^{⊗k}`.
    pub fn diag_embed(values: &[Rational], k: usize) -> Self {
        assert!(k >= 1, "diagonal embedding needs order >= 1");
        let m = values.len();
        let mut t = Self::zero(m, k);
        for (x, v) in values.iter().enumerate() {
            t.set_coeff(MultiIndex::diagonal(x, k), v.clone());
        }
        t
    }

    /// Pairing against the rank-one power `ξ^{⊗n}`:
    /// `Σ_λ mult(λ) F_λ Π_i ξ_{λ_i}`.
    pub fn eval_power(&self, xi: &TestFunction) -> Rational {
        assert_eq!(xi.len(), self.m, "site count mismatch");
        let mut acc = Rational::zero();
        for (idx, c) in &self.coeffs {
            let mut term = idx.orbit_size_rat() * c;
            for &s in idx.sites() {
                term *= xi.value(s);
            }
            acc += term;
        }
        acc
    }

    /// Diagonal dual pairing `Σ_λ mult(λ) F_λ f_λ`; agrees with `eval_power`
    /// when the other side is a rank-one power.
    pub fn pair(&self, other: &SymTensor) -> Rational {
        assert_eq!(self.m, other.m, "site count mismatch");
        assert_eq!(self.order, other.order, "order mismatch");
        let mut acc = Rational::zero();
        for (idx, c) in &self.coeffs {
            let d = other.coeff(idx);
            if !d.is_zero() {
                acc += idx.orbit_size_rat() * c * d;
            }
        }
        acc
    }

    /// Symmetric tensor product. On rank-one evaluations this realizes the
    /// pointwise product: `eval_power(F⊙G, ξ) = eval_power(F,ξ) eval_power(G,ξ)`.
    pub fn sym_product(&self, other: &SymTensor) -> SymTensor {
        assert_eq!(self.m, other.m, "site count mismatch");
        let n = self.order + other.order;
        let norm = from_big(binomial(n, self.order)).recip();
        let mut out = SymTensor::zero(self.m, n);
        for (a_idx, a) in &self.coeffs {
            for (b_idx, b) in &other.coeffs {
                let joined = a_idx.union(b_idx);
                // number of position subsets of the joined orbit that split it
                // back into (a_idx, b_idx)
                let count = joined.selection_count(a_idx);
                let term = &norm * from_big(count) * a * b;
                out.add_to_coeff(joined, &term);
            }
        }
        out
    }

    /// Pair a lower-order tensor into the first `k` arguments:
    /// `h_μ = Σ_{|λ|=k} mult(λ) G_λ f_{λ⊎μ}` for `G = lower`, `f = self`.
    pub fn contract(&self, lower: &SymTensor) -> SymTensor {
        assert_eq!(self.m, lower.m, "site count mismatch");
        assert!(lower.order <= self.order, "contraction order exceeds tensor order");
        let out_order = self.order - lower.order;
        let mut out = SymTensor::zero(self.m, out_order);
        for (g_idx, g) in &lower.coeffs {
            let weight = g_idx.orbit_size_rat() * g;
            for mu in multisets(self.m, out_order) {
                let v = self.coeff(&g_idx.union(&mu));
                if !v.is_zero() {
                    out.add_to_coeff(mu, &(&weight * v));
                }
            }
        }
        out
    }

    /// Total mass over `Λ^n` for a site subset `Λ`: the pairing against the
    /// indicator power.
    pub fn mass_on(&self, sites: &[usize]) -> Rational {
        let mut acc = Rational::zero();
        for (idx, c) in &self.coeffs {
            if idx.within(sites) {
                acc += idx.orbit_size_rat() * c;
            }
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> SymTensor {
        if s.is_zero() {
            return SymTensor::zero(self.m, self.order);
        }
        let coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), v * s)).collect();
        SymTensor { m: self.m, order: self.order, coeffs }
    }
}

impl Add for &SymTensor {
    type Output = SymTensor;
    fn add(self, rhs: &SymTensor) -> SymTensor {
        assert_eq!(self.m, rhs.m, "site count mismatch");
        assert_eq!(self.order, rhs.order, "order mismatch");
        let mut out = self.clone();
        for (idx, v) in &rhs.coeffs {
            out.add_to_coeff(idx.clone(), v);
        }
        out
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: &SymTensor) -> SymTensor {
        self + &rhs.neg()
    }
}

impl SymTensor {
    pub fn neg(&self) -> SymTensor {
        let coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), -v)).collect();
        SymTensor { m: self.m, order: self.order, coeffs }
    }
}

impl Neg for &SymTensor {
    type Output = SymTensor;
    fn neg(self) -> SymTensor {
        SymTensor::neg(self)
    }
}
