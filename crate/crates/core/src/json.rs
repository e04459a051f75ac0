//! JSON interchange with exact fraction strings.
//!
//! Every rational is rendered as `p/q` (or `p` when the denominator is one);
//! multiset keys are 1-based, sorted and comma-joined, with the empty string
//! for the order-0 index. Maps use `BTreeMap` throughout so output is
//! byte-deterministic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UmbraError};
use crate::family::{Basis, BinomialFamily, PolyInBasis, TensorMap};
use crate::rational::{format_rational, parse_rational};
use crate::series::PowerSeries1D;
use crate::tensor::{MultiIndex, SiteSpace, SymTensor};
use crate::tenseries::{ScalarTensorSeries, SymToVecMap, VectorTensorSeries};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerSeriesJson {
    pub degree: usize,
    pub coeffs: Vec<String>,
}

impl From<&PowerSeries1D> for PowerSeriesJson {
    fn from(s: &PowerSeries1D) -> Self {
        Self {
            degree: s.degree(),
            coeffs: s.coeffs().iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<&PowerSeriesJson> for PowerSeries1D {
    type Error = UmbraError;

    fn try_from(j: &PowerSeriesJson) -> Result<Self> {
        if j.coeffs.len() != j.degree + 1 {
            return Err(UmbraError::Parse(format!(
                "series of degree {} needs {} coefficients, got {}",
                j.degree,
                j.degree + 1,
                j.coeffs.len()
            )));
        }
        let coeffs = j.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(PowerSeries1D::new(coeffs))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymTensorJson {
    pub order: usize,
    pub m: usize,
    pub coeffs: BTreeMap<String, String>,
}

impl From<&SymTensor> for SymTensorJson {
    fn from(t: &SymTensor) -> Self {
        let coeffs = t
            .entries()
            .map(|(idx, v)| (idx.to_string(), format_rational(v)))
            .collect();
        Self { order: t.order(), m: t.site_count(), coeffs }
    }
}

impl TryFrom<&SymTensorJson> for SymTensor {
    type Error = UmbraError;

    fn try_from(j: &SymTensorJson) -> Result<Self> {
        let mut t = SymTensor::zero(j.m, j.order);
        for (key, value) in &j.coeffs {
            let idx = MultiIndex::parse(key)?;
            if idx.order() != j.order {
                return Err(UmbraError::Parse(format!(
                    "key {key:?} has order {}, tensor has order {}",
                    idx.order(),
                    j.order
                )));
            }
            if idx.max_site().is_some_and(|s| s >= j.m) {
                return Err(UmbraError::Parse(format!("key {key:?} exceeds {} sites", j.m)));
            }
            t.set_coeff(idx, parse_rational(value)?);
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymToVecMapJson {
    pub order: usize,
    pub m: usize,
    pub matrix: BTreeMap<String, BTreeMap<String, String>>,
}

impl From<&SymToVecMap> for SymToVecMapJson {
    fn from(map: &SymToVecMap) -> Self {
        let matrix = map
            .rows()
            .map(|(site, row)| {
                let entries = row
                    .iter()
                    .map(|(idx, v)| (idx.to_string(), format_rational(v)))
                    .collect();
                ((site + 1).to_string(), entries)
            })
            .collect();
        Self { order: map.order(), m: map.site_count(), matrix }
    }
}

impl TryFrom<&SymToVecMapJson> for SymToVecMap {
    type Error = UmbraError;

    fn try_from(j: &SymToVecMapJson) -> Result<Self> {
        let mut map = SymToVecMap::zero(j.m, j.order);
        for (site_key, row) in &j.matrix {
            let site: usize = site_key
                .parse::<usize>()
                .ok()
                .and_then(|s| s.checked_sub(1))
                .ok_or_else(|| UmbraError::Parse(format!("bad site key: {site_key:?}")))?;
            if site >= j.m {
                return Err(UmbraError::Parse(format!("site {site_key} exceeds {} sites", j.m)));
            }
            for (idx_key, value) in row {
                let idx = MultiIndex::parse(idx_key)?;
                if idx.order() != j.order {
                    return Err(UmbraError::Parse(format!(
                        "key {idx_key:?} has order {}, map has order {}",
                        idx.order(),
                        j.order
                    )));
                }
                map.set_entry(site, idx, parse_rational(value)?);
            }
        }
        Ok(map)
    }
}

/// A scalar series is serialized as its list of tensor slots.
pub fn scalar_series_to_json(s: &ScalarTensorSeries) -> Vec<SymTensorJson> {
    s.slots().iter().map(SymTensorJson::from).collect()
}

pub fn scalar_series_from_json(slots: &[SymTensorJson]) -> Result<ScalarTensorSeries> {
    if slots.is_empty() {
        return Err(UmbraError::Parse("scalar series needs at least one slot".into()));
    }
    let tensors = slots.iter().map(SymTensor::try_from).collect::<Result<Vec<_>>>()?;
    for (n, t) in tensors.iter().enumerate() {
        if t.order() != n {
            return Err(UmbraError::Parse(format!(
                "slot {n} has order {}, expected {n}",
                t.order()
            )));
        }
    }
    Ok(ScalarTensorSeries::from_slots(tensors))
}

/// A vector series is serialized as its list of maps (orders 1..=N).
pub fn vector_series_to_json(s: &VectorTensorSeries) -> Vec<SymToVecMapJson> {
    s.maps().iter().map(SymToVecMapJson::from).collect()
}

pub fn vector_series_from_json(maps: &[SymToVecMapJson]) -> Result<VectorTensorSeries> {
    if maps.is_empty() {
        return Err(UmbraError::Parse("vector series needs at least the linear slot".into()));
    }
    let slots = maps.iter().map(SymToVecMap::try_from).collect::<Result<Vec<_>>>()?;
    for (i, map) in slots.iter().enumerate() {
        if map.order() != i + 1 {
            return Err(UmbraError::Parse(format!(
                "slot {} has order {}, expected {}",
                i + 1,
                map.order(),
                i + 1
            )));
        }
    }
    Ok(VectorTensorSeries::from_maps(slots))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiteSpaceJson {
    pub m: usize,
    pub weights: Vec<String>,
}

impl From<&SiteSpace> for SiteSpaceJson {
    fn from(s: &SiteSpace) -> Self {
        Self {
            m: s.site_count(),
            weights: s.weights().iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<&SiteSpaceJson> for SiteSpace {
    type Error = UmbraError;

    fn try_from(j: &SiteSpaceJson) -> Result<Self> {
        if j.weights.len() != j.m {
            return Err(UmbraError::Parse(format!(
                "site space with m = {} needs {} weights, got {}",
                j.m,
                j.m,
                j.weights.len()
            )));
        }
        let weights = j.weights.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        SiteSpace::new(weights)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub basis: String,
    pub coeffs: Vec<SymTensorJson>,
}

impl From<&PolyInBasis> for PolyJson {
    fn from(p: &PolyInBasis) -> Self {
        Self {
            basis: p.basis().name().to_string(),
            coeffs: p.slots().iter().map(SymTensorJson::from).collect(),
        }
    }
}

impl TryFrom<&PolyJson> for PolyInBasis {
    type Error = UmbraError;

    fn try_from(j: &PolyJson) -> Result<Self> {
        let basis = match j.basis.as_str() {
            "monomial" => Basis::Monomial,
            "p" => Basis::P,
            "s" => Basis::S,
            other => return Err(UmbraError::Parse(format!("unknown basis: {other:?}"))),
        };
        if j.coeffs.is_empty() {
            return Err(UmbraError::Parse("polynomial needs at least one slot".into()));
        }
        let coeffs = j.coeffs.iter().map(SymTensor::try_from).collect::<Result<Vec<_>>>()?;
        Ok(PolyInBasis::new(basis, coeffs))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorMapJson {
    pub out_order: usize,
    pub in_order: usize,
    pub matrix: BTreeMap<String, BTreeMap<String, String>>,
}

impl From<&TensorMap> for TensorMapJson {
    fn from(map: &TensorMap) -> Self {
        let matrix = map
            .rows()
            .map(|(out, row)| {
                let entries = row
                    .iter()
                    .map(|(idx, v)| (idx.to_string(), format_rational(v)))
                    .collect();
                (out.to_string(), entries)
            })
            .collect();
        Self { out_order: map.out_order(), in_order: map.in_order(), matrix }
    }
}

/// Full dump of a binomial family: the `A`/`B` series and the `U`/`R`
/// triangular arrays keyed `"n,k"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDumpJson {
    pub m: usize,
    pub degree: usize,
    pub a: Vec<SymToVecMapJson>,
    pub b: Vec<SymToVecMapJson>,
    pub u: BTreeMap<String, TensorMapJson>,
    pub r: BTreeMap<String, TensorMapJson>,
}

impl From<&BinomialFamily> for FamilyDumpJson {
    fn from(fam: &BinomialFamily) -> Self {
        let mut u = BTreeMap::new();
        let mut r = BTreeMap::new();
        for n in 0..=fam.degree() {
            for k in 0..=n {
                u.insert(format!("{n},{k}"), TensorMapJson::from(fam.u(n, k)));
                r.insert(format!("{k},{n}"), TensorMapJson::from(fam.r(k, n)));
            }
        }
        Self {
            m: fam.site_count(),
            degree: fam.degree(),
            a: vector_series_to_json(fam.a_series()),
            b: vector_series_to_json(fam.b_series()),
            u,
            r,
        }
    }
}
