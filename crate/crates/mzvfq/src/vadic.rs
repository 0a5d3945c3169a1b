//! Finite places v of F_q(θ) and truncated elements of the completion k_v.

use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::ThetaPoly;

struct PlaceData {
    v: ThetaPoly,
    powers: RwLock<Vec<ThetaPoly>>,
}

/// A monic irreducible v ∈ A; powers of v are cached.
#[derive(Clone)]
pub struct Place(Arc<PlaceData>);

impl PartialEq for Place {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.v == other.0.v
    }
}

impl Eq for Place {}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Place({})", self.0.v)
    }
}

impl Place {
    pub fn new(v: &ThetaPoly) -> Result<Place> {
        if !v.is_monic() || !v.is_irreducible() {
            return Err(Error::InvalidPlace(format!("{v} is not monic irreducible")));
        }
        let one = ThetaPoly::one(v.field());
        Ok(Place(Arc::new(PlaceData { v: v.clone(), powers: RwLock::new(vec![one, v.clone()]) })))
    }

    pub fn parse(field: &Field, src: &str) -> Result<Place> {
        Place::new(&ThetaPoly::parse(field, src)?)
    }

    pub fn poly(&self) -> &ThetaPoly {
        &self.0.v
    }

    pub fn field(&self) -> &Field {
        self.0.v.field()
    }

    pub fn degree(&self) -> usize {
        self.0.v.degree().expect("place is nonconstant")
    }

    /// v^n.
    pub fn pow(&self, n: usize) -> ThetaPoly {
        if let Some(p) = self.0.powers.read().expect("lock").get(n) {
            return p.clone();
        }
        let mut cache = self.0.powers.write().expect("lock");
        while cache.len() <= n {
            let next = &cache[cache.len() - 1] * &self.0.v;
            cache.push(next);
        }
        cache[n].clone()
    }

    /// (e, p / v^e) with e the exact v-valuation of nonzero p, capped at `cap`.
    pub fn split_valuation(&self, p: &ThetaPoly, cap: usize) -> (usize, ThetaPoly) {
        let mut e = 0;
        let mut rest = p.clone();
        while e < cap {
            let (q, r) = rest.div_rem(&self.0.v).expect("v nonzero");
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        (e, rest)
    }

    /// v-adic valuation of a nonzero polynomial.
    pub fn valuation(&self, p: &ThetaPoly) -> Option<usize> {
        (!p.is_zero()).then(|| self.split_valuation(p, usize::MAX).0)
    }

    /// Σ c·θ^e reduced mod v^n without expanding large exponents.
    pub fn reduce_sparse(&self, terms: &[(Fe, u128)], n: usize) -> ThetaPoly {
        let m = self.pow(n);
        let theta = ThetaPoly::var(self.field());
        terms.iter().fold(ThetaPoly::zero(self.field()), |acc, &(c, e)| {
            let mono = theta.pow_mod(e, &m).expect("modulus nonzero").scale(c);
            (&acc + &mono).rem(&m).expect("modulus nonzero")
        })
    }
}

/// Valuation floor standing for "exactly zero".
pub const V_EXACT: i64 = i64::MAX / 4;

/// v^val · unit with unit known mod v^rel and prime to v.
/// Zero to precision is unit = 0, rel = 0, with `val` holding the absolute precision.
#[derive(Clone, PartialEq, Eq)]
pub struct VAdic {
    place: Place,
    val: i64,
    rel: usize,
    unit: ThetaPoly,
}

impl VAdic {
    pub fn zero(place: &Place, abs: i64) -> VAdic {
        VAdic { place: place.clone(), val: abs.min(V_EXACT), rel: 0, unit: ThetaPoly::zero(place.field()) }
    }

    /// Exact zero; precision bookkeeping saturates at [`V_EXACT`].
    pub fn exact_zero(place: &Place) -> VAdic {
        Self::zero(place, V_EXACT)
    }

    /// Value known modulo v^abs whose representative (mod v^{abs-shift}) is `p·v^shift`.
    fn from_scaled(place: &Place, p: &ThetaPoly, shift: i64, abs: i64) -> VAdic {
        if p.is_zero() || shift >= abs {
            return VAdic::zero(place, abs);
        }
        let cap = (abs - shift) as usize;
        let (e, rest) = place.split_valuation(p, cap);
        let val = shift + e as i64;
        if val >= abs {
            return VAdic::zero(place, abs);
        }
        let rel = (abs - val) as usize;
        let unit = rest.rem(&place.pow(rel)).expect("nonzero modulus");
        VAdic { place: place.clone(), val, rel, unit }
    }

    /// Exact polynomial known to v^abs.
    pub fn from_poly(place: &Place, p: &ThetaPoly, abs: i64) -> VAdic {
        Self::from_scaled(place, p, 0, abs)
    }

    /// num/den with the unit part known to v^rel.
    pub fn from_rational(place: &Place, num: &ThetaPoly, den: &ThetaPoly, rel: usize) -> Result<VAdic> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let Some(vn) = place.valuation(num) else {
            return Ok(VAdic::zero(place, rel as i64));
        };
        let vd = place.valuation(den).expect("nonzero");
        let m = place.pow(rel);
        let (_, un) = place.split_valuation(num, vn);
        let (_, ud) = place.split_valuation(den, vd);
        let unit = un.mul_mod(&ud.inv_mod(&m)?, &m)?;
        Ok(VAdic { place: place.clone(), val: vn as i64 - vd as i64, rel, unit })
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_zero() && self.val >= V_EXACT
    }

    /// Valuation, or None when zero to precision.
    pub fn val(&self) -> Option<i64> {
        (!self.is_zero_to_precision()).then_some(self.val)
    }

    /// Lower bound for the valuation (the absolute precision when zero).
    pub fn val_bound(&self) -> i64 {
        self.val
    }

    /// The value is known modulo v^{abs_prec}.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.rel as i64
    }

    pub fn rel(&self) -> usize {
        self.rel
    }

    pub fn unit(&self) -> &ThetaPoly {
        &self.unit
    }

    /// True when v^n divides the value, certified.
    pub fn is_small(&self, n: i64) -> bool {
        self.val_bound() >= n
    }

    pub fn agrees_to(&self, other: &VAdic, n: i64) -> bool {
        self.sub(other).is_small(n)
    }

    /// Representative polynomial times v^{val - base} reduced mod v^{abs - base}.
    fn scaled_rep(&self, base: i64, abs: i64) -> ThetaPoly {
        if self.unit.is_zero() || self.val >= abs {
            return ThetaPoly::zero(self.place.field());
        }
        let m = self.place.pow((abs - base) as usize);
        (&self.unit * &self.place.pow((self.val - base) as usize)).rem(&m).expect("nonzero")
    }

    fn combine(&self, other: &VAdic, negate: bool) -> VAdic {
        let abs = self.abs_prec().min(other.abs_prec());
        let base = self.val.min(other.val);
        if base >= abs {
            return VAdic::zero(&self.place, abs);
        }
        let a = self.scaled_rep(base, abs);
        let b = other.scaled_rep(base, abs);
        let s = if negate { &a - &b } else { &a + &b };
        Self::from_scaled(&self.place, &s, base, abs)
    }

    pub fn add(&self, other: &VAdic) -> VAdic {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &VAdic) -> VAdic {
        self.combine(other, true)
    }

    pub fn neg(&self) -> VAdic {
        VAdic { unit: -&self.unit, ..self.clone() }
    }

    pub fn mul(&self, other: &VAdic) -> VAdic {
        if self.is_zero_to_precision() || other.is_zero_to_precision() {
            let abs = self
                .val
                .saturating_add(other.abs_prec())
                .min(other.val.saturating_add(self.abs_prec()));
            return VAdic::zero(&self.place, abs);
        }
        let val = self.val + other.val;
        let rel = self.rel.min(other.rel);
        let unit = self.unit.mul_mod(&other.unit, &self.place.pow(rel)).expect("nonzero");
        VAdic { place: self.place.clone(), val, rel, unit }
    }

    pub fn inv(&self) -> Result<VAdic> {
        if self.is_zero_to_precision() {
            return Err(Error::Precision("inverse of a v-adic value that is zero to precision".into()));
        }
        let unit = self.unit.inv_mod(&self.place.pow(self.rel))?;
        Ok(VAdic { place: self.place.clone(), val: -self.val, rel: self.rel, unit })
    }

    pub fn div(&self, other: &VAdic) -> Result<VAdic> {
        Ok(self.mul(&other.inv()?))
    }

    /// An exact polynomial carried with enough relative precision not to limit `self`.
    fn exact_partner(&self, p: &ThetaPoly) -> Option<VAdic> {
        let e = self.place.valuation(p)? as i64;
        let rel = if self.is_zero_to_precision() { 1 } else { self.rel as i64 };
        Some(VAdic::from_poly(&self.place, p, e + rel))
    }

    /// self·p for an exact polynomial p; absolute precision grows by v(p).
    pub fn mul_poly(&self, p: &ThetaPoly) -> VAdic {
        match self.exact_partner(p) {
            Some(q) => self.mul(&q),
            None => VAdic::exact_zero(&self.place),
        }
    }

    /// self/p for an exact nonzero polynomial p; absolute precision drops by v(p).
    pub fn div_poly(&self, p: &ThetaPoly) -> Result<VAdic> {
        self.div(&self.exact_partner(p).ok_or(Error::DivisionByZero)?)
    }

    /// x ↦ x^{q^i}; relative precision grows by q^i and is capped at `rel_cap`.
    pub fn twist_capped(&self, i: i64, rel_cap: usize) -> Result<VAdic> {
        if i < 0 {
            return Err(Error::Unsupported("negative twist of a series value".into()));
        }
        let step = (self.place.field().q() as i64).checked_pow(i as u32).ok_or(Error::Overflow)?;
        if self.is_zero_to_precision() {
            return Ok(VAdic::zero(&self.place, self.abs_prec().saturating_mul(step)));
        }
        let val = self.val.checked_mul(step).ok_or(Error::Overflow)?;
        let rel = (self.rel as i64).saturating_mul(step).min(i64::try_from(rel_cap).unwrap_or(i64::MAX)) as usize;
        let unit = self.unit.pow_mod(step as u128, &self.place.pow(rel))?;
        Ok(VAdic { place: self.place.clone(), val, rel, unit })
    }

    pub fn twist(&self, i: i64) -> Result<VAdic> {
        self.twist_capped(i, usize::MAX)
    }

    /// Lowers the relative precision to at most `rel`.
    pub fn truncate_rel(&self, rel: usize) -> VAdic {
        if rel >= self.rel || self.is_zero_to_precision() {
            return self.clone();
        }
        if rel == 0 {
            return VAdic::zero(&self.place, self.val);
        }
        let unit = self.unit.rem(&self.place.pow(rel)).expect("nonzero");
        VAdic { rel, unit, ..self.clone() }
    }

    /// Lowers the absolute precision to at most `abs`.
    pub fn truncate_abs(&self, abs: i64) -> VAdic {
        if abs >= self.abs_prec() {
            self.clone()
        } else if abs <= self.val {
            VAdic::zero(&self.place, abs)
        } else {
            self.truncate_rel((abs - self.val) as usize)
        }
    }

    pub fn to_json(&self) -> VAdicJson {
        VAdicJson {
            v: self.place.poly().codes(),
            val: self.val(),
            unit_coeffs: self.unit.codes(),
            n: self.rel,
            abs_prec: self.abs_prec(),
        }
    }
}

/// Serialized form; a zero-to-precision value has `val = null` and `abs_prec` as its bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VAdicJson {
    pub v: Vec<u32>,
    pub val: Option<i64>,
    pub unit_coeffs: Vec<u32>,
    #[serde(rename = "N")]
    pub n: usize,
    pub abs_prec: i64,
}

impl fmt::Display for VAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.place.poly();
        if self.is_zero_to_precision() {
            write!(f, "O(({v})^{})", self.val)
        } else {
            write!(f, "({v})^{} * ({}) + O(({v})^{})", self.val, self.unit, self.abs_prec())
        }
    }
}

impl fmt::Debug for VAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VAdic({self})")
    }
}
