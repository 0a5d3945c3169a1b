//! Truncated Laurent series in 1/θ: elements of k_∞ known to an absolute precision.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::{convolve, ThetaPoly};

/// Σ coeffs[k]·θ^{low+k} + O(θ^{low-1}); every degree >= `low` is known.
#[derive(Clone, PartialEq, Eq)]
pub struct InfAdic {
    field: Field,
    low: i64,
    coeffs: Vec<Fe>,
}

/// Precision floor standing for "known to every degree".
pub const EXACT_LOW: i64 = i64::MIN / 4;

fn checked(v: Option<i64>) -> Result<i64> {
    v.ok_or(Error::Overflow)
}

impl InfAdic {
    fn normalized(field: &Field, low: i64, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        InfAdic { field: field.clone(), low, coeffs }
    }

    /// Zero known to the degrees >= low.
    pub fn zero(field: &Field, low: i64) -> Self {
        InfAdic { field: field.clone(), low: low.max(EXACT_LOW), coeffs: Vec::new() }
    }

    /// Exact zero; precision bookkeeping saturates at [`EXACT_LOW`].
    pub fn exact_zero(field: &Field) -> Self {
        Self::zero(field, EXACT_LOW)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.low <= EXACT_LOW
    }

    /// Exact polynomial p kept to `rel` leading coefficients (padding below the constant term).
    pub fn from_poly(p: &ThetaPoly, rel: usize) -> Self {
        let f = p.field();
        let Some(deg) = p.degree() else {
            return Self::exact_zero(f);
        };
        let low = deg as i64 - rel as i64 + 1;
        let coeffs = (low..=deg as i64)
            .map(|d| if d < 0 { Fe::ZERO } else { p.coeff(d as usize) })
            .collect();
        Self::normalized(f, low, coeffs)
    }

    /// A polynomial known to every degree >= low.
    pub fn from_poly_abs(p: &ThetaPoly, low: i64) -> Self {
        let f = p.field();
        let top = p.deg_i64().max(low);
        let coeffs = (low..=top)
            .map(|d| if d < 0 { Fe::ZERO } else { p.coeff(d as usize) })
            .collect();
        Self::normalized(f, low, coeffs)
    }

    /// Sparse Σ c·θ^e kept to `rel` leading coefficients.
    pub fn from_sparse(field: &Field, terms: &[(Fe, i64)], rel: usize) -> Self {
        let Some(top) = terms.iter().filter(|t| !t.0.is_zero()).map(|t| t.1).max() else {
            return Self::exact_zero(field);
        };
        let low = top - rel as i64 + 1;
        let mut coeffs = vec![Fe::ZERO; rel];
        for &(c, e) in terms {
            if e >= low {
                let slot = &mut coeffs[(e - low) as usize];
                *slot = field.add(*slot, c);
            }
        }
        Self::normalized(field, low, coeffs)
    }

    /// Laurent expansion of num/den known to absolute precision q^{-prec}.
    pub fn from_rational(num: &ThetaPoly, den: &ThetaPoly, prec: i64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = num.field();
        if num.is_zero() {
            return Ok(Self::zero(f, -prec));
        }
        let top = num.deg_i64() - den.deg_i64();
        let rel = (top + prec + 1).max(1) as usize;
        let value = Self::from_poly(num, rel).mul(&Self::from_poly(den, rel).inv()?)?;
        Ok(value.truncate_abs(-prec))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Lowest known degree; the absolute precision is q^{-prec} with prec = -low.
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn prec(&self) -> i64 {
        -self.low
    }

    /// Degree of the leading known nonzero term, i.e. log_q |x|_∞.
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Upper bound for log_q |x|_∞ (low - 1 when zero to precision).
    pub fn top_bound(&self) -> i64 {
        self.top().unwrap_or(self.low.saturating_sub(1))
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of θ^d (zero above the top; None below the known range).
    pub fn coeff(&self, d: i64) -> Option<Fe> {
        if d < self.low {
            None
        } else {
            Some(self.coeffs.get((d - self.low) as usize).copied().unwrap_or(Fe::ZERO))
        }
    }

    /// True when |x|_∞ < q^{-m} is certified.
    pub fn is_small(&self, m: i64) -> bool {
        self.low <= -m && self.top_bound() < -m
    }

    /// |self - other|_∞ < q^{-m}, certified by the known digits.
    pub fn agrees_to(&self, other: &Self, m: i64) -> bool {
        self.sub(other).is_small(m)
    }

    /// Forgets every digit below `low`.
    pub fn truncate_abs(&self, low: i64) -> Self {
        if low <= self.low {
            return self.clone();
        }
        let skip = ((low - self.low) as usize).min(self.coeffs.len());
        Self::normalized(&self.field, low, self.coeffs[skip..].to_vec())
    }

    /// Keeps at most `rel` digits below and including the top.
    pub fn truncate_rel(&self, rel: usize) -> Self {
        match self.top() {
            Some(top) => self.truncate_abs(top - rel as i64 + 1),
            None => self.clone(),
        }
    }

    fn digits_from(&self, low: i64, high: i64) -> Vec<Fe> {
        (low..=high).map(|d| self.coeff(d).unwrap_or(Fe::ZERO)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let f = &self.field;
        let low = self.low.max(other.low);
        let high = self.top_bound().max(other.top_bound());
        if high < low {
            return Self::zero(f, low);
        }
        let a = self.digits_from(low, high);
        let b = other.digits_from(low, high);
        let coeffs = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| if negate { f.sub(x, y) } else { f.add(x, y) })
            .collect();
        Self::normalized(f, low, coeffs)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        InfAdic { field: f.clone(), low: self.low, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fe) -> Self {
        let f = &self.field;
        Self::normalized(f, self.low, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    /// Multiplication by θ^k.
    pub fn shift(&self, k: i64) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        Ok(InfAdic { field: self.field.clone(), low: checked(self.low.checked_add(k))?, coeffs: self.coeffs.clone() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let f = &self.field;
        // Saturation only ever raises a floor, which understates precision.
        let low = self
            .low
            .saturating_add(other.top_bound())
            .max(other.low.saturating_add(self.top_bound()))
            .max(EXACT_LOW);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Self::zero(f, low));
        }
        let base = checked(self.low.checked_add(other.low))?;
        let skip = (low - base).max(0) as usize;
        let coeffs = convolve(f, &self.coeffs, &other.coeffs, skip);
        Ok(Self::normalized(f, base + skip as i64, coeffs))
    }

    /// Product with an exact polynomial; precision moves up by deg p only.
    pub fn mul_poly(&self, p: &ThetaPoly) -> Result<Self> {
        let f = &self.field;
        let Some(deg) = p.degree() else {
            return Ok(Self::exact_zero(f));
        };
        let mut acc = Self::zero(f, self.low.saturating_add(deg as i64).max(EXACT_LOW));
        for (k, &c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.shift(k as i64)?.scale(c));
            }
        }
        Ok(acc.truncate_abs(self.low.saturating_add(deg as i64)))
    }

    /// Quotient by a nonzero exact polynomial, keeping every digit the input determines.
    pub fn div_poly(&self, p: &ThetaPoly) -> Result<Self> {
        let deg = p.degree().ok_or(Error::DivisionByZero)? as i64;
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        let span = (self.top_bound() - self.low + 2).max(1) as usize;
        let inv = Self::from_poly(p, span + p.coeffs().len()).inv()?;
        Ok(self.mul(&inv)?.truncate_abs(self.low - deg))
    }

    /// Inverse with the same relative precision as the input.
    pub fn inv(&self) -> Result<Self> {
        let f = &self.field;
        let top = self
            .top()
            .ok_or_else(|| Error::Precision("inverse of a value that is zero to precision".into()))?;
        let rel = self.coeffs.len();
        let lead_inv = f.inv(self.coeffs[rel - 1])?;
        // Normalized x = θ^top (1 - w) with w in θ^{-1}F_q[[θ^{-1}]]; invert digit by digit.
        let digits: Vec<Fe> = (0..rel).map(|k| f.mul(self.coeffs[rel - 1 - k], lead_inv)).collect();
        let mut out = vec![Fe::ZERO; rel];
        out[0] = Fe::ONE;
        for k in 1..rel {
            let mut acc = Fe::ZERO;
            for j in 1..=k {
                acc = f.add(acc, f.mul(digits[j], out[k - j]));
            }
            out[k] = f.neg(acc);
        }
        let coeffs: Vec<Fe> = out.iter().rev().map(|&c| f.mul(c, lead_inv)).collect();
        let low = checked((-top).checked_sub(rel as i64 - 1))?;
        Ok(Self::normalized(f, low, coeffs))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut n: u64) -> Result<Self> {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap_or_else(|| Self::from_poly(&ThetaPoly::one(&self.field), self.coeffs.len().max(1))))
    }

    /// θ ↦ θ^{q^i} for i >= 0; unknown digits below `low` spread to below q^i(low-1)+1.
    pub fn twist(&self, i: i64) -> Result<Self> {
        self.twist_capped(i, usize::MAX)
    }

    /// Twist keeping at most `rel` leading digits.
    pub fn twist_capped(&self, i: i64, rel: usize) -> Result<Self> {
        if i < 0 {
            return Err(Error::Unsupported("negative twist of a series value".into()));
        }
        if i == 0 {
            return Ok(if rel == usize::MAX { self.clone() } else { self.truncate_rel(rel) });
        }
        let step = (self.field.q() as i64).checked_pow(i as u32).ok_or(Error::Overflow)?;
        let new_low = (self.low - 1).saturating_mul(step).saturating_add(1).max(EXACT_LOW);
        let Some(top) = self.top() else {
            return Ok(Self::zero(&self.field, new_low));
        };
        let new_top = checked(top.checked_mul(step))?;
        let low = if rel == usize::MAX { new_low } else { new_low.max(new_top - rel as i64 + 1) };
        let span = new_top - low + 1;
        if span as u64 > crate::poly::MAX_DENSE_DEGREE {
            return Err(Error::Overflow);
        }
        let mut coeffs = vec![Fe::ZERO; span as usize];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let d = (self.low + k as i64) * step;
            if d >= low && !c.is_zero() {
                coeffs[(d - low) as usize] = c;
            }
        }
        Ok(Self::normalized(&self.field, low, coeffs))
    }

    /// Digits from the top down to the precision floor.
    pub fn digits_descending(&self) -> Vec<Fe> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn to_json(&self) -> InfAdicJson {
        InfAdicJson {
            top_degree: self.top(),
            coeffs: self.digits_descending().iter().map(|c| c.code()).collect(),
            prec: self.prec(),
        }
    }

    pub fn from_json(field: &Field, json: &InfAdicJson) -> Result<Self> {
        let low = -json.prec;
        let Some(top) = json.top_degree else {
            return Ok(Self::zero(field, low));
        };
        if top - low + 1 != json.coeffs.len() as i64 {
            return Err(Error::Invalid("coefficient count does not match top_degree and prec".into()));
        }
        let coeffs = json.coeffs.iter().rev().map(|&c| field.from_code(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self::normalized(field, low, coeffs))
    }
}

/// Serialized form: coefficients run from θ^{top_degree} down to θ^{-prec}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfAdicJson {
    pub top_degree: Option<i64>,
    pub coeffs: Vec<u32>,
    pub prec: i64,
}

impl fmt::Display for InfAdic {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let d = self.low + k as i64;
            let cs = self.field.format(c);
            let var = match d {
                0 => String::new(),
                1 => "theta".to_string(),
                _ => format!("theta^{d}"),
            };
            parts.push(match (d, c == Fe::ONE) {
                (0, _) => cs,
                (_, true) => var,
                _ => format!("{cs}*{var}"),
            });
        }
        if self.low > EXACT_LOW {
            parts.push(format!("O(theta^{})", self.low - 1));
        } else if parts.is_empty() {
            parts.push("0".into());
        }
        write!(out, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for InfAdic {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "InfAdic({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u32) -> (Field, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (f, move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    #[test]
    fn rational_embedding_examples() {
        let (f, p) = setup(2);
        let x = InfAdic::from_rational(&p("1"), &p("theta"), 4).unwrap();
        assert_eq!(x.top(), Some(-1));
        assert_eq!(x.digits_descending(), vec![Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO]);
        assert_eq!(x.prec(), 4);
        let y = InfAdic::from_rational(&p("theta"), &p("1"), 4).unwrap();
        assert_eq!(y.top(), Some(1));
        let z = InfAdic::from_rational(&p("1"), &p("theta + 1"), 4).unwrap();
        assert_eq!(z.top(), Some(-1));
        assert_eq!(z.digits_descending(), vec![Fe::ONE; 4]);
        assert_eq!(z.prec(), 4);
        assert_eq!(InfAdic::from_json(&f, &z.to_json()).unwrap(), z);
    }

    #[test]
    fn exact_polynomial_scaling() {
        let (_, p) = setup(3);
        let x = InfAdic::from_rational(&p("theta + 1"), &p("theta^2 + 2"), 15).unwrap();
        let g = p("theta^3 + theta");
        let y = x.mul_poly(&g).unwrap();
        let direct = InfAdic::from_rational(&(&p("theta + 1") * &g), &p("theta^2 + 2"), 12).unwrap();
        assert_eq!(y.low(), -12);
        assert!(y.agrees_to(&direct, 12));
        let back = y.div_poly(&g).unwrap();
        assert_eq!(back.low(), -15);
        assert!(back.agrees_to(&x, 15));
    }

    #[test]
    fn round_trip_product_is_one() {
        let (_, p) = setup(3);
        let a = p("theta^3 + 2*theta + 1");
        let b = p("theta^2 + 2");
        let x = InfAdic::from_rational(&a, &b, 20).unwrap();
        let y = InfAdic::from_rational(&b, &a, 20).unwrap();
        let one = InfAdic::from_poly(&p("1"), 40);
        assert!(x.mul(&y).unwrap().agrees_to(&one, 18));
    }

    #[test]
    fn precision_is_not_overstated() {
        let (f, p) = setup(2);
        let x = InfAdic::from_poly(&p("theta^3 + 1"), 3);
        assert_eq!(x.low(), 1);
        let y = InfAdic::zero(&f, -5);
        let s = x.add(&y);
        assert_eq!(s.low(), 1);
        let prod = x.mul(&x).unwrap();
        assert_eq!(prod.low(), 4);
        assert_eq!(prod.top(), Some(6));
    }

    #[test]
    fn twist_matches_power() {
        let (_, p) = setup(3);
        let x = InfAdic::from_rational(&p("theta + 1"), &p("theta^2 + theta + 2"), 12).unwrap();
        let tw = x.twist(1).unwrap();
        let pw = x.pow(3).unwrap();
        assert_eq!(tw.top(), pw.top());
        let m = -tw.low().max(pw.low());
        assert!(tw.agrees_to(&pw, m));
        assert!(x.twist(-1).is_err());
    }
}
