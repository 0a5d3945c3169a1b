//! Dense univariate polynomials over F_q in θ (the ring A) or in t (the operator ring).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::text::{self, Factor};

/// Largest dense degree a twist may produce.
pub const MAX_DENSE_DEGREE: u64 = 1 << 26;

pub trait Var: Copy + Clone + Default + fmt::Debug + Send + Sync + 'static {
    const NAME: &'static str;
    /// Whether Frobenius twisting moves this variable (θ ↦ θ^q) or fixes it (t).
    const TWISTED: bool;
}

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq, Hash)]
pub struct Theta;

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq, Hash)]
pub struct TVar;

impl Var for Theta {
    const NAME: &'static str = "theta";
    const TWISTED: bool = true;
}

impl Var for TVar {
    const NAME: &'static str = "t";
    const TWISTED: bool = false;
}

/// Coefficients are little-endian with no trailing zeros.
#[derive(Clone)]
pub struct Poly<V: Var> {
    field: Field,
    coeffs: Vec<Fe>,
    _var: PhantomData<V>,
}

pub type ThetaPoly = Poly<Theta>;
pub type TPoly = Poly<TVar>;

/// Product coefficients c_k = Σ a_i b_{k-i} for k >= skip.
pub(crate) fn convolve(field: &Field, a: &[Fe], b: &[Fe], skip: usize) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() || a.len() + b.len() - 1 <= skip {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let p = field.p() as u64;
    let shorter = a.len().min(b.len()) as u64;
    if field.is_prime_field() && (p - 1) * (p - 1) <= u64::MAX / shorter.max(1) {
        let mut acc = vec![0u64; len - skip];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let xv = x.code() as u64;
            let j0 = skip.saturating_sub(i);
            for (j, &y) in b.iter().enumerate().skip(j0) {
                acc[i + j - skip] += xv * y.code() as u64;
            }
        }
        acc.into_iter().map(|v| field.from_int((v % p) as i64)).collect()
    } else {
        let mut out = vec![Fe::ZERO; len - skip];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let j0 = skip.saturating_sub(i);
            for (j, &y) in b.iter().enumerate().skip(j0) {
                let slot = &mut out[i + j - skip];
                *slot = field.add(*slot, field.mul(x, y));
            }
        }
        out
    }
}

impl<V: Var> Poly<V> {
    pub fn new(field: &Field, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs, _var: PhantomData }
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(field, Fe::ONE)
    }

    pub fn constant(field: &Field, c: Fe) -> Self {
        Self::new(field, vec![c])
    }

    /// The variable itself (θ or t).
    pub fn var(field: &Field) -> Self {
        Self::monomial(field, Fe::ONE, 1)
    }

    pub fn monomial(field: &Field, c: Fe, deg: usize) -> Self {
        let mut coeffs = vec![Fe::ZERO; deg + 1];
        coeffs[deg] = c;
        Self::new(field, coeffs)
    }

    /// Coefficients given as integers, reduced into the prime subfield.
    pub fn from_ints(field: &Field, ints: &[i64]) -> Self {
        Self::new(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn from_codes(field: &Field, codes: &[u32]) -> Result<Self> {
        let coeffs = codes.iter().map(|&c| field.from_code(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(field, coeffs))
    }

    pub fn codes(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.code()).collect()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Fe {
        self.coeffs.get(k).copied().unwrap_or(Fe::ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fe::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    /// Same coefficients in another variable.
    pub fn retag<W: Var>(&self) -> Poly<W> {
        Poly { field: self.field.clone(), coeffs: self.coeffs.clone(), _var: PhantomData }
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "polynomials over different fields");
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| f.add(self.coeff(k), other.coeff(k))).collect();
        Self::new(f, coeffs)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| f.sub(self.coeff(k), other.coeff(k))).collect();
        Self::new(f, coeffs)
    }

    pub fn neg_ref(&self) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        Self::new(&self.field, convolve(&self.field, &self.coeffs, &other.coeffs, 0))
    }

    pub fn scale(&self, c: Fe) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Fe::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(&self.field, coeffs)
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check_field(divisor);
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[k - dd] = factor;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let slot = &mut rem[k - dd + j];
                *slot = f.sub(*slot, f.mul(factor, d));
            }
        }
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Quotient when the division is exact; otherwise an exactness error.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Inexact(format!("{self} is not divisible by {divisor}")))
        }
    }

    pub fn monic(&self) -> Result<Self> {
        let inv = self.field.inv(self.leading())?;
        Ok(self.scale(inv))
    }

    /// Monic gcd (zero when both inputs vanish).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic().expect("nonzero")
        }
    }

    /// Returns (g, s, t) with s·self + t·other = g, g monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(f), Self::zero(f));
        let (mut t0, mut t1) = (Self::zero(f), Self::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s2 = s0.sub_ref(&q.mul_ref(&s1));
            let t2 = t0.sub_ref(&q.mul_ref(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.leading()).expect("nonzero");
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    /// Inverse modulo `m`, which must be coprime to self.
    pub fn inv_mod(&self, m: &Self) -> Result<Self> {
        let (g, s, _) = self.rem(m)?.ext_gcd(m);
        if !g.is_one() {
            return Err(Error::DivisionByZero);
        }
        s.rem(m)
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Result<Self> {
        self.mul_ref(other).rem(m)
    }

    pub fn pow_mod(&self, mut n: u128, m: &Self) -> Result<Self> {
        let mut base = self.rem(m)?;
        let mut acc = Self::one(&self.field).rem(m)?;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_mod(&base, m)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_mod(&base, m)?;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Substitutes a polynomial (in any variable) for the variable.
    pub fn compose<W: Var>(&self, inner: &Poly<W>) -> Poly<W> {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Poly::<W>::zero(f), |acc, &c| {
            acc.mul_ref(inner).add_ref(&Poly::constant(f, c))
        })
    }

    /// Frobenius twist: θ ↦ θ^{q^i} for θ-polynomials, identity in t; scalars are fixed.
    /// Negative i requires every exponent to be divisible by q^{|i|}.
    pub fn twist(&self, i: i64) -> Result<Self> {
        if !V::TWISTED || i == 0 || self.is_constant() {
            return Ok(self.clone());
        }
        let q = self.field.q() as u64;
        let step = q.checked_pow(i.unsigned_abs() as u32).ok_or(Error::Overflow)?;
        let deg = self.degree().unwrap_or(0) as u64;
        if i > 0 {
            let new_deg = deg.checked_mul(step).ok_or(Error::Overflow)?;
            if new_deg > MAX_DENSE_DEGREE {
                return Err(Error::Overflow);
            }
            let mut coeffs = vec![Fe::ZERO; new_deg as usize + 1];
            for (k, &c) in self.coeffs.iter().enumerate() {
                coeffs[k * step as usize] = c;
            }
            Ok(Self::new(&self.field, coeffs))
        } else {
            let mut coeffs = vec![Fe::ZERO; (deg / step) as usize + 1];
            for (k, &c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if k as u64 % step != 0 {
                    return Err(Error::Unsupported(format!(
                        "{self} has no polynomial {}-fold inverse twist",
                        i.unsigned_abs()
                    )));
                }
                coeffs[k / step as usize] = c;
            }
            Ok(Self::new(&self.field, coeffs))
        }
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        let f = self.monic().expect("nonzero");
        let q = self.field.q() as u128;
        let x = Self::var(&self.field);
        // x^{q^k} mod f for k = 0..=n
        let mut powers = vec![x.rem(&f).expect("nonzero")];
        for _ in 0..n {
            let next = powers.last().unwrap().pow_mod(q, &f).expect("nonzero");
            powers.push(next);
        }
        if powers[n] != powers[0] {
            return false;
        }
        let prime_divisors = (2..=n).filter(|r| n % r == 0 && (2..*r).all(|d| r % d != 0));
        for r in prime_divisors {
            let h = powers[n / r].sub_ref(&x);
            if !h.gcd(&f).is_one() {
                return false;
            }
        }
        true
    }

    /// Parses `c0 + c1*x + c2*x^2` style text in this variable.
    pub fn parse(field: &Field, src: &str) -> Result<Self> {
        let mut coeffs: Vec<Fe> = Vec::new();
        for m in text::monomials(src)? {
            let mut c = Fe::ONE;
            let mut deg = 0u64;
            for fac in &m.factors {
                match fac {
                    Factor::Var { name, exp } if text::canonical_var(name) == V::NAME => {
                        deg = deg.checked_add(*exp).ok_or(Error::Overflow)?
                    }
                    other => c = field.mul(c, field.scalar_factor(other, m.pos)?),
                }
            }
            if deg > MAX_DENSE_DEGREE {
                return Err(Error::parse(m.pos, "degree too large"));
            }
            let deg = deg as usize;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, Fe::ZERO);
            }
            let c = if m.negative { field.neg(c) } else { c };
            coeffs[deg] = field.add(coeffs[deg], c);
        }
        Ok(Self::new(field, coeffs))
    }
}

impl<V: Var> fmt::Display for Poly<V> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let cs = self.field.format(c);
            let var = match k {
                0 => String::new(),
                1 => V::NAME.to_string(),
                _ => format!("{}^{k}", V::NAME),
            };
            match (k, c == Fe::ONE) {
                (0, _) => write!(out, "{cs}")?,
                (_, true) => write!(out, "{var}")?,
                _ => write!(out, "{cs}*{var}")?,
            }
        }
        Ok(())
    }
}

impl<V: Var> fmt::Debug for Poly<V> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Poly({self})")
    }
}

impl<V: Var> PartialEq for Poly<V> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl<V: Var> Eq for Poly<V> {}

impl<V: Var> Hash for Poly<V> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.q().hash(state);
        self.coeffs.hash(state);
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<V: Var> $tr<&Poly<V>> for &Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: &Poly<V>) -> Poly<V> {
                self.$imp(rhs)
            }
        }
        impl<V: Var> $tr<Poly<V>> for Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: Poly<V>) -> Poly<V> {
                self.$imp(&rhs)
            }
        }
        impl<V: Var> $tr<&Poly<V>> for Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: &Poly<V>) -> Poly<V> {
                self.$imp(rhs)
            }
        }
        impl<V: Var> $tr<Poly<V>> for &Poly<V> {
            type Output = Poly<V>;
            fn $method(self, rhs: Poly<V>) -> Poly<V> {
                self.$imp(&rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl<V: Var> Neg for &Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        self.neg_ref()
    }
}

impl<V: Var> Neg for Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Field {
        Field::prime(q).unwrap()
    }

    fn th(field: &Field, s: &str) -> ThetaPoly {
        ThetaPoly::parse(field, s).unwrap()
    }

    #[test]
    fn twist_examples() {
        let f3 = f(3);
        assert_eq!(th(&f3, "theta^2 + theta").twist(1).unwrap(), th(&f3, "theta^6 + theta^3"));
        let x = th(&f3, "theta^2 + 2");
        assert_eq!(x.twist(0).unwrap(), x);
        assert_eq!(x.twist(2).unwrap().twist(-2).unwrap(), x);
        assert!(th(&f3, "theta").twist(-1).is_err());
        let tp = TPoly::parse(&f3, "t^2 + 1").unwrap();
        assert_eq!(tp.twist(3).unwrap(), tp);
    }

    #[test]
    fn long_division_example() {
        let f2 = f(2);
        let r = th(&f2, "theta^2 + theta").div_exact(&th(&f2, "theta")).unwrap();
        assert_eq!(r, th(&f2, "theta + 1"));
        assert!(th(&f2, "theta^2 + 1").div_exact(&th(&f2, "theta")).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f4 = Field::new(4, Some("g^2+g+1")).unwrap();
        let p = th(&f4, "g^2*theta^3 + g + theta");
        assert_eq!(p.to_string(), "g + theta + g^2*theta^3");
        assert_eq!(th(&f4, &p.to_string()), p);
        let f3 = f(3);
        assert_eq!(th(&f3, "-theta").to_string(), "2*theta");
        assert_eq!(th(&f3, "θ^2+θ+1"), th(&f3, "1 + theta + theta^2"));
    }

    #[test]
    fn irreducibility() {
        let f2 = f(2);
        assert!(th(&f2, "theta").is_irreducible());
        assert!(th(&f2, "theta^2+theta+1").is_irreducible());
        assert!(!th(&f2, "theta^2+1").is_irreducible());
        assert!(th(&f2, "theta^4+theta+1").is_irreducible());
        assert!(!th(&f2, "theta^4+theta^2+1").is_irreducible());
        let f3 = f(3);
        assert!(th(&f3, "theta^2+1").is_irreducible());
        assert!(!th(&f3, "theta^2+2").is_irreducible());
    }

    #[test]
    fn ext_gcd_identity() {
        let f2 = f(2);
        let a = th(&f2, "theta + 1");
        let m = th(&f2, "theta^3");
        assert_eq!(a.inv_mod(&m).unwrap(), th(&f2, "theta^2 + theta + 1"));
    }
}
