//! Elements of A[t] stored as polynomials in t with coefficients in A = F_q[θ].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::{TPoly, ThetaPoly, Var, Theta, TVar};
use crate::text::{self, Factor};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BiPoly {
    field: Field,
    /// Coefficient of t^k at index k; no trailing zeros.
    coeffs: Vec<ThetaPoly>,
}

impl BiPoly {
    pub fn new(field: &Field, mut coeffs: Vec<ThetaPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BiPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::from_theta(&ThetaPoly::one(field))
    }

    pub fn from_theta(c: &ThetaPoly) -> Self {
        Self::new(c.field(), vec![c.clone()])
    }

    pub fn from_t(p: &TPoly) -> Self {
        let f = p.field();
        Self::new(f, p.coeffs().iter().map(|&c| ThetaPoly::constant(f, c)).collect())
    }

    pub fn t(field: &Field) -> Self {
        Self::from_t(&TPoly::var(field))
    }

    pub fn theta(field: &Field) -> Self {
        Self::from_theta(&ThetaPoly::var(field))
    }

    /// (t - θ)^n.
    pub fn t_minus_theta_pow(field: &Field, n: u64) -> Self {
        Self::t(field).sub_ref(&Self::theta(field)).pow(n)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn t_coeffs(&self) -> &[ThetaPoly] {
        &self.coeffs
    }

    pub fn t_coeff(&self, k: usize) -> ThetaPoly {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ThetaPoly::zero(&self.field))
    }

    pub fn t_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest θ-degree among the t-coefficients (-1 for zero); |·| = q^{this}.
    pub fn theta_norm_degree(&self) -> i64 {
        self.coeffs.iter().map(|c| c.deg_i64()).max().unwrap_or(-1)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(&self.field, (0..len).map(|k| self.t_coeff(k) + other.t_coeff(k)).collect())
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(&self.field, (0..len).map(|k| self.t_coeff(k) - other.t_coeff(k)).collect())
    }

    pub fn neg_ref(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let mut out = vec![ThetaPoly::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(&self.field, out)
    }

    pub fn scale_theta(&self, c: &ThetaPoly) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|x| x * c).collect())
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

    /// Twist acts on the θ-coefficients only; t is fixed.
    pub fn twist(&self, i: i64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.twist(i)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(&self.field, coeffs))
    }

    /// The ring map t ↦ θ.
    pub fn t_to_theta(&self) -> ThetaPoly {
        let theta = ThetaPoly::var(&self.field);
        self.coeffs
            .iter()
            .rev()
            .fold(ThetaPoly::zero(&self.field), |acc, c| &(&acc * &theta) + c)
    }

    /// The ring map θ ↦ t on a pure θ-polynomial.
    pub fn theta_to_t(c: &ThetaPoly) -> TPoly {
        c.retag::<TVar>()
    }

    /// Value at t = x for x ∈ A.
    pub fn eval_t(&self, x: &ThetaPoly) -> ThetaPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(ThetaPoly::zero(&self.field), |acc, c| &(&acc * x) + c)
    }

    /// Exact division in A[t]; any nonzero remainder is an exactness error.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let dd = divisor.t_degree().ok_or(Error::DivisionByZero)?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return if self.is_zero() {
                Ok(Self::zero(&self.field))
            } else {
                Err(Error::Inexact(format!("{self} is not divisible by {divisor}")))
            };
        }
        let mut quot = vec![ThetaPoly::zero(&self.field); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let factor = rem[k]
                .div_exact(&lead)
                .map_err(|_| Error::Inexact(format!("{self} is not divisible by {divisor}")))?;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] = &rem[k - dd + j] - &(&factor * d);
            }
            quot[k - dd] = factor;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::Inexact(format!("{self} is not divisible by {divisor}")));
        }
        Ok(Self::new(&self.field, quot))
    }

    pub fn parse(field: &Field, src: &str) -> Result<Self> {
        let mut out = Self::zero(field);
        for m in text::monomials(src)? {
            let mut c = Fe::ONE;
            let (mut dt, mut dth) = (0usize, 0usize);
            for fac in &m.factors {
                match fac {
                    Factor::Var { name, exp } if text::canonical_var(name) == Theta::NAME => {
                        dth += *exp as usize
                    }
                    Factor::Var { name, exp } if name == TVar::NAME => dt += *exp as usize,
                    other => c = field.mul(c, field.scalar_factor(other, m.pos)?),
                }
            }
            let c = if m.negative { field.neg(c) } else { c };
            let mut coeffs = vec![ThetaPoly::zero(field); dt + 1];
            coeffs[dt] = ThetaPoly::monomial(field, c, dth);
            out = out.add_ref(&Self::new(field, coeffs));
        }
        Ok(out)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            for (j, &a) in c.coeffs().iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                if !first {
                    write!(out, " + ")?;
                }
                first = false;
                let mut parts = Vec::new();
                if a != Fe::ONE || (j == 0 && k == 0) {
                    parts.push(self.field.format(a));
                }
                match j {
                    0 => {}
                    1 => parts.push("theta".into()),
                    _ => parts.push(format!("theta^{j}")),
                }
                match k {
                    0 => {}
                    1 => parts.push("t".into()),
                    _ => parts.push(format!("t^{k}")),
                }
                write!(out, "{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "BiPoly({self})")
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        self.add_ref(rhs)
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self.sub_ref(rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        self.mul_ref(rhs)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.neg_ref()
    }
}
