//! Exact elements of k = F_q(θ).

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::ThetaPoly;

/// num/den in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat {
    num: ThetaPoly,
    den: ThetaPoly,
}

impl Rat {
    pub fn new(num: ThetaPoly, den: ThetaPoly) -> Result<Rat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_zero() || g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        let lead = den.field().inv(den.leading())?;
        num = num.scale(lead);
        den = den.scale(lead);
        if num.is_zero() {
            den = ThetaPoly::one(num.field());
        }
        Ok(Rat { num, den })
    }

    pub fn from_poly(p: &ThetaPoly) -> Rat {
        Rat { num: p.clone(), den: ThetaPoly::one(p.field()) }
    }

    pub fn zero(field: &Field) -> Rat {
        Rat::from_poly(&ThetaPoly::zero(field))
    }

    pub fn one(field: &Field) -> Rat {
        Rat::from_poly(&ThetaPoly::one(field))
    }

    pub fn num(&self) -> &ThetaPoly {
        &self.num
    }

    pub fn den(&self) -> &ThetaPoly {
        &self.den
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// deg num - deg den, i.e. log_q |x|_∞; None for zero.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.num.deg_i64() - self.den.deg_i64())
    }

    pub fn add(&self, other: &Rat) -> Rat {
        if self.den == other.den {
            return Rat::new(&self.num + &other.num, self.den.clone()).expect("nonzero den");
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Rat::new(num, &self.den * &other.den).expect("nonzero den")
    }

    pub fn neg(&self) -> Rat {
        Rat { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Rat) -> Rat {
        Rat::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero den")
    }

    pub fn inv(&self) -> Result<Rat> {
        Rat::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Rat) -> Result<Rat> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn twist(&self, i: i64) -> Result<Rat> {
        Rat::new(self.num.twist(i)?, self.den.twist(i)?)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_reduces() {
        let f = Field::prime(3).unwrap();
        let p = |s: &str| ThetaPoly::parse(&f, s).unwrap();
        let x = Rat::new(p("theta^2 - 1"), p("theta + 1")).unwrap();
        assert_eq!(x, Rat::from_poly(&p("theta - 1")));
        let y = Rat::new(p("1"), p("theta")).unwrap();
        let z = x.mul(&y).div(&y).unwrap();
        assert_eq!(z, x);
        assert_eq!(y.add(&y.neg()), Rat::zero(&f));
        assert_eq!(y.twist(1).unwrap(), Rat::new(p("1"), p("theta^3")).unwrap());
    }
}
