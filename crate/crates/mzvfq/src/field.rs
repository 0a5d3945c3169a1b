//! Finite fields F_q with q = p^e.
//!
//! Prime fields use residues mod p. Extension fields are built from an explicit
//! primitive modulus over F_p; an element is encoded as the base-p integer of its
//! coefficient vector in powers of the generator class `g`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::text::{self, Factor};

/// Encoded field element; only meaningful together with its [`Field`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const MAX_EXTENSION_ORDER: u32 = 1 << 16;

#[derive(Debug)]
struct FieldData {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus over F_p, little-endian, length e+1; empty for prime fields.
    modulus: Vec<u32>,
    /// exp_table[k] = g^k for 0 <= k < q-1 (extension fields only).
    exp_table: Vec<u32>,
    /// log_table[code] = k with g^k = code; entry 0 unused.
    log_table: Vec<u32>,
}

/// Shared handle to a finite field; cheap to clone, compared by parameters.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.q == other.0.q && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.q.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.q)
        } else {
            write!(f, "F_{}[g]/({:?})", self.0.p, self.0.modulus)
        }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns (p, e) with q = p^e, or None when q is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Field> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(Field(Arc::new(FieldData {
            p,
            e: 1,
            q: p,
            modulus: Vec::new(),
            exp_table: Vec::new(),
            log_table: Vec::new(),
        })))
    }

    /// F_{p^e} as F_p[g]/(modulus); the modulus must be monic and primitive.
    pub fn extension(p: u32, modulus: &[u32]) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let e = modulus.len().saturating_sub(1) as u32;
        if e < 2 || modulus[e as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(
                "modulus must be monic of degree >= 2 with coefficients in 0..p".into(),
            ));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_EXTENSION_ORDER as u64)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{e} exceeds {MAX_EXTENSION_ORDER}")))?
            as u32;
        let e_us = e as usize;
        // Multiply by g modulo the modulus, on digit vectors.
        let times_g = |digits: &[u32]| -> Vec<u32> {
            let top = digits[e_us - 1];
            let mut out = vec![0u32; e_us];
            for k in (1..e_us).rev() {
                out[k] = digits[k - 1];
            }
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = (*slot + (p - modulus[k]) * top % p) % p;
            }
            out
        };
        let encode = |digits: &[u32]| digits.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        let mut exp_table = Vec::with_capacity((q - 1) as usize);
        let mut log_table = vec![u32::MAX; q as usize];
        let mut cur = vec![0u32; e_us];
        cur[0] = 1;
        for k in 0..(q - 1) {
            let code = encode(&cur);
            if log_table[code as usize] != u32::MAX || code == 0 {
                return Err(Error::InvalidField(
                    "modulus is not primitive over F_p (g does not generate the unit group)".into(),
                ));
            }
            log_table[code as usize] = k;
            exp_table.push(code);
            cur = times_g(&cur);
        }
        if encode(&cur) != 1 {
            return Err(Error::InvalidField("modulus is not primitive over F_p".into()));
        }
        log_table[0] = 0;
        Ok(Field(Arc::new(FieldData {
            p,
            e,
            q,
            modulus: modulus.to_vec(),
            exp_table,
            log_table,
        })))
    }

    /// Builds F_q; a modulus in the variable `g` is required exactly when q is not prime.
    pub fn new(q: u32, modulus: Option<&str>) -> Result<Field> {
        let (p, e) = prime_power(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        match (e, modulus) {
            (1, None) => Field::prime(p),
            (1, Some(_)) => Err(Error::InvalidField("prime q takes no modulus".into())),
            (_, None) => Err(Error::InvalidField(format!(
                "q = {q} = {p}^{e} needs an explicit primitive modulus in g"
            ))),
            (_, Some(text)) => {
                let coeffs = parse_prime_poly(text, p, "g")?;
                if coeffs.len() != e as usize + 1 {
                    return Err(Error::InvalidField(format!("modulus must have degree {e}")));
                }
                Field::extension(p, &coeffs)
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.e == 1
    }

    /// Modulus coefficients (little-endian) for extension fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// Element from its code; codes must lie in 0..q.
    pub fn from_code(&self, code: u32) -> Result<Fe> {
        if code < self.0.q {
            Ok(Fe(code))
        } else {
            Err(Error::Invalid(format!("element code {code} outside F_{}", self.0.q)))
        }
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// All q elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q).map(Fe)
    }

    /// Generator g of the unit group for extension fields.
    pub fn generator(&self) -> Fe {
        if self.0.e == 1 {
            let p = self.0.p;
            let phi = p - 1;
            let factors: Vec<u32> = (2..=phi).filter(|d| phi % d == 0 && is_prime(*d)).collect();
            let g = (1..p)
                .find(|&g| factors.iter().all(|&r| self.pow(Fe(g), (phi / r) as u64) != Fe::ONE))
                .unwrap_or(1);
            Fe(g)
        } else {
            Fe(self.0.exp_table[1])
        }
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let d = &*self.0;
        if d.e == 1 {
            let s = a.0 + b.0;
            Fe(if s >= d.p { s - d.p } else { s })
        } else if d.p == 2 {
            Fe(a.0 ^ b.0)
        } else {
            self.digitwise(a, b, |x, y| (x + y) % d.p)
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let d = &*self.0;
        if a.0 == 0 || d.p == 2 {
            a
        } else if d.e == 1 {
            Fe(d.p - a.0)
        } else {
            self.digitwise(Fe::ZERO, a, |x, y| (x + d.p - y) % d.p)
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let d = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        if d.e == 1 {
            Fe(((a.0 as u64 * b.0 as u64) % d.p as u64) as u32)
        } else {
            let k = (d.log_table[a.0 as usize] + d.log_table[b.0 as usize]) % (d.q - 1);
            Fe(d.exp_table[k as usize])
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let d = &*self.0;
        if d.e == 1 {
            Ok(self.pow(a, (d.p - 2) as u64))
        } else {
            let k = (d.q - 1 - d.log_table[a.0 as usize]) % (d.q - 1);
            Ok(Fe(d.exp_table[k as usize]))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    fn digitwise(&self, a: Fe, b: Fe, op: impl Fn(u32, u32) -> u32) -> Fe {
        let p = self.0.p;
        let (mut x, mut y, mut out, mut scale) = (a.0, b.0, 0u32, 1u32);
        for _ in 0..self.0.e {
            out += op(x % p, y % p) * scale;
            x /= p;
            y /= p;
            scale *= p;
        }
        Fe(out)
    }

    /// Text form: residues for prime fields, `g^k` powers for extensions.
    pub fn format(&self, a: Fe) -> String {
        if self.0.e == 1 || a.0 <= 1 {
            return a.0.to_string();
        }
        match self.0.log_table[a.0 as usize] {
            1 => "g".to_string(),
            k => format!("g^{k}"),
        }
    }

    /// Parses an element: an integer, `g`, or `g^k`, optionally negated.
    pub fn parse(&self, src: &str) -> Result<Fe> {
        let terms = text::monomials(src)?;
        let mut acc = Fe::ZERO;
        for m in terms {
            let mut term = Fe::ONE;
            for f in &m.factors {
                term = self.mul(term, self.scalar_factor(f, m.pos)?);
            }
            acc = if m.negative { self.sub(acc, term) } else { self.add(acc, term) };
        }
        Ok(acc)
    }

    pub(crate) fn scalar_factor(&self, f: &Factor, pos: usize) -> Result<Fe> {
        match f {
            Factor::Int(n) => Ok(self.from_int((*n % self.0.p as u64) as i64)),
            Factor::Var { name, exp } if name == "g" => {
                if self.0.e == 1 {
                    Err(Error::parse(pos, "generator powers need an extension field"))
                } else {
                    Ok(self.pow(self.generator(), *exp))
                }
            }
            Factor::Var { name, .. } => Err(Error::parse(pos, format!("unexpected variable {name}"))),
        }
    }
}

/// Parses a polynomial with integer coefficients over F_p in the single variable `var`.
fn parse_prime_poly(src: &str, p: u32, var: &str) -> Result<Vec<u32>> {
    let mut coeffs: Vec<u32> = Vec::new();
    for m in text::monomials(src)? {
        let mut c: u64 = 1;
        let mut deg = 0usize;
        for f in &m.factors {
            match f {
                Factor::Int(n) => c = c * (n % p as u64) % p as u64,
                Factor::Var { name, exp } if name == var => deg += *exp as usize,
                Factor::Var { name, .. } => {
                    return Err(Error::parse(m.pos, format!("unexpected variable {name}")))
                }
            }
        }
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        let c = if m.negative { (p as u64 - c) % p as u64 } else { c };
        coeffs[deg] = ((coeffs[deg] as u64 + c) % p as u64) as u32;
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(coeffs)
}
