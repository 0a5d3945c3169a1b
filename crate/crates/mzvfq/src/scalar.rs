//! Scalar contexts: one generic interface over exact k, k_∞, k_v and residue fields of A.
//!
//! Series kernels (log/exp coefficients, Sylvester solves) are written once against
//! [`Scalars`]; the residue-field context turns truncated τ-series identities into
//! exact checks in a finite image of A.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::inf::InfAdic;
use crate::poly::ThetaPoly;
use crate::rational::Rat;
use crate::vadic::{Place, VAdic};

pub trait Scalars: Send + Sync {
    type Elem: Clone + Send + Sync + fmt::Debug;

    fn field(&self) -> &Field;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem {
        self.embed(&ThetaPoly::one(self.field()))
    }
    fn embed(&self, p: &ThetaPoly) -> Self::Elem;
    /// Σ c·θ^e with possibly huge exponents.
    fn embed_sparse(&self, terms: &[(Fe, u128)]) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, a: &Self::Elem, c: Fe) -> Self::Elem;
    /// θ ↦ θ^{q^i}, i >= 0.
    fn twist(&self, a: &Self::Elem, i: u32) -> Result<Self::Elem>;
    /// Known to vanish (exactly, or to the working precision).
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Exactly zero, carrying no precision floor.
    fn is_exact_zero(&self, a: &Self::Elem) -> bool {
        self.is_zero(a)
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.mul(a, &self.inv(b)?)
    }

    /// A twisted polynomial p^{(i)} embedded without expanding it densely.
    fn embed_twisted(&self, p: &ThetaPoly, i: u32) -> Result<Self::Elem> {
        let step = (self.field().q() as u128).checked_pow(i).ok_or(Error::Overflow)?;
        let terms: Vec<(Fe, u128)> = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| (c, k as u128 * step))
            .collect();
        self.embed_sparse(&terms)
    }
}

/// Exact arithmetic in k = F_q(θ).
#[derive(Clone, Debug)]
pub struct ExactK {
    field: Field,
}

impl ExactK {
    pub fn new(field: &Field) -> Self {
        ExactK { field: field.clone() }
    }
}

fn dense_from_sparse(field: &Field, terms: &[(Fe, u128)]) -> Result<ThetaPoly> {
    let top = terms.iter().map(|t| t.1).max().unwrap_or(0);
    if top > crate::poly::MAX_DENSE_DEGREE as u128 {
        return Err(Error::Overflow);
    }
    let mut coeffs = vec![Fe::ZERO; top as usize + 1];
    for &(c, e) in terms {
        coeffs[e as usize] = field.add(coeffs[e as usize], c);
    }
    Ok(ThetaPoly::new(field, coeffs))
}

impl Scalars for ExactK {
    type Elem = Rat;

    fn field(&self) -> &Field {
        &self.field
    }
    fn zero(&self) -> Rat {
        Rat::zero(&self.field)
    }
    fn embed(&self, p: &ThetaPoly) -> Rat {
        Rat::from_poly(p)
    }
    fn embed_sparse(&self, terms: &[(Fe, u128)]) -> Result<Rat> {
        Ok(Rat::from_poly(&dense_from_sparse(&self.field, terms)?))
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a.add(b)
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a.sub(b)
    }
    fn neg(&self, a: &Rat) -> Rat {
        a.neg()
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Result<Rat> {
        Ok(a.mul(b))
    }
    fn inv(&self, a: &Rat) -> Result<Rat> {
        a.inv()
    }
    fn scale(&self, a: &Rat, c: Fe) -> Rat {
        a.mul(&Rat::from_poly(&ThetaPoly::constant(&self.field, c)))
    }
    fn twist(&self, a: &Rat, i: u32) -> Result<Rat> {
        a.twist(i as i64)
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
}

/// k_∞ with a working relative precision of `rel` digits for embedded constants.
#[derive(Clone, Debug)]
pub struct InfCtx {
    field: Field,
    rel: usize,
}

impl InfCtx {
    pub fn new(field: &Field, rel: usize) -> Self {
        InfCtx { field: field.clone(), rel }
    }

    pub fn rel(&self) -> usize {
        self.rel
    }
}

impl Scalars for InfCtx {
    type Elem = InfAdic;

    fn field(&self) -> &Field {
        &self.field
    }
    fn zero(&self) -> InfAdic {
        InfAdic::exact_zero(&self.field)
    }
    fn embed(&self, p: &ThetaPoly) -> InfAdic {
        InfAdic::from_poly(p, self.rel)
    }
    fn embed_sparse(&self, terms: &[(Fe, u128)]) -> Result<InfAdic> {
        let terms = terms
            .iter()
            .map(|&(c, e)| i64::try_from(e).map(|e| (c, e)).map_err(|_| Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(InfAdic::from_sparse(&self.field, &terms, self.rel))
    }
    fn add(&self, a: &InfAdic, b: &InfAdic) -> InfAdic {
        a.add(b)
    }
    fn sub(&self, a: &InfAdic, b: &InfAdic) -> InfAdic {
        a.sub(b)
    }
    fn neg(&self, a: &InfAdic) -> InfAdic {
        a.neg()
    }
    fn mul(&self, a: &InfAdic, b: &InfAdic) -> Result<InfAdic> {
        a.mul(b)
    }
    fn inv(&self, a: &InfAdic) -> Result<InfAdic> {
        a.inv()
    }
    fn scale(&self, a: &InfAdic, c: Fe) -> InfAdic {
        a.scale(c)
    }
    fn twist(&self, a: &InfAdic, i: u32) -> Result<InfAdic> {
        a.twist_capped(i as i64, self.rel)
    }
    fn is_zero(&self, a: &InfAdic) -> bool {
        a.is_zero_to_precision()
    }
    fn is_exact_zero(&self, a: &InfAdic) -> bool {
        a.is_exact_zero()
    }
}

/// k_v with a working unit precision of `rel` for embedded constants.
#[derive(Clone, Debug)]
pub struct VCtx {
    place: Place,
    rel: usize,
}

impl VCtx {
    pub fn new(place: &Place, rel: usize) -> Self {
        VCtx { place: place.clone(), rel }
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn rel(&self) -> usize {
        self.rel
    }
}

impl Scalars for VCtx {
    type Elem = VAdic;

    fn field(&self) -> &Field {
        self.place.field()
    }
    fn zero(&self) -> VAdic {
        VAdic::exact_zero(&self.place)
    }
    fn embed(&self, p: &ThetaPoly) -> VAdic {
        match self.place.valuation(p) {
            None => self.zero(),
            Some(e) => VAdic::from_poly(&self.place, p, (e + self.rel) as i64),
        }
    }
    fn embed_sparse(&self, terms: &[(Fe, u128)]) -> Result<VAdic> {
        // Reduce with room for a valuation up to `rel`; larger ones read as zero to 2·rel.
        let n = 2 * self.rel;
        let rep = self.place.reduce_sparse(terms, n);
        if rep.is_zero() {
            return Ok(VAdic::zero(&self.place, n as i64));
        }
        let e = self.place.valuation(&rep).expect("nonzero");
        Ok(VAdic::from_poly(&self.place, &rep, n as i64).truncate_abs((e + self.rel) as i64))
    }
    fn add(&self, a: &VAdic, b: &VAdic) -> VAdic {
        a.add(b)
    }
    fn sub(&self, a: &VAdic, b: &VAdic) -> VAdic {
        a.sub(b)
    }
    fn neg(&self, a: &VAdic) -> VAdic {
        a.neg()
    }
    fn mul(&self, a: &VAdic, b: &VAdic) -> Result<VAdic> {
        Ok(a.mul(b))
    }
    fn inv(&self, a: &VAdic) -> Result<VAdic> {
        a.inv()
    }
    fn scale(&self, a: &VAdic, c: Fe) -> VAdic {
        if c.is_zero() {
            return self.zero();
        }
        a.mul(&VAdic::from_poly(&self.place, &ThetaPoly::constant(self.field(), c), self.rel as i64))
    }
    fn twist(&self, a: &VAdic, i: u32) -> Result<VAdic> {
        a.twist_capped(i as i64, self.rel)
    }
    fn is_zero(&self, a: &VAdic) -> bool {
        a.is_zero_to_precision()
    }
    fn is_exact_zero(&self, a: &VAdic) -> bool {
        a.is_exact_zero()
    }
}

/// The finite field A/(f) for an irreducible f; exact and cheap.
#[derive(Clone, Debug)]
pub struct ResidueField {
    modulus: ThetaPoly,
}

impl ResidueField {
    pub fn new(modulus: &ThetaPoly) -> Result<Self> {
        if !modulus.is_irreducible() {
            return Err(Error::Invalid(format!("{modulus} is not irreducible")));
        }
        Ok(ResidueField { modulus: modulus.monic()? })
    }

    pub fn modulus(&self) -> &ThetaPoly {
        &self.modulus
    }

    /// First irreducible polynomial of the given degree in code order.
    pub fn of_degree(field: &Field, degree: usize) -> Result<Self> {
        let q = field.q() as u64;
        let count = q.checked_pow(degree as u32).ok_or(Error::Overflow)?;
        for code in 0..count {
            let mut coeffs = Vec::with_capacity(degree + 1);
            let mut rest = code;
            for _ in 0..degree {
                coeffs.push(field.from_code((rest % q) as u32)?);
                rest /= q;
            }
            coeffs.push(Fe::ONE);
            let f = ThetaPoly::new(field, coeffs);
            if f.is_irreducible() {
                return ResidueField::new(&f);
            }
        }
        Err(Error::Invalid(format!("no irreducible polynomial of degree {degree}")))
    }
}

impl Scalars for ResidueField {
    type Elem = ThetaPoly;

    fn field(&self) -> &Field {
        self.modulus.field()
    }
    fn zero(&self) -> ThetaPoly {
        ThetaPoly::zero(self.field())
    }
    fn embed(&self, p: &ThetaPoly) -> ThetaPoly {
        p.rem(&self.modulus).expect("nonzero modulus")
    }
    fn embed_sparse(&self, terms: &[(Fe, u128)]) -> Result<ThetaPoly> {
        let theta = ThetaPoly::var(self.field());
        terms.iter().try_fold(self.zero(), |acc, &(c, e)| {
            Ok(&acc + &theta.pow_mod(e, &self.modulus)?.scale(c))
        })
    }
    fn add(&self, a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
        a + b
    }
    fn sub(&self, a: &ThetaPoly, b: &ThetaPoly) -> ThetaPoly {
        a - b
    }
    fn neg(&self, a: &ThetaPoly) -> ThetaPoly {
        -a
    }
    fn mul(&self, a: &ThetaPoly, b: &ThetaPoly) -> Result<ThetaPoly> {
        a.mul_mod(b, &self.modulus)
    }
    fn inv(&self, a: &ThetaPoly) -> Result<ThetaPoly> {
        a.inv_mod(&self.modulus)
    }
    fn scale(&self, a: &ThetaPoly, c: Fe) -> ThetaPoly {
        a.scale(c)
    }
    fn twist(&self, a: &ThetaPoly, i: u32) -> Result<ThetaPoly> {
        let step = (self.field().q() as u128).checked_pow(i).ok_or(Error::Overflow)?;
        a.pow_mod(step, &self.modulus)
    }
    fn is_zero(&self, a: &ThetaPoly) -> bool {
        a.is_zero()
    }
}
