//! Carlitz constants D_i and L_i, factorials Γ_n, Anderson–Thakur polynomials H_n,
//! and ζ_A(s) summed from per-degree power sums.

use std::sync::RwLock;

use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::index::Index;
use crate::inf::InfAdic;
use crate::poly::{TPoly, ThetaPoly, MAX_DENSE_DEGREE};
use crate::scalar::{InfCtx, Scalars};

/// g_n = numerator / denominator with the denominator in F_q[t].
#[derive(Clone)]
struct GenCoeff {
    num: BiPoly,
    den: TPoly,
}

/// Append-only caches of the Carlitz constants over one field.
///
/// Readers share the caches; a writer only ever extends them.
pub struct CarlitzTable {
    field: Field,
    d: RwLock<Vec<ThetaPoly>>,
    l: RwLock<Vec<ThetaPoly>>,
    g: RwLock<Vec<GenCoeff>>,
    h: RwLock<Vec<BiPoly>>,
}

fn cached<T: Clone>(lock: &RwLock<Vec<T>>, n: usize, mut next: impl FnMut(&[T]) -> Result<T>) -> Result<T> {
    if let Some(v) = lock.read().expect("cache lock").get(n) {
        return Ok(v.clone());
    }
    let mut cache = lock.write().expect("cache lock");
    while cache.len() <= n {
        let v = next(&cache)?;
        cache.push(v);
    }
    Ok(cache[n].clone())
}

fn q_pow(q: u32, i: u32) -> Result<u64> {
    (q as u64).checked_pow(i).ok_or(Error::Overflow)
}

/// θ^{q^i} as a dense polynomial.
fn theta_q_pow(field: &Field, i: u32) -> Result<ThetaPoly> {
    let e = q_pow(field.q(), i)?;
    if e > MAX_DENSE_DEGREE {
        return Err(Error::Overflow);
    }
    Ok(ThetaPoly::monomial(field, Fe::ONE, e as usize))
}

fn lcm(a: &TPoly, b: &TPoly) -> Result<TPoly> {
    let g = a.gcd(b);
    Ok(&a.div_exact(&g)? * b)
}

impl CarlitzTable {
    pub fn new(field: &Field) -> CarlitzTable {
        let one = ThetaPoly::one(field);
        CarlitzTable {
            field: field.clone(),
            d: RwLock::new(vec![one.clone()]),
            l: RwLock::new(vec![one]),
            g: RwLock::new(vec![GenCoeff { num: BiPoly::one(field), den: TPoly::one(field) }]),
            h: RwLock::new(Vec::new()),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// D_i = (θ^{q^i} - θ)·D_{i-1}^q.
    pub fn d(&self, i: u32) -> Result<ThetaPoly> {
        let f = &self.field;
        cached(&self.d, i as usize, |prev| {
            let k = prev.len() as u32;
            let factor = &theta_q_pow(f, k)? - &ThetaPoly::var(f);
            Ok(&factor * &prev[k as usize - 1].pow(f.q() as u64))
        })
    }

    /// L_i = (θ - θ^{q^i})·L_{i-1}.
    pub fn l(&self, i: u32) -> Result<ThetaPoly> {
        let f = &self.field;
        cached(&self.l, i as usize, |prev| {
            let k = prev.len() as u32;
            let factor = &ThetaPoly::var(f) - &theta_q_pow(f, k)?;
            Ok(&factor * &prev[k as usize - 1])
        })
    }

    /// Γ_n = Π D_i^{n_i} where n - 1 = Σ n_i q^i.
    pub fn gamma(&self, n: u32) -> Result<ThetaPoly> {
        if n == 0 {
            return Err(Error::Invalid("the Carlitz factorial needs n >= 1".into()));
        }
        let q = self.field.q();
        let mut rest = n - 1;
        let mut i = 0;
        let mut acc = ThetaPoly::one(&self.field);
        while rest > 0 {
            let digit = rest % q;
            if digit > 0 {
                acc = &acc * &self.d(i)?.pow(digit as u64);
            }
            rest /= q;
            i += 1;
        }
        Ok(acc)
    }

    /// Γ_s = Γ_{s_1}···Γ_{s_r}.
    pub fn gamma_index(&self, s: &Index) -> Result<ThetaPoly> {
        s.entries().iter().try_fold(ThetaPoly::one(&self.field), |acc, &k| Ok(&acc * &self.gamma(k)?))
    }

    /// F_i = Π_{j=1}^{i} (t^{q^i} - θ^{q^j}).
    fn f_poly(&self, i: u32) -> Result<BiPoly> {
        let f = &self.field;
        let t_part = BiPoly::from_t(&theta_q_pow(f, i)?.retag());
        (1..=i).try_fold(BiPoly::one(f), |acc, j| {
            Ok(acc.mul_ref(&t_part.sub_ref(&BiPoly::from_theta(&theta_q_pow(f, j)?))))
        })
    }

    /// Coefficient g_n of x^n in (1 - Σ_i F_i/D_i(t) x^{q^i})^{-1}.
    fn gen_coeff(&self, n: u32) -> Result<GenCoeff> {
        let q = self.field.q() as u64;
        cached(&self.g, n as usize, |prev| {
            let k = prev.len() as u64;
            let mut parts = Vec::new();
            let mut i = 0u32;
            while q_pow(self.field.q(), i)? <= k {
                let back = &prev[(k - q.pow(i)) as usize];
                let d_t: TPoly = self.d(i)?.retag();
                parts.push((self.f_poly(i)?.mul_ref(&back.num), &d_t * &back.den));
                i += 1;
            }
            let den = parts.iter().try_fold(TPoly::one(&self.field), |acc, (_, d)| lcm(&acc, d))?;
            let num = parts.iter().try_fold(BiPoly::zero(&self.field), |acc, (n, d)| {
                Ok::<_, Error>(acc.add_ref(&n.mul_ref(&BiPoly::from_t(&den.div_exact(d)?))))
            })?;
            Ok(GenCoeff { num, den })
        })
    }

    /// H_n = Γ_{n+1}(t)·g_n, an element of A[t].
    pub fn anderson_thakur(&self, n: u32) -> Result<BiPoly> {
        cached(&self.h, n as usize, |prev| {
            let k = prev.len() as u32;
            let g = self.gen_coeff(k)?;
            let gamma_t: TPoly = self.gamma(k + 1)?.retag();
            BiPoly::from_t(&gamma_t)
                .mul_ref(&g.num)
                .div_exact(&BiPoly::from_t(&g.den))
                .map_err(|e| Error::Internal(format!("H_{k} is not a polynomial: {e}")))
        })
    }

    /// ‖H_{n-1}‖ < q^{nq/(q-1)} for the θ-degree sup norm.
    pub fn anderson_thakur_bound_holds(&self, n: u32) -> Result<bool> {
        if n == 0 {
            return Err(Error::Invalid("the bound is stated for n >= 1".into()));
        }
        let q = self.field.q() as i64;
        let norm = self.anderson_thakur(n - 1)?.theta_norm_degree();
        Ok(norm * (q - 1) < n as i64 * q)
    }

    /// L_j^{(i)} = Π_{m=1}^{j} (θ^{q^i} - θ^{q^{m+i}}) embedded factor by factor.
    fn twisted_l<S: Scalars>(&self, ctx: &S, j: u32, i: u32) -> Result<S::Elem> {
        let f = &self.field;
        let q = f.q() as u128;
        let low = q.checked_pow(i).ok_or(Error::Overflow)?;
        (1..=j).try_fold(ctx.one(), |acc, m| {
            let high = q.checked_pow(m + i).ok_or(Error::Overflow)?;
            let factor = ctx.embed_sparse(&[(Fe::ONE, low), (f.neg(Fe::ONE), high)])?;
            ctx.mul(&acc, &factor)
        })
    }

    /// S_d(k) = Σ over monic a of degree d of a^{-k}.
    ///
    /// With e_d(x) = Π_{deg b < d}(x - b) = Σ α_i x^{q^i} and e_d(θ^d) = D_d,
    /// Σ_b 1/(θ^d + b + y) = α_0/(D_d + e_d(y)), so S_d(k) is (-1)^{k-1} times the
    /// y^{k-1} coefficient of β_0 Σ_m (-1)^m (Σ_i β_i y^{q^i})^m with
    /// β_i = α_i/D_d = 1/(D_i L_{d-i}^{(i)}).
    pub fn power_sum<S: Scalars>(&self, ctx: &S, d: u32, k: u32) -> Result<S::Elem> {
        if k == 0 {
            return Err(Error::Invalid("power sums are taken for k >= 1".into()));
        }
        let f = &self.field;
        let len = k as usize;
        let sign = |e: u32| if e % 2 == 0 { Fe::ONE } else { f.neg(Fe::ONE) };
        let mut e_series = vec![ctx.zero(); len];
        let mut beta0 = None;
        let mut i = 0u32;
        while i <= d {
            let pos = q_pow(f.q(), i)? as usize;
            if i > 0 && pos >= len {
                break;
            }
            let denom = ctx.mul(&ctx.embed(&self.d(i)?), &self.twisted_l(ctx, d - i, i)?)?;
            let beta = ctx.inv(&denom)?;
            if i == 0 {
                beta0 = Some(beta.clone());
            }
            if pos < len {
                e_series[pos] = beta;
            }
            i += 1;
        }
        let beta0 = beta0.expect("i = 0 is always visited");
        let mut acc = vec![ctx.zero(); len];
        let mut power = vec![ctx.zero(); len];
        power[0] = ctx.one();
        for m in 0..len {
            for (slot, p) in acc.iter_mut().zip(&power) {
                if !ctx.is_exact_zero(p) {
                    *slot = ctx.add(slot, &ctx.scale(&ctx.mul(&beta0, p)?, sign(m as u32)));
                }
            }
            power = series_mul(ctx, &power, &e_series)?;
        }
        Ok(ctx.scale(&acc[len - 1], sign(k - 1)))
    }

    /// Σ over monic a_1, …, a_r with D >= deg a_1 > … > deg a_r >= 0 of Π a_j^{-s_j}.
    pub fn zeta_partial<S: Scalars>(&self, ctx: &S, s: &Index, degree_bound: u32) -> Result<S::Elem> {
        let entries = s.entries();
        let degrees = degree_bound as usize + 1;
        let sums = |k: u32| (0..=degree_bound).map(|d| self.power_sum(ctx, d, k)).collect::<Result<Vec<_>>>();
        let mut inner = sums(*entries.last().expect("nonempty"))?;
        for &k in entries.iter().rev().skip(1) {
            let outer = sums(k)?;
            let mut next = vec![ctx.zero(); degrees];
            let mut prefix = ctx.zero();
            for d in 0..degrees {
                next[d] = ctx.mul(&outer[d], &prefix)?;
                prefix = ctx.add(&prefix, &inner[d]);
            }
            inner = next;
        }
        Ok(inner.iter().fold(ctx.zero(), |acc, x| ctx.add(&acc, x)))
    }

    /// Degree bound D past which every omitted term is below q^{-prec}.
    ///
    /// Two sound rules, the smaller wins: (D + 1)·min s_i > M + 2 from |a^{-s}| <= q^{-ds}, and
    /// (q^{D+2} - q)/(q - 1) > M from |S_d(k)| <= |β_0| = |L_d|^{-1} for d >= 1, every other
    /// factor having absolute value at most 1.
    pub fn truncation_degree(q: u32, s: &Index, prec: i64) -> Result<u32> {
        let m = prec.max(0) + 2;
        let coarse = u32::try_from(m / s.min_entry() as i64).map_err(|_| Error::Overflow)?;
        let q = q as i128;
        let mut sharp = 0u32;
        while sharp < coarse && (q.pow(sharp + 2) - q) / (q - 1) <= prec as i128 {
            sharp += 1;
        }
        Ok(coarse.min(sharp))
    }

    /// ζ_A(s) in k_∞ with absolute error below q^{-prec}.
    pub fn zeta_direct(&self, s: &Index, prec: i64) -> Result<InfAdic> {
        let degree_bound = Self::truncation_degree(self.field.q(), s, prec)?;
        let mut guard = 8;
        for _ in 0..4 {
            let rel = usize::try_from(prec.max(0) + guard).map_err(|_| Error::Overflow)?;
            let value = self.zeta_partial(&InfCtx::new(&self.field, rel), s, degree_bound)?;
            if value.low() <= -prec {
                return Ok(value.truncate_abs(-prec));
            }
            guard *= 2;
        }
        Err(Error::Precision(format!("zeta{s} could not reach q^-{prec}")))
    }
}

/// Product of two y-series truncated to their common length.
fn series_mul<S: Scalars>(ctx: &S, a: &[S::Elem], b: &[S::Elem]) -> Result<Vec<S::Elem>> {
    let len = a.len();
    let mut out = vec![ctx.zero(); len];
    for (i, x) in a.iter().enumerate() {
        if ctx.is_exact_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !ctx.is_exact_zero(y) {
                out[i + j] = ctx.add(&out[i + j], &ctx.mul(x, y)?);
            }
        }
    }
    Ok(out)
}
