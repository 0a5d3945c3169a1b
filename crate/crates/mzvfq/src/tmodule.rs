//! t-modules with ρ_t = θI + N + Eτ (N a strictly upper triangular F_q-matrix, E over A):
//! the modules G_{s,u} and C^{⊗n}, the F_q[t]-action, logarithm and exponential
//! coefficients, and guarded evaluation of the logarithm at ∞ and at finite places.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::index::Index;
use crate::inf::InfAdic;
use crate::matrix::{identity, mat_vec, Mat, TwistedMatrix};
use crate::poly::{TPoly, ThetaPoly};
use crate::scalar::{InfCtx, Scalars, VCtx};
use crate::vadic::{Place, VAdic};

/// How the coordinates of a t-module are grouped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layout {
    /// G_{s,u}: blocks of sizes d_ℓ = s_ℓ + … + s_r.
    Blocks(Vec<usize>),
    /// A fiber coproduct: the shared head of size n, then one tail of size h_ℓ per
    /// member of depth at least two.
    Coproduct { head: usize, tails: Vec<usize> },
}

impl Layout {
    pub fn dim(&self) -> usize {
        match self {
            Layout::Blocks(sizes) => sizes.iter().sum(),
            Layout::Coproduct { head, tails } => head + tails.iter().sum::<usize>(),
        }
    }

    /// Size of the leading block; its last coordinate is the tractable one.
    pub fn head(&self) -> usize {
        match self {
            Layout::Blocks(sizes) => sizes[0],
            Layout::Coproduct { head, .. } => *head,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Series {
    Log,
    Exp,
}

/// (G_a^d, ρ) with ρ_t = θI + N + Eτ.
#[derive(Clone, Debug)]
pub struct TModule {
    field: Field,
    rho_t: TwistedMatrix,
    layout: Layout,
    construction: Option<(Index, Vec<ThetaPoly>)>,
    /// Row a of N as (k, N[a][k]) with k > a.
    nil_rows: Vec<Vec<(usize, Fe)>>,
    /// Column b of N as (k, N[k][b]) with k < b.
    nil_cols: Vec<Vec<(usize, Fe)>>,
    /// Nonzero entries (row, column, value) of E.
    twist_part: Vec<(usize, usize, ThetaPoly)>,
    /// Smallest m with N^m = 0.
    nil_index: usize,
}

impl TModule {
    /// Validates the shape θI + N + Eτ and indexes N and E for the solvers.
    pub fn new(rho_t: TwistedMatrix, layout: Layout, construction: Option<(Index, Vec<ThetaPoly>)>) -> Result<TModule> {
        let d = rho_t.rows();
        if rho_t.cols() != d || layout.dim() != d {
            return Err(Error::Dimension(format!("ρ_t is {}x{} but the layout has {} coordinates", d, rho_t.cols(), layout.dim())));
        }
        if rho_t.tau_degree().unwrap_or(0) > 1 {
            return Err(Error::Unsupported("ρ_t must have τ-degree at most one".into()));
        }
        let field = rho_t.coeff(0).get(0, 0).field().clone();
        let lie = rho_t.coeff(0);
        let theta = ThetaPoly::var(&field);
        let mut nil_rows = vec![Vec::new(); d];
        let mut nil_cols = vec![Vec::new(); d];
        for (r, c, p) in lie.entries() {
            if r == c {
                if *p != theta {
                    return Err(Error::Invalid(format!("diagonal entry {} of ∂ρ_t is {p}, not θ", r + 1)));
                }
                continue;
            }
            if p.is_zero() {
                continue;
            }
            if c < r || !p.is_constant() {
                return Err(Error::Invalid(format!(
                    "∂ρ_t - θI must be a strictly upper triangular F_q-matrix; entry ({}, {}) is {p}",
                    r + 1,
                    c + 1
                )));
            }
            nil_rows[r].push((c, p.coeff(0)));
            nil_cols[c].push((r, p.coeff(0)));
        }
        let twist_part = rho_t
            .coeff(1)
            .entries()
            .filter(|(_, _, p)| !p.is_zero())
            .map(|(r, c, p)| (r, c, p.clone()))
            .collect();
        // Longest chain a -> k with N[a][k] ≠ 0, counted in vertices.
        let mut chain = vec![1usize; d];
        for a in (0..d).rev() {
            chain[a] = 1 + nil_rows[a].iter().map(|&(k, _)| chain[k]).max().unwrap_or(0);
        }
        let nil_index = chain.into_iter().max().unwrap_or(1);
        Ok(TModule { field, rho_t, layout, construction, nil_rows, nil_cols, twist_part, nil_index })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.rho_t.rows()
    }

    pub fn rho_t(&self) -> &TwistedMatrix {
        &self.rho_t
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// The (s, u) this module was built from, if any.
    pub fn construction(&self) -> Option<(&Index, &[ThetaPoly])> {
        self.construction.as_ref().map(|(s, u)| (s, u.as_slice()))
    }

    /// n: the tractable coordinate is the n-th one (1-based).
    pub fn head(&self) -> usize {
        self.layout.head()
    }

    pub fn nilpotency_index(&self) -> usize {
        self.nil_index
    }

    /// ρ_a by Horner evaluation of a at ρ_t.
    pub fn rho(&self, a: &TPoly) -> Result<TwistedMatrix> {
        self.rho_t.eval_poly(a)
    }

    /// ∂ρ_a = a(θI + N).
    pub fn d_rho(&self, a: &TPoly) -> Mat<ThetaPoly> {
        let d = self.dim();
        let lie = self.rho_t.coeff(0);
        let zero = ThetaPoly::zero(&self.field);
        let mut acc = Mat::filled(d, d, zero.clone());
        for &c in a.coeffs().iter().rev() {
            let mut next = poly_mat_mul(&acc, &lie);
            for k in 0..d {
                let entry = next.get(k, k) + &ThetaPoly::constant(&self.field, c);
                next.set(k, k, entry);
            }
            acc = next;
        }
        acc
    }

    /// [a]x, optionally reduced modulo `modulus` at every step.
    pub fn act(&self, a: &TPoly, x: &[ThetaPoly], modulus: Option<&ThetaPoly>) -> Result<Vec<ThetaPoly>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!("point of length {} on a module of dimension {}", x.len(), self.dim())));
        }
        let mut acc = vec![ThetaPoly::zero(&self.field); x.len()];
        for &c in a.coeffs().iter().rev() {
            acc = self.rho_t.apply_reduced(&acc, modulus)?;
            for (slot, xi) in acc.iter_mut().zip(x) {
                let sum = &*slot + &xi.scale(c);
                *slot = match modulus {
                    Some(m) => sum.rem(m)?,
                    None => sum,
                };
            }
        }
        Ok(acc)
    }

    /// λ for step i: θ - θ^{q^i} (log) or θ^{q^i} - θ (exp).
    fn gap<S: Scalars>(&self, ctx: &S, series: Series, i: usize) -> Result<S::Elem> {
        let qi = (self.field.q() as u128).checked_pow(i as u32).ok_or(Error::Overflow)?;
        let minus = self.field.neg(Fe::ONE);
        match series {
            Series::Log => ctx.embed_sparse(&[(Fe::ONE, 1), (minus, qi)]),
            Series::Exp => ctx.embed_sparse(&[(Fe::ONE, qi), (minus, 1)]),
        }
    }

    /// Solves λX + σ(NX - XN) = R with σ = +1 (log) or -1 (exp), sweeping rows bottom to
    /// top and columns left to right so that every right-hand X entry is already known.
    fn solve_sylvester<S: Scalars>(&self, ctx: &S, series: Series, lambda: &S::Elem, rhs: &Mat<S::Elem>) -> Result<Mat<S::Elem>> {
        let d = self.dim();
        let lambda_inv = ctx.inv(lambda)?;
        let mut x = Mat::filled(d, d, ctx.zero());
        for a in (0..d).rev() {
            for b in 0..d {
                let commutator = self.commutator_entry(ctx, &x, a, b);
                let acc = match series {
                    Series::Log => ctx.sub(rhs.get(a, b), &commutator),
                    Series::Exp => ctx.add(rhs.get(a, b), &commutator),
                };
                let value = if ctx.is_exact_zero(&acc) { ctx.zero() } else { ctx.mul(&acc, &lambda_inv)? };
                x.set(a, b, value);
            }
        }
        for a in 0..d {
            for b in 0..d {
                let commutator = self.commutator_entry(ctx, &x, a, b);
                let lhs = if ctx.is_exact_zero(x.get(a, b)) { ctx.zero() } else { ctx.mul(lambda, x.get(a, b))? };
                let lhs = match series {
                    Series::Log => ctx.add(&lhs, &commutator),
                    Series::Exp => ctx.sub(&lhs, &commutator),
                };
                if !ctx.is_zero(&ctx.sub(&lhs, rhs.get(a, b))) {
                    return Err(Error::Internal(format!("nonzero Sylvester residual at ({}, {})", a + 1, b + 1)));
                }
            }
        }
        Ok(x)
    }

    /// (NX - XN)[a][b].
    fn commutator_entry<S: Scalars>(&self, ctx: &S, x: &Mat<S::Elem>, a: usize, b: usize) -> S::Elem {
        let mut acc = ctx.zero();
        for &(k, c) in &self.nil_rows[a] {
            if !ctx.is_exact_zero(x.get(k, b)) {
                acc = ctx.add(&acc, &ctx.scale(x.get(k, b), c));
            }
        }
        for &(k, c) in &self.nil_cols[b] {
            if !ctx.is_exact_zero(x.get(a, k)) {
                acc = ctx.sub(&acc, &ctx.scale(x.get(a, k), c));
            }
        }
        acc
    }

    /// P_i from P_{i-1}: (θ - θ^{q^i})P_i + N P_i - P_i N = P_{i-1} E^{(i-1)}.
    fn next_log_coeff<S: Scalars>(&self, ctx: &S, prev: &Mat<S::Elem>, i: usize) -> Result<Mat<S::Elem>> {
        let d = self.dim();
        let mut rhs = Mat::filled(d, d, ctx.zero());
        for (k, c, e) in &self.twist_part {
            let twisted = ctx.embed_twisted(e, (i - 1) as u32)?;
            for a in 0..d {
                let p = prev.get(a, *k);
                if !ctx.is_exact_zero(p) {
                    let sum = ctx.add(rhs.get(a, *c), &ctx.mul(p, &twisted)?);
                    rhs.set(a, *c, sum);
                }
            }
        }
        let lambda = self.gap(ctx, Series::Log, i)?;
        self.solve_sylvester(ctx, Series::Log, &lambda, &rhs)
    }

    /// C_i from C_{i-1}: (θ^{q^i} - θ)C_i + C_i N - N C_i = E C_{i-1}^{(1)}.
    fn next_exp_coeff<S: Scalars>(&self, ctx: &S, prev: &Mat<S::Elem>, i: usize) -> Result<Mat<S::Elem>> {
        let d = self.dim();
        let mut rhs = Mat::filled(d, d, ctx.zero());
        for (a, k, e) in &self.twist_part {
            let coef = ctx.embed(e);
            for b in 0..d {
                let p = prev.get(*k, b);
                if !ctx.is_exact_zero(p) {
                    let sum = ctx.add(rhs.get(*a, b), &ctx.mul(&coef, &ctx.twist(p, 1)?)?);
                    rhs.set(*a, b, sum);
                }
            }
        }
        let lambda = self.gap(ctx, Series::Exp, i)?;
        self.solve_sylvester(ctx, Series::Exp, &lambda, &rhs)
    }

    /// [P_0, …, P_count] with log_G = Σ P_i τ^i.
    pub fn log_coeffs<S: Scalars>(&self, ctx: &S, count: usize) -> Result<Vec<Mat<S::Elem>>> {
        let mut out = vec![identity(ctx, self.dim())];
        for i in 1..=count {
            let next = self.next_log_coeff(ctx, &out[i - 1], i)?;
            out.push(next);
        }
        Ok(out)
    }

    /// [C_0, …, C_count] with exp_G = Σ C_i τ^i.
    pub fn exp_coeffs<S: Scalars>(&self, ctx: &S, count: usize) -> Result<Vec<Mat<S::Elem>>> {
        let mut out = vec![identity(ctx, self.dim())];
        for i in 1..=count {
            let next = self.next_exp_coeff(ctx, &out[i - 1], i)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Block sizes of a G_{s,u}, or an error for other layouts.
    fn blocks(&self) -> Result<&[usize]> {
        match &self.layout {
            Layout::Blocks(sizes) => Ok(sizes),
            Layout::Coproduct { .. } => {
                Err(Error::Unsupported("the ∞-adic log bound is only available for block layouts".into()))
            }
        }
    }

    /// (block ℓ, position j), both 1-based, of the 0-based coordinate c.
    pub fn block_position(&self, c: usize) -> Result<(usize, usize)> {
        let mut start = 0;
        for (l, &size) in self.blocks()?.iter().enumerate() {
            if c < start + size {
                return Ok((l + 1, c - start + 1));
            }
            start += size;
        }
        Err(Error::Dimension(format!("coordinate {} outside dimension {}", c + 1, self.dim())))
    }

    /// (q-1)·log_q of the bound q^{(d_ℓ-j)q^i - (d_ℓ q^i - d_1)q/(q-1)} for column c of P_i.
    pub fn log_column_bound(&self, i: u32, c: usize) -> Result<i128> {
        let sizes = self.blocks()?;
        let (l, j) = self.block_position(c)?;
        let q = self.field.q() as i128;
        let qi = q.checked_pow(i).ok_or(Error::Overflow)?;
        let (dl, d1) = (sizes[l - 1] as i128, sizes[0] as i128);
        Ok((q - 1) * (dl - j as i128) * qi - (dl * qi - d1) * q)
    }

    /// |u_ℓ|_∞ <= q^{s_ℓ q/(q-1)} for ℓ < r, which the column bound assumes.
    fn check_bound_hypothesis(&self) -> Result<()> {
        let Some((s, u)) = self.construction() else {
            return Ok(());
        };
        let q = self.field.q() as i64;
        for (l, (&sl, ul)) in s.entries().iter().zip(u).enumerate().take(s.depth() - 1) {
            if (q - 1) * ul.deg_i64() > sl as i64 * q {
                return Err(Error::Domain(format!("u_{} = {ul} is too large for the logarithm bound", l + 1)));
            }
        }
        Ok(())
    }

    /// Largest (q-1)·log_q(|x_c| / q^{-(d_ℓ-j) + d_ℓ q/(q-1)}) over nonzero coordinates,
    /// which must be negative; None when x = 0.
    fn inf_margin(&self, x: &[ThetaPoly]) -> Result<Option<i128>> {
        let sizes = self.blocks()?;
        let q = self.field.q() as i128;
        let mut worst: Option<i128> = None;
        for (c, xc) in x.iter().enumerate() {
            let Some(deg) = xc.degree() else { continue };
            let (l, j) = self.block_position(c)?;
            let dl = sizes[l - 1] as i128;
            let margin = (q - 1) * (deg as i128 + dl - j as i128) - dl * q;
            if margin >= 0 {
                return Err(Error::Domain(format!(
                    "coordinate {} has degree {deg}, needs (q-1)·(deg + {}) < {}",
                    c + 1,
                    dl - j as i128,
                    dl * q
                )));
            }
            worst = Some(worst.map_or(margin, |w: i128| w.max(margin)));
        }
        Ok(worst)
    }

    /// log_G(x) in k_∞ to absolute precision q^{-prec} for x ∈ A^d.
    ///
    /// The tail after term I is bounded by the column bound times |x_c|^{q^i}, which is
    /// decreasing in i inside the convergence domain.
    pub fn log_inf(&self, x: &[ThetaPoly], prec: i64) -> Result<Vec<InfAdic>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!("point of length {} on a module of dimension {}", x.len(), self.dim())));
        }
        self.check_bound_hypothesis()?;
        let Some(margin) = self.inf_margin(x)? else {
            return Ok(vec![InfAdic::exact_zero(&self.field); x.len()]);
        };
        let q = self.field.q() as i128;
        let head = self.blocks()?[0] as i128 * q;
        let target = -(q - 1) * prec as i128;
        let term_bound = |i: u32| -> Result<i128> { Ok(q.checked_pow(i).ok_or(Error::Overflow)? * margin + head) };
        let mut count = 0u32;
        while term_bound(count + 1)? >= target {
            count += 1;
        }
        let headroom = (head + q - 2) / (q - 1);
        let mut guard = 8usize;
        loop {
            let rel = usize::try_from(prec as i128 + headroom).map_err(|_| Error::Overflow)? + guard;
            let ctx = InfCtx::new(&self.field, rel);
            let mut acc = vec![InfAdic::exact_zero(&self.field); x.len()];
            let mut coeff = identity(&ctx, self.dim());
            for i in 0..=count as usize {
                if i > 0 {
                    coeff = self.next_log_coeff(&ctx, &coeff, i)?;
                }
                let twisted = x
                    .iter()
                    .map(|p| if p.is_zero() { Ok(ctx.zero()) } else { ctx.embed_twisted(p, i as u32) })
                    .collect::<Result<Vec<_>>>()?;
                let term = mat_vec(&ctx, &coeff, &twisted)?;
                acc = acc.iter().zip(&term).map(|(a, b)| a.add(b)).collect();
            }
            if acc.iter().all(|a| a.low() <= -prec) {
                return Ok(acc.into_iter().map(|a| a.truncate_abs(-prec)).collect());
            }
            guard *= 2;
            if guard > 1 << 12 {
                return Err(Error::Precision("logarithm lost more precision than the retry budget allows".into()));
            }
        }
    }

    /// log_G(x) in k_v known modulo v^prec, for x with |x|_v < 1.
    ///
    /// `point(K)` returns x modulo v^K. Each coefficient step divides by θ - θ^{q^i}, of
    /// valuation one exactly when deg v | i, at most 2m - 1 times (N^m = 0), so
    /// v(P_i x^{(i)}) >= q^i·v(x) - (2m-1)·floor(i / deg v). Summation stops once that
    /// bound certifies the tail and three consecutive computed terms vanish to v^prec.
    pub fn log_v(
        &self,
        place: &Place,
        prec: i64,
        point: impl Fn(usize) -> Result<Vec<ThetaPoly>>,
    ) -> Result<Vec<VAdic>> {
        let q = self.field.q() as i128;
        let dv = place.degree() as i128;
        let slope = 2 * self.nil_index as i128 - 1;
        let probe = point(prec.max(1) as usize)?;
        if probe.len() != self.dim() {
            return Err(Error::Dimension(format!("point of length {} on a module of dimension {}", probe.len(), self.dim())));
        }
        let mut vx = i128::MAX;
        for (c, p) in probe.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let e = place.valuation(p).expect("nonzero") as i128;
            if e < 1 {
                return Err(Error::Domain(format!("coordinate {} is not in the open unit ball at {}", c + 1, place.poly())));
            }
            vx = vx.min(e);
        }
        if vx == i128::MAX {
            // Zero modulo v^prec already; the logarithm vanishes to the same precision.
            return Ok(vec![VAdic::zero(place, prec); self.dim()]);
        }
        let floor_bound = |i: u32| -> Result<i128> {
            Ok(q.checked_pow(i).ok_or(Error::Overflow)? * vx - slope * (i as i128 / dv))
        };
        let mut rising = 0u32;
        while q.checked_pow(rising).ok_or(Error::Overflow)? * (q - 1) * vx < slope {
            rising += 1;
        }
        let mut count = rising;
        while floor_bound(count + 1)? < prec as i128 {
            count += 1;
        }
        let mut guard = 8usize;
        loop {
            let loss = (slope * (count as i128 / dv)) as usize;
            let rel = prec.max(1) as usize + loss + guard;
            let ctx = VCtx::new(place, rel);
            let x: Vec<VAdic> = point(rel)?.iter().map(|p| VAdic::from_poly(place, p, rel as i64)).collect();
            let mut acc = vec![ctx.zero(); x.len()];
            let mut coeff = identity(&ctx, self.dim());
            let mut small_run = 0;
            let mut i = 0usize;
            loop {
                if i > 0 {
                    coeff = self.next_log_coeff(&ctx, &coeff, i)?;
                }
                let twisted = x.iter().map(|p| ctx.twist(p, i as u32)).collect::<Result<Vec<_>>>()?;
                let term = mat_vec(&ctx, &coeff, &twisted)?;
                small_run = if term.iter().all(|t| t.is_small(prec)) { small_run + 1 } else { 0 };
                acc = acc.iter().zip(&term).map(|(a, b)| a.add(b)).collect();
                if i >= count as usize && small_run >= 3 {
                    break;
                }
                i += 1;
                if i > count as usize + 40 {
                    return Err(Error::Internal("v-adic logarithm terms never settled".into()));
                }
            }
            if acc.iter().all(|a| a.abs_prec() >= prec) {
                return Ok(acc.into_iter().map(|a| a.truncate_abs(prec)).collect());
            }
            guard *= 2;
            if guard > 1 << 10 {
                return Err(Error::Precision("v-adic logarithm lost more precision than the retry budget allows".into()));
            }
        }
    }

    /// Σ_{i<=I} C_i z^{(i)} in k_∞, stopping after three consecutive terms below q^{-prec}.
    ///
    /// exp_G is entire but has no closed-form tail bound here; `budget` caps the number
    /// of terms, and the working precision is raised until every term is known to q^{-prec}.
    pub fn exp_inf(&self, z: &[InfAdic], prec: i64, budget: usize) -> Result<ExpSum> {
        if z.len() != self.dim() {
            return Err(Error::Dimension(format!("vector of length {} on a module of dimension {}", z.len(), self.dim())));
        }
        let top = z.iter().filter_map(InfAdic::top).max().unwrap_or(0).max(0);
        let mut rel = usize::try_from(prec + top).map_err(|_| Error::Overflow)? + 16;
        loop {
            let ctx = InfCtx::new(&self.field, rel);
            let mut acc = vec![InfAdic::exact_zero(&self.field); z.len()];
            let mut coeff = identity(&ctx, self.dim());
            let mut small_run = 0;
            let mut largest = i64::MIN;
            let mut sharp = true;
            let mut terms = 0;
            for i in 0..=budget {
                if i > 0 {
                    coeff = self.next_exp_coeff(&ctx, &coeff, i)?;
                }
                let twisted = z.iter().map(|p| ctx.twist(p, i as u32)).collect::<Result<Vec<_>>>()?;
                let term = mat_vec(&ctx, &coeff, &twisted)?;
                largest = largest.max(term.iter().map(InfAdic::top_bound).max().unwrap_or(i64::MIN));
                sharp &= term.iter().all(|t| t.low() <= -prec);
                small_run = if term.iter().all(|t| t.is_small(prec)) { small_run + 1 } else { 0 };
                acc = acc.iter().zip(&term).map(|(a, b)| a.add(b)).collect();
                terms = i + 1;
                if i >= 1 && small_run >= 3 {
                    break;
                }
            }
            if small_run < 3 {
                return Err(Error::Precision(format!("exponential did not settle within {budget} terms")));
            }
            if sharp {
                return Ok(ExpSum { value: acc.into_iter().map(|a| a.truncate_abs(-prec)).collect(), terms });
            }
            let needed = usize::try_from(prec + largest.max(0)).map_err(|_| Error::Overflow)? + 16;
            if needed <= rel {
                rel *= 2;
            } else {
                rel = needed;
            }
            if rel > 1 << 16 {
                return Err(Error::Precision("exponential needs more working precision than allowed".into()));
            }
        }
    }

    /// Σ_{i+j=m} C_i P_j^{(i)} = 0 for 1 <= m <= degree, i.e. exp∘log = id up to τ^degree.
    pub fn exp_log_identity_holds<S: Scalars>(&self, ctx: &S, degree: usize) -> Result<bool> {
        let logs = self.log_coeffs(ctx, degree)?;
        let exps = self.exp_coeffs(ctx, degree)?;
        for m in 1..=degree {
            let mut acc = Mat::filled(self.dim(), self.dim(), ctx.zero());
            for i in 0..=m {
                let twisted = logs[m - i].try_map(|p| ctx.twist(p, i as u32))?;
                acc = mat_add_ctx(ctx, &acc, &crate::matrix::mat_mul(ctx, &exps[i], &twisted)?);
            }
            if !acc.entries().all(|(_, _, e)| ctx.is_zero(e)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// log∘ρ_a = ∂ρ_a∘log up to τ^degree: Σ_{i+j=m} P_i A_j^{(i)} = A_0 P_m.
    pub fn log_functional_equation_holds<S: Scalars>(&self, ctx: &S, a: &TPoly, degree: usize) -> Result<bool> {
        let logs = self.log_coeffs(ctx, degree)?;
        let rho = self.rho(a)?;
        let lie = crate::matrix::embed_matrix(ctx, &rho.coeff(0));
        for m in 0..=degree {
            let mut lhs = Mat::filled(self.dim(), self.dim(), ctx.zero());
            for j in 0..=m.min(rho.tau_degree().unwrap_or(0)) {
                let i = m - j;
                let twisted = crate::matrix::embed_twisted_matrix(ctx, &rho.coeff(j), i as u32)?;
                lhs = mat_add_ctx(ctx, &lhs, &crate::matrix::mat_mul(ctx, &logs[i], &twisted)?);
            }
            let rhs = crate::matrix::mat_mul(ctx, &lie, &logs[m])?;
            let diff = crate::matrix::mat_sub(ctx, &lhs, &rhs);
            if !diff.entries().all(|(_, _, e)| ctx.is_zero(e)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn mat_add_ctx<S: Scalars>(ctx: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Mat<S::Elem> {
    crate::matrix::mat_add(ctx, a, b)
}

fn poly_mat_mul(a: &Mat<ThetaPoly>, b: &Mat<ThetaPoly>) -> Mat<ThetaPoly> {
    let zero = ThetaPoly::zero(a.get(0, 0).field());
    Mat::from_fn(a.rows(), b.cols(), |r, c| {
        (0..a.cols()).fold(zero.clone(), |acc, k| {
            let (x, y) = (a.get(r, k), b.get(k, c));
            if x.is_zero() || y.is_zero() {
                acc
            } else {
                &acc + &(x * y)
            }
        })
    })
}

/// A truncated exponential sum and the number of terms it used.
#[derive(Clone, Debug)]
pub struct ExpSum {
    pub value: Vec<InfAdic>,
    pub terms: usize,
}

/// G_{s,u} and its special point v_{s,u}.
///
/// ρ_t = θI + N + Eτ with N the block-diagonal shift, E[ℓm] zero except for its
/// bottom-left entry (-1)^{m-ℓ} u_ℓ···u_{m-1} (1 when ℓ = m); v is zero except for
/// (-1)^{r-ℓ} u_ℓ···u_r at the bottom of block ℓ.
pub fn build_g(s: &Index, u: &[ThetaPoly]) -> Result<(TModule, Vec<ThetaPoly>)> {
    if u.len() != s.depth() {
        return Err(Error::Dimension(format!("index {s} has depth {} but the point has {} coordinates", s.depth(), u.len())));
    }
    let field = u[0].field().clone();
    let sizes: Vec<usize> = s.suffix_weights().iter().map(|&d| d as usize).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &d| {
            let start = *acc;
            *acc += d;
            Some(start)
        })
        .collect();
    let dim: usize = sizes.iter().sum();
    let zero = ThetaPoly::zero(&field);
    let one = ThetaPoly::one(&field);
    let theta = ThetaPoly::var(&field);
    let mut lie = Mat::filled(dim, dim, zero.clone());
    let mut twist = Mat::filled(dim, dim, zero.clone());
    let mut point = vec![zero; dim];
    let r = s.depth();
    for l in 0..r {
        let (start, size) = (offsets[l], sizes[l]);
        for k in 0..size {
            lie.set(start + k, start + k, theta.clone());
            if k + 1 < size {
                lie.set(start + k, start + k + 1, one.clone());
            }
        }
        let bottom = start + size - 1;
        let mut coupling = one.clone();
        for m in l..r {
            if m > l {
                coupling = -(&coupling * &u[m - 1]);
            }
            twist.set(bottom, offsets[m], coupling.clone());
        }
        let tail = u[l..].iter().fold(one.clone(), |acc, x| &acc * x);
        point[bottom] = if (r - 1 - l) % 2 == 1 { -tail } else { tail };
    }
    let rho_t = TwistedMatrix::new(&field, dim, dim, vec![lie, twist]);
    let module = TModule::new(rho_t, Layout::Blocks(sizes), Some((s.clone(), u.to_vec())))?;
    Ok((module, point))
}

/// C^{⊗n}: ρ_t = θI + N + τ at (n, 1).
pub fn carlitz_tensor(field: &Field, n: u32) -> Result<TModule> {
    let s = Index::new(vec![n])?;
    Ok(build_g(&s, &[ThetaPoly::one(field)])?.0)
}

/// Coefficient of an entry of Φ′: 1, a polynomial, or u^{(-1)} for a u that has no
/// polynomial q-th root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MotiveCoeff {
    One,
    Poly(ThetaPoly),
    InverseTwist(ThetaPoly),
}

/// coeff·(t - θ)^power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotiveEntry {
    pub coeff: MotiveCoeff,
    pub power: u32,
}

impl MotiveEntry {
    /// The entry in A[t], unless it carries a root marker.
    pub fn to_bipoly(&self, field: &Field) -> Option<BiPoly> {
        let base = BiPoly::t_minus_theta_pow(field, self.power as u64);
        match &self.coeff {
            MotiveCoeff::One => Some(base),
            MotiveCoeff::Poly(p) => Some(base.scale_theta(p)),
            MotiveCoeff::InverseTwist(_) => None,
        }
    }
}

impl fmt::Display for MotiveEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coeff {
            MotiveCoeff::One => {}
            MotiveCoeff::Poly(p) => write!(f, "({p})*")?,
            MotiveCoeff::InverseTwist(p) => write!(f, "({p})^(-1)*")?,
        }
        write!(f, "(t - theta)^{}", self.power)
    }
}

/// u^{(-1)} when every exponent of u is divisible by q (F_q is fixed by Frobenius).
fn inverse_twist(u: &ThetaPoly) -> MotiveCoeff {
    match u.twist(-1) {
        Ok(p) if p.is_one() => MotiveCoeff::One,
        Ok(p) => MotiveCoeff::Poly(p),
        Err(_) => MotiveCoeff::InverseTwist(u.clone()),
    }
}

/// Φ′ for (s, u): lower bidiagonal with diagonal (t-θ)^{d_ℓ} and subdiagonal
/// u_ℓ^{(-1)}(t-θ)^{d_ℓ}.
pub fn dual_motive_matrix(s: &Index, u: &[ThetaPoly]) -> Result<Mat<Option<MotiveEntry>>> {
    if u.len() != s.depth() {
        return Err(Error::Dimension(format!("index {s} has depth {} but the point has {} coordinates", s.depth(), u.len())));
    }
    let d = s.suffix_weights();
    let r = s.depth();
    let mut out = Mat::filled(r, r, None);
    for l in 0..r {
        out.set(l, l, Some(MotiveEntry { coeff: MotiveCoeff::One, power: d[l] }));
        if l > 0 && !u[l - 1].is_zero() {
            out.set(l, l - 1, Some(MotiveEntry { coeff: inverse_twist(&u[l - 1]), power: d[l - 1] }));
        }
    }
    Ok(out)
}

/// One nonzero term c·τ^k of a twisted matrix entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedTermJson {
    pub tau_deg: usize,
    pub poly: String,
}

/// Rows of entries, each entry a list of its nonzero τ-terms.
pub fn twisted_matrix_json(m: &TwistedMatrix) -> Vec<Vec<Vec<TwistedTermJson>>> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| {
                    m.entry_terms(r, c)
                        .into_iter()
                        .map(|(tau_deg, p)| TwistedTermJson { tau_deg, poly: p.to_string() })
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::CarlitzTable;
    use crate::polylog::cmspl_inf;
    use crate::rational::Rat;
    use crate::scalar::{ExactK, ResidueField};

    fn setup(q: u32) -> (Field, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (f, move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    /// Entry (r, c), 1-based, as "τ-degree:poly" terms.
    fn entry(m: &TwistedMatrix, r: usize, c: usize) -> Vec<(usize, String)> {
        m.entry_terms(r - 1, c - 1).into_iter().map(|(k, p)| (k, p.to_string())).collect()
    }

    #[test]
    fn three_one_module_matches_the_worked_layout() {
        let (_, p) = setup(2);
        let (g, v) = build_g(&idx(&[3, 1]), &[p("theta^2"), p("1")]).unwrap();
        let rho = g.rho_t();
        assert_eq!(g.dim(), 5);
        for r in 1..=5 {
            assert_eq!(entry(rho, r, r)[0], (0, "theta".to_string()));
        }
        assert_eq!(entry(rho, 1, 2), vec![(0, "1".to_string())]);
        assert_eq!(entry(rho, 4, 1), vec![(1, "1".to_string())]);
        assert_eq!(entry(rho, 4, 5), vec![(1, "theta^2".to_string())]);
        assert_eq!(entry(rho, 5, 5), vec![(0, "theta".to_string()), (1, "1".to_string())]);
        let nonzero = (1..=5).flat_map(|r| (1..=5).map(move |c| (r, c))).filter(|&(r, c)| !entry(rho, r, c).is_empty()).count();
        assert_eq!(nonzero, 5 + 3 + 2);
        assert_eq!(v, vec![p("0"), p("0"), p("0"), p("theta^2"), p("1")]);
    }

    #[test]
    fn two_one_one_module_matches_the_worked_layout() {
        let (_, p) = setup(3);
        let one = p("1");
        let (g, v) = build_g(&idx(&[2, 1, 1]), &[one.clone(), one.clone(), one]).unwrap();
        let rho = g.rho_t();
        assert_eq!(g.layout(), &Layout::Blocks(vec![4, 2, 1]));
        let minus = vec![(1, "2".to_string())];
        let plus = vec![(1, "1".to_string())];
        assert_eq!(entry(rho, 4, 1), plus);
        assert_eq!(entry(rho, 4, 5), minus);
        assert_eq!(entry(rho, 4, 7), plus);
        assert_eq!(entry(rho, 6, 5), plus);
        assert_eq!(entry(rho, 6, 7), minus);
        assert_eq!(entry(rho, 5, 6), vec![(0, "1".to_string())]);
        assert_eq!(entry(rho, 7, 7), vec![(0, "theta".to_string()), (1, "1".to_string())]);
        assert_eq!(v, vec![p("0"), p("0"), p("0"), p("1"), p("0"), p("2"), p("1")]);
    }

    #[test]
    fn carlitz_tensor_power_action() {
        let (f, p) = setup(2);
        let c4 = carlitz_tensor(&f, 4).unwrap();
        assert_eq!(entry(c4.rho_t(), 4, 1), vec![(1, "1".to_string())]);
        assert_eq!(c4.nilpotency_index(), 4);
        let t = TPoly::var(&f);
        let v2 = vec![p("0"), p("0"), p("0"), p("1")];
        assert_eq!(c4.act(&t, &v2, None).unwrap(), vec![p("0"), p("0"), p("1"), p("theta")]);
        assert_eq!(c4.rho(&TPoly::one(&f)).unwrap(), TwistedMatrix::identity(&f, 4));
        let c1 = carlitz_tensor(&f, 1).unwrap();
        assert_eq!(entry(c1.rho_t(), 1, 1), vec![(0, "theta".to_string()), (1, "1".to_string())]);
    }

    #[test]
    fn action_by_horner_matches_rho_matrix() {
        let (f, p) = setup(3);
        let (g, v) = build_g(&idx(&[2, 1]), &[p("theta + 1"), p("theta^2")]).unwrap();
        let a = TPoly::parse(&f, "t^2 + 2*t + 1").unwrap();
        assert_eq!(g.act(&a, &v, None).unwrap(), g.rho(&a).unwrap().apply(&v).unwrap());
        let m = p("theta^3 + 2*theta + 1");
        let reduced: Vec<ThetaPoly> = g.act(&a, &v, None).unwrap().iter().map(|x| x.rem(&m).unwrap()).collect();
        assert_eq!(g.act(&a, &v, Some(&m)).unwrap(), reduced);
    }

    #[test]
    fn tractable_row_of_d_rho() {
        let (f, p) = setup(3);
        let (g, _) = build_g(&idx(&[2, 1, 2]), &[p("theta"), p("1"), p("theta^2")]).unwrap();
        let n = g.head();
        for code in 0..50u32 {
            let coeffs: Vec<Fe> = (0..4).map(|k| f.from_int(((code / 3u32.pow(k)) % 3) as i64)).collect();
            let a = TPoly::new(&f, coeffs);
            let m = g.d_rho(&a);
            let a_theta: ThetaPoly = a.retag();
            for c in 0..g.dim() {
                let expected = if c == n - 1 { a_theta.clone() } else { ThetaPoly::zero(&f) };
                assert_eq!(m.get(n - 1, c), &expected);
            }
        }
    }

    #[test]
    fn carlitz_coefficients_are_reciprocals_of_l_and_d() {
        let (f, _) = setup(3);
        let ctx = ExactK::new(&f);
        let table = CarlitzTable::new(&f);
        let c1 = carlitz_tensor(&f, 1).unwrap();
        let logs = c1.log_coeffs(&ctx, 4).unwrap();
        let exps = c1.exp_coeffs(&ctx, 4).unwrap();
        for i in 0..=4 {
            let l = Rat::from_poly(&table.l(i).unwrap()).inv().unwrap();
            let d = Rat::from_poly(&table.d(i).unwrap()).inv().unwrap();
            assert_eq!(logs[i as usize].get(0, 0), &l);
            assert_eq!(exps[i as usize].get(0, 0), &d);
        }
    }

    /// Jacobi iteration X <- λ^{-1}(R ∓ (NX - XN)), which reaches the fixed point in at
    /// most 2d steps because the commutator map is nilpotent.
    fn jacobi<S: Scalars>(g: &TModule, ctx: &S, log: bool, lambda: &S::Elem, rhs: &Mat<S::Elem>) -> Mat<S::Elem> {
        let d = g.dim();
        let mut x = Mat::filled(d, d, ctx.zero());
        let inv = ctx.inv(lambda).unwrap();
        for _ in 0..=2 * d {
            x = Mat::from_fn(d, d, |a, b| {
                let comm = g.commutator_entry(ctx, &x, a, b);
                let acc = if log { ctx.sub(rhs.get(a, b), &comm) } else { ctx.add(rhs.get(a, b), &comm) };
                ctx.mul(&acc, &inv).unwrap()
            });
        }
        x
    }

    #[test]
    fn sweep_agrees_with_jacobi_and_binomial_oracles() {
        let (f, p) = setup(2);
        let ctx = ExactK::new(&f);
        let (g, _) = build_g(&idx(&[3, 1]), &[p("theta^2"), p("1")]).unwrap();
        let logs = g.log_coeffs(&ctx, 3).unwrap();
        let exps = g.exp_coeffs(&ctx, 3).unwrap();
        let d = g.dim();
        let e = crate::matrix::embed_matrix(&ctx, &g.rho_t().coeff(1));
        let n: Mat<Rat> = Mat::from_fn(d, d, |a, b| {
            let entry = g.rho_t().coeff(0).get(a, b).clone();
            if a == b { Rat::zero(&f) } else { Rat::from_poly(&entry) }
        });
        for i in 1..=3usize {
            let twisted_e = e.try_map(|x| ctx.twist(x, (i - 1) as u32)).unwrap();
            let rhs = crate::matrix::mat_mul(&ctx, &logs[i - 1], &twisted_e).unwrap();
            let lambda = g.gap(&ctx, Series::Log, i).unwrap();
            assert_eq!(jacobi(&g, &ctx, true, &lambda, &rhs), logs[i]);
            // P_i = -Σ_m μ^{-(m+1)} Σ_k (-1)^k C(m,k) N^{m-k} R N^k with μ = θ^{q^i} - θ.
            let mu = ctx.neg(&lambda);
            let mut binomial = Mat::filled(d, d, Rat::zero(&f));
            let mut n_pows = vec![identity(&ctx, d)];
            for _ in 0..2 * d {
                let next = crate::matrix::mat_mul(&ctx, n_pows.last().unwrap(), &n).unwrap();
                n_pows.push(next);
            }
            for m in 0..2 * d - 1 {
                let scale = ctx.inv(&(0..=m).fold(ctx.one(), |acc, _| ctx.mul(&acc, &mu).unwrap())).unwrap();
                for k in 0..=m {
                    let choose = (0..k).fold(1u64, |acc, j| acc * (m - j) as u64 / (j + 1) as u64);
                    let c = f.from_int(if k % 2 == 1 { -(choose as i64) } else { choose as i64 });
                    let term = crate::matrix::mat_mul(&ctx, &crate::matrix::mat_mul(&ctx, &n_pows[m - k], &rhs).unwrap(), &n_pows[k]).unwrap();
                    let term = term.map(|x| ctx.scale(&ctx.mul(x, &scale).unwrap(), c));
                    binomial = crate::matrix::mat_sub(&ctx, &binomial, &term);
                }
            }
            assert_eq!(binomial, logs[i]);
            let twisted_c = exps[i - 1].try_map(|x| ctx.twist(x, 1)).unwrap();
            let rhs = crate::matrix::mat_mul(&ctx, &e, &twisted_c).unwrap();
            let lambda = g.gap(&ctx, Series::Exp, i).unwrap();
            assert_eq!(jacobi(&g, &ctx, false, &lambda, &rhs), exps[i]);
        }
    }

    #[test]
    fn series_identities_hold_exactly() {
        let (f, p) = setup(2);
        let ctx = ExactK::new(&f);
        let (g, _) = build_g(&idx(&[2, 1, 1]), &[p("1"), p("theta"), p("1")]).unwrap();
        assert!(g.exp_log_identity_holds(&ctx, 4).unwrap());
        let a = TPoly::parse(&f, "t^2 + t + 1").unwrap();
        assert!(g.log_functional_equation_holds(&ctx, &a, 4).unwrap());
        let residue = ResidueField::of_degree(&f, 11).unwrap();
        assert!(g.exp_log_identity_holds(&residue, 8).unwrap());
        assert!(g.log_functional_equation_holds(&residue, &a, 8).unwrap());
    }

    #[test]
    fn log_column_bound_holds_on_the_worked_modules() {
        let (f, p) = setup(2);
        let ctx = InfCtx::new(&f, 40);
        let one = p("1");
        let modules = [
            build_g(&idx(&[3, 1]), &[p("theta^2"), one.clone()]).unwrap().0,
            build_g(&idx(&[3, 1]), &[one.clone(), one.clone()]).unwrap().0,
            build_g(&idx(&[2, 2]), &[one.clone(), one.clone()]).unwrap().0,
            build_g(&idx(&[2, 1, 1]), &[one.clone(), one.clone(), one.clone()]).unwrap().0,
            carlitz_tensor(&f, 4).unwrap(),
        ];
        for g in &modules {
            let logs = g.log_coeffs(&ctx, 8).unwrap();
            for (i, coeff) in logs.iter().enumerate() {
                for c in 0..g.dim() {
                    let bound = g.log_column_bound(i as u32, c).unwrap();
                    for r in 0..g.dim() {
                        let size = coeff.get(r, c).top_bound() as i128;
                        assert!(size <= bound, "P_{i} entry ({}, {}) too large", r + 1, c + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn log_coordinate_is_a_star_polylogarithm() {
        let (f, p) = setup(2);
        let table = CarlitzTable::new(&f);
        // The reversed triple (1,(1,3),(1,θ²)).
        let (g, v) = build_g(&idx(&[3, 1]), &[p("theta^2"), p("1")]).unwrap();
        let log = g.log_inf(&v, 20).unwrap();
        let star = cmspl_inf(&table, &idx(&[1, 3]), &[p("1"), p("theta^2")], 20).unwrap();
        assert!(log[3].agrees_to(&star.neg(), 20));
        let tail = cmspl_inf(&table, &idx(&[1]), &[p("1")], 20).unwrap();
        assert!(log[4].agrees_to(&tail, 20));
        let zero = vec![ThetaPoly::zero(&f); 5];
        assert!(g.log_inf(&zero, 20).unwrap().iter().all(InfAdic::is_exact_zero));
    }

    #[test]
    fn log_guard_names_the_coordinate() {
        let (f, p) = setup(2);
        let c2 = carlitz_tensor(&f, 2).unwrap();
        // |x_2| must stay below q^{2q/(q-1)} = q^4.
        let err = c2.log_inf(&[p("0"), p("theta^4")], 10).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("coordinate 2")));
        assert!(c2.log_inf(&[p("0"), p("theta^3")], 10).is_ok());
    }

    #[test]
    fn exp_inverts_log_at_infinity() {
        let (_, p) = setup(3);
        let (g, v) = build_g(&idx(&[2, 1]), &[p("theta"), p("1")]).unwrap();
        let z = g.log_inf(&v, 30).unwrap();
        let back = g.exp_inf(&z, 20, 60).unwrap();
        for (x, y) in back.value.iter().zip(&v) {
            assert!(x.agrees_to(&InfAdic::from_poly(y, 40), 20));
        }
    }

    #[test]
    fn v_adic_log_matches_series_in_depth_one() {
        let (f, p) = setup(3);
        let table = CarlitzTable::new(&f);
        let place = Place::new(&p("theta")).unwrap();
        let c2 = carlitz_tensor(&f, 2).unwrap();
        let x = vec![p("0"), p("theta^2 + theta")];
        let log = c2.log_v(&place, 10, |_| Ok(x.clone())).unwrap();
        let series = crate::polylog::cmspl_v_series(&table, &idx(&[2]), &[p("theta^2 + theta")], &place, 10).unwrap();
        assert!(log[1].agrees_to(&series, 10));
        let err = c2.log_v(&place, 10, |_| Ok(vec![p("1"), p("theta")])).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("coordinate 1")));
    }

    #[test]
    fn dual_motive_matrix_shape() {
        let (f, p) = setup(2);
        let phi = dual_motive_matrix(&idx(&[3, 1]), &[p("theta^2"), p("1")]).unwrap();
        let t = |s: &str| BiPoly::parse(&f, s).unwrap();
        assert_eq!(phi.get(0, 0).as_ref().unwrap().to_bipoly(&f).unwrap(), BiPoly::t_minus_theta_pow(&f, 4));
        assert_eq!(phi.get(1, 1).as_ref().unwrap().to_bipoly(&f).unwrap(), t("t + theta"));
        let sub = phi.get(1, 0).as_ref().unwrap();
        assert_eq!(sub.coeff, MotiveCoeff::Poly(p("theta")));
        assert_eq!(sub.to_bipoly(&f).unwrap(), BiPoly::t_minus_theta_pow(&f, 4).scale_theta(&p("theta")));
        assert!(phi.get(0, 1).is_none());
        let marked = dual_motive_matrix(&idx(&[1, 1]), &[p("theta"), p("1")]).unwrap();
        assert_eq!(marked.get(1, 0).as_ref().unwrap().coeff, MotiveCoeff::InverseTwist(p("theta")));
        assert!(marked.get(1, 0).as_ref().unwrap().to_bipoly(&f).is_none());
        let single = dual_motive_matrix(&idx(&[5]), &[p("theta")]).unwrap();
        assert_eq!(single.rows(), 1);
        assert_eq!(single.get(0, 0).as_ref().unwrap().power, 5);
    }

    #[test]
    fn twisted_json_round_trips_polynomials() {
        let (f, p) = setup(3);
        let (g, _) = build_g(&idx(&[1, 2]), &[p("2*theta + 1"), p("theta")]).unwrap();
        let json = twisted_matrix_json(g.rho_t());
        for (r, row) in json.iter().enumerate() {
            for (c, terms) in row.iter().enumerate() {
                let back: Vec<(usize, ThetaPoly)> =
                    terms.iter().map(|t| (t.tau_deg, ThetaPoly::parse(&f, &t.poly).unwrap())).collect();
                assert_eq!(back, g.rho_t().entry_terms(r, c));
            }
        }
    }
}
