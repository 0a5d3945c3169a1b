//! Carlitz multiple polylogarithms Li_s and star polylogarithms Li*_s at points of A^r.
//!
//! Every term u_1^{q^{i_1}}···u_r^{q^{i_r}} / (L_{i_1}^{s_1}···L_{i_r}^{s_r}) is an exact
//! element of k, so its size is known exactly before it is expanded. Summation runs
//! over i_1 ascending and stops once a bound covering every remaining chain is below
//! the target precision.

use std::collections::HashMap;

use crate::carlitz::CarlitzTable;
use crate::error::{Error, Result};
use crate::index::{Index, Word};
use crate::inf::InfAdic;
use crate::poly::ThetaPoly;
use crate::vadic::{Place, VAdic};

/// Chain shape: strict i_1 > … > i_r for Li, weak i_1 >= … >= i_r for Li*.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chain {
    Strict,
    Weak,
}

/// Calls `visit` on every chain (i_1, …, i_r) with the given i_1.
fn for_each_chain(depth: usize, top: u32, chain: Chain, visit: &mut impl FnMut(&[u32]) -> Result<()>) -> Result<()> {
    fn go(
        rest: usize,
        prefix: &mut Vec<u32>,
        chain: Chain,
        visit: &mut impl FnMut(&[u32]) -> Result<()>,
    ) -> Result<()> {
        if rest == 0 {
            return visit(prefix);
        }
        let last = *prefix.last().expect("chain starts with i_1");
        let upper = match chain {
            Chain::Strict if last == 0 => return Ok(()),
            Chain::Strict => last - 1,
            Chain::Weak => last,
        };
        for i in 0..=upper {
            prefix.push(i);
            go(rest - 1, prefix, chain, visit)?;
            prefix.pop();
        }
        Ok(())
    }
    let mut prefix = vec![top];
    go(depth - 1, &mut prefix, chain, visit)
}

fn check_len(s: &Index, u: &[ThetaPoly]) -> Result<()> {
    if s.depth() != u.len() {
        return Err(Error::Dimension(format!("index {s} has depth {} but the point has {} coordinates", s.depth(), u.len())));
    }
    Ok(())
}

/// Membership of a point with the given coordinate degrees in D''_s (first coordinate
/// strict) or D'_s (every coordinate strict): (q-1)·deg u_j against s_j·q.
pub fn in_domain(q: u32, s: &Index, degrees: &[Option<i64>], all_strict: bool) -> bool {
    let q = q as i64;
    s.entries().iter().zip(degrees).enumerate().all(|(j, (&sj, deg))| match deg {
        None => true,
        Some(d) if j == 0 || all_strict => (q - 1) * d < sj as i64 * q,
        Some(d) => (q - 1) * d <= sj as i64 * q,
    })
}

fn degrees(u: &[ThetaPoly]) -> Vec<Option<i64>> {
    u.iter().map(|x| x.degree().map(|d| d as i64)).collect()
}

/// Errors unless u lies in D''_s, naming the first offending coordinate.
pub fn check_domain(q: u32, s: &Index, u: &[ThetaPoly]) -> Result<()> {
    check_len(s, u)?;
    let degs = degrees(u);
    let qi = q as i64;
    for (j, (&sj, deg)) in s.entries().iter().zip(&degs).enumerate() {
        let Some(d) = *deg else { continue };
        let ok = if j == 0 { (qi - 1) * d < sj as i64 * qi } else { (qi - 1) * d <= sj as i64 * qi };
        if !ok {
            let rel = if j == 0 { "<" } else { "<=" };
            return Err(Error::Domain(format!(
                "coordinate {} of the point has degree {d} but needs (q-1)·deg {rel} {sj}·q",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Powers L_i^s shared across the terms of one sum.
struct LPowers<'a> {
    table: &'a CarlitzTable,
    cache: HashMap<(u32, u32), ThetaPoly>,
}

impl<'a> LPowers<'a> {
    fn new(table: &'a CarlitzTable) -> Self {
        LPowers { table, cache: HashMap::new() }
    }

    fn get(&mut self, i: u32, s: u32) -> Result<ThetaPoly> {
        if let Some(p) = self.cache.get(&(i, s)) {
            return Ok(p.clone());
        }
        let p = self.table.l(i)?.pow(s as u64);
        self.cache.insert((i, s), p.clone());
        Ok(p)
    }

    fn term(&mut self, s: &Index, u: &[ThetaPoly], chain: &[u32]) -> Result<(ThetaPoly, ThetaPoly)> {
        let field = self.table.field();
        let mut num = ThetaPoly::one(field);
        let mut den = ThetaPoly::one(field);
        for ((&i, &sj), uj) in chain.iter().zip(s.entries()).zip(u) {
            num = &num * &uj.twist(i as i64)?;
            den = &den * &self.get(i, sj)?;
        }
        Ok((num, den))
    }
}

/// (q-1)·log_q of |u^{q^i}/L_i^s|_∞ = (q-1)q^i·deg u - s(q^{i+1} - q).
fn scaled_inf_exponent(q: i128, deg: i64, s: u32, i: u32) -> i128 {
    let qi = q.pow(i);
    (q - 1) * qi * deg as i128 - s as i128 * (qi * q - q)
}

fn series_inf(table: &CarlitzTable, s: &Index, u: &[ThetaPoly], prec: i64, chain: Chain) -> Result<InfAdic> {
    let field = table.field();
    let q = field.q();
    check_domain(q, s, u)?;
    if u.iter().any(ThetaPoly::is_zero) {
        return Ok(InfAdic::zero(field, -prec));
    }
    let qi = q as i128;
    let degs: Vec<i64> = u.iter().map(ThetaPoly::deg_i64).collect();
    let target = -(prec as i128) * (qi - 1);
    // Coordinates past the first have nonincreasing term sizes, largest at i = 0.
    let rest_max: i128 = degs.iter().skip(1).map(|&d| (qi - 1) * d as i128).sum();
    let mut powers = LPowers::new(table);
    let mut acc = InfAdic::zero(field, -prec);
    let mut top = 0u32;
    loop {
        for_each_chain(s.depth(), top, chain, &mut |c| {
            let size: i128 = c
                .iter()
                .zip(s.entries())
                .zip(&degs)
                .map(|((&i, &sj), &d)| scaled_inf_exponent(qi, d, sj, i))
                .sum();
            if size >= target {
                let (num, den) = powers.term(s, u, c)?;
                acc = acc.add(&InfAdic::from_rational(&num, &den, prec)?);
            }
            Ok(())
        })?;
        let tail = scaled_inf_exponent(qi, degs[0], s.entries()[0], top + 1) + rest_max;
        if tail < target {
            return Ok(acc);
        }
        top = top.checked_add(1).ok_or(Error::Overflow)?;
        if top > 40 {
            return Err(Error::Internal("polylogarithm tail bound never fell below the target".into()));
        }
    }
}

/// Li_s(u) in k_∞ with absolute error below q^{-prec}; u must lie in D''_s.
pub fn cmpl_inf(table: &CarlitzTable, s: &Index, u: &[ThetaPoly], prec: i64) -> Result<InfAdic> {
    series_inf(table, s, u, prec, Chain::Strict)
}

/// Li*_s(u) in k_∞ with absolute error below q^{-prec}; u must lie in D''_s.
pub fn cmspl_inf(table: &CarlitzTable, s: &Index, u: &[ThetaPoly], prec: i64) -> Result<InfAdic> {
    series_inf(table, s, u, prec, Chain::Weak)
}

/// The signed star terms ((-1)^{ν(P)}, P(s), P^×(u)) with Li_s(u) = Σ_P (-1)^{ν(P)} Li*_{P(s)}(P^×(u)).
pub fn star_expansion(s: &Index, u: &[ThetaPoly]) -> Result<Vec<(bool, Index, Vec<ThetaPoly>)>> {
    check_len(s, u)?;
    Word::all(s.depth())
        .into_iter()
        .map(|w| Ok((w.sign_is_negative(), w.apply_index(s)?, w.apply_point(u, |a, b| a * b)?)))
        .collect()
}

/// v-adic valuation of L_i: the number of 1 <= m <= i with deg v | m.
fn l_valuation(place_degree: usize, i: u32) -> i128 {
    (i as usize / place_degree) as i128
}

/// Li*_s(u) summed directly in k_v, known modulo v^prec; needs |u_j|_v < 1 for every j.
pub fn cmspl_v_series(table: &CarlitzTable, s: &Index, u: &[ThetaPoly], place: &Place, prec: i64) -> Result<VAdic> {
    check_len(s, u)?;
    if u.iter().any(ThetaPoly::is_zero) {
        return Ok(VAdic::zero(place, prec));
    }
    let vals: Vec<i128> = u.iter().map(|x| place.valuation(x).expect("nonzero") as i128).collect();
    if let Some(j) = vals.iter().position(|&v| v < 1) {
        return Err(Error::Domain(format!("coordinate {} of the point is a v-adic unit", j + 1)));
    }
    let q = table.field().q() as i128;
    let dv = place.degree();
    let size = |j: usize, i: u32| q.pow(i) * vals[j] - s.entries()[j] as i128 * l_valuation(dv, i);
    // Past the point where q^i (q-1) val >= s each size is increasing in i.
    let rising_from = |j: usize| {
        let mut i = 0u32;
        while q.pow(i) * (q - 1) * vals[j] < s.entries()[j] as i128 {
            i += 1;
        }
        i
    };
    let rest_min: i128 = (1..s.depth()).map(|j| (0..=rising_from(j)).map(|i| size(j, i)).min().expect("nonempty")).sum();
    let first_rising = rising_from(0);
    let target = prec as i128;
    let mut powers = LPowers::new(table);
    let mut acc = VAdic::zero(place, prec);
    let mut top = 0u32;
    loop {
        for_each_chain(s.depth(), top, Chain::Weak, &mut |c| {
            let val: i128 = c.iter().enumerate().map(|(j, &i)| size(j, i)).sum();
            if val < target {
                let (num, den) = powers.term(s, u, c)?;
                let rel = usize::try_from((target - val).max(1)).map_err(|_| Error::Overflow)?;
                acc = acc.add(&VAdic::from_rational(place, &num, &den, rel)?);
            }
            Ok(())
        })?;
        if top >= first_rising && size(0, top + 1) + rest_min >= target {
            return Ok(acc.truncate_abs(prec));
        }
        top = top.checked_add(1).ok_or(Error::Overflow)?;
        if top > 40 {
            return Err(Error::Internal("v-adic series bound never reached the target".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn setup(q: u32) -> (CarlitzTable, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (CarlitzTable::new(&f), move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    #[test]
    fn chains_are_counted_correctly() {
        let mut strict = 0;
        for_each_chain(3, 4, Chain::Strict, &mut |_| {
            strict += 1;
            Ok(())
        })
        .unwrap();
        // i_1 = 4, 4 > i_2 > i_3 >= 0: C(4, 2).
        assert_eq!(strict, 6);
        let mut weak = 0;
        for_each_chain(3, 2, Chain::Weak, &mut |_| {
            weak += 1;
            Ok(())
        })
        .unwrap();
        // 2 >= i_2 >= i_3 >= 0: 6 pairs.
        assert_eq!(weak, 6);
    }

    #[test]
    fn zero_coordinate_gives_zero() {
        let (table, p) = setup(2);
        let v = cmpl_inf(&table, &idx(&[1, 2]), &[p("0"), p("1")], 10).unwrap();
        assert!(v.is_zero_to_precision());
        let place = Place::parse(table.field(), "theta").unwrap();
        assert!(cmspl_v_series(&table, &idx(&[2]), &[p("0")], &place, 5).unwrap().is_zero_to_precision());
    }

    #[test]
    fn depth_one_star_equals_plain() {
        for q in [2, 3] {
            let (table, p) = setup(q);
            for (s, u) in [(1, "1"), (3, "theta + 1"), (2, "theta")] {
                let a = cmpl_inf(&table, &idx(&[s]), &[p(u)], 25).unwrap();
                let b = cmspl_inf(&table, &idx(&[s]), &[p(u)], 25).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn carlitz_logarithm_of_one() {
        // Li_1(1) = Σ 1/L_i; at q = 2 the first terms are 1 + 1/(θ + θ^2) + ….
        let (table, p) = setup(2);
        let v = cmpl_inf(&table, &idx(&[1]), &[p("1")], 8).unwrap();
        let head = InfAdic::from_rational(&p("theta^2 + theta + 1"), &p("theta^2 + theta"), 8).unwrap();
        let next = InfAdic::from_rational(&p("1"), &table.l(2).unwrap(), 8).unwrap();
        assert!(v.agrees_to(&head.add(&next), 8));
    }

    #[test]
    fn domain_guard() {
        let (table, p) = setup(2);
        // s_1 = 1 at q = 2 needs deg u_1 < 2.
        assert!(matches!(cmpl_inf(&table, &idx(&[1]), &[p("theta^2")], 5), Err(Error::Domain(_))));
        // Later coordinates may sit on the boundary.
        assert!(cmspl_inf(&table, &idx(&[1, 1]), &[p("1"), p("theta^2")], 5).is_ok());
        assert!(matches!(cmspl_inf(&table, &idx(&[1, 1]), &[p("1"), p("theta^3")], 5), Err(Error::Domain(_))));
        let place = Place::parse(table.field(), "theta").unwrap();
        assert!(matches!(
            cmspl_v_series(&table, &idx(&[3, 1]), &[p("theta^2"), p("1")], &place, 5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inclusion_exclusion_small() {
        let (table, p) = setup(3);
        let s = idx(&[1, 2, 1]);
        let u = [p("theta"), p("theta + 1"), p("1")];
        let plain = cmpl_inf(&table, &s, &u, 20).unwrap();
        let mut star = InfAdic::zero(table.field(), -20);
        for (neg, si, ui) in star_expansion(&s, &u).unwrap() {
            let term = cmspl_inf(&table, &si, &ui, 20).unwrap();
            star = if neg { star.sub(&term) } else { star.add(&term) };
        }
        assert!(plain.agrees_to(&star, 20));
    }

    #[test]
    fn v_adic_leading_terms() {
        // q = 3: θ + θ^3/(θ - θ^3) + … and the second term has valuation 2.
        let (table, p) = setup(3);
        let place = Place::parse(table.field(), "theta").unwrap();
        let v = cmspl_v_series(&table, &idx(&[1]), &[p("theta")], &place, 2).unwrap();
        assert!(v.agrees_to(&VAdic::from_poly(&place, &p("theta"), 2), 2));
        assert_eq!(v.val(), Some(1));
        // q = 2: θ^2/L_1 = θ/(1 + θ) also has valuation 1 and cancels θ in characteristic 2.
        let (table, p) = setup(2);
        let place = Place::parse(table.field(), "theta").unwrap();
        let v = cmspl_v_series(&table, &idx(&[1]), &[p("theta")], &place, 2).unwrap();
        assert!(v.is_small(2));
    }

    #[test]
    fn v_adic_series_matches_exact_partial_sums() {
        // Terms past the stopping point are divisible by v^prec, so a longer exact sum agrees.
        let (table, p) = setup(3);
        let place = Place::parse(table.field(), "theta + 1").unwrap();
        let s = idx(&[2, 1]);
        let u = [p("theta + 1"), p("theta^2 + 2*theta + 1")];
        let prec = 12;
        let fast = cmspl_v_series(&table, &s, &u, &place, prec).unwrap();
        let mut slow = VAdic::zero(&place, 40);
        for i1 in 0..6u32 {
            for i2 in 0..=i1 {
                let num = &u[0].twist(i1 as i64).unwrap() * &u[1].twist(i2 as i64).unwrap();
                let den = &table.l(i1).unwrap().pow(2) * &table.l(i2).unwrap();
                slow = slow.add(&VAdic::from_rational(&place, &num, &den, 40).unwrap());
            }
        }
        assert!(fast.agrees_to(&slow, prec));
    }
}
