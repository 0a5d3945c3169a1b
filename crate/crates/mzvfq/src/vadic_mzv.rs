//! v-adic star polylogarithm values and v-adic MZVs through t-module logarithms.
//!
//! A multiplier a ∈ F_q[t] pushes the special point into the open unit ball at v, where
//! log_G converges; tractability of coordinate n turns log_G([a]v) back into a value
//! attached to v itself after dividing by a(θ), which is a v-adic unit.

use rayon::prelude::*;

use crate::carlitz::CarlitzTable;
use crate::coproduct::{assemble, CoproductBundle};
use crate::decomp::{star_triples, StarTriple};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::index::Index;
use crate::poly::{TPoly, Theta, ThetaPoly};
use crate::tmodule::{build_g, TModule};
use crate::vadic::{Place, VAdic};

/// Π_{j=1}^{dep} (v(t)^{s_1+…+s_j} - 1).
pub fn multiplier_factor(place: &Place, s: &Index) -> TPoly {
    let field = place.field();
    let v_t: TPoly = place.poly().retag();
    let one = TPoly::one(field);
    let mut partial = 0u64;
    s.entries().iter().fold(one.clone(), |acc, &k| {
        partial += k as u64;
        &acc * &(&v_t.pow(partial) - &one)
    })
}

/// [a]x reduced mod v^K, as a closure over K for the v-adic logarithm.
fn scaled_point<'a>(
    module: &'a TModule,
    a: &'a TPoly,
    point: &'a [ThetaPoly],
    place: &'a Place,
) -> impl Fn(usize) -> Result<Vec<ThetaPoly>> + 'a {
    move |k| module.act(a, point, Some(&place.pow(k)))
}

/// |[a]x|_v < 1.
pub fn pushes_into_unit_ball(module: &TModule, a: &TPoly, point: &[ThetaPoly], place: &Place) -> Result<bool> {
    Ok(scaled_point(module, a, point, place)(1)?.iter().all(ThetaPoly::is_zero))
}

/// a(θ), which must be a v-adic unit.
fn multiplier_at_theta(place: &Place, a: &TPoly) -> Result<ThetaPoly> {
    let a_theta: ThetaPoly = a.retag::<Theta>();
    if place.valuation(&a_theta) != Some(0) {
        return Err(Error::Internal(format!("a(θ) = {a_theta} is not a unit at {}", place.poly())));
    }
    Ok(a_theta)
}

/// (coordinate n of log_G([a]x)) / a(θ) to v^prec.
fn tractable_log(module: &TModule, point: &[ThetaPoly], a: &TPoly, place: &Place, prec: i64) -> Result<VAdic> {
    if !pushes_into_unit_ball(module, a, point, place)? {
        return Err(Error::Internal(format!("[a]x is not in the open unit ball at {} for a = {a}", place.poly())));
    }
    let n = module.head();
    let log = module.log_v(place, prec, scaled_point(module, a, point, place))?;
    log[n - 1].div_poly(&multiplier_at_theta(place, a)?).map(|x| x.truncate_abs(prec))
}

/// Li*_s(u)_v to v^prec via the multiplier Π_j (v(t)^{s_1+…+s_j} - 1).
pub fn cmspl_star_v(s: &Index, u: &[ThetaPoly], place: &Place, prec: i64) -> Result<VAdic> {
    cmspl_star_v_with(s, u, place, prec, &multiplier_factor(place, s))
}

/// Li*_s(u)_v to v^prec via a caller-chosen multiplier, which must push v_{s̃,ũ} into the
/// open unit ball and have a(θ) a v-adic unit.
pub fn cmspl_star_v_with(s: &Index, u: &[ThetaPoly], place: &Place, prec: i64, a: &TPoly) -> Result<VAdic> {
    if u.len() != s.depth() {
        return Err(Error::Dimension(format!("index {s} has depth {} but the point has {} coordinates", s.depth(), u.len())));
    }
    let reversed_u: Vec<ThetaPoly> = u.iter().rev().cloned().collect();
    let (module, point) = build_g(&s.reversed(), &reversed_u)?;
    let value = tractable_log(&module, &point, a, place, prec)?;
    Ok(if s.depth() % 2 == 0 { value.neg() } else { value })
}

/// a = Π_ℓ Π_j (v(t)^{s_ℓ1+…+s_ℓj} - 1) over the unmerged triples of s, checked to push
/// every v_ℓ and v_s into the open unit ball.
pub fn choose_a(table: &CarlitzTable, s: &Index, place: &Place) -> Result<TPoly> {
    let bundle = assemble(table, s)?;
    choose_a_for(&bundle, place)
}

fn choose_a_for(bundle: &CoproductBundle, place: &Place) -> Result<TPoly> {
    let field = bundle.field();
    let a = bundle
        .members()
        .iter()
        .fold(TPoly::one(field), |acc, m| &acc * &multiplier_factor(place, &m.triple.index));
    for (l, m) in bundle.members().iter().enumerate() {
        if !pushes_into_unit_ball(&m.module, &a, &m.point, place)? {
            return Err(Error::Internal(format!("[a]v_{} is not in the open unit ball", l + 1)));
        }
    }
    if !pushes_into_unit_ball(bundle.module(), &a, bundle.point(), place)? {
        return Err(Error::Internal("[a]v_s is not in the open unit ball".into()));
    }
    Ok(a)
}

/// Γ_s and its valuation, which costs that much precision on division.
fn gamma_at(table: &CarlitzTable, s: &Index, place: &Place) -> Result<(ThetaPoly, i64)> {
    let gamma = table.gamma_index(s)?;
    let e = place.valuation(&gamma).expect("Γ_s is nonzero") as i64;
    Ok((gamma, e))
}

/// ζ_A(s)_v = (1/Γ_s) Σ_ℓ b_ℓ(θ)(-1)^{dep(s_ℓ)-1} Li*_{s_ℓ}(u_ℓ)_v to v^prec, over the
/// unmerged triples.
pub fn zeta_v(table: &CarlitzTable, s: &Index, place: &Place, prec: i64) -> Result<VAdic> {
    zeta_v_from_triples(table, s, &star_triples(table, s)?, place, prec)
}

/// ζ_A(s)_v from a given triple family; merged and unmerged families must agree.
pub fn zeta_v_from_triples(
    table: &CarlitzTable,
    s: &Index,
    triples: &[StarTriple],
    place: &Place,
    prec: i64,
) -> Result<VAdic> {
    let (gamma, loss) = gamma_at(table, s, place)?;
    let working = prec + loss;
    let terms = triples
        .par_iter()
        .map(|t| {
            let star = cmspl_star_v(&t.index, &t.u, place, working)?;
            let term = star.mul_poly(&t.b_at_theta());
            Ok(if t.star_sign_is_negative() { term.neg() } else { term })
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = terms.iter().fold(VAdic::exact_zero(place), |acc, x| acc.add(x)).truncate_abs(working);
    Ok(sum.div_poly(&gamma)?.truncate_abs(prec))
}

/// ζ_A(s)_v = (coordinate n of log_{G_s}([a]v_s)) / (a(θ) Γ_s) to v^prec.
pub fn zeta_v_via_g(table: &CarlitzTable, s: &Index, place: &Place, prec: i64) -> Result<VAdic> {
    let bundle = assemble(table, s)?;
    let a = choose_a_for(&bundle, place)?;
    zeta_v_via_g_with(table, &bundle, place, prec, &a)
}

/// The same through a caller-chosen multiplier.
pub fn zeta_v_via_g_with(table: &CarlitzTable, bundle: &CoproductBundle, place: &Place, prec: i64, a: &TPoly) -> Result<VAdic> {
    let (gamma, loss) = gamma_at(table, bundle.index(), place)?;
    let working = prec + loss;
    let value = tractable_log(bundle.module(), bundle.point(), a, place, working)?;
    Ok(value.div_poly(&gamma)?.truncate_abs(prec))
}

/// a·(v(t)^k - 1), another valid multiplier whenever a is one.
pub fn extend_multiplier(place: &Place, a: &TPoly, k: u64) -> TPoly {
    let v_t: TPoly = place.poly().retag();
    let one = TPoly::one(place.field());
    a * &(&v_t.pow(k) - &one)
}

/// a(θ) mod v = (-1)^{number of factors}; returned for reporting.
pub fn multiplier_residue(place: &Place, a: &TPoly) -> Result<Fe> {
    Ok(a.retag::<Theta>().rem(place.poly())?.coeff(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::merge_triples;
    use crate::field::Field;
    use crate::polylog::cmspl_v_series;

    fn setup(q: u32) -> (CarlitzTable, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (CarlitzTable::new(&f), move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    fn place(p: &dyn Fn(&str) -> ThetaPoly, src: &str) -> Place {
        Place::new(&p(src)).unwrap()
    }

    #[test]
    fn one_three_multiplier() {
        let (table, p) = setup(2);
        let f = table.field().clone();
        let v = place(&p, "theta");
        let a = choose_a(&table, &idx(&[1, 3]), &v).unwrap();
        let t4 = TPoly::parse(&f, "t^4 + 1").unwrap();
        let t1 = TPoly::parse(&f, "t + 1").unwrap();
        let expected = t4.pow(2).mul_ref(&t4.mul_ref(&t1).pow(2));
        assert_eq!(a, expected);
        assert_eq!(multiplier_residue(&v, &a).unwrap(), Fe::ONE);
    }

    #[test]
    fn multiplier_is_a_unit_with_sign_parity() {
        let (table, p) = setup(3);
        let f = table.field().clone();
        for (s, src) in [(&[2][..], "theta"), (&[1, 2], "theta + 1"), (&[2, 1, 1], "theta^2 + 1")] {
            let v = place(&p, src);
            let s = idx(s);
            let factor = multiplier_factor(&v, &s);
            let sign = if s.depth() % 2 == 1 { f.neg(Fe::ONE) } else { Fe::ONE };
            assert_eq!(multiplier_residue(&v, &factor).unwrap(), sign);
            let a = choose_a(&table, &s, &v).unwrap();
            assert_eq!(v.valuation(&a.retag::<Theta>()), Some(0));
        }
    }

    #[test]
    fn star_value_matches_series_inside_the_ball() {
        let (table, p) = setup(3);
        let v = place(&p, "theta");
        let cases: [(&[u32], &[&str]); 3] = [
            (&[1], &["theta"]),
            (&[2, 1], &["theta^2 + theta", "2*theta"]),
            (&[1, 1, 2], &["theta", "theta^2", "theta"]),
        ];
        for (s, u) in cases {
            let s = idx(s);
            let u: Vec<ThetaPoly> = u.iter().map(|x| p(x)).collect();
            let via_log = cmspl_star_v(&s, &u, &v, 8).unwrap();
            let series = cmspl_v_series(&table, &s, &u, &v, 8).unwrap();
            assert!(via_log.agrees_to(&series, 8), "{s}: {via_log} vs {series}");
        }
    }

    #[test]
    fn star_value_is_independent_of_the_multiplier() {
        let (_, p) = setup(2);
        for src in ["theta", "theta + 1", "theta^2 + theta + 1"] {
            let v = place(&p, src);
            let s = idx(&[1, 2]);
            let u = [p("1"), p("theta")];
            let a = multiplier_factor(&v, &s);
            let first = cmspl_star_v_with(&s, &u, &v, 6, &a).unwrap();
            let second = cmspl_star_v_with(&s, &u, &v, 6, &extend_multiplier(&v, &a, 1)).unwrap();
            assert!(first.agrees_to(&second, 6));
        }
    }

    #[test]
    fn a_multiplier_that_misses_the_ball_is_rejected() {
        let (_, p) = setup(2);
        let v = place(&p, "theta");
        let one = TPoly::one(v.field());
        let err = cmspl_star_v_with(&idx(&[2]), &[p("1")], &v, 6, &one).unwrap_err();
        assert!(matches!(err, Error::Internal(_)));
    }

    #[test]
    fn goss_vanishing() {
        let (table2, p2) = setup(2);
        for n in 1..=4 {
            for src in ["theta", "theta + 1"] {
                let z = zeta_v(&table2, &idx(&[n]), &place(&p2, src), 8).unwrap();
                assert!(z.is_small(8), "q=2 n={n} v={src}: {z}");
            }
        }
        let (table3, p3) = setup(3);
        let v = place(&p3, "theta");
        assert!(zeta_v(&table3, &idx(&[2]), &v, 8).unwrap().is_small(8));
        let odd = zeta_v(&table3, &idx(&[1]), &v, 8).unwrap();
        assert!(!odd.is_small(8));
        assert_eq!(odd.abs_prec(), 8);
    }

    #[test]
    fn two_paths_agree() {
        let (table, p) = setup(2);
        let v = place(&p, "theta");
        for s in [&[1, 3][..], &[1, 2], &[2, 1], &[1, 1, 2]] {
            let s = idx(s);
            let direct = zeta_v(&table, &s, &v, 6).unwrap();
            let via_g = zeta_v_via_g(&table, &s, &v, 6).unwrap();
            assert!(direct.agrees_to(&via_g, 6), "{s}: {direct} vs {via_g}");
        }
    }

    #[test]
    fn bundle_path_is_independent_of_the_multiplier() {
        let (table, p) = setup(3);
        let v = place(&p, "theta");
        let bundle = assemble(&table, &idx(&[1, 2])).unwrap();
        let a = choose_a(&table, &idx(&[1, 2]), &v).unwrap();
        let first = zeta_v_via_g_with(&table, &bundle, &v, 6, &a).unwrap();
        let second = zeta_v_via_g_with(&table, &bundle, &v, 6, &extend_multiplier(&v, &a, 2)).unwrap();
        assert!(first.agrees_to(&second, 6));
    }

    #[test]
    fn merged_triples_give_the_same_value() {
        let (table, p) = setup(3);
        let v = place(&p, "theta + 1");
        let s = idx(&[1, 2]);
        let merged = merge_triples(&star_triples(&table, &s).unwrap());
        let a = zeta_v(&table, &s, &v, 6).unwrap();
        let b = zeta_v_from_triples(&table, &s, &merged, &v, 6).unwrap();
        assert!(a.agrees_to(&b, 6));
    }

    #[test]
    fn v_adic_log_is_tractable() {
        let (_, p) = setup(3);
        let v = place(&p, "theta");
        let (g, point) = build_g(&idx(&[2, 1]), &[p("theta"), p("1")]).unwrap();
        let a = multiplier_factor(&v, &idx(&[1, 2]));
        let extra = TPoly::parse(v.field(), "t^2 + 2").unwrap();
        let both = &a * &extra;
        let log_a = g.log_v(&v, 6, scaled_point(&g, &a, &point, &v)).unwrap();
        let log_both = g.log_v(&v, 6, scaled_point(&g, &both, &point, &v)).unwrap();
        let n = g.head();
        assert!(log_both[n - 1].agrees_to(&log_a[n - 1].mul_poly(&extra.retag::<Theta>()), 6));
    }
}
