//! Γ_s ζ_A(s) as an A-combination of Li_s at Anderson–Thakur points, and as an
//! A-combination of Li* through the word calculus.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carlitz::CarlitzTable;
use crate::error::Result;
use crate::field::{Fe, Field};
use crate::index::{Index, Word};
use crate::inf::InfAdic;
use crate::poly::{TPoly, ThetaPoly};
use crate::polylog::{cmpl_inf, cmspl_inf};

/// One j ∈ J_s with u_j = (u_{1 j_1}, …, u_{r j_r}) and a_j = t^{j_1 + … + j_r}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtPoint {
    pub j: Vec<usize>,
    pub u: Vec<ThetaPoly>,
    pub a: TPoly,
}

/// The Anderson–Thakur data of an index: H_{s_i - 1} = Σ_j u_{ij} t^j.
#[derive(Clone, Debug)]
pub struct AtPointSet {
    pub index: Index,
    /// m_i = deg_t H_{s_i - 1}.
    pub m: Vec<usize>,
    /// J_s in lexicographic order, j_1 most significant.
    pub points: Vec<AtPoint>,
}

pub fn at_points(table: &CarlitzTable, s: &Index) -> Result<AtPointSet> {
    let field = table.field();
    let coeffs: Vec<Vec<ThetaPoly>> = s
        .entries()
        .iter()
        .map(|&k| Ok(table.anderson_thakur(k - 1)?.t_coeffs().to_vec()))
        .collect::<Result<_>>()?;
    let m: Vec<usize> = coeffs.iter().map(|c| c.len() - 1).collect();
    let mut points = Vec::new();
    let mut j = vec![0usize; s.depth()];
    loop {
        let u = j.iter().zip(&coeffs).map(|(&ji, c)| c[ji].clone()).collect();
        let a = TPoly::monomial(field, Fe::ONE, j.iter().sum());
        points.push(AtPoint { j: j.clone(), u, a });
        // Odometer with the last coordinate fastest.
        let Some(pos) = (0..j.len()).rev().find(|&i| j[i] < m[i]) else {
            break;
        };
        j[pos] += 1;
        j[pos + 1..].iter_mut().for_each(|x| *x = 0);
    }
    Ok(AtPointSet { index: s.clone(), m, points })
}

/// (b_ℓ, s_ℓ, u_ℓ) with b_ℓ kept in F_q[t]; it acts as [b_ℓ(t)] on t-modules and as
/// b_ℓ(θ) on Lie coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarTriple {
    pub b: TPoly,
    pub index: Index,
    pub u: Vec<ThetaPoly>,
    /// The Anderson–Thakur point and the word this triple came from.
    pub j: Vec<usize>,
    pub word: Word,
}

impl StarTriple {
    pub fn depth(&self) -> usize {
        self.index.depth()
    }

    pub fn b_at_theta(&self) -> ThetaPoly {
        self.b.retag()
    }

    /// (-1)^{dep(s_ℓ) - 1}.
    pub fn star_sign_is_negative(&self) -> bool {
        self.depth() % 2 == 0
    }
}

/// The triples {((-1)^{r-1} a_j, P(s), P^×(u_j))}, one per (j, P), unmerged.
///
/// Order: depth-one triples first; within each part by j ascending, then by word code
/// descending. This reproduces the worked layouts for (1,3) and (1,1,2), where (1,3)
/// (code 2) precedes (2,2) (code 1) and (1,1,2) (code 0).
pub fn star_triples(table: &CarlitzTable, s: &Index) -> Result<Vec<StarTriple>> {
    let points = at_points(table, s)?;
    let field = table.field();
    let sign = if s.depth() % 2 == 0 { field.neg(Fe::ONE) } else { Fe::ONE };
    let mut triples = Vec::new();
    for point in &points.points {
        for word in Word::all(s.depth()).into_iter().rev() {
            triples.push(StarTriple {
                b: point.a.scale(sign),
                index: word.apply_index(s)?,
                u: word.apply_point(&point.u, |x, y| x * y)?,
                j: point.j.clone(),
                word,
            });
        }
    }
    // Stable: keeps (j ascending, code descending) inside each part.
    triples.sort_by_key(|t| t.depth() != 1);
    Ok(triples)
}

/// Sums b_ℓ over identical (s_ℓ, u_ℓ), keeping first-occurrence order and dropping zero b.
pub fn merge_triples(triples: &[StarTriple]) -> Vec<StarTriple> {
    let mut out: Vec<StarTriple> = Vec::new();
    for t in triples {
        match out.iter_mut().find(|m| m.index == t.index && m.u == t.u) {
            Some(m) => m.b = &m.b + &t.b,
            None => out.push(t.clone()),
        }
    }
    out.retain(|t| !t.b.is_zero());
    out
}

/// Σ_j a_j(θ) Li_s(u_j), which equals Γ_s ζ_A(s), to absolute precision q^{-prec}.
pub fn gamma_zeta_via_cmpl(table: &CarlitzTable, s: &Index, prec: i64) -> Result<InfAdic> {
    let points = at_points(table, s)?;
    let terms = points
        .points
        .par_iter()
        .map(|p| {
            let a = p.a.retag::<crate::poly::Theta>();
            let li = cmpl_inf(table, s, &p.u, prec + a.deg_i64())?;
            li.mul_poly(&a)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(table.field(), prec, terms))
}

/// Σ_ℓ b_ℓ(θ) (-1)^{dep(s_ℓ)-1} Li*_{s_ℓ}(u_ℓ) over the given triples, to q^{-prec}.
pub fn gamma_zeta_via_triples(table: &CarlitzTable, triples: &[StarTriple], prec: i64) -> Result<InfAdic> {
    let field = table.field();
    let terms = triples
        .par_iter()
        .map(|t| {
            let b = t.b_at_theta();
            let li = cmspl_inf(table, &t.index, &t.u, prec + b.deg_i64().max(0))?;
            let term = li.mul_poly(&b)?;
            Ok(if t.star_sign_is_negative() { term.neg() } else { term })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sum(field, prec, terms))
}

/// Γ_s ζ_A(s) through the unmerged star triples.
pub fn gamma_zeta_via_cmspl(table: &CarlitzTable, s: &Index, prec: i64) -> Result<InfAdic> {
    gamma_zeta_via_triples(table, &star_triples(table, s)?, prec)
}

fn sum(field: &Field, prec: i64, terms: Vec<InfAdic>) -> InfAdic {
    terms.iter().fold(InfAdic::zero(field, -prec), |acc, x| acc.add(x)).truncate_abs(-prec)
}

/// ζ_A(s) = (1/Γ_s) Σ_j a_j(θ) Li_s(u_j) to q^{-prec}.
pub fn zeta_via_cmpl(table: &CarlitzTable, s: &Index, prec: i64) -> Result<InfAdic> {
    let gamma = table.gamma_index(s)?;
    let value = gamma_zeta_via_cmpl(table, s, prec.saturating_sub(gamma.deg_i64()))?;
    Ok(value.div_poly(&gamma)?.truncate_abs(-prec))
}

/// ζ_A(s) = (1/Γ_s) Σ_ℓ b_ℓ(θ) (-1)^{dep(s_ℓ)-1} Li*_{s_ℓ}(u_ℓ) to q^{-prec}.
pub fn zeta_via_cmspl(table: &CarlitzTable, s: &Index, prec: i64) -> Result<InfAdic> {
    let gamma = table.gamma_index(s)?;
    let value = gamma_zeta_via_cmspl(table, s, prec.saturating_sub(gamma.deg_i64()))?;
    Ok(value.div_poly(&gamma)?.truncate_abs(-prec))
}

/// Serialized triple: b as a t-polynomial, s as integers, u as θ-polynomials, all
/// coefficient arrays little-endian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleJson {
    pub b: Vec<u32>,
    pub s: Vec<u32>,
    pub u: Vec<Vec<u32>>,
}

impl From<&StarTriple> for TripleJson {
    fn from(t: &StarTriple) -> Self {
        TripleJson { b: t.b.codes(), s: t.index.entries().to_vec(), u: t.u.iter().map(ThetaPoly::codes).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polylog::in_domain;

    fn setup(q: u32) -> (CarlitzTable, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (CarlitzTable::new(&f), move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    fn tp(f: &Field, s: &str) -> TPoly {
        TPoly::parse(f, s).unwrap()
    }

    #[test]
    fn at_points_examples() {
        let (table, p) = setup(2);
        let set = at_points(&table, &idx(&[1, 3])).unwrap();
        assert_eq!(set.m, vec![0, 1]);
        let js: Vec<Vec<usize>> = set.points.iter().map(|x| x.j.clone()).collect();
        assert_eq!(js, vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(set.points[0].u, vec![p("1"), p("theta^2")]);
        assert_eq!(set.points[1].u, vec![p("1"), p("1")]);
        assert!(set.points[0].a.is_one());
        assert_eq!(set.points[1].a, tp(table.field(), "t"));
        for q in [2, 3, 5] {
            let (table, p) = setup(q);
            let set = at_points(&table, &idx(&[1, 1, 2])).unwrap();
            if q > 2 {
                assert_eq!(set.points.len(), 1);
                assert_eq!(set.points[0].u, vec![p("1"); 3]);
            }
            let one = at_points(&table, &idx(&[1])).unwrap();
            assert_eq!(one.points.len(), 1);
            assert_eq!(one.points[0].u, vec![p("1")]);
        }
    }

    #[test]
    fn triples_for_one_three() {
        let (table, p) = setup(2);
        let f = table.field().clone();
        let triples = star_triples(&table, &idx(&[1, 3])).unwrap();
        let got: Vec<(TPoly, Vec<u32>, Vec<ThetaPoly>)> =
            triples.iter().map(|t| (t.b.clone(), t.index.entries().to_vec(), t.u.clone())).collect();
        let expected = vec![
            (tp(&f, "1"), vec![4], vec![p("theta^2")]),
            (tp(&f, "t"), vec![4], vec![p("1")]),
            (tp(&f, "1"), vec![1, 3], vec![p("1"), p("theta^2")]),
            (tp(&f, "t"), vec![1, 3], vec![p("1"), p("1")]),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn triples_for_one_one_two() {
        for q in [2, 3] {
            let (table, p) = setup(q);
            let triples = star_triples(&table, &idx(&[1, 1, 2])).unwrap();
            let got: Vec<(Vec<u32>, Vec<ThetaPoly>)> =
                triples.iter().map(|t| (t.index.entries().to_vec(), t.u.clone())).collect();
            let expected = vec![
                (vec![4], vec![p("1")]),
                (vec![1, 3], vec![p("1"), p("1")]),
                (vec![2, 2], vec![p("1"), p("1")]),
                (vec![1, 1, 2], vec![p("1"), p("1"), p("1")]),
            ];
            assert_eq!(got, expected, "q = {q}");
            // (-1)^{r-1} with r = 3 is +1 in every characteristic.
            assert!(triples.iter().all(|t| t.b.is_one()));
        }
    }

    #[test]
    fn triple_counts_and_domains() {
        for q in [2, 3] {
            let (table, _) = setup(q);
            for s in Index::all_up_to(6, 3) {
                let points = at_points(&table, &s).unwrap();
                let triples = star_triples(&table, &s).unwrap();
                assert_eq!(triples.len(), points.points.len() << (s.depth() - 1));
                let first_deep = triples.iter().position(|t| t.depth() > 1).unwrap_or(triples.len());
                assert!(triples[first_deep..].iter().all(|t| t.depth() > 1));
                for t in &triples {
                    assert_eq!(t.index.weight(), s.weight());
                    let degs: Vec<Option<i64>> = t.u.iter().map(|x| x.degree().map(|d| d as i64)).collect();
                    assert!(in_domain(q, &t.index, &degs, true), "{s} -> {:?}", t.index);
                }
                for point in &points.points {
                    let degs: Vec<Option<i64>> = point.u.iter().map(|x| x.degree().map(|d| d as i64)).collect();
                    assert!(in_domain(q, &s, &degs, true));
                }
            }
        }
    }

    #[test]
    fn depth_one_triples_have_positive_sign() {
        let (table, _) = setup(3);
        let s = idx(&[5]);
        let triples = star_triples(&table, &s).unwrap();
        let points = at_points(&table, &s).unwrap();
        assert_eq!(triples.len(), points.points.len());
        for (t, p) in triples.iter().zip(&points.points) {
            assert_eq!(t.b, p.a);
            assert_eq!(t.u, p.u);
        }
    }

    #[test]
    fn merging_preserves_the_sum() {
        let (table, _) = setup(2);
        let s = idx(&[1, 2, 2]);
        let triples = star_triples(&table, &s).unwrap();
        let merged = merge_triples(&triples);
        assert!(merged.len() <= triples.len());
        let a = gamma_zeta_via_triples(&table, &triples, 20).unwrap();
        let b = gamma_zeta_via_triples(&table, &merged, 20).unwrap();
        assert!(a.agrees_to(&b, 20));
    }

    #[test]
    fn both_routes_match_the_direct_sum() {
        for q in [2, 3] {
            let (table, _) = setup(q);
            for s in [idx(&[1]), idx(&[3]), idx(&[1, 3]), idx(&[2, 1]), idx(&[1, 1, 2])] {
                let direct = table.zeta_direct(&s, 20).unwrap();
                let via_li = zeta_via_cmpl(&table, &s, 20).unwrap();
                let via_star = zeta_via_cmspl(&table, &s, 20).unwrap();
                assert!(direct.agrees_to(&via_li, 20), "q={q} {s}: {direct} vs {via_li}");
                assert!(direct.agrees_to(&via_star, 20), "q={q} {s}");
            }
        }
    }
}
