//! Linear relations among MZVs of one weight: discovery from ∞-adic digits and transfer
//! to a finite place.
//!
//! A candidate relation Σ c_i ζ_A(s_i) = 0 with c_i ∈ A of degree at most D is an
//! F_q-linear condition on the coefficients of the c_i, one equation per digit of the
//! sum, so the candidates at a given digit count form the kernel of an F_q-matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carlitz::CarlitzTable;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::index::Index;
use crate::inf::InfAdic;
use crate::poly::ThetaPoly;
use crate::vadic::{Place, VAdic};
use crate::vadic_mzv::zeta_v;

/// Σ c_i ζ_A(s_i) with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(ThetaPoly, Index)>,
}

impl Relation {
    /// Rejects empty relations and mixed weights.
    pub fn new(terms: Vec<(ThetaPoly, Index)>) -> Result<Relation> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Invalid("a relation needs at least one term".into()));
        };
        let w = first.weight();
        if let Some((_, s)) = terms.iter().find(|(_, s)| s.weight() != w) {
            return Err(Error::Invalid(format!("weight mismatch: {s} has weight {}, expected {w}", s.weight())));
        }
        Ok(Relation { terms })
    }

    /// Σ c_i/d_i ζ_A(s_i) with the denominators cleared; vanishing is unaffected.
    pub fn from_fractions(terms: Vec<(ThetaPoly, ThetaPoly, Index)>) -> Result<Relation> {
        if terms.iter().any(|(_, d, _)| d.is_zero()) {
            return Err(Error::DivisionByZero);
        }
        let common = terms.iter().fold(None::<ThetaPoly>, |acc, (_, d, _)| {
            Some(match acc {
                None => d.clone(),
                Some(l) => {
                    let g = l.gcd(d);
                    (&l * d).div_exact(&g).expect("gcd divides")
                }
            })
        });
        let Some(common) = common else {
            return Relation::new(Vec::new());
        };
        let cleared = terms
            .into_iter()
            .map(|(n, d, s)| Ok((&n * &common.div_exact(&d)?, s)))
            .collect::<Result<Vec<_>>>()?;
        Relation::new(cleared)
    }

    pub fn weight(&self) -> u32 {
        self.terms[0].1.weight()
    }

    /// At least one nonzero coefficient.
    pub fn is_nontrivial(&self) -> bool {
        self.terms.iter().any(|(c, _)| !c.is_zero())
    }

    /// Largest coefficient degree, or None for the zero relation.
    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(c, _)| c.degree()).max()
    }

    /// Σ c_i ζ_A(s_i) at ∞ to q^{-prec}.
    pub fn inf_residual(&self, table: &CarlitzTable, prec: i64) -> Result<InfAdic> {
        let field = table.field();
        let values = self
            .terms
            .par_iter()
            .map(|(c, s)| table.zeta_direct(s, prec + c.deg_i64().max(0))?.mul_poly(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(values.iter().fold(InfAdic::exact_zero(field), |acc, x| acc.add(x)).truncate_abs(-prec))
    }

    /// Σ c_i ζ_A(s_i)_v to v^prec.
    pub fn v_residual(&self, table: &CarlitzTable, place: &Place, prec: i64) -> Result<VAdic> {
        let values = self
            .terms
            .par_iter()
            .map(|(c, s)| Ok(zeta_v(table, s, place, prec)?.mul_poly(c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(values.iter().fold(VAdic::exact_zero(place), |acc, x| acc.add(x)).truncate_abs(prec))
    }

    pub fn to_json(&self) -> RelationJson {
        RelationJson {
            terms: self.terms.iter().map(|(c, s)| (c.to_string(), s.entries().to_vec())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    /// (coefficient, index) pairs.
    pub terms: Vec<(String, Vec<u32>)>,
}

impl RelationJson {
    pub fn parse(&self, field: &Field) -> Result<Relation> {
        let terms = self
            .terms
            .iter()
            .map(|(c, s)| Ok((ThetaPoly::parse(field, c)?, Index::new(s.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Relation::new(terms)
    }
}

/// Outcome of checking one relation at ∞ and at v.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub inf_prec: i64,
    /// log_q of the top digit of the ∞-adic residual; None when it vanishes to q^{-inf_prec}.
    pub inf_residual: Option<i64>,
    pub v_prec: i64,
    /// Valuation of the v-adic residual; None when it vanishes to v^{v_prec}.
    pub v_residual: Option<i64>,
}

impl RelationReport {
    pub fn holds_at_infinity(&self) -> bool {
        self.inf_residual.is_none()
    }

    pub fn holds_at_v(&self) -> bool {
        self.v_residual.is_none()
    }
}

/// Both residuals of a relation.
pub fn relation_check(table: &CarlitzTable, relation: &Relation, place: &Place, inf_prec: i64, v_prec: i64) -> Result<RelationReport> {
    let inf = relation.inf_residual(table, inf_prec)?;
    let v = relation.v_residual(table, place, v_prec)?;
    Ok(RelationReport { inf_prec, inf_residual: inf.top(), v_prec, v_residual: v.val() })
}

/// An F_q-basis of {(c_i) : deg c_i <= degree, Σ c_i ζ_A(s_i) ≡ 0 mod q^{-digits}}.
pub fn discover(table: &CarlitzTable, indices: &[Index], degree: usize, digits: i64) -> Result<Vec<Relation>> {
    let field = table.field();
    if let Some(first) = indices.first() {
        if let Some(s) = indices.iter().find(|s| s.weight() != first.weight()) {
            return Err(Error::Invalid(format!("weight mismatch: {s} against {first}")));
        }
    }
    let values = indices
        .par_iter()
        .map(|s| table.zeta_direct(s, digits + degree as i64))
        .collect::<Result<Vec<_>>>()?;
    let top = values.iter().filter_map(InfAdic::top).max().unwrap_or(0) + degree as i64;
    // Column (i, k) holds the digits of θ^k ζ_A(s_i) at positions top, …, -digits.
    let columns: Vec<Vec<Fe>> = values
        .iter()
        .flat_map(|z| {
            (0..=degree).map(move |k| {
                (-digits..=top).rev().map(|d| z.coeff(d - k as i64).unwrap_or(Fe::ZERO)).collect()
            })
        })
        .collect();
    let kernel = nullspace(field, &columns);
    let relations = kernel
        .into_iter()
        .map(|vector| {
            let terms = indices
                .iter()
                .enumerate()
                .map(|(i, s)| (ThetaPoly::new(field, vector[i * (degree + 1)..(i + 1) * (degree + 1)].to_vec()), s.clone()))
                .collect();
            Relation::new(terms)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(relations)
}

/// Basis of {x : Σ_j x_j columns[j] = 0} over F_q, by reduction to row echelon form.
fn nullspace(field: &Field, columns: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let cols = columns.len();
    let rows = columns.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Fe>> = (0..rows).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = field.inv(m[row][col]).expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col];
                for c in 0..cols {
                    let sub = field.mul(factor, m[row][c]);
                    m[r][c] = field.sub(m[r][c], sub);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Fe::ZERO; cols];
            x[free] = Fe::ONE;
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = field.neg(m[r][free]);
            }
            x
        })
        .collect()
}

/// A relation found on `digits` digits, confirmed on `confirm_digits`, then checked at v.
#[derive(Clone, Debug)]
pub struct Transfer {
    pub relation: Relation,
    pub candidates: usize,
    pub confirmed: usize,
    pub report: RelationReport,
}

/// Searches for a nontrivial relation among `indices` with coefficient degree at most
/// `degree`: the kernel on `digits` digits is recomputed on `confirm_digits` digits, and
/// the lowest-degree surviving relation is checked at v to v^v_prec.
pub fn find_transfer(
    table: &CarlitzTable,
    indices: &[Index],
    degree: usize,
    digits: i64,
    confirm_digits: i64,
    place: &Place,
    v_prec: i64,
) -> Result<Option<Transfer>> {
    let candidates = discover(table, indices, degree, digits)?;
    if candidates.is_empty() {
        return Ok(None);
    }
    let confirmed = discover(table, indices, degree, confirm_digits)?;
    let Some(relation) = confirmed.iter().filter(|r| r.is_nontrivial()).min_by_key(|r| r.degree()).cloned() else {
        return Ok(None);
    };
    let report = relation_check(table, &relation, place, confirm_digits, v_prec)?;
    Ok(Some(Transfer { relation, candidates: candidates.len(), confirmed: confirmed.len(), report }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u32) -> (CarlitzTable, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (CarlitzTable::new(&f), move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    #[test]
    fn nullspace_of_a_small_system() {
        let f = Field::prime(3).unwrap();
        let e = |n| f.from_int(n);
        // Columns (1,1), (2,2), (0,1): x_1 + 2x_2 = 0 and x_1 + 2x_2 + x_3 = 0.
        let columns = vec![vec![e(1), e(1)], vec![e(2), e(2)], vec![e(0), e(1)]];
        let kernel = nullspace(&f, &columns);
        assert_eq!(kernel, vec![vec![e(1), e(1), e(0)]]);
    }

    #[test]
    fn trivial_relation_holds_everywhere() {
        let (table, p) = setup(3);
        let v = Place::new(&p("theta")).unwrap();
        let r = Relation::new(vec![(p("1"), idx(&[3])), (p("2"), idx(&[3]))]).unwrap();
        let report = relation_check(&table, &r, &v, 30, 6).unwrap();
        assert!(report.holds_at_infinity() && report.holds_at_v());
    }

    #[test]
    fn weight_mismatch_is_rejected() {
        let (table, p) = setup(2);
        assert!(Relation::new(vec![(p("1"), idx(&[3])), (p("1"), idx(&[1, 1]))]).is_err());
        assert!(discover(&table, &[idx(&[3]), idx(&[2])], 1, 10).is_err());
    }

    #[test]
    fn fractions_are_cleared() {
        let (_, p) = setup(3);
        let r = Relation::from_fractions(vec![(p("1"), p("theta"), idx(&[2])), (p("1"), p("theta + 1"), idx(&[1, 1]))]).unwrap();
        assert_eq!(r.terms[0].0, p("theta + 1"));
        assert_eq!(r.terms[1].0, p("theta"));
    }

    #[test]
    fn weight_three_relation_at_q2() {
        let (table, p) = setup(2);
        let v = Place::new(&p("theta")).unwrap();
        let indices = [idx(&[3]), idx(&[1, 2])];
        let found = find_transfer(&table, &indices, 2, 30, 60, &v, 6).unwrap().expect("a relation");
        assert_eq!(found.relation.terms[0].0, p("1"));
        assert_eq!(found.relation.terms[1].0, p("theta^2 + theta"));
        assert!(found.report.holds_at_infinity());
        assert!(found.report.holds_at_v());
    }

    #[test]
    fn eulerian_kernel_witness() {
        let (table, p) = setup(3);
        let v = Place::new(&p("theta")).unwrap();
        let r = Relation::new(vec![(p("1"), idx(&[2]))]).unwrap();
        let report = relation_check(&table, &r, &v, 30, 6).unwrap();
        assert!(!report.holds_at_infinity());
        assert!(report.holds_at_v());
    }

    #[test]
    fn json_round_trip() {
        let (table, p) = setup(3);
        let r = Relation::new(vec![(p("theta^2 + 2"), idx(&[1, 2])), (p("1"), idx(&[3]))]).unwrap();
        let json = serde_json::to_string(&r.to_json()).unwrap();
        let back: RelationJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.parse(table.field()).unwrap(), r);
    }
}
