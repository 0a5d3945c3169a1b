//! The fiber coproduct G_s of the family {G_ℓ} over their shared C^{⊗n} head, the
//! morphism π: ⊕G_ℓ → G_s, and the logarithmic vector Z_s whose n-th coordinate is
//! Γ_s ζ_A(s).
//!
//! Tails are laid out in triple order. G_s is assembled by block surgery on the
//! members' matrices; the tests certify it through the morphism identity for π.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carlitz::CarlitzTable;
use crate::decomp::{star_triples, StarTriple};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::index::Index;
use crate::inf::InfAdic;
use crate::matrix::{Mat, TwistedMatrix};
use crate::poly::ThetaPoly;
use crate::scalar::{InfCtx, Scalars};
use crate::tmodule::{build_g, dual_motive_matrix, Layout, MotiveCoeff, MotiveEntry, TModule};

/// Terms allowed in the exponential check on G_s.
pub const EXP_TERM_BUDGET: usize = 64;
/// Absolute precision q^{-EXP_CHECK_PREC} of the check exp_{G_s}(Z_s) = v_s.
pub const EXP_CHECK_PREC: i64 = 10;

/// One triple with its module G_ℓ (built from the reversed index and point) and v_ℓ.
#[derive(Clone, Debug)]
pub struct Member {
    pub triple: StarTriple,
    pub module: TModule,
    pub point: Vec<ThetaPoly>,
}

impl Member {
    /// h_ℓ = dim G_ℓ - n.
    pub fn tail(&self) -> usize {
        self.module.dim() - self.module.head()
    }
}

#[derive(Clone, Debug)]
pub struct CoproductBundle {
    index: Index,
    members: Vec<Member>,
    module: TModule,
    point: Vec<ThetaPoly>,
}

/// G_s and v_s from the unmerged triple family of s.
pub fn assemble(table: &CarlitzTable, s: &Index) -> Result<CoproductBundle> {
    assemble_from(s, star_triples(table, s)?)
}

/// G_s and v_s from a given triple family, e.g. a merged one.
pub fn assemble_from(s: &Index, triples: Vec<StarTriple>) -> Result<CoproductBundle> {
    let n = s.weight() as usize;
    if triples.is_empty() {
        return Err(Error::Assembly(format!("index {s} has no triples")));
    }
    let members = triples
        .into_iter()
        .map(|triple| {
            let reversed_u: Vec<ThetaPoly> = triple.u.iter().rev().cloned().collect();
            let (module, point) = build_g(&triple.index.reversed(), &reversed_u)?;
            Ok(Member { triple, module, point })
        })
        .collect::<Result<Vec<_>>>()?;
    let field = members[0].module.field().clone();
    let head = members[0].module.rho_t().clone();
    let head_block = |m: &TwistedMatrix, k: usize| Mat::from_fn(n, n, |r, c| m.coeff(k).get(r, c).clone());
    for (l, member) in members.iter().enumerate() {
        let rho = member.module.rho_t();
        if member.module.head() != n {
            return Err(Error::Assembly(format!(
                "triple {} has weight {} but s has weight {n}",
                l + 1,
                member.module.head()
            )));
        }
        if (0..2).any(|k| head_block(rho, k) != head_block(&head, k)) {
            return Err(Error::Assembly(format!("triple {} has a different head block", l + 1)));
        }
        let leaks = (0..2).any(|k| {
            let m = rho.coeff(k);
            (n..member.module.dim()).any(|r| (0..n).any(|c| !m.get(r, c).is_zero()))
        });
        if leaks {
            return Err(Error::Assembly(format!("triple {} has a nonzero tail-to-head block", l + 1)));
        }
    }
    let tails: Vec<usize> = members.iter().map(Member::tail).filter(|&h| h > 0).collect();
    let dim = n + tails.iter().sum::<usize>();
    let mut coeffs = vec![Mat::filled(dim, dim, ThetaPoly::zero(&field)); 2];
    for (k, target) in coeffs.iter_mut().enumerate() {
        let source = head.coeff(k);
        for r in 0..n {
            for c in 0..n {
                target.set(r, c, source.get(r, c).clone());
            }
        }
    }
    let mut offset = n;
    for member in members.iter().filter(|m| m.tail() > 0) {
        let h = member.tail();
        for (k, target) in coeffs.iter_mut().enumerate() {
            let source = member.module.rho_t().coeff(k);
            for r in 0..n + h {
                let row = if r < n { r } else { offset + r - n };
                for c in n..n + h {
                    target.set(row, offset + c - n, source.get(r, c).clone());
                }
            }
        }
        offset += h;
    }
    let rho_t = TwistedMatrix::new(&field, dim, dim, coeffs);
    let module = TModule::new(rho_t, Layout::Coproduct { head: n, tails }, None)?;
    let mut bundle = CoproductBundle { index: s.clone(), members, module, point: Vec::new() };
    let scaled = bundle
        .members
        .iter()
        .map(|m| m.module.act(&m.triple.b, &m.point, None))
        .collect::<Result<Vec<_>>>()?;
    bundle.point = bundle.pi_map(&scaled)?;
    Ok(bundle)
}

impl CoproductBundle {
    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn field(&self) -> &Field {
        self.module.field()
    }

    /// n = wt(s).
    pub fn weight(&self) -> usize {
        self.module.head()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    /// G_s.
    pub fn module(&self) -> &TModule {
        &self.module
    }

    /// v_s = π(([b_ℓ(t)] v_ℓ)_ℓ).
    pub fn point(&self) -> &[ThetaPoly] {
        &self.point
    }

    fn glue<T: Clone>(&self, parts: &[Vec<T>], zero: T, add: impl Fn(&T, &T) -> T) -> Result<Vec<T>> {
        if parts.len() != self.members.len() {
            return Err(Error::Dimension(format!("{} parts for {} members", parts.len(), self.members.len())));
        }
        let n = self.weight();
        let mut out = vec![zero; n];
        for (l, (part, member)) in parts.iter().zip(&self.members).enumerate() {
            if part.len() != member.module.dim() {
                return Err(Error::Dimension(format!(
                    "part {} has {} coordinates, G_{} has dimension {}",
                    l + 1,
                    part.len(),
                    l + 1,
                    member.module.dim()
                )));
            }
            for (slot, x) in out.iter_mut().zip(part) {
                *slot = add(slot, x);
            }
        }
        for part in parts {
            out.extend_from_slice(&part[n..]);
        }
        Ok(out)
    }

    /// π(z_1, …, z_T) = (Σ ẑ_ℓ, z_{1-}, …, z_{T-}) with ẑ the first n coordinates and z_-
    /// the tail.
    pub fn pi_map(&self, points: &[Vec<ThetaPoly>]) -> Result<Vec<ThetaPoly>> {
        self.glue(points, ThetaPoly::zero(self.field()), |a, b| a + b)
    }

    /// ∂π, which has the same shape as π.
    pub fn d_pi<S: Scalars>(&self, ctx: &S, vectors: &[Vec<S::Elem>]) -> Result<Vec<S::Elem>> {
        self.glue(vectors, ctx.zero(), |a, b| ctx.add(a, b))
    }

    /// Z_s = ∂π((∂[b_ℓ(t)] Z_ℓ)_ℓ) with Z_ℓ = log_{G_ℓ}(v_ℓ), to q^{-prec}, plus the checks
    /// that its n-th coordinate is Γ_s ζ_A(s) and that exp_{G_s} recovers v_s.
    pub fn zeta_log_vector(&self, table: &CarlitzTable, prec: i64) -> Result<ZetaLogVector> {
        let field = self.field().clone();
        let n = self.weight();
        let per_member = self
            .members
            .par_iter()
            .map(|m| {
                let b_deg = m.triple.b.deg_i64().max(0);
                let z = m.module.log_inf(&m.point, prec + b_deg)?;
                let lie = m.module.d_rho(&m.triple.b);
                let scaled = lie_apply(&lie, &z)?;
                Ok((z, scaled))
            })
            .collect::<Result<Vec<_>>>()?;
        let ctx = InfCtx::new(&field, 0);
        let (logs, scaled): (Vec<_>, Vec<_>) = per_member.into_iter().unzip();
        let vector: Vec<InfAdic> = self.d_pi(&ctx, &scaled)?.into_iter().map(|z| z.truncate_abs(-prec)).collect();

        let additive = self
            .members
            .iter()
            .zip(&logs)
            .map(|(m, z)| z[n - 1].mul_poly(&m.triple.b_at_theta()))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .fold(InfAdic::exact_zero(&field), |acc, x| acc.add(x));
        let additivity_residual = additive.sub(&vector[n - 1]).truncate_abs(-prec);

        let gamma = table.gamma_index(&self.index)?;
        let direct = table.zeta_direct(&self.index, prec + gamma.deg_i64())?.mul_poly(&gamma)?;
        let coordinate_residual = direct.sub(&vector[n - 1]).truncate_abs(-prec);

        let exp = self.module.exp_inf(&vector, EXP_CHECK_PREC, EXP_TERM_BUDGET);
        let (exp_residual, exp_terms) = match exp {
            Ok(sum) => {
                let worst = sum
                    .value
                    .iter()
                    .zip(&self.point)
                    .map(|(x, v)| x.sub(&InfAdic::from_poly_abs(v, -EXP_CHECK_PREC)).truncate_abs(-EXP_CHECK_PREC))
                    .max_by_key(|r| r.top().unwrap_or(i64::MIN))
                    .expect("nonempty");
                (Some(worst), sum.terms)
            }
            Err(Error::Precision(_)) => (None, EXP_TERM_BUDGET),
            Err(e) => return Err(e),
        };
        Ok(ZetaLogVector {
            vector,
            member_logs: logs,
            report: ZetaLogReport {
                prec,
                coordinate_residual: coordinate_residual.top(),
                additivity_residual: additivity_residual.top(),
                exp_prec: EXP_CHECK_PREC,
                exp_residual: exp_residual.as_ref().map(InfAdic::top),
                exp_terms,
            },
        })
    }

    /// Φ = (B; D_ℓ, Φ''_ℓ) over the members of depth at least two: B = (t-θ)^n, D_ℓ the
    /// column below the head of Φ′_ℓ, Φ''_ℓ its lower-right block.
    pub fn motive_matrix(&self) -> Result<Mat<Option<MotiveEntry>>> {
        let n = self.weight() as u32;
        let blocks = self
            .members
            .iter()
            .filter(|m| m.triple.depth() > 1)
            .map(|m| {
                let reversed_u: Vec<ThetaPoly> = m.triple.u.iter().rev().cloned().collect();
                dual_motive_matrix(&m.triple.index.reversed(), &reversed_u)
            })
            .collect::<Result<Vec<_>>>()?;
        let size = 1 + blocks.iter().map(|b| b.rows() - 1).sum::<usize>();
        let mut out = Mat::filled(size, size, None);
        out.set(0, 0, Some(MotiveEntry { coeff: MotiveCoeff::One, power: n }));
        let mut offset = 1;
        for block in &blocks {
            let h = block.rows() - 1;
            for r in 0..h {
                out.set(offset + r, 0, block.get(r + 1, 0).clone());
                for c in 0..h {
                    out.set(offset + r, offset + c, block.get(r + 1, c + 1).clone());
                }
            }
            offset += h;
        }
        Ok(out)
    }
}

/// ∂ρ applied to an ∞-adic vector with exact polynomial products.
fn lie_apply(m: &Mat<ThetaPoly>, z: &[InfAdic]) -> Result<Vec<InfAdic>> {
    let field = z.first().map(|x| x.field().clone()).ok_or_else(|| Error::Dimension("empty vector".into()))?;
    (0..m.rows())
        .map(|r| {
            let mut acc = InfAdic::exact_zero(&field);
            for (c, x) in z.iter().enumerate() {
                let p = m.get(r, c);
                if !p.is_zero() {
                    acc = acc.add(&x.mul_poly(p)?);
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Φ for s, assembled from the unmerged triples.
pub fn coproduct_motive_matrix(table: &CarlitzTable, s: &Index) -> Result<Mat<Option<MotiveEntry>>> {
    assemble(table, s)?.motive_matrix()
}

#[derive(Clone, Debug)]
pub struct ZetaLogVector {
    /// Z_s.
    pub vector: Vec<InfAdic>,
    /// Z_ℓ = log_{G_ℓ}(v_ℓ) per member.
    pub member_logs: Vec<Vec<InfAdic>>,
    pub report: ZetaLogReport,
}

/// Residual sizes as log_q of the top digit; None means zero to the stated precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaLogReport {
    pub prec: i64,
    /// Γ_s ζ_A(s) from the direct sum minus the n-th coordinate of Z_s.
    pub coordinate_residual: Option<i64>,
    /// Σ_ℓ b_ℓ(θ)(Z_ℓ)_n minus (Z_s)_n.
    pub additivity_residual: Option<i64>,
    pub exp_prec: i64,
    /// Largest entry of exp_{G_s}(Z_s) - v_s, or None inside None when the term budget ran out.
    pub exp_residual: Option<Option<i64>>,
    pub exp_terms: usize,
}

impl ZetaLogReport {
    pub fn coordinate_ok(&self) -> bool {
        self.coordinate_residual.is_none()
    }

    pub fn additivity_ok(&self) -> bool {
        self.additivity_residual.is_none()
    }

    pub fn exp_ok(&self) -> bool {
        matches!(self.exp_residual, Some(None))
    }

    pub fn passed(&self) -> bool {
        self.coordinate_ok() && self.additivity_ok() && self.exp_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::merge_triples;
    use crate::poly::TPoly;
    use crate::polylog::cmspl_inf;
    use proptest::prelude::*;

    fn setup(q: u32) -> (CarlitzTable, impl Fn(&str) -> ThetaPoly) {
        let f = Field::prime(q).unwrap();
        let g = f.clone();
        (CarlitzTable::new(&f), move |s: &str| ThetaPoly::parse(&g, s).unwrap())
    }

    fn idx(v: &[u32]) -> Index {
        Index::new(v.to_vec()).unwrap()
    }

    fn entry(m: &TwistedMatrix, r: usize, c: usize) -> Vec<(usize, String)> {
        m.entry_terms(r - 1, c - 1).into_iter().map(|(k, p)| (k, p.to_string())).collect()
    }

    fn nonzero(m: &TwistedMatrix) -> Vec<(usize, usize)> {
        let d = m.rows();
        (1..=d).flat_map(|r| (1..=d).map(move |c| (r, c))).filter(|&(r, c)| !m.entry_terms(r - 1, c - 1).is_empty()).collect()
    }

    #[test]
    fn one_three_coproduct_layout() {
        let (table, p) = setup(2);
        let bundle = assemble(&table, &idx(&[1, 3])).unwrap();
        let rho = bundle.module().rho_t();
        assert_eq!(bundle.module().dim(), 6);
        assert_eq!(bundle.members().iter().map(Member::tail).collect::<Vec<_>>(), vec![0, 0, 1, 1]);
        let tau = |c: &str| vec![(1, c.to_string())];
        assert_eq!(entry(rho, 4, 1), tau("1"));
        assert_eq!(entry(rho, 4, 5), tau("theta^2"));
        assert_eq!(entry(rho, 4, 6), tau("1"));
        let tail = vec![(0, "theta".to_string()), (1, "1".to_string())];
        assert_eq!(entry(rho, 5, 5), tail);
        assert_eq!(entry(rho, 6, 6), tail);
        let mut expected: Vec<(usize, usize)> = (1..=6).map(|k| (k, k)).collect();
        expected.extend([(1, 2), (2, 3), (3, 4), (4, 1), (4, 5), (4, 6)]);
        expected.sort();
        assert_eq!(nonzero(rho), expected);
        assert_eq!(bundle.point(), &[p("0"), p("0"), p("0"), p("1"), p("1"), p("theta + 1")]);
    }

    #[test]
    fn one_one_two_coproduct_layout() {
        let (table, p) = setup(2);
        let bundle = assemble(&table, &idx(&[1, 1, 2])).unwrap();
        let rho = bundle.module().rho_t();
        assert_eq!(bundle.module().dim(), 10);
        let tau = vec![(1, "1".to_string())];
        for c in [1, 5, 6, 8, 10] {
            assert_eq!(entry(rho, 4, c), tau, "row 4, column {c}");
        }
        for c in [2, 3, 7, 9] {
            assert!(entry(rho, 4, c).is_empty());
        }
        let tail = vec![(0, "theta".to_string()), (1, "1".to_string())];
        for k in [5, 10] {
            assert_eq!(entry(rho, k, k), tail);
        }
        for k in [6, 7, 8, 9] {
            assert_eq!(entry(rho, k, k), vec![(0, "theta".to_string())]);
        }
        assert_eq!(entry(rho, 6, 7), vec![(0, "1".to_string())]);
        assert_eq!(entry(rho, 7, 6), tau);
        assert_eq!(entry(rho, 9, 10), tau);
        assert_eq!(entry(rho, 9, 8), tau);
        let v: Vec<ThetaPoly> = ["0", "0", "0", "0", "1", "0", "1", "0", "1", "1"].iter().map(|s| p(s)).collect();
        assert_eq!(bundle.point(), v.as_slice());
    }

    #[test]
    fn one_three_pi_of_scaled_points() {
        let (table, p) = setup(2);
        let bundle = assemble(&table, &idx(&[1, 3])).unwrap();
        let f = table.field();
        let t = TPoly::var(f);
        let one = TPoly::one(f);
        assert_eq!(bundle.members().iter().map(|m| m.triple.b.clone()).collect::<Vec<_>>(), vec![one.clone(), t.clone(), one, t]);
        let parts: Vec<Vec<ThetaPoly>> =
            bundle.members().iter().map(|m| m.module.act(&m.triple.b, &m.point, None).unwrap()).collect();
        assert_eq!(parts[1], vec![p("0"), p("0"), p("1"), p("theta")]);
        assert_eq!(bundle.pi_map(&parts).unwrap(), bundle.point());
        let zeros: Vec<Vec<ThetaPoly>> = bundle.members().iter().map(|m| vec![p("0"); m.module.dim()]).collect();
        assert!(bundle.pi_map(&zeros).unwrap().iter().all(ThetaPoly::is_zero));
        assert!(matches!(bundle.pi_map(&zeros[1..]), Err(Error::Dimension(_))));
    }

    #[test]
    fn depth_one_coproduct_is_the_tensor_power() {
        let (table, _) = setup(3);
        let bundle = assemble(&table, &idx(&[5])).unwrap();
        let c5 = crate::tmodule::carlitz_tensor(table.field(), 5).unwrap();
        assert_eq!(bundle.module().rho_t(), c5.rho_t());
        let sum = bundle
            .members()
            .iter()
            .map(|m| m.module.act(&m.triple.b, &m.point, None).unwrap())
            .fold(vec![ThetaPoly::zero(table.field()); 5], |acc, x| acc.iter().zip(&x).map(|(a, b)| a + b).collect());
        assert_eq!(bundle.point(), sum.as_slice());
    }

    #[test]
    fn motive_matrix_blocks() {
        let (table, p) = setup(2);
        let f = table.field().clone();
        let phi = coproduct_motive_matrix(&table, &idx(&[1, 3])).unwrap();
        assert_eq!(phi.rows(), 3);
        let power = |r: usize, c: usize| phi.get(r, c).as_ref().map(|e| e.power);
        assert_eq!(power(0, 0), Some(4));
        assert_eq!(power(1, 1), Some(1));
        assert_eq!(power(2, 2), Some(1));
        assert_eq!(phi.get(1, 0).as_ref().unwrap().coeff, MotiveCoeff::Poly(p("theta")));
        assert_eq!(phi.get(2, 0).as_ref().unwrap().coeff, MotiveCoeff::One);
        for r in 0..3 {
            for c in r + 1..3 {
                assert!(phi.get(r, c).is_none());
            }
        }
        assert!(phi.get(2, 1).is_none() && phi.get(1, 2).is_none());
        let single = coproduct_motive_matrix(&table, &idx(&[3])).unwrap();
        assert_eq!(single.rows(), 1);
        assert_eq!(single.get(0, 0).as_ref().unwrap().to_bipoly(&f).unwrap(), crate::bipoly::BiPoly::t_minus_theta_pow(&f, 3));
    }

    #[test]
    fn one_three_zeta_vector() {
        let (table, p) = setup(2);
        let bundle = assemble(&table, &idx(&[1, 3])).unwrap();
        let z = bundle.zeta_log_vector(&table, 20).unwrap();
        assert!(z.report.passed(), "{:?}", z.report);
        let zeta = table.zeta_direct(&idx(&[1, 3]), 25).unwrap().mul_poly(&p("theta^2 + theta")).unwrap();
        assert!(z.vector[3].agrees_to(&zeta, 20));
    }

    #[test]
    fn one_one_two_zeta_vector_tails() {
        let (table, p) = setup(2);
        let bundle = assemble(&table, &idx(&[1, 1, 2])).unwrap();
        let z = bundle.zeta_log_vector(&table, 20).unwrap();
        assert!(z.report.passed(), "{:?}", z.report);
        let star = |s: &[u32]| cmspl_inf(&table, &idx(s), &vec![p("1"); s.len()], 20).unwrap();
        assert!(z.vector[4].agrees_to(&star(&[1]), 20));
        assert!(z.vector[6].agrees_to(&star(&[2]), 20));
        assert!(z.vector[9].agrees_to(&star(&[1]), 20));
    }

    #[test]
    fn zeta_vector_at_q3() {
        let (table, _) = setup(3);
        for s in [&[3][..], &[1, 2], &[2, 1, 1]] {
            let bundle = assemble(&table, &idx(s)).unwrap();
            let z = bundle.zeta_log_vector(&table, 20).unwrap();
            assert!(z.report.passed(), "{s:?}: {:?}", z.report);
        }
    }

    #[test]
    fn merged_family_gives_the_same_coordinate() {
        let (table, _) = setup(3);
        let s = idx(&[1, 2]);
        let unmerged = assemble(&table, &s).unwrap().zeta_log_vector(&table, 20).unwrap();
        let merged = assemble_from(&s, merge_triples(&star_triples(&table, &s).unwrap())).unwrap();
        let z = merged.zeta_log_vector(&table, 20).unwrap();
        assert!(z.report.coordinate_ok());
        assert!(z.vector[2].agrees_to(&unmerged.vector[2], 20));
    }

    #[test]
    fn mismatched_weight_is_an_assembly_error() {
        let (table, _) = setup(2);
        let mut triples = star_triples(&table, &idx(&[1, 2])).unwrap();
        triples.extend(star_triples(&table, &idx(&[2, 2])).unwrap());
        assert!(matches!(assemble_from(&idx(&[1, 2]), triples), Err(Error::Assembly(_))));
    }

    fn poly_strategy(q: u32, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(0..q, 0..=max_len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn pi_is_a_morphism(
            a in poly_strategy(3, 4),
            seeds in prop::collection::vec(poly_strategy(3, 4), 40),
            which in 0usize..3,
        ) {
            let (table, _) = setup(3);
            let s = [idx(&[1, 2]), idx(&[2, 1, 1]), idx(&[1, 3])][which].clone();
            let f = table.field().clone();
            let bundle = assemble(&table, &s).unwrap();
            let a = TPoly::from_codes(&f, &a).unwrap();
            let mut seeds = seeds.into_iter().cycle();
            let points: Vec<Vec<ThetaPoly>> = bundle
                .members()
                .iter()
                .map(|m| (0..m.module.dim()).map(|_| ThetaPoly::from_codes(&f, &seeds.next().unwrap()).unwrap()).collect())
                .collect();
            let lhs = bundle.module().act(&a, &bundle.pi_map(&points).unwrap(), None).unwrap();
            let acted: Vec<Vec<ThetaPoly>> =
                bundle.members().iter().zip(&points).map(|(m, x)| m.module.act(&a, x, None).unwrap()).collect();
            prop_assert_eq!(lhs, bundle.pi_map(&acted).unwrap());
        }

        #[test]
        fn tractable_coordinate_of_the_coproduct(
            a in poly_strategy(2, 5),
            z in prop::collection::vec(poly_strategy(2, 3), 10),
        ) {
            let (table, _) = setup(2);
            let f = table.field().clone();
            let bundle = assemble(&table, &idx(&[1, 1, 2])).unwrap();
            let a = TPoly::from_codes(&f, &a).unwrap();
            let z: Vec<ThetaPoly> = z.iter().map(|c| ThetaPoly::from_codes(&f, c).unwrap()).collect();
            let lie = bundle.module().d_rho(&a);
            let n = bundle.weight();
            let coord = (0..z.len()).fold(ThetaPoly::zero(&f), |acc, c| &acc + &(lie.get(n - 1, c) * &z[c]));
            prop_assert_eq!(coord, &a.retag::<crate::poly::Theta>() * &z[n - 1]);
        }
    }

    #[test]
    fn coproduct_entries_stay_in_a() {
        let (table, _) = setup(3);
        let bundle = assemble(&table, &idx(&[1, 1, 2])).unwrap();
        let rho = bundle.module().rho_t();
        assert!(rho.tau_degree() == Some(1));
        let lie = rho.coeff(0);
        for (r, c, e) in lie.entries() {
            if r != c {
                assert!(e.is_constant());
            }
        }
    }
}
