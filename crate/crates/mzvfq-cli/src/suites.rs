use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use mzvfq::coproduct::assemble;
use mzvfq::decomp::{at_points, gamma_zeta_via_cmpl, merge_triples, star_triples};
use mzvfq::polylog::{cmpl_inf, cmspl_inf, star_expansion};
use mzvfq::vadic_mzv::{choose_a, extend_multiplier, zeta_v, zeta_v_from_triples, zeta_v_via_g, zeta_v_via_g_with};
use mzvfq::{CarlitzTable, Index, InfAdic, Place, ThetaPoly, VAdic};

use crate::commands::{FieldArgs, Outcome};
use crate::error::CliResult;
use crate::golden::example_checks;

/// v-adic precision for the vanishing checks at n divisible by q - 1.
const VANISHING_PREC: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Γ_s ζ_A(s) by direct summation against Σ_j a_j(θ) Li_s(u_j).
    Chang,
    /// Li_s(u) against its signed expansion in star polylogarithms.
    InclExcl,
    /// Coordinate n of log_{G_ℓ}(v_ℓ) against (-1)^{dep-1} Li*_{s_ℓ}(u_ℓ) for every triple.
    Logli,
    /// Coordinate n of Z_s against Γ_s ζ_A(s), additivity, and exp_{G_s}(Z_s) = v_s.
    Coproduct,
    /// Vanishing at n divisible by q - 1, the two v-adic routes, and multiplier independence.
    Vadic,
    /// The worked coproducts (1,3) and (1,1,2) entry by entry.
    Examples,
}

impl Suite {
    fn default_weight(self) -> u32 {
        match self {
            Suite::Chang | Suite::InclExcl => 6,
            Suite::Logli | Suite::Coproduct => 5,
            Suite::Vadic | Suite::Examples => 4,
        }
    }

    fn default_prec(self) -> i64 {
        match self {
            Suite::Chang | Suite::InclExcl => 25,
            Suite::Logli | Suite::Coproduct | Suite::Examples => 20,
            Suite::Vadic => 6,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub weight_max: Option<u32>,
    #[arg(long, default_value_t = 3)]
    pub depth_max: usize,
    /// q^{-prec} at ∞ or v^prec at v; each suite has its own default.
    #[arg(long)]
    pub prec: Option<i64>,
    /// Place for the two-route and multiplier checks of the vadic suite.
    #[arg(long, default_value = "theta")]
    pub v_poly: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Exact,
    Infinity,
    VAdic,
}

/// One verified claim. `residual` is log_q of the difference at ∞, or its valuation at v,
/// and is None when the difference vanishes to the stated precision.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub residual: Option<i64>,
    pub prec: Option<i64>,
    pub error: Option<String>,
}

impl Check {
    pub fn exact(name: String, passed: bool) -> Check {
        Check { name, kind: CheckKind::Exact, passed, residual: None, prec: None, error: None }
    }

    pub fn error(name: String, e: &mzvfq::Error) -> Check {
        Check { name, kind: CheckKind::Exact, passed: false, residual: None, prec: None, error: Some(e.to_string()) }
    }

    /// |a - b|_∞ < q^{-prec}.
    pub fn infinity(name: String, a: &InfAdic, b: &InfAdic, prec: i64) -> Check {
        let diff = a.sub(b);
        Check {
            name,
            kind: CheckKind::Infinity,
            passed: diff.is_small(prec),
            residual: diff.truncate_abs(-prec).top(),
            prec: Some(prec),
            error: None,
        }
    }

    /// v^prec divides a - b.
    pub fn v_adic(name: String, a: &VAdic, b: &VAdic, prec: i64) -> Check {
        Self::v_zero(name, &a.sub(b), prec)
    }

    pub fn v_zero(name: String, x: &VAdic, prec: i64) -> Check {
        Check {
            name,
            kind: CheckKind::VAdic,
            passed: x.is_small(prec),
            residual: x.truncate_abs(prec).val(),
            prec: Some(prec),
            error: None,
        }
    }

    fn from_result(name: String, result: mzvfq::Result<Check>) -> Check {
        result.unwrap_or_else(|e| Check::error(name, &e))
    }
}

fn points_text(u: &[ThetaPoly]) -> String {
    u.iter().map(ThetaPoly::to_string).collect::<Vec<_>>().join(", ")
}

fn chang(table: &CarlitzTable, s: &Index, prec: i64) -> Vec<Check> {
    let name = format!("{s} direct vs Anderson-Thakur points");
    vec![Check::from_result(name.clone(), (|| {
        let gamma = table.gamma_index(s)?;
        let direct = table.zeta_direct(s, prec + gamma.deg_i64())?.mul_poly(&gamma)?;
        Ok(Check::infinity(name, &direct, &gamma_zeta_via_cmpl(table, s, prec)?, prec))
    })())]
}

fn incl_excl(table: &CarlitzTable, s: &Index, prec: i64) -> Vec<Check> {
    let points = match at_points(table, s) {
        Ok(p) => p.points,
        Err(e) => return vec![Check::error(format!("{s} points"), &e)],
    };
    points
        .iter()
        .map(|p| {
            let name = format!("{s} at ({})", points_text(&p.u));
            Check::from_result(name.clone(), (|| {
                let mut sum = InfAdic::exact_zero(table.field());
                for (negative, index, point) in star_expansion(s, &p.u)? {
                    let term = cmspl_inf(table, &index, &point, prec)?;
                    sum = if negative { sum.sub(&term) } else { sum.add(&term) };
                }
                Ok(Check::infinity(name, &cmpl_inf(table, s, &p.u, prec)?, &sum, prec))
            })())
        })
        .collect()
}

fn logli(table: &CarlitzTable, s: &Index, prec: i64) -> Vec<Check> {
    let bundle = match assemble(table, s) {
        Ok(b) => b,
        Err(e) => return vec![Check::error(format!("{s} assembly"), &e)],
    };
    let n = bundle.weight();
    bundle
        .members()
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let t = &m.triple;
            let name = format!("{s} triple {}: Li*_{}({})", k + 1, t.index, points_text(&t.u));
            Check::from_result(name.clone(), (|| {
                let log = m.module.log_inf(&m.point, prec)?;
                let star = cmspl_inf(table, &t.index, &t.u, prec)?;
                let expected = if t.star_sign_is_negative() { star.neg() } else { star };
                Ok(Check::infinity(name, &log[n - 1], &expected, prec))
            })())
        })
        .collect()
}

fn coproduct(table: &CarlitzTable, s: &Index, prec: i64) -> Vec<Check> {
    let result = assemble(table, s).and_then(|b| b.zeta_log_vector(table, prec));
    let report = match result {
        Ok(z) => z.report,
        Err(e) => return vec![Check::error(format!("{s} logarithmic vector"), &e)],
    };
    let inf = |name: String, passed: bool, residual: Option<i64>, prec: i64, error: Option<String>| Check {
        name,
        kind: CheckKind::Infinity,
        passed,
        residual,
        prec: Some(prec),
        error,
    };
    let budget = report.exp_residual.is_none().then(|| format!("exp term budget of {} exhausted", report.exp_terms));
    vec![
        inf(format!("{s} coordinate n of Z_s"), report.coordinate_ok(), report.coordinate_residual, prec, None),
        inf(format!("{s} additivity"), report.additivity_ok(), report.additivity_residual, prec, None),
        inf(format!("{s} exp(Z_s) = v_s"), report.exp_ok(), report.exp_residual.flatten(), report.exp_prec, budget),
    ]
}

fn vadic(table: &CarlitzTable, s: &Index, place: &Place, prec: i64) -> Vec<Check> {
    let v = place.poly();
    let two_routes = format!("{s} at {v}: triples vs coproduct");
    let merged = format!("{s} at {v}: merged vs unmerged triples");
    let multiplier = format!("{s} at {v}: multiplier independence");
    let base = zeta_v(table, s, place, prec);
    let mut checks = vec![
        Check::from_result(two_routes.clone(), (|| {
            Ok(Check::v_adic(two_routes, base.as_ref().map_err(Clone::clone)?, &zeta_v_via_g(table, s, place, prec)?, prec))
        })()),
        Check::from_result(merged.clone(), (|| {
            let list = merge_triples(&star_triples(table, s)?);
            let value = zeta_v_from_triples(table, s, &list, place, prec)?;
            Ok(Check::v_adic(merged, base.as_ref().map_err(Clone::clone)?, &value, prec))
        })()),
    ];
    checks.push(Check::from_result(multiplier.clone(), (|| {
        let bundle = assemble(table, s)?;
        let a = choose_a(table, s, place)?;
        let wider = extend_multiplier(place, &a, s.weight() as u64 + 1);
        let first = zeta_v_via_g_with(table, &bundle, place, prec, &a)?;
        let second = zeta_v_via_g_with(table, &bundle, place, prec, &wider)?;
        Ok(Check::v_adic(multiplier, &first, &second, prec))
    })()));
    checks
}

/// ζ_A(n)_v for (q - 1) | n at the small places of each q.
fn vanishing(table: &CarlitzTable, weight_max: u32) -> Vec<Check> {
    let field = table.field();
    let q = field.q();
    let places: Vec<Place> = ["theta", "theta + 1", "theta^2 + theta + 1"]
        .iter()
        .filter_map(|src| Place::parse(field, src).ok())
        .collect();
    let cases: Vec<(u32, &Place)> = (1..=weight_max)
        .filter(|n| n % (q - 1) == 0)
        .flat_map(|n| places.iter().map(move |p| (n, p)))
        .collect();
    cases
        .par_iter()
        .map(|&(n, place)| {
            let name = format!("({n}) at {}: vanishes", place.poly());
            Check::from_result(name.clone(), (|| {
                let s = Index::new(vec![n])?;
                Ok(Check::v_zero(name, &zeta_v(table, &s, place, VANISHING_PREC)?, VANISHING_PREC))
            })())
        })
        .collect()
}

pub fn verify(args: &VerifyArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let suite = args.suite;
    let weight_max = args.weight_max.unwrap_or(suite.default_weight());
    let prec = args.prec.unwrap_or(suite.default_prec());
    let indices = Index::all_up_to(weight_max, args.depth_max);
    let per_index = |f: &(dyn Fn(&Index) -> Vec<Check> + Sync)| -> Vec<Check> {
        indices.par_iter().map(f).collect::<Vec<_>>().into_iter().flatten().collect()
    };
    let checks: Vec<Check> = match suite {
        Suite::Chang => per_index(&|s| chang(&table, s, prec)),
        Suite::InclExcl => per_index(&|s| incl_excl(&table, s, prec)),
        Suite::Logli => per_index(&|s| logli(&table, s, prec)),
        Suite::Coproduct => per_index(&|s| coproduct(&table, s, prec)),
        Suite::Vadic => {
            let place = Place::parse(table.field(), &args.v_poly)?;
            let mut out = vanishing(&table, weight_max);
            out.extend(per_index(&|s| vadic(&table, s, &place, prec)));
            out
        }
        Suite::Examples => example_checks(&table),
    };
    let failed = checks.iter().filter(|c| !c.passed).count();
    let passed = failed == 0 && !checks.is_empty();
    Ok(Outcome {
        body: crate::commands::Body::Json(json!({
            "suite": suite,
            "q": table.field().q(),
            "scope": {
                "weight_max": weight_max,
                "depth_max": args.depth_max,
                "prec": prec,
            },
            "passed": passed,
            "total": checks.len(),
            "failed": failed,
            "checks": checks,
        })),
        passed,
    })
}
