//! Hand-transcribed data of the two worked coproducts, (1,3) at q = 2 and (1,1,2) at
//! every q, checked entry by entry.

use serde::Deserialize;

use mzvfq::coproduct::assemble;
use mzvfq::decomp::star_triples;
use mzvfq::polylog::cmspl_inf;
use mzvfq::{CarlitzTable, Field, Index, InfAdic, Mat, TPoly, ThetaPoly, TwistedMatrix};

use crate::suites::Check;

const GOLDEN_SOURCE: &str = include_str!("../goldens/worked_examples.json");

/// Absolute ∞-adic precision for the logarithmic coordinates.
const COORDINATE_PREC: i64 = 20;

#[derive(Debug, Deserialize)]
struct GoldenFile {
    examples: Vec<Example>,
}

#[derive(Debug, Deserialize)]
struct Example {
    /// None when the data holds for every q.
    q: Option<u32>,
    index: Vec<u32>,
    gamma: String,
    triples: Vec<GoldenTriple>,
    members: Vec<GoldenModule>,
    coproduct: GoldenModule,
}

#[derive(Debug, Deserialize)]
struct GoldenTriple {
    b: String,
    s: Vec<u32>,
    u: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct GoldenModule {
    dim: usize,
    /// Nonzero terms (row, column, τ-degree, coefficient), 1-based.
    rho_t: Vec<(usize, usize, usize, String)>,
    v: Vec<String>,
    /// [t]v when recorded.
    #[serde(default)]
    t_v: Option<Vec<String>>,
    z: Vec<GoldenCoordinate>,
}

/// A coordinate of a logarithmic vector: Γ_s ζ_A(s), or sign·coeff·Li*_s(u).
#[derive(Debug, Deserialize)]
struct GoldenCoordinate {
    coordinate: usize,
    #[serde(default)]
    gamma_zeta: bool,
    #[serde(default)]
    sign: i64,
    #[serde(default)]
    coeff: Option<String>,
    #[serde(default)]
    s: Vec<u32>,
    #[serde(default)]
    u: Vec<String>,
}

fn theta(field: &Field, src: &str) -> mzvfq::Result<ThetaPoly> {
    ThetaPoly::parse(field, src)
}

fn thetas(field: &Field, srcs: &[String]) -> mzvfq::Result<Vec<ThetaPoly>> {
    srcs.iter().map(|s| theta(field, s)).collect()
}

fn twisted(field: &Field, dim: usize, terms: &[(usize, usize, usize, String)]) -> mzvfq::Result<TwistedMatrix> {
    let top = terms.iter().map(|t| t.2).max().unwrap_or(0);
    let mut coeffs = vec![Mat::filled(dim, dim, ThetaPoly::zero(field)); top + 1];
    for (r, c, k, p) in terms {
        let entry = coeffs[*k].get(r - 1, c - 1).add_ref(&theta(field, p)?);
        coeffs[*k].set(r - 1, c - 1, entry);
    }
    Ok(TwistedMatrix::new(field, dim, dim, coeffs))
}

impl GoldenCoordinate {
    fn expected(&self, table: &CarlitzTable, s: &Index) -> mzvfq::Result<InfAdic> {
        let field = table.field();
        if self.gamma_zeta {
            let gamma = table.gamma_index(s)?;
            return table.zeta_direct(s, COORDINATE_PREC + gamma.deg_i64())?.mul_poly(&gamma);
        }
        let coeff = theta(field, self.coeff.as_deref().unwrap_or("1"))?;
        let star = cmspl_inf(table, &Index::new(self.s.clone())?, &thetas(field, &self.u)?, COORDINATE_PREC + coeff.deg_i64())?;
        let value = star.mul_poly(&coeff)?;
        Ok(if self.sign < 0 { value.neg() } else { value })
    }
}

fn exact(name: String, result: mzvfq::Result<bool>) -> Check {
    match result {
        Ok(passed) => Check::exact(name, passed),
        Err(e) => Check::error(name, &e),
    }
}

/// Checks of every example that applies to F_q.
pub fn example_checks(table: &CarlitzTable) -> Vec<Check> {
    let file: GoldenFile = serde_json::from_str(GOLDEN_SOURCE).expect("the embedded golden file is valid");
    let q = table.field().q();
    file.examples
        .iter()
        .filter(|ex| ex.q.is_none_or(|g| g == q))
        .flat_map(|ex| check_example(table, ex))
        .collect()
}

fn check_example(table: &CarlitzTable, ex: &Example) -> Vec<Check> {
    let field = table.field().clone();
    let s = Index::new(ex.index.clone()).expect("golden indices are valid");
    let tag = format!("{s}");
    let mut checks = vec![exact(format!("{tag} gamma"), theta(&field, &ex.gamma).and_then(|g| Ok(g == table.gamma_index(&s)?)))];

    checks.push(exact(
        format!("{tag} triples"),
        star_triples(table, &s).and_then(|computed| {
            let mut same = computed.len() == ex.triples.len();
            for (t, g) in computed.iter().zip(&ex.triples) {
                same &= t.b == TPoly::parse(&field, &g.b)?
                    && t.index.entries() == g.s.as_slice()
                    && t.u == thetas(&field, &g.u)?;
            }
            Ok(same)
        }),
    ));

    let bundle = match assemble(table, &s) {
        Ok(b) => b,
        Err(e) => {
            checks.push(Check::error(format!("{tag} assembly"), &e));
            return checks;
        }
    };
    let logs = bundle.zeta_log_vector(table, COORDINATE_PREC);
    let t = TPoly::var(&field);

    let modules = bundle
        .members()
        .iter()
        .enumerate()
        .map(|(k, m)| (format!("{tag} G_{}", k + 1), &m.module, m.point.as_slice(), logs.as_ref().map(|z| &z.member_logs[k])))
        .chain(std::iter::once((format!("{tag} G_s"), bundle.module(), bundle.point(), logs.as_ref().map(|z| &z.vector))));
    let goldens = ex.members.iter().chain(std::iter::once(&ex.coproduct));
    if bundle.members().len() != ex.members.len() {
        checks.push(Check::exact(format!("{tag} member count"), false));
        return checks;
    }
    for ((name, module, point, log), golden) in modules.zip(goldens) {
        checks.push(exact(
            format!("{name} rho_t"),
            twisted(&field, golden.dim, &golden.rho_t).map(|m| module.dim() == golden.dim && &m == module.rho_t()),
        ));
        checks.push(exact(format!("{name} v"), thetas(&field, &golden.v).map(|v| v == point)));
        if let Some(t_v) = &golden.t_v {
            checks.push(exact(
                format!("{name} [t]v"),
                thetas(&field, t_v).and_then(|expected| Ok(module.act(&t, point, None)? == expected)),
            ));
        }
        for coord in &golden.z {
            let label = format!("{name} Z coordinate {}", coord.coordinate);
            let check = match log {
                Err(e) => Check::error(label, e),
                Ok(z) => match coord.expected(table, &s) {
                    Ok(expected) => Check::infinity(label, &z[coord.coordinate - 1], &expected, COORDINATE_PREC),
                    Err(e) => Check::error(label, &e),
                },
            };
            checks.push(check);
        }
    }
    checks
}
