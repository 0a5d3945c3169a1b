use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use serde_json::{json, Value};

use mzvfq::coproduct::{assemble, assemble_from, CoproductBundle};
use mzvfq::decomp::{gamma_zeta_via_triples, merge_triples, star_triples, StarTriple, TripleJson};
use mzvfq::polylog::{cmpl_inf, cmspl_inf, star_expansion};
use mzvfq::relation::{find_transfer, relation_check, RelationJson};
use mzvfq::tmodule::{build_g, dual_motive_matrix, twisted_matrix_json, MotiveEntry, TModule};
use mzvfq::vadic_mzv::{cmspl_star_v, zeta_v, zeta_v_from_triples, zeta_v_via_g};
use mzvfq::{CarlitzTable, ExactK, Field, InfAdic, Index, Mat, Place, Rat, ThetaPoly, VAdic};

use crate::error::{CliError, CliResult};

/// What a command prints, and whether it counts as a pass for the exit code.
pub struct Outcome {
    pub body: Body,
    pub passed: bool,
}

pub enum Body {
    Json(Value),
    Text(String),
}

impl Outcome {
    pub fn json(value: Value) -> Self {
        Outcome { body: Body::Json(value), passed: true }
    }

    pub fn render(&self) -> String {
        match &self.body {
            Body::Json(v) => serde_json::to_string_pretty(v).expect("JSON values always serialize"),
            Body::Text(t) => t.trim_end().to_string(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Field size q, a prime power.
    #[arg(long)]
    pub q: u32,
    /// Primitive modulus in g for q = p^e with e > 1, e.g. "g^2 + g + 1".
    #[arg(long)]
    pub modulus: Option<String>,
}

impl FieldArgs {
    pub fn table(&self) -> CliResult<CarlitzTable> {
        Ok(CarlitzTable::new(&Field::new(self.q, self.modulus.as_deref())?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlaceKind {
    #[value(alias = "inf")]
    Infty,
    V,
}

#[derive(Debug, Clone, Args)]
pub struct PlaceArgs {
    #[arg(long, value_enum, default_value_t = PlaceKind::Infty)]
    pub place: PlaceKind,
    /// Monic irreducible θ-polynomial naming the finite place, e.g. "theta^2+theta+1".
    #[arg(long)]
    pub v_poly: Option<String>,
}

impl PlaceArgs {
    /// None for the infinite place.
    pub fn resolve(&self, field: &Field) -> CliResult<Option<Place>> {
        match (self.place, &self.v_poly) {
            (PlaceKind::Infty, None) => Ok(None),
            (PlaceKind::Infty, Some(_)) => Err(CliError::Usage("--v-poly needs --place v".into())),
            (PlaceKind::V, None) => Err(CliError::Usage("--place v needs --v-poly".into())),
            (PlaceKind::V, Some(src)) => Ok(Some(Place::parse(field, src)?)),
        }
    }
}

pub fn parse_index(src: &str) -> CliResult<Index> {
    Ok(Index::parse(src)?)
}

/// `u1;u2;…` as θ-polynomials.
pub fn parse_point(field: &Field, src: &str) -> CliResult<Vec<ThetaPoly>> {
    src.split(';').map(|part| Ok(ThetaPoly::parse(field, part)?)).collect()
}

pub fn inf_json(x: &InfAdic) -> Value {
    json!({
        "place": "infty",
        "value": x.to_json(),
        "text": x.to_string(),
        "zero_to_precision": x.is_zero_to_precision(),
    })
}

pub fn v_json(x: &VAdic) -> Value {
    json!({
        "place": x.place().poly().to_string(),
        "value": x.to_json(),
        "text": x.to_string(),
        "zero_to_precision": x.is_zero_to_precision(),
    })
}

fn texts(points: &[ThetaPoly]) -> Vec<String> {
    points.iter().map(ThetaPoly::to_string).collect()
}

fn motive_json(m: &Mat<Option<MotiveEntry>>) -> Vec<Vec<Option<String>>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|e| e.as_ref().map(MotiveEntry::to_string)).collect()).collect()
}

fn rat_matrix_json(m: &Mat<Rat>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(Rat::to_string).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecialKind {
    #[value(name = "D")]
    D,
    #[value(name = "L")]
    L,
    #[value(name = "Gamma")]
    Gamma,
    #[value(name = "H")]
    H,
}

#[derive(Debug, Clone, Args)]
pub struct SpecialArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum)]
    pub what: SpecialKind,
    #[arg(long)]
    pub n: u32,
}

pub fn special(args: &SpecialArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let n = args.n;
    let poly_json = |p: ThetaPoly| json!({ "text": p.to_string(), "coeffs": p.codes() });
    let body = match args.what {
        SpecialKind::D => poly_json(table.d(n)?),
        SpecialKind::L => poly_json(table.l(n)?),
        SpecialKind::Gamma => {
            if n == 0 {
                return Err(CliError::Usage("Γ_n is defined for n >= 1".into()));
            }
            poly_json(table.gamma(n)?)
        }
        SpecialKind::H => {
            let h = table.anderson_thakur(n)?;
            json!({
                "text": h.to_string(),
                "t_coeffs": h.t_coeffs().iter().map(ThetaPoly::codes).collect::<Vec<_>>(),
                "theta_norm_degree": h.theta_norm_degree(),
                "norm_bound_holds": table.anderson_thakur_bound_holds(n + 1)?,
            })
        }
    };
    Ok(Outcome::json(json!({ "q": table.field().q(), "what": format!("{:?}", args.what), "n": n, "result": body })))
}

#[derive(Debug, Clone, Args)]
pub struct PolylogArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Index s1,s2,…
    #[arg(long)]
    pub index: String,
    /// Point u1;u2;… of θ-polynomials.
    #[arg(long)]
    pub point: String,
    /// The star (non-strict) polylogarithm.
    #[arg(long)]
    pub star: bool,
    #[command(flatten)]
    pub place: PlaceArgs,
    /// Absolute precision: q^{-prec} at ∞, v^prec at v.
    #[arg(long, default_value_t = 20)]
    pub prec: i64,
}

pub fn polylog(args: &PolylogArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let s = parse_index(&args.index)?;
    let u = parse_point(table.field(), &args.point)?;
    let value = match args.place.resolve(table.field())? {
        None if args.star => inf_json(&cmspl_inf(&table, &s, &u, args.prec)?),
        None => inf_json(&cmpl_inf(&table, &s, &u, args.prec)?),
        Some(place) if args.star => v_json(&cmspl_star_v(&s, &u, &place, args.prec)?),
        Some(place) => {
            // Li_s(u)_v through the signed star expansion.
            let mut acc = VAdic::exact_zero(&place);
            for (negative, index, point) in star_expansion(&s, &u)? {
                let term = cmspl_star_v(&index, &point, &place, args.prec)?;
                acc = if negative { acc.sub(&term) } else { acc.add(&term) };
            }
            v_json(&acc.truncate_abs(args.prec))
        }
    };
    Ok(Outcome::json(json!({
        "q": table.field().q(),
        "index": s.entries(),
        "point": texts(&u),
        "star": args.star,
        "prec": args.prec,
        "result": value,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TripleFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct TriplesArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub index: String,
    #[arg(long, value_enum, default_value_t = TripleFormat::Json)]
    pub format: TripleFormat,
    /// Sum b over identical (s, u) and drop zero coefficients.
    #[arg(long, alias = "merged")]
    pub merge: bool,
}

fn triple_list(table: &CarlitzTable, s: &Index, merge: bool) -> CliResult<Vec<StarTriple>> {
    let triples = star_triples(table, s)?;
    Ok(if merge { merge_triples(&triples) } else { triples })
}

pub fn triples(args: &TriplesArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let s = parse_index(&args.index)?;
    let list = triple_list(&table, &s, args.merge)?;
    let body = match args.format {
        TripleFormat::Json => Body::Json(json!({
            "q": table.field().q(),
            "index": s.entries(),
            "gamma": table.gamma_index(&s)?.to_string(),
            "merged": args.merge,
            "triples": list.iter().map(TripleJson::from).collect::<Vec<_>>(),
        })),
        TripleFormat::Text => {
            let mut out = format!("Gamma_s = {}\n", table.gamma_index(&s)?);
            for t in &list {
                out.push_str(&format!("b = {}; s = {}; u = ({})\n", t.b, t.index, texts(&t.u).join(", ")));
            }
            Body::Text(out)
        }
    };
    Ok(Outcome { body, passed: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModuleEmit {
    #[value(name = "rho_t", alias = "rho-t")]
    RhoT,
    V,
    Phi,
    LogCoeffs,
    ExpCoeffs,
}

#[derive(Debug, Clone, Args)]
pub struct TmoduleArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub index: String,
    /// Point u1;u2;… building G_{s,u}; without it the coproduct G_s is used.
    #[arg(long, alias = "u")]
    pub point_u: Option<String>,
    #[arg(long, value_enum)]
    pub emit: ModuleEmit,
    /// Highest τ-degree for log-coeffs and exp-coeffs.
    #[arg(long, default_value_t = 4)]
    pub tau_degree: usize,
}

fn module_json(module: &TModule, point: &[ThetaPoly], phi: impl FnOnce() -> CliResult<Mat<Option<MotiveEntry>>>, emit: ModuleEmit, tau_degree: usize) -> CliResult<Value> {
    let ctx = || ExactK::new(module.field());
    Ok(match emit {
        ModuleEmit::RhoT => json!({ "dim": module.dim(), "rho_t": twisted_matrix_json(module.rho_t()) }),
        ModuleEmit::V => json!({ "dim": module.dim(), "v": texts(point) }),
        ModuleEmit::Phi => json!({ "phi": motive_json(&phi()?) }),
        ModuleEmit::LogCoeffs => json!({
            "tau_degree": tau_degree,
            "coeffs": module.log_coeffs(&ctx(), tau_degree)?.iter().map(rat_matrix_json).collect::<Vec<_>>(),
        }),
        ModuleEmit::ExpCoeffs => json!({
            "tau_degree": tau_degree,
            "coeffs": module.exp_coeffs(&ctx(), tau_degree)?.iter().map(rat_matrix_json).collect::<Vec<_>>(),
        }),
    })
}

pub fn tmodule(args: &TmoduleArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let s = parse_index(&args.index)?;
    let body = match &args.point_u {
        Some(src) => {
            let u = parse_point(table.field(), src)?;
            let (module, point) = build_g(&s, &u)?;
            module_json(&module, &point, || Ok(dual_motive_matrix(&s, &u)?), args.emit, args.tau_degree)?
        }
        None => {
            let bundle = assemble(&table, &s)?;
            module_json(bundle.module(), bundle.point(), || Ok(bundle.motive_matrix()?), args.emit, args.tau_degree)?
        }
    };
    Ok(Outcome::json(json!({
        "q": table.field().q(),
        "index": s.entries(),
        "point_u": args.point_u,
        "module": body,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoproductEmit {
    #[value(name = "rho_t", alias = "rho-t")]
    RhoT,
    V,
    Phi,
    ZetaVector,
}

#[derive(Debug, Clone, Args)]
pub struct CoproductArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub index: String,
    #[arg(long, value_enum)]
    pub emit: CoproductEmit,
    #[arg(long, default_value_t = 20)]
    pub prec: i64,
    /// Assemble from the merged triple list.
    #[arg(long, alias = "merged")]
    pub merge: bool,
}

fn bundle_for(table: &CarlitzTable, s: &Index, merge: bool) -> CliResult<CoproductBundle> {
    Ok(if merge { assemble_from(s, triple_list(table, s, true)?)? } else { assemble(table, s)? })
}

pub fn coproduct(args: &CoproductArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let s = parse_index(&args.index)?;
    let bundle = bundle_for(&table, &s, args.merge)?;
    let mut passed = true;
    let body = match args.emit {
        CoproductEmit::RhoT => json!({ "dim": bundle.module().dim(), "rho_t": twisted_matrix_json(bundle.module().rho_t()) }),
        CoproductEmit::V => json!({ "dim": bundle.module().dim(), "v": texts(bundle.point()) }),
        CoproductEmit::Phi => json!({ "phi": motive_json(&bundle.motive_matrix()?) }),
        CoproductEmit::ZetaVector => {
            let z = bundle.zeta_log_vector(&table, args.prec)?;
            passed = z.report.passed();
            json!({
                "vector": z.vector.iter().map(InfAdic::to_json).collect::<Vec<_>>(),
                "text": z.vector.iter().map(InfAdic::to_string).collect::<Vec<_>>(),
                "report": z.report,
                "passed": passed,
            })
        }
    };
    Ok(Outcome {
        body: Body::Json(json!({
            "q": table.field().q(),
            "index": s.entries(),
            "members": bundle.members().len(),
            "merged": args.merge,
            "coproduct": body,
        })),
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Via {
    /// Direct summation over monic polynomials (∞ only).
    Direct,
    /// Σ_ℓ b_ℓ(θ)(-1)^{dep-1} Li*_{s_ℓ}(u_ℓ) / Γ_s.
    Triples,
    /// Coordinate n of the logarithmic vector of the coproduct, over Γ_s.
    Bundle,
}

#[derive(Debug, Clone, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub index: String,
    #[command(flatten)]
    pub place: PlaceArgs,
    #[arg(long, default_value_t = 20)]
    pub prec: i64,
    /// Evaluation route; defaults to direct at ∞ and triples at v.
    #[arg(long, value_enum)]
    pub via: Option<Via>,
    /// Use the merged triple list for the triples and bundle routes.
    #[arg(long, alias = "merged")]
    pub merge: bool,
}

pub fn zeta(args: &ZetaArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let s = parse_index(&args.index)?;
    let prec = args.prec;
    let place = args.place.resolve(table.field())?;
    let via = args.via.unwrap_or(if place.is_some() { Via::Triples } else { Via::Direct });
    let value = match (&place, via) {
        (None, Via::Direct) => inf_json(&table.zeta_direct(&s, prec)?),
        (None, Via::Triples) => {
            let gamma = table.gamma_index(&s)?;
            let list = triple_list(&table, &s, args.merge)?;
            let gz = gamma_zeta_via_triples(&table, &list, prec + gamma.deg_i64())?;
            inf_json(&gz.div_poly(&gamma)?.truncate_abs(-prec))
        }
        (None, Via::Bundle) => {
            let gamma = table.gamma_index(&s)?;
            let bundle = bundle_for(&table, &s, args.merge)?;
            let z = bundle.zeta_log_vector(&table, prec + gamma.deg_i64())?;
            inf_json(&z.vector[bundle.weight() - 1].div_poly(&gamma)?.truncate_abs(-prec))
        }
        (Some(_), Via::Direct) => {
            return Err(CliError::Usage("direct summation does not converge at a finite place; use --via triples or bundle".into()))
        }
        (Some(v), Via::Triples) if args.merge => v_json(&zeta_v_from_triples(&table, &s, &triple_list(&table, &s, true)?, v, prec)?),
        (Some(v), Via::Triples) => v_json(&zeta_v(&table, &s, v, prec)?),
        (Some(_), Via::Bundle) if args.merge => {
            return Err(CliError::Usage("--merge applies to the triples route at a finite place".into()))
        }
        (Some(v), Via::Bundle) => v_json(&zeta_v_via_g(&table, &s, v, prec)?),
    };
    Ok(Outcome::json(json!({
        "q": table.field().q(),
        "index": s.entries(),
        "via": format!("{via:?}").to_lowercase(),
        "prec": prec,
        "result": value,
    })))
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["coeffs", "discover"])))]
pub struct RelationArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub weight: u32,
    #[command(flatten)]
    pub place: PlaceArgs,
    /// JSON file {"terms": [["coefficient", [s1, s2, …]], …]}.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Search for a relation among all indices of this weight instead.
    #[arg(long)]
    pub discover: bool,
    /// Highest θ-degree of a coefficient in the search.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    #[arg(long, default_value_t = 3)]
    pub depth_max: usize,
    /// ∞-adic digits for the search and for checking a given relation.
    #[arg(long, default_value_t = 30)]
    pub digits: i64,
    /// Digits on which a discovered kernel is recomputed.
    #[arg(long, default_value_t = 60)]
    pub confirm_digits: i64,
    #[arg(long, default_value_t = 6)]
    pub v_prec: i64,
}

pub fn relation(args: &RelationArgs) -> CliResult<Outcome> {
    let table = args.field.table()?;
    let Some(place) = args.place.resolve(table.field())? else {
        return Err(CliError::Usage("relations are transferred to a finite place: pass --place v --v-poly P".into()));
    };
    if let Some(path) = &args.coeffs {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let parsed: RelationJson = serde_json::from_str(&text)?;
        let relation = parsed.parse(table.field())?;
        if relation.weight() != args.weight {
            return Err(CliError::Usage(format!("the relation has weight {}, not {}", relation.weight(), args.weight)));
        }
        let report = relation_check(&table, &relation, &place, args.digits, args.v_prec)?;
        let passed = report.holds_at_infinity() && report.holds_at_v();
        return Ok(Outcome {
            body: Body::Json(json!({
                "q": table.field().q(),
                "place": place.poly().to_string(),
                "relation": relation.to_json(),
                "report": report,
                "passed": passed,
            })),
            passed,
        });
    }
    let indices: Vec<Index> =
        Index::all_up_to(args.weight, args.depth_max).into_iter().filter(|s| s.weight() == args.weight).collect();
    let transfer = find_transfer(&table, &indices, args.degree, args.digits, args.confirm_digits, &place, args.v_prec)?;
    let passed = transfer.as_ref().is_some_and(|t| t.report.holds_at_infinity() && t.report.holds_at_v());
    let found = transfer.map(|t| {
        json!({
            "relation": t.relation.to_json(),
            "candidates": t.candidates,
            "confirmed": t.confirmed,
            "report": t.report,
        })
    });
    Ok(Outcome {
        body: Body::Json(json!({
            "q": table.field().q(),
            "place": place.poly().to_string(),
            "weight": args.weight,
            "indices": indices.iter().map(|s| s.entries().to_vec()).collect::<Vec<_>>(),
            "transfer": found,
            "passed": passed,
        })),
        passed,
    })
}
