//! Command-line surface: catalog listing, structure dumps and verification suites.
//!
//! Exit codes: 0 when everything passes, 1 when an identity fails, 2 on
//! usage or data errors.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::RationalFunction;
use crate::catalog::{
    facet_transfer, sha256_hex, Catalog, FamilyLabel, SideTag, VerifiedEntry, CATALOG_ENV,
    CATALOG_VERSION,
};
use crate::diagrams::{enumerate_facets, Facet};
use crate::fdeg::{
    center_ratios, fdeg_transfer_ratio, maximal_facets, parahoric_volume, shipped_center_fixtures,
    volume_ratio,
};
use crate::finquot::{check_facet_match, order_poly, reductive_quotient};
use crate::gamma::{gamma_check, principal_module_for_entry};
use crate::hecke::{iwahori_coxeter, iwahori_spec, transfer_check, ParamTables, SHIPPED_PARAMS};
use crate::rootdata::dual_center_invariants_order;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SUITES: [&str; 7] = [
    "prop21",
    "coxeter",
    "volumes",
    "fdeg",
    "gamma",
    "omega-duality",
    "center",
];

#[derive(Debug, Parser)]
#[command(name = "unillc", version, about = "Ramified simple p-adic groups and their split companions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also evaluate numeric output at this value of q.
    #[arg(long, global = true, value_name = "INT")]
    pub at_q: Option<i64>,
    /// Catalog file (default: $UNILLC_CATALOG, else the embedded catalog).
    #[arg(long, global = true, value_name = "PATH")]
    pub catalog: Option<PathBuf>,
    /// Hecke parameter tables (text or .json).
    #[arg(long, global = true, value_name = "PATH")]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One row per catalog entry.
    List {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        isogeny: Option<String>,
    },
    /// `show <family> [n] [isogeny] <diagram|omega|facets|dual|hecke|volumes>`
    Show {
        #[arg(num_args = 2..=4, required = true)]
        args: Vec<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        isogeny: Option<String>,
    },
    /// Run verification suites (`all` for every suite).
    Verify {
        #[arg(required = true)]
        suites: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_rank: usize,
        #[arg(long)]
        family: Option<String>,
    },
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: EXIT_PASS,
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            stdout: String::new(),
            stderr,
            code: EXIT_USAGE,
        }
    }
}

pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome::ok(text)
            }
        }
    }
}

struct Context {
    catalog: Catalog,
    params: ParamTables,
    params_sha256: String,
}

fn load_context(cli: &Cli) -> Result<Context, String> {
    let catalog = match (&cli.catalog, std::env::var_os(CATALOG_ENV)) {
        (Some(p), _) => Catalog::load(p),
        (None, Some(p)) => Catalog::load(Path::new(&p)),
        (None, None) => Catalog::builtin(),
    }
    .map_err(|e| format!("catalog: {e}"))?;
    let (params, params_sha256) = match &cli.params {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| format!("params {}: {e}", p.display()))?;
            let t = ParamTables::load(p).map_err(|e| format!("params {}: {e}", p.display()))?;
            (t, sha256_hex(&bytes))
        }
        None => (ParamTables::shipped(), sha256_hex(SHIPPED_PARAMS.as_bytes())),
    };
    Ok(Context {
        catalog,
        params,
        params_sha256,
    })
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = match load_context(cli) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(e),
    };
    match &cli.command {
        Command::List {
            family,
            rank,
            isogeny,
        } => cmd_list(&ctx, cli, family.as_deref(), *rank, isogeny.as_deref()),
        Command::Show {
            args,
            rank,
            isogeny,
        } => cmd_show(&ctx, cli, args, *rank, isogeny.as_deref()),
        Command::Verify {
            suites,
            max_rank,
            family,
        } => cmd_verify(&ctx, cli, suites, *max_rank, family.as_deref()),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

// ---------- list ----------

#[derive(Debug, Serialize)]
struct ListRow {
    family: String,
    n: usize,
    isogeny: String,
    group: String,
    companion: String,
    omega_order: u64,
    quasi_split: bool,
}

fn cmd_list(
    ctx: &Context,
    cli: &Cli,
    family: Option<&str>,
    rank: Option<usize>,
    isogeny: Option<&str>,
) -> Outcome {
    let fam = match family.map(str::parse::<FamilyLabel>).transpose() {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    let rows: Vec<ListRow> = ctx
        .catalog
        .entries
        .iter()
        .filter(|e| fam.is_none_or(|f| e.family == f))
        .filter(|e| rank.is_none_or(|n| e.n == n))
        .filter(|e| isogeny.is_none_or(|i| e.isogeny == i))
        .map(|e| ListRow {
            family: e.family.name().into(),
            n: e.n,
            isogeny: e.isogeny.clone(),
            group: e.g.name.clone(),
            companion: e.companion.name.clone(),
            omega_order: e.omega_g.order(),
            quasi_split: e.quasi_split,
        })
        .collect();
    if rows.is_empty() {
        return Outcome::usage("no catalog entries match");
    }
    if cli.json {
        return Outcome::ok(to_json(&rows));
    }
    let mut out = format!(
        "{:<10} {:>2} {:<7} {:>3} {:<5} {:<28} {}\n",
        "family", "n", "isogeny", "|Ω|", "qs", "group", "companion"
    );
    for r in &rows {
        out.push_str(&format!(
            "{:<10} {:>2} {:<7} {:>3} {:<5} {:<28} {}\n",
            r.family, r.n, r.isogeny, r.omega_order, r.quasi_split, r.group, r.companion
        ));
    }
    let families: BTreeSet<&str> = rows.iter().map(|r| r.family.as_str()).collect();
    out.push_str(&format!("{} entries in {} families\n", rows.len(), families.len()));
    Outcome::ok(out)
}

// ---------- show ----------

const SHOW_WHAT: [&str; 6] = ["diagram", "omega", "facets", "dual", "hecke", "volumes"];

/// Family label, optionally with the rank attached (`C-BC_2`, `2C-B_5`).
fn parse_family(s: &str) -> Result<(FamilyLabel, Option<usize>), String> {
    if let Ok(f) = s.parse::<FamilyLabel>() {
        return Ok((f, None));
    }
    let (head, tail) = s
        .rsplit_once('_')
        .ok_or_else(|| format!("unknown family {s}"))?;
    let m: usize = tail.parse().map_err(|_| format!("unknown family {s}"))?;
    let head = head.replace('²', "2");
    match head.as_str() {
        "2C-B" => Ok(if m % 2 == 0 {
            (FamilyLabel::TwoCBEven, Some(m / 2))
        } else {
            (FamilyLabel::TwoCBOdd, Some(m / 2))
        }),
        _ => {
            let f: FamilyLabel = format!("{head}_n").parse().map_err(|_| format!("unknown family {s}"))?;
            Ok((f, Some(m)))
        }
    }
}

fn resolve_entry(
    ctx: &Context,
    positional: &[String],
    rank: Option<usize>,
    isogeny: Option<&str>,
) -> Result<Arc<VerifiedEntry>, String> {
    let (fam, mut n) = parse_family(&positional[0])?;
    let mut iso = isogeny.map(str::to_string);
    for a in &positional[1..] {
        match a.parse::<usize>() {
            Ok(k) if n.is_none() => n = Some(k),
            _ if iso.is_none() => iso = Some(a.clone()),
            _ => return Err(format!("unexpected argument {a}")),
        }
    }
    let n = rank.or(n).or(match fam {
        FamilyLabel::F4I => Some(4),
        FamilyLabel::G2I => Some(2),
        _ => None,
    });
    let n = n.ok_or_else(|| format!("{fam} needs a rank"))?;
    match iso {
        Some(i) => ctx.catalog.lookup(fam.name(), Some(n), &i).map_err(|e| e.to_string()),
        None => ctx
            .catalog
            .entries
            .iter()
            .find(|e| e.family == fam && e.n == n)
            .cloned()
            .ok_or_else(|| format!("no catalog entry for {fam} n={n}")),
    }
}

fn cmd_show(
    ctx: &Context,
    cli: &Cli,
    args: &[String],
    rank: Option<usize>,
    isogeny: Option<&str>,
) -> Outcome {
    let (what, positional) = args.split_last().expect("at least two arguments");
    if !SHOW_WHAT.contains(&what.as_str()) {
        return Outcome::usage(format!(
            "unknown view {what}; expected one of {}",
            SHOW_WHAT.join(", ")
        ));
    }
    let e = match resolve_entry(ctx, positional, rank, isogeny) {
        Ok(e) => e,
        Err(m) => return Outcome::usage(m),
    };
    let v = match what.as_str() {
        "diagram" => show_diagram(&e),
        "omega" => show_omega(&e),
        "facets" => show_facets(&e, cli.at_q),
        "dual" => show_dual(&e),
        "hecke" => show_hecke(&e, ctx),
        _ => show_volumes(&e, cli.at_q),
    };
    let v = match v {
        Ok(v) => v,
        Err(m) => return Outcome::usage(m),
    };
    let doc = json!({ "entry": e.key(), "view": what, "data": v });
    if cli.json {
        Outcome::ok(to_json(&doc))
    } else {
        let mut out = format!("{} ({} / {})\n", e.key(), e.g.name, e.companion.name);
        render_text(&v, 0, &mut out);
        Outcome::ok(out)
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for l in s.lines() {
                            out.push_str(&format!("{pad}  {l}\n"));
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", flat(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", flat(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", flat(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !matches!(x, Value::Object(_) | Value::Array(_)) || is_flat_array(x)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn is_flat_array(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(|x| !matches!(x, Value::Object(_) | Value::Array(_))))
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(flat).collect::<Vec<_>>().join(", ")),
        _ => v.to_string(),
    }
}

fn frob_text(p: &[usize]) -> String {
    p.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn show_diagram(e: &VerifiedEntry) -> Result<Value, String> {
    let side = |s: SideTag| {
        let sd = e.side(s);
        json!({
            "group": sd.name,
            "local_index": sd.local_index.diagram.to_text(),
            "frobenius": frob_text(&sd.local_index.frob),
            "relative": e.folded(s).diagram.to_text(),
            "orbits": e.folded(s).orbits,
        })
    };
    Ok(json!({
        "G": side(SideTag::G),
        "companion": side(SideTag::Companion),
        "marked": [e.marked.0, e.marked.1],
        "bijection": e.bijection,
    }))
}

fn show_omega(e: &VerifiedEntry) -> Result<Value, String> {
    let side = |s: SideTag| {
        let om = e.omega(s);
        json!({
            "structure": om.group.to_string(),
            "order": om.order(),
            "node_permutations": om.perms.iter().map(|p| frob_text(p)).collect::<Vec<_>>(),
        })
    };
    Ok(json!({
        "G": side(SideTag::G),
        "companion": side(SideTag::Companion),
        "adjoint_order": e.omega_ad.order(),
        "isogeny_kernel": e.kernel_image.kernel.len(),
        "isogeny_image": e.kernel_image.image.len(),
    }))
}

fn at_q(r: &RationalFunction, q: Option<i64>) -> Option<String> {
    let q = q?;
    Some(match r.eval_q(&BigRational::from_integer(q.into())) {
        Ok(v) => v.to_string(),
        Err(err) => format!("n/a ({err})"),
    })
}

fn with_value(mut v: Value, key: &str, r: &RationalFunction, q: Option<i64>) -> Value {
    v[key] = Value::String(r.to_string());
    if let Some(s) = at_q(r, q) {
        v[format!("{key}_at_q")] = Value::String(s);
    }
    v
}

fn show_facets(e: &VerifiedEntry, q: Option<i64>) -> Result<Value, String> {
    let mut rows = Vec::new();
    for f in enumerate_facets(&e.g.relative) {
        let fp = facet_transfer(e, &f);
        let tg = reductive_quotient(&e.g.local_index, &e.folded_g, &f).map_err(|x| x.to_string())?;
        let tc = reductive_quotient(&e.companion.local_index, &e.folded_companion, &fp)
            .map_err(|x| x.to_string())?;
        let op = order_poly(&tg);
        let row = json!({
            "facet": f.label(),
            "facet_prime": fp.label(),
            "kind": f.kind(e.rel_len()),
            "type_G": tg.to_string(),
            "type_companion": tc.to_string(),
            "dim": op.dimension,
            "omega_stabilizer": e.omega_g.facet_stabilizers(&f).0.len(),
        });
        rows.push(with_value(row, "order", &RationalFunction::from_laurent(op.poly), q));
    }
    Ok(Value::Array(rows))
}

fn show_dual(e: &VerifiedEntry) -> Result<Value, String> {
    let d = &e.dual;
    let module = principal_module_for_entry(e).map_err(|x| x.to_string())?;
    Ok(json!({
        "dual_group": d.dual_label,
        "inertia_fixed": d.fixed_label,
        "fixed_type": d.fixed_type.to_string(),
        "fixed_components": d.fixed_pi0,
        "dim_dual": d.dim_dual,
        "dim_fixed": d.dim_dual_fixed,
        "artin_conductor": d.artin_conductor,
        "tame": d.tame,
        "center_invariants_order": d.center_invariants_order,
        "principal_parameter_module": module.to_string(),
    }))
}

fn show_hecke(e: &VerifiedEntry, ctx: &Context) -> Result<Value, String> {
    let side = |s: SideTag| -> Result<Value, String> {
        let spec = iwahori_spec(e, s).map_err(|x| x.to_string())?;
        Ok(json!({
            "generators": spec.presentation.generators,
            "coxeter_matrix": spec.presentation.m,
            "parameters": spec.params.n.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "omega_extension": spec.omega_ext.iter().map(|p| frob_text(p)).collect::<Vec<_>>(),
        }))
    };
    let tabulated: Vec<Value> = ctx
        .params
        .records
        .iter()
        .filter(|r| {
            r.family.parse::<FamilyLabel>().ok() == Some(e.family) && r.n == e.n && r.isogeny == e.isogeny
        })
        .filter(|r| !r.facet.is_empty())
        .map(|r| {
            json!({
                "side": r.side,
                "facet": r.facet,
                "sigma": r.sigma,
                "generators": r.spec.presentation.generators,
                "parameters": r.spec.params.n.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "iwahori_G": side(SideTag::G)?,
        "iwahori_companion": side(SideTag::Companion)?,
        "tabulated": tabulated,
    }))
}

fn show_volumes(e: &VerifiedEntry, q: Option<i64>) -> Result<Value, String> {
    let mut rows = Vec::new();
    for f in enumerate_facets(&e.g.relative) {
        let fp = facet_transfer(e, &f);
        let vg = parahoric_volume(e, SideTag::G, &f).map_err(|x| x.to_string())?;
        let vc = parahoric_volume(e, SideTag::Companion, &fp).map_err(|x| x.to_string())?;
        let ratio = volume_ratio(e, &f).map_err(|x| x.to_string())?;
        let mut row = json!({ "facet": f.label(), "facet_prime": fp.label() });
        row = with_value(row, "vol_G", &vg.value, q);
        row = with_value(row, "vol_companion", &vc.value, q);
        row = with_value(row, "ratio", &ratio, q);
        rows.push(row);
    }
    Ok(json!({ "conductor": e.dual.artin_conductor, "facets": rows }))
}

// ---------- verify ----------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub id: String,
    pub status: Status,
    pub detail: String,
}

impl Case {
    fn new(id: String, ok: bool, detail: String) -> Self {
        Case {
            id,
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn from_result(id: String, r: Result<(bool, String), String>) -> Self {
        match r {
            Ok((ok, d)) => Case::new(id, ok, d),
            Err(err) => Case::new(id, false, format!("error: {err}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub toolkit_version: String,
    pub catalog_version: u32,
    pub catalog_sha256: String,
    pub params_sha256: String,
    pub max_rank: usize,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }
}

fn entries_up_to<'a>(
    ctx: &'a Context,
    max_rank: usize,
    fam: Option<FamilyLabel>,
) -> Vec<&'a Arc<VerifiedEntry>> {
    ctx.catalog
        .entries
        .iter()
        .filter(|e| e.n <= max_rank && fam.is_none_or(|f| e.family == f))
        .collect()
}

fn facet_jobs<'a>(entries: &[&'a Arc<VerifiedEntry>], maximal_only: bool) -> Vec<(&'a Arc<VerifiedEntry>, Facet)> {
    entries
        .iter()
        .flat_map(|&e| {
            let fs = if maximal_only {
                maximal_facets(e)
            } else {
                enumerate_facets(&e.g.relative)
            };
            fs.into_iter().map(move |f| (e, f))
        })
        .collect()
}

fn case_id(e: &VerifiedEntry, f: Option<&Facet>) -> String {
    match f {
        Some(f) => format!("{} facet {}", e.key(), f.label()),
        None => e.key(),
    }
}

fn suite_prop21(entries: &[&Arc<VerifiedEntry>]) -> Vec<Case> {
    facet_jobs(entries, false)
        .par_iter()
        .map(|(e, f)| {
            Case::from_result(
                case_id(e, Some(f)),
                check_facet_match(e, f)
                    .map(|r| {
                        let d = format!(
                            "{} ~ {}; type {} dim {} order {} omega {}",
                            r.type_g, r.type_companion, r.type_match, r.dim_match, r.order_match, r.omega_match
                        );
                        (r.all(), d)
                    })
                    .map_err(|x| x.to_string()),
            )
        })
        .collect()
}

fn suite_coxeter(entries: &[&Arc<VerifiedEntry>], params: &ParamTables) -> Vec<Case> {
    entries
        .par_iter()
        .map(|e| {
            let r = (|| -> Result<(bool, String), String> {
                let a = iwahori_coxeter(&e.g.relative).map_err(|x| x.to_string())?;
                let b = iwahori_coxeter(&e.companion.relative).map_err(|x| x.to_string())?;
                let matrices = a.matches_under(&b, &e.bijection);
                let iwahori = transfer_check(e, &Facet { j: BTreeSet::new() }, params).map_err(|x| x.to_string())?;
                let mut tabulated = 0;
                let mut tab_ok = true;
                for rec in params.records.iter().filter(|r| {
                    r.side == SideTag::G
                        && !r.facet.is_empty()
                        && r.family.parse::<FamilyLabel>().ok() == Some(e.family)
                        && r.n == e.n
                        && r.isogeny == e.isogeny
                }) {
                    let f = Facet {
                        j: rec.facet.iter().copied().collect(),
                    };
                    tabulated += 1;
                    tab_ok &= transfer_check(e, &f, params).map_err(|x| x.to_string())?;
                }
                Ok((
                    matrices && iwahori && tab_ok,
                    format!("matrices {matrices} iwahori parameters {iwahori} tabulated {tabulated} ok {tab_ok}"),
                ))
            })();
            Case::from_result(case_id(e, None), r)
        })
        .collect()
}

fn suite_volumes(entries: &[&Arc<VerifiedEntry>]) -> Vec<Case> {
    facet_jobs(entries, false)
        .par_iter()
        .map(|(e, f)| {
            let expected = RationalFunction::u_pow(e.dual.artin_conductor as i64);
            Case::from_result(
                case_id(e, Some(f)),
                volume_ratio(e, f)
                    .map(|r| (r == expected, format!("ratio {r}, expected {expected}")))
                    .map_err(|x| x.to_string()),
            )
        })
        .collect()
}

fn suite_fdeg(entries: &[&Arc<VerifiedEntry>]) -> Vec<Case> {
    facet_jobs(entries, true)
        .par_iter()
        .map(|(e, f)| {
            let expected = RationalFunction::u_pow(-(e.dual.artin_conductor as i64));
            Case::from_result(
                case_id(e, Some(f)),
                fdeg_transfer_ratio(e, f, 1)
                    .map(|r| (r == expected, format!("ratio {r}, expected {expected}")))
                    .map_err(|x| x.to_string()),
            )
        })
        .collect()
}

fn suite_gamma(entries: &[&Arc<VerifiedEntry>]) -> Vec<Case> {
    entries
        .par_iter()
        .map(|e| {
            Case::from_result(
                case_id(e, None),
                gamma_check(e)
                    .map(|r| {
                        (
                            r.split_ok && r.companion_ok,
                            format!(
                                "|gamma| {} companion {} a {} split {} companion {}",
                                r.gamma_g, r.gamma_companion, r.conductor, r.split_ok, r.companion_ok
                            ),
                        )
                    })
                    .map_err(|x| x.to_string()),
            )
        })
        .collect()
}

fn suite_omega_duality(entries: &[&Arc<VerifiedEntry>]) -> Vec<Case> {
    entries
        .par_iter()
        .map(|e| {
            let r = dual_center_invariants_order(&e.g.datum, &e.g.action)
                .map(|z| {
                    let om = e.omega_g.order();
                    let declared = e.g.omega.order;
                    (
                        z == om && om == declared,
                        format!("|Z(G^v)^I_Frob| {z}, |Omega_G| {om}, declared {declared}"),
                    )
                })
                .map_err(|x| x.to_string());
            Case::from_result(case_id(e, None), r)
        })
        .collect()
}

fn suite_center(ctx: &Context, max_rank: usize, fam: Option<FamilyLabel>) -> Vec<Case> {
    let fixtures: Vec<_> = shipped_center_fixtures()
        .into_iter()
        .filter(|fx| fx.n <= max_rank)
        .filter(|fx| fam.is_none_or(|f| fx.family.parse::<FamilyLabel>().ok() == Some(f)))
        .collect();
    let mut jobs = Vec::new();
    for fx in &fixtures {
        match ctx.catalog.lookup(&fx.family, Some(fx.n), &fx.isogeny) {
            Ok(e) => jobs.extend(maximal_facets(&e).into_iter().map(|f| (fx, Some(f)))),
            Err(_) => jobs.push((fx, None)),
        }
    }
    jobs.par_iter()
        .map(|(fx, f)| {
            let id = match f {
                Some(f) => format!("{} facet {}", fx.name, f.label()),
                None => fx.name.clone(),
            };
            let r = match f {
                None => Err(format!("no catalog entry for fixture {}", fx.name)),
                Some(f) => center_ratios(fx, &ctx.catalog, f)
                    .map(|c| {
                        (
                            c.ok(),
                            format!(
                                "|Omega| {} = {} x {} exact {}; kernel expected {} ok {}; vol ratio {} ok {}; fdeg ratio {} ok {}",
                                c.omega_g, c.kernel, c.image, c.sequence_exact, fx.kernel_order,
                                c.kernel_matches, c.vol_ratio, c.vol_matches, c.fdeg_ratio, c.fdeg_matches
                            ),
                        )
                    })
                    .map_err(|x| x.to_string()),
            };
            Case::from_result(id, r)
        })
        .collect()
}

fn run_suite(
    ctx: &Context,
    suite: &str,
    max_rank: usize,
    fam: Option<FamilyLabel>,
) -> VerifyReport {
    let entries = entries_up_to(ctx, max_rank, fam);
    let cases = match suite {
        "prop21" => suite_prop21(&entries),
        "coxeter" => suite_coxeter(&entries, &ctx.params),
        "volumes" => suite_volumes(&entries),
        "fdeg" => suite_fdeg(&entries),
        "gamma" => suite_gamma(&entries),
        "omega-duality" => suite_omega_duality(&entries),
        "center" => suite_center(ctx, max_rank, fam),
        _ => unreachable!("suite names are checked before running"),
    };
    let passed = cases.iter().filter(|c| c.status == Status::Pass).count();
    VerifyReport {
        suite: suite.into(),
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        catalog_version: CATALOG_VERSION,
        catalog_sha256: ctx.catalog.sha256.clone(),
        params_sha256: ctx.params_sha256.clone(),
        max_rank,
        summary: Summary {
            total: cases.len(),
            passed,
            failed: cases.len() - passed,
        },
        cases,
    }
}

fn cmd_verify(
    ctx: &Context,
    cli: &Cli,
    suites: &[String],
    max_rank: usize,
    family: Option<&str>,
) -> Outcome {
    let fam = match family.map(str::parse::<FamilyLabel>).transpose() {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    let mut selected: Vec<&str> = Vec::new();
    for s in suites {
        if s == "all" {
            selected.extend(SUITES);
        } else if let Some(&k) = SUITES.iter().find(|&&k| k == s) {
            selected.push(k);
        } else {
            return Outcome::usage(format!("unknown suite {s}; expected all or one of {}", SUITES.join(", ")));
        }
    }
    // canonical order, no repeats
    let selected: Vec<&str> = SUITES.iter().copied().filter(|k| selected.contains(k)).collect();
    let reports: Vec<VerifyReport> = selected
        .iter()
        .map(|s| run_suite(ctx, s, max_rank, fam))
        .collect();
    let ok = reports.iter().all(VerifyReport::passed);
    let stdout = if cli.json {
        to_json(&json!({ "passed": ok, "reports": reports }))
    } else {
        let mut out = String::new();
        for r in &reports {
            for c in r.cases.iter().filter(|c| c.status == Status::Fail) {
                out.push_str(&format!("FAIL {} {}: {}\n", r.suite, c.id, c.detail));
            }
            out.push_str(&format!(
                "{} {}: {}/{} cases pass (max rank {})\n",
                if r.passed() { "PASS" } else { "FAIL" },
                r.suite,
                r.summary.passed,
                r.summary.total,
                max_rank
            ));
        }
        out.push_str(&format!(
            "toolkit {} catalog v{} sha256 {}\n",
            env!("CARGO_PKG_VERSION"),
            CATALOG_VERSION,
            ctx.catalog.sha256
        ));
        out
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: if ok { EXIT_PASS } else { EXIT_FAIL },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> Outcome {
        run_args(std::iter::once("unillc").chain(args.iter().copied()))
    }

    #[test]
    fn list_all_and_one_family() {
        let o = run_cli(&["list"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.contains("in 8 families"));
        let o = run_cli(&["list", "--family", "B-C_n", "--rank", "3", "--json"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let isos: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["isogeny"].as_str().unwrap()).collect();
        assert_eq!(isos.len(), 4, "{isos:?}");
        assert_eq!(run_cli(&["list", "--family", "nope"]).code, 2);
    }

    #[test]
    fn show_views() {
        let o = run_cli(&["show", "C-BC_2", "omega", "--json"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["data"]["G"]["order"], 1);

        let o = run_cli(&["show", "F4^I", "dual", "--json"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["data"]["dim_dual_fixed"], Value::Null);
        assert_eq!(v["data"]["dim_fixed"], 52);
        assert_eq!(v["data"]["dim_dual"], 78);
        assert_eq!(v["data"]["artin_conductor"], 26);

        let o = run_cli(&["show", "2B-C_2", "diagram"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.contains("relative:"));

        for what in SHOW_WHAT {
            let o = run_cli(&["show", "B-C_n", "3", "d=2", what, "--at-q", "4"]);
            assert_eq!(o.code, 0, "{what}: {}", o.stderr);
        }
        assert_eq!(run_cli(&["show", "B-C_2", "bogus"]).code, 2);
        assert_eq!(run_cli(&["show", "B-C_n", "99", "omega"]).code, 2);
    }

    #[test]
    fn family_with_rank() {
        assert_eq!(parse_family("C-BC_2").unwrap(), (FamilyLabel::CBC, Some(2)));
        assert_eq!(parse_family("2C-B_4").unwrap(), (FamilyLabel::TwoCBEven, Some(2)));
        assert_eq!(parse_family("2C-B_5").unwrap(), (FamilyLabel::TwoCBOdd, Some(2)));
        assert_eq!(parse_family("2B-C_n").unwrap(), (FamilyLabel::TwoBC, None));
        assert!(parse_family("X_3").is_err());
    }

    #[test]
    fn verify_small() {
        let o = run_cli(&["verify", "all", "--max-rank", "2"]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        assert_eq!(run_cli(&["verify", "nonsense"]).code, 2);
        let a = run_cli(&["verify", "gamma", "prop21", "--max-rank", "2", "--json"]);
        let b = run_cli(&["verify", "prop21", "gamma", "--max-rank", "2", "--json"]);
        assert_eq!(a, b);
    }

    #[test]
    fn bad_catalog_is_a_data_error() {
        let o = run_cli(&["list", "--catalog", "/nonexistent/catalog.json"]);
        assert_eq!(o.code, 2);
    }
}
