//! Group-spec parsing and command dispatch for the `endokit` binary.  All
//! computation lives in `endokit-core`; this crate only parses inputs,
//! calls library operations, and renders reports.

use clap::{Args, Parser, Subcommand};
use endokit_core::endoscopy::{
    enumerate_classes, is_elliptic, out_group_in, Ambient, EndoTriple, EquivMode,
};
use endokit_core::galois::{GaloisForm, GaloisGen};
use endokit_core::groups;
use endokit_core::kottwitz::{
    kottwitz_set, stable_subsets, verify_induction, verify_sum_formula, KottwitzPoint,
};
use endokit_core::lattice::{LatAut, LatVec, RatVec, TorsionVec};
use endokit_core::levi::{fiber_in, is_acceptable, x_map_in, ValuationElt};
use endokit_core::report::{
    class_id_in, format_lat_vec, format_rat_vec, format_subset, sum_report, Report,
};
use endokit_core::root_datum::{standard_levi, BasedRootDatum, RootDatum, StdLevi};
use num::{BigInt, BigRational};
use serde::Deserialize;
use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RESIDUAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read spec file: {0}")]
    Io(#[from] std::io::Error),
    #[error("spec parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("spec error: {0}")]
    Spec(String),
    #[error("argument error: {0}")]
    Arg(String),
}

/// A group-spec document.  Grammar (TOML):
///
/// ```toml
/// name = "gl3"                # optional label
///
/// [group]                     # exactly one of the two layouts
/// builtin = "GL"              # one of T, GL, SL, PGL, Sp, SO, U, GU
/// n = 3
///
/// # [group]                   # explicit layout
/// # rank = 1
/// # roots = [[2], [-2]]       # X-coordinates, index-matched with coroots
/// # coroots = [[1], [-1]]
/// # base = [[2]]              # the simple roots, as root vectors
///
/// # [[galois.gens]]           # optional; omitted means split
/// # matrix = [[0, 1], [1, 0]] # action on X, rows are images of basis vectors
/// # order = 2
/// ```
///
/// Builtin forms carry their own Galois action; a `galois` block is only
/// accepted with the explicit layout.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub name: Option<String>,
    pub group: GroupBlock,
    pub galois: Option<GaloisBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub rank: Option<usize>,
    pub roots: Option<Vec<Vec<i64>>>,
    pub coroots: Option<Vec<Vec<i64>>>,
    pub base: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaloisBlock {
    pub gens: Vec<GenBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenBlock {
    pub matrix: Vec<Vec<i64>>,
    pub order: u64,
}

pub fn parse_spec(text: &str) -> Result<GroupSpec, CliError> {
    Ok(toml::from_str(text)?)
}

fn int_vec(v: &[i64]) -> LatVec {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn spec_to_form(spec: &GroupSpec) -> Result<Arc<GaloisForm>, CliError> {
    let g = &spec.group;
    match (&g.builtin, &g.rank) {
        (Some(kind), None) => {
            if spec.galois.is_some() {
                return Err(CliError::Spec(
                    "builtin forms carry their own Galois action; drop the [galois] block"
                        .to_string(),
                ));
            }
            let n = g
                .n
                .ok_or_else(|| CliError::Spec("builtin group needs a parameter n".to_string()))?;
            let form = groups::builtin(kind, n)
                .map_err(|e| CliError::Spec(format!("builtin {kind}: {e}")))?;
            Ok(Arc::new(form))
        }
        (None, Some(rank)) => {
            let rank = *rank;
            let roots = g
                .roots
                .as_ref()
                .ok_or_else(|| CliError::Spec("explicit group needs roots".to_string()))?;
            let coroots = g
                .coroots
                .as_ref()
                .ok_or_else(|| CliError::Spec("explicit group needs coroots".to_string()))?;
            let base = g
                .base
                .as_ref()
                .ok_or_else(|| CliError::Spec("explicit group needs base".to_string()))?;
            let datum = RootDatum::new(
                rank,
                roots.iter().map(|r| int_vec(r)).collect(),
                coroots.iter().map(|r| int_vec(r)).collect(),
            )
            .map_err(|e| CliError::Spec(e.to_string()))?;
            let base_idx: Vec<usize> = base
                .iter()
                .map(|r| {
                    let v = int_vec(r);
                    datum
                        .roots
                        .iter()
                        .position(|x| *x == v)
                        .ok_or_else(|| CliError::Spec(format!("base vector {r:?} is not a root")))
                })
                .collect::<Result<_, _>>()?;
            let brd = BasedRootDatum::new(datum, base_idx)
                .map_err(|e| CliError::Spec(e.to_string()))?;
            let gens: Vec<GaloisGen> = spec
                .galois
                .iter()
                .flat_map(|gb| &gb.gens)
                .map(|gen| {
                    let rows: Vec<LatVec> = gen.matrix.iter().map(|r| int_vec(r)).collect();
                    let m = LatAut::new(rows).map_err(|e| CliError::Spec(e.to_string()))?;
                    Ok(GaloisGen { x_action: m, order: gen.order as usize })
                })
                .collect::<Result<_, CliError>>()?;
            let form = if gens.is_empty() {
                GaloisForm::split(brd)
            } else {
                GaloisForm::new(brd, gens).map_err(|e| CliError::Spec(e.to_string()))?
            };
            Ok(Arc::new(form))
        }
        _ => Err(CliError::Spec(
            "the [group] block needs exactly one of `builtin` or `rank`".to_string(),
        )),
    }
}

pub fn load_form(path: &str) -> Result<Arc<GaloisForm>, CliError> {
    let text = std::fs::read_to_string(path)?;
    spec_to_form(&parse_spec(&text)?)
}

#[derive(Parser, Debug)]
#[command(
    name = "endokit",
    about = "Exact-arithmetic endoscopy and cocharacter-sum verification",
    version
)]
pub struct Cli {
    /// Path to the group-spec file (TOML; see the crate docs for the grammar)
    #[arg(long, global = true, default_value = "group.toml")]
    pub spec: String,
    /// Report format: tsv or json
    #[arg(long, global = true, default_value = "tsv")]
    pub format: String,
    /// Worker threads for internal parallelism; never affects output bytes
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate the group-spec file
    Validate,
    /// Enumerate endoscopic classes of the group
    Endoscopy(EndoscopyArgs),
    /// Embedded data over a standard Levi for one class
    Fiber(FiberArgs),
    /// Test the acceptability predicate for one valuation witness
    Acceptable(AcceptableArgs),
    /// The Kottwitz set of a dominant cocharacter
    Kottwitz(KottwitzArgs),
    /// Verify the cocharacter sum identity; exit 1 on a nonzero residual
    SumCheck(SumCheckArgs),
    /// Verify the induction identity through a Levi; exit 1 on a nonzero residual
    InductionCheck(InductionArgs),
}

#[derive(Args, Debug)]
pub struct EndoscopyArgs {
    /// Largest order of the defining torsion element
    #[arg(long, default_value_t = 4)]
    pub max_order: u64,
    /// Keep only elliptic classes
    #[arg(long)]
    pub elliptic: bool,
}

#[derive(Args, Debug)]
pub struct FiberArgs {
    /// Standard Levi: comma-separated base positions, or "-" for the torus
    #[arg(long)]
    pub levi: String,
    /// Class id (or unique prefix) from the `endoscopy` listing
    #[arg(long)]
    pub class: String,
    /// Largest torsion order searched when resolving the class id
    #[arg(long, default_value_t = 4)]
    pub max_order: u64,
}

#[derive(Args, Debug)]
pub struct AcceptableArgs {
    /// Dominant rational cocharacter, comma-separated (fractions allowed)
    #[arg(long, allow_hyphen_values = true)]
    pub nu: String,
    /// Valuation vector of the torus element, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
}

#[derive(Args, Debug)]
pub struct KottwitzArgs {
    /// Dominant cocharacter, comma-separated integers
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
}

#[derive(Args, Debug)]
pub struct SumCheckArgs {
    /// Dominant cocharacter, comma-separated integers
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub mu: String,
    /// Endoscopic class id (or unique prefix); defaults to the trivial class
    #[arg(long)]
    pub class: Option<String>,
    /// Largest torsion order searched when resolving the class id
    #[arg(long, default_value_t = 4)]
    pub max_order: u64,
}

#[derive(Args, Debug)]
pub struct InductionArgs {
    /// Standard Levi: comma-separated base positions, or "-" for the torus
    #[arg(long)]
    pub levi: String,
    /// Dominant cocharacter, comma-separated integers
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    /// Index into the `kottwitz` listing for the same cocharacter
    #[arg(long)]
    pub b: usize,
    /// Endoscopic class id (or unique prefix); defaults to the trivial class
    #[arg(long)]
    pub class: Option<String>,
    /// Largest torsion order searched when resolving the class id
    #[arg(long, default_value_t = 4)]
    pub max_order: u64,
}

fn parse_int_vec(text: &str, rank: usize) -> Result<LatVec, CliError> {
    let v: Vec<BigInt> = text
        .split(',')
        .map(|p| {
            BigInt::from_str(p.trim())
                .map_err(|_| CliError::Arg(format!("bad integer entry {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    if v.len() != rank {
        return Err(CliError::Arg(format!("expected {rank} entries, got {}", v.len())));
    }
    Ok(v)
}

fn parse_rat_vec(text: &str, rank: usize) -> Result<RatVec, CliError> {
    let v: Vec<BigRational> = text
        .split(',')
        .map(|p| {
            BigRational::from_str(p.trim())
                .map_err(|_| CliError::Arg(format!("bad rational entry {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    if v.len() != rank {
        return Err(CliError::Arg(format!("expected {rank} entries, got {}", v.len())));
    }
    Ok(v)
}

fn parse_levi(form: &GaloisForm, text: &str) -> Result<StdLevi, CliError> {
    let subset: BTreeSet<usize> = if text.trim() == "-" {
        BTreeSet::new()
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Arg(format!("bad base position {p:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(&p) = subset.iter().find(|&&p| p >= form.brd.base.len()) {
        return Err(CliError::Arg(format!("base position {p} out of range")));
    }
    if !form.is_orbit_union(&subset) {
        return Err(CliError::Arg(format!(
            "subset {} is not Galois-stable",
            format_subset(&subset)
        )));
    }
    Ok(standard_levi(&form.brd, &subset))
}

/// All classes the id flags can refer to: the trivial class plus the central
/// enumeration up to the given torsion order.
fn class_table(form: &Arc<GaloisForm>, amb: &Ambient, max_order: u64) -> Vec<(String, EndoTriple)> {
    let mut out: Vec<(String, EndoTriple)> = Vec::new();
    for t in std::iter::once(EndoTriple::trivial(form))
        .chain(enumerate_classes(form, max_order, false, EquivMode::Central))
    {
        let id = class_id_in(amb, &t).0;
        if !out.iter().any(|(i, _)| *i == id) {
            out.push((id, t));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn resolve_class(
    form: &Arc<GaloisForm>,
    amb: &Ambient,
    max_order: u64,
    wanted: Option<&str>,
) -> Result<EndoTriple, CliError> {
    let Some(prefix) = wanted else {
        return Ok(EndoTriple::trivial(form));
    };
    let table = class_table(form, amb, max_order);
    let hits: Vec<&(String, EndoTriple)> =
        table.iter().filter(|(id, _)| id.starts_with(prefix)).collect();
    match hits.len() {
        0 => Err(CliError::Arg(format!("no class with id prefix {prefix:?}"))),
        1 => Ok(hits[0].1.clone()),
        n => Err(CliError::Arg(format!("class id prefix {prefix:?} is ambiguous ({n} matches)"))),
    }
}

fn kottwitz_report(points: &[KottwitzPoint]) -> Report {
    let mut rep = Report::new(&["idx", "nu", "levi", "kappa"]);
    for (i, p) in points.iter().enumerate() {
        rep.push(vec![
            i.to_string(),
            format_rat_vec(&p.nu),
            format_subset(&p.levi.subset),
            format_lat_vec(&p.kappa),
        ]);
    }
    rep
}

/// Execute one parsed invocation.  Returns the exit code and the rendered
/// report; all errors map to the usage exit code upstream.
pub fn run(cli: &Cli) -> Result<(i32, String), CliError> {
    let form = load_form(&cli.spec)?;
    let render = |rep: &Report| -> Result<String, CliError> {
        rep.render(&cli.format).map_err(|e| CliError::Arg(e.to_string()))
    };
    match &cli.command {
        Command::Validate => {
            let mut rep = Report::new(&["rank", "roots", "base", "galois_order"]);
            rep.push(vec![
                form.rank().to_string(),
                form.brd.datum.roots.len().to_string(),
                form.brd.base.len().to_string(),
                form.elements.len().to_string(),
            ]);
            Ok((EXIT_OK, render(&rep)?))
        }
        Command::Endoscopy(args) => {
            let amb = Ambient::new(form.clone());
            let mut rep = Report::new(&["class", "s", "order", "elliptic", "out"]);
            for (id, t) in class_table(&form, &amb, args.max_order) {
                let elliptic = is_elliptic(&t);
                if args.elliptic && !elliptic {
                    continue;
                }
                rep.push(vec![
                    id,
                    format_rat_vec(t.s.coords()),
                    t.s.order().to_string(),
                    elliptic.to_string(),
                    out_group_in(&amb, &t).order().to_string(),
                ]);
            }
            Ok((EXIT_OK, render(&rep)?))
        }
        Command::Fiber(args) => {
            let amb = Ambient::new(form.clone());
            let levi = parse_levi(&form, &args.levi)?;
            let t = resolve_class(&form, &amb, args.max_order, Some(&args.class))?;
            let fib = fiber_in(&amb, &t, &levi).map_err(|e| CliError::Arg(e.to_string()))?;
            let mut rep = Report::new(&["idx", "conjugator", "cut", "restricted_class"]);
            let levi_amb = Ambient::new(Arc::new(form.levi_form(&levi.subset)));
            for (i, e) in fib.iter().enumerate() {
                let word: Vec<String> =
                    e.conjugator.word.iter().map(|k| k.to_string()).collect();
                let tm = x_map_in(&amb, e);
                rep.push(vec![
                    i.to_string(),
                    if word.is_empty() { "e".to_string() } else { word.join(".") },
                    format_subset(&e.h_levi.base_positions),
                    class_id_in(&levi_amb, &tm).0,
                ]);
            }
            Ok((EXIT_OK, render(&rep)?))
        }
        Command::Acceptable(args) => {
            let nu = parse_rat_vec(&args.nu, form.rank())?;
            let w = parse_rat_vec(&args.w, form.rank())?;
            let levi = endokit_core::root_datum::levi_from_cochar(&form.brd, &nu);
            let g = ValuationElt { w };
            let ok = is_acceptable(&g, &nu, &levi, &form.brd)
                .map_err(|e| CliError::Arg(e.to_string()))?;
            let mut rep = Report::new(&["nu", "levi", "acceptable"]);
            rep.push(vec![format_rat_vec(&nu), format_subset(&levi.subset), ok.to_string()]);
            Ok((if ok { EXIT_OK } else { EXIT_RESIDUAL }, render(&rep)?))
        }
        Command::Kottwitz(args) => {
            let mu = parse_int_vec(&args.mu, form.rank())?;
            let points = kottwitz_set(&form, &mu);
            Ok((EXIT_OK, render(&kottwitz_report(&points))?))
        }
        Command::SumCheck(args) => {
            let amb = Ambient::new(form.clone());
            let mu = if args.mu.is_empty() {
                vec![BigInt::from(0); form.rank()]
            } else {
                parse_int_vec(&args.mu, form.rank())?
            };
            let hcls = resolve_class(&form, &amb, args.max_order, args.class.as_deref())?;
            let residual = verify_sum_formula(&form, &hcls, &mu, cli.jobs);
            let code = if residual.is_zero() { EXIT_OK } else { EXIT_RESIDUAL };
            Ok((code, render(&sum_report(&residual))?))
        }
        Command::InductionCheck(args) => {
            let amb = Ambient::new(form.clone());
            let mu = parse_int_vec(&args.mu, form.rank())?;
            let levi = parse_levi(&form, &args.levi)?;
            let hcls = resolve_class(&form, &amb, args.max_order, args.class.as_deref())?;
            let points = kottwitz_set(&form, &mu);
            let b = points
                .get(args.b)
                .ok_or_else(|| {
                    CliError::Arg(format!(
                        "point index {} out of range (the set has {} points)",
                        args.b,
                        points.len()
                    ))
                })?;
            let residual = verify_induction(&form, &levi, &hcls, b, &mu)
                .map_err(|e| CliError::Arg(e.to_string()))?;
            let code = if residual.is_zero() { EXIT_OK } else { EXIT_RESIDUAL };
            Ok((code, render(&sum_report(&residual))?))
        }
    }
}

/// Sanity helper for tests: the stable Levi subsets of a spec.
pub fn spec_stable_subsets(form: &GaloisForm) -> Vec<BTreeSet<usize>> {
    let arc = Arc::new(form.clone());
    stable_subsets(&arc)
}

/// Build a TOML spec string for a builtin group; used by tests.
pub fn builtin_spec(kind: &str, n: usize) -> String {
    format!("[group]\nbuiltin = \"{kind}\"\nn = {n}\n")
}

#[allow(dead_code)]
fn torsion_display(s: &TorsionVec) -> String {
    format_rat_vec(s.coords())
}
