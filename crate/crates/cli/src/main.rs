use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use smithles::anderson::{anderson_dual_degree, Convention, GradedGroup};
use smithles::bordismdb::{build_dual_les, build_les, Database};
use smithles::fgab::FgAbGroup;
use smithles::gradedalg::{
    adams_phi, james_period, smith_period_traced, total_sw, Base, BundleExpr, SmithPeriod,
    TangentialStructure,
};
use smithles::lescore::{
    parse_constraints, parse_sequence, print_sequence, solve, EdgeState, SequenceFile, Table,
};
use smithles::Error;

#[derive(Parser)]
#[command(name = "smithles", version, about = "Smith long exact sequences of bordism groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
}

#[derive(Args)]
struct DbArg {
    /// Bordism database; the built-in seed when absent.
    #[arg(long, env = "SMITHLES_DB", global = true)]
    db: Option<PathBuf>,
}

#[derive(Args)]
struct BundleArgs {
    #[arg(long, default_value = "BZ2")]
    base: String,
    /// e.g. `sigma`, `3*sigma`, `2 - L`.
    #[arg(long)]
    bundle: String,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest k with k*bundle admitting the structure, with obstruction trace.
    Period {
        #[arg(long)]
        structure: String,
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value_t = 64)]
        bound: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Total Stiefel-Whitney class of a bundle expression.
    Sw {
        #[command(flatten)]
        bundle: BundleArgs,
        /// Highest degree kept.
        #[arg(long, default_value_t = 8)]
        truncation: u32,
        #[command(flatten)]
        common: Common,
    },
    /// James periodicity 2^phi(k) for k = 1..=K.
    James {
        k: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Solves a sequence window and reports what stays ambiguous.
    LesSolve {
        input: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Anderson-dualized Smith sequence of a database recipe.
    Sbles {
        recipe: String,
        #[arg(long, allow_hyphen_values = true)]
        top: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        bottom: Option<i64>,
        #[arg(long, default_value = "field-theory")]
        convention: String,
        /// Also run the solver on the dual window and report its maps.
        #[arg(long)]
        solve: bool,
        #[command(flatten)]
        db: DbArg,
        #[command(flatten)]
        common: Common,
    },
    /// Anderson dual of one degree, from a database entry or given groups.
    Anderson {
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
        /// Group in the torsion degree (with --next, instead of --entry).
        #[arg(long)]
        group: Option<String>,
        /// Group one degree up, supplying the free part.
        #[arg(long)]
        next: Option<String>,
        #[arg(long, default_value = "field-theory")]
        convention: String,
        #[command(flatten)]
        db: DbArg,
        #[command(flatten)]
        common: Common,
    },
    /// Inspect and validate the bordism database.
    Db {
        #[command(subcommand)]
        action: DbAction,
        #[command(flatten)]
        db: DbArg,
    },
}

#[derive(Subcommand)]
enum DbAction {
    /// Entries and recipes.
    List,
    /// All stored degrees of one entry with provenance.
    Show {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Checks the database and that every recipe window builds and solves.
    Validate,
    /// The sequence window of a recipe, as a table or sequence file.
    Les {
        recipe: String,
        #[arg(long, allow_hyphen_values = true)]
        top: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        bottom: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Writes the database in canonical form.
    Dump {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        // malformed input is a usage error; everything else is a domain error
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Parse { .. } | Error::Schema(_)) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        error: anyhow!(msg.into()),
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        .map_err(anyhow::Error::from)
}

fn load_db(arg: &DbArg) -> anyhow::Result<Database> {
    match &arg.db {
        Some(path) => Database::load(path)
            .map_err(anyhow::Error::from)
            .with_context(|| format!("loading database {}", path.display())),
        None => Ok(Database::seed()),
    }
}

fn emit(s: &str) {
    print!("{s}");
    if !s.ends_with('\n') {
        println!();
    }
}

fn emit_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn emit_table(t: &Table, format: Format) {
    match format {
        Format::Csv => emit(&t.to_csv()),
        _ => emit(&t.to_ascii()),
    }
}

fn parse_bundle(args: &BundleArgs) -> anyhow::Result<BundleExpr> {
    let base: Base = args.base.parse()?;
    Ok(BundleExpr::parse(base, &args.bundle)?)
}

fn cmd_period(structure: &str, bundle: &BundleArgs, bound: u64, format: Format) -> Outcome {
    let s: TangentialStructure = structure.parse().map_err(anyhow::Error::from)?;
    let w = parse_bundle(bundle)?;
    let (period, trace) = smith_period_traced(s, &w, bound)?;
    let rows: Vec<Vec<String>> = trace
        .iter()
        .map(|(k, checks)| {
            let mut row = vec![k.to_string()];
            row.extend(checks.iter().map(|c| if c.vanishes { "0" } else { "nonzero" }.to_string()));
            row.push(checks.iter().all(|c| c.vanishes).to_string());
            row
        })
        .collect();
    let mut header = vec!["k".to_string()];
    header.extend(s.rule().iter().map(|o| o.to_string()));
    header.push("lifts".into());
    match format {
        Format::Json => emit_json(&json!({
            "structure": s.to_string(),
            "base": w.base().to_string(),
            "bundle": w.to_string(),
            "bound": bound,
            "period": match period { SmithPeriod::Exact(k) => json!(k), SmithPeriod::ExceedsBound(_) => Value::Null },
            "trace": trace.iter().map(|(k, checks)| json!({
                "k": k,
                "obstructions": checks.iter().map(|c| json!({
                    "class": c.obstruction.to_string(),
                    "vanishes": c.vanishes,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
        _ => {
            if format == Format::Ascii {
                println!("period of ({s}, {w} over {}): {period}", w.base());
            }
            emit_table(&Table { header, rows }, format);
        }
    }
    Ok(())
}

fn cmd_sw(bundle: &BundleArgs, truncation: u32, format: Format) -> Outcome {
    let w = parse_bundle(bundle)?;
    let total = total_sw(&w, truncation);
    match format {
        Format::Json => emit_json(&json!({
            "base": w.base().to_string(),
            "bundle": w.to_string(),
            "truncation": truncation,
            "total_sw": total.to_string(),
        })),
        Format::Csv => emit_table(
            &Table {
                header: vec!["bundle".into(), "total_sw".into()],
                rows: vec![vec![w.to_string(), total.to_string()]],
            },
            format,
        ),
        Format::Ascii => println!("w({w}) = {total}"),
    }
    Ok(())
}

fn cmd_james(k: u64, format: Format) -> Outcome {
    if k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let rows: Vec<Vec<String>> = (1..=k)
        .map(|j| vec![j.to_string(), adams_phi(j).to_string(), james_period(j).to_string()])
        .collect();
    match format {
        Format::Json => emit_json(&Value::Array(
            (1..=k)
                .map(|j| json!({"k": j, "phi": adams_phi(j), "period": james_period(j).to_string()}))
                .collect(),
        )),
        _ => emit_table(
            &Table {
                header: vec!["k".into(), "phi".into(), "period".into()],
                rows,
            },
            format,
        ),
    }
    Ok(())
}

fn sequence_table(file: &SequenceFile) -> Table {
    Table::from_sequence(&file.sequence)
}

fn edge_report(file: &SequenceFile) -> Vec<String> {
    file.sequence
        .edges
        .iter()
        .map(|e| match &e.state {
            EdgeState::KnownMap(f) => format!("{}: {f}", e.name),
            other => format!("{}: {other}", e.name),
        })
        .collect()
}

fn cmd_les_solve(input: &Path, constraints: Option<&Path>, format: Format) -> Outcome {
    let src = read(input)?;
    if src.trim().is_empty() {
        return Err(usage(format!("{}: empty sequence file", input.display())));
    }
    let mut file = parse_sequence(&src)
        .map_err(anyhow::Error::from)
        .with_context(|| format!("reading {}", input.display()))?;
    if let Some(path) = constraints {
        let extra = parse_constraints(&read(path)?, &file.sequence)
            .map_err(anyhow::Error::from)
            .with_context(|| format!("reading {}", path.display()))?;
        file.constraints.extend(extra);
    }
    let (solved, report) = solve(&file.sequence, &file.constraints)?;
    let out = SequenceFile {
        sequence: solved,
        constraints: file.constraints,
    };
    match format {
        Format::Json => emit(&print_sequence(&out)),
        Format::Csv => emit_table(&sequence_table(&out), format),
        Format::Ascii => {
            emit_table(&sequence_table(&out), format);
            println!();
            println!("maps:");
            for line in edge_report(&out) {
                println!("  {line}");
            }
            println!();
            println!("ambiguities:");
            for line in report.to_string().lines() {
                println!("  {line}");
            }
        }
    }
    Ok(())
}

fn recipe_in_range(db: &Database, name: &str, top: Option<i64>, bottom: Option<i64>) -> anyhow::Result<smithles::bordismdb::Recipe> {
    let r = db.recipe(name)?;
    let (t, b) = (top.unwrap_or(r.top), bottom.unwrap_or(r.bottom));
    if t < b {
        return Err(anyhow!(Error::Schema(format!("top {t} is below bottom {b}"))));
    }
    Ok(r.with_range(t, b))
}

fn cmd_sbles(
    recipe: &str,
    top: Option<i64>,
    bottom: Option<i64>,
    convention: &str,
    run_solver: bool,
    db: &DbArg,
    format: Format,
) -> Outcome {
    let conv: Convention = convention.parse().map_err(anyhow::Error::from)?;
    let db = load_db(db)?;
    let r = recipe_in_range(&db, recipe, top, bottom)?;
    let dual = build_dual_les(&db, &r, conv)?;
    for j in &dual.mixed_block_warnings {
        eprintln!(
            "warning: {}: free-to-torsion block not determined, set to zero",
            dual.sequence.edges[*j].name
        );
    }
    let mut file = SequenceFile {
        sequence: dual.sequence,
        constraints: Vec::new(),
    };
    let mut report = None;
    if run_solver {
        let (solved, rep) = solve(&file.sequence, &[])?;
        file.sequence = solved;
        report = Some(rep);
    }
    match format {
        Format::Json => emit(&print_sequence(&file)),
        Format::Csv => emit_table(&sequence_table(&file), format),
        Format::Ascii => {
            println!("Anderson dual of {} ({conv} convention)", r.name);
            emit_table(&sequence_table(&file), format);
            if let Some(rep) = report {
                println!();
                println!("maps:");
                for line in edge_report(&file) {
                    println!("  {line}");
                }
                println!();
                println!("ambiguities:");
                for line in rep.to_string().lines() {
                    println!("  {line}");
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_anderson(
    entry: Option<&str>,
    degree: Option<i64>,
    group: Option<&str>,
    next: Option<&str>,
    convention: &str,
    db: &DbArg,
    format: Format,
) -> Outcome {
    let conv: Convention = convention.parse().map_err(anyhow::Error::from)?;
    let (graded, d) = match (entry, group) {
        (Some(name), None) => {
            let d = degree.ok_or_else(|| usage("--entry needs --degree"))?;
            let db = load_db(db)?;
            let graded = db.graded();
            let g = graded
                .get(name)
                .cloned()
                .ok_or_else(|| anyhow!(Error::Contract(format!("no entry named {name:?}"))))?;
            (g, d)
        }
        (None, Some(g)) => {
            let d = degree.unwrap_or(0);
            let (t, f) = conv.source_degrees(d);
            let mut graded = GradedGroup::new("given", t.min(f), t.max(f));
            let parse = |s: &str| -> anyhow::Result<FgAbGroup> { Ok(s.parse::<FgAbGroup>()?) };
            graded.set(t, Some(parse(g)?))?;
            let upper = next.ok_or_else(|| usage("--group needs --next"))?;
            graded.set(f, Some(parse(upper)?))?;
            (graded, d)
        }
        _ => return Err(usage("give either --entry NAME --degree D or --group G --next H")),
    };
    let dual = anderson_dual_degree(&graded, d, conv)?;
    match format {
        Format::Json => emit_json(&json!({
            "entry": graded.name,
            "degree": d,
            "convention": conv.to_string(),
            "torsion": dual.torsion.to_string(),
            "free_rank": dual.free_rank,
            "group": dual.group().to_string(),
        })),
        Format::Csv => emit_table(
            &Table {
                header: vec!["entry".into(), "degree".into(), "dual".into()],
                rows: vec![vec![graded.name.clone(), d.to_string(), dual.group().to_string()]],
            },
            format,
        ),
        Format::Ascii => println!("I({})^{d} = {} ({conv} convention)", graded.name, dual.group()),
    }
    Ok(())
}

fn cmd_db(action: &DbAction, arg: &DbArg) -> Outcome {
    let db = load_db(arg)?;
    match action {
        DbAction::List => {
            println!("entries:");
            for e in &db.entries {
                let lo = e.groups.keys().next().copied().unwrap_or(0);
                let hi = e.groups.keys().next_back().copied().unwrap_or(0);
                println!("  {} (degrees {lo}..={hi})", e.name);
            }
            println!("recipes:");
            for r in &db.recipes {
                println!("  {} (rows {}..={}): {}", r.name, r.bottom, r.top, r.description);
            }
        }
        DbAction::Show { name, common } => {
            let e = db
                .entry(name)
                .ok_or_else(|| anyhow!(Error::Contract(format!("no entry named {name:?}"))))?;
            let rows: Vec<Vec<String>> = e
                .groups
                .iter()
                .map(|(d, g)| vec![d.to_string(), g.to_string(), e.provenance[d].clone()])
                .collect();
            match common.format {
                Format::Json => emit_json(&json!({
                    "name": e.name,
                    "groups": e.groups.iter().map(|(d, g)| (d.to_string(), json!(g.to_string()))).collect::<serde_json::Map<_, _>>(),
                    "provenance": e.provenance.iter().map(|(d, p)| (d.to_string(), json!(p))).collect::<serde_json::Map<_, _>>(),
                })),
                f => emit_table(
                    &Table {
                        header: vec!["degree".into(), "group".into(), "provenance".into()],
                        rows,
                    },
                    f,
                ),
            }
        }
        DbAction::Validate => {
            db.validate()?;
            for r in &db.recipes {
                let file = build_les(&db, r)?;
                solve(&file.sequence, &file.constraints)
                    .map_err(anyhow::Error::from)
                    .with_context(|| format!("recipe {}", r.name))?;
            }
            println!(
                "ok: {} entries, {} recipes, every recipe window is contradiction-free",
                db.entries.len(),
                db.recipes.len()
            );
        }
        DbAction::Les {
            recipe,
            top,
            bottom,
            common,
        } => {
            let r = recipe_in_range(&db, recipe, *top, *bottom)?;
            let file = build_les(&db, &r)?;
            match common.format {
                Format::Json => emit(&print_sequence(&file)),
                f => emit_table(&sequence_table(&file), f),
            }
        }
        DbAction::Dump { output } => match output {
            Some(path) => db.save(path)?,
            None => emit(&db.print()),
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Period {
            structure,
            bundle,
            bound,
            common,
        } => cmd_period(structure, bundle, *bound, common.format),
        Command::Sw {
            bundle,
            truncation,
            common,
        } => cmd_sw(bundle, *truncation, common.format),
        Command::James { k, common } => cmd_james(*k, common.format),
        Command::LesSolve {
            input,
            constraints,
            common,
        } => cmd_les_solve(input, constraints.as_deref(), common.format),
        Command::Sbles {
            recipe,
            top,
            bottom,
            convention,
            solve,
            db,
            common,
        } => cmd_sbles(recipe, *top, *bottom, convention, *solve, db, common.format),
        Command::Anderson {
            entry,
            degree,
            group,
            next,
            convention,
            db,
            common,
        } => cmd_anderson(
            entry.as_deref(),
            *degree,
            group.as_deref(),
            next.as_deref(),
            convention,
            db,
            common.format,
        ),
        Command::Db { action, db } => cmd_db(action, db),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
