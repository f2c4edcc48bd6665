//! `polar` — command-line surface for the last-subconstituent computations.
//!
//! Subcommands: `suborbits`, `verify`, `graph`, `scheme`, `classify`.
//! Machine output is JSON and deterministic (identical configuration gives
//! byte-identical output); timings go to stderr. Exit codes: 0 success,
//! 1 verification failure, 2 usage or parameter error.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polar_core::geometry::OrthoSpace;
use polar_core::gf::Gf;
use polar_core::lambda::{self, GraphFormat, Vertex};
use polar_core::oracle;
use polar_core::qsrg;
use polar_core::scheme::{self, SchemeOptions};
use polar_core::suborbits;
use polar_core::Error;

#[derive(Parser)]
#[command(name = "polar", version, about = "Suborbits, quasi-strong regularity and association schemes on the last subconstituent of orthogonal dual polar graphs")]
struct Cli {
    /// Worker-thread cap for parallel loops (default: all cores).
    #[arg(long, global = true, env = "POLAR_SUBORBITS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the suborbit table with closed-form lengths.
    Suborbits(SuborbitsArgs),
    /// Run verification suites against the brute-force oracle.
    Verify(VerifyArgs),
    /// Export the graph as an edge list, DIMACS file or JSON document.
    Graph(GraphArgs),
    /// Compute the ν=2 association scheme and its intersection numbers.
    Scheme(SchemeArgs),
    /// Classify a vertex into its suborbit, with a witness group element.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Field order (odd prime power, at least 3).
    #[arg(long)]
    q: u64,
    /// Witt index of the orthogonal space.
    #[arg(long)]
    nu: usize,
    /// Dimension of the definite block; only 2 is supported here.
    #[arg(long, default_value_t = 2)]
    delta: usize,
}

impl CommonArgs {
    fn space(&self) -> Result<OrthoSpace, Error> {
        if self.delta != 2 {
            return Err(Error::InvalidParameter(
                "only delta = 2 is supported by the command-line interface".into(),
            ));
        }
        let gf = Gf::new(self.q)?;
        OrthoSpace::standard(&gf, self.nu)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct SuborbitsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = TableFormat::Table)]
    format: TableFormat,
    /// Write the output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    Suborbits,
    Qsrg,
    Scheme,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Cap on the number of vertices for orbit enumeration.
    #[arg(long, default_value_t = 20_000)]
    max_vertices: u64,
    /// Cap on the number of vertex pairs for the census.
    #[arg(long, default_value_t = 10_000_000)]
    max_pairs: u64,
    /// Random base pairs per relation for intersection-number constancy.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Write the JSON report to a file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GraphFormatArg {
    Edgelist,
    Dimacs,
    Json,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    format: GraphFormatArg,
    /// Destination file; the graph goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SchemeArgs {
    /// Field order (odd prime power, at least 3); ν is fixed to 2.
    #[arg(long)]
    q: u64,
    /// Random base pairs per relation for intersection-number constancy.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Write the scheme JSON to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additionally write one CSV matrix p^k per relation into a directory.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Vertex encoding, e.g. '{"X":[0,0,0,0],"Z":[1,0,0,0]}'.
    #[arg(long)]
    vertex: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Suborbits(args) => cmd_suborbits(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Scheme(args) => cmd_scheme(args),
        Command::Classify(args) => cmd_classify(args),
    };
    eprintln!("elapsed: {:?}", started.elapsed());
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::AxiomViolation(_) | Error::Io(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SuborbitRow {
    label: String,
    size: u128,
    cumulative: u128,
}

fn cmd_suborbits(args: SuborbitsArgs) -> Result<ExitCode, Error> {
    let space = args.common.space()?;
    let gf = space.gf();
    let nu = space.nu();
    let mut rows = Vec::new();
    let mut cumulative: u128 = 0;
    for label in suborbits::all_labels(gf, nu) {
        let size = suborbits::suborbit_size(gf, nu, label)?;
        cumulative += size;
        rows.push(SuborbitRow {
            label: label.to_string(),
            size,
            cumulative,
        });
    }
    let rank = suborbits::rank_g0(gf.q() as u64, nu);
    let total = lambda::vertex_count(gf.q() as u128, nu);
    debug_assert_eq!(cumulative, total);

    let content = match args.format {
        TableFormat::Table => {
            let mut s = format!("{:<16}{:>16}{:>16}\n", "label", "length", "cumulative");
            for r in &rows {
                s.push_str(&format!("{:<16}{:>16}{:>16}\n", r.label, r.size, r.cumulative));
            }
            s.push_str(&format!("rank {rank}, total {total}"));
            s
        }
        TableFormat::Csv => {
            let mut s = String::from("label,length,cumulative\n");
            for r in &rows {
                s.push_str(&format!("{},{},{}\n", r.label, r.size, r.cumulative));
            }
            s
        }
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Doc {
                q: u64,
                nu: usize,
                rank: u128,
                total: u128,
                suborbits: Vec<SuborbitRow>,
            }
            serde_json::to_string_pretty(&Doc {
                q: gf.q() as u64,
                nu,
                rank,
                total,
                suborbits: rows,
            })
            .expect("serialization")
        }
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SuiteReport {
    name: String,
    pass: bool,
    details: serde_json::Value,
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let space = args.common.space()?;
    let mut suites = Vec::new();

    if matches!(args.suite, Suite::Suborbits | Suite::All) {
        let report = oracle::cross_validate(&space, args.max_vertices)?;
        let pass = report.pass();
        for a in &report.assertions {
            println!(
                "suborbits: {} — {}{}",
                if a.pass { "ok" } else { "FAIL" },
                a.name,
                if a.detail.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", a.detail)
                }
            );
        }
        suites.push(SuiteReport {
            name: "suborbits".into(),
            pass,
            details: serde_json::to_value(&report).expect("serialization"),
        });
    }

    if matches!(args.suite, Suite::Qsrg | Suite::All) {
        let report = qsrg::census(&space, args.max_pairs)?;
        let pass = report.pass();
        if pass {
            println!("qsrg: ok — census matches the closed-form parameter tuple");
        } else {
            for d in report.discrepancies() {
                println!("qsrg: FAIL — {d}");
            }
        }
        suites.push(SuiteReport {
            name: "qsrg".into(),
            pass,
            details: serde_json::to_value(&report).expect("serialization"),
        });
    }

    if matches!(args.suite, Suite::Scheme | Suite::All) {
        if space.nu() == 2 {
            let table = scheme::build_scheme(
                &space,
                SchemeOptions {
                    constancy_samples: args.samples,
                    seed: 0x5eed,
                },
            )?;
            let report = scheme::verify_closed_forms(&table);
            for e in report.entries.iter().filter(|e| !e.pass) {
                println!(
                    "scheme: FAIL — {} computed {} expected {}",
                    e.name, e.computed, e.expected
                );
            }
            println!(
                "scheme: {} — class {}, {} intersection-number identities checked",
                if report.pass { "ok" } else { "FAIL" },
                table.class,
                report.entries.len()
            );
            let pass = report.pass;
            suites.push(SuiteReport {
                name: "scheme".into(),
                pass,
                details: serde_json::json!({
                    "table": table,
                    "closed_forms": report,
                }),
            });
        } else if args.suite == Suite::Scheme {
            return Err(Error::InvalidParameter(
                "the scheme suite requires nu = 2".into(),
            ));
        } else {
            println!("scheme: skipped (requires nu = 2)");
        }
    }

    let all_pass = suites.iter().all(|s| s.pass);
    let doc = serde_json::json!({
        "q": args.common.q,
        "nu": args.common.nu,
        "pass": all_pass,
        "suites": suites,
    });
    if let Some(path) = &args.out {
        let mut f = File::create(path)?;
        writeln!(f, "{}", serde_json::to_string_pretty(&doc).expect("serialization"))?;
    }
    println!("verify: {}", if all_pass { "PASS" } else { "FAIL" });
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_graph(args: GraphArgs) -> Result<ExitCode, Error> {
    let space = args.common.space()?;
    let format = match args.format {
        GraphFormatArg::Edgelist => GraphFormat::EdgeList,
        GraphFormatArg::Dimacs => GraphFormat::Dimacs,
        GraphFormatArg::Json => GraphFormat::Json,
    };
    let summary = match &args.out {
        Some(path) => {
            let mut f = File::create(path)?;
            let summary = lambda::export_graph(&space, format, &mut f)?;
            println!("{} vertices, {} edges", summary.vertices, summary.edges);
            summary
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let summary = lambda::export_graph(&space, format, &mut lock)?;
            eprintln!("{} vertices, {} edges", summary.vertices, summary.edges);
            summary
        }
    };
    let _ = summary;
    Ok(ExitCode::SUCCESS)
}

fn cmd_scheme(args: SchemeArgs) -> Result<ExitCode, Error> {
    let gf = Gf::new(args.q)?;
    let space = OrthoSpace::standard(&gf, 2)?;
    let table = scheme::build_scheme(
        &space,
        SchemeOptions {
            constancy_samples: args.samples,
            seed: 0x5eed,
        },
    )?;
    if let Some(dir) = &args.csv_dir {
        std::fs::create_dir_all(dir)?;
        for &rel in &table.relations {
            let name = rel
                .to_string()
                .replace(['(', ')'], "_")
                .replace('=', "");
            let path = dir.join(format!("p_{name}.csv"));
            std::fs::write(path, table.p_matrix_csv(rel))?;
        }
    }
    let content = serde_json::to_string_pretty(&table).expect("serialization");
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(args: ClassifyArgs) -> Result<ExitCode, Error> {
    let space = args.common.space()?;
    let value: serde_json::Value = serde_json::from_str(&args.vertex)
        .map_err(|e| Error::InvalidParameter(format!("bad vertex JSON: {e}")))?;
    let vertex = Vertex::from_json(&space, &value)?;
    let (label, witness) = suborbits::classify(&space, &vertex);
    let doc = serde_json::json!({
        "label": label.to_string(),
        "size": u64::try_from(suborbits::suborbit_size(space.gf(), space.nu(), label)?)
            .map_err(|_| Error::CapExceeded("suborbit size exceeds u64".into()))?,
        "witness": witness,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("serialization"));
    Ok(ExitCode::SUCCESS)
}
