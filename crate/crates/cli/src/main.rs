//! `nielsen`: reports, sweeps and model dumps for fiber-preserving maps of
//! torus bundles over the circle.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nielsen_core::cells::build_model;
use nielsen_core::classify::{evaluate_mf, fiber_deformable, pi1_relations, validate, BundleMapData};
use nielsen_core::error::ClassifyError;
use nielsen_core::geometry::derived_model;
use nielsen_core::lattice::IntMatrix2;
use nielsen_core::oracle::ModelHomotopyParams;
use nielsen_core::pipeline::{evaluate, Evaluation, Status};

#[derive(Parser)]
#[command(name = "nielsen", version, about = "One-parameter fixed point invariants of torus bundle maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify, evaluate MF and compare against the trace and the fixed set.
    Report(MapArgs),
    /// Evaluate a grid of parameters in one family.
    Sweep(SweepArgs),
    /// Print a cellular model (cells and operator matrices) as JSON.
    DumpModel(DumpArgs),
    /// Case of the classification table, normalizer and MF only.
    Classify(MapArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct MapArgs {
    /// Gluing matrix, row-major "a11,a12,a21,a22".
    #[arg(long = "A", allow_hyphen_values = true)]
    a: IntMatrix2,
    /// Fiber matrix, row-major.
    #[arg(long = "B", allow_hyphen_values = true)]
    b: IntMatrix2,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    c1: BigInt,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    c2: BigInt,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

impl MapArgs {
    fn data(&self) -> BundleMapData {
        BundleMapData::new(self.a.clone(), self.b.clone(), self.c1.clone(), self.c2.clone())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// A = I, B = (1 0; 0 b4)
    Square,
    /// A = B = (1 1; 0 -1)
    Triangulated,
    /// A = I, B = (1 b3; 0 b4)
    CaseTwo,
    /// A = (1 a3; 0 -1), B = (1 b3; 0 b4) with b3 = -a3 (b4 - 1) / 2
    CaseThree,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Inclusive range "lo..hi" or a comma list.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    c1: Range,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    c2: Range,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    b3: Range,
    #[arg(long, allow_hyphen_values = true, default_value = "2")]
    b4: Range,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    a3: Range,
    /// One JSON object per grid point instead of a table.
    #[arg(long)]
    jsonl: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    Square,
    Triangulated,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, value_enum)]
    model: ModelName,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    c1: BigInt,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    c2: BigInt,
    #[arg(long, allow_hyphen_values = true, default_value = "2")]
    b4: BigInt,
    /// Replace D0, D1 by the operators computed from the cell geometry.
    #[arg(long)]
    derived: bool,
}

#[derive(Clone, Debug)]
struct Range(Vec<i64>);

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
        if let Some((lo, hi)) = s.split_once("..") {
            return Ok(Range((num(lo)?..=num(hi)?).collect()));
        }
        if s.trim().is_empty() {
            return Ok(Range(Vec::new()));
        }
        s.split(',').map(num).collect::<Result<_, _>>().map(Range)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Report(args) => report(&args),
        Command::Classify(args) => classify(&args),
        Command::Sweep(args) => sweep(&args),
        Command::DumpModel(args) => dump_model(&args),
    };
    ExitCode::from(code as u8)
}

fn report(args: &MapArgs) -> i32 {
    let ev = evaluate(&args.data());
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&ev).expect("serializable")),
        Format::Text => print!("{}", render_report(&ev)),
    }
    ev.status.exit_code()
}

fn yes_no(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "yes",
        Some(false) => "NO",
        None => "-",
    }
}

fn render_report(ev: &Evaluation) -> String {
    let d = &ev.input;
    let mut s = String::new();
    let _ = writeln!(s, "input       A = {}  B = {}  c = ({}, {})", d.a, d.b, d.c1, d.c2);
    if !ev.violations.is_empty() {
        for v in &ev.violations {
            let _ = writeln!(s, "invalid     {v}");
        }
        return s;
    }
    let _ = writeln!(s, "validation  ok");
    if let Some(c) = &ev.classification {
        let _ = writeln!(s, "case        {}  (P = {})", c.label.case, c.label.normalizer);
        let n = &c.normalized;
        let _ = writeln!(s, "normalized  A = {}  B = {}  c = ({}, {})", n.a, n.b, n.c1, n.c2);
        let mf = c.mf.as_ref().map_or("-".to_string(), |m| m.to_string());
        let _ = writeln!(s, "MF          {mf}  ({}; c1(b4-1) - c2 b3 = {})", c.coverage.describe(), c.vanishing_form);
    }
    if let Some(r) = &ev.routing {
        let p = &r.params;
        let name = match p.case {
            nielsen_core::oracle::ModelCase::SquareB3Zero => "square",
            nielsen_core::oracle::ModelCase::TriB4MinusOne => "triangulated",
        };
        let _ = writeln!(
            s,
            "model       {name}: c1 = {}, c2 = {}, b4 = {}  (conjugator {})",
            p.c1, p.c2, p.b4, r.conjugator
        );
    }
    if let Some(t) = &ev.trace {
        let _ = writeln!(s, "R(F)        {}", t.r_chain);
        for e in &t.indices {
            let _ = writeln!(s, "  class of {}: index {}", e.marker, e.index);
        }
        let _ = writeln!(s, "N(F)        {}", t.nielsen);
        let _ = writeln!(s, "L(F)        ({}, {})", t.lefschetz[0], t.lefschetz[1]);
    }
    if let Some(o) = &ev.oracle {
        let _ = writeln!(s, "circles     {}  (two-branch homotopy: {})", o.circle_count, o.two_branch_circle_count);
        for c in &o.circles {
            let marker = c.class_marker.as_ref().map_or(String::new(), |m| format!("  [{m}]"));
            let _ = writeln!(s, "  {c}{marker}");
        }
    }
    for e in &ev.errors {
        let _ = writeln!(s, "error       {e}");
    }
    let a = &ev.agreement;
    let _ = writeln!(
        s,
        "agreement   MF = N(F): {}  N(F) = circles: {}  MF = circles: {}",
        yes_no(a.mf_nielsen),
        yes_no(a.nielsen_circles),
        yes_no(a.mf_circles)
    );
    let status = match ev.status {
        Status::Agree => "agree",
        Status::Disagree => "DISAGREE",
        Status::Invalid => "invalid",
        Status::Unsupported => "unsupported",
    };
    let _ = writeln!(s, "status      {status}");
    s
}

#[derive(Serialize, Deserialize)]
struct ClassifyOutput {
    violations: Vec<nielsen_core::classify::Violation>,
    classification: Option<nielsen_core::classify::MfEvaluation>,
    error: Option<String>,
    fiber_deformable: bool,
    relations: Vec<String>,
}

fn classify(args: &MapArgs) -> i32 {
    let d = args.data();
    let violations = validate(&d);
    let (classification, error, code) = match evaluate_mf(&d) {
        Ok(e) => {
            let code = if matches!(e.label.case, nielsen_core::classify::Case::IV | nielsen_core::classify::Case::V) {
                4
            } else {
                0
            };
            (Some(e), None, code)
        }
        Err(ClassifyError::NoMatch(m)) => (None, Some(m), 4),
        Err(e) => (None, Some(e.to_string()), 3),
    };
    let out = ClassifyOutput {
        violations,
        classification,
        error,
        fiber_deformable: fiber_deformable(&d.b),
        relations: if d.a.is_unimodular() {
            pi1_relations(&d.a).iter().map(|r| r.to_string()).collect()
        } else {
            vec![]
        },
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).expect("serializable")),
        Format::Text => {
            for v in &out.violations {
                println!("invalid     {v}");
            }
            if let Some(c) = &out.classification {
                println!("case        {}  (P = {})", c.label.case, c.label.normalizer);
                println!("normalized  A = {}  B = {}", c.normalized.a, c.normalized.b);
                let mf = c.mf.as_ref().map_or("-".to_string(), |m| m.to_string());
                println!("MF          {mf}  ({})", c.coverage.describe());
            }
            if let Some(e) = &out.error {
                println!("error       {e}");
            }
            println!("deformable  {}", out.fiber_deformable);
            for r in &out.relations {
                println!("relation    {r}");
            }
        }
    }
    code
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SweepRow {
    c1: i64,
    c2: i64,
    b3: i64,
    b4: i64,
    a3: i64,
    case: Option<String>,
    mf: Option<String>,
    nielsen: Option<usize>,
    circles: Option<usize>,
    status: Status,
}

fn family_point(f: Family, c1: i64, c2: i64, b3: i64, b4: i64, a3: i64) -> Option<(BundleMapData, [i64; 5])> {
    let m = IntMatrix2::new;
    let (a, b, key) = match f {
        Family::Square => (IntMatrix2::identity(), m(1, 0, 0, b4), [c1, c2, 0, b4, 0]),
        Family::Triangulated => (m(1, 1, 0, -1), m(1, 1, 0, -1), [c1, c2, 1, -1, 1]),
        Family::CaseTwo => (IntMatrix2::identity(), m(1, b3, 0, b4), [c1, c2, b3, b4, 0]),
        Family::CaseThree => {
            let num = -a3 * (b4 - 1);
            if num % 2 != 0 {
                return None;
            }
            (m(1, a3, 0, -1), m(1, num / 2, 0, b4), [c1, c2, num / 2, b4, a3])
        }
    };
    Some((BundleMapData::new(a, b, c1, c2), key))
}

fn sweep_rows(args: &SweepArgs) -> Vec<SweepRow> {
    let (b3s, b4s, a3s) = match args.family {
        Family::Square => (vec![0], args.b4.0.clone(), vec![0]),
        Family::Triangulated => (vec![1], vec![-1], vec![1]),
        Family::CaseTwo => (args.b3.0.clone(), args.b4.0.clone(), vec![0]),
        Family::CaseThree => (vec![0], args.b4.0.clone(), args.a3.0.clone()),
    };
    let mut points = Vec::new();
    for &c1 in &args.c1.0 {
        for &c2 in &args.c2.0 {
            for &b3 in &b3s {
                for &b4 in &b4s {
                    for &a3 in &a3s {
                        points.extend(family_point(args.family, c1, c2, b3, b4, a3));
                    }
                }
            }
        }
    }
    let mut rows: Vec<SweepRow> = points
        .par_iter()
        .map(|(d, [c1, c2, b3, b4, a3])| {
            let ev = evaluate(d);
            SweepRow {
                c1: *c1,
                c2: *c2,
                b3: *b3,
                b4: *b4,
                a3: *a3,
                case: ev.case().map(|c| c.to_string()),
                mf: ev.mf().map(|m| m.to_string()),
                nielsen: ev.nielsen(),
                circles: ev.circle_count(),
                status: ev.status,
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.c1, r.c2, r.b3, r.b4, r.a3));
    rows.dedup_by_key(|r| (r.c1, r.c2, r.b3, r.b4, r.a3));
    rows
}

fn sweep(args: &SweepArgs) -> i32 {
    let rows = sweep_rows(args);
    let opt = |x: &Option<String>| x.clone().unwrap_or_else(|| "-".into());
    let optn = |x: Option<usize>| x.map_or("-".to_string(), |n| n.to_string());
    if args.jsonl {
        for r in &rows {
            println!("{}", serde_json::to_string(r).expect("serializable"));
        }
    } else {
        println!(
            "{:>4} {:>4} {:>4} {:>4} {:>4}  {:<4} {:>5} {:>5} {:>7}  status",
            "c1", "c2", "b3", "b4", "a3", "case", "MF", "N(F)", "circles"
        );
        for r in &rows {
            println!(
                "{:>4} {:>4} {:>4} {:>4} {:>4}  {:<4} {:>5} {:>5} {:>7}  {:?}",
                r.c1,
                r.c2,
                r.b3,
                r.b4,
                r.a3,
                opt(&r.case),
                opt(&r.mf),
                optn(r.nielsen),
                optn(r.circles),
                r.status
            );
        }
    }
    let mismatches: Vec<&SweepRow> = rows.iter().filter(|r| r.status == Status::Disagree).collect();
    eprintln!("{} points, {} mismatches", rows.len(), mismatches.len());
    for r in &mismatches {
        eprintln!("  mismatch at c1 = {}, c2 = {}, b3 = {}, b4 = {}, a3 = {}", r.c1, r.c2, r.b3, r.b4, r.a3);
    }
    if mismatches.is_empty() {
        0
    } else {
        2
    }
}

fn dump_model(args: &DumpArgs) -> i32 {
    let params = match args.model {
        ModelName::Square => ModelHomotopyParams::square(args.c1.clone(), args.c2.clone(), args.b4.clone()),
        ModelName::Triangulated => ModelHomotopyParams::triangulated(args.c1.clone(), args.c2.clone()),
    };
    let mut model = build_model(&params);
    if args.derived {
        match derived_model(&model) {
            Ok(m) => model = m,
            Err(e) => {
                eprintln!("{e}");
                return 2;
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&model).expect("serializable"));
    0
}
