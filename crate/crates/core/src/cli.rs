//! The `lefschetz` command line.
//!
//! Exit codes: 0 on success, 1 when a property suite reports failures, 2 for usage, parse
//! and validation errors. Stdout carries only the result.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::calculus::{barrow, canonical_representation, integrate, ConstructibleFunction};
use crate::complex::OpenSimplexSet;
use crate::document::{parse_instance, Instance, PAPER_EXAMPLE};
use crate::homology::{homology_traces, CompactSupportComplex};
use crate::lefschetz::lambda_c;
use crate::sheaf::{associated_function, sheaf_lefschetz};
use crate::simpmap::SignRule;
use crate::verify::{run_property_suite_with, InstanceBudget, Property, PropertyReport};

#[derive(Debug, Parser)]
#[command(
  name = "lefschetz",
  version,
  about = "Exact Lefschetz numbers and Lefschetz integrals of simplicial self-maps"
)]
struct Cli {
  /// Machine-readable JSON output.
  #[arg(long, global = true)]
  json: bool,

  #[command(subcommand)]
  command: Command,
}

#[derive(Debug, Args)]
struct InstanceArgs {
  /// Instance document (JSON).
  #[arg(long)]
  instance: PathBuf,
}

#[derive(Debug, Args)]
struct SetArgs {
  #[command(flatten)]
  instance: InstanceArgs,
  /// Named set from the document; the whole complex if omitted.
  #[arg(long)]
  set: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
  Direct,
  Barrow,
}

#[derive(Debug, Subcommand)]
enum Command {
  /// Combinatorial Lefschetz number of the map on a set.
  Lambda(SetArgs),
  /// Lefschetz number from compactly supported homology.
  Lhom(SetArgs),
  /// Lefschetz number of the map with coefficients in the document's sheaf.
  SheafLefschetz(InstanceArgs),
  /// Integral of the document's function (or the sheaf's stalk-dimension function).
  Integrate {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "direct")]
    method: Method,
  },
  /// Run property suites on random instances.
  Verify {
    /// Property name, or `all`.
    #[arg(long, default_value = "all")]
    property: String,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    max_vertices: usize,
    #[arg(long = "max-dim", default_value_t = 3)]
    max_dim: usize,
    /// Treat odd permutations as even in the chain map (mutation sentinel).
    #[arg(long, hide = true)]
    mutate_sign: bool,
  },
  /// Write a bundled example instance.
  Example {
    #[arg(value_parser = ["paper"])]
    name: String,
    /// Directory to write `paper_example.json` into; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
  },
}

/// A failure already rendered for the user, with its exit code.
struct Failure {
  code: i32,
  message: String,
}

fn usage(message: impl ToString) -> Failure {
  Failure { code: 2, message: message.to_string() }
}

fn load(path: &Path) -> Result<Instance, Failure> {
  let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
  parse_instance(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn select(instance: &Instance, name: Option<&str>) -> Result<OpenSimplexSet, Failure> {
  match name {
    None => Ok(OpenSimplexSet::full(instance.complex.clone())),
    Some(n) => instance.set(n).cloned().ok_or_else(|| usage(format!("no set named {n:?} in the instance"))),
  }
}

fn function_of(instance: &Instance) -> Result<ConstructibleFunction, Failure> {
  match (&instance.function, &instance.sheaf) {
    (Some(h), _) => Ok(h.clone()),
    (None, Some(sheaf)) => Ok(associated_function(sheaf)),
    (None, None) => Err(usage("instance has neither a function nor a sheaf")),
  }
}

fn scalar(out: &mut dyn Write, json: bool, command: &str, value: i64) -> std::io::Result<()> {
  if json {
    writeln!(out, "{}", json!({ "command": command, "value": value }))
  } else {
    writeln!(out, "{value}")
  }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
  let io = |e: std::io::Error| Failure { code: 2, message: e.to_string() };
  match cli.command {
    Command::Lambda(args) => {
      let inst = load(&args.instance.instance)?;
      let set = select(&inst, args.set.as_deref())?;
      let value = lambda_c(&inst.map, &set).map_err(usage)?;
      scalar(out, cli.json, "lambda", value).map_err(io)?;
    }
    Command::Lhom(args) => {
      let inst = load(&args.instance.instance)?;
      let set = select(&inst, args.set.as_deref())?;
      let complex = CompactSupportComplex::new(&inst.map, &set).map_err(usage)?;
      let summary = homology_traces(&complex).map_err(usage)?;
      if cli.json {
        let value = json!({
          "command": "lhom",
          "value": summary.lefschetz,
          "betti": summary.betti,
          "traces": summary.traces,
        });
        writeln!(out, "{value}").map_err(io)?;
      } else {
        writeln!(out, "{}", summary.lefschetz).map_err(io)?;
      }
    }
    Command::SheafLefschetz(args) => {
      let inst = load(&args.instance)?;
      let sheaf = inst.sheaf.as_ref().ok_or_else(|| usage("instance has no sheaf"))?;
      let value = sheaf_lefschetz(&inst.map, sheaf).map_err(usage)?;
      scalar(out, cli.json, "sheaf-lefschetz", value).map_err(io)?;
    }
    Command::Integrate { instance, method } => {
      let inst = load(&instance.instance)?;
      let h = function_of(&inst)?;
      let value = match method {
        Method::Direct => integrate(&inst.map, &canonical_representation(&h)),
        Method::Barrow => barrow(&inst.map, &h),
      }
      .map_err(usage)?;
      scalar(out, cli.json, "integrate", value).map_err(io)?;
    }
    Command::Verify { property, cases, seed, max_vertices, max_dim, mutate_sign } => {
      let properties: Vec<Property> =
        if property == "all" { Property::ALL.to_vec() } else { vec![property.parse().map_err(usage)?] };
      let budget = InstanceBudget { max_vertices, max_dimension: max_dim, case_count: cases, seed };
      budget.validate().map_err(usage)?;
      let rule = if mutate_sign { SignRule::FlippedOdd } else { SignRule::Oriented };
      let reports: Vec<PropertyReport> = properties
        .into_iter()
        .map(|p| run_property_suite_with(p, &budget, rule))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
      if cli.json {
        for line in reports.iter().flat_map(PropertyReport::json_lines) {
          writeln!(out, "{line}").map_err(io)?;
        }
      } else {
        writeln!(
          out,
          "{:<16} {:>6} {:>9}  {:<6} {:>10}",
          "property", "cases", "failures", "status", "elapsed_ms"
        )
        .map_err(io)?;
        for r in &reports {
          writeln!(
            out,
            "{:<16} {:>6} {:>9}  {:<6} {:>10}",
            r.property.name(),
            r.cases,
            r.failure_count(),
            if r.passed() { "pass" } else { "FAIL" },
            r.elapsed.as_millis()
          )
          .map_err(io)?;
          for f in r.failures() {
            let instance = f.instance.as_ref().map(|d| d.to_json()).unwrap_or_default();
            let _ = writeln!(
              err,
              "{} case {}: {}\n{instance}",
              r.property.name(),
              f.case,
              f.check.detail.as_deref().unwrap_or("failed")
            );
          }
        }
      }
      if reports.iter().any(|r| !r.passed()) {
        return Ok(1);
      }
    }
    Command::Example { name: _, out: dir } => match dir {
      None => write!(out, "{PAPER_EXAMPLE}").map_err(io)?,
      Some(dir) => {
        std::fs::create_dir_all(&dir).map_err(io)?;
        let path = dir.join("paper_example.json");
        std::fs::write(&path, PAPER_EXAMPLE).map_err(io)?;
        writeln!(out, "{}", path.display()).map_err(io)?;
      }
    },
  }
  Ok(0)
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
  I: IntoIterator<Item = T>,
  T: Into<OsString> + Clone,
{
  let cli = match Cli::try_parse_from(argv) {
    Ok(cli) => cli,
    Err(e) => {
      let code = if e.use_stderr() { 2 } else { 0 };
      let rendered = e.render().to_string();
      let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
      return code;
    }
  };
  match execute(cli, out, err) {
    Ok(code) => code,
    Err(Failure { code, message }) => {
      let _ = writeln!(err, "error: {message}");
      code
    }
  }
}
