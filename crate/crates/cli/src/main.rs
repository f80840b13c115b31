use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use dp3_core::enumerate::{count_matchings, formula_count, kasteleyn_count, CountResult};
use dp3_core::genfun::closed_form_z;
use dp3_core::json::to_sorted_string;
use dp3_core::render::{to_svg, RenderOptions};
use dp3_core::shuffle::{grow, DiamondCache, SeededBits};
use dp3_core::{build_diamond, height_function, verify, Matching, Order};
use num_rational::BigRational;

/// Output directory for `render` when no `-o` is given.
const OUT_DIR_VAR: &str = "DP3_OUT_DIR";

#[derive(Parser)]
#[command(name = "dp3", version, about = "Diamonds, perfect matchings and domino shuffling on the dP3 lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the diamond D_m as JSON.
    Build {
        #[arg(long)]
        order: Order,
    },
    /// Count the perfect matchings of D_m.
    Count {
        #[arg(long)]
        order: Order,
        #[arg(long, value_enum, default_value_t = CountMethod::Formula)]
        method: CountMethod,
    },
    /// Sample a perfect matching of D_m by shuffling from D_0.
    Sample {
        #[arg(long)]
        order: Order,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one JSON line per shuffle step to this file, or to stderr for `-`.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Print the generating function Z_m(a, b, c).
    Zpoly {
        #[arg(long)]
        order: Order,
        /// Evaluate exactly at a point, e.g. `1,1/2,3`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Draw a diamond, optionally with a matching read as JSON, to SVG.
    Render {
        /// Matching JSON file, or `-` for stdin. Read from stdin when no `--order` is given.
        #[arg(long)]
        input: Option<String>,
        /// Draw the bare diamond of this order.
        #[arg(long, conflicts_with = "input")]
        order: Option<Order>,
        /// Fill squares by height.
        #[arg(long)]
        heights: bool,
        /// Outline the active kites.
        #[arg(long)]
        ovals: bool,
        #[arg(long)]
        no_graph: bool,
        #[arg(long, default_value_t = 40.0)]
        scale: f64,
        /// Output file. Defaults to `diamond_<order>.svg` in $DP3_OUT_DIR or the current directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suite; exit status 0 iff every check passes.
    Verify {
        #[arg(long, default_value = "2.5")]
        max_order: Order,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    Formula,
    Brute,
    Kasteleyn,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    let mut out = io::stdout().lock();
    match command {
        Command::Build { order } => {
            writeln!(out, "{}", build_diamond(order)?.to_json())?;
        }
        Command::Count { order, method } => return count(&mut out, order, method),
        Command::Sample { order, seed, trace } => {
            let mut sink: Option<Box<dyn Write>> = match trace.as_deref() {
                None => None,
                Some("-") => Some(Box::new(io::stderr())),
                Some(path) => Some(Box::new(io::BufWriter::new(
                    fs::File::create(path).with_context(|| format!("creating {path}"))?,
                ))),
            };
            let mut write_err = None;
            let (d, m) = grow(&mut DiamondCache::new(), order, |s| SeededBits::new(seed, s), |t, _, _| {
                if let Some(w) = sink.as_mut() {
                    let line = to_sorted_string(&t.summary());
                    if let Err(e) = writeln!(w, "{line}") {
                        write_err.get_or_insert(e);
                    }
                }
            })?;
            if let Some(e) = write_err {
                return Err(e).context("writing trace");
            }
            if let Some(w) = sink.as_mut() {
                w.flush()?;
            }
            writeln!(out, "{}", m.to_json(&d))?;
        }
        Command::Zpoly { order, at } => {
            let z = closed_form_z(order);
            match at {
                None => writeln!(out, "{z}")?,
                Some(values) => {
                    let point = values
                        .split(',')
                        .map(|v| v.trim().parse::<BigRational>().with_context(|| format!("not a rational number: {v}")))
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    let Ok(point) = <[BigRational; 3]>::try_from(point) else {
                        bail!("--at takes three comma-separated values");
                    };
                    writeln!(out, "{}", z.evaluate(&point))?;
                }
            }
        }
        Command::Render { input, order, heights, ovals, no_graph, scale, output } => {
            let (d, m) = match order {
                Some(order) => (build_diamond(order)?, None),
                None => {
                    let text = read_input(input.as_deref().unwrap_or("-"))?;
                    let d = build_diamond(Matching::order_of_json(&text)?)?;
                    let m = Matching::from_json(&d, &text)?;
                    (d, Some(m))
                }
            };
            if heights && m.is_none() {
                bail!("--heights needs a matching");
            }
            let h = if heights { Some(height_function(&d, m.as_ref().expect("checked above"))?) } else { None };
            let mut opts = RenderOptions { scale, ..RenderOptions::default() };
            opts.show.graph = !no_graph;
            opts.show.heights = heights;
            opts.show.kite_ovals = ovals;
            let svg = to_svg(&d, m.as_ref(), h.as_ref(), &opts)?;
            let path = output.unwrap_or_else(|| {
                let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_default();
                dir.join(format!("diamond_{}.svg", d.order()))
            });
            fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "{}", path.display())?;
        }
        Command::Verify { max_order } => {
            let report = verify::run(max_order);
            writeln!(out, "{}", report.to_json())?;
            if !report.passed {
                for c in report.failures() {
                    eprintln!("failed: {} at {:?}: {}", c.name, c.order.map(|o| o.to_string()), c.detail);
                }
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn count(out: &mut impl Write, order: Order, method: CountMethod) -> anyhow::Result<ExitCode> {
    let single = |method| -> anyhow::Result<CountResult> {
        let d = || build_diamond(order);
        Ok(match method {
            CountMethod::Formula => formula_count(order),
            CountMethod::Brute => count_matchings(&d()?)?,
            CountMethod::Kasteleyn => kasteleyn_count(&d()?)?,
            CountMethod::All => unreachable!(),
        })
    };
    if method != CountMethod::All {
        writeln!(out, "{}", single(method)?.to_json())?;
        return Ok(ExitCode::SUCCESS);
    }
    let results = [CountMethod::Formula, CountMethod::Brute, CountMethod::Kasteleyn]
        .into_iter()
        .map(single)
        .collect::<anyhow::Result<Vec<_>>>()?;
    let docs: Vec<serde_json::Value> =
        results.iter().map(|r| serde_json::from_str(&r.to_json())).collect::<Result<_, _>>()?;
    writeln!(out, "{}", serde_json::Value::Array(docs))?;
    if results.iter().any(|r| r.count != results[0].count) {
        eprintln!("error: counting methods disagree");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn read_input(source: &str) -> anyhow::Result<String> {
    let mut text = String::new();
    if source == "-" {
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
    } else {
        text = fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
    }
    Ok(text)
}
