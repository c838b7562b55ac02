//! Command-line front end: parse a phase or polynomial, run the analysis
//! pipeline, and emit JSON/CSV/SVG reports.
//!
//! Exit codes: 0 success, 1 error, 2 degenerate phase (a report is still
//! produced).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use newton_resolve::error::ResolveError;
use newton_resolve::exponent;
use newton_resolve::parse::{parse_poly_with, ParseOptions};
use newton_resolve::puiseux::PuiseuxPoly;
use newton_resolve::resolve::{resolve, Mode, RegionTree, ResolveConfig, SectorLabel};
use newton_resolve::svg::polygon_svg;
use newton_resolve::unipoly::RootSign;
use newton_resolve::verify;

#[derive(Parser)]
#[command(
    name = "newton-resolve",
    about = "Newton-polygon monomialization and sharp oscillatory-integral decay exponents",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Coefficient mode when irrational edge roots appear.
    #[arg(long, value_parser = ["exact", "numeric"], default_value = "exact")]
    mode: String,
    /// Truncation order for series(...) factors and stable-branch tails.
    #[arg(long = "series-order", default_value_t = 24)]
    series_order: u64,
    /// Maximum recursion depth of the resolution.
    #[arg(long = "max-depth", default_value_t = 64)]
    max_depth: u64,
    /// Domain half-width epsilon (numeric checks only).
    #[arg(long = "epsilon", default_value_t = 1e-2)]
    epsilon: f64,
    /// Sector selection: first quadrant or all four drivers.
    #[arg(long, value_parser = ["q1", "full"], default_value = "q1")]
    sector: String,
    /// Decimal digits for numeric-mode root refinement.
    #[arg(long, default_value_t = 30)]
    precision: u32,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the decay-exponent report for a phase polynomial.
    Analyze {
        phase: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run the resolution of singularities on a polynomial and emit the
    /// region tree.
    Resolve {
        poly: String,
        #[command(flatten)]
        opts: CommonOpts,
        /// Directory for per-stage polygon SVG renderings.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Numerically verify the predicted decay slope (and optionally the
    /// monomialization) of a phase.
    Verify {
        phase: String,
        #[command(flatten)]
        opts: CommonOpts,
        /// Lambda range LO..HI, geometric grid with 5 points per decade.
        #[arg(long, default_value = "1e2..1e6")]
        lambda: String,
        /// CSV output path for the witness table.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also resolve the trilinear derivative and run monomial-domination
        /// and partition-coverage checks on the tree.
        #[arg(long)]
        tree: bool,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NEWTON_RESOLVE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze { phase, opts } => cmd_analyze(&phase, &opts),
        Command::Resolve { poly, opts, svg } => cmd_resolve(&poly, &opts, svg.as_deref()),
        Command::Verify {
            phase,
            opts,
            lambda,
            csv,
            tree,
        } => cmd_verify(&phase, &opts, &lambda, csv.as_deref(), tree),
    }
}

fn build_config(opts: &CommonOpts) -> ResolveConfig {
    ResolveConfig {
        mode: if opts.mode == "numeric" {
            Mode::Numeric
        } else {
            Mode::Exact
        },
        truncation_order: opts.series_order,
        max_depth: opts.max_depth,
        epsilon_domain: num_rational::BigRational::from_float(opts.epsilon)
            .unwrap_or_else(|| num_rational::BigRational::new(1.into(), 100.into())),
        precision_digits: opts.precision,
        boundary_tolerance: 1e-9,
    }
}

fn parse_input(text: &str, opts: &CommonOpts) -> Result<PuiseuxPoly, String> {
    parse_poly_with(
        text,
        &ParseOptions {
            series_order: Some(opts.series_order),
        },
    )
    .map_err(|e| e.to_string())
}

fn emit_json(value: &serde_json::Value, path: Option<&std::path::Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(|e| e.to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(phase: &str, opts: &CommonOpts) -> Result<ExitCode, String> {
    let s = parse_input(phase, opts)?;
    let report = exponent::analyze(&s, phase).map_err(|e| e.to_string())?;
    emit_json(&report.to_json(), opts.json.as_deref())?;
    if report.degenerate_trilinear {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn sector_labels(opts: &CommonOpts) -> Vec<SectorLabel> {
    if opts.sector == "full" {
        vec![
            SectorLabel {
                x_positive: true,
                y_sign: RootSign::Positive,
            },
            SectorLabel {
                x_positive: true,
                y_sign: RootSign::Negative,
            },
            SectorLabel {
                x_positive: false,
                y_sign: RootSign::Positive,
            },
            SectorLabel {
                x_positive: false,
                y_sign: RootSign::Negative,
            },
        ]
    } else {
        vec![SectorLabel::quadrant_1()]
    }
}

fn resolve_sectors(
    poly: &PuiseuxPoly,
    opts: &CommonOpts,
) -> Result<Vec<(SectorLabel, RegionTree)>, String> {
    let config = build_config(opts);
    let mut out = Vec::new();
    for sector in sector_labels(opts) {
        match resolve(poly, sector, &config) {
            Ok(tree) => out.push((sector, tree)),
            Err(ResolveError::IrrationalBranch { path, lo, hi }) => {
                return Err(format!(
                    "irrational branch at {path} (root in [{lo}, {hi}]); rerun with --mode numeric"
                ))
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(out)
}

fn cmd_resolve(
    poly_text: &str,
    opts: &CommonOpts,
    svg_dir: Option<&std::path::Path>,
) -> Result<ExitCode, String> {
    let poly = parse_input(poly_text, opts)?;
    let trees = resolve_sectors(&poly, opts)?;
    if let Some(dir) = svg_dir {
        fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        for (sector, tree) in &trees {
            for (i, polygon) in tree.polygons.iter().enumerate() {
                let Some(polygon) = polygon.as_ref() else {
                    continue;
                };
                let pair = &tree.pairs[i];
                let title = format!(
                    "sector {} stage {} path {}",
                    sector.render(),
                    pair.stage,
                    pair.path_string()
                );
                let name = format!(
                    "{}_pair{:03}_stage{}.svg",
                    sector.render(),
                    i,
                    pair.stage
                );
                fs::write(dir.join(name), polygon_svg(polygon, &title))
                    .map_err(|e| e.to_string())?;
            }
        }
    }
    let value = if trees.len() == 1 {
        trees[0].1.to_json()
    } else {
        serde_json::json!({
            "sectors": trees
                .iter()
                .map(|(s, t)| serde_json::json!({
                    "sector": s.render(),
                    "tree": t.to_json(),
                }))
                .collect::<Vec<_>>(),
        })
    };
    emit_json(&value, opts.json.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn parse_lambda_range(text: &str) -> Result<(f64, f64), String> {
    let Some((lo, hi)) = text.split_once("..") else {
        return Err(format!("bad lambda range `{text}`, expected LO..HI"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad lambda `{lo}`"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad lambda `{hi}`"))?;
    if !(lo > 0.0 && hi > lo) {
        return Err("lambda range must satisfy 0 < LO < HI".into());
    }
    Ok((lo, hi))
}

fn cmd_verify(
    phase: &str,
    opts: &CommonOpts,
    lambda: &str,
    csv: Option<&std::path::Path>,
    with_tree: bool,
) -> Result<ExitCode, String> {
    let s = parse_input(phase, opts)?;
    let report = exponent::analyze(&s, phase).map_err(|e| e.to_string())?;
    let (lo, hi) = parse_lambda_range(lambda)?;
    let grid = verify::lambda_grid(lo, hi, 5);

    let mut summary = serde_json::Map::new();
    summary.insert("phase".into(), serde_json::json!(phase));
    let mut degenerate = false;
    match verify::run_witness(&s, &grid) {
        Ok(w) => {
            if let Some(path) = csv {
                let mut text = String::from("lambda,value_re,value_im,abs,norm_product,ratio\n");
                for p in &w.points {
                    text.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        p.lambda,
                        p.value.re,
                        p.value.im,
                        p.value.norm(),
                        p.norm_product,
                        p.ratio
                    ));
                }
                fs::write(path, text).map_err(|e| e.to_string())?;
            }
            summary.insert(
                "witness".into(),
                serde_json::json!({
                    "fitted_slope": w.fit.slope,
                    "predicted_slope": w.predicted_slope,
                    "residual": w.fit.residual,
                    "points": w.fit.points,
                    "a_scale": w.a_scale,
                    "lambda_lo": lo,
                    "lambda_hi": hi,
                    "slope_error": (w.fit.slope - w.predicted_slope).abs(),
                }),
            );
        }
        Err(e) => {
            degenerate = matches!(e, newton_resolve::error::VerifyError::DegeneratePhase);
            summary.insert(
                "witness".into(),
                serde_json::json!({ "skipped": e.to_string() }),
            );
        }
    }

    if with_tree && !report.degenerate_trilinear {
        let p = s
            .trilinear_derivative()
            .map_err(|e| e.to_string())?;
        let config = build_config(opts);
        match resolve(&p, SectorLabel::quadrant_1(), &config) {
            Ok(tree) => {
                let xs = [1e-3, 1e-4, 1e-5, 1e-6];
                let domination: Vec<serde_json::Value> = tree
                    .leaves()
                    .iter()
                    .filter_map(|&leaf| {
                        verify::check_monomial_domination(&tree, leaf, &xs, 16)
                    })
                    .map(|d| {
                        serde_json::json!({
                            "node": d.node,
                            "widths": d.widths,
                            "non_increasing": d.non_increasing,
                        })
                    })
                    .collect();
                let coverage = verify::check_partition_coverage(&tree, 2000, 20260809);
                summary.insert(
                    "tree_checks".into(),
                    serde_json::json!({
                        "domination": domination,
                        "coverage": {
                            "total": coverage.total,
                            "single": coverage.single,
                            "duplicates": coverage.duplicates.len(),
                            "misses": coverage.misses.len(),
                        },
                    }),
                );
            }
            Err(e) => {
                summary.insert(
                    "tree_checks".into(),
                    serde_json::json!({ "skipped": e.to_string() }),
                );
            }
        }
    }

    summary.insert("report".into(), report.to_json());
    emit_json(&serde_json::Value::Object(summary), opts.json.as_deref())?;
    if degenerate || report.degenerate_trilinear {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
