use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gldpc::alist::save_alist;
use gldpc::channel::SnrConvention;
use gldpc::config::SimConfig;
use gldpc::cycles::{girth_of, girth_of_graph, scan_error_structures, ACYCLIC};
use gldpc::density::{best_tradeoff, rate_threshold_sweep, sweep_to_csv, DeEnsemble, DEFAULT_TOLERANCE};
use gldpc::graph::{design_rate, place_gc_nodes, GldpcCode};
use gldpc::qc::{search_shifts, QcProfile, SearchStrategy};
use gldpc::sim::{placement_search, run_bler, to_csv, to_json, PlacementEval};
use gldpc::{ComponentCode, GcPlacement, Result, TannerGraph};

#[derive(Parser)]
#[command(name = "gldpc", version, about = "QC-GLDPC code construction and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Power,
    Random,
    Exhaustive,
}

#[derive(Subcommand)]
enum Command {
    /// Build a QC profile, verify its girth and write it out.
    Construct {
        /// Circulant size.
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 12)]
        target_girth: usize,
        #[arg(long, default_value_t = 2)]
        rows: usize,
        #[arg(long, default_value_t = 6)]
        cols: usize,
        #[arg(long, value_enum, default_value = "power")]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_tries: usize,
        /// Explicit second-row shifts for columns 1.., comma separated.
        #[arg(long, value_delimiter = ',')]
        shifts: Option<Vec<usize>>,
        #[arg(long)]
        out_profile: Option<PathBuf>,
        #[arg(long)]
        out_alist: Option<PathBuf>,
    },
    /// Search random GC placements with a short simulation and keep the best.
    Place {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        nu: f64,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        /// Eb/N0 of the ranking simulation, dB.
        #[arg(long, default_value_t = 2.0)]
        snr: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 10)]
        i_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        component: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the Monte-Carlo simulation described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; the JSON sidecar goes next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Erasure density-evolution thresholds over a grid of GC fractions.
    DeSweep {
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,0.875,1")]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        var_degree: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        component: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Girth, short-structure and rate report for a code.
    Analyze {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, conflicts_with = "nu")]
        placement: Option<PathBuf>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        component: Option<PathBuf>,
    },
}

fn component(path: &Option<PathBuf>) -> Result<ComponentCode> {
    match path {
        Some(p) => ComponentCode::load(p),
        None => Ok(ComponentCode::hamming_6_3()),
    }
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct {
            s,
            target_girth,
            rows,
            cols,
            strategy,
            seed,
            max_tries,
            shifts,
            out_profile,
            out_alist,
        } => {
            let profile = match shifts {
                Some(row) => {
                    let p = QcProfile::two_row(s, &row)?;
                    let g = girth_of(&p.expand());
                    if g < target_girth {
                        eprintln!("warning: girth {g} is below the target {target_girth}");
                    }
                    p
                }
                None => {
                    let strategy = match strategy {
                        Strategy::Power => SearchStrategy::PowerSweep,
                        Strategy::Random => SearchStrategy::Random { seed, max_tries },
                        Strategy::Exhaustive => SearchStrategy::ExhaustiveRow,
                    };
                    let out = search_shifts(s, rows, cols, target_girth, strategy)?;
                    if let Some((a, b)) = out.power_pair {
                        println!("power pair: a = {a}, b = {b}");
                    }
                    println!("candidates tried: {}", out.candidates_tried);
                    out.profile
                }
            };
            let h = profile.expand();
            let girth = girth_of(&h);
            println!("profile:\n{}", profile.to_text().trim_end());
            println!("matrix: {} x {}", h.rows(), h.cols());
            println!("girth: {}", fmt_girth(girth));
            if let Some(p) = out_profile {
                profile.save(p)?;
            }
            if let Some(p) = out_alist {
                save_alist(&h, p)?;
            }
        }
        Command::Place {
            profile,
            nu,
            samples,
            snr,
            trials,
            i_max,
            seed,
            component: comp,
            out,
        } => {
            let graph = TannerGraph::from_parity(&QcProfile::load(profile)?.expand());
            let eval = PlacementEval {
                snr_db: snr,
                convention: SnrConvention::EbN0,
                trials,
                i_max,
                seed,
            };
            let res = placement_search(&graph, nu, samples, &component(&comp)?, &eval, seed)?;
            println!(
                "selected sample {} of {samples}: BLER {} ({} GC nodes, nu = {:.6})",
                res.index,
                res.blers[res.index],
                res.placement.n_gc(),
                res.placement.nu_actual()
            );
            res.placement.save(out)?;
        }
        Command::Simulate { config, out } => {
            let cfg = SimConfig::load(&config)?;
            let report = run_bler(&cfg)?;
            std::fs::write(&out, to_csv(&report.points))?;
            std::fs::write(sidecar_path(&out), to_json(&cfg, &report))?;
            println!(
                "n = {}, k = {}, overall rate = {:.6}, {} points, {:.1} s",
                report.n,
                report.k,
                report.overall_rate,
                report.points.len(),
                report.wall_secs
            );
        }
        Command::DeSweep {
            grid,
            var_degree,
            tol,
            component: comp,
            out,
        } => {
            let comp = component(&comp)?;
            let template = DeEnsemble::new(var_degree, comp.n(), 0.0, comp)?;
            let rows = rate_threshold_sweep(&grid, &template, tol)?;
            let csv = sweep_to_csv(&rows);
            match out {
                Some(p) => std::fs::write(p, &csv)?,
                None => print!("{csv}"),
            }
            if let Some(best) = best_tradeoff(&rows) {
                eprintln!("smallest gap {:.6} at nu = {}", best.gap, best.nu);
            }
        }
        Command::Analyze {
            profile,
            placement,
            nu,
            seed,
            component: comp,
        } => {
            let profile = QcProfile::load(profile)?;
            let graph = TannerGraph::from_parity(&profile.expand());
            let placement = match (placement, nu) {
                (Some(p), _) => GcPlacement::load(p, graph.n_checks())?,
                (None, Some(nu)) => place_gc_nodes(&graph, nu, seed)?,
                (None, None) => GcPlacement::none(graph.n_checks()),
            };
            let comp = component(&comp)?;
            let counts = scan_error_structures(&graph, &placement);
            let girth = girth_of_graph(&graph);
            let (j, k) = (profile.base_rows(), profile.base_cols());
            let nu_actual = placement.nu_actual();
            let code = GldpcCode::new(graph, placement, comp.clone())?;
            println!("n = {}, checks = {}, girth = {}", code.n(), code.graph.n_checks(), fmt_girth(girth));
            println!("GC nodes = {}, SPC nodes = {}, nu = {nu_actual:.6}", code.placement.n_gc(), code.placement.n_spc());
            println!(
                "cycles of length 4/6/8/10: {:?}; structure 1 = {}, structure 2 = {}",
                counts.by_length, counts.structure1, counts.structure2
            );
            println!(
                "full parity rows = {}, rank = {}, k = {}",
                code.h_full.rows(),
                code.encoder.rank(),
                code.k()
            );
            println!(
                "design rate = {:.6}, actual rate = {:.6}",
                design_rate(j, k, nu_actual, comp.k()),
                code.rate()
            );
        }
    }
    Ok(())
}

fn fmt_girth(g: usize) -> String {
    if g == ACYCLIC {
        "none (acyclic)".into()
    } else {
        g.to_string()
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
