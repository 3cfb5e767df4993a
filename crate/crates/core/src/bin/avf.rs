use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{error::ErrorKind, Parser, Subcommand};

use avf_core::calibration::{fit_material, FitBounds, ForceTest};
use avf_core::config::{parse_config, RunConfig, PRESETS};
use avf_core::experiments::{compute_metrics, design_sweep};
use avf_core::io::{atomic_write, emit_plot, emit_trace, fit_report, metrics_document, parse_samples, parse_trace, sweep_csv, sweep_table, PlotSpec};
use avf_core::material::MaterialParams;
use avf_core::solver::{detect_events, run_ramp};

#[derive(Parser)]
#[command(name = "avf", version, about = "Quasi-static simulator for a thermally actuated shape-memory flytrap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one temperature ramp and write the motion trace.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV; defaults to `outputs.trace_csv` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tip plot; defaults to `outputs.svg` from the config.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Classify closure over a grid of lobe lengths and thicknesses.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated lobe lengths, mm.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        lengths: Vec<f64>,
        /// Comma-separated lobe thicknesses, mm.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        thicknesses: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fit switching temperature, width and plateau force to blocked-force samples.
    Calibrate {
        #[arg(long)]
        samples: PathBuf,
        /// Built-in material used as the initial guess.
        #[arg(long)]
        material: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closure, reopening and event temperatures of an existing trace.
    Metrics {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// List the named demonstrators.
    Presets,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = read(path)?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, svg } => {
            let cfg = load_config(&config)?;
            let out = out.or_else(|| cfg.outputs.trace_csv.as_ref().map(PathBuf::from)).ok_or_else(|| avf_core::Error::Config {
                path: "outputs.trace_csv".into(),
                msg: "no trace path; pass --out or set it in the config".into(),
            })?;
            let asm = cfg.assembly()?;
            let trace = run_ramp(&asm, &cfg.protocol, &cfg.solver)?;
            emit_trace(&trace, &out).with_context(|| format!("writing {}", out.display()))?;
            if let Some(svg) = svg.or_else(|| cfg.outputs.svg.as_ref().map(PathBuf::from)) {
                let mut switching = vec![(asm.left.spec.material.name.clone(), asm.left.spec.material.t_sw_c)];
                if let Some(s) = asm.layout.as_ref().and_then(|l| l.strands.first()) {
                    switching.push((s.material.name.clone(), s.material.t_sw_c));
                }
                emit_plot(&trace, &PlotSpec::tips(&switching), &svg).with_context(|| format!("writing {}", svg.display()))?;
            }
            let ev = detect_events(&trace, asm.x_open);
            let show = |t: Option<f64>| t.map_or("-".to_string(), |t| format!("{t:.2} °C"));
            println!(
                "{} rows; onset {}, closure {}, reopening {}, {} snap event(s)",
                trace.len(),
                show(ev.onset_temp),
                show(ev.closure_temp),
                show(ev.reopening_temp),
                ev.snaps.len()
            );
        }
        Command::Sweep {
            config,
            lengths,
            thicknesses,
            out,
            jobs,
        } => {
            let cfg = load_config(&config)?;
            if jobs == Some(0) {
                anyhow::bail!(avf_core::Error::Config {
                    path: "--jobs".into(),
                    msg: "must be at least 1".into()
                });
            }
            let cells = design_sweep(&lengths, &thicknesses, &cfg, jobs)?;
            atomic_write(&out, sweep_csv(&cells).as_bytes()).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", sweep_table(&cells));
        }
        Command::Calibrate { samples, material, out } => {
            let init = MaterialParams::builtin(&material).ok_or_else(|| avf_core::Error::Config {
                path: "--material".into(),
                msg: format!("unknown material `{material}`"),
            })?;
            let data = parse_samples(&read(&samples)?).with_context(|| format!("in samples {}", samples.display()))?;
            let test = ForceTest::default();
            let fit = fit_material(&data, &init, &test, &FitBounds::around(&init, &test))?;
            let report = fit_report(&fit);
            atomic_write(&out, report.as_bytes()).with_context(|| format!("writing {}", out.display()))?;
            print!("{report}");
        }
        Command::Metrics { trace, config } => {
            let cfg = load_config(&config)?;
            let asm = cfg.assembly()?;
            let trace = parse_trace(&read(&trace)?).with_context(|| format!("in trace {}", trace.display()))?;
            print!("{}", metrics_document(&compute_metrics(&trace, &asm)?));
        }
        Command::Presets => {
            for name in PRESETS {
                let cfg = RunConfig::preset(name)?;
                let d = &cfg.demonstrator;
                let strands = match d.layout.kind() {
                    Some(k) => format!("{} {} strand(s), {}", k.count(), d.strand.material, k.name()),
                    None => "no strands".into(),
                };
                println!("{name:<14} {} lobes a = {} mm, b = {} mm, {strands}", d.lobe_material, d.length_mm, d.thickness_mm);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let solver = e.chain().find_map(|c| c.downcast_ref::<avf_core::Error>()).is_some_and(|e| e.is_solver());
            ExitCode::from(if solver { 2 } else { 1 })
        }
    }
}
