//! Thin CLI over the isochron library: parse a scenario file, run one
//! subcommand's pipeline, write CSV, print a one-line summary. All numeric
//! work lives in the library; this file is argument plumbing and formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use isochron::burnup::solve_inventory;
use isochron::hfclock::{estimate_frequency, fringe_grid, simulate_fringe, run_campaign};
use isochron::ladder::{detect_aging, simulate_runs, test_memoryless};
use isochron::nuclide::NuclideRegistry;
use isochron::rng::{stream, Domain};
use isochron::scenario::{parse_scenario, ScenarioDocument};
use isochron::separation::{purity_after, stages_required};

#[derive(Parser)]
#[command(
    name = "isochron",
    version,
    about = "Isotope production, separation, and hyperfine-clock comparison at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output CSV path (default: <subcommand>.csv in the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed; every stochastic stage derives its streams from it.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Suppress the one-line summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Override the built-in nuclide data file.
    #[arg(long, global = true)]
    nuclides: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a transmutation chain and tabulate inventories over time.
    Chain { scenario: PathBuf },
    /// Evaluate an isotope-separation cascade's purity budget.
    Separation { scenario: PathBuf },
    /// Simulate one Ramsey fringe scan and estimate the offset.
    Ramsey { scenario: PathBuf },
    /// Run a two-ensemble clock-comparison campaign.
    Campaign { scenario: PathBuf },
    /// Simulate quantum-jump telegraph runs and test the decay statistics.
    Jumps { scenario: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Chain { .. } => "chain",
            Command::Separation { .. } => "separation",
            Command::Ramsey { .. } => "ramsey",
            Command::Campaign { .. } => "campaign",
            Command::Jumps { .. } => "jumps",
        }
    }

    fn scenario(&self) -> &PathBuf {
        match self {
            Command::Chain { scenario }
            | Command::Separation { scenario }
            | Command::Ramsey { scenario }
            | Command::Campaign { scenario }
            | Command::Jumps { scenario } => scenario,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            if !cli.quiet {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<String, String> {
    let Format::Csv = cli.format;
    let path = cli.command.scenario();
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read scenario {}: {e}", path.display()))?;
    let doc = parse_scenario(&text).map_err(|e| e.to_string())?;

    let loaded;
    let registry: &NuclideRegistry = match &cli.nuclides {
        Some(path) => {
            let data = fs::read_to_string(path)
                .map_err(|e| format!("cannot read nuclide data {}: {e}", path.display()))?;
            loaded = NuclideRegistry::parse(&data).map_err(|errors| {
                let lines: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
                format!("nuclide data {}: {}", path.display(), lines.join("; "))
            })?;
            &loaded
        }
        None => NuclideRegistry::builtin(),
    };

    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));

    match &cli.command {
        Command::Chain { .. } => cmd_chain(&doc, registry, cli.seed, &out),
        Command::Separation { .. } => cmd_separation(&doc, cli.seed, &out),
        Command::Ramsey { .. } => cmd_ramsey(&doc, cli.seed, &out),
        Command::Campaign { .. } => cmd_campaign(&doc, cli.seed, &out),
        Command::Jumps { .. } => cmd_jumps(&doc, cli.seed, &out),
    }
}

fn write_csv(path: &PathBuf, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_chain(
    doc: &ScenarioDocument,
    registry: &NuclideRegistry,
    seed: u64,
    out: &PathBuf,
) -> Result<String, String> {
    let (chain, scenario) = doc.chain_inputs(registry).map_err(|e| e.to_string())?;
    let traj = solve_inventory(&chain, &scenario).map_err(|e| e.to_string())?;

    let mut csv = format!("# seed={seed}\n");
    csv.push_str("time_s");
    for name in &traj.names {
        let _ = write!(csv, ",{name}");
    }
    csv.push('\n');
    for (t, row) in traj.times_s.iter().zip(&traj.atoms) {
        let _ = write!(csv, "{t:e}");
        for atoms in row {
            let _ = write!(csv, ",{atoms:e}");
        }
        csv.push('\n');
    }
    write_csv(out, &csv)?;

    let summary = match doc.output.product {
        Some(product) => {
            let report = isochron::burnup::yield_report(
                &chain,
                &traj,
                product,
                doc.output.negligible_threshold,
            )
            .map_err(|e| e.to_string())?;
            let double = match &report.double_capture {
                Some(dc) => format!(
                    ", double capture {} ratio {:.2e} ({})",
                    dc.nuclide,
                    dc.ratio,
                    if dc.negligible { "negligible" } else { "significant" }
                ),
                None => String::new(),
            };
            format!(
                "chain: {} {:.4e} atoms = {:.4} mg at t={} s{double}; wrote {}",
                report.nuclide,
                report.atoms_end,
                report.mass_g_end * 1e3,
                traj.times_s.last().unwrap_or(&0.0),
                out.display()
            )
        }
        None => format!(
            "chain: {} nuclides over {} grid points; wrote {}",
            traj.names.len(),
            traj.times_s.len(),
            out.display()
        ),
    };
    Ok(summary)
}

fn cmd_separation(doc: &ScenarioDocument, seed: u64, out: &PathBuf) -> Result<String, String> {
    let section = doc.separation_inputs().map_err(|e| e.to_string())?;
    let report = purity_after(&section.plan).map_err(|e| e.to_string())?;

    let mut csv = format!("# seed={seed}\n");
    let _ = writeln!(csv, "# total_suppression={:e}", report.total_suppression);
    let _ = writeln!(csv, "# product_recovery={:e}", report.product_recovery);
    let _ = writeln!(
        csv,
        "# product_yield_fraction={:e}",
        report.product_yield_fraction
    );
    if let (Some(per_stage), Some(target)) = (section.per_stage, section.target_suppression) {
        let stages = stages_required(per_stage, target).map_err(|e| e.to_string())?;
        let _ = writeln!(csv, "# stages_required={stages}");
    }
    csv.push_str("nuclide,fraction_before,fraction_after\n");
    for (id, after) in &report.composition {
        let before = section.plan.composition.get(id).copied().unwrap_or(0.0);
        let _ = writeln!(csv, "{id},{before:e},{after:e}");
    }
    write_csv(out, &csv)?;

    let product_after = report
        .composition
        .get(&section.plan.product)
        .copied()
        .unwrap_or(0.0);
    let contamination: f64 = 1.0 - product_after;
    Ok(format!(
        "separation: {} purity {:.6} (contamination {:.2e}) after {} stages, recovery {:.4}; wrote {}",
        section.plan.product,
        product_after,
        contamination,
        section.plan.stages.len(),
        report.product_recovery,
        out.display()
    ))
}

fn cmd_ramsey(doc: &ScenarioDocument, seed: u64, out: &PathBuf) -> Result<String, String> {
    let (spec, section) = doc.fringe_inputs().map_err(|e| e.to_string())?;
    let config = section.config();
    config.validate().map_err(|e| e.to_string())?;
    let grid = fringe_grid(section.free_s, section.grid_points, section.grid_span);
    let mut rng = stream(seed, Domain::Fringe, 0);
    let fringe = simulate_fringe(spec, &config, section.offset, &grid, &mut rng);

    let mut csv = format!("# seed={seed}\n");
    csv.push_str("detuning_hz,successes,shots\n");
    for (d, s) in fringe.detunings_rad_s.iter().zip(&fringe.successes) {
        let hz = d / (2.0 * std::f64::consts::PI);
        let _ = writeln!(csv, "{hz:e},{s},{}", fringe.shots_per_point);
    }
    write_csv(out, &csv)?;

    let estimate = estimate_frequency(spec, &config, &fringe).map_err(|e| e.to_string())?;
    Ok(format!(
        "ramsey: offset {:.4e} +/- {:.2e} fractional ({} points x {} shots, {} iterations); wrote {}",
        estimate.offset_fractional,
        estimate.sigma_fractional,
        fringe.detunings_rad_s.len(),
        fringe.shots_per_point,
        estimate.iterations,
        out.display()
    ))
}

fn cmd_campaign(doc: &ScenarioDocument, seed: u64, out: &PathBuf) -> Result<String, String> {
    let config = doc.campaign().map_err(|e| e.to_string())?;
    let outcome = run_campaign(&config, seed).map_err(|e| e.to_string())?;

    let mut csv = format!("# seed={seed}\n");
    csv.push_str("ensemble,ion_id,epoch_s,estimate,sigma\n");
    for (label, readings) in [
        ("new", &outcome.new_readings),
        ("natural", &outcome.natural_readings),
    ] {
        for r in readings {
            let _ = writeln!(
                csv,
                "{label},{},{:e},{:e},{:e}",
                r.ion, r.epoch_s, r.value_fractional, r.sigma_fractional
            );
        }
    }
    write_csv(out, &csv)?;

    let c = &outcome.comparison;
    Ok(format!(
        "campaign: delta {:.4e} +/- {:.2e} fractional, z={:.2}, alpha={} -> {}; wrote {}",
        c.delta_fractional,
        c.sigma_fractional,
        c.z_score,
        c.alpha,
        if c.distinguishable {
            "distinguishable"
        } else {
            "not distinguishable"
        },
        out.display()
    ))
}

fn cmd_jumps(doc: &ScenarioDocument, seed: u64, out: &PathBuf) -> Result<String, String> {
    let section = doc.ladder_inputs().map_err(|e| e.to_string())?;
    let runs = simulate_runs(&section.config, seed, section.runs).map_err(|e| e.to_string())?;

    let mut runs_csv = format!("# seed={seed}\n");
    runs_csv.push_str("run_id,decay_time_s\n");
    for run in &runs {
        let _ = writeln!(runs_csv, "{},{:e}", run.run, run.decay_time_s);
    }
    write_csv(out, &runs_csv)?;

    let probes_path = out.with_extension("probes.csv");
    let mut probes_csv = format!("# seed={seed}\n");
    probes_csv.push_str("run_id,t_probe_s,freq_frac,sigma\n");
    for run in &runs {
        for p in &run.probes {
            let _ = writeln!(
                probes_csv,
                "{},{:e},{:e},{:e}",
                run.run, p.t_s, p.freq_fractional, p.sigma_fractional
            );
        }
    }
    write_csv(&probes_path, &probes_csv)?;

    let aging = detect_aging(&runs).map_err(|e| e.to_string())?;
    let decay_times: Vec<f64> = runs.iter().map(|r| r.decay_time_s).collect();
    let memoryless =
        test_memoryless(&decay_times, section.bootstrap, seed).map_err(|e| e.to_string())?;
    Ok(format!(
        "jumps: {} runs, beta {:.4e} +/- {:.2e} /s (z={:.2}), KS p={:.3} ({} resamples); wrote {} + {}",
        runs.len(),
        aging.beta_per_s,
        aging.sigma,
        aging.z,
        memoryless.p_value,
        memoryless.bootstrap,
        out.display(),
        probes_path.display()
    ))
}
