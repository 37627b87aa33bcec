use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use labornet::calibration::{calibrate, verify, GivenParams};
use labornet::config::{Family, GroupTemplate, Scenario, ScenarioFile, BASELINE_MEAN_DEGREE};
use labornet::experiments::{
    referral_experiment, run_alpha_sweep, run_df_sweep, run_mean_degree_sweep, run_phi_sweep, run_scenario,
    run_structure_sweeps, run_table2, RunOptions, SweepResult, ALPHA_GRID, MEAN_DEGREE_MAX,
};
use labornet::model::GroupSpec;
use labornet::report::{self, ReferenceCheck};
use labornet::simulate::estimate_referral_rate;
use labornet::{solve_equilibrium, Error, GiniBase, Result};

#[derive(Parser)]
#[command(name = "labornet", version, about = "Referral-hiring labour market equilibria on social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario (or its sweep) and write CSV.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Derive gamma, beta, c and phi from the calibration targets.
    Calibrate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Two groups with mean degree 15 and 30 under each network family.
    Table2 {
        #[command(flatten)]
        common: Common,
        /// Write a markdown comparison against the published values.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Comparative statics along one axis.
    Sweep {
        #[arg(long, value_enum)]
        axis: SweepAxis,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo check of the referral arrival rate on explicit networks.
    Simulate(SimulateArgs),
    /// Run every experiment and write CSVs plus a summary report.
    ReproduceAll {
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = GiniArg::Group)]
        gini_base: GiniArg,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML); defaults to the published parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GiniArg::Group)]
    gini_base: GiniArg,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::ErdosRenyi)]
    family: FamilyArg,
    #[arg(long, default_value_t = BASELINE_MEAN_DEGREE)]
    mean: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 500_000)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of repetitions, with seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1)]
    reps: u64,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepAxis {
    MeanDegree,
    Alpha,
    Df,
    Phi,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    ErdosRenyi,
    Regular,
    ScaleFree,
}

#[derive(Clone, Copy, ValueEnum)]
enum GiniArg {
    Group,
    Individual,
}

impl From<GiniArg> for GiniBase {
    fn from(g: GiniArg) -> Self {
        match g {
            GiniArg::Group => GiniBase::Group,
            GiniArg::Individual => GiniBase::Individual,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Convergence { .. } | Error::Bracketing(_) => 2,
        Error::Infeasible(_) => 3,
        Error::Config(_) | Error::Domain(_) => 4,
        Error::Io(_) => 1,
    }
}

fn load(config: Option<&Path>) -> Result<(ScenarioFile, Scenario)> {
    let file = match config {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::default(),
    };
    let scenario = file.resolve()?;
    Ok((file, scenario))
}

fn options(file: &ScenarioFile, gini: GiniArg) -> RunOptions {
    RunOptions { solver: file.solver, gini_base: gini.into() }
}

fn emit(result: &SweepResult, out: Option<&Path>) -> Result<()> {
    for note in &result.notes {
        eprintln!("note: {note}");
    }
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            result.write_csv(fs::File::create(path)?)
        }
        None => result.write_csv(io::stdout().lock()),
    }
}

fn print_checks(title: &str, checks: &[ReferenceCheck]) {
    for c in checks {
        eprintln!("[{}] {title}: {}", if c.pass { "PASS" } else { "FAIL" }, c.label);
    }
}

fn cmd_calibrate(config: Option<&Path>) -> Result<()> {
    let file = match config {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::default(),
    };
    let p = file.params;
    let given = GivenParams { y: p.y, b: p.b, r: p.r, delta: p.delta, eta: p.eta };
    let params = calibrate(&given, &file.targets)?;
    let check = verify(&params, &file.targets)?;
    let text = toml::to_string(&params).map_err(|e| Error::Io(e.to_string()))?;
    println!("[params]\n{text}");
    println!(
        "# verification: u = {:.6}, u/v = {:.6}, w = {:.6}, referral share = {:.6}, max relative error = {:.2e}",
        check.u,
        check.u_over_v,
        check.wage,
        check.referral_share,
        check.max_relative_error()
    );
    Ok(())
}

fn cmd_sweep(axis: SweepAxis, common: &Common) -> Result<()> {
    let (file, scenario) = load(common.config.as_deref())?;
    let opts = options(&file, common.gini_base);
    let params = &scenario.params;
    let result = match axis {
        SweepAxis::MeanDegree => {
            let grid: Vec<u32> = (0..=MEAN_DEGREE_MAX).collect();
            run_mean_degree_sweep(params, &grid, &opts)?
        }
        SweepAxis::Alpha => run_alpha_sweep(params, &ALPHA_GRID, &opts)?,
        SweepAxis::Df => run_df_sweep(params, &opts)?,
        SweepAxis::Phi => run_phi_sweep(params, &opts)?,
    };
    emit(&result, common.out.as_deref())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (file, scenario) = load(args.config.as_deref())?;
    let family = match args.family {
        FamilyArg::ErdosRenyi => Family::ErdosRenyi,
        FamilyArg::Regular => Family::Regular,
        FamilyArg::ScaleFree => Family::ScaleFree,
    };
    let dist = GroupTemplate::with_mean(family, args.mean).to_dist()?;
    let mut out = io::stdout().lock();
    writeln!(out, "seed,rate,std_error,mean_field,z")?;
    let mut agree = 0;
    for seed in args.seed..args.seed + args.reps {
        let cfg = referral_experiment(&scenario.params, dist, args.workers, args.trials, seed, &file.solver)?;
        let est = estimate_referral_rate(&cfg)?;
        let z = if est.std_error > 0.0 { (est.rate - est.mean_field) / est.std_error } else { 0.0 };
        agree += est.agrees_within(3.0) as u64;
        writeln!(out, "{seed},{:.8},{:.3e},{:.8},{:.3}", est.rate, est.std_error, est.mean_field, z)?;
    }
    eprintln!("{agree}/{} repetitions within 3 standard errors", args.reps);
    Ok(())
}

fn cmd_reproduce_all(out_dir: &Path, gini: GiniArg) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let opts = RunOptions { gini_base: gini.into(), ..Default::default() };
    let mut summary = String::from("# Reproduction summary\n\n");

    let calibrated = calibrate(&GivenParams::default(), &Default::default())?;
    let checks = report::calibration_checks(&calibrated);
    print_checks("calibration", &checks);
    summary += &report::render("Calibration", &checks);

    let baseline_groups = vec![GroupSpec::new(1e6, GroupTemplate::with_mean(Family::ErdosRenyi, BASELINE_MEAN_DEGREE).to_dist()?)?; 2];
    let eq = solve_equilibrium(&calibrated, &baseline_groups, &opts.solver)?;
    let targets = verify(&calibrated, &Default::default())?;
    let checks = report::baseline_checks(&eq, &targets);
    print_checks("baseline", &checks);
    summary += &report::render("Baseline", &checks);

    let params = Default::default();
    let table2 = run_table2(&params, &opts)?;
    table2.write_csv(fs::File::create(out_dir.join("table2.csv"))?)?;
    let checks = report::table2_checks(&table2);
    print_checks("table2", &checks);
    summary += &report::render("Average number of contacts", &checks);

    let checks = report::table3_checks();
    print_checks("table3", &checks);
    summary += &report::render("Zipf mean degree", &checks);

    let structure = run_structure_sweeps(&params, &opts)?;
    structure.write_csv(fs::File::create(out_dir.join("structure.csv"))?)?;
    let checks = report::structure_checks(&structure);
    print_checks("structure", &checks);
    summary += &report::render("Network structure", &checks);

    let df = run_df_sweep(&params, &opts)?;
    df.write_csv(fs::File::create(out_dir.join("df_sweep.csv"))?)?;
    let checks = report::df_checks(&df);
    print_checks("df", &checks);
    summary += &report::render("Job-network degree", &checks);

    let phi = run_phi_sweep(&params, &opts)?;
    phi.write_csv(fs::File::create(out_dir.join("phi_sweep.csv"))?)?;
    let checks = report::phi_checks(&phi);
    print_checks("phi", &checks);
    summary += &report::render("Referral frequency", &checks);
    if !phi.notes.is_empty() {
        summary += "### Notes\n\n";
        for note in &phi.notes {
            summary += &format!("- {note}\n");
        }
    }

    fs::write(out_dir.join("summary.md"), summary)?;
    eprintln!("wrote results to {}", out_dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { common } => {
            let (file, scenario) = load(common.config.as_deref())?;
            let result = run_scenario(&scenario, &options(&file, common.gini_base))?;
            emit(&result, common.out.as_deref())
        }
        Command::Calibrate { config } => cmd_calibrate(config.as_deref()),
        Command::Table2 { common, report: report_path } => {
            let (file, scenario) = load(common.config.as_deref())?;
            let result = run_table2(&scenario.params, &options(&file, common.gini_base))?;
            emit(&result, common.out.as_deref())?;
            let checks = report::table2_checks(&result);
            print_checks("table2", &checks);
            if let Some(path) = report_path {
                fs::write(path, report::render("Average number of contacts", &checks))?;
            }
            Ok(())
        }
        Command::Sweep { axis, common } => cmd_sweep(axis, &common),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::ReproduceAll { out_dir, gini_base } => cmd_reproduce_all(&out_dir, gini_base),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
