use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};

use multistage_mi::amputation::calibrate;
use multistage_mi::data::PatternKind;
use multistage_mi::dgp::{all_scenarios, printed_matrix, write_scenarios_csv};
use multistage_mi::harness::{checks, run_grid, GridConfig, GridSummary};
use multistage_mi::strategies::StrategyKind;

use crate::config::{merge_common, FileConfig};
use crate::SimulateArgs;

pub fn grid_config(args: &SimulateArgs, file: &FileConfig) -> Result<(GridConfig, PathBuf)> {
    let common = merge_common(&args.common, file)?;
    let seed = common
        .seed
        .ok_or_else(|| anyhow!("--seed is required for simulate (or `seed` in the config file)"))?;
    let mut cfg = GridConfig::new(seed);
    if let Some(s) = args.scenarios.clone().or_else(|| file.scenarios.clone()) {
        cfg.scenarios = s;
    }
    if let Some(k) = args.missingness.as_ref().or(file.missingness.as_ref()) {
        cfg.kinds = k
            .iter()
            .map(|s| s.parse::<PatternKind>())
            .collect::<Result<_, _>>()
            .context("--missingness")?;
    }
    if let Some(k) = args.strategies.as_ref().or(file.strategies.as_ref()) {
        cfg.strategies = k
            .iter()
            .map(|s| s.parse::<StrategyKind>())
            .collect::<Result<_, _>>()
            .context("--strategies")?;
    }
    cfg.replications = args.reps.or(file.reps).unwrap_or(cfg.replications);
    cfg.n = args.n.or(file.n).unwrap_or(cfg.n);
    cfg.m = common.m.unwrap_or(cfg.m);
    cfg.m1 = common.m1.unwrap_or(cfg.m1);
    cfg.m2 = common.m2.unwrap_or(cfg.m2);
    cfg.iterations = common.iterations.unwrap_or(cfg.iterations);
    cfg.method = common.method;
    cfg.threads = common.threads;
    cfg.validate().context("invalid simulation settings")?;
    let output = args.output.clone().or_else(|| file.output.clone()).unwrap_or_else(|| "results".into());
    Ok((cfg, output))
}

/// Returns `Ok(false)` when `--check` found a violation.
pub fn run(args: SimulateArgs) -> Result<bool> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let (cfg, output) = grid_config(&args, &file)?;
    fs::create_dir_all(&output).with_context(|| format!("creating {}", output.display()))?;

    let mut log = String::new();
    writeln!(log, "seed {} | n {} | replications {} | m {} | m1 {} | m2 {} | iterations {} | method {}",
        cfg.seed, cfg.n, cfg.replications, cfg.m, cfg.m1, cfg.m2, cfg.iterations, cfg.method)?;
    for s in all_scenarios().iter().filter(|s| s.repaired && cfg.scenarios.contains(&s.id)) {
        let printed = printed_matrix(s.rho_within, s.rho_between, s.rho_cross_lag)?;
        writeln!(
            log,
            "warning: scenario {} correlation matrix is not positive definite (smallest eigenvalue {:.4}); \
             generating from the nearest repaired matrix (smallest eigenvalue {:.2e})",
            s.id,
            printed.min_eigenvalue(),
            s.matrix.min_eigenvalue()
        )?;
    }
    for &k in &cfg.kinds {
        writeln!(log, "{}", calibrate(k, cfg.missing_rate)?)?;
    }

    let started = Instant::now();
    let runs = run_grid(&cfg)?;
    let summary = GridSummary::from_runs(&runs)?;
    let failures: usize = runs.iter().map(|c| c.failures.len()).sum();
    writeln!(log, "{} cells, {} failed replications, {:.1} s", runs.len(), failures, started.elapsed().as_secs_f64())?;
    for c in runs.iter().filter(|c| !c.failures.is_empty()) {
        for e in &c.failures {
            writeln!(log, "failure: scenario {} {} {}: {e}", c.scenario, c.kind, c.strategy)?;
        }
    }

    let create = |name: &str| -> Result<BufWriter<File>> {
        let path = output.join(name);
        Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
    };
    summary.write_csv(create("summary.csv")?)?;
    summary.write_figure_csv(create("figure.csv")?)?;
    write_scenarios_csv(create("scenarios.csv")?)?;

    eprint!("{log}");
    let mut ok = true;
    if args.check {
        for outcome in checks::run_all(&summary) {
            writeln!(log, "{outcome}")?;
            println!("{outcome}");
            ok &= outcome.passed();
        }
    }
    fs::write(output.join("run.log"), &log)?;
    Ok(ok)
}
