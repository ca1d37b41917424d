//! One function per subcommand.

use std::fs;
use std::path::Path;
use std::time::Instant;

use m2m_core::coalescent::{
    cross_species_cdf, estimate_limit_statistic, estimate_q, exp_cdf, simulate, CoalescentParams,
};
use m2m_core::functionals::{
    compactness_profile, distance_distribution, eval_tf, mass_distribution, EvalMode, TestFunctionalSpec,
};
use m2m_core::metrics::{d2gp_bounds, prokhorov, two_level_prokhorov, D2gpOptions};
use m2m_core::random::derive_seed;
use m2m_core::stats::{ks_statistic, Estimate};
use m2m_core::{Error, M2MSpace};

use crate::output::{emit, json_text, write_file, Cell, Table};
use crate::{Cli, Command, DistanceMode, TfMode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    File { path: String, source: Error },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_budget() => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Validate { file } => validate(cli, file),
        Command::Distance { file_a, file_b, mode, multistarts, grid_points, max_evaluations, witness, timing } => {
            let opts = D2gpOptions {
                multistarts: *multistarts,
                grid_points: *grid_points,
                tol: cli.tol,
                seed: cli.seed,
                max_evaluations: *max_evaluations,
            };
            distance(cli, file_a, file_b, *mode, &opts, witness.as_deref(), *timing)
        }
        Command::Tf { file, spec, mode, samples } => tf(cli, file, spec, *mode, *samples),
        Command::Simulate { gamma_s, gamma_g, m, n, distances, blocks, t_grid, m2m, ks } => {
            let params = CoalescentParams { gamma_s: *gamma_s, gamma_g: *gamma_g, m: *m, n: *n };
            let outputs = SimOutputs {
                distances: distances.as_deref(),
                blocks: blocks.as_deref(),
                t_grid: t_grid.as_deref(),
                m2m: m2m.as_deref(),
                ks: *ks,
            };
            simulate_cmd(cli, &params, &outputs)
        }
        Command::Convergence { spec, gamma_s, gamma_g, m_grid, n_grid, limit_replicates, exact, samples } => {
            let mode = if *exact { None } else { Some(*samples) };
            convergence(cli, spec, (*gamma_s, *gamma_g), m_grid, n_grid, *limit_replicates, mode)
        }
        Command::Diagnose { file, k_grid, delta_grid, histograms } => {
            diagnose(cli, file, k_grid, delta_grid, histograms.as_deref())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<M2MSpace> {
    M2MSpace::from_json(&read(path)?).map_err(|source| CliError::File { path: path.display().to_string(), source })
}

fn validate(cli: &Cli, file: &Path) -> Result<()> {
    let x = load_space(file)?;
    let mut t = Table::new(&["status", "points", "support", "atoms", "mass"]);
    t.push(vec![
        Cell::Text("valid".into()),
        x.space().labels().len().into(),
        x.effective_support().len().into(),
        x.nu().atoms().len().into(),
        x.mass().into(),
    ]);
    emit(cli.out.as_deref(), &t.render(cli.format))
}

fn same_space(a: &M2MSpace, b: &M2MSpace) -> Result<()> {
    if a.space() != b.space() {
        return Err(CliError::Usage(
            "prokhorov and two-level modes need both files to declare the same points and distances".into(),
        ));
    }
    Ok(())
}

fn distance(
    cli: &Cli,
    file_a: &Path,
    file_b: &Path,
    mode: DistanceMode,
    opts: &D2gpOptions,
    witness: Option<&Path>,
    timing: bool,
) -> Result<()> {
    let (a, b) = (load_space(file_a)?, load_space(file_b)?);
    let start = Instant::now();
    let (mut header, mut row): (Vec<&'static str>, Vec<Cell>) = match mode {
        DistanceMode::Prokhorov => {
            same_space(&a, &b)?;
            let mm = (a.nu().moment_measure(), b.nu().moment_measure());
            (vec!["value"], vec![prokhorov(&mm.0, &mm.1, a.space(), cli.tol)?.into()])
        }
        DistanceMode::TwoLevel => {
            same_space(&a, &b)?;
            (vec!["value"], vec![two_level_prokhorov(a.nu(), b.nu(), a.space(), cli.tol)?.into()])
        }
        DistanceMode::D2gp => {
            let bound = d2gp_bounds(&a, &b, opts)?;
            if let (Some(path), Some(w)) = (witness, &bound.witness) {
                write_file(path, &json_text(&w.to_matrix()))?;
            }
            (
                vec!["lower", "upper", "starts_used"],
                vec![bound.lower.into(), bound.upper.into(), bound.starts_used.into()],
            )
        }
    };
    if timing {
        header.push("wall_time");
        row.push(start.elapsed().as_secs_f64().into());
    }
    let mut t = Table::new(&header);
    t.push(row);
    emit(cli.out.as_deref(), &t.render(cli.format))
}

fn tf(cli: &Cli, file: &Path, spec: &Path, mode: TfMode, samples: usize) -> Result<()> {
    let x = load_space(file)?;
    let spec = TestFunctionalSpec::from_json(&read(spec)?)?;
    let mode = match mode {
        TfMode::Exact => EvalMode::Exact,
        TfMode::MonteCarlo => EvalMode::MonteCarlo { samples, seed: cli.seed },
    };
    let e = eval_tf(&spec, &x, mode)?;
    let mut t = Table::new(&["value", "stderr"]);
    t.push(vec![e.mean.into(), e.stderr.into()]);
    emit(cli.out.as_deref(), &t.render(cli.format))
}

struct SimOutputs<'a> {
    distances: Option<&'a Path>,
    blocks: Option<&'a Path>,
    t_grid: Option<&'a [f64]>,
    m2m: Option<&'a Path>,
    ks: bool,
}

fn simulate_cmd(cli: &Cli, params: &CoalescentParams, outputs: &SimOutputs) -> Result<()> {
    params.validate()?;
    let replicates = cli.replicates.unwrap_or(1);
    if replicates == 0 {
        return Err(CliError::Usage("--replicates must be positive".into()));
    }
    if outputs.ks && (params.m < 2 || params.n < 2 || replicates < 100) {
        return Err(CliError::Usage("--ks needs M >= 2, N >= 2 and at least 100 replicates".into()));
    }
    let mut summary = Table::new(&["replicate", "height", "gene_events", "species_events"]);
    let mut dist = Table::new(&["replicate", "same_species", "cross_species"]);
    let mut blocks = Table::new(&["replicate", "t", "gene_blocks", "species_blocks"]);
    let (mut same, mut cross) = (Vec::new(), Vec::new());

    for k in 0..replicates {
        let tree = simulate(params, derive_seed(cli.seed, k as u64))?;
        let height = tree.gene_events().last().map_or(0.0, |e| e.0);
        summary.push(vec![
            k.into(),
            height.into(),
            tree.gene_events().len().into(),
            tree.species_events().len().into(),
        ]);
        let s = (params.n >= 2).then(|| tree.pairwise_distance((0, 0), (0, 1))).transpose()?;
        let c = (params.m >= 2).then(|| tree.pairwise_distance((0, 0), (1, 0))).transpose()?;
        same.extend(s);
        cross.extend(c);
        if outputs.distances.is_some() {
            dist.push(vec![k.into(), s.into(), c.into()]);
        }
        if outputs.blocks.is_some() {
            let grid: Vec<f64> = match outputs.t_grid {
                Some(g) => g.to_vec(),
                None => {
                    let mut g: Vec<f64> = tree.gene_events().iter().chain(tree.species_events()).map(|e| e.0).collect();
                    g.push(0.0);
                    g.sort_by(f64::total_cmp);
                    g
                }
            };
            for b in tree.block_counts(&grid) {
                blocks.push(vec![k.into(), b.t.into(), b.gene_blocks.into(), b.species_blocks.into()]);
            }
        }
        if k == 0 {
            if let Some(path) = outputs.m2m {
                write_file(path, &format!("{}\n", tree.build_m2m()?.to_json()))?;
            }
        }
    }
    if let Some(path) = outputs.distances {
        write_file(path, &dist.render(cli.format))?;
    }
    if let Some(path) = outputs.blocks {
        write_file(path, &blocks.render(cli.format))?;
    }
    if outputs.ks {
        let cdf = cross_species_cdf(params.gamma_s, params.gamma_g)?;
        let (se, ce) = (Estimate::from_samples(&same), Estimate::from_samples(&cross));
        let mut t = Table::new(&[
            "ks_same_species",
            "ks_cross_species",
            "same_mean",
            "same_stderr",
            "cross_mean",
            "cross_stderr",
        ]);
        t.push(vec![
            ks_statistic(&same, |x| exp_cdf(params.gamma_g, x)).into(),
            ks_statistic(&cross, cdf).into(),
            se.mean.into(),
            se.stderr.into(),
            ce.mean.into(),
            ce.stderr.into(),
        ]);
        return emit(cli.out.as_deref(), &t.render(cli.format));
    }
    emit(cli.out.as_deref(), &summary.render(cli.format))
}

fn ascending<T: PartialOrd + std::fmt::Debug>(name: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Usage(format!("{name} must be nonempty and strictly ascending, got {grid:?}")));
    }
    Ok(())
}

fn convergence(
    cli: &Cli,
    spec: &Path,
    (gamma_s, gamma_g): (f64, f64),
    m_grid: &[usize],
    n_grid: &[usize],
    limit_replicates: usize,
    samples: Option<usize>,
) -> Result<()> {
    ascending("--m-grid", m_grid)?;
    ascending("--n-grid", n_grid)?;
    let spec = TestFunctionalSpec::from_json(&read(spec)?)?;
    let replicates = cli.replicates.unwrap_or(1000);
    let rates = CoalescentParams { gamma_s, gamma_g, m: 1, n: 1 };
    let limit = estimate_limit_statistic(&spec, &rates, limit_replicates, derive_seed(cli.seed, u64::MAX))?;
    let mode = match samples {
        Some(samples) => EvalMode::MonteCarlo { samples, seed: 0 },
        None => EvalMode::Exact,
    };
    let mut t = Table::new(&["M", "N", "q_estimate", "q_stderr", "limit_estimate", "limit_stderr"]);
    let mut cell = 0u64;
    for &m in m_grid {
        for &n in n_grid {
            let params = CoalescentParams { m, n, ..rates };
            let q = estimate_q(&spec, &params, replicates, derive_seed(cli.seed, cell), mode)?;
            t.push(vec![m.into(), n.into(), q.mean.into(), q.stderr.into(), limit.mean.into(), limit.stderr.into()]);
            cell += 1;
        }
    }
    emit(cli.out.as_deref(), &t.render(cli.format))
}

fn diagnose(cli: &Cli, file: &Path, k_grid: &[f64], delta_grid: &[f64], histograms: Option<&str>) -> Result<()> {
    let x = load_space(file)?;
    let rows = compactness_profile(&x, k_grid, delta_grid)?;
    let mut t = Table::new(&[
        "K",
        "delta",
        "modulus",
        "dd_total_weight",
        "dd_mean",
        "dd_max",
        "mass_total_weight",
        "mass_mean",
        "mass_max",
    ]);
    for r in &rows {
        let (dd, md) = (&r.distance_distribution, &r.mass_distribution);
        t.push(vec![
            r.k.into(),
            r.delta.into(),
            r.modulus.into(),
            dd.total_weight.into(),
            dd.mean.into(),
            dd.max.into(),
            md.total_weight.into(),
            md.mean.into(),
            md.max.into(),
        ]);
    }
    if let Some(prefix) = histograms {
        let dd = distance_distribution(&x.nu().moment_measure(), x.space());
        write_file(Path::new(&format!("{prefix}_dd.csv")), &dd.to_csv())?;
        write_file(Path::new(&format!("{prefix}_mass.csv")), &mass_distribution(x.nu()).to_csv())?;
    }
    emit(cli.out.as_deref(), &t.render(cli.format))
}
