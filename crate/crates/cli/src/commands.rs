//! Subcommand implementations. Each writes human-readable output to `out`
//! and returns a [`CliError`] whose exit code the binary propagates.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use geoadapt::adapt::{run, Algorithm, Problem, RunConfig, RunTrace, CHEMICAL_ACCURACY};
use geoadapt::eigen::{dense_ground_state, lanczos_ground_energy, DEFAULT_SEED, DENSE_LIMIT};
use geoadapt::fermion::{build_pool, MoleculeSpec, PoolOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::FileConfig;
use crate::error::CliError;
use crate::fixtures::{self, Loaded};
use crate::output::{read_trace_csv, to_json, trace_csv, write_file, RunSummary};
use crate::plot::{render, Series, XAxis};

pub const DEFAULT_OUT_DIR: &str = "geoadapt-out";

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub hamiltonian: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub algorithm: Option<Algorithm>,
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    pub kappa: Option<usize>,
    pub max_outer: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut FileConfig) {
        if let Some(h) = &self.hamiltonian {
            cfg.problem.hamiltonian = Some(h.clone());
            cfg.base_dir = None;
        }
        if let Some(d) = &self.out_dir {
            cfg.output.dir = Some(d.display().to_string());
        }
        let r = &mut cfg.run;
        if let Some(v) = self.seed {
            r.seed = v;
        }
        if let Some(v) = self.algorithm {
            r.algorithm = v;
        }
        if let Some(v) = self.eps {
            r.eps = v;
        }
        if let Some(v) = self.eta {
            r.eta = v;
        }
        if let Some(v) = self.kappa {
            r.kappa = v;
        }
        if let Some(v) = self.max_outer {
            r.max_outer = v;
        }
    }
}

/// Loads the config (if any) and applies overrides.
pub fn resolve_config(config: Option<&Path>, ov: &Overrides) -> Result<FileConfig, CliError> {
    let mut cfg = match config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    ov.apply(&mut cfg);
    cfg.run.validate()?;
    Ok(cfg)
}

pub fn load_problem(cfg: &FileConfig) -> Result<(Loaded, Problem), CliError> {
    let source = cfg
        .problem
        .hamiltonian
        .as_deref()
        .ok_or_else(|| CliError::Validation("no Hamiltonian given ([problem] hamiltonian or --hamiltonian)".into()))?;
    let loaded = fixtures::load(source, cfg.base_dir.as_deref(), cfg.run.seed)?;
    let problem = loaded.problem(cfg.problem.n_electrons, &cfg.run.pool)?;
    Ok((loaded, problem))
}

fn out_dir(cfg: &FileConfig) -> PathBuf {
    let d = PathBuf::from(cfg.output.dir.as_deref().unwrap_or(DEFAULT_OUT_DIR));
    match (&cfg.base_dir, d.is_relative() && cfg.output.dir.is_some()) {
        (Some(b), true) => b.join(d),
        _ => d,
    }
}

/// Result of one run, with the outputs written to `dir`.
#[derive(Debug)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub summary: RunSummary,
    pub dir: PathBuf,
}

fn write_plots(dir: &Path, series: &[Series], uccsd: Option<usize>) -> Result<(), CliError> {
    let marker = uccsd.map(|u| u as f64);
    write_file(&dir.join("convergence_iterations.svg"), &render(series, XAxis::Iterations, None, Some(CHEMICAL_ACCURACY))?)?;
    write_file(&dir.join("convergence_params.svg"), &render(series, XAxis::Parameters, marker, Some(CHEMICAL_ACCURACY))?)
}

/// Runs one configuration and writes `trace.csv`, `trace.json`,
/// `summary.json`, the resolved `config.toml` and optional SVG plots.
pub fn execute(
    cfg: &FileConfig,
    run_cfg: &RunConfig,
    loaded: &Loaded,
    problem: &Problem,
    dir: &Path,
) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let (trace, failure) = match run(run_cfg, problem) {
        Ok(t) => (t, None),
        Err(f) => (*f.trace, Some(f.error)),
    };
    let wall = start.elapsed().as_secs_f64();
    write_file(&dir.join("trace.csv"), &trace_csv(&trace))?;
    write_file(&dir.join("trace.json"), &to_json(&trace))?;
    let mut resolved = cfg.clone();
    resolved.run = run_cfg.clone();
    write_file(&dir.join("config.toml"), &resolved.to_toml())?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let summary = RunSummary::new(&loaded.label(), &trace, problem, wall)?;
    write_file(&dir.join("summary.json"), &to_json(&summary))?;
    if cfg.output.plot && !trace.records.is_empty() {
        let rows = trace.records.iter().map(Into::into).collect();
        let name = format!("{} ({})", run_cfg.algorithm, loaded.label());
        write_plots(dir, &[Series { name, rows }], Some(trace.uccsd_params))?;
    }
    Ok(RunOutcome { trace, summary, dir: dir.to_path_buf() })
}

pub fn cmd_run(config: Option<&Path>, ov: &Overrides, out: &mut dyn Write) -> Result<RunOutcome, CliError> {
    let cfg = resolve_config(config, ov)?;
    let (loaded, problem) = load_problem(&cfg)?;
    let dir = out_dir(&cfg);
    let outcome = execute(&cfg, &cfg.run, &loaded, &problem, &dir)?;
    let s = &outcome.summary;
    let _ = writeln!(out, "{} on {}: E = {:.12} Ha", s.algorithm, s.label, s.final_energy);
    if let (Some(f), Some(e)) = (s.e_fci, s.energy_error) {
        let _ = writeln!(out, "E_FCI = {f:.12} Ha, error = {e:.3e} Ha");
    }
    let _ = writeln!(
        out,
        "parameters = {}, outer iterations = {}, total iterations = {}, chemical accuracy = {}, EAC = {}",
        s.n_params,
        s.outer_iterations,
        s.total_iterations,
        s.chemical_accuracy_reached,
        s.eac.map_or("-".to_string(), |v| v.to_string())
    );
    let _ = writeln!(out, "outputs written to {}", outcome.dir.display());
    Ok(outcome)
}

/// Energy to 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.11}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FciMethod {
    Auto,
    Dense,
    Lanczos,
}

pub fn cmd_fci(source: &str, seed: u64, method: FciMethod, out: &mut dyn Write) -> Result<f64, CliError> {
    let (name, text) = fixtures::resolve_text(source, None)?;
    let file = crate::hamfile::HamiltonianFile::parse_str(&text)?;
    let h = file.operator()?;
    let (label, result) = match method {
        FciMethod::Dense => ("dense", dense_ground_state(&h)?),
        FciMethod::Lanczos => ("lanczos", lanczos_ground_energy(&h, 1e-8, 400, seed)?),
        FciMethod::Auto if h.n_qubits() <= DENSE_LIMIT => ("dense", dense_ground_state(&h)?),
        FciMethod::Auto => ("lanczos", lanczos_ground_energy(&h, 1e-8, 400, seed)?),
    };
    let _ = writeln!(out, "{name}");
    let _ = writeln!(out, "energy = {}", format_sig12(result.energy));
    let _ = writeln!(out, "method = {label}, residual = {:.3e}, iterations = {}", result.residual, result.iterations);
    if let Some(stored) = file.molecule.as_ref().and_then(|m| m.e_fci) {
        let _ = writeln!(out, "stored e_fci = {}, difference = {:.3e}", format_sig12(stored), (stored - result.energy).abs());
    }
    Ok(result.energy)
}

pub fn cmd_pool(spec: &MoleculeSpec, opts: &PoolOptions, out: &mut dyn Write) -> Result<usize, CliError> {
    let pool = build_pool(spec, opts)?;
    let _ = writeln!(
        out,
        "pool size M = {} ({} spin orbitals, {} electrons, spin filter {})",
        pool.len(),
        spec.n_spin_orbitals,
        spec.n_electrons,
        if opts.spin_conserving { "on" } else { "off" }
    );
    for (j, op) in pool.iter().enumerate() {
        let _ = writeln!(out, "{j:4}  {:<16} {} strings", op.label, op.operator().len());
    }
    Ok(pool.len())
}

pub fn cmd_validate(hamiltonian: Option<&str>, config: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    if hamiltonian.is_none() && config.is_none() {
        return Err(CliError::Validation("nothing to validate: pass --hamiltonian and/or --config".into()));
    }
    if let Some(p) = config {
        let cfg = FileConfig::load(p)?;
        let _ = writeln!(out, "config {}: ok ({})", p.display(), cfg.run.algorithm);
        if hamiltonian.is_none() && cfg.problem.hamiltonian.is_some() {
            let (loaded, problem) = load_problem(&cfg)?;
            let _ = writeln!(
                out,
                "hamiltonian {}: ok ({} qubits, {} terms, pool M = {}, E_FCI = {})",
                loaded.source,
                loaded.file.n_qubits,
                loaded.hamiltonian.len(),
                problem.pool.len(),
                format_sig12(loaded.ground.energy)
            );
        }
    }
    if let Some(h) = hamiltonian {
        let loaded = fixtures::load(h, None, DEFAULT_SEED)?;
        let _ = writeln!(
            out,
            "hamiltonian {}: ok ({} qubits, {} terms, Hermitian, E_FCI = {})",
            loaded.source,
            loaded.file.n_qubits,
            loaded.hamiltonian.len(),
            format_sig12(loaded.ground.energy)
        );
    }
    Ok(())
}

pub fn cmd_plot(
    traces: &[PathBuf],
    dir: &Path,
    uccsd_params: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if traces.is_empty() {
        return Err(CliError::Validation("plot needs at least one trace CSV".into()));
    }
    let mut series = Vec::new();
    for p in traces {
        let rows = read_trace_csv(p)?;
        if rows.is_empty() {
            return Err(CliError::Validation(format!("{}: trace is empty", p.display())));
        }
        let name = p
            .parent()
            .and_then(|d| d.file_name())
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_else(|| p.display().to_string());
        series.push(Series { name, rows });
    }
    write_plots(dir, &series, uccsd_params)?;
    let _ = writeln!(out, "plots written to {}", dir.display());
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub algorithm: String,
    pub eta: f64,
    pub kappa: usize,
    pub dir: String,
    pub final_energy: Option<f64>,
    pub energy_error: Option<f64>,
    pub eac: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepIndex {
    pub label: String,
    pub entries: Vec<SweepEntry>,
    /// Entry with the lowest final energy.
    pub best: Option<usize>,
}

/// Position of the successful entry with the lowest final energy.
pub fn best_entry(entries: &[SweepEntry]) -> Option<usize> {
    entries
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.final_energy.map(|f| (i, f)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

pub fn cmd_sweep(config: &Path, ov: &Overrides, out: &mut dyn Write) -> Result<SweepIndex, CliError> {
    let cfg = resolve_config(Some(config), ov)?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::Validation(format!("{}: no [sweep] section", config.display())))?;
    let (loaded, problem) = load_problem(&cfg)?;
    let root = out_dir(&cfg);
    let algorithms = if sweep.algorithms.is_empty() { vec![cfg.run.algorithm] } else { sweep.algorithms.clone() };
    let kappas = if sweep.kappas.is_empty() { vec![cfg.run.kappa] } else { sweep.kappas.clone() };
    let mut grid = Vec::new();
    for &a in &algorithms {
        for &k in &kappas {
            for &eta in &sweep.etas {
                grid.push(RunConfig { algorithm: a, kappa: k, eta, ..cfg.run.clone() });
            }
        }
    }
    let entries: Vec<SweepEntry> = grid
        .par_iter()
        .map(|rc| {
            let name = format!("{}_eta{:e}_kappa{}", rc.algorithm, rc.eta, rc.kappa);
            let dir = root.join(&name);
            let result = rc.validate().map_err(CliError::from).and_then(|_| execute(&cfg, rc, &loaded, &problem, &dir));
            let (final_energy, energy_error, eac, error) = match result {
                Ok(o) => (Some(o.summary.final_energy), o.summary.energy_error, o.summary.eac, None),
                Err(e) => (None, None, None, Some(e.to_string())),
            };
            SweepEntry { algorithm: rc.algorithm.to_string(), eta: rc.eta, kappa: rc.kappa, dir: name, final_energy, energy_error, eac, error }
        })
        .collect();
    let index = SweepIndex { label: loaded.label(), best: best_entry(&entries), entries };
    write_file(&root.join("index.json"), &to_json(&index))?;
    for e in &index.entries {
        match (&e.final_energy, &e.error) {
            (Some(f), _) => {
                let _ = writeln!(out, "{:<40} E = {:.10}  EAC = {}", e.dir, f, e.eac.map_or("-".into(), |v| v.to_string()));
            }
            (None, Some(err)) => {
                let _ = writeln!(out, "{:<40} failed: {err}", e.dir);
            }
            _ => {}
        }
    }
    if let Some(b) = index.best {
        let _ = writeln!(out, "best: {}", index.entries[b].dir);
    }
    let _ = writeln!(out, "index written to {}", root.join("index.json").display());
    Ok(index)
}
