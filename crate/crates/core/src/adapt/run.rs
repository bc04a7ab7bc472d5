use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::checks::check_record;
use super::config::{InnerOptimizer, OuterMetric, RunConfig};
use super::inner::{inner_qngd, inner_step, MetricMode};
use super::select::{select_operator, select_positional};
use super::trace::{IterationRecord, RunTrace, Termination};
use super::{Problem, RunFailure};
use crate::error::{Error, Result};
use crate::geometry::{
    natural_gradient, pool_gradient_raw, pool_metric_raw, solve_residual, spectral_diagnostics, NaturalGradient,
};
use crate::state::{apply_sum_raw, expectation, prefix_states, suffix_adjoint_states, Ansatz};

/// Pool quantities at one insertion slot.
struct SlotEval {
    gradient: Vec<f64>,
    metric: DMatrix<f64>,
    natural: NaturalGradient,
}

fn inner_mode(config: &RunConfig) -> MetricMode {
    match config.inner_optimizer() {
        InnerOptimizer::Qngd => MetricMode::Full,
        InnerOptimizer::QngBd => MetricMode::BlockDiag(config.blocks.clone()),
        InnerOptimizer::Gd => MetricMode::Identity,
    }
}

fn eval_slot(problem: &Problem, xi: &[Complex64], chi: &[Complex64], config: &RunConfig) -> Result<SlotEval> {
    let gradient = pool_gradient_raw(&problem.pool, xi, chi);
    let metric = pool_metric_raw(&problem.pool, chi);
    let natural = match config.outer_metric() {
        OuterMetric::Pool => natural_gradient(&metric, &gradient, config.reg)?,
        OuterMetric::Identity => NaturalGradient::euclidean(&gradient),
    };
    Ok(SlotEval { gradient, metric, natural })
}

/// Evaluates the append slot only, or every slot `0..=len` for positional runs.
fn evaluate(problem: &Problem, ansatz: &Ansatz, config: &RunConfig) -> Result<Vec<SlotEval>> {
    let prefixes = prefix_states(ansatz, &problem.pool, &problem.reference)?;
    let psi = prefixes.last().expect("non-empty");
    let hpsi = apply_sum_raw(&problem.hamiltonian, psi);
    if !config.algorithm.is_positional() {
        return Ok(vec![eval_slot(problem, &hpsi, psi, config)?]);
    }
    let suffixes = suffix_adjoint_states(ansatz, &problem.pool, &hpsi);
    prefixes.par_iter().zip(suffixes.par_iter()).map(|(chi, xi)| eval_slot(problem, xi, chi, config)).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Slot with the largest score, lower slot on ties.
fn leading_slot(evals: &[SlotEval]) -> usize {
    let mut best = 0;
    for (p, e) in evals.iter().enumerate() {
        if max_abs(&e.natural.values) > max_abs(&evals[best].natural.values) {
            best = p;
        }
    }
    best
}

fn adaptive(config: &RunConfig, problem: &Problem, trace: &mut RunTrace) -> Result<()> {
    let mode = inner_mode(config);
    let mut ansatz = Ansatz::default();
    let mut energy = trace.initial_energy;
    let mut total_iter = 0;
    let positional = config.algorithm.is_positional();

    for k in 1..=config.max_outer {
        let evals = evaluate(problem, &ansatz, config)?;
        trace.final_nat_grad_max = Some(evals.iter().map(|e| e.natural.max_abs()).fold(0.0, f64::max));
        let lead = leading_slot(&evals);
        trace.final_fnorm = Some(evals[lead].natural.fnorm);
        if evals[lead].natural.fnorm < config.eps {
            trace.termination = Termination::Converged { outer_k: k };
            return Ok(());
        }

        let last = ansatz.elements().last().map(|e| e.pool_index);
        let (index, position, skipped) = if positional {
            let scores: Vec<Vec<f64>> = evals.iter().map(|e| e.natural.values.clone()).collect();
            let s = select_positional(&scores, last)?;
            (s.index, s.position, s.skipped)
        } else {
            let s = select_operator(&evals[0].natural.values, last)?;
            (s.index, ansatz.len(), s.skipped)
        };
        let slot = if positional { &evals[position] } else { &evals[0] };
        let append = evals.last().expect("non-empty");

        let diagnostics = spectral_diagnostics(&slot.metric, index)?;
        let asymmetry = (&slot.metric - slot.metric.transpose()).abs().max();
        let (metric_diag, residual) = match config.outer_metric() {
            OuterMetric::Pool => (
                slot.metric[(index, index)] + slot.natural.regularization_used,
                solve_residual(&slot.metric, &slot.natural, &slot.gradient),
            ),
            OuterMetric::Identity => (1.0, 0.0),
        };

        let before = ansatz.clone();
        if !skipped {
            ansatz.insert(position, index, 0.0)?;
        }
        let inner = inner_qngd(
            &mut ansatz,
            &problem.hamiltonian,
            &problem.pool,
            &problem.reference,
            config.eta,
            config.kappa,
            config.reg,
            &mode,
        )?;
        total_iter += config.kappa;
        let e_k = *inner.last().expect("kappa >= 1");
        let min_inner = inner.iter().copied().fold(f64::INFINITY, f64::min);

        let mut record = IterationRecord {
            outer_k: k,
            total_iter,
            energy: e_k,
            energy_error: problem.e_fci.map(|f| e_k - f),
            selected_index: Some(index),
            selected_label: Some(problem.pool.operators()[index].label.clone()),
            position: Some(position),
            skipped,
            nat_grad_max: slot.natural.values[index].abs(),
            fnorm: slot.natural.fnorm,
            diagnostics: Some(diagnostics),
            n_params: ansatz.len(),
            descent_pass: None,
            energy_before: energy,
            grad_selected: slot.gradient[index],
            metric_diag,
            inner_energies: inner,
            inner_slack: (e_k - min_inner).max(0.0),
            metric_min_eig: diagnostics.mu_hat,
            metric_asymmetry: asymmetry,
            solve_residual: residual,
            append_score: append.natural.max_abs(),
            ansatz_before: before,
        };
        record.descent_pass = check_record(&record, problem, config.eta)?.map(|c| c.passed());
        trace.records.push(record);
        trace.final_ansatz = ansatz.clone();
        energy = e_k;
    }

    let evals = evaluate(problem, &ansatz, config)?;
    trace.final_nat_grad_max = Some(evals.iter().map(|e| e.natural.max_abs()).fold(0.0, f64::max));
    trace.final_fnorm = Some(evals[leading_slot(&evals)].natural.fnorm);
    trace.termination = Termination::MaxOuter;
    Ok(())
}

fn fixed(config: &RunConfig, problem: &Problem, trace: &mut RunTrace) -> Result<()> {
    let mode = inner_mode(config);
    let mut ansatz = Ansatz::from_indices(0..problem.pool.len());
    trace.final_ansatz = ansatz.clone();
    if ansatz.is_empty() {
        return Err(Error::InvalidConfig("fixed ansatz is empty (pool has no operators)".into()));
    }
    let steps = config.max_outer * config.kappa;
    let mut energy = trace.initial_energy;
    for t in 1..=steps {
        let before = ansatz.clone();
        let info =
            inner_step(&mut ansatz, &problem.hamiltonian, &problem.pool, &problem.reference, config.eta, config.reg, &mode)?;
        let e = expectation(&problem.hamiltonian, &crate::state::prepare_state(&ansatz, &problem.pool, &problem.reference)?)?;
        let gx: f64 = info.gradient.iter().zip(&info.direction).map(|(a, b)| a * b).sum();
        trace.records.push(IterationRecord {
            outer_k: t,
            total_iter: t,
            energy: e,
            energy_error: problem.e_fci.map(|f| e - f),
            selected_index: None,
            selected_label: None,
            position: None,
            skipped: false,
            nat_grad_max: max_abs(&info.direction),
            fnorm: gx.max(0.0).sqrt(),
            diagnostics: None,
            n_params: ansatz.len(),
            descent_pass: None,
            energy_before: energy,
            grad_selected: 0.0,
            metric_diag: 1.0,
            inner_energies: vec![e],
            inner_slack: 0.0,
            metric_min_eig: 0.0,
            metric_asymmetry: 0.0,
            solve_residual: 0.0,
            append_score: 0.0,
            ansatz_before: before,
        });
        trace.final_ansatz = ansatz.clone();
        energy = e;
    }
    trace.termination = Termination::Budget;
    Ok(())
}

/// Runs `config.algorithm` on `problem`. On failure the partial trace is
/// returned inside the error.
pub fn run(config: &RunConfig, problem: &Problem) -> std::result::Result<RunTrace, RunFailure> {
    let mut trace = RunTrace {
        config: config.clone(),
        records: Vec::new(),
        final_ansatz: Ansatz::default(),
        e_fci: problem.e_fci,
        initial_energy: f64::NAN,
        termination: Termination::MaxOuter,
        final_nat_grad_max: None,
        final_fnorm: None,
        uccsd_params: problem.pool.len(),
    };
    let result = config
        .validate()
        .and_then(|_| expectation(&problem.hamiltonian, &problem.reference))
        .and_then(|e0| {
            trace.initial_energy = e0;
            if config.algorithm.is_adaptive() {
                adaptive(config, problem, &mut trace)
            } else {
                fixed(config, problem, &mut trace)
            }
        });
    match result {
        Ok(()) => Ok(trace),
        Err(error) => Err(RunFailure { error, trace: Box::new(trace) }),
    }
}

pub fn geo_adapt_run(config: &RunConfig, problem: &Problem) -> std::result::Result<RunTrace, RunFailure> {
    run(&RunConfig { algorithm: super::Algorithm::GeoAdapt, ..config.clone() }, problem)
}

pub fn adapt_vqe_run(config: &RunConfig, problem: &Problem) -> std::result::Result<RunTrace, RunFailure> {
    run(&RunConfig { algorithm: super::Algorithm::Adapt, ..config.clone() }, problem)
}

pub fn pos_geo_adapt_run(config: &RunConfig, problem: &Problem) -> std::result::Result<RunTrace, RunFailure> {
    run(&RunConfig { algorithm: super::Algorithm::PosGeoAdapt, ..config.clone() }, problem)
}

pub fn pos_adapt_run(config: &RunConfig, problem: &Problem) -> std::result::Result<RunTrace, RunFailure> {
    run(&RunConfig { algorithm: super::Algorithm::PosAdapt, ..config.clone() }, problem)
}

/// Fixed UCCSD layout; `config.algorithm` must be `vqe_gd` or `vqe_qng_bd`.
pub fn vqe_fixed_run(config: &RunConfig, problem: &Problem) -> std::result::Result<RunTrace, RunFailure> {
    if config.algorithm.is_adaptive() {
        let error = Error::InvalidConfig(format!("{} is not a fixed-ansatz algorithm", config.algorithm));
        let trace = RunTrace {
            config: config.clone(),
            records: Vec::new(),
            final_ansatz: Ansatz::default(),
            e_fci: problem.e_fci,
            initial_energy: f64::NAN,
            termination: Termination::Budget,
            final_nat_grad_max: None,
            final_fnorm: None,
            uccsd_params: problem.pool.len(),
        };
        return Err(RunFailure { error, trace: Box::new(trace) });
    }
    run(config, problem)
}
