use std::f64::consts::PI;
use std::fmt::Write as _;

use pointer_core::classify::{
    accessibility, compare_quality, order_vs_disorder_report, place_in_diagram, reliability,
    AccessibilityReport, OrderDisorderReport, Placement, Quality, ReliabilityReport,
};
use pointer_core::info::{
    mutual_info_initial, mutual_info_prc, wprc_info_deficit, DeficitReport, GeneralState,
    InfoReport,
};
use pointer_core::model::random_inits;
use pointer_core::oracle::{evolve_full, partial_trace_system, time_averages};
use pointer_core::window::{analyze, LongestWindow, Revivals, WindowReport};
use pointer_core::{
    availability, long_time_variance, make_apparatus, reduced_system_state, ApparatusSpec,
    Complex64, InitsPolicy, SystemInit, TimeSet, WindowConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, SweepConfig, SweepEnsemble};
use crate::error::CliError;
use crate::format_float;

/// Upper bound on rows written by `simulate`.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Text produced by a command. `failed` marks a completed run whose checks
/// did not pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub failed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            failed: false,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Output, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    Ok(Output::ok(text))
}

fn apparatus(cfg: &RunConfig) -> Result<ApparatusSpec, CliError> {
    RunConfig::require(&cfg.apparatus, "apparatus")?.build()
}

fn window_config(cfg: &RunConfig, spec: &ApparatusSpec) -> Result<WindowConfig, CliError> {
    RunConfig::require(&cfg.window, "window")?
        .resolve(spec)
        .map_err(|e| CliError::Validation(e.to_string()))
}

pub fn simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = apparatus(cfg)?;
    let grid = RunConfig::require(&cfg.grid, "grid")?;
    let last = (grid.t_max / grid.step * (1.0 + 1e-12)).floor();
    if last >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Validation(format!(
            "grid has more than {MAX_GRID_POINTS} points"
        )));
    }
    let times: Vec<f64> = (0..=last as usize).map(|i| i as f64 * grid.step).collect();
    let values: Vec<f64> = times.par_iter().map(|&t| availability(&spec, t)).collect();
    let mut text = String::from("t,availability\n");
    for (t, a) in times.iter().zip(&values) {
        let _ = writeln!(text, "{},{}", format_float(*t), format_float(*a));
    }
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct WindowsOutput<'a> {
    n: usize,
    config: WindowConfig,
    wprc: &'a TimeSet,
    prc: &'a TimeSet,
    revivals: &'a Revivals,
    longest_window: &'a LongestWindow,
    warnings: Vec<String>,
    notes: Vec<String>,
}

pub fn windows(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = apparatus(cfg)?;
    let wcfg = window_config(cfg, &spec)?;
    let report: WindowReport = analyze(&spec, &wcfg)?;
    let mut notes = Vec::new();
    if spec.is_trivial() {
        notes.push(
            "degenerate apparatus: every pointer factor is constant, availability is 1 at all times"
                .to_string(),
        );
    }
    to_json(&WindowsOutput {
        n: spec.len(),
        config: wcfg,
        wprc: &report.wprc,
        prc: &report.prc,
        revivals: &report.revivals,
        longest_window: &report.longest_window,
        warnings: report
            .warnings
            .iter()
            .map(|w| {
                format!(
                    "grid step {} exceeds {} and may miss fast oscillations",
                    w.grid_step, w.limit
                )
            })
            .collect(),
        notes,
    })
}

#[derive(Serialize)]
struct Comparison {
    a: (u64, f64),
    b: (u64, f64),
    quality: Quality,
}

#[derive(Serialize, Default)]
struct ClassifyOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    reliability: Option<ReliabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accessibility: Option<AccessibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    placement: Option<Placement>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order_disorder: Option<OrderDisorderReport>,
}

pub fn classify(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut out = ClassifyOutput::default();
    let needs_windows = cfg.observer.is_some() || cfg.region.is_some();
    if needs_windows {
        let spec = apparatus(cfg)?;
        let report = analyze(&spec, &window_config(cfg, &spec)?)?;
        if let Some(obs) = &cfg.observer {
            let opts = cfg.reliability.unwrap_or_default();
            out.reliability = Some(reliability(obs, &report.wprc, &report.prc, &opts)?);
        }
        if let Some(region) = &cfg.region {
            out.placement = Some(place_in_diagram(
                spec.len() as u64,
                report.longest_window.duration,
                region,
            ));
        }
    }
    if let Some(budget) = &cfg.budget {
        let spec = apparatus(cfg)?;
        out.accessibility = Some(accessibility(spec.len() as u64, budget));
    }
    out.comparisons = cfg
        .comparisons
        .iter()
        .map(|&[a, b]| Comparison {
            a,
            b,
            quality: compare_quality(a, b),
        })
        .collect();
    if let Some(input) = &cfg.order_disorder {
        out.order_disorder = Some(order_vs_disorder_report(input)?);
    }
    let nothing = out.reliability.is_none()
        && out.accessibility.is_none()
        && out.placement.is_none()
        && out.comparisons.is_empty()
        && out.order_disorder.is_none();
    if nothing {
        return Err(CliError::Validation(
            "nothing to classify: give observer, region, budget, comparisons or order_disorder"
                .into(),
        ));
    }
    to_json(&out)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    cases: usize,
    max_error: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct AverageCheck {
    name: &'static str,
    passed: bool,
    mean_availability_sq: f64,
    predicted: f64,
    rel_error: f64,
    rel_tol: f64,
    mean_overlap_modulus: f64,
    mean_bound: f64,
}

#[derive(Serialize)]
struct OracleOutput {
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_average: Option<AverageCheck>,
    all_passed: bool,
}

fn random_system(rng: &mut ChaCha20Rng) -> SystemInit {
    let theta: f64 = rng.gen_range(0.0..PI);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    SystemInit::new(
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    )
    .expect("unit-norm by construction")
}

fn entry_error(spec: &ApparatusSpec, sys: &SystemInit, t: f64) -> Result<f64, CliError> {
    let analytic = reduced_system_state(spec, sys, t);
    let brute = partial_trace_system(&evolve_full(spec, sys, t)?);
    Ok((analytic - brute)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

pub fn oracle_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let oc = cfg.oracle.clone().unwrap_or_default();
    let mut rng = ChaCha20Rng::seed_from_u64(oc.seed);
    let mut worst = 0.0_f64;
    for case in 0..oc.cases {
        let n = if case == 0 {
            oc.max_n
        } else {
            rng.gen_range(1..=oc.max_n)
        };
        let couplings = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let spec = ApparatusSpec::new(couplings, random_inits(n, rng.gen()))?;
        let sys = random_system(&mut rng);
        let t = rng.gen_range(0.0..=oc.time_max);
        worst = worst.max(entry_error(&spec, &sys, t)?);
    }
    let mut checks = vec![Check {
        name: "random apparatus: reduced state vs state-vector partial trace",
        passed: worst <= oc.tolerance,
        cases: oc.cases,
        max_error: worst,
        tolerance: oc.tolerance,
    }];

    if cfg.apparatus.is_some() {
        let spec = apparatus(cfg)?;
        let times = 16;
        let mut worst = 0.0_f64;
        for i in 0..times {
            let t = oc.time_max * i as f64 / (times - 1) as f64;
            worst = worst.max(entry_error(&spec, &random_system(&mut rng), t)?);
        }
        checks.push(Check {
            name: "configured apparatus: reduced state vs state-vector partial trace",
            passed: worst <= oc.tolerance,
            cases: times,
            max_error: worst,
            tolerance: oc.tolerance,
        });
    }

    let time_average = if oc.variance.enabled {
        let v = &oc.variance;
        let couplings = [2.0_f64, 3.0, 5.0, 7.0, 11.0, 13.0]
            .iter()
            .map(|p| 0.05 * p.sqrt())
            .collect();
        let spec = ApparatusSpec::new(couplings, random_inits(6, oc.seed))?;
        let predicted = long_time_variance(&spec);
        let avg = time_averages(&spec, v.horizon, v.steps)?;
        let rel_error = (avg.availability_sq - predicted).abs() / predicted;
        let mean = avg.overlap.norm();
        Some(AverageCheck {
            name: "long-time averages of overlap and availability squared",
            passed: rel_error <= v.rel_tol && mean < v.mean_bound,
            mean_availability_sq: avg.availability_sq,
            predicted,
            rel_error,
            rel_tol: v.rel_tol,
            mean_overlap_modulus: mean,
            mean_bound: v.mean_bound,
        })
    } else {
        None
    };

    let all_passed =
        checks.iter().all(|c| c.passed) && time_average.as_ref().is_none_or(|c| c.passed);
    let mut out = to_json(&OracleOutput {
        checks,
        time_average,
        all_passed,
    })?;
    out.failed = !all_passed;
    Ok(out)
}

struct SweepRow {
    n: usize,
    label: String,
    seed: u64,
    longest: f64,
    theta_ratio: Option<f64>,
    reliability: Option<String>,
    accessibility: Option<String>,
    in_region: Option<bool>,
}

fn label(e: &SweepEnsemble, index: usize) -> String {
    match e {
        SweepEnsemble::Ordered { g } => format!("g={}", format_float(*g)),
        SweepEnsemble::Disordered { .. } => format!("I{index}"),
    }
}

/// The serialized (snake_case) name of a unit enum variant.
fn verdict_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|x| x.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn sweep_cell(
    cfg: &RunConfig,
    sweep: &SweepConfig,
    n: usize,
    index: usize,
    seed: u64,
) -> Result<SweepRow, CliError> {
    let ensemble = sweep.ensembles[index];
    let inits = if sweep.random_inits {
        InitsPolicy::Random { seed }
    } else {
        InitsPolicy::equatorial()
    };
    let spec = make_apparatus(ensemble.ensemble(seed), n, &inits)?;
    let report = analyze(&spec, &window_config(cfg, &spec)?)?;
    let longest = report.longest_window.duration;
    let rel = cfg
        .observer
        .map(|obs| {
            reliability(
                &obs,
                &report.wprc,
                &report.prc,
                &cfg.reliability.unwrap_or_default(),
            )
        })
        .transpose()?;
    Ok(SweepRow {
        n,
        label: label(&ensemble, index),
        seed,
        longest,
        theta_ratio: rel.map(|r| r.theta_ratio()),
        reliability: rel.map(|r| verdict_name(&r.verdict)),
        accessibility: cfg
            .budget
            .map(|b| verdict_name(&accessibility(n as u64, &b).verdict)),
        in_region: cfg
            .region
            .map(|r| place_in_diagram(n as u64, longest, &r).in_region),
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let sweep = RunConfig::require(&cfg.sweep, "sweep")?;
    RunConfig::require(&cfg.window, "window")?;
    let mut ns = sweep.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut seeds = sweep.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let cells: Vec<(usize, usize, u64)> = ns
        .iter()
        .flat_map(|&n| {
            let seeds = &seeds;
            (0..sweep.ensembles.len()).flat_map(move |e| seeds.iter().map(move |&s| (n, e, s)))
        })
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(n, e, s)| sweep_cell(cfg, sweep, n, e, s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut text =
        String::from("n,ensemble,seed,longest_t,theta_ratio,reliability,accessibility,in_region\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.label,
            r.seed,
            format_float(r.longest),
            r.theta_ratio.map(format_float).unwrap_or_default(),
            r.reliability.as_deref().unwrap_or_default(),
            r.accessibility.as_deref().unwrap_or_default(),
            r.in_region.map(|b| b.to_string()).unwrap_or_default(),
        );
    }
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct InfoOutput {
    probabilities: Vec<f64>,
    initial: InfoReport,
    prc: InfoReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    deficit: Option<DeficitReport>,
}

pub fn info(cfg: &RunConfig) -> Result<Output, CliError> {
    let ic = RunConfig::require(&cfg.info, "info")?;
    let state = GeneralState::from_probabilities(&ic.probabilities)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let deficit = ic
        .epsilon
        .map(|eps| wprc_info_deficit(&state, eps))
        .transpose()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    to_json(&InfoOutput {
        probabilities: state.probabilities(),
        initial: mutual_info_initial(&state),
        prc: mutual_info_prc(&state).map_err(|e| CliError::Validation(e.to_string()))?,
        deficit,
    })
}
