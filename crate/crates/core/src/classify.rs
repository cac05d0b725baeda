//! Observer-relative classification of apparatuses.
//!
//! Reliability compares the observer's probability mass over the window `𝕋`
//! (`Θ`) with the mass that falls inside the ε-windows (`θ_ε`); accessibility
//! compares the apparatus size with the bounds set by the noise floor and the
//! energy budget, assuming a total interaction energy `E₀ ≃ N e₀`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::model::{make_apparatus, CouplingEnsemble, InitsPolicy};
use crate::window::{analyze, TimeSet, WindowParams, WindowReport};

/// Probability density of the observer's measurement time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeDistribution {
    /// Uniform on the observer window.
    Uniform,
    /// Normal with mean `t_m` and standard deviation `delta_t / 6`,
    /// truncated to `t ≥ 0`.
    TruncatedGaussian { t_m: f64, delta_t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverModel {
    pub window: (f64, f64),
    pub distribution: TimeDistribution,
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

impl ObserverModel {
    pub fn new(window: (f64, f64), distribution: TimeDistribution) -> Result<Self> {
        let obs = Self {
            window,
            distribution,
        };
        obs.validate()?;
        Ok(obs)
    }

    pub fn uniform(t_i: f64, t_f: f64) -> Result<Self> {
        Self::new((t_i, t_f), TimeDistribution::Uniform)
    }

    /// Gaussian observer centred on `t_m` with window `[t_m - Δt/2, t_m + Δt/2]`.
    pub fn gaussian(t_m: f64, delta_t: f64) -> Result<Self> {
        Self::new(
            (t_m - delta_t / 2.0, t_m + delta_t / 2.0),
            TimeDistribution::TruncatedGaussian { t_m, delta_t },
        )
    }

    pub fn validate(&self) -> Result<()> {
        let (ti, tf) = self.window;
        if !(ti.is_finite() && tf.is_finite() && 0.0 <= ti && ti < tf) {
            return Err(Error::InvalidInterval { lo: ti, hi: tf });
        }
        if let TimeDistribution::TruncatedGaussian { t_m, delta_t } = self.distribution {
            if !(t_m.is_finite() && delta_t.is_finite() && delta_t > 0.0) {
                return Err(Error::param(format!(
                    "gaussian observer needs finite t_m and delta_t > 0, got {t_m}, {delta_t}"
                )));
            }
        }
        Ok(())
    }

    /// `∫_lo^hi p(t) dt`, in closed form.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        match self.distribution {
            TimeDistribution::Uniform => {
                let (ti, tf) = self.window;
                (hi.min(tf) - lo.max(ti)).max(0.0) / (tf - ti)
            }
            TimeDistribution::TruncatedGaussian { t_m, delta_t } => {
                let lo = lo.max(0.0);
                if hi <= lo {
                    return 0.0;
                }
                let sigma = delta_t / 6.0;
                let z = |t: f64| (t - t_m) / sigma;
                let kept = 1.0 - normal_cdf(z(0.0));
                // Upper-tail form keeps precision when both ends sit far right of the mean.
                let mass = if z(lo) > 0.0 {
                    normal_cdf(-z(lo)) - normal_cdf(-z(hi))
                } else {
                    normal_cdf(z(hi)) - normal_cdf(z(lo))
                };
                mass / kept
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReliabilityVerdict {
    ReliableOverWindow,
    NotReliable,
    PerfectlyReliableOnHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReliabilityReport {
    pub theta_big: f64,
    pub theta_eps: f64,
    pub p_good_prc: f64,
    pub verdict: ReliabilityVerdict,
}

impl ReliabilityReport {
    /// `θ_ε / Θ`.
    pub fn theta_ratio(&self) -> f64 {
        self.theta_eps / self.theta_big
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReliabilityOptions {
    /// `θ_ε = Θ` is accepted within this relative tolerance.
    pub rel_tol: f64,
    /// Smallest admissible `Θ`.
    pub min_theta: f64,
}

impl Default for ReliabilityOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            min_theta: 0.99,
        }
    }
}

/// Reliability of an apparatus over the observer window, given its ε-window
/// set and its exact-orthogonality set (both on a horizon containing `𝕋`).
pub fn reliability(
    obs: &ObserverModel,
    ts_wprc: &TimeSet,
    ts_prc: &TimeSet,
    opts: &ReliabilityOptions,
) -> Result<ReliabilityReport> {
    obs.validate()?;
    let (ti, tf) = obs.window;
    for ts in [ts_wprc, ts_prc] {
        let (h0, h1) = ts.horizon();
        if ti < h0 || tf > h1 {
            return Err(Error::param(format!(
                "observer window [{ti}, {tf}] is not inside the horizon [{h0}, {h1}]"
            )));
        }
    }
    let theta_big = obs.mass(ti, tf);
    if theta_big < opts.min_theta {
        return Err(Error::WindowMismatch {
            theta: theta_big,
            threshold: opts.min_theta,
        });
    }
    let theta_eps: f64 = ts_wprc
        .intervals()
        .iter()
        .map(|&(lo, hi)| obs.mass(lo.max(ti), hi.min(tf)))
        .sum();
    // Isolated points carry no probability.
    let p_good_prc = ts_prc
        .points()
        .iter()
        .filter(|&&p| ti <= p && p <= tf)
        .map(|&p| obs.mass(p, p))
        .sum::<f64>()
        / theta_big;
    let (h0, h1) = ts_wprc.horizon();
    let covers_horizon = matches!(ts_wprc.intervals(), [(lo, hi)] if *lo <= h0 && *hi >= h1);
    let verdict = if covers_horizon {
        ReliabilityVerdict::PerfectlyReliableOnHorizon
    } else if theta_eps >= theta_big * (1.0 - opts.rel_tol) {
        ReliabilityVerdict::ReliableOverWindow
    } else {
        ReliabilityVerdict::NotReliable
    };
    Ok(ReliabilityReport {
        theta_big,
        theta_eps,
        p_good_prc,
        verdict,
    })
}

/// Energy budget of an observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessibilityBudget {
    /// Interaction energy per apparatus qubit.
    pub e0: f64,
    pub noise_floor: f64,
    pub max_energy: f64,
}

impl AccessibilityBudget {
    pub fn new(e0: f64, noise_floor: f64, max_energy: f64) -> Result<Self> {
        let b = Self {
            e0,
            noise_floor,
            max_energy,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.e0, self.noise_floor, self.max_energy]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0);
        if !all_positive || self.noise_floor >= self.max_energy {
            return Err(Error::param(format!(
                "budget needs positive e0, noise_floor < max_energy; got {} / {} / {}",
                self.e0, self.noise_floor, self.max_energy
            )));
        }
        Ok(())
    }

    /// `N_l = ⌈noise / e₀⌉`
    pub fn n_lower(&self) -> u64 {
        (self.noise_floor / self.e0).ceil() as u64
    }

    /// `N_u = ⌊ℰ / e₀⌋`
    pub fn n_upper(&self) -> u64 {
        (self.max_energy / self.e0).floor() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessibilityVerdict {
    Nonfunctional,
    Accessible,
    Inaccessible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AccessibilityReport {
    pub verdict: AccessibilityVerdict,
    pub n_lower: u64,
    pub n_upper: u64,
}

/// Size verdict; `N = N_l` and `N = N_u` count as accessible.
pub fn accessibility(n: u64, budget: &AccessibilityBudget) -> AccessibilityReport {
    let (n_lower, n_upper) = (budget.n_lower(), budget.n_upper());
    let verdict = if n < n_lower {
        AccessibilityVerdict::Nonfunctional
    } else if n > n_upper {
        AccessibilityVerdict::Inaccessible
    } else {
        AccessibilityVerdict::Accessible
    };
    AccessibilityReport {
        verdict,
        n_lower,
        n_upper,
    }
}

/// Admissible box `[N_min, N_max] × [T_min, T_max]` of the N–T diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub n_range: (u64, u64),
    pub t_range: (f64, f64),
}

impl RegionSpec {
    pub fn new(n_range: (u64, u64), t_range: (f64, f64)) -> Result<Self> {
        let r = Self { n_range, t_range };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_range.0 > self.n_range.1 {
            return Err(Error::param(format!("empty N range {:?}", self.n_range)));
        }
        let (lo, hi) = self.t_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Placement {
    pub in_region: bool,
    pub n: u64,
    pub t: f64,
}

pub fn place_in_diagram(n: u64, t: f64, region: &RegionSpec) -> Placement {
    let in_region = (region.n_range.0..=region.n_range.1).contains(&n)
        && region.t_range.0 <= t
        && t <= region.t_range.1;
    Placement { in_region, n, t }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    ABetter,
    BBetter,
    Incomparable,
    Equal,
}

/// Dominance order on `(N, T)`: fewer qubits and longer windows are better.
pub fn compare_quality(a: (u64, f64), b: (u64, f64)) -> Quality {
    let (na, ta) = a;
    let (nb, tb) = b;
    if na == nb && ta == tb {
        Quality::Equal
    } else if na <= nb && ta >= tb {
        Quality::ABetter
    } else if nb <= na && tb >= ta {
        Quality::BBetter
    } else {
        Quality::Incomparable
    }
}

/// `a` is more reliable than `b` when every window of `b` lies inside a
/// window of `a`. Non-nested window families are incomparable.
pub fn compare_reliability(a: &TimeSet, b: &TimeSet, tol: f64) -> Quality {
    match (b.is_subset_of(a, tol), a.is_subset_of(b, tol)) {
        (true, true) => Quality::Equal,
        (true, false) => Quality::ABetter,
        (false, true) => Quality::BBetter,
        (false, false) => Quality::Incomparable,
    }
}

/// Matched ordered/disordered comparison inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderDisorderInput {
    pub g: f64,
    pub interval: (f64, f64),
    pub n: usize,
    pub window: WindowParams,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub observer: Option<ObserverModel>,
    #[serde(default)]
    pub reliability: ReliabilityOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApparatusSummary {
    pub seed: Option<u64>,
    pub mean_coupling: f64,
    pub longest_window: f64,
    pub coverage: f64,
    pub revival_count: usize,
    pub revival_rate: f64,
    /// Largest spacing between consecutive revivals, counting the stretch
    /// from the last revival to the horizon end.
    pub longest_revival_gap: f64,
    pub prc_count: usize,
    pub reliability: Option<ReliabilityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderDisorderReport {
    pub g: f64,
    pub interval: (f64, f64),
    pub n: usize,
    pub epsilon: f64,
    pub t_max: f64,
    /// `π / 2g`, the longest window an ordered apparatus can offer.
    pub ordered_period: f64,
    pub ordered: ApparatusSummary,
    pub disordered: Vec<ApparatusSummary>,
    pub median_disordered_longest: f64,
    pub median_disordered_revival_rate: f64,
    pub median_disordered_coverage: f64,
    /// Fraction of seeds whose longest revival gap exceeds `π / 2g`.
    pub gap_exceeds_period_fraction: f64,
    pub disordered_longer_windows: bool,
    pub disordered_fewer_revivals: bool,
    /// Disordered ε-window coverage falls below the ordered one.
    pub random_spikes_risk: bool,
    pub recommendations: Vec<String>,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn summarize(
    seed: Option<u64>,
    mean_coupling: f64,
    report: &WindowReport,
    input: &OrderDisorderInput,
) -> Result<ApparatusSummary> {
    let t_max = input.window.t_max;
    let times = &report.revivals.times;
    let mut longest_gap = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if let Some(&last) = times.last() {
        longest_gap = longest_gap.max(t_max - last);
    }
    let reliability = input
        .observer
        .map(|obs| reliability(&obs, &report.wprc, &report.prc, &input.reliability))
        .transpose()?;
    Ok(ApparatusSummary {
        seed,
        mean_coupling,
        longest_window: report.longest_window.duration,
        coverage: report.wprc.coverage(),
        revival_count: times.len(),
        revival_rate: times.len() as f64 / t_max,
        longest_revival_gap: longest_gap,
        prc_count: report.prc.points().len(),
        reliability,
    })
}

/// Compares a g-ordered apparatus with disordered ones drawn from an interval
/// containing `g`, at matched `N` and `ε`. Seeds run in parallel; results keep
/// the input seed order.
pub fn order_vs_disorder_report(input: &OrderDisorderInput) -> Result<OrderDisorderReport> {
    let (lo, hi) = input.interval;
    if !(lo <= input.g && input.g <= hi) {
        return Err(Error::param(format!(
            "g = {} is not inside [{lo}, {hi}]",
            input.g
        )));
    }
    if input.seeds.is_empty() {
        return Err(Error::param(
            "order/disorder comparison needs at least one seed",
        ));
    }
    let inits = InitsPolicy::equatorial();
    let ordered_spec = make_apparatus(CouplingEnsemble::Ordered { g: input.g }, input.n, &inits)?;
    let ordered_report = analyze(&ordered_spec, &input.window.resolve(&ordered_spec)?)?;
    let ordered = summarize(None, input.g, &ordered_report, input)?;

    let disordered = input
        .seeds
        .par_iter()
        .map(|&seed| {
            let spec = make_apparatus(
                CouplingEnsemble::Disordered {
                    interval: input.interval,
                    seed,
                },
                input.n,
                &inits,
            )?;
            let report = analyze(&spec, &input.window.resolve(&spec)?)?;
            summarize(Some(seed), spec.mean_coupling(), &report, input)
        })
        .collect::<Result<Vec<_>>>()?;

    let ordered_period = PI / (2.0 * input.g);
    let med =
        |f: fn(&ApparatusSummary) -> f64| median(&mut disordered.iter().map(f).collect::<Vec<_>>());
    let median_disordered_longest = med(|s| s.longest_window);
    let median_disordered_revival_rate = med(|s| s.revival_rate);
    let median_disordered_coverage = med(|s| s.coverage);
    let gap_exceeds_period_fraction = disordered
        .iter()
        .filter(|s| s.longest_revival_gap > ordered_period)
        .count() as f64
        / disordered.len() as f64;

    let disordered_longer_windows = median_disordered_longest > ordered.longest_window;
    let disordered_fewer_revivals = median_disordered_revival_rate < ordered.revival_rate;
    let random_spikes_risk = median_disordered_coverage < ordered.coverage;

    let mut recommendations = Vec::new();
    if disordered_longer_windows {
        recommendations.push(format!(
            "disordered couplings: median longest window {median_disordered_longest:.4} vs {:.4} \
             ordered, at the same N; prefer them when window length per unit energy matters",
            ordered.longest_window
        ));
    } else {
        recommendations.push(
            "disordered couplings give no longer windows than ordered ones at this N".to_string(),
        );
    }
    recommendations.push(format!(
        "ordered couplings: windows are predictable and never exceed {ordered_period:.4}; \
         prefer them when the coupling is known and reliability matters"
    ));
    if random_spikes_risk {
        recommendations.push(format!(
            "N = {}: disordered coverage {median_disordered_coverage:.4} is below the ordered {:.4}; \
             availability spikes at unpredictable times, increase N",
            input.n, ordered.coverage
        ));
    }

    Ok(OrderDisorderReport {
        g: input.g,
        interval: input.interval,
        n: input.n,
        epsilon: input.window.epsilon,
        t_max: input.window.t_max,
        ordered_period,
        ordered,
        disordered,
        median_disordered_longest,
        median_disordered_revival_rate,
        median_disordered_coverage,
        gap_exceeds_period_fraction,
        disordered_longer_windows,
        disordered_fewer_revivals,
        random_spikes_risk,
        recommendations,
    })
}
