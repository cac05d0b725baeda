//! Measurement windows of an apparatus on a finite horizon `[0, t_max]`.
//!
//! * [`wprc_set`]: the open set `{t : A(t) < ε}` reported as closed intervals
//!   whose endpoints are refined by bisection on `A(t) - ε`.
//! * [`prc_times`]: the isolated zeros of the overlap.
//! * [`revivals`]: local maxima of `A(t)` within `η` of one.
//!
//! `A(t) ≥ 0` never changes sign, so zeros are not bracketed on `A` itself.
//! The overlap is a product of single-qubit factors and vanishes exactly where
//! one factor does; each factor `cos 2gt + i(|β|²-|α|²) sin 2gt` has a simple
//! sign change in its real part at every candidate zero, and the candidate is
//! kept only if the whole factor vanishes there (tangential near-zeros with
//! `|α|² ≠ |β|²` are rejected).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{availability, overlap_factor, ApparatusSpec};

/// Absolute floor on a factor modulus for a refined root to count as a zero.
const ZERO_FLOOR: f64 = 1e-9;
/// Relative accuracy demanded of `A(b)` at a window boundary `b`.
const BOUNDARY_REL_TOL: f64 = 1e-6;
const MAX_BISECTIONS: usize = 400;

/// Sorted disjoint closed intervals plus isolated points inside `[0, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTimeSet")]
pub struct TimeSet {
    horizon: (f64, f64),
    intervals: Vec<(f64, f64)>,
    points: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimeSet {
    horizon: (f64, f64),
    intervals: Vec<(f64, f64)>,
    points: Vec<f64>,
}

impl TryFrom<RawTimeSet> for TimeSet {
    type Error = Error;

    fn try_from(raw: RawTimeSet) -> Result<Self> {
        TimeSet::new(raw.horizon, raw.intervals, raw.points)
    }
}

impl TimeSet {
    pub fn new(horizon: (f64, f64), intervals: Vec<(f64, f64)>, points: Vec<f64>) -> Result<Self> {
        let (h0, h1) = horizon;
        if !(h0.is_finite() && h1.is_finite() && h0 <= h1) {
            return Err(Error::InvalidInterval { lo: h0, hi: h1 });
        }
        let mut prev = f64::NEG_INFINITY;
        for &(lo, hi) in &intervals {
            if !(lo < hi && lo >= h0 && hi <= h1 && lo > prev) {
                return Err(Error::InvalidInterval { lo, hi });
            }
            prev = hi;
        }
        let mut prev = f64::NEG_INFINITY;
        for &p in &points {
            if !(p >= h0 && p <= h1 && p > prev) {
                return Err(Error::param(format!(
                    "point {p} is unsorted or outside the horizon"
                )));
            }
            if intervals.iter().any(|&(lo, hi)| lo < p && p < hi) {
                return Err(Error::param(format!("point {p} lies inside an interval")));
            }
            prev = p;
        }
        Ok(Self {
            horizon,
            intervals,
            points,
        })
    }

    pub fn empty(horizon: (f64, f64)) -> Self {
        Self {
            horizon,
            intervals: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn horizon(&self) -> (f64, f64) {
        self.horizon
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    /// Lebesgue measure (isolated points contribute nothing).
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Fraction of the horizon covered by intervals.
    pub fn coverage(&self) -> f64 {
        let span = self.horizon.1 - self.horizon.0;
        if span > 0.0 {
            self.measure() / span
        } else {
            0.0
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= t && t <= hi) || self.points.contains(&t)
    }

    /// Measure of `self ∩ [lo, hi]`.
    pub fn overlap_length(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }

    /// Every interval and point of `self` lies inside `other`, allowing the
    /// endpoints of `self` to stick out by at most `tol`.
    pub fn is_subset_of(&self, other: &TimeSet, tol: f64) -> bool {
        let inside = |lo: f64, hi: f64| {
            other
                .intervals
                .iter()
                .any(|&(a, b)| a - tol <= lo && hi <= b + tol)
        };
        self.intervals.iter().all(|&(lo, hi)| inside(lo, hi))
            && self
                .points
                .iter()
                .all(|&p| inside(p, p) || other.points.iter().any(|&q| (p - q).abs() <= tol))
    }
}

/// Parameters of the window scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub epsilon: f64,
    pub t_max: f64,
    pub grid_step: f64,
    pub refine_tol: f64,
    pub revival_eta: f64,
}

/// Grid step resolving both the fastest single-qubit factor and the Gaussian
/// envelope `exp(-2 t² Σ g_k²)` of the product near revivals.
pub fn default_grid_step(spec: &ApparatusSpec, t_max: f64) -> f64 {
    let rms = spec.couplings().iter().map(|g| g * g).sum::<f64>().sqrt();
    let scale = rms.max(spec.max_coupling());
    if scale > 0.0 {
        (PI / (32.0 * scale)).min(t_max / 16.0)
    } else {
        t_max / 1024.0
    }
}

impl WindowConfig {
    pub fn new(
        epsilon: f64,
        t_max: f64,
        grid_step: f64,
        refine_tol: f64,
        revival_eta: f64,
    ) -> Result<Self> {
        let cfg = Self {
            epsilon,
            t_max,
            grid_step,
            refine_tol,
            revival_eta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults: [`default_grid_step`], `refine_tol = grid_step·1e-6`, `η = 0.01`.
    pub fn auto(spec: &ApparatusSpec, epsilon: f64, t_max: f64) -> Result<Self> {
        let grid_step = default_grid_step(spec, t_max);
        Self::new(epsilon, t_max, grid_step, grid_step * 1e-6, 0.01)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.revival_eta > 0.0 && self.revival_eta < 1.0) {
            return Err(Error::param(format!(
                "revival_eta must lie in (0, 1), got {}",
                self.revival_eta
            )));
        }
        if !(self.t_max.is_finite()
            && 0.0 < self.refine_tol
            && self.refine_tol < self.grid_step
            && self.grid_step < self.t_max)
        {
            return Err(Error::param(format!(
                "need 0 < refine_tol < grid_step < t_max, got {} / {} / {}",
                self.refine_tol, self.grid_step, self.t_max
            )));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let steps = (self.t_max / self.grid_step).ceil() as usize;
        let mut grid: Vec<f64> = (0..steps).map(|i| i as f64 * self.grid_step).collect();
        grid.push(self.t_max);
        grid
    }
}

/// Window parameters with optional grid settings, resolved per apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowParams {
    pub epsilon: f64,
    pub t_max: f64,
    #[serde(default)]
    pub grid_step: Option<f64>,
    #[serde(default)]
    pub refine_tol: Option<f64>,
    #[serde(default = "default_eta")]
    pub revival_eta: f64,
}

fn default_eta() -> f64 {
    0.01
}

impl WindowParams {
    pub fn new(epsilon: f64, t_max: f64) -> Self {
        Self {
            epsilon,
            t_max,
            grid_step: None,
            refine_tol: None,
            revival_eta: default_eta(),
        }
    }

    pub fn resolve(&self, spec: &ApparatusSpec) -> Result<WindowConfig> {
        let grid_step = self
            .grid_step
            .unwrap_or_else(|| default_grid_step(spec, self.t_max));
        let refine_tol = self.refine_tol.unwrap_or(grid_step * 1e-6);
        WindowConfig::new(
            self.epsilon,
            self.t_max,
            grid_step,
            refine_tol,
            self.revival_eta,
        )
    }
}

/// Raised when the grid is too coarse for the fastest single-qubit factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridWarning {
    pub grid_step: f64,
    pub limit: f64,
}

pub fn grid_warning(spec: &ApparatusSpec, cfg: &WindowConfig) -> Option<GridWarning> {
    let g = spec.max_coupling();
    if g == 0.0 {
        return None;
    }
    let limit = PI / (4.0 * g);
    (cfg.grid_step > limit).then_some(GridWarning {
        grid_step: cfg.grid_step,
        limit,
    })
}

fn sample(spec: &ApparatusSpec, grid: &[f64]) -> Vec<f64> {
    grid.par_iter().map(|&t| availability(spec, t)).collect()
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Boundary between a time inside the set and one outside it.
fn refine_boundary(
    spec: &ApparatusSpec,
    cfg: &WindowConfig,
    mut inside: f64,
    mut outside: f64,
) -> f64 {
    let eps = cfg.epsilon;
    let mut best = (f64::INFINITY, 0.5 * (inside + outside));
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        let a = availability(spec, mid);
        let miss = (a - eps).abs();
        if miss < best.0 {
            best = (miss, mid);
        }
        if (inside - outside).abs() <= cfg.refine_tol && miss <= eps * BOUNDARY_REL_TOL {
            return mid;
        }
        if a < eps {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    best.1
}

/// `{t ∈ [0, t_max] : A(t) < ε}` as closed intervals.
///
/// The uniform grid is augmented with every zero of the overlap and with
/// refined extrema of grid cells whose discrete minimum (maximum) sits above
/// (below) the threshold, so narrow dips and spikes between grid points are
/// not lost.
pub fn wprc_set(spec: &ApparatusSpec, cfg: &WindowConfig) -> Result<TimeSet> {
    cfg.validate()?;
    if let Some(w) = grid_warning(spec, cfg) {
        log::warn!(
            "grid step {} exceeds {} for the fastest coupling; windows may be missed",
            w.grid_step,
            w.limit
        );
    }
    let horizon = (0.0, cfg.t_max);
    let eps = cfg.epsilon;
    let grid = cfg.grid();
    let values = sample(spec, &grid);
    let a = |t: f64| availability(spec, t);

    let mut samples: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    let extra: Vec<(f64, f64)> = (1..grid.len() - 1)
        .into_par_iter()
        .filter_map(|i| {
            let (l, m, r) = (values[i - 1], values[i], values[i + 1]);
            if m <= l && m <= r && m >= eps {
                let found = golden_min(a, grid[i - 1], grid[i + 1], cfg.refine_tol);
                (found.1 < eps).then_some(found)
            } else if m >= l && m >= r && m < eps {
                let (t, neg) = golden_min(|t| -a(t), grid[i - 1], grid[i + 1], cfg.refine_tol);
                (-neg >= eps).then_some((t, -neg))
            } else {
                None
            }
        })
        .collect();
    samples.extend(extra);
    for &t in prc_times(spec, cfg)?.points() {
        samples.push((t, a(t)));
    }
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    samples.dedup_by(|x, y| x.0 == y.0);

    let mut intervals = Vec::new();
    let mut open: Option<f64> = (samples[0].1 < eps).then_some(samples[0].0);
    for pair in samples.windows(2) {
        let ((t0, v0), (t1, v1)) = (pair[0], pair[1]);
        match (v0 < eps, v1 < eps) {
            (false, true) => open = Some(refine_boundary(spec, cfg, t1, t0)),
            (true, false) => {
                let hi = refine_boundary(spec, cfg, t0, t1);
                if let Some(lo) = open.take() {
                    if lo < hi {
                        intervals.push((lo, hi));
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(lo) = open {
        if lo < cfg.t_max {
            intervals.push((lo, cfg.t_max));
        }
    }
    TimeSet::new(horizon, intervals, Vec::new())
}

/// Isolated zeros of the overlap on `[0, t_max]`, refined to `refine_tol`.
pub fn prc_times(spec: &ApparatusSpec, cfg: &WindowConfig) -> Result<TimeSet> {
    cfg.validate()?;
    let grid = cfg.grid();
    let mut roots: Vec<f64> = spec
        .couplings()
        .par_iter()
        .zip(spec.inits().par_iter())
        .flat_map_iter(|(&g, q)| {
            let p_up = q.p_up();
            let re = move |t: f64| overlap_factor(p_up, g, t).re;
            let mut found = Vec::new();
            if g == 0.0 {
                return found;
            }
            let mut prev = (grid[0], re(grid[0]));
            if prev.1 == 0.0 {
                found.push(prev.0);
            }
            for &t in &grid[1..] {
                let cur = (t, re(t));
                if cur.1 == 0.0 {
                    found.push(t);
                } else if prev.1 * cur.1 < 0.0 {
                    let (mut lo, mut hi) = (prev.0, cur.0);
                    let lo_sign = prev.1.signum();
                    while hi - lo > cfg.refine_tol {
                        let mid = 0.5 * (lo + hi);
                        if mid == lo || mid == hi {
                            break;
                        }
                        if re(mid).signum() == lo_sign {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    found.push(0.5 * (lo + hi));
                }
                prev = cur;
            }
            let floor = 2.0 * g.abs() * cfg.refine_tol + ZERO_FLOOR;
            found.retain(|&t| overlap_factor(p_up, g, t).norm() <= floor);
            found
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    let mut points: Vec<f64> = Vec::with_capacity(roots.len());
    for t in roots {
        match points.last() {
            Some(&last) if t - last <= 2.0 * cfg.refine_tol => {}
            _ => points.push(t.clamp(0.0, cfg.t_max)),
        }
    }
    TimeSet::new((0.0, cfg.t_max), Vec::new(), points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Revivals {
    pub times: Vec<f64>,
    /// `A ≡ 1`: every time is a maximum, only the horizon ends are reported.
    pub degenerate: bool,
}

/// Local maxima of `A(t)` with `A ≥ 1 - η`, sorted.
pub fn revivals(spec: &ApparatusSpec, cfg: &WindowConfig) -> Result<Revivals> {
    cfg.validate()?;
    if spec.is_trivial() {
        return Ok(Revivals {
            times: vec![0.0, cfg.t_max],
            degenerate: true,
        });
    }
    let grid = cfg.grid();
    let values = sample(spec, &grid);
    let last = grid.len() - 1;
    let threshold = 1.0 - cfg.revival_eta;
    let a = |t: f64| availability(spec, t);
    let mut found: Vec<(f64, f64)> = Vec::new();
    if values[0] >= values[1] {
        found.push((grid[0], values[0]));
    }
    found.extend(
        (1..last)
            .into_par_iter()
            .filter(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1])
            .map(|i| {
                let (t, neg) = golden_min(|t| -a(t), grid[i - 1], grid[i + 1], cfg.refine_tol);
                (t, -neg)
            })
            .collect::<Vec<_>>(),
    );
    if values[last] >= values[last - 1] {
        found.push((grid[last], values[last]));
    }
    let mut times: Vec<f64> = Vec::new();
    for (t, v) in found {
        if v < threshold {
            continue;
        }
        match times.last() {
            Some(&prev) if t - prev <= 0.5 * cfg.grid_step => {}
            _ => times.push(t),
        }
    }
    Ok(Revivals {
        times,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongestWindow {
    pub interval: Option<(f64, f64)>,
    pub duration: f64,
}

/// Longest interval of `ts`; ties go to the earliest start.
pub fn longest_window(ts: &TimeSet) -> LongestWindow {
    let mut best = LongestWindow {
        interval: None,
        duration: 0.0,
    };
    for &(lo, hi) in ts.intervals() {
        if hi - lo > best.duration {
            best = LongestWindow {
                interval: Some((lo, hi)),
                duration: hi - lo,
            };
        }
    }
    best
}

/// Everything the window scan produces for one apparatus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub wprc: TimeSet,
    pub prc: TimeSet,
    pub revivals: Revivals,
    pub longest_window: LongestWindow,
    pub warnings: Vec<GridWarning>,
}

pub fn analyze(spec: &ApparatusSpec, cfg: &WindowConfig) -> Result<WindowReport> {
    let wprc = wprc_set(spec, cfg)?;
    let longest = longest_window(&wprc);
    Ok(WindowReport {
        prc: prc_times(spec, cfg)?,
        revivals: revivals(spec, cfg)?,
        longest_window: longest,
        warnings: grid_warning(spec, cfg).into_iter().collect(),
        wprc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_apparatus, CouplingEnsemble, InitsPolicy, QubitInit};

    fn ordered(g: f64, n: usize) -> ApparatusSpec {
        make_apparatus(
            CouplingEnsemble::Ordered { g },
            n,
            &InitsPolicy::equatorial(),
        )
        .unwrap()
    }

    #[test]
    fn timeset_validation() {
        assert!(TimeSet::new((0.0, 10.0), vec![(1.0, 2.0), (3.0, 4.0)], vec![5.0]).is_ok());
        assert!(TimeSet::new((0.0, 10.0), vec![(3.0, 4.0), (1.0, 2.0)], vec![]).is_err());
        assert!(TimeSet::new((0.0, 10.0), vec![(1.0, 1.0)], vec![]).is_err());
        assert!(TimeSet::new((0.0, 10.0), vec![(1.0, 11.0)], vec![]).is_err());
        assert!(TimeSet::new((0.0, 10.0), vec![(1.0, 2.0)], vec![1.5]).is_err());
        assert!(TimeSet::new((0.0, 10.0), vec![], vec![3.0, 2.0]).is_err());
    }

    #[test]
    fn timeset_json_shape() {
        let ts = TimeSet::new((0.0, 50.0), vec![(1.5, 2.0)], vec![7.25]).unwrap();
        let json = serde_json::to_string(&ts).unwrap();
        assert_eq!(
            json,
            r#"{"horizon":[0.0,50.0],"intervals":[[1.5,2.0]],"points":[7.25]}"#
        );
        let back: TimeSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ts);
        assert!(serde_json::from_str::<TimeSet>(
            r#"{"horizon":[0,5],"intervals":[[3,2]],"points":[]}"#
        )
        .is_err());
    }

    #[test]
    fn config_validation() {
        assert!(WindowConfig::new(0.01, 50.0, 0.1, 1e-7, 0.01).is_ok());
        assert!(WindowConfig::new(0.0, 50.0, 0.1, 1e-7, 0.01).is_err());
        assert!(WindowConfig::new(0.01, 50.0, 0.1, 0.2, 0.01).is_err());
        assert!(WindowConfig::new(0.01, 0.05, 0.1, 1e-7, 0.01).is_err());
        assert!(WindowConfig::new(0.01, 50.0, 0.1, 1e-7, 1.0).is_err());
    }

    #[test]
    fn grid_warning_for_coarse_grid() {
        let spec = ordered(0.1, 3);
        let coarse = WindowConfig::new(0.01, 100.0, 10.0, 1e-6, 0.01).unwrap();
        let w = grid_warning(&spec, &coarse).unwrap();
        assert!((w.limit - PI / 0.4).abs() < 1e-12);
        let fine = WindowConfig::auto(&spec, 0.01, 100.0).unwrap();
        assert!(grid_warning(&spec, &fine).is_none());
    }

    #[test]
    fn single_ordered_window_per_half_period() {
        let g = 0.1;
        let n = 10;
        let half_period = PI / (2.0 * g);
        let spec = ordered(g, n);
        let cfg = WindowConfig::auto(&spec, 0.01, half_period).unwrap();
        let ts = wprc_set(&spec, &cfg).unwrap();
        assert_eq!(ts.intervals().len(), 1);
        let (lo, hi) = ts.intervals()[0];
        assert!(0.0 < lo && hi < half_period);
        assert!((0.5 * (lo + hi) - PI / (4.0 * g)).abs() < 1e-6);
        // |cos 2gτ| = ε^{1/N} at the boundaries.
        let shift = 0.01f64.powf(1.0 / n as f64).acos() / (2.0 * g);
        assert!((lo - shift).abs() <= 1e-6, "{lo} vs {shift}");
        assert!((hi - (half_period - shift)).abs() <= 1e-6);
        for b in [lo, hi] {
            assert!((availability(&spec, b) - 0.01).abs() <= 0.01 * 1e-6);
        }
    }

    #[test]
    fn trivial_apparatus_has_no_windows() {
        let spec = ApparatusSpec::new(
            vec![0.1, 0.2, 0.3],
            vec![QubitInit::up(), QubitInit::down(), QubitInit::up()],
        )
        .unwrap();
        let cfg = WindowConfig::new(0.01, 50.0, 0.1, 1e-7, 0.01).unwrap();
        assert!(wprc_set(&spec, &cfg).unwrap().is_empty());
        assert!(prc_times(&spec, &cfg).unwrap().is_empty());
        let rev = revivals(&spec, &cfg).unwrap();
        assert!(rev.degenerate);
        assert_eq!(rev.times, vec![0.0, 50.0]);
    }

    #[test]
    fn unbalanced_ordered_has_no_zeros() {
        let q = QubitInit::new(
            num_complex::Complex64::new(0.6f64.sqrt(), 0.0),
            num_complex::Complex64::new(0.4f64.sqrt(), 0.0),
        )
        .unwrap();
        let spec = ApparatusSpec::new(vec![0.1; 8], vec![q; 8]).unwrap();
        let cfg = WindowConfig::auto(&spec, 0.01, 50.0).unwrap();
        assert!(prc_times(&spec, &cfg).unwrap().is_empty());
    }

    #[test]
    fn single_qubit_zero_lattice() {
        let spec = make_apparatus(
            CouplingEnsemble::Disordered {
                interval: (0.0, 0.2),
                seed: 77,
            },
            1,
            &InitsPolicy::equatorial(),
        )
        .unwrap();
        let g = spec.couplings()[0];
        let cfg = WindowConfig::new(0.01, 200.0, 0.05, 1e-8, 0.01).unwrap();
        let points = prc_times(&spec, &cfg).unwrap();
        let expected: Vec<f64> = (0..)
            .map(|n| PI / (4.0 * g) + n as f64 * PI / (2.0 * g))
            .take_while(|&t| t <= 200.0)
            .collect();
        assert_eq!(points.points().len(), expected.len());
        for (got, want) in points.points().iter().zip(&expected) {
            assert!((got - want).abs() <= 1e-8);
        }
    }

    #[test]
    fn ordered_revivals_on_lattice() {
        let spec = ordered(0.1, 10);
        let cfg = WindowConfig::auto(&spec, 0.01, 50.0).unwrap();
        let rev = revivals(&spec, &cfg).unwrap();
        assert!(!rev.degenerate);
        let expected = [0.0, PI / 0.2, 2.0 * PI / 0.2, 3.0 * PI / 0.2];
        assert_eq!(rev.times.len(), expected.len(), "{:?}", rev.times);
        for (got, want) in rev.times.iter().zip(expected) {
            assert!((got - want).abs() < 1e-5, "{got} vs {want}");
        }
    }

    #[test]
    fn longest_window_ties_and_empty() {
        let empty = TimeSet::empty((0.0, 1.0));
        assert_eq!(longest_window(&empty).duration, 0.0);
        assert_eq!(longest_window(&empty).interval, None);
        let ts = TimeSet::new(
            (0.0, 10.0),
            vec![(1.0, 2.0), (3.0, 4.0), (5.0, 5.5)],
            vec![],
        )
        .unwrap();
        assert_eq!(longest_window(&ts).interval, Some((1.0, 2.0)));
    }

    #[test]
    fn narrow_dip_below_grid_resolution_is_found() {
        // A single balanced qubit with a tiny threshold: the dip is far narrower
        // than the grid step but the zero itself is always sampled.
        let spec = ordered(0.1, 1);
        let cfg = WindowConfig::new(1e-6, 20.0, 0.7, 1e-9, 0.01).unwrap();
        let ts = wprc_set(&spec, &cfg).unwrap();
        assert_eq!(ts.intervals().len(), 1);
        assert!(ts.contains(PI / 0.4));
        assert!(ts.measure() < 1e-4);
    }
}
