//! One-to-all qubit model: a measured qubit coupled to N apparatus qubits
//! through `H = σz ⊗ Σ_k g_k σz^(k)` (ħ = 1, couplings are angular frequencies).
//!
//! Starting from the product state `(a|↑⟩ + b|↓⟩) ⊗_k (α_k|↑⟩ + β_k|↓⟩)` the
//! apparatus splits into two pointer states `Ξ±(t)` whose overlap is
//!
//! ```text
//! ⟨Ξ⁻(t)|Ξ⁺(t)⟩ = Π_k ( |α_k|² e^{-2i g_k t} + |β_k|² e^{2i g_k t} )
//! ```
//!
//! Its modulus is the availability `A(t)`. Everything in this module is a
//! closed form; [`crate::oracle`] provides the brute-force cross-checks.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Normalization tolerance for amplitudes.
pub const NORM_TOL: f64 = 1e-12;

/// Above this many factors the overlap product is accumulated as
/// log-magnitude plus phase, since `cos^N` underflows near its zeros.
pub const LOG_PRODUCT_THRESHOLD: usize = 64;

pub type DensityMatrix = Matrix2<Complex64>;

fn check_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// Initial state `α|↑⟩ + β|↓⟩` of one apparatus qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitInit {
    alpha: Complex64,
    beta: Complex64,
}

impl QubitInit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        check_finite(alpha, "alpha")?;
        check_finite(beta, "beta")?;
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "qubit initial state",
                norm,
            });
        }
        Ok(Self { alpha, beta })
    }

    /// Equal-weight state `(|↑⟩ + e^{iφ}|↓⟩)/√2`.
    pub fn equatorial(phase: f64) -> Self {
        Self {
            alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex64::from_polar(FRAC_1_SQRT_2, phase),
        }
    }

    /// Point on the Bloch sphere with polar angle `theta` and azimuth `phi`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self {
            alpha: Complex64::new((theta / 2.0).cos(), 0.0),
            beta: Complex64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    pub fn up() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn down() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `|α|²`
    pub fn p_up(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `|β|²`
    pub fn p_down(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

/// Couplings `g_k` and initial states of the N apparatus qubits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApparatusSpec {
    couplings: Vec<f64>,
    inits: Vec<QubitInit>,
}

impl ApparatusSpec {
    pub fn new(couplings: Vec<f64>, inits: Vec<QubitInit>) -> Result<Self> {
        if couplings.len() != inits.len() {
            return Err(Error::LengthMismatch {
                couplings: couplings.len(),
                inits: inits.len(),
            });
        }
        if couplings.is_empty() {
            return Err(Error::EmptyApparatus);
        }
        if couplings.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("couplings"));
        }
        Ok(Self { couplings, inits })
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn inits(&self) -> &[QubitInit] {
        &self.inits
    }

    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0_f64, |m, g| m.max(g.abs()))
    }

    pub fn mean_coupling(&self) -> f64 {
        self.couplings.iter().sum::<f64>() / self.len() as f64
    }

    /// Apparatus made of the qubits of `self` followed by those of `other`.
    pub fn concat(&self, other: &ApparatusSpec) -> ApparatusSpec {
        let mut couplings = self.couplings.clone();
        couplings.extend_from_slice(&other.couplings);
        let mut inits = self.inits.clone();
        inits.extend_from_slice(&other.inits);
        ApparatusSpec { couplings, inits }
    }

    /// True when every factor of the overlap has constant unit modulus, i.e.
    /// the qubit never decoheres.
    pub fn is_trivial(&self) -> bool {
        self.couplings
            .iter()
            .zip(&self.inits)
            .all(|(g, q)| *g == 0.0 || q.p_up() * q.p_down() == 0.0)
    }

    fn factor(&self, k: usize, t: f64) -> Complex64 {
        overlap_factor(self.inits[k].p_up(), self.couplings[k], t)
    }
}

/// Single-qubit factor `p e^{-2igt} + (1-p) e^{2igt}`.
pub(crate) fn overlap_factor(p_up: f64, g: f64, t: f64) -> Complex64 {
    let phase = 2.0 * g * t;
    let (s, c) = phase.sin_cos();
    let p_down = 1.0 - p_up;
    Complex64::new(c, (p_down - p_up) * s)
}

/// Initial state `a|↑⟩ + b|↓⟩` of the measured qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemInit {
    a: Complex64,
    b: Complex64,
}

impl SystemInit {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        check_finite(a, "a")?;
        check_finite(b, "b")?;
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "system initial state",
                norm,
            });
        }
        Ok(Self { a, b })
    }

    /// `(|↑⟩ + |↓⟩)/√2`
    pub fn balanced() -> Self {
        Self {
            a: Complex64::new(FRAC_1_SQRT_2, 0.0),
            b: Complex64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }
}

/// How the couplings of an apparatus are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingEnsemble {
    /// Every qubit couples with the same `g`.
    Ordered { g: f64 },
    /// Couplings drawn i.i.d. uniform on the closed interval `[lo, hi]`.
    Disordered { interval: (f64, f64), seed: u64 },
}

impl CouplingEnsemble {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CouplingEnsemble::Ordered { g } => {
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::param(format!(
                        "ordered coupling must be positive, got {g}"
                    )));
                }
            }
            CouplingEnsemble::Disordered {
                interval: (lo, hi), ..
            } => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
                    return Err(Error::InvalidInterval { lo, hi });
                }
            }
        }
        Ok(())
    }
}

/// How the apparatus qubits are initialized.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum InitsPolicy {
    /// `|α_k|² = ½`; relative phases default to 0.
    Equatorial {
        #[serde(default)]
        phases: Option<Vec<f64>>,
    },
    Fixed {
        inits: Vec<QubitInit>,
    },
    /// Uniform on the Bloch sphere.
    Random {
        seed: u64,
    },
}

impl InitsPolicy {
    pub fn equatorial() -> Self {
        InitsPolicy::Equatorial { phases: None }
    }

    /// Initial states for an apparatus of `n` qubits.
    pub fn build(&self, n: usize) -> Result<Vec<QubitInit>> {
        match self {
            InitsPolicy::Equatorial { phases: None } => Ok(vec![QubitInit::equatorial(0.0); n]),
            InitsPolicy::Equatorial {
                phases: Some(phases),
            } => {
                if phases.len() != n {
                    return Err(Error::LengthMismatch {
                        couplings: n,
                        inits: phases.len(),
                    });
                }
                Ok(phases.iter().map(|&p| QubitInit::equatorial(p)).collect())
            }
            InitsPolicy::Fixed { inits } => Ok(inits.clone()),
            InitsPolicy::Random { seed } => Ok(random_inits(n, *seed)),
        }
    }
}

/// Draws `n` Bloch-sphere-uniform qubit states. Stream order per qubit:
/// `cos θ` uniform on `[-1, 1]`, then `φ` uniform on `[0, 2π)`.
pub fn random_inits(n: usize, seed: u64) -> Vec<QubitInit> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let cos_theta = Uniform::new_inclusive(-1.0, 1.0);
    let azimuth = Uniform::new(0.0, 2.0 * PI);
    (0..n)
        .map(|_| {
            let z: f64 = cos_theta.sample(&mut rng);
            let phi = azimuth.sample(&mut rng);
            QubitInit::from_bloch(z.clamp(-1.0, 1.0).acos(), phi)
        })
        .collect()
}

/// Draws `n` couplings i.i.d. uniform on `[lo, hi]` from a ChaCha20 stream
/// seeded with `seed`, in qubit order.
pub fn sample_couplings(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(lo, hi);
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

pub fn make_apparatus(
    ensemble: CouplingEnsemble,
    n: usize,
    inits_policy: &InitsPolicy,
) -> Result<ApparatusSpec> {
    if n == 0 {
        return Err(Error::EmptyApparatus);
    }
    ensemble.validate()?;
    let couplings = match ensemble {
        CouplingEnsemble::Ordered { g } => vec![g; n],
        CouplingEnsemble::Disordered {
            interval: (lo, hi),
            seed,
        } => sample_couplings(n, lo, hi, seed),
    };
    ApparatusSpec::new(couplings, inits_policy.build(n)?)
}

/// Pointer-state overlap `⟨Ξ⁻(t)|Ξ⁺(t)⟩`.
pub fn overlap(spec: &ApparatusSpec, t: f64) -> Complex64 {
    let n = spec.len();
    if n <= LOG_PRODUCT_THRESHOLD {
        (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * spec.factor(k, t))
    } else {
        let (log_mag, phase) = log_overlap(spec, t);
        if log_mag == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(log_mag.exp(), phase)
        }
    }
}

/// `(ln A(t), arg)` of the overlap, accumulated factor by factor.
pub fn log_overlap(spec: &ApparatusSpec, t: f64) -> (f64, f64) {
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for k in 0..spec.len() {
        let f = spec.factor(k, t);
        let m = f.norm();
        if m == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        log_mag += m.ln();
        phase += f.arg();
    }
    (log_mag, phase.rem_euclid(2.0 * PI))
}

/// Availability `A(t) = |⟨Ξ⁻(t)|Ξ⁺(t)⟩|`.
pub fn availability(spec: &ApparatusSpec, t: f64) -> f64 {
    if spec.len() <= LOG_PRODUCT_THRESHOLD {
        overlap(spec, t).norm().min(1.0)
    } else {
        let (log_mag, _) = log_overlap(spec, t);
        log_mag.exp().min(1.0)
    }
}

/// Availability on a sorted, nonnegative time grid.
pub fn sample_availability(spec: &ApparatusSpec, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    for (i, &t) in t_grid.iter().enumerate() {
        check_time(t)?;
        if i > 0 && t < t_grid[i - 1] {
            return Err(Error::UnsortedGrid(i));
        }
    }
    Ok(t_grid.iter().map(|&t| (t, availability(spec, t))).collect())
}

/// Reduced density matrix of the measured qubit in the `{↑, ↓}` basis.
/// The off-diagonal element is `a b* ⟨Ξ⁻(t)|Ξ⁺(t)⟩`.
pub fn reduced_system_state(spec: &ApparatusSpec, sys: &SystemInit, t: f64) -> DensityMatrix {
    let coherence = sys.a * sys.b.conj() * overlap(spec, t);
    Matrix2::new(
        Complex64::new(sys.a.norm_sqr(), 0.0),
        coherence,
        coherence.conj(),
        Complex64::new(sys.b.norm_sqr(), 0.0),
    )
}

/// Bloch vector `r` with `ρ = ½(I + r·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r: [f64; 3],
}

impl BlochVector {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let off = rho[(0, 1)];
        BlochVector {
            r: [2.0 * off.re, -2.0 * off.im, rho[(0, 0)].re - rho[(1, 1)].re],
        }
    }

    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let [x, y, z] = self.r;
        Matrix2::new(
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        )
    }
}

/// Point of the measured qubit in the Bloch ball. For `a = b` this gives
/// `|r(t)| = A(t)`; the squared form `|r|² = A` does not follow from the
/// reduced density matrix and is not what is computed here.
pub fn bloch_vector(spec: &ApparatusSpec, sys: &SystemInit, t: f64) -> BlochVector {
    BlochVector::from_density(&reduced_system_state(spec, sys, t))
}

/// `Π_k (|α_k|⁴ + |β_k|⁴)`: the long-time average of `A(t)²`.
pub fn long_time_variance(spec: &ApparatusSpec) -> f64 {
    spec.inits
        .iter()
        .map(|q| q.p_up().powi(2) + q.p_down().powi(2))
        .product()
}

/// First-order expansion of the equatorial overlap `Π_k cos(2 g_k t)` for
/// couplings `g_k = g + δg_k` around a common `g`:
///
/// ```text
/// cos(2gt)^N [1 - (2t / cos 2gt) Σ_k δg_k sin(2 g_k t)]
/// ```
pub fn perturbative_overlap(g: f64, deltas: &[f64], t: f64) -> Result<Complex64> {
    check_time(t)?;
    if deltas.is_empty() {
        return Err(Error::EmptyApparatus);
    }
    let c = (2.0 * g * t).cos();
    if c.abs() <= 0.1 {
        return Err(Error::ExpansionInvalid(c.abs()));
    }
    let correction: f64 = deltas
        .iter()
        .map(|d| d * (2.0 * (g + d) * t).sin())
        .sum::<f64>();
    let value = c.powi(deltas.len() as i32) * (1.0 - 2.0 * t / c * correction);
    Ok(Complex64::new(value, 0.0))
}
