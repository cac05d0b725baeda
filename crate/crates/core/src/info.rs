//! Entropies and system–apparatus mutual information (in nats).
//!
//! For a pure global state `Σ c_γ |γ⟩|Ξ^γ⟩` the two reduced entropies agree
//! and the mutual information is twice either of them. With exactly
//! orthogonal pointers the reduced spectrum is `{|c_γ|²}`; when the pointers
//! of levels 1 and 2 overlap by `ε` that 2×2 block has eigenvalues
//!
//! ```text
//! Δ± = (|c₁|² + |c₂|²)/2 ± √((|c₁|² - |c₂|²)² + 4ε²)/2
//! ```
//!
//! and the entropy drops by `A ≈ ε² (ln|c₁|² - ln|c₂|²)/(|c₁|² - |c₂|²)`.
//! The exact drop is always computed; the expansion is reported next to it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const NEGATIVE_TOL: f64 = 1e-10;
const SUM_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;
/// `|c₁|² - |c₂|²` below this is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Shannon/von Neumann entropy `-Σ λ ln λ` of a spectrum, with `0 ln 0 = 0`.
pub fn entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut s = 0.0;
    for &l in eigenvalues {
        if !l.is_finite() {
            return Err(Error::NonFinite("eigenvalues"));
        }
        if l < -NEGATIVE_TOL {
            return Err(Error::NegativeProbability(l));
        }
        sum += l;
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotNormalized {
            what: "spectrum",
            norm: sum,
        });
    }
    Ok(s)
}

/// System state `Σ c_γ |γ⟩` in the measured basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralState {
    coeffs: Vec<Complex64>,
}

impl GeneralState {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Dimension(format!(
                "need at least two levels, got {}",
                coeffs.len()
            )));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite("coefficients"));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "system state",
                norm,
            });
        }
        Ok(Self { coeffs })
    }

    /// State with real amplitudes `√p_γ`.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        Self::new(
            probs
                .iter()
                .map(|&p| Complex64::new(p.max(0.0).sqrt(), 0.0))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoReport {
    pub s_gamma: f64,
    pub s_xi: f64,
    pub s_total: f64,
    pub mutual_info: f64,
    pub deficit: Option<f64>,
}

/// Before the interaction the global state is a product: nothing is shared.
pub fn mutual_info_initial(_state: &GeneralState) -> InfoReport {
    InfoReport {
        s_gamma: 0.0,
        s_xi: 0.0,
        s_total: 0.0,
        mutual_info: 0.0,
        deficit: None,
    }
}

/// Mutual information at a time where all pointers are orthogonal.
pub fn mutual_info_prc(state: &GeneralState) -> Result<InfoReport> {
    let s = entropy(&state.probabilities())?;
    Ok(InfoReport {
        s_gamma: s,
        s_xi: s,
        s_total: 0.0,
        mutual_info: 2.0 * s,
        deficit: None,
    })
}

/// Eigenvalues `(Δ₊, Δ₋)` of `[[c1sq, ε], [ε, c2sq]]`.
pub fn perturbed_eigenvalues(c1sq: f64, c2sq: f64, eps: f64) -> (f64, f64) {
    let mean = 0.5 * (c1sq + c2sq);
    let half_gap = 0.5 * ((c1sq - c2sq).powi(2) + 4.0 * eps * eps).sqrt();
    (mean + half_gap, mean - half_gap)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitReport {
    /// Entropies and mutual information with ε-overlapping pointers 1, 2.
    pub info: InfoReport,
    /// Mutual information with orthogonal pointers.
    pub prc_mutual_info: f64,
    /// Reduced spectrum: `Δ₊, Δ₋, |c₃|², …`.
    pub eigenvalues: Vec<f64>,
    /// `ℐ(ε = 0) - ℐ(ε)`, from exact entropies.
    pub exact_deficit: f64,
    /// `2A`; equals the exact deficit when `degenerate` is set.
    pub leading_order_deficit: f64,
    pub remainder: f64,
    pub degenerate: bool,
    /// `ε² < 0.1 |c₁|² - |c₂|²|`: the second-order expansion is meaningful.
    pub expansion_valid: bool,
}

/// Information lost when pointers 1 and 2 overlap by `ε`.
pub fn wprc_info_deficit(state: &GeneralState, eps: f64) -> Result<DeficitReport> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::param(format!(
            "epsilon must be finite and nonnegative, got {eps}"
        )));
    }
    let probs = state.probabilities();
    let (p1, p2) = (probs[0], probs[1]);
    let (dp, dm) = perturbed_eigenvalues(p1, p2, eps);
    let mut eigenvalues = vec![dp, dm];
    eigenvalues.extend_from_slice(&probs[2..]);

    let s_prc = entropy(&probs)?;
    let s_eps = entropy(&eigenvalues)?;
    let exact_deficit = 2.0 * (s_prc - s_eps);
    let gap = p1 - p2;
    let degenerate = gap.abs() <= DEGENERACY_TOL;
    let leading_order_deficit = if degenerate {
        exact_deficit
    } else {
        2.0 * eps * eps * (p1.ln() - p2.ln()) / gap
    };
    Ok(DeficitReport {
        info: InfoReport {
            s_gamma: s_eps,
            s_xi: s_eps,
            s_total: 0.0,
            mutual_info: 2.0 * s_eps,
            deficit: Some(exact_deficit),
        },
        prc_mutual_info: 2.0 * s_prc,
        eigenvalues,
        exact_deficit,
        leading_order_deficit,
        remainder: exact_deficit - leading_order_deficit,
        degenerate,
        expansion_valid: !degenerate && eps * eps < 0.1 * gap.abs(),
    })
}
