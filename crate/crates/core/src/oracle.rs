//! Brute-force reference evolutions.
//!
//! Nothing here reuses the closed-form overlap product of [`crate::model`]:
//! the qubit model is evolved as a full `2^(N+1)` state vector (system qubit
//! first, then apparatus qubits 1..N; `|↑⟩` is bit 0) and reduced with an
//! explicit partial trace. The general Ozawa evolution diagonalizes an
//! arbitrary Hermitian pointer generator once and reuses the eigenbasis for
//! every eigenvalue `ω_γ` and time.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{check_time, ApparatusSpec, DensityMatrix, SystemInit};

/// Largest apparatus handled by [`evolve_full`].
pub const MAX_ORACLE_QUBITS: usize = 12;
/// Largest apparatus for which a dense Hamiltonian is exponentiated.
pub const MAX_DENSE_QUBITS: usize = 6;
/// Largest pointer-space dimension for [`GeneralOzawaSpec`].
pub const MAX_POINTER_DIM: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Pure state of the measured qubit plus N apparatus qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_apparatus: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn n_apparatus(&self) -> usize {
        self.n_apparatus
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn check_capacity(spec: &ApparatusSpec, limit: usize) -> Result<()> {
    if spec.len() > limit {
        return Err(Error::Capacity {
            what: "apparatus qubits",
            requested: spec.len(),
            limit,
        });
    }
    Ok(())
}

/// Product state `(a|↑⟩ + b|↓⟩) ⊗_k (α_k|↑⟩ + β_k|↓⟩)`.
pub fn initial_state(spec: &ApparatusSpec, sys: &SystemInit) -> Result<StateVector> {
    check_capacity(spec, MAX_ORACLE_QUBITS)?;
    let mut amps = vec![sys.a(), sys.b()];
    for q in spec.inits() {
        amps = amps
            .iter()
            .flat_map(|&z| [z * q.alpha(), z * q.beta()])
            .collect();
    }
    Ok(StateVector {
        n_apparatus: spec.len(),
        amplitudes: amps,
    })
}

/// Exact evolution under `σz ⊗ Σ_k g_k σz^(k)`. The Hamiltonian is diagonal
/// in the computational basis, so each amplitude picks up `e^{-iEt}` with
/// `E = s Σ_k g_k z_k` read off the bit pattern.
pub fn evolve_full(spec: &ApparatusSpec, sys: &SystemInit, t: f64) -> Result<StateVector> {
    check_time(t)?;
    let mut psi = initial_state(spec, sys)?;
    let n = spec.len();
    let g = spec.couplings();
    for (index, amp) in psi.amplitudes.iter_mut().enumerate() {
        let s = if index >> n & 1 == 0 { 1.0 } else { -1.0 };
        let field: f64 = (0..n)
            .map(|k| {
                let bit = index >> (n - 1 - k) & 1;
                if bit == 0 {
                    g[k]
                } else {
                    -g[k]
                }
            })
            .sum();
        *amp *= Complex64::from_polar(1.0, -s * field * t);
    }
    Ok(psi)
}

/// `ρ_Γ = Tr_Ξ |ψ⟩⟨ψ|` for the system qubit.
pub fn partial_trace_system(psi: &StateVector) -> DensityMatrix {
    let half = 1usize << psi.n_apparatus;
    let (up, down) = psi.amplitudes.split_at(half);
    let mut rho = Matrix2::from_element(zero());
    for (u, d) in up.iter().zip(down) {
        rho[(0, 0)] += u * u.conj();
        rho[(0, 1)] += u * d.conj();
        rho[(1, 0)] += d * u.conj();
        rho[(1, 1)] += d * d.conj();
    }
    rho
}

fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]))
}

/// `S_k = I ⊗ … ⊗ σz ⊗ … ⊗ I` on N qubits, σz in slot `k` (0-based).
fn embedded_z(k: usize, n: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let z = pauli_z();
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for slot in 0..n {
        out = out.kronecker(if slot == k { &z } else { &id });
    }
    out
}

/// Explicit `Σ_k g_k S_k` as a dense `2^N × 2^N` matrix.
pub fn qubit_pointer_generator(spec: &ApparatusSpec) -> Result<DMatrix<Complex64>> {
    let n = spec.len();
    let dim = 1usize << n.min(usize::BITS as usize - 1);
    if dim > MAX_POINTER_DIM || n >= usize::BITS as usize {
        return Err(Error::Capacity {
            what: "pointer dimension",
            requested: dim,
            limit: MAX_POINTER_DIM,
        });
    }
    let mut op = DMatrix::<Complex64>::zeros(dim, dim);
    for (k, &g) in spec.couplings().iter().enumerate() {
        op += embedded_z(k, n) * Complex64::new(g, 0.0);
    }
    Ok(op)
}

/// Ready state `⊗_k (α_k|↑⟩ + β_k|↓⟩)` of the apparatus.
pub fn qubit_ready_state(spec: &ApparatusSpec) -> DVector<Complex64> {
    let mut v = DVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
    for q in spec.inits() {
        v = v.kronecker(&DVector::from_vec(vec![q.alpha(), q.beta()]));
    }
    v
}

/// Same evolution as [`evolve_full`], computed as `exp(-iHt)|ψ₀⟩` with the
/// Hamiltonian built from Kronecker products and a dense matrix exponential.
pub fn evolve_dense(spec: &ApparatusSpec, sys: &SystemInit, t: f64) -> Result<StateVector> {
    check_time(t)?;
    check_capacity(spec, MAX_DENSE_QUBITS)?;
    let h = pauli_z().kronecker(&qubit_pointer_generator(spec)?);
    let u = (h * Complex64::new(0.0, -t)).exp();
    let psi0 = DVector::from_vec(vec![sys.a(), sys.b()]).kronecker(&qubit_ready_state(spec));
    let psi = u * psi0;
    Ok(StateVector {
        n_apparatus: spec.len(),
        amplitudes: psi.iter().copied().collect(),
    })
}

/// Time averages of the overlap and of `A²` over `[0, horizon]`, by the
/// composite trapezoid rule on `steps` intervals. Uses the brute-force
/// product of single-qubit overlaps, written out independently of the model.
pub fn time_averages(spec: &ApparatusSpec, horizon: f64, steps: usize) -> Result<TimeAverages> {
    check_time(horizon)?;
    if horizon <= 0.0 || steps == 0 {
        return Err(Error::param(
            "time average needs a positive horizon and step count",
        ));
    }
    let h = horizon / steps as f64;
    let pointer_overlap = |t: f64| -> Complex64 {
        spec.couplings()
            .iter()
            .zip(spec.inits())
            .map(|(&g, q)| {
                // ⟨ξ⁻_k|ξ⁺_k⟩ with ξ± = α e^{∓igt}|↑⟩ + β e^{±igt}|↓⟩
                let up = q.alpha().conj()
                    * Complex64::from_polar(1.0, -g * t)
                    * q.alpha()
                    * Complex64::from_polar(1.0, -g * t);
                let down = q.beta().conj()
                    * Complex64::from_polar(1.0, g * t)
                    * q.beta()
                    * Complex64::from_polar(1.0, g * t);
                up + down
            })
            .product()
    };
    let mut mean = zero();
    let mut mean_sq = 0.0;
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        let z = pointer_overlap(i as f64 * h);
        mean += z * w;
        mean_sq += z.norm_sqr() * w;
    }
    Ok(TimeAverages {
        overlap: mean / steps as f64,
        availability_sq: mean_sq / steps as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAverages {
    pub overlap: Complex64,
    pub availability_sq: f64,
}

/// `H = O_Γ ⊗ O_Ξ` with `O_Γ = Σ_γ ω_γ |γ⟩⟨γ|` and a Hermitian pointer
/// generator `O_Ξ`, plus the apparatus ready state.
#[derive(Debug, Clone)]
pub struct GeneralOzawaSpec {
    system_spectrum: Vec<f64>,
    ready_state: DVector<Complex64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
    /// Ready state expressed in the eigenbasis of `O_Ξ`.
    ready_in_eigenbasis: DVector<Complex64>,
}

impl GeneralOzawaSpec {
    pub fn new(
        system_spectrum: Vec<f64>,
        pointer_generator: DMatrix<Complex64>,
        ready_state: DVector<Complex64>,
    ) -> Result<Self> {
        let dim = pointer_generator.nrows();
        if dim > MAX_POINTER_DIM {
            return Err(Error::Capacity {
                what: "pointer dimension",
                requested: dim,
                limit: MAX_POINTER_DIM,
            });
        }
        if pointer_generator.ncols() != dim || ready_state.len() != dim || dim == 0 {
            return Err(Error::Dimension(format!(
                "generator is {}x{}, ready state has length {}",
                dim,
                pointer_generator.ncols(),
                ready_state.len()
            )));
        }
        if system_spectrum.is_empty() || system_spectrum.iter().any(|w| !w.is_finite()) {
            return Err(Error::param("system spectrum must be nonempty and finite"));
        }
        let scale = pointer_generator
            .iter()
            .fold(1.0_f64, |m, z| m.max(z.norm()));
        let deviation = (&pointer_generator - pointer_generator.adjoint())
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()));
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(deviation));
        }
        let norm = ready_state.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "ready state",
                norm,
            });
        }
        let eig = pointer_generator.symmetric_eigen();
        let ready_in_eigenbasis = eig.eigenvectors.adjoint() * &ready_state;
        Ok(Self {
            system_spectrum,
            ready_state,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            ready_in_eigenbasis,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_spectrum.len()
    }

    pub fn pointer_dim(&self) -> usize {
        self.ready_state.len()
    }

    /// `|Ξ^γ(t)⟩ = exp(-i ω_γ O_Ξ t)|Ξ_R⟩`.
    pub fn pointer_state(&self, gamma: usize, t: f64) -> DVector<Complex64> {
        let w = self.system_spectrum[gamma];
        let phased = DVector::from_iterator(
            self.pointer_dim(),
            self.eigenvalues
                .iter()
                .zip(self.ready_in_eigenbasis.iter())
                .map(|(&lambda, &c)| c * Complex64::from_polar(1.0, -w * lambda * t)),
        );
        &self.eigenvectors * phased
    }
}

#[derive(Debug, Clone)]
pub struct OzawaEvolution {
    /// One pointer state per system eigenvalue.
    pub pointers: Vec<DVector<Complex64>>,
    /// `delta[(γ', γ)] = ⟨Ξ^γ'(t)|Ξ^γ(t)⟩`.
    pub delta: DMatrix<Complex64>,
    /// Reduced system state `Σ c_γ c_γ'* Δ_γ'γ |γ⟩⟨γ'|`.
    pub rho_system: DMatrix<Complex64>,
}

pub fn evolve_general_ozawa(
    spec: &GeneralOzawaSpec,
    coeffs: &[Complex64],
    t: f64,
) -> Result<OzawaEvolution> {
    check_time(t)?;
    let d = spec.system_dim();
    if coeffs.len() != d {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} system levels",
            coeffs.len(),
            d
        )));
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized {
            what: "system coefficients",
            norm,
        });
    }
    let pointers: Vec<_> = (0..d).map(|g| spec.pointer_state(g, t)).collect();
    let delta = DMatrix::from_fn(d, d, |gp, g| pointers[gp].dotc(&pointers[g]));
    let rho_system = DMatrix::from_fn(d, d, |g, gp| coeffs[g] * coeffs[gp].conj() * delta[(gp, g)]);
    Ok(OzawaEvolution {
        pointers,
        delta,
        rho_system,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_apparatus, CouplingEnsemble, InitsPolicy, QubitInit};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn time_zero_is_input_state() {
        let spec = make_apparatus(
            CouplingEnsemble::Disordered {
                interval: (0.0, 0.2),
                seed: 1,
            },
            4,
            &InitsPolicy::Random { seed: 2 },
        )
        .unwrap();
        let sys = SystemInit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        assert_eq!(
            evolve_full(&spec, &sys, 0.0).unwrap(),
            initial_state(&spec, &sys).unwrap()
        );
    }

    #[test]
    fn two_qubit_phases_by_hand() {
        // a = 1, equatorial apparatus, g = (0.1, 0.3), t = 1: only the system-up
        // half is populated and factorizes into e^{∓ i g_k t}-phased qubits.
        let spec = ApparatusSpec::new(
            vec![0.1, 0.3],
            vec![QubitInit::equatorial(0.0), QubitInit::equatorial(0.0)],
        )
        .unwrap();
        let sys = SystemInit::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let psi = evolve_full(&spec, &sys, 1.0).unwrap();
        let h = 0.5;
        let expected = [
            Complex64::from_polar(h, -0.4),
            Complex64::from_polar(h, -0.1 + 0.3),
            Complex64::from_polar(h, 0.1 - 0.3),
            Complex64::from_polar(h, 0.4),
        ];
        for (got, want) in psi.amplitudes()[..4].iter().zip(expected) {
            assert!((got - want).norm() < 1e-15);
        }
        assert!(psi.amplitudes()[4..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn unitarity_at_long_times() {
        let spec = make_apparatus(
            CouplingEnsemble::Disordered {
                interval: (0.0, 0.2),
                seed: 11,
            },
            9,
            &InitsPolicy::Random { seed: 12 },
        )
        .unwrap();
        let sys = SystemInit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let psi = evolve_full(&spec, &sys, 1e3).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_guard() {
        let spec = make_apparatus(
            CouplingEnsemble::Ordered { g: 0.1 },
            13,
            &InitsPolicy::equatorial(),
        )
        .unwrap();
        assert_eq!(
            evolve_full(&spec, &SystemInit::balanced(), 1.0),
            Err(Error::Capacity {
                what: "apparatus qubits",
                requested: 13,
                limit: 12
            })
        );
    }

    #[test]
    fn separable_state_traces_to_pure_projector() {
        let spec = make_apparatus(
            CouplingEnsemble::Ordered { g: 0.1 },
            3,
            &InitsPolicy::Random { seed: 4 },
        )
        .unwrap();
        let sys = SystemInit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let rho = partial_trace_system(&initial_state(&spec, &sys).unwrap());
        let purity = (rho * rho).trace();
        assert!((purity.re - 1.0).abs() < 1e-12 && purity.im.abs() < 1e-12);
    }

    #[test]
    fn balanced_state_fully_mixed_at_ordered_zero() {
        let spec = make_apparatus(
            CouplingEnsemble::Ordered { g: 0.1 },
            6,
            &InitsPolicy::equatorial(),
        )
        .unwrap();
        let psi = evolve_full(&spec, &SystemInit::balanced(), PI / 0.4).unwrap();
        let rho = partial_trace_system(&psi);
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-8);
        assert!((rho[(1, 1)].re - 0.5).abs() < 1e-8);
        assert!(rho[(0, 1)].norm() < 1e-8);
    }

    #[test]
    fn general_ozawa_rejects_bad_inputs() {
        let non_hermitian =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let ready = DVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        assert!(matches!(
            GeneralOzawaSpec::new(vec![1.0, -1.0], non_hermitian, ready.clone()),
            Err(Error::NotHermitian(_))
        ));
        let herm = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(-1.0, 0.0)],
        );
        let bad_ready = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            GeneralOzawaSpec::new(vec![1.0, -1.0], herm.clone(), bad_ready),
            Err(Error::NotNormalized { .. })
        ));
        let spec = GeneralOzawaSpec::new(vec![1.0, -1.0], herm, ready).unwrap();
        assert!(evolve_general_ozawa(&spec, &[c(1.0, 0.0), c(1.0, 0.0)], 1.0).is_err());
        assert!(evolve_general_ozawa(&spec, &[c(1.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn general_ozawa_at_time_zero_has_unit_delta() {
        let herm = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 0.0), c(0.2, 0.5), c(0.2, -0.5), c(-1.0, 0.0)],
        );
        let ready = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let spec = GeneralOzawaSpec::new(vec![1.0, 0.2, -0.7], herm, ready).unwrap();
        let coeffs = [c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)];
        let evo = evolve_general_ozawa(&spec, &coeffs, 0.0).unwrap();
        for z in evo.delta.iter() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum_gives_identical_pointers() {
        let herm = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 0.0), c(0.2, 0.5), c(0.2, -0.5), c(-1.0, 0.0)],
        );
        let ready = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let spec = GeneralOzawaSpec::new(vec![0.4, 0.4], herm, ready).unwrap();
        let coeffs = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        for &t in &[0.5, 3.0, 40.0] {
            let evo = evolve_general_ozawa(&spec, &coeffs, t).unwrap();
            assert!((&evo.pointers[0] - &evo.pointers[1]).norm() < 1e-15);
            assert!((evo.delta[(0, 1)] - c(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
