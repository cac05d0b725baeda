//! Pointer-state overlap, measurement windows and apparatus classification for
//! a qubit premeasured by an apparatus of N qubits.
//!
//! * [`model`]: closed-form pointer overlap, availability, reduced qubit state
//!   and long-time statistics.
//! * [`oracle`]: brute-force state-vector and general Ozawa evolutions used to
//!   validate the closed forms.
//! * [`window`]: ε-window sets, exact-orthogonality times and revivals.
//! * [`classify`]: reliability, accessibility and N–T diagram placement.
//! * [`info`]: entropies and mutual information with exact or ε-overlapping
//!   pointers.

pub mod classify;
pub mod error;
pub mod info;
pub mod model;
pub mod oracle;
pub mod window;

pub use error::{Error, Result};
pub use model::{
    availability, bloch_vector, long_time_variance, make_apparatus, overlap, perturbative_overlap,
    reduced_system_state, sample_availability, ApparatusSpec, BlochVector, CouplingEnsemble,
    DensityMatrix, InitsPolicy, QubitInit, SystemInit,
};
pub use num_complex::Complex64;
pub use window::{
    longest_window, prc_times, revivals, wprc_set, TimeSet, WindowConfig, WindowParams,
};
