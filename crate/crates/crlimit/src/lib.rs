//! Numerical engine for the weakly nonlinear large-box limit of the cubic
//! Schrödinger equation on the two-dimensional torus.
//!
//! * [`lattice_resonance`] — visible points, resonant rectangles, the
//!   normalised lattice operator `T_L` and periodic Strichartz sums.
//! * [`cr_operator`] — the continuous operator `T`, the Hamiltonian in three
//!   forms, conserved quantities, the Fourier transform and explicit profiles.
//! * [`cr_dynamics`] — time integration of `−i∂ₜg = T(g,g,g)`.
//! * [`nls_bridge`] — split-step NLS on the box, the resonant system and the
//!   comparison experiments between the discrete and continuous dynamics.
//! * [`onedim_limit`] — the one-dimensional analogue with its closed form.

pub mod cr_dynamics;
pub mod cr_operator;
pub mod error;
pub mod hermite;
pub mod lattice_resonance;
pub mod nls_bridge;
pub mod numerics;
pub mod onedim_limit;

pub use error::{Error, Result};
