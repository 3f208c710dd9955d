//! Simulation and verification toolkit for coupled nonlinear
//! reaction-diffusion systems: Jacobi-elliptic closed-form solutions,
//! symmetry-reduction checks, reduced-ODE integration, and a
//! method-of-lines PDE solver.
//!
//! The `parallel` feature (on by default) runs the data-parallel inner
//! loops on rayon; disabling it gives a sequential build with
//! bit-identical results.

pub mod elliptic;
pub mod exact;
pub mod ode;
pub mod parallel;
pub mod pde;
pub mod symmetry;
pub mod verify;
