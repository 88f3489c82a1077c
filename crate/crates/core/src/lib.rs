//! Riemannian optimization on products of generalized Grassmannians, with an
//! unrestricted Hartree–Fock cost model and Euclidean baselines.

pub mod baselines;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod guess;
pub mod hf;
pub mod manifold;
pub mod matops;
pub mod optim;
pub mod run;
pub mod solvers;
