//! Starting orbitals.

use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::baselines::occupied_orbitals;
use crate::error::{LinalgError, ManifoldError};
use crate::fixtures;
use crate::formats::{self, FormatError};
use crate::hf::{IntegralSet, SpinPair};
use crate::manifold::GrassmannPoint;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuessMode {
    /// Lowest generalized eigenvectors of `(h, S)`.
    Core,
    /// Uniformly random feasible orbitals from the seed.
    Random,
    /// Orbitals read from a file and Löwdin orthonormalized.
    File(PathBuf),
}

impl FromStr for GuessMode {
    type Err = String;

    /// `core`, `random` or `file:<path>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(GuessMode::Core),
            "random" => Ok(GuessMode::Random),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(GuessMode::File(PathBuf::from(path))),
                _ => Err(format!("unknown guess `{s}`; expected core, random or file:<path>")),
            },
        }
    }
}

impl std::fmt::Display for GuessMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GuessMode::Core => f.write_str("core"),
            GuessMode::Random => f.write_str("random"),
            GuessMode::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuessError {
    #[error("orbital file: {0}")]
    Format(#[from] FormatError),
    #[error("guess orbitals: {0}")]
    Manifold(#[from] ManifoldError),
    #[error("core Hamiltonian eigenproblem: {0}")]
    Linalg(#[from] LinalgError),
}

pub fn core_guess(ints: &IntegralSet) -> Result<SpinPair, LinalgError> {
    Ok(SpinPair {
        c_alpha: occupied_orbitals(ints, ints.h(), ints.n_alpha())?,
        c_beta: occupied_orbitals(ints, ints.h(), ints.n_beta())?,
    })
}

pub fn make_guess(ints: &IntegralSet, mode: &GuessMode, seed: u64) -> Result<SpinPair, GuessError> {
    match mode {
        GuessMode::Core => Ok(core_guess(ints)?),
        GuessMode::Random => Ok(fixtures::random_pair(ints, seed)),
        GuessMode::File(path) => {
            let raw = formats::load_orbitals(path, ints.d(), ints.n_alpha(), ints.n_beta())?;
            let a = GrassmannPoint::from_representative(ints.metric().clone(), raw.c_alpha)?;
            let b = GrassmannPoint::from_representative(ints.metric().clone(), raw.c_beta)?;
            Ok(SpinPair {
                c_alpha: a.into_matrix(),
                c_beta: b.into_matrix(),
            })
        }
    }
}
