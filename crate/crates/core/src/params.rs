//! Model parameters shared by every module.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The reference anisotropy used throughout the numerical checks.
pub const REFERENCE_ETA: C64 = C64::new(0.0, -0.1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundarySet {
    /// `K⁻ = I`, `K⁺ = M`; quantum-group symmetry `Uq(Bn)`.
    I,
    /// Diagonal `K⁻(u)` with `ε = +1`; symmetry `Uq(Cn)`.
    II,
}

impl BoundarySet {
    pub fn algebra(self) -> Algebra {
        match self {
            BoundarySet::I => Algebra::B,
            BoundarySet::II => Algebra::C,
        }
    }
}

impl fmt::Display for BoundarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundarySet::I => "I",
            BoundarySet::II => "II",
        })
    }
}

impl std::str::FromStr for BoundarySet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(BoundarySet::I),
            "II" | "ii" | "2" => Ok(BoundarySet::II),
            other => Err(Error::InvalidParameter(format!("unknown boundary set {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algebra {
    B,
    C,
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::B => "B",
            Algebra::C => "C",
        })
    }
}

/// Rank `n`, chain length `N`, anisotropy `η` and boundary set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub rank: usize,
    pub sites: usize,
    pub eta: C64,
    pub boundary: BoundarySet,
}

impl ModelParams {
    pub fn new(rank: usize, sites: usize, eta: C64, boundary: BoundarySet) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParameter("rank n must be at least 1".into()));
        }
        if sites == 0 {
            return Err(Error::InvalidParameter("chain length N must be at least 1".into()));
        }
        if !(eta.re.is_finite() && eta.im.is_finite()) || eta.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("anisotropy {eta} is not generic")));
        }
        Ok(Self { rank, sites, eta, boundary })
    }

    /// Parameters at the reference anisotropy.
    pub fn reference(rank: usize, sites: usize, boundary: BoundarySet) -> Self {
        Self::new(rank, sites, REFERENCE_ETA, boundary).expect("reference parameters are valid")
    }

    pub fn with_sites(self, sites: usize) -> Result<Self> {
        Self::new(self.rank, sites, self.eta, self.boundary)
    }

    pub fn with_boundary(self, boundary: BoundarySet) -> Self {
        Self { boundary, ..self }
    }

    /// `ρ = −iπ − 2(2n+1)η`.
    pub fn rho(&self) -> C64 {
        C64::new(0.0, -PI) - self.eta * (2.0 * (2 * self.rank + 1) as f64)
    }

    /// `q = e^{2η}`.
    pub fn q(&self) -> C64 {
        (self.eta * 2.0).exp()
    }

    /// Local Hilbert-space dimension `2n+1`.
    pub fn local_dim(&self) -> usize {
        2 * self.rank + 1
    }

    /// Dimension of the chain space, `(2n+1)^N`.
    pub fn chain_dim(&self) -> usize {
        self.local_dim().pow(self.sites as u32)
    }

    pub fn algebra(&self) -> Algebra {
        self.boundary.algebra()
    }

    /// `(2n+1)·η` and similar integer multiples of `η` appear everywhere.
    pub(crate) fn eta_times(&self, k: f64) -> C64 {
        self.eta * k
    }

    pub(crate) fn n_f(&self) -> f64 {
        self.rank as f64
    }
}

/// Parses `"re,im"` into a complex number.
pub fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::InvalidParameter(format!("expected \"re,im\", got {s:?}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(re.parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = ModelParams::reference(1, 2, BoundarySet::I);
        assert_eq!(p.local_dim(), 3);
        assert_eq!(p.chain_dim(), 9);
        let rho = p.rho();
        assert!((rho - C64::new(0.0, -PI + 0.6)).norm() < 1e-15);
        assert!((p.q() - C64::new(0.0, -0.2).exp()).norm() < 1e-15);
        assert_eq!(p.algebra(), Algebra::B);
        assert_eq!(p.with_boundary(BoundarySet::II).algebra(), Algebra::C);
    }

    #[test]
    fn validation() {
        assert!(ModelParams::new(0, 2, REFERENCE_ETA, BoundarySet::I).is_err());
        assert!(ModelParams::new(1, 0, REFERENCE_ETA, BoundarySet::I).is_err());
        assert!(ModelParams::new(1, 2, C64::new(f64::NAN, 0.0), BoundarySet::I).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_complex("0,-0.1").unwrap(), REFERENCE_ETA);
        assert_eq!(parse_complex(" 0.5 ").unwrap(), C64::new(0.5, 0.0));
        assert!(parse_complex("a,b").is_err());
        assert_eq!("II".parse::<BoundarySet>().unwrap(), BoundarySet::II);
        assert!("III".parse::<BoundarySet>().is_err());
    }
}
