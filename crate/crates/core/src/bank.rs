//! The four-filter analysis/synthesis set shared by all three families.

use std::fmt;

use crate::biorth_lattice::{self, BiorthLatticeParams};
use crate::error::Result;
use crate::fir_poly::FirFilter;
use crate::lifting::{self, LiftingParams};
use crate::orth_lattice::{self, OrthLatticeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Orthogonal,
    BiorthogonalLattice,
    Lifting,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Orthogonal => "orthogonal",
            Family::BiorthogonalLattice => "biorthogonal-lattice",
            Family::Lifting => "lifting",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "orthogonal" | "orth" => Some(Family::Orthogonal),
            "biorthogonal-lattice" | "biorth" => Some(Family::BiorthogonalLattice),
            "lifting" => Some(Family::Lifting),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Tunable parameters of any family.
#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Orth(OrthLatticeParams),
    Biorth(BiorthLatticeParams),
    Lifting(LiftingParams),
}

impl Params {
    pub fn family(&self) -> Family {
        match self {
            Params::Orth(_) => Family::Orthogonal,
            Params::Biorth(_) => Family::BiorthogonalLattice,
            Params::Lifting(_) => Family::Lifting,
        }
    }

    /// The flat parameter vector (angles, lattice coefficients or lifting
    /// coefficients).
    pub fn values(&self) -> &[f64] {
        match self {
            Params::Orth(p) => p.angles(),
            Params::Biorth(p) => p.ks(),
            Params::Lifting(p) => p.coeffs(),
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }

    /// Same family (and lifting base), new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Ok(match self {
            Params::Orth(_) => Params::Orth(OrthLatticeParams::new(values)?),
            Params::Biorth(_) => Params::Biorth(BiorthLatticeParams::new(values)?),
            Params::Lifting(p) => Params::Lifting(LiftingParams::new(values, p.base())?),
        })
    }

    pub fn synth(&self) -> Result<FilterBank> {
        match self {
            Params::Orth(p) => Ok(orth_lattice::synth_orth(p)),
            Params::Biorth(p) => biorth_lattice::synth_biorth(p),
            Params::Lifting(p) => Ok(lifting::synth_lifting(p)),
        }
    }

    /// Tap windows `[0, len)` that always contain `h0` and `h1` for this
    /// parameter shape, whatever the parameter values.
    pub fn nominal_lengths(&self) -> (usize, usize) {
        match self {
            Params::Orth(p) => (p.tap_count(), p.tap_count()),
            Params::Biorth(p) => (p.tap_count(), p.tap_count()),
            Params::Lifting(p) => lifting::lifting_tap_count(p.steps()),
        }
    }
}

/// Analysis filters `h0, h1`, synthesis filters `f0, f1`, and the scalar
/// gain and integer delay the analysis→synthesis cascade applies to its input.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    pub h0: FirFilter,
    pub h1: FirFilter,
    pub f0: FirFilter,
    pub f1: FirFilter,
    pub family: Family,
    pub params: Params,
    pub gain: f64,
    pub delay: usize,
}

impl FilterBank {
    pub fn transfer(&self) -> Transfer {
        pr_transfer(&self.h0, &self.h1, &self.f0, &self.f1)
    }
}

/// Distortion and alias terms of a two-channel bank.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transfer {
    /// Coefficient of the dominant tap of `(F0 H0 + F1 H1) / 2`.
    pub gain: f64,
    /// Its power of `z^{-1}`.
    pub delay: usize,
    /// Largest remaining tap of the distortion term.
    pub distortion_residual: f64,
    /// Largest tap of `F0(z) H0(-z) + F1(z) H1(-z)`.
    pub alias_residual: f64,
}

impl Transfer {
    pub fn is_perfect(&self, tol: f64) -> bool {
        self.gain.abs() > tol
            && self.distortion_residual <= tol * self.gain.abs()
            && self.alias_residual <= tol * self.gain.abs()
    }
}

/// Computes `X^(z) = T(z) X(z) + A(z) X(-z)` for the decimate/expand
/// structure and reports `T` as gain and delay.
pub fn pr_transfer(h0: &FirFilter, h1: &FirFilter, f0: &FirFilter, f1: &FirFilter) -> Transfer {
    let t = f0.mul(h0).add(&f1.mul(h1)).scale(0.5);
    let (delay, gain) = dominant_tap(&t);
    let distortion_residual = (t.delay()..=t.degree())
        .filter(|&n| n != delay)
        .map(|n| t.coeff(n).abs())
        .fold(0.0, f64::max);
    let alias = f0.mul(&h0.modulated()).add(&f1.mul(&h1.modulated()));
    let alias_residual = alias.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
    Transfer {
        gain,
        delay,
        distortion_residual,
        alias_residual,
    }
}

/// Power and value of the largest-magnitude tap.
pub(crate) fn dominant_tap(f: &FirFilter) -> (usize, f64) {
    f.coeffs()
        .iter()
        .enumerate()
        .fold((f.delay(), 0.0), |(bp, bv), (i, &c)| {
            if c.abs() > bv.abs() {
                (f.delay() + i, c)
            } else {
                (bp, bv)
            }
        })
}
