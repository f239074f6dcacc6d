//! Biorthogonal banks with unequal filter lengths, grown from Haar by
//! lifting steps.
//!
//! Step `k` keeps the low-pass filter and rewrites the high-pass one as
//!
//! ```text
//! H1^k(z) = -a_k H0(z) + z^-2 H1^{k-1}(z) + a_k z^{-4k} H0(z)
//! ```
//!
//! which is the matrix step `[1 0; P_k(z²) 1] diag(1, z^-2)` applied to
//! `[H0; H1^{k-1}]` with `P_k(z) = -a_k + a_k z^{-2k}`. Each step has unit
//! determinant up to a delay, so synthesis is undone one step at a time.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::bank::{Family, FilterBank, Params};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::fir_poly::{FirFilter, PolyMatrix2x2};

/// Step counts above this have no reference configuration to compare with.
pub const MAX_TESTED_STEPS: usize = 8;

/// Orthogonal starting point of the lifting cascade. Both tags name the same
/// 2-tap filters, normalized to unit energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftingBase {
    Haar,
    Bior11,
}

impl LiftingBase {
    pub fn tag(self) -> &'static str {
        match self {
            LiftingBase::Haar => "haar",
            LiftingBase::Bior11 => "bior1.1",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "haar" => Some(LiftingBase::Haar),
            "bior1.1" | "bior11" => Some(LiftingBase::Bior11),
            _ => None,
        }
    }

    pub fn lowpass(self) -> FirFilter {
        FirFilter::from_taps(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
    }

    pub fn highpass(self) -> FirFilter {
        FirFilter::from_taps(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
    }

    fn synthesis(self) -> (FirFilter, FirFilter) {
        (
            FirFilter::from_taps(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            FirFilter::from_taps(&[-FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        )
    }
}

/// Lifting coefficients `a_1 .. a_N` and the base wavelet.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingParams {
    coeffs: Vec<f64>,
    base: LiftingBase,
}

impl LiftingParams {
    pub fn new(coeffs: Vec<f64>, base: LiftingBase) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParams(
                "at least one lifting step required".into(),
            ));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParams(
                "lifting coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs, base })
    }

    pub fn zeros(steps: usize, base: LiftingBase) -> Result<Self> {
        Self::new(vec![0.0; steps], base)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn base(&self) -> LiftingBase {
        self.base
    }

    pub fn steps(&self) -> usize {
        self.coeffs.len()
    }

    /// More steps than [`MAX_TESTED_STEPS`]; callers should warn.
    pub fn exceeds_tested_range(&self) -> bool {
        self.steps() > MAX_TESTED_STEPS
    }
}

/// `P_k(z) = -a_k + a_k z^{-2k}`.
pub fn lifting_step_poly(k: usize, a_k: f64) -> FirFilter {
    assert!(k >= 1, "lifting steps are numbered from 1");
    let mut taps = vec![0.0; 2 * k + 1];
    taps[0] = -a_k;
    taps[2 * k] = a_k;
    FirFilter::new(taps, 0).trimmed()
}

/// Generic tap counts `(len h0, len h1)` after `steps` lifting steps.
pub fn lifting_tap_count(steps: usize) -> (usize, usize) {
    assert!(steps >= 1);
    (2, 4 * steps + 2)
}

/// The matrix form: `[1 0; P_k(z²) 1] diag(1, z^-2)` per step.
pub(crate) fn analysis_cascade(p: &LiftingParams) -> Cascade {
    let mut factors = Vec::with_capacity(2 * p.steps());
    let mut tangents = Vec::with_capacity(p.steps());
    for (i, &a) in p.coeffs.iter().enumerate() {
        let k = i + 1;
        let step = |poly: FirFilter| {
            PolyMatrix2x2::new(
                FirFilter::identity(),
                FirFilter::zero(),
                poly.upsampled(2),
                FirFilter::identity(),
            )
        };
        factors.push(PolyMatrix2x2::delay(2));
        let dp = lifting_step_poly(k, 1.0).upsampled(2);
        tangents.push((
            factors.len(),
            PolyMatrix2x2::new(FirFilter::zero(), FirFilter::zero(), dp, FirFilter::zero()),
        ));
        factors.push(step(lifting_step_poly(k, a)));
    }
    Cascade {
        input: [p.base.lowpass(), p.base.highpass()],
        factors,
        tangents,
    }
}

pub fn synth_lifting(params: &LiftingParams) -> FilterBank {
    let h0 = params.base.lowpass();
    let mut h1 = params.base.highpass();
    let (mut f0, f1) = params.base.synthesis();
    for (i, &a) in params.coeffs.iter().enumerate() {
        let k = i + 1;
        h1 = h0
            .scale(-a)
            .add(&h1.delayed(2))
            .add(&h0.scale(a).delayed(4 * k));
        // F0 <- z^-2 F0 - P_k(z²) F1
        f0 = f0
            .delayed(2)
            .sub(&lifting_step_poly(k, a).upsampled(2).mul(&f1));
    }
    FilterBank {
        h0,
        h1,
        f0,
        f1,
        family: Family::Lifting,
        params: Params::Lifting(params.clone()),
        gain: 1.0,
        delay: 2 * params.steps() + 1,
    }
}
