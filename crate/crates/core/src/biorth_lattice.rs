//! Type-A biorthogonal lattice: symmetric `H0`, antisymmetric `H1`.
//!
//! ```text
//! [H0; H1] = [1 1; 1 -1] S_N Λ(z²) ··· S_2 Λ(z²) S_1 [1; z^-1],   S_m = [1 k_m; k_m 1]
//! ```
//!
//! The pair `[T_N; U_N]` entering the final butterfly is a mirror-image pair,
//! which is what makes `H0` symmetric and `H1` antisymmetric. Synthesis
//! filters come from inverting the polyphase matrix, whose determinant is
//! the monomial `-2 ∏(1 - k_m²) z^{-(N-1)}`.

use crate::bank::{self, Family, FilterBank, Params};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::fir_poly::{FirFilter, PolyMatrix2x2};

/// `|k_m|` within this of 1 makes a lattice stage singular.
pub const SINGULAR_STAGE_TOL: f64 = 1e-12;

/// Lattice coefficients `k_1 .. k_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiorthLatticeParams {
    ks: Vec<f64>,
}

impl BiorthLatticeParams {
    pub fn new(ks: Vec<f64>) -> Result<Self> {
        if ks.is_empty() {
            return Err(Error::InvalidParams(
                "at least one lattice coefficient required".into(),
            ));
        }
        if ks.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidParams(
                "lattice coefficients must be finite".into(),
            ));
        }
        Ok(Self { ks })
    }

    /// `N` zero coefficients; the `[1, 0, .., 0, ±1]` initialization.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    /// `2N`.
    pub fn tap_count(&self) -> usize {
        2 * self.ks.len()
    }

    /// `2N - 1`.
    pub fn order(&self) -> usize {
        2 * self.ks.len() - 1
    }

    fn check_singular(&self) -> Result<()> {
        match self
            .ks
            .iter()
            .position(|k| (k.abs() - 1.0).abs() <= SINGULAR_STAGE_TOL)
        {
            Some(i) => Err(Error::SingularLatticeStage { index: i + 1 }),
            None => Ok(()),
        }
    }
}

fn lattice_stage(k: f64) -> PolyMatrix2x2 {
    PolyMatrix2x2::from_scalars([[1.0, k], [k, 1.0]])
}

fn butterfly() -> PolyMatrix2x2 {
    PolyMatrix2x2::from_scalars([[1.0, 1.0], [1.0, -1.0]])
}

fn mip_cascade(p: &BiorthLatticeParams) -> Cascade {
    let mut factors = Vec::with_capacity(2 * p.ks.len());
    let mut tangents = Vec::with_capacity(p.ks.len());
    let swap = PolyMatrix2x2::from_scalars([[0.0, 1.0], [1.0, 0.0]]);
    for (m, &k) in p.ks.iter().enumerate() {
        if m > 0 {
            factors.push(PolyMatrix2x2::delay(2));
        }
        tangents.push((factors.len(), swap.clone()));
        factors.push(lattice_stage(k));
    }
    Cascade {
        input: [FirFilter::identity(), FirFilter::monomial(1.0, 1)],
        factors,
        tangents,
    }
}

pub(crate) fn analysis_cascade(p: &BiorthLatticeParams) -> Cascade {
    let mut c = mip_cascade(p);
    c.factors.push(butterfly());
    c
}

/// `(T_N, U_N)`: the cascade output before the final butterfly.
pub fn mirror_image_pair(params: &BiorthLatticeParams) -> (FirFilter, FirFilter) {
    let [t, u] = mip_cascade(params).output();
    (t, u)
}

/// `max_n |u(n) - t(order - n)|`, i.e. the distance of `u` from
/// `z^{-order} t(z^{-1})`.
pub fn mirror_image_deviation(t: &FirFilter, u: &FirFilter, order: usize) -> f64 {
    let beyond = |f: &FirFilter| {
        (order + 1..=f.degree())
            .map(|n| f.coeff(n).abs())
            .fold(0.0, f64::max)
    };
    (0..=order)
        .map(|n| (u.coeff(n) - t.coeff(order - n)).abs())
        .fold(beyond(t).max(beyond(u)), f64::max)
}

pub fn check_mirror_image_pair(params: &BiorthLatticeParams) -> f64 {
    let (t, u) = mirror_image_pair(params);
    mirror_image_deviation(&t, &u, params.order())
}

/// Synthesis filters from `R(z) = adj(E(z)) / c` where `det E(z) = c z^{-m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiorthSynthesis {
    pub f0: FirFilter,
    pub f1: FirFilter,
    /// Scalar gain of the analysis→synthesis cascade.
    pub gain: f64,
    /// Delay of the cascade in samples.
    pub delay: usize,
    /// The monomial coefficient `c` of the polyphase determinant.
    pub det_coeff: f64,
}

/// Relative tolerance for "the determinant is a single monomial".
pub const MONOMIAL_TOL: f64 = 1e-10;

pub fn derive_biorth_synthesis(h0: &FirFilter, h1: &FirFilter) -> Result<BiorthSynthesis> {
    let e = PolyMatrix2x2::polyphase(h0, h1);
    let det = e.det();
    let (power, c) = bank::dominant_tap(&det);
    if c.abs() <= SINGULAR_STAGE_TOL {
        return Err(Error::SingularPolyphase);
    }
    let residual = (det.delay()..=det.degree())
        .filter(|&n| n != power)
        .map(|n| det.coeff(n).abs())
        .fold(0.0, f64::max)
        / c.abs();
    if residual > MONOMIAL_TOL {
        return Err(Error::NotPerfectReconstruction { residual });
    }

    let r = e.adjugate().scale(1.0 / c).upsampled(2);
    let f0 = r.get(0, 0).delayed(1).add(r.get(1, 0));
    let f1 = r.get(0, 1).delayed(1).add(r.get(1, 1));
    let t = bank::pr_transfer(h0, h1, &f0, &f1);
    Ok(BiorthSynthesis {
        f0,
        f1,
        gain: t.gain,
        delay: t.delay,
        det_coeff: c,
    })
}

pub fn synth_biorth(params: &BiorthLatticeParams) -> Result<FilterBank> {
    params.check_singular()?;
    let n = params.tap_count();
    let [h0, h1] = analysis_cascade(params).output();
    let h0 = h0.with_support(0, n);
    let h1 = h1.with_support(0, n);
    let syn = derive_biorth_synthesis(&h0, &h1)?;
    Ok(FilterBank {
        h0,
        h1,
        f0: syn.f0,
        f1: syn.f1,
        family: Family::BiorthogonalLattice,
        params: Params::Biorth(params.clone()),
        gain: syn.gain,
        delay: syn.delay,
    })
}
