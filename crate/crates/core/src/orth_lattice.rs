//! Orthogonal two-channel banks from a cascade of plane rotations.
//!
//! ```text
//! [H0; H1] = diag(1, -1) R_K Λ(z²) ··· R_1 Λ(z²) R_0 [1; z^-1]
//! ```
//!
//! With `K + 1` angles the filters have `2(K + 1)` taps and are orthonormal
//! for every choice of angles. [`factor_orth`] runs the cascade backwards to
//! recover angles from a known orthogonal low-pass filter.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::bank::{Family, FilterBank, Params};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::fir_poly::{FirFilter, PolyMatrix2x2};

/// Rotation angles `θ_0 .. θ_K` in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthLatticeParams {
    angles: Vec<f64>,
}

impl OrthLatticeParams {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidParams("at least one angle required".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParams("angles must be finite".into()));
        }
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `K`, the number of delay stages.
    pub fn stages(&self) -> usize {
        self.angles.len() - 1
    }

    /// `2(K + 1)`.
    pub fn tap_count(&self) -> usize {
        2 * self.angles.len()
    }

    /// `2K + 1`.
    pub fn order(&self) -> usize {
        2 * self.stages() + 1
    }
}

fn d_rotation(theta: f64) -> PolyMatrix2x2 {
    let (s, c) = theta.sin_cos();
    PolyMatrix2x2::from_scalars([[-s, c], [-c, -s]])
}

pub(crate) fn analysis_cascade(p: &OrthLatticeParams) -> Cascade {
    let mut factors = Vec::with_capacity(2 * p.angles.len());
    let mut tangents = Vec::with_capacity(p.angles.len());
    for (k, &theta) in p.angles.iter().enumerate() {
        if k > 0 {
            factors.push(PolyMatrix2x2::delay(2));
        }
        tangents.push((factors.len(), d_rotation(theta)));
        factors.push(PolyMatrix2x2::rotation(theta));
    }
    factors.push(PolyMatrix2x2::from_scalars([[1.0, 0.0], [0.0, -1.0]]));
    Cascade {
        input: [FirFilter::identity(), FirFilter::monomial(1.0, 1)],
        factors,
        tangents,
    }
}

/// Builds the orthogonal bank; synthesis filters follow the flip relations
/// of [`derive_orth_synthesis`]. The cascade gain is 1 and the delay is
/// `taps - 1`.
pub fn synth_orth(params: &OrthLatticeParams) -> FilterBank {
    let n = params.tap_count();
    let [h0, h1] = analysis_cascade(params).output();
    let h0 = h0.with_support(0, n);
    let h1 = h1.with_support(0, n);
    let (_, f0, f1) = flip_relations(&h0);
    FilterBank {
        h0,
        h1,
        f0,
        f1,
        family: Family::Orthogonal,
        params: Params::Orth(params.clone()),
        gain: 1.0,
        delay: n - 1,
    }
}

/// From an even-length low-pass `h0` with `N` taps:
/// `f0(n) = h0(N-1-n)`, `h1(n) = (-1)^n h0(N-1-n)`, `f1(n) = -(-1)^n h0(n)`.
///
/// Returns `(h1, f0, f1)` over the same tap window as `h0`.
pub fn derive_orth_synthesis(h0: &FirFilter) -> Result<(FirFilter, FirFilter, FirFilter)> {
    if !h0.len().is_multiple_of(2) {
        return Err(Error::EvenLengthRequired(h0.len()));
    }
    Ok(flip_relations(h0))
}

fn flip_relations(h0: &FirFilter) -> (FirFilter, FirFilter, FirFilter) {
    let taps = h0.coeffs();
    let n = taps.len();
    let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let f0 = (0..n).map(|i| taps[n - 1 - i]).collect();
    let h1 = (0..n).map(|i| sign(i) * taps[n - 1 - i]).collect();
    let f1 = (0..n).map(|i| -sign(i) * taps[i]).collect();
    let d = h0.delay();
    (
        FirFilter::new(h1, d),
        FirFilter::new(f0, d),
        FirFilter::new(f1, d),
    )
}

/// `max(|Σ h(n)² - 1|, max_{k≥1} |Σ h(n) h(n-2k)|)` over the stored taps.
pub fn check_double_shift_orthogonality(h0: &FirFilter) -> f64 {
    let taps = h0.coeffs();
    let norm = (taps.iter().map(|x| x * x).sum::<f64>() - 1.0).abs();
    (1..=taps.len() / 2)
        .map(|k| {
            taps.iter()
                .skip(2 * k)
                .zip(taps)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .abs()
        })
        .fold(norm, f64::max)
}

/// `|Σ h0 - √2|`. Not enforced by the lattice; reported for callers who
/// care about DC normalization.
pub fn dc_gain_deviation(h0: &FirFilter) -> f64 {
    (h0.sum() - SQRT_2).abs()
}

/// Wraps an angle into `(-π/2, π/2]`.
fn half_branch(theta: f64) -> f64 {
    if theta > FRAC_PI_2 {
        theta - PI
    } else if theta <= -FRAC_PI_2 {
        theta + PI
    } else {
        theta
    }
}

/// Recovers lattice angles from an orthogonal low-pass filter.
///
/// Each stage picks the rotation that zeroes the two outermost taps of one
/// branch and removes a `Λ(z²)` factor, shortening both branches by two
/// taps. Intermediate angles are taken in `(-π/2, π/2]`; the last angle
/// uses the full `atan2` range because no later rotation can absorb a sign.
pub fn factor_orth(h0: &FirFilter, tol: f64) -> Result<OrthLatticeParams> {
    let n = h0.len();
    if !n.is_multiple_of(2) {
        return Err(Error::EvenLengthRequired(n));
    }
    let deviation = check_double_shift_orthogonality(h0);
    if deviation.is_nan() || deviation > tol {
        return Err(Error::NotOrthogonal { deviation, tol });
    }

    // undo the final diag(1, -1): b = -h1
    let (h1, _, _) = flip_relations(h0);
    let mut a: Vec<f64> = h0.coeffs().to_vec();
    let mut b: Vec<f64> = h1.coeffs().iter().map(|x| -x).collect();
    let mut angles = Vec::with_capacity(n / 2);

    while a.len() > 2 {
        let len = a.len();
        let stage = len / 2 - 1;
        let head = a[0].hypot(b[0]);
        let tail = a[len - 1].hypot(b[len - 1]);
        if head.max(tail) <= tol {
            return Err(Error::FactorizationBreakdown { stage });
        }
        let theta = if head >= tail {
            half_branch((-b[0]).atan2(a[0]))
        } else {
            half_branch(a[len - 1].atan2(b[len - 1]))
        };
        let (s, c) = theta.sin_cos();
        let next_a: Vec<f64> = (0..len - 2).map(|i| c * a[i] - s * b[i]).collect();
        let next_b: Vec<f64> = (2..len).map(|i| s * a[i] + c * b[i]).collect();
        angles.push(theta);
        a = next_a;
        b = next_b;
    }

    if a[0].hypot(a[1]) <= tol {
        return Err(Error::FactorizationBreakdown { stage: 0 });
    }
    angles.push(a[1].atan2(a[0]));
    angles.reverse();
    OrthLatticeParams::new(angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn params(a: &[f64]) -> OrthLatticeParams {
        OrthLatticeParams::new(a.to_vec()).unwrap()
    }

    /// Direct expansion of `diag(1,-1) R(θ) [1; z^-1]` for one stage.
    #[test]
    fn single_stage_is_haar_at_quarter_pi() {
        let b = synth_orth(&params(&[FRAC_PI_4]));
        let r = FRAC_1_SQRT_2;
        assert!(b.h0.approx_eq(&FirFilter::from_taps(&[r, r]), 1e-15));
        assert!(b.h1.approx_eq(&FirFilter::from_taps(&[r, -r]), 1e-15));
    }

    #[test]
    fn zero_angle_is_lazy_bank() {
        let b = synth_orth(&params(&[0.0]));
        assert_eq!(b.h0.dense(2), vec![1.0, 0.0]);
        assert_eq!(b.h1.dense(2), vec![0.0, -1.0]);
        assert_eq!(b.h0.len(), 2);
    }

    #[test]
    fn unit_norm_and_tap_count() {
        let mut rng = XorShift64Star::new(7);
        for k in 0..5 {
            let p = params(&rng.vec(k + 1, -PI, PI));
            let b = synth_orth(&p);
            assert_eq!(b.h0.len(), 2 * (k + 1));
            assert_eq!(p.angles().len(), b.h0.len() / 2);
            assert!((b.h0.energy() - 1.0).abs() < 1e-12);
            assert!(check_double_shift_orthogonality(&b.h0) <= 1e-12);
        }
    }

    #[test]
    fn flip_relations_by_hand() {
        let (h1, f0, f1) = derive_orth_synthesis(&FirFilter::from_taps(&[1.0, 0.0])).unwrap();
        assert_eq!(h1.coeffs(), &[0.0, -1.0]);
        assert_eq!(f0.coeffs(), &[0.0, 1.0]);
        assert_eq!(f1.coeffs(), &[-1.0, 0.0]);

        let r = FRAC_1_SQRT_2;
        let (h1, f0, f1) = derive_orth_synthesis(&FirFilter::from_taps(&[r, r])).unwrap();
        assert_eq!(f0.coeffs(), &[r, r]);
        assert_eq!(h1.coeffs(), &[r, -r]);
        assert_eq!(f1.coeffs(), &[-r, r]);
    }

    #[test]
    fn f1_is_reversed_h1() {
        let h0 = FirFilter::from_taps(&[0.3, -1.2, 0.8, 2.0, 0.1, -0.4]);
        let (h1, _, f1) = derive_orth_synthesis(&h0).unwrap();
        assert_eq!(f1.coeffs(), h1.reversed().coeffs());
    }

    #[test]
    fn lattice_h1_matches_flip_relation() {
        let b = synth_orth(&params(&[0.4, -1.3, 2.2]));
        let (h1, _, _) = derive_orth_synthesis(&b.h0).unwrap();
        assert!(h1.approx_eq(&b.h1, 1e-14));
    }

    #[test]
    fn odd_length_rejected() {
        let err = derive_orth_synthesis(&FirFilter::from_taps(&[1.0, 2.0, 3.0])).unwrap_err();
        assert!(err.to_string().contains("even length required"));
        assert!(matches!(
            factor_orth(&FirFilter::from_taps(&[1.0]), 1e-10),
            Err(Error::EvenLengthRequired(1))
        ));
    }

    #[test]
    fn orthogonality_deviation() {
        let r = FRAC_1_SQRT_2;
        assert!(check_double_shift_orthogonality(&FirFilter::from_taps(&[r, r])) <= 1e-15);
        let d = check_double_shift_orthogonality(&FirFilter::from_taps(&[1.0, 1.0]));
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn factor_haar() {
        let r = FRAC_1_SQRT_2;
        let p = factor_orth(&FirFilter::from_taps(&[r, r]), 1e-12).unwrap();
        assert!((p.angles()[0] - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn factor_rejects_non_orthogonal() {
        let err = factor_orth(&FirFilter::from_taps(&[1.0, 1.0, 0.0, 0.0]), 1e-8).unwrap_err();
        assert!(err.to_string().contains("not orthogonal"));
    }

    #[test]
    fn factor_breakdown_on_degenerate_stage() {
        // orthonormal but the leading pair vanishes: z^-2 (r + r z^-1) padded
        let r = FRAC_1_SQRT_2;
        let err = factor_orth(&FirFilter::from_taps(&[0.0, 0.0, r, r, 0.0, 0.0]), 1e-8);
        assert!(matches!(err, Err(Error::FactorizationBreakdown { .. })));
    }

    #[test]
    fn factor_round_trip() {
        let mut rng = XorShift64Star::new(11);
        for draw in 0..100 {
            let k = draw % 5;
            let p = params(&rng.vec(k + 1, -PI, PI));
            let h0 = synth_orth(&p).h0;
            let q = factor_orth(&h0, 1e-10).unwrap();
            let again = synth_orth(&q).h0;
            assert!(h0.approx_eq(&again, 1e-10), "draw {draw}");
            // factoring the resynthesis reproduces the recovered angles
            let q2 = factor_orth(&again, 1e-10).unwrap();
            for (x, y) in q.angles().iter().zip(q2.angles()) {
                let d = (x - y).rem_euclid(2.0 * PI);
                assert!(d.min(2.0 * PI - d) < 1e-9);
            }
        }
    }

    #[test]
    fn negated_haar_needs_full_final_branch() {
        let r = FRAC_1_SQRT_2;
        let h0 = FirFilter::from_taps(&[-r, -r]);
        let p = factor_orth(&h0, 1e-12).unwrap();
        assert!(synth_orth(&p).h0.approx_eq(&h0, 1e-15));
    }
}
