//! Attention-weighted fusion of the four subbands: the stride-2 pooling
//! replacement.
//!
//! Each subband is summarized by its mean absolute value; an affine map of
//! those four statistics gives one logit per subband, and the softmax of
//! the logits weights a convex combination of the subband planes. The
//! operator is single-channel; multi-channel maps apply it per channel.

use crate::bank::{FilterBank, Params};
use crate::error::{Error, Result};
use crate::grad_tune::{grad_filters, relative_error};
use crate::transform::{analyze_2d, analyze_2d_tangent, Plane, SubbandSet};

/// `logits = weights · stats + bias`, subband order `LL, HL, LH, HH`.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionHeadParams {
    pub weights: [[f64; 4]; 4],
    pub bias: [f64; 4],
}

impl Default for AttentionHeadParams {
    fn default() -> Self {
        Self::uniform()
    }
}

impl AttentionHeadParams {
    pub fn new(weights: [[f64; 4]; 4], bias: [f64; 4]) -> Result<Self> {
        if weights
            .iter()
            .flatten()
            .chain(&bias)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParams(
                "attention head entries must be finite".into(),
            ));
        }
        Ok(Self { weights, bias })
    }

    /// All zeros: equal weight on every subband.
    pub fn uniform() -> Self {
        Self {
            weights: [[0.0; 4]; 4],
            bias: [0.0; 4],
        }
    }

    /// Flattened as 16 weights (row-major) then 4 biases.
    pub fn to_vec(&self) -> Vec<f64> {
        self.weights
            .iter()
            .flatten()
            .chain(&self.bias)
            .copied()
            .collect()
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 20 {
            return Err(Error::LengthMismatch(v.len(), 20));
        }
        let mut weights = [[0.0; 4]; 4];
        for (i, row) in weights.iter_mut().enumerate() {
            row.copy_from_slice(&v[4 * i..4 * i + 4]);
        }
        let mut bias = [0.0; 4];
        bias.copy_from_slice(&v[16..]);
        Self::new(weights, bias)
    }
}

fn softmax(logits: [f64; 4]) -> [f64; 4] {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = logits.map(|l| (l - max).exp());
    let total: f64 = e.iter().sum();
    e.map(|v| v / total)
}

fn band_stats(s: &SubbandSet) -> [f64; 4] {
    s.bands().map(|b| b.mean_abs())
}

fn logits(stats: &[f64; 4], head: &AttentionHeadParams) -> [f64; 4] {
    let mut out = head.bias;
    for (o, row) in out.iter_mut().zip(&head.weights) {
        *o += row.iter().zip(stats).map(|(w, s)| w * s).sum::<f64>();
    }
    out
}

/// Softmax weights over `LL, HL, LH, HH`.
pub fn attention_weights(s: &SubbandSet, head: &AttentionHeadParams) -> [f64; 4] {
    softmax(logits(&band_stats(s), head))
}

fn fuse(s: &SubbandSet, w: &[f64; 4]) -> Plane {
    let (h, wd) = s.band_dims();
    let mut out = Plane::zeros(h, wd);
    for (band, &wi) in s.bands().iter().zip(w) {
        out.add_scaled(band, wi);
    }
    out
}

/// Analysis, attention weights, weighted sum. Output is `⌈H/2⌉ × ⌈W/2⌉`.
pub fn uwu_downsample(p: &Plane, bank: &FilterBank, head: &AttentionHeadParams) -> Result<Plane> {
    let s = analyze_2d(p, bank)?;
    Ok(fuse(&s, &attention_weights(&s, head)))
}

/// `Σ out²`, the demonstration loss.
pub fn uwu_loss(p: &Plane, bank: &FilterBank, head: &AttentionHeadParams) -> Result<f64> {
    Ok(uwu_downsample(p, bank, head)?.energy())
}

#[derive(Clone, Debug, PartialEq)]
pub struct UwuGradient {
    pub loss: f64,
    /// One entry per filter-bank parameter.
    pub bank: Vec<f64>,
    pub weights: [[f64; 4]; 4],
    pub bias: [f64; 4],
}

impl UwuGradient {
    /// Bank gradient, then head gradient in [`AttentionHeadParams::to_vec`] order.
    pub fn to_vec(&self) -> Vec<f64> {
        self.bank
            .iter()
            .chain(self.weights.iter().flatten())
            .chain(&self.bias)
            .copied()
            .collect()
    }
}

/// Gradient of [`uwu_loss`] through fusion, softmax, the `mean |·|`
/// statistics and the analysis filters. `sign(0)` is taken as 0.
pub fn grad_uwu(p: &Plane, bank: &FilterBank, head: &AttentionHeadParams) -> Result<UwuGradient> {
    let s = analyze_2d(p, bank)?;
    let stats = band_stats(&s);
    let w = softmax(logits(&stats, head));
    let out = fuse(&s, &w);
    let d_out = out.scale(2.0);

    // through the weights
    let d_w: [f64; 4] = s.bands().map(|b| d_out.dot(b));
    let mean: f64 = w.iter().zip(&d_w).map(|(a, b)| a * b).sum();
    let d_logit: [f64; 4] = std::array::from_fn(|j| w[j] * (d_w[j] - mean));
    let mut d_weights = [[0.0; 4]; 4];
    for (j, row) in d_weights.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = d_logit[j] * stats[k];
        }
    }
    let d_stats: [f64; 4] =
        std::array::from_fn(|k| (0..4).map(|j| head.weights[j][k] * d_logit[j]).sum());

    // d loss / d band = w_i * d_out + d_stat_i * sign(band) / count
    let d_bands: Vec<Plane> = s
        .bands()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let n = b.data().len() as f64;
            let mut g = d_out.scale(w[i]);
            let sign = Plane::from_fn(b.height(), b.width(), |r, c| {
                let v = b.get(r, c);
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            });
            g.add_scaled(&sign, d_stats[i] / n);
            g
        })
        .collect();

    let g = grad_filters(&bank.params);
    let d_bank = (0..g.param_count())
        .map(|i| {
            let (d0, d1) = g.filters(i);
            let ds = analyze_2d_tangent(p, bank, &d0, &d1);
            ds.bands()
                .iter()
                .zip(&d_bands)
                .map(|(db, gb)| db.dot(gb))
                .sum()
        })
        .collect();

    Ok(UwuGradient {
        loss: out.energy(),
        bank: d_bank,
        weights: d_weights,
        bias: d_logit,
    })
}

/// Largest relative error between [`grad_uwu`] and central differences
/// over every bank and head parameter.
///
/// The denominator floor is `1e-8` scaled by the largest analytic gradient
/// entry, so entries that are zero up to rounding are compared absolutely.
pub fn finite_diff_check_uwu(
    p: &Plane,
    params: &Params,
    head: &AttentionHeadParams,
    step: f64,
) -> Result<f64> {
    let bank = params.synth()?;
    let analytic = grad_uwu(p, &bank, head)?.to_vec();
    let nb = params.len();
    let mut base = params.values().to_vec();
    base.extend(head.to_vec());

    let loss_at = |v: &[f64]| -> Result<f64> {
        let b = params.with_values(v[..nb].to_vec())?.synth()?;
        uwu_loss(p, &b, &AttentionHeadParams::from_slice(&v[nb..])?)
    };
    let scale = analytic.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-8 * scale.max(1.0);
    let mut worst: f64 = 0.0;
    for (i, a) in analytic.iter().enumerate() {
        let mut plus = base.clone();
        plus[i] += step;
        let mut minus = base.clone();
        minus[i] -= step;
        let numeric = (loss_at(&plus)? - loss_at(&minus)?) / (2.0 * step);
        worst = worst.max(relative_error(*a, numeric, floor));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biorth_lattice::BiorthLatticeParams;
    use crate::lifting::{LiftingBase, LiftingParams};
    use crate::orth_lattice::{synth_orth, OrthLatticeParams};
    use crate::rng::XorShift64Star;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn haar() -> FilterBank {
        synth_orth(&OrthLatticeParams::new(vec![FRAC_PI_4]).unwrap())
    }

    fn ll_favoring(gap: f64) -> AttentionHeadParams {
        let mut h = AttentionHeadParams::uniform();
        h.bias[0] = gap;
        h
    }

    #[test]
    fn uniform_head_gives_quarter_weights() {
        let s = analyze_2d(&Plane::from_fn(4, 4, |r, c| (r * c) as f64), &haar()).unwrap();
        let w = attention_weights(&s, &AttentionHeadParams::uniform());
        assert!(w.iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn ll_energy_wins_with_identity_head() {
        let mut head = AttentionHeadParams::uniform();
        for i in 0..4 {
            head.weights[i][i] = 1.0;
        }
        let s = analyze_2d(&Plane::from_fn(8, 8, |_, _| 2.0), &haar()).unwrap();
        let w = attention_weights(&s, &head);
        assert!(w[0] > w[1] && w[0] > w[2] && w[0] > w[3]);
    }

    #[test]
    fn weights_are_a_distribution() {
        let mut rng = XorShift64Star::new(79);
        for _ in 0..50 {
            let head = AttentionHeadParams::from_slice(&rng.vec(20, -5.0, 5.0)).unwrap();
            let p = Plane::new(6, 6, rng.vec(36, -1.0, 1.0)).unwrap();
            let w = attention_weights(&analyze_2d(&p, &haar()).unwrap(), &head);
            assert!(w.iter().all(|&v| v > 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_plane_with_uniform_head() {
        let out = uwu_downsample(
            &Plane::from_fn(8, 8, |_, _| 0.8),
            &haar(),
            &AttentionHeadParams::uniform(),
        )
        .unwrap();
        assert!(out.data().iter().all(|v| (v - 0.4).abs() < 1e-14));
    }

    #[test]
    fn shape_contract() {
        let out = uwu_downsample(
            &Plane::zeros(32, 32),
            &haar(),
            &AttentionHeadParams::uniform(),
        )
        .unwrap();
        assert_eq!(out.dims(), (16, 16));
        let out = uwu_downsample(
            &Plane::zeros(5, 1),
            &haar(),
            &AttentionHeadParams::uniform(),
        )
        .unwrap();
        assert_eq!(out.dims(), (3, 1));
    }

    #[test]
    fn saturated_softmax_selects_ll() {
        let mut rng = XorShift64Star::new(83);
        let p = Plane::new(10, 10, rng.vec(100, -1.0, 1.0)).unwrap();
        let out = uwu_downsample(&p, &haar(), &ll_favoring(800.0)).unwrap();
        let ll = analyze_2d(&p, &haar()).unwrap().ll;
        assert_eq!(out, ll);
    }

    #[test]
    fn zero_plane_has_zero_gradient() {
        let mut rng = XorShift64Star::new(89);
        let head = AttentionHeadParams::from_slice(&rng.vec(20, -1.0, 1.0)).unwrap();
        let g = grad_uwu(&Plane::zeros(8, 8), &haar(), &head).unwrap();
        assert!(g.to_vec().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bias_gradient_sums_to_zero() {
        let mut rng = XorShift64Star::new(97);
        let head = AttentionHeadParams::from_slice(&rng.vec(20, -1.0, 1.0)).unwrap();
        let p = Plane::new(16, 16, rng.vec(256, -1.0, 1.0)).unwrap();
        let g = grad_uwu(&p, &haar(), &head).unwrap();
        let scale = g.bias.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(g.bias.iter().sum::<f64>().abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn gradient_matches_differences_for_each_family() {
        let mut rng = XorShift64Star::new(101);
        let p = Plane::new(16, 16, rng.vec(256, -1.0, 1.0)).unwrap();
        let head = AttentionHeadParams::from_slice(&rng.vec(20, -1.0, 1.0)).unwrap();
        let families = [
            Params::Orth(OrthLatticeParams::new(rng.vec(2, -PI, PI)).unwrap()),
            Params::Biorth(BiorthLatticeParams::new(rng.vec(2, -0.9, 0.9)).unwrap()),
            Params::Lifting(LiftingParams::new(rng.vec(2, -2.0, 2.0), LiftingBase::Haar).unwrap()),
        ];
        for params in &families {
            let err = finite_diff_check_uwu(&p, params, &head, 1e-6).unwrap();
            assert!(err <= 1e-4, "{:?}: {err:e}", params.family());
        }
    }

    #[test]
    fn head_round_trips_through_vec() {
        let v: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        assert_eq!(AttentionHeadParams::from_slice(&v).unwrap().to_vec(), v);
        assert!(AttentionHeadParams::from_slice(&v[..19]).is_err());
    }
}
