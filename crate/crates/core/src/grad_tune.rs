//! Exact parameter gradients of the filter taps, the stopband-energy and
//! LL-compaction objectives, and a plain gradient-descent tuner.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::bank::{FilterBank, Params};
use crate::cascade::Cascade;
use crate::error::{Error, Result};
use crate::fir_poly::FirFilter;
use crate::transform::{analyze_2d, analyze_2d_tangent, Plane};
use crate::{biorth_lattice, lifting, orth_lattice};

pub const DEFAULT_OMEGA_S: f64 = FRAC_PI_2;
pub const DEFAULT_STOPBAND_SAMPLES: usize = 512;
/// Denominator floor used by [`finite_diff_check`].
pub const GRADIENT_ABS_FLOOR: f64 = 1e-8;
/// Box that keeps biorthogonal lattice coefficients away from `|k| = 1`.
pub const BIORTH_CLAMP: f64 = 0.99;

/// `h0[p][n] = ∂h0(n)/∂param_p`, likewise for `h1`. Tap vectors cover the
/// nominal windows of [`Params::nominal_lengths`], starting at `z^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGradient {
    pub h0: Vec<Vec<f64>>,
    pub h1: Vec<Vec<f64>>,
}

impl ParamGradient {
    pub fn param_count(&self) -> usize {
        self.h0.len()
    }

    /// Direction `(∂h0/∂p, ∂h1/∂p)` as filters.
    pub fn filters(&self, param: usize) -> (FirFilter, FirFilter) {
        (
            FirFilter::from_taps(&self.h0[param]),
            FirFilter::from_taps(&self.h1[param]),
        )
    }
}

fn cascade(params: &Params) -> Cascade {
    match params {
        Params::Orth(p) => orth_lattice::analysis_cascade(p),
        Params::Biorth(p) => biorth_lattice::analysis_cascade(p),
        Params::Lifting(p) => lifting::analysis_cascade(p),
    }
}

/// Differentiates the analysis cascade one factor at a time.
pub fn grad_filters(params: &Params) -> ParamGradient {
    let c = cascade(params);
    let (l0, l1) = params.nominal_lengths();
    let (h0, h1) = (0..params.len())
        .map(|i| {
            let [d0, d1] = c.derivative(i);
            (d0.dense(l0), d1.dense(l1))
        })
        .unzip();
    ParamGradient { h0, h1 }
}

/// `|a - n| / max(|a|, |n|, floor)`.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

fn dense_taps(params: &Params) -> Result<(Vec<f64>, Vec<f64>)> {
    let bank = params.synth()?;
    let (l0, l1) = params.nominal_lengths();
    Ok((bank.h0.dense(l0), bank.h1.dense(l1)))
}

/// Largest relative error between [`grad_filters`] and central differences
/// of the synthesized taps, with denominator floor [`GRADIENT_ABS_FLOOR`].
pub fn finite_diff_check(params: &Params, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::InvalidParams(format!(
            "step {step} outside (0, 1e-2]"
        )));
    }
    let g = grad_filters(params);
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let shifted = |s: f64| {
            let mut v = params.values().to_vec();
            v[i] += s;
            dense_taps(&params.with_values(v)?)
        };
        let (p0, p1) = shifted(step)?;
        let (m0, m1) = shifted(-step)?;
        for (analytic, plus, minus) in [(&g.h0[i], &p0, &m0), (&g.h1[i], &p1, &m1)] {
            for n in 0..analytic.len() {
                let numeric = (plus[n] - minus[n]) / (2.0 * step);
                worst = worst.max(relative_error(analytic[n], numeric, GRADIENT_ABS_FLOOR));
            }
        }
    }
    Ok(worst)
}

fn stopband_grid(omega_s: f64, num_samples: usize) -> impl Iterator<Item = (f64, f64)> {
    assert!(
        omega_s > 0.0 && omega_s < PI,
        "stopband edge must lie in (0, pi)"
    );
    assert!(num_samples >= 2);
    let step = (PI - omega_s) / (num_samples - 1) as f64;
    (0..num_samples).map(move |j| {
        let w = if j == 0 || j == num_samples - 1 {
            0.5 * step
        } else {
            step
        };
        (omega_s + j as f64 * step, w)
    })
}

/// Trapezoidal `∫_{ω_s}^{π} |H0(e^{jω})|² dω` on `num_samples` points.
pub fn stopband_energy(h0: &FirFilter, omega_s: f64, num_samples: usize) -> f64 {
    stopband_grid(omega_s, num_samples)
        .map(|(omega, w)| w * h0.dtft(omega).norm_sqr())
        .sum()
}

/// Gradient of [`stopband_energy`] with respect to the taps `z^0 .. z^{-(len-1)}`.
pub fn stopband_energy_tap_grad(
    h0: &FirFilter,
    len: usize,
    omega_s: f64,
    num_samples: usize,
) -> Vec<f64> {
    let mut g = vec![0.0; len];
    for (omega, w) in stopband_grid(omega_s, num_samples) {
        let h = h0.dtft(omega);
        for (n, gn) in g.iter_mut().enumerate() {
            let (s, c) = (omega * n as f64).sin_cos();
            *gn += 2.0 * w * (h.re * c - h.im * s);
        }
    }
    g
}

/// Fraction of the subband energy that lands in `LL`.
pub fn ll_compaction(plane: &Plane, bank: &FilterBank) -> Result<f64> {
    let s = analyze_2d(plane, bank)?;
    Ok(s.ll.energy() / s.energy())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// Minimize [`stopband_energy`] of `h0`.
    StopbandEnergy { omega_s: f64, num_samples: usize },
    /// Maximize [`ll_compaction`] of the given plane.
    LlCompaction(Plane),
}

impl Objective {
    pub fn stopband_default() -> Self {
        Objective::StopbandEnergy {
            omega_s: DEFAULT_OMEGA_S,
            num_samples: DEFAULT_STOPBAND_SAMPLES,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::StopbandEnergy { .. } => "stopband-energy",
            Objective::LlCompaction(_) => "ll-compaction",
        }
    }

    /// `true` when the tuner maximizes.
    pub fn maximizes(&self) -> bool {
        matches!(self, Objective::LlCompaction(_))
    }

    pub fn value(&self, params: &Params) -> Result<f64> {
        let bank = params.synth()?;
        match self {
            Objective::StopbandEnergy {
                omega_s,
                num_samples,
            } => Ok(stopband_energy(&bank.h0, *omega_s, *num_samples)),
            Objective::LlCompaction(plane) => ll_compaction(plane, &bank),
        }
    }

    /// Gradient of [`Objective::value`] with respect to the parameter vector.
    pub fn gradient(&self, params: &Params) -> Result<Vec<f64>> {
        let bank = params.synth()?;
        let g = grad_filters(params);
        match self {
            Objective::StopbandEnergy {
                omega_s,
                num_samples,
            } => {
                let (l0, _) = params.nominal_lengths();
                let dtaps = stopband_energy_tap_grad(&bank.h0, l0, *omega_s, *num_samples);
                Ok(g.h0
                    .iter()
                    .map(|d| d.iter().zip(&dtaps).map(|(a, b)| a * b).sum())
                    .collect())
            }
            Objective::LlCompaction(plane) => {
                let s = analyze_2d(plane, &bank)?;
                let total = s.energy();
                let ll = s.ll.energy();
                Ok((0..g.param_count())
                    .map(|i| {
                        let (d0, d1) = g.filters(i);
                        let ds = analyze_2d_tangent(plane, &bank, &d0, &d1);
                        let d_ll = 2.0 * s.ll.dot(&ds.ll);
                        let d_total: f64 = s
                            .bands()
                            .iter()
                            .zip(ds.bands())
                            .map(|(b, db)| 2.0 * b.dot(db))
                            .sum();
                        (d_ll * total - ll * d_total) / (total * total)
                    })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneReport {
    pub iterations: usize,
    /// Objective before the first step and after every step.
    pub trace: Vec<f64>,
    pub final_params: Params,
    pub final_objective: f64,
}

/// Fixed-step gradient descent (ascent for maximizing objectives).
/// Biorthogonal coefficients are clamped to `[-0.99, 0.99]` after each step.
pub fn tune(params: &Params, objective: &Objective, lr: f64, iters: usize) -> Result<TuneReport> {
    if !(lr >= 0.0 && lr.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "learning rate {lr} must be >= 0"
        )));
    }
    if iters == 0 {
        return Err(Error::InvalidParams(
            "at least one iteration required".into(),
        ));
    }
    let sign = if objective.maximizes() { 1.0 } else { -1.0 };
    let mut current = params.clone();
    let mut trace = Vec::with_capacity(iters + 1);

    let diverged = |iteration: usize, trace: &[f64], p: &Params| Error::Diverged {
        iteration,
        partial: Box::new(TuneReport {
            iterations: iteration,
            trace: trace.to_vec(),
            final_params: p.clone(),
            final_objective: f64::NAN,
        }),
    };

    let first = objective.value(&current)?;
    if !first.is_finite() {
        return Err(diverged(0, &trace, &current));
    }
    trace.push(first);

    for it in 1..=iters {
        let grad = objective.gradient(&current)?;
        let mut next: Vec<f64> = current
            .values()
            .iter()
            .zip(&grad)
            .map(|(v, g)| v + sign * lr * g)
            .collect();
        if matches!(current, Params::Biorth(_)) {
            for v in next.iter_mut() {
                *v = v.clamp(-BIORTH_CLAMP, BIORTH_CLAMP);
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(diverged(it, &trace, &current));
        }
        current = current.with_values(next)?;
        let value = objective.value(&current)?;
        if !value.is_finite() {
            return Err(diverged(it, &trace, &current));
        }
        trace.push(value);
    }

    let final_objective = *trace.last().unwrap();
    Ok(TuneReport {
        iterations: iters,
        trace,
        final_params: current,
        final_objective,
    })
}
