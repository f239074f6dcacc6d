//! One-level two-channel analysis and synthesis, 1D and separable 2D.
//!
//! Conventions:
//! - periodic extension at the boundaries, so every family reconstructs
//!   exactly;
//! - the even-indexed output of each convolution is kept;
//! - odd sizes are padded by repeating the last sample (row, column) and
//!   cropped again after synthesis;
//! - 2D analysis filters rows first, then columns. `HL` is high-pass along
//!   the rows and low-pass along the columns.

use crate::bank::FilterBank;
use crate::error::{Error, Result};
use crate::fir_poly::FirFilter;

/// A row-major 2D array of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Empty);
        }
        if data.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{height}x{width} plane needs {} samples, got {}",
                height * width,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("plane samples must be finite".into()));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: vec![0.0; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.width, self.height, |r, c| self.get(c, r))
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn mean_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum::<f64>() / self.data.len() as f64
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Plane, factor: f64) {
        assert_eq!(self.dims(), other.dims());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Plane) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Repeats the last row and/or column to make both sizes even.
    fn padded_even(&self) -> Self {
        let h = self.height + self.height % 2;
        let w = self.width + self.width % 2;
        if (h, w) == self.dims() {
            return self.clone();
        }
        Self::from_fn(h, w, |r, c| {
            self.get(r.min(self.height - 1), c.min(self.width - 1))
        })
    }

    fn cropped(&self, height: usize, width: usize) -> Self {
        if (height, width) == self.dims() {
            return self.clone();
        }
        Self::from_fn(height, width, |r, c| self.get(r, c))
    }
}

/// The four half-resolution planes of one 2D analysis step, plus the size
/// of the plane they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbandSet {
    pub ll: Plane,
    pub hl: Plane,
    pub lh: Plane,
    pub hh: Plane,
    pub height: usize,
    pub width: usize,
}

impl SubbandSet {
    /// `[LL, HL, LH, HH]`.
    pub fn bands(&self) -> [&Plane; 4] {
        [&self.ll, &self.hl, &self.lh, &self.hh]
    }

    pub fn band_dims(&self) -> (usize, usize) {
        self.ll.dims()
    }

    pub fn from_bands(bands: [Plane; 4], height: usize, width: usize) -> Result<Self> {
        let dims = bands[0].dims();
        if bands.iter().any(|b| b.dims() != dims) {
            return Err(Error::DimensionMismatch("subbands differ in size".into()));
        }
        if dims != (height.div_ceil(2), width.div_ceil(2)) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} subbands cannot come from a {height}x{width} plane",
                dims.0, dims.1
            )));
        }
        let [ll, hl, lh, hh] = bands;
        Ok(Self {
            ll,
            hl,
            lh,
            hh,
            height,
            width,
        })
    }

    pub fn energy(&self) -> f64 {
        self.bands().iter().map(|b| b.energy()).sum()
    }

    pub fn transpose(&self) -> Self {
        Self {
            ll: self.ll.transpose(),
            hl: self.lh.transpose(),
            lh: self.hl.transpose(),
            hh: self.hh.transpose(),
            height: self.width,
            width: self.height,
        }
    }
}

/// `y[m] = Σ_n f(n) x[(2m - n) mod len]`.
fn decimate(x: &[f64], f: &FirFilter, out: &mut [f64]) {
    let n = x.len() as isize;
    for (m, y) in out.iter_mut().enumerate() {
        *y = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let idx = (2 * m as isize - (f.delay() + i) as isize).rem_euclid(n);
                c * x[idx as usize]
            })
            .sum();
    }
}

/// `out[(2m + n) mod len] += f(n) y[m]`.
fn expand_add(y: &[f64], f: &FirFilter, out: &mut [f64]) {
    let n = out.len();
    for (m, &v) in y.iter().enumerate() {
        for (i, &c) in f.coeffs().iter().enumerate() {
            out[(2 * m + f.delay() + i) % n] += c * v;
        }
    }
}

fn analyze_line(x: &[f64], lo: &FirFilter, hi: &FirFilter) -> (Vec<f64>, Vec<f64>) {
    let half = x.len() / 2;
    let mut low = vec![0.0; half];
    let mut high = vec![0.0; half];
    decimate(x, lo, &mut low);
    decimate(x, hi, &mut high);
    (low, high)
}

fn synthesize_line(low: &[f64], high: &[f64], bank: &FilterBank) -> Vec<f64> {
    let n = 2 * low.len();
    let mut raw = vec![0.0; n];
    expand_add(low, &bank.f0, &mut raw);
    expand_add(high, &bank.f1, &mut raw);
    let inv = 1.0 / bank.gain;
    (0..n).map(|t| raw[(t + bank.delay) % n] * inv).collect()
}

/// Low and high channels of a periodic signal. Odd lengths are padded by
/// repeating the last sample.
pub fn analyze_1d(signal: &[f64], bank: &FilterBank) -> Result<(Vec<f64>, Vec<f64>)> {
    if signal.is_empty() {
        return Err(Error::Empty);
    }
    if signal.len() % 2 == 1 {
        let mut padded = signal.to_vec();
        padded.push(*signal.last().unwrap());
        return Ok(analyze_line(&padded, &bank.h0, &bank.h1));
    }
    Ok(analyze_line(signal, &bank.h0, &bank.h1))
}

/// Inverse of [`analyze_1d`], with the bank's gain and delay removed.
pub fn synthesize_1d(low: &[f64], high: &[f64], bank: &FilterBank) -> Result<Vec<f64>> {
    if low.len() != high.len() {
        return Err(Error::LengthMismatch(low.len(), high.len()));
    }
    if low.is_empty() {
        return Err(Error::Empty);
    }
    Ok(synthesize_line(low, high, bank))
}

/// Filters every row and keeps even outputs: `(low, high)` of width `w/2`.
fn rows_pass(p: &Plane, lo: &FirFilter, hi: &FirFilter) -> (Plane, Plane) {
    let half = p.width / 2;
    let mut low = Plane::zeros(p.height, half);
    let mut high = Plane::zeros(p.height, half);
    for r in 0..p.height {
        let x = p.row(r);
        decimate(x, lo, &mut low.data[r * half..(r + 1) * half]);
        decimate(x, hi, &mut high.data[r * half..(r + 1) * half]);
    }
    (low, high)
}

/// Column counterpart of [`rows_pass`] for a single filter.
fn cols_pass(p: &Plane, f: &FirFilter) -> Plane {
    let half = p.height / 2;
    let mut out = Plane::zeros(half, p.width);
    let mut col = vec![0.0; p.height];
    let mut y = vec![0.0; half];
    for c in 0..p.width {
        for (r, v) in col.iter_mut().enumerate() {
            *v = p.get(r, c);
        }
        decimate(&col, f, &mut y);
        for (r, v) in y.iter().enumerate() {
            out.set(r, c, *v);
        }
    }
    out
}

fn analyze_even(p: &Plane, h0: &FirFilter, h1: &FirFilter) -> [Plane; 4] {
    let (row_lo, row_hi) = rows_pass(p, h0, h1);
    [
        cols_pass(&row_lo, h0),
        cols_pass(&row_hi, h0),
        cols_pass(&row_lo, h1),
        cols_pass(&row_hi, h1),
    ]
}

/// Separable one-level analysis into `LL, HL, LH, HH`.
pub fn analyze_2d(p: &Plane, bank: &FilterBank) -> Result<SubbandSet> {
    let [ll, hl, lh, hh] = analyze_even(&p.padded_even(), &bank.h0, &bank.h1);
    Ok(SubbandSet {
        ll,
        hl,
        lh,
        hh,
        height: p.height,
        width: p.width,
    })
}

/// Derivative of [`analyze_2d`] when the analysis filters move along
/// `(dh0, dh1)`. Each band is bilinear in the filters, so this is the
/// product rule applied to the row and column passes.
pub fn analyze_2d_tangent(
    p: &Plane,
    bank: &FilterBank,
    dh0: &FirFilter,
    dh1: &FirFilter,
) -> SubbandSet {
    let x = p.padded_even();
    let (row_lo, row_hi) = rows_pass(&x, &bank.h0, &bank.h1);
    let (d_row_lo, d_row_hi) = rows_pass(&x, dh0, dh1);
    let band = |rows: &Plane, d_rows: &Plane, col: &FirFilter, d_col: &FirFilter| {
        let mut b = cols_pass(rows, d_col);
        b.add_scaled(&cols_pass(d_rows, col), 1.0);
        b
    };
    SubbandSet {
        ll: band(&row_lo, &d_row_lo, &bank.h0, dh0),
        hl: band(&row_hi, &d_row_hi, &bank.h0, dh0),
        lh: band(&row_lo, &d_row_lo, &bank.h1, dh1),
        hh: band(&row_hi, &d_row_hi, &bank.h1, dh1),
        height: p.height,
        width: p.width,
    }
}

/// Inverse of [`analyze_2d`]: columns first, then rows, then crop.
pub fn synthesize_2d(s: &SubbandSet, bank: &FilterBank) -> Result<Plane> {
    let (bh, bw) = s.band_dims();
    if s.bands().iter().any(|b| b.dims() != (bh, bw)) {
        return Err(Error::DimensionMismatch("subbands differ in size".into()));
    }
    if (bh, bw) != (s.height.div_ceil(2), s.width.div_ceil(2)) {
        return Err(Error::DimensionMismatch(format!(
            "{bh}x{bw} subbands cannot rebuild a {}x{} plane",
            s.height, s.width
        )));
    }
    let (h, w) = (2 * bh, 2 * bw);

    let cols_inverse = |low: &Plane, high: &Plane| {
        let mut out = Plane::zeros(h, bw);
        let mut lo = vec![0.0; bh];
        let mut hi = vec![0.0; bh];
        for c in 0..bw {
            for r in 0..bh {
                lo[r] = low.get(r, c);
                hi[r] = high.get(r, c);
            }
            for (r, v) in synthesize_line(&lo, &hi, bank).into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        out
    };
    let row_lo = cols_inverse(&s.ll, &s.lh);
    let row_hi = cols_inverse(&s.hl, &s.hh);

    let mut out = Plane::zeros(h, w);
    for r in 0..h {
        let line = synthesize_line(row_lo.row(r), row_hi.row(r), bank);
        out.data[r * w..(r + 1) * w].copy_from_slice(&line);
    }
    Ok(out.cropped(s.height, s.width))
}
