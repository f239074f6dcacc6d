//! FIR polynomials in `z^{-1}` and 2x2 matrices of them.
//!
//! A [`FirFilter`] is a finite tap sequence together with the power of
//! `z^{-1}` carried by its first tap. Every lattice and lifting cascade in
//! this crate is built from products of [`PolyMatrix2x2`] values, so the
//! arithmetic here is kept exact up to floating point rounding: delays are
//! tracked as integers and never emulated by zero padding.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

/// Taps with magnitude at or below this are dropped from the ends of a
/// filter when it is put into canonical form.
pub const TRIM_THRESHOLD: f64 = 1e-14;

/// A real FIR filter `sum_i coeffs[i] * z^{-(delay + i)}`.
///
/// Filters built with [`FirFilter::new`] keep their taps exactly as given,
/// so a nominal tap count (for example `[1, 0]`) survives. Results of the
/// arithmetic operations are always canonical: leading and trailing taps at
/// or below [`TRIM_THRESHOLD`] are removed. The zero polynomial is stored as
/// a single `0.0` tap at delay 0.
#[derive(Clone, PartialEq)]
pub struct FirFilter {
    coeffs: Vec<f64>,
    delay: usize,
}

impl fmt::Debug for FirFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FirFilter(z^-{}: {:?})", self.delay, self.coeffs)
    }
}

impl FirFilter {
    /// Builds a filter from explicit taps. An empty tap list yields the zero
    /// polynomial.
    pub fn new(coeffs: Vec<f64>, delay: usize) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { coeffs, delay }
    }

    /// Taps starting at `z^0`.
    pub fn from_taps(taps: &[f64]) -> Self {
        Self::new(taps.to_vec(), 0)
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![0.0],
            delay: 0,
        }
    }

    pub fn identity() -> Self {
        Self::monomial(1.0, 0)
    }

    /// `value * z^{-delay}`.
    pub fn monomial(value: f64, delay: usize) -> Self {
        Self {
            coeffs: vec![value],
            delay,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Number of stored taps.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Highest power of `z^{-1}` present.
    pub fn degree(&self) -> usize {
        self.delay + self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficient of `z^{-power}`.
    pub fn coeff(&self, power: usize) -> f64 {
        if power < self.delay {
            return 0.0;
        }
        self.coeffs.get(power - self.delay).copied().unwrap_or(0.0)
    }

    /// Coefficients of `z^0 .. z^{-(len-1)}`.
    ///
    /// Panics if the filter has a nonzero tap outside that window.
    pub fn dense(&self, len: usize) -> Vec<f64> {
        assert!(
            self.is_zero() || self.trimmed().degree() < len,
            "filter {self:?} does not fit in {len} taps"
        );
        (0..len).map(|n| self.coeff(n)).collect()
    }

    /// Re-expresses the filter over the window `z^{-start} .. z^{-(start+len-1)}`.
    pub fn with_support(&self, start: usize, len: usize) -> Self {
        let t = self.trimmed();
        assert!(
            t.is_zero() || (t.delay >= start && t.degree() < start + len),
            "filter {self:?} does not fit in window [{start}, {})",
            start + len
        );
        Self {
            coeffs: (start..start + len).map(|n| self.coeff(n)).collect(),
            delay: start,
        }
    }

    /// Canonical form: outer taps at or below [`TRIM_THRESHOLD`] removed.
    pub fn trimmed(&self) -> Self {
        let keep = |c: &f64| c.abs() > TRIM_THRESHOLD;
        match self.coeffs.iter().position(keep) {
            None => Self::zero(),
            Some(first) => {
                let last = self.coeffs.iter().rposition(keep).unwrap();
                Self {
                    coeffs: self.coeffs[first..=last].to_vec(),
                    delay: self.delay + first,
                }
            }
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            delay: self.delay,
        }
        .trimmed()
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Multiplies by `z^{-by}`.
    pub fn delayed(&self, by: usize) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            delay: self.delay + by,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let lo = self.delay.min(other.delay);
        let hi = self.degree().max(other.degree());
        let coeffs = (lo..=hi)
            .map(|n| self.coeff(n) + sign * other.coeff(n))
            .collect();
        Self { coeffs, delay: lo }.trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        poly_mul(self, other)
    }

    /// `F(z) -> F(z^factor)`.
    pub fn upsampled(&self, factor: usize) -> Self {
        assert!(factor >= 1);
        let mut coeffs = vec![0.0; (self.coeffs.len() - 1) * factor + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * factor] = c;
        }
        Self {
            coeffs,
            delay: self.delay * factor,
        }
    }

    /// `F(z) -> F(-z)`: negates taps at odd powers.
    pub fn modulated(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (self.delay + i) % 2 == 1 { -c } else { c })
            .collect();
        Self {
            coeffs,
            delay: self.delay,
        }
    }

    /// Time reversal about the stored window: `z^{-(delay+len-1)} F(z^{-1})`
    /// shifted so the support is unchanged.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            coeffs,
            delay: self.delay,
        }
    }

    /// Splits `F(z) = E0(z^2) + z^{-1} E1(z^2)`.
    pub fn polyphase(&self) -> (Self, Self) {
        let hi = self.degree();
        let even: Vec<f64> = (0..=hi / 2).map(|m| self.coeff(2 * m)).collect();
        let odd: Vec<f64> = (0..=hi / 2).map(|m| self.coeff(2 * m + 1)).collect();
        (Self::new(even, 0).trimmed(), Self::new(odd, 0).trimmed())
    }

    /// DTFT `sum_n f[n] e^{-j w n}`.
    pub fn dtft(&self, omega: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| Complex64::from_polar(c, -omega * (self.delay + i) as f64))
            .sum()
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Largest coefficient-wise difference, regardless of how either side
    /// is padded.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lo = self.delay.min(other.delay);
        let hi = self.degree().max(other.degree());
        (lo..=hi)
            .map(|n| (self.coeff(n) - other.coeff(n)).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

/// Full linear convolution of the tap sequences; delays add.
pub fn poly_mul(a: &FirFilter, b: &FirFilter) -> FirFilter {
    let mut coeffs = vec![0.0; a.coeffs.len() + b.coeffs.len() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            coeffs[i + j] += x * y;
        }
    }
    FirFilter {
        coeffs,
        delay: a.delay + b.delay,
    }
    .trimmed()
}

/// `[[a, b], [c, d]]` with polynomial entries.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix2x2 {
    pub entries: [[FirFilter; 2]; 2],
}

impl PolyMatrix2x2 {
    pub fn new(a: FirFilter, b: FirFilter, c: FirFilter, d: FirFilter) -> Self {
        Self {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn from_scalars(m: [[f64; 2]; 2]) -> Self {
        let s = |v: f64| FirFilter::monomial(v, 0).trimmed();
        Self::new(s(m[0][0]), s(m[0][1]), s(m[1][0]), s(m[1][1]))
    }

    pub fn identity() -> Self {
        Self::from_scalars([[1.0, 0.0], [0.0, 1.0]])
    }

    /// `diag(1, z^{-delay})`; `delay = 2` is the `Λ(z^2)` factor of the
    /// lattice cascades.
    pub fn delay(delay: usize) -> Self {
        Self::new(
            FirFilter::identity(),
            FirFilter::zero(),
            FirFilter::zero(),
            FirFilter::monomial(1.0, delay),
        )
    }

    /// Plane rotation `[[cos, sin], [-sin, cos]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_scalars([[c, s], [-s, c]])
    }

    pub fn get(&self, row: usize, col: usize) -> &FirFilter {
        &self.entries[row][col]
    }

    pub fn mul(&self, other: &Self) -> Self {
        matmul(self, other)
    }

    pub fn mul_vec(&self, v: &[FirFilter; 2]) -> [FirFilter; 2] {
        let e = &self.entries;
        [
            e[0][0].mul(&v[0]).add(&e[0][1].mul(&v[1])),
            e[1][0].mul(&v[0]).add(&e[1][1].mul(&v[1])),
        ]
    }

    pub fn det(&self) -> FirFilter {
        det2(self)
    }

    /// Adjugate `[[d, -b], [-c, a]]`, so `adj(A) A = det(A) I`.
    pub fn adjugate(&self) -> Self {
        let e = &self.entries;
        Self::new(
            e[1][1].clone(),
            e[0][1].neg(),
            e[1][0].neg(),
            e[0][0].clone(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        let e = &self.entries;
        Self::new(
            e[0][0].scale(factor),
            e[0][1].scale(factor),
            e[1][0].scale(factor),
            e[1][1].scale(factor),
        )
    }

    /// Entrywise `z -> z^factor`.
    pub fn upsampled(&self, factor: usize) -> Self {
        let e = &self.entries;
        Self::new(
            e[0][0].upsampled(factor),
            e[0][1].upsampled(factor),
            e[1][0].upsampled(factor),
            e[1][1].upsampled(factor),
        )
    }

    /// Polyphase matrix of the analysis pair: `H_i(z) = E_i0(z^2) + z^{-1} E_i1(z^2)`.
    pub fn polyphase(h0: &FirFilter, h1: &FirFilter) -> Self {
        let (e00, e01) = h0.polyphase();
        let (e10, e11) = h1.polyphase();
        Self::new(e00, e01, e10, e11)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c)))
            .map(|(r, c)| self.entries[r][c].max_abs_diff(&other.entries[r][c]))
            .fold(0.0, f64::max)
    }
}

/// Standard 2x2 product with polynomial entries.
pub fn matmul(a: &PolyMatrix2x2, b: &PolyMatrix2x2) -> PolyMatrix2x2 {
    let (x, y) = (&a.entries, &b.entries);
    let entry = |r: usize, c: usize| x[r][0].mul(&y[0][c]).add(&x[r][1].mul(&y[1][c]));
    PolyMatrix2x2::new(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1))
}

/// `a11 a22 - a12 a21`.
pub fn det2(a: &PolyMatrix2x2) -> FirFilter {
    let e = &a.entries;
    e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
}

/// DTFT of `f` on `num_samples` equally spaced points of `[0, pi]`.
pub fn freq_response(f: &FirFilter, num_samples: usize) -> Vec<Complex64> {
    assert!(num_samples >= 2, "need at least two frequency samples");
    let step = PI / (num_samples - 1) as f64;
    (0..num_samples).map(|j| f.dtft(j as f64 * step)).collect()
}
