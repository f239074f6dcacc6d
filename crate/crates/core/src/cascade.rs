//! Matrix-chain evaluation shared by the lattice and lifting families.
//!
//! Each family writes its analysis pair as `M_last ··· M_1 M_0 v` where some
//! factors depend on exactly one tunable parameter. The derivative with
//! respect to that parameter is the same chain with the factor swapped for
//! its elementwise derivative.

use crate::fir_poly::{FirFilter, PolyMatrix2x2};

#[derive(Clone, Debug)]
pub(crate) struct Cascade {
    pub input: [FirFilter; 2],
    /// Applied in order: `factors[0]` multiplies the input first.
    pub factors: Vec<PolyMatrix2x2>,
    /// `(factor index, d factor / d parameter)` for parameters `0..n`.
    pub tangents: Vec<(usize, PolyMatrix2x2)>,
}

impl Cascade {
    pub fn output(&self) -> [FirFilter; 2] {
        self.apply(None)
    }

    /// `(d h0 / d p, d h1 / d p)` for parameter `param`.
    pub fn derivative(&self, param: usize) -> [FirFilter; 2] {
        let (slot, ref dm) = self.tangents[param];
        self.apply(Some((slot, dm)))
    }

    fn apply(&self, swap: Option<(usize, &PolyMatrix2x2)>) -> [FirFilter; 2] {
        self.factors
            .iter()
            .enumerate()
            .fold(self.input.clone(), |v, (i, m)| match swap {
                Some((slot, dm)) if slot == i => dm.mul_vec(&v),
                _ => m.mul_vec(&v),
            })
    }
}
