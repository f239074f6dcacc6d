//! Bundled orthogonal scaling filters used for lattice initialization.

use crate::error::{Error, Result};
use crate::fir_poly::FirFilter;
use crate::orth_lattice::{factor_orth, OrthLatticeParams};

/// Named orthogonal low-pass filters shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedWavelet {
    Haar,
    Db2,
    Db3,
    Db4,
}

/// Orthogonality tolerance when factoring the bundled tables.
pub const TABLE_TOL: f64 = 1e-12;

impl NamedWavelet {
    pub const ALL: [NamedWavelet; 4] = [Self::Haar, Self::Db2, Self::Db3, Self::Db4];

    pub fn name(self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::Db2 => "db2",
            Self::Db3 => "db3",
            Self::Db4 => "db4",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.name() == name)
    }

    fn table(self) -> &'static str {
        match self {
            Self::Haar => include_str!("../data/wavelets/haar.txt"),
            Self::Db2 => include_str!("../data/wavelets/db2.txt"),
            Self::Db3 => include_str!("../data/wavelets/db3.txt"),
            Self::Db4 => include_str!("../data/wavelets/db4.txt"),
        }
    }

    /// The scaling filter, normalized so its taps sum to √2.
    pub fn lowpass(self) -> FirFilter {
        parse_table(self.table()).expect("bundled wavelet table is well formed")
    }

    /// Lattice angles whose synthesis reproduces [`NamedWavelet::lowpass`].
    pub fn lattice_params(self) -> Result<OrthLatticeParams> {
        factor_orth(&self.lowpass(), TABLE_TOL)
    }
}

/// One tap per line; blank lines and `#` comments ignored.
pub fn parse_table(text: &str) -> Result<FirFilter> {
    let taps = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Error::InvalidParams(format!("bad tap {l:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if taps.is_empty() {
        return Err(Error::Empty);
    }
    Ok(FirFilter::from_taps(&taps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orth_lattice::{check_double_shift_orthogonality, dc_gain_deviation, synth_orth};

    #[test]
    fn tables_are_orthonormal_and_normalized() {
        for w in NamedWavelet::ALL {
            let h = w.lowpass();
            assert!(
                check_double_shift_orthogonality(&h) <= 1e-15,
                "{}",
                w.name()
            );
            assert!(dc_gain_deviation(&h) <= 1e-15, "{}", w.name());
        }
        assert_eq!(NamedWavelet::Db4.lowpass().len(), 8);
    }

    #[test]
    fn factored_tables_resynthesize() {
        for w in NamedWavelet::ALL {
            let p = w.lattice_params().unwrap();
            let h = synth_orth(&p).h0;
            assert!(h.approx_eq(&w.lowpass(), 1e-8), "{}", w.name());
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_table("# nothing\n\n").is_err());
        assert!(parse_table("1.0\nabc\n").is_err());
    }
}
