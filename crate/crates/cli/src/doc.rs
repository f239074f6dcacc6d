//! Filter spec documents: JSON with every float written to 17 significant
//! digits so a read/write cycle is lossless.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use uwu_core::biorth_lattice::BiorthLatticeParams;
use uwu_core::lifting::{LiftingBase, LiftingParams};
use uwu_core::orth_lattice::OrthLatticeParams;
use uwu_core::{Family, FilterBank, FirFilter, Params};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `d.dddddddddddddddde±x`: 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

mod sig17 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        number(*x).map_err(serde::ser::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }

    pub(super) fn number(x: f64) -> std::result::Result<serde_json::Number, String> {
        if !x.is_finite() {
            return Err(format!("cannot store non-finite value {x}"));
        }
        format_f64(x).parse().map_err(|e| format!("{e}"))
    }
}

mod sig17_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            seq.serialize_element(&sig17::number(x).map_err(serde::ser::Error::custom)?)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<f64>::deserialize(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TapRecord {
    pub delay: usize,
    #[serde(with = "sig17_vec")]
    pub taps: Vec<f64>,
}

impl TapRecord {
    fn from_filter(f: &FirFilter) -> Self {
        Self {
            delay: f.delay(),
            taps: f.coeffs().to_vec(),
        }
    }

    pub fn to_filter(&self) -> Result<FirFilter> {
        if self.taps.is_empty() {
            bail!("filter with no taps");
        }
        Ok(FirFilter::new(self.taps.clone(), self.delay))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub seed: u64,
    pub init: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpecDocument {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(with = "sig17_vec")]
    pub params: Vec<f64>,
    pub h0: TapRecord,
    pub h1: TapRecord,
    pub f0: TapRecord,
    pub f1: TapRecord,
    #[serde(with = "sig17")]
    pub gain: f64,
    pub delay: usize,
    pub metadata: Metadata,
}

impl FilterSpecDocument {
    pub fn from_bank(bank: &FilterBank, metadata: Metadata) -> Self {
        let base = match &bank.params {
            Params::Lifting(p) => Some(p.base().tag().to_string()),
            _ => None,
        };
        Self {
            family: bank.family.tag().to_string(),
            base,
            params: bank.params.values().to_vec(),
            h0: TapRecord::from_filter(&bank.h0),
            h1: TapRecord::from_filter(&bank.h1),
            f0: TapRecord::from_filter(&bank.f0),
            f1: TapRecord::from_filter(&bank.f1),
            gain: bank.gain,
            delay: bank.delay,
            metadata,
        }
    }

    pub fn family(&self) -> Result<Family> {
        Family::from_tag(&self.family).ok_or_else(|| anyhow!("unknown family {:?}", self.family))
    }

    pub fn params(&self) -> Result<Params> {
        let values = self.params.clone();
        Ok(match self.family()? {
            Family::Orthogonal => Params::Orth(OrthLatticeParams::new(values)?),
            Family::BiorthogonalLattice => Params::Biorth(BiorthLatticeParams::new(values)?),
            Family::Lifting => {
                let tag = self.base.as_deref().unwrap_or("haar");
                let base = LiftingBase::from_tag(tag)
                    .ok_or_else(|| anyhow!("unknown lifting base {tag:?}"))?;
                Params::Lifting(LiftingParams::new(values, base)?)
            }
        })
    }

    /// The bank exactly as stored: taps, gain and delay are taken from the
    /// document, not recomputed.
    pub fn stored_bank(&self) -> Result<FilterBank> {
        let params = self.params()?;
        if !(self.gain.is_finite() && self.gain != 0.0) {
            bail!("gain must be finite and nonzero");
        }
        Ok(FilterBank {
            h0: self.h0.to_filter()?,
            h1: self.h1.to_filter()?,
            f0: self.f0.to_filter()?,
            f1: self.f1.to_filter()?,
            family: params.family(),
            params,
            gain: self.gain,
            delay: self.delay,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed filter spec document")
    }

    /// Largest tap difference between the stored filters and a fresh
    /// synthesis from the stored parameters, plus a delay/gain mismatch flag.
    pub fn resynthesis_deviation(&self) -> Result<f64> {
        let stored = self.stored_bank()?;
        let fresh = stored.params.synth()?;
        let taps = [
            stored.h0.max_abs_diff(&fresh.h0),
            stored.h1.max_abs_diff(&fresh.h1),
            stored.f0.max_abs_diff(&fresh.f0),
            stored.f1.max_abs_diff(&fresh.f1),
            (stored.gain - fresh.gain).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if stored.delay != fresh.delay {
            return Ok(f64::INFINITY);
        }
        Ok(taps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use uwu_core::rng::XorShift64Star;

    fn meta() -> Metadata {
        Metadata {
            tool_version: TOOL_VERSION.into(),
            seed: 42,
            init: "explicit".into(),
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn lossless_round_trip() {
        let mut rng = XorShift64Star::new(5);
        let params = Params::Lifting(
            LiftingParams::new(rng.vec(3, -2.0, 2.0), LiftingBase::Bior11).unwrap(),
        );
        let bank = params.synth().unwrap();
        let doc = FilterSpecDocument::from_bank(&bank, meta());
        let text = doc.to_json().unwrap();
        let back = FilterSpecDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.stored_bank().unwrap(), bank);
        assert_eq!(back.resynthesis_deviation().unwrap(), 0.0);
        assert!(text.contains("\"base\": \"bior1.1\""));
    }

    #[test]
    fn unknown_family_rejected() {
        let bank = Params::Orth(OrthLatticeParams::new(vec![0.1]).unwrap())
            .synth()
            .unwrap();
        let mut doc = FilterSpecDocument::from_bank(&bank, meta());
        doc.family = "typeB".into();
        assert!(doc.params().is_err());
    }
}
