//! Subcommand implementations. Each returns [`Status`]; hard errors come
//! back as `Err` and [`UsageError`]s mark invalid flag combinations.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use uwu_core::biorth_lattice::{check_mirror_image_pair, BiorthLatticeParams};
use uwu_core::fir_poly::freq_response;
use uwu_core::fusion::{uwu_downsample, AttentionHeadParams};
use uwu_core::grad_tune::{finite_diff_check, tune, Objective};
use uwu_core::lifting::{LiftingBase, LiftingParams, MAX_TESTED_STEPS};
use uwu_core::orth_lattice::{check_double_shift_orthogonality, OrthLatticeParams};
use uwu_core::rng::XorShift64Star;
use uwu_core::transform::{analyze_1d, analyze_2d, synthesize_1d, synthesize_2d};
use uwu_core::wavelets::{NamedWavelet, TABLE_TOL};
use uwu_core::{Error as CoreError, Family, Params, Plane, SubbandSet};

use crate::doc::{format_f64, FilterSpecDocument, Metadata, TOOL_VERSION};
use crate::image::{read_plane, read_raw, write_atomic, write_raw_with_sidecar, RAW_DTYPE};

/// Invalid flag combination; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    CheckFailed,
}

/// Tolerances used by `verify` unless `--tol` overrides the PR one.
pub const VERIFY_PR_TOL: f64 = 1e-10;
pub const VERIFY_STRUCTURE_TOL: f64 = 1e-12;
pub const VERIFY_GRADIENT_TOL: f64 = 1e-5;
pub const VERIFY_SIGNAL_LEN: usize = 64;
const GRADIENT_STEP: f64 = 1e-6;

/// Sampling ranges of `--init random`.
const RANDOM_ANGLE: (f64, f64) = (-PI, PI);
const RANDOM_LATTICE: (f64, f64) = (-0.9, 0.9);
const RANDOM_LIFTING: (f64, f64) = (-1.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    Orth,
    Biorth,
    Lifting,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Orth => Family::Orthogonal,
            FamilyArg::Biorth => Family::BiorthogonalLattice,
            FamilyArg::Lifting => Family::Lifting,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum InitArg {
    Explicit,
    Haar,
    Db2,
    Db3,
    Db4,
    Zeros,
    Random,
}

impl InitArg {
    fn tag(self) -> &'static str {
        match self {
            InitArg::Explicit => "explicit",
            InitArg::Haar => "haar",
            InitArg::Db2 => "db2",
            InitArg::Db3 => "db3",
            InitArg::Db4 => "db4",
            InitArg::Zeros => "zeros",
            InitArg::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BaseArg {
    Haar,
    #[value(name = "bior1.1")]
    Bior11,
}

impl From<BaseArg> for LiftingBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Haar => LiftingBase::Haar,
            BaseArg::Bior11 => LiftingBase::Bior11,
        }
    }
}

pub struct SynthArgs {
    pub family: FamilyArg,
    pub init: Option<InitArg>,
    pub params: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub base: Option<BaseArg>,
    pub seed: u64,
    pub tol: Option<f64>,
}

/// Resolves the family/initialization flags into a parameter vector.
pub fn synth_params(a: &SynthArgs) -> Result<Params> {
    let init = match (a.init, &a.params) {
        (None, Some(_)) | (Some(InitArg::Explicit), Some(_)) => InitArg::Explicit,
        (Some(InitArg::Explicit), None) => return usage("--init explicit requires --params"),
        (Some(_), Some(_)) => return usage("--params can only be combined with --init explicit"),
        (Some(i), None) => i,
        (None, None) => return usage("one of --init or --params is required"),
    };
    let takes_steps = matches!(init, InitArg::Zeros | InitArg::Random);
    if a.steps.is_some() && !takes_steps {
        return usage(format!(
            "--steps applies only to --init zeros or random, not {}",
            init.tag()
        ));
    }
    if a.steps == Some(0) {
        return usage("--steps must be at least 1");
    }
    let family = a.family;
    if a.base.is_some() && family != FamilyArg::Lifting {
        return usage("--base applies only to the lifting family");
    }
    let steps = a.steps.unwrap_or(1);
    let mut rng = XorShift64Star::new(a.seed);

    let params = match family {
        FamilyArg::Orth => {
            let angles = match init {
                InitArg::Explicit => a.params.clone().unwrap_or_default(),
                InitArg::Haar | InitArg::Db2 | InitArg::Db3 | InitArg::Db4 => {
                    let w = NamedWavelet::from_name(init.tag()).expect("named wavelet");
                    let tol = a.tol.unwrap_or(TABLE_TOL);
                    let p = uwu_core::orth_lattice::factor_orth(&w.lowpass(), tol)
                        .with_context(|| format!("factoring the {} table", w.name()))?;
                    p.angles().to_vec()
                }
                InitArg::Random => rng.vec(steps, RANDOM_ANGLE.0, RANDOM_ANGLE.1),
                InitArg::Zeros => {
                    return usage("--init zeros is not available for the orth family")
                }
            };
            Params::Orth(OrthLatticeParams::new(angles).map_err(invalid)?)
        }
        FamilyArg::Biorth => {
            let ks = match init {
                InitArg::Explicit => a.params.clone().unwrap_or_default(),
                InitArg::Haar => vec![0.0],
                InitArg::Zeros => vec![0.0; steps],
                InitArg::Random => rng.vec(steps, RANDOM_LATTICE.0, RANDOM_LATTICE.1),
                InitArg::Db2 | InitArg::Db3 | InitArg::Db4 => {
                    return usage(format!(
                        "--init {} is only available for the orth family",
                        init.tag()
                    ))
                }
            };
            Params::Biorth(BiorthLatticeParams::new(ks).map_err(invalid)?)
        }
        FamilyArg::Lifting => {
            let base: LiftingBase = a.base.unwrap_or(BaseArg::Haar).into();
            let coeffs = match init {
                InitArg::Explicit => a.params.clone().unwrap_or_default(),
                InitArg::Haar => vec![0.0],
                InitArg::Zeros => vec![0.0; steps],
                InitArg::Random => rng.vec(steps, RANDOM_LIFTING.0, RANDOM_LIFTING.1),
                InitArg::Db2 | InitArg::Db3 | InitArg::Db4 => {
                    return usage(format!(
                        "--init {} is only available for the orth family",
                        init.tag()
                    ))
                }
            };
            let p = LiftingParams::new(coeffs, base).map_err(invalid)?;
            if p.exceeds_tested_range() {
                eprintln!(
                    "warning: {} lifting steps exceeds the tested range of {MAX_TESTED_STEPS}",
                    p.steps()
                );
            }
            Params::Lifting(p)
        }
    };
    Ok(params)
}

fn invalid(e: CoreError) -> anyhow::Error {
    match e {
        CoreError::InvalidParams(msg) => UsageError(msg).into(),
        other => other.into(),
    }
}

pub fn synth_document(a: &SynthArgs) -> Result<FilterSpecDocument> {
    let params = synth_params(a)?;
    let bank = params.synth()?;
    let init = if a.params.is_some() {
        InitArg::Explicit
    } else {
        a.init.expect("checked")
    };
    Ok(FilterSpecDocument::from_bank(
        &bank,
        Metadata {
            tool_version: TOOL_VERSION.into(),
            seed: a.seed,
            init: init.tag().into(),
        },
    ))
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_synth(a: &SynthArgs, out: Option<&Path>) -> Result<Status> {
    let doc = synth_document(a)?;
    emit(out, &doc.to_json()?)?;
    Ok(Status::Success)
}

pub fn load_spec(path: &Path) -> Result<FilterSpecDocument> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    FilterSpecDocument::from_json(&text).with_context(|| format!("in {}", path.display()))
}

/// One line of the verify report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub deviation: f64,
    pub tol: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tol
    }
}

/// Runs every check that applies to the document's family.
pub fn verify_checks(doc: &FilterSpecDocument, seed: u64, pr_tol: f64) -> Result<Vec<CheckResult>> {
    let bank = doc.stored_bank()?;
    let mut checks = vec![CheckResult {
        name: "resynthesis",
        deviation: doc.resynthesis_deviation()?,
        tol: VERIFY_STRUCTURE_TOL,
    }];

    let mut rng = XorShift64Star::new(seed);
    let x = rng.vec(VERIFY_SIGNAL_LEN, -1.0, 1.0);
    let (lo, hi) = analyze_1d(&x, &bank)?;
    let y = synthesize_1d(&lo, &hi, &bank)?;
    let pr = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "pr-roundtrip",
        deviation: if pr.is_nan() { f64::INFINITY } else { pr },
        tol: pr_tol,
    });

    match &bank.params {
        Params::Orth(_) => checks.push(CheckResult {
            name: "orthogonality",
            deviation: check_double_shift_orthogonality(&bank.h0),
            tol: VERIFY_STRUCTURE_TOL,
        }),
        Params::Biorth(p) => {
            checks.push(CheckResult {
                name: "mirror-image",
                deviation: check_mirror_image_pair(p),
                tol: VERIFY_STRUCTURE_TOL,
            });
            let len = p.tap_count();
            let sym = (0..len)
                .map(|n| {
                    let d0 = bank.h0.coeff(n) - bank.h0.coeff(len - 1 - n);
                    let d1 = bank.h1.coeff(n) + bank.h1.coeff(len - 1 - n);
                    d0.abs().max(d1.abs())
                })
                .fold(0.0, f64::max);
            checks.push(CheckResult {
                name: "symmetry",
                deviation: sym,
                tol: VERIFY_STRUCTURE_TOL,
            });
        }
        Params::Lifting(p) => checks.push(CheckResult {
            name: "lifting-base",
            deviation: bank.h0.max_abs_diff(&p.base().lowpass()),
            tol: 0.0,
        }),
    }

    checks.push(CheckResult {
        name: "gradient",
        deviation: finite_diff_check(&bank.params, GRADIENT_STEP)?,
        tol: VERIFY_GRADIENT_TOL,
    });
    Ok(checks)
}

pub fn cmd_verify(spec: &Path, seed: u64, tol: Option<f64>) -> Result<Status> {
    let doc = load_spec(spec)?;
    let checks = verify_checks(&doc, seed, tol.unwrap_or(VERIFY_PR_TOL))?;
    for c in &checks {
        println!(
            "{:<14} max deviation {:.3e} (tol {:.0e})  {}",
            c.name,
            c.deviation,
            c.tol,
            if c.passed() { "ok" } else { "FAIL" }
        );
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        println!("verify: all checks passed");
        Ok(Status::Success)
    } else {
        println!("verify: failed check(s): {}", failed.join(", "));
        eprintln!("verify failed: {}", failed.join(", "));
        Ok(Status::CheckFailed)
    }
}

pub const BAND_NAMES: [&str; 4] = ["ll", "hl", "lh", "hh"];

/// Written next to the four subband files by `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubbandManifest {
    pub height: usize,
    pub width: usize,
    pub band_height: usize,
    pub band_width: usize,
    pub dtype: String,
    pub bands: Vec<String>,
}

pub fn cmd_analyze(image: &Path, spec: &Path, out_dir: &Path) -> Result<Status> {
    let plane = read_plane(image)?;
    let bank = load_spec(spec)?.stored_bank()?;
    let s = analyze_2d(&plane, &bank)?;
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut files = Vec::new();
    for (name, band) in BAND_NAMES.iter().zip(s.bands()) {
        let file = format!("{name}.f64");
        write_atomic(&out_dir.join(&file), &crate::image::plane_to_bytes(band))?;
        files.push(file);
    }
    let (bh, bw) = s.band_dims();
    let manifest = SubbandManifest {
        height: s.height,
        width: s.width,
        band_height: bh,
        band_width: bw,
        dtype: RAW_DTYPE.into(),
        bands: files,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_atomic(&out_dir.join("manifest.json"), json.as_bytes())?;
    Ok(Status::Success)
}

pub fn read_subbands(dir: &Path) -> Result<SubbandSet> {
    let path = dir.join("manifest.json");
    let text =
        fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
    let m: SubbandManifest =
        serde_json::from_str(&text).with_context(|| format!("malformed {}", path.display()))?;
    if m.dtype != RAW_DTYPE {
        bail!("unsupported sample type {:?}", m.dtype);
    }
    if m.bands.len() != 4 {
        bail!("manifest lists {} bands, expected 4", m.bands.len());
    }
    let mut bands = Vec::with_capacity(4);
    for file in &m.bands {
        bands.push(read_raw(&dir.join(file), m.band_height, m.band_width)?);
    }
    let bands: [Plane; 4] = bands.try_into().expect("four bands");
    Ok(SubbandSet::from_bands(bands, m.height, m.width)?)
}

pub fn cmd_reconstruct(dir: &Path, spec: &Path, out: &Path) -> Result<Status> {
    let s = read_subbands(dir)?;
    let bank = load_spec(spec)?.stored_bank()?;
    write_raw_with_sidecar(out, &synthesize_2d(&s, &bank)?)?;
    Ok(Status::Success)
}

/// Attention head file: `{"weights": [[..4]; 4], "bias": [..4]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadDocument {
    pub weights: [[f64; 4]; 4],
    pub bias: [f64; 4],
}

pub fn load_head(path: Option<&Path>) -> Result<AttentionHeadParams> {
    let Some(path) = path else {
        return Ok(AttentionHeadParams::uniform());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let h: HeadDocument = serde_json::from_str(&text)
        .with_context(|| format!("malformed attention head {}", path.display()))?;
    Ok(AttentionHeadParams::new(h.weights, h.bias)?)
}

pub fn cmd_fuse(image: &Path, spec: &Path, head: Option<&Path>, out: &Path) -> Result<Status> {
    let plane = read_plane(image)?;
    let bank = load_spec(spec)?.stored_bank()?;
    let head = load_head(head)?;
    write_raw_with_sidecar(out, &uwu_downsample(&plane, &bank, &head)?)?;
    Ok(Status::Success)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ObjectiveArg {
    StopbandEnergy,
    LlCompaction,
}

pub struct TuneArgs {
    pub spec: PathBuf,
    pub objective: ObjectiveArg,
    pub image: Option<PathBuf>,
    pub lr: f64,
    pub iters: usize,
    pub omega_s: f64,
    pub samples: usize,
    pub out: PathBuf,
    pub trace: Option<PathBuf>,
}

impl TuneArgs {
    pub fn trace_path(&self) -> PathBuf {
        self.trace.clone().unwrap_or_else(|| {
            let mut s = self.out.as_os_str().to_owned();
            s.push(".trace.csv");
            PathBuf::from(s)
        })
    }
}

fn trace_csv(trace: &[f64]) -> String {
    let mut s = String::from("iteration,objective\n");
    for (i, v) in trace.iter().enumerate() {
        s.push_str(&format!("{i},{}\n", format_f64(*v)));
    }
    s
}

pub fn cmd_tune(a: &TuneArgs) -> Result<Status> {
    if a.iters == 0 {
        return usage("--iters must be at least 1");
    }
    if !(a.lr >= 0.0 && a.lr.is_finite()) {
        return usage("--lr must be a finite nonnegative number");
    }
    let objective = match a.objective {
        ObjectiveArg::StopbandEnergy => {
            if a.image.is_some() {
                return usage("--image applies only to the ll-compaction objective");
            }
            if a.samples < 2 {
                return usage("--samples must be at least 2");
            }
            if !(a.omega_s > 0.0 && a.omega_s < PI) {
                return usage("--omega-s must lie in (0, pi)");
            }
            Objective::StopbandEnergy {
                omega_s: a.omega_s,
                num_samples: a.samples,
            }
        }
        ObjectiveArg::LlCompaction => match &a.image {
            Some(p) => Objective::LlCompaction(read_plane(p)?),
            None => return usage("the ll-compaction objective requires --image"),
        },
    };
    let doc = load_spec(&a.spec)?;
    let params = doc.params()?;
    match tune(&params, &objective, a.lr, a.iters) {
        Ok(report) => {
            write_atomic(&a.trace_path(), trace_csv(&report.trace).as_bytes())?;
            let bank = report.final_params.synth()?;
            let out = FilterSpecDocument::from_bank(&bank, doc.metadata.clone());
            write_atomic(&a.out, out.to_json()?.as_bytes())?;
            println!(
                "{}: {} -> {} after {} iterations",
                objective.name(),
                format_f64(report.trace[0]),
                format_f64(report.final_objective),
                report.iterations
            );
            Ok(Status::Success)
        }
        Err(CoreError::Diverged { iteration, partial }) => {
            write_atomic(&a.trace_path(), trace_csv(&partial.trace).as_bytes())?;
            eprintln!("tune diverged at iteration {iteration}: objective is not finite");
            Ok(Status::CheckFailed)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn freqz_csv(doc: &FilterSpecDocument, samples: usize) -> Result<String> {
    if samples < 2 {
        return usage("--samples must be at least 2");
    }
    let bank = doc.stored_bank()?;
    let h0 = freq_response(&bank.h0, samples);
    let h1 = freq_response(&bank.h1, samples);
    let step = PI / (samples - 1) as f64;
    let mut s = String::from("omega,mag_h0,mag_h1\n");
    for (j, (a, b)) in h0.iter().zip(&h1).enumerate() {
        s.push_str(&format!(
            "{},{},{}\n",
            format_f64(j as f64 * step),
            format_f64(a.norm()),
            format_f64(b.norm())
        ));
    }
    Ok(s)
}

pub fn cmd_freqz(spec: &Path, samples: usize, out: Option<&Path>) -> Result<Status> {
    let doc = load_spec(spec)?;
    emit(out, &freqz_csv(&doc, samples)?)?;
    Ok(Status::Success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn args(family: FamilyArg, init: Option<InitArg>) -> SynthArgs {
        SynthArgs {
            family,
            init,
            params: None,
            steps: None,
            base: None,
            seed: 42,
            tol: None,
        }
    }

    fn is_usage(r: Result<Params>) -> bool {
        r.err()
            .is_some_and(|e| e.downcast_ref::<UsageError>().is_some())
    }

    #[test]
    fn orth_haar_init() {
        let doc = synth_document(&args(FamilyArg::Orth, Some(InitArg::Haar))).unwrap();
        assert_eq!(doc.params.len(), 1);
        assert!((doc.params[0] - FRAC_PI_4).abs() < 1e-15);
        for (t, e) in doc.h0.taps.iter().zip([FRAC_1_SQRT_2, FRAC_1_SQRT_2]) {
            assert!((t - e).abs() < 1e-15);
        }
        assert_eq!(doc.metadata.init, "haar");
    }

    #[test]
    fn biorth_zeros_two_steps() {
        let mut a = args(FamilyArg::Biorth, Some(InitArg::Zeros));
        a.steps = Some(2);
        let doc = synth_document(&a).unwrap();
        assert_eq!(doc.params, vec![0.0, 0.0]);
        let bank = doc.stored_bank().unwrap();
        assert_eq!(bank.h0.with_support(0, 4).coeffs(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(bank.h1.with_support(0, 4).coeffs(), &[1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn lifting_zeros_two_steps() {
        let mut a = args(FamilyArg::Lifting, Some(InitArg::Zeros));
        a.steps = Some(2);
        let bank = synth_document(&a).unwrap().stored_bank().unwrap();
        assert_eq!(bank.h1, LiftingBase::Haar.highpass().delayed(4));
    }

    #[test]
    fn invalid_combinations_are_usage_errors() {
        assert!(is_usage(synth_params(&args(
            FamilyArg::Orth,
            Some(InitArg::Zeros)
        ))));
        assert!(is_usage(synth_params(&args(
            FamilyArg::Biorth,
            Some(InitArg::Db2)
        ))));
        assert!(is_usage(synth_params(&args(
            FamilyArg::Lifting,
            Some(InitArg::Db4)
        ))));
        assert!(is_usage(synth_params(&args(FamilyArg::Orth, None))));
        assert!(is_usage(synth_params(&args(
            FamilyArg::Orth,
            Some(InitArg::Explicit)
        ))));
        let mut a = args(FamilyArg::Orth, Some(InitArg::Haar));
        a.steps = Some(2);
        assert!(is_usage(synth_params(&a)));
        let mut a = args(FamilyArg::Orth, Some(InitArg::Random));
        a.base = Some(BaseArg::Haar);
        assert!(is_usage(synth_params(&a)));
        let mut a = args(FamilyArg::Lifting, None);
        a.params = Some(vec![]);
        assert!(is_usage(synth_params(&a)));
    }

    #[test]
    fn db_inits_verify() {
        for init in [InitArg::Db2, InitArg::Db3, InitArg::Db4] {
            let doc = synth_document(&args(FamilyArg::Orth, Some(init))).unwrap();
            let checks = verify_checks(&doc, 42, VERIFY_PR_TOL).unwrap();
            assert!(checks.iter().all(CheckResult::passed), "{checks:?}");
        }
    }

    #[test]
    fn random_init_is_seeded() {
        let mut a = args(FamilyArg::Lifting, Some(InitArg::Random));
        a.steps = Some(8);
        let d1 = synth_document(&a).unwrap();
        assert_eq!(d1, synth_document(&a).unwrap());
        a.seed = 7;
        assert_ne!(d1.params, synth_document(&a).unwrap().params);
        let checks = verify_checks(&d1, 42, VERIFY_PR_TOL).unwrap();
        assert!(checks.iter().all(CheckResult::passed), "{checks:?}");
    }

    #[test]
    fn corrupted_tap_fails_verify() {
        let mut doc = synth_document(&args(FamilyArg::Orth, Some(InitArg::Haar))).unwrap();
        doc.h1.taps[0] += 1e-3;
        let failed: Vec<_> = verify_checks(&doc, 42, VERIFY_PR_TOL)
            .unwrap()
            .into_iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect();
        assert!(failed.contains(&"resynthesis"));
        assert!(failed.contains(&"pr-roundtrip"));
    }

    #[test]
    fn haar_freqz_zero_at_nyquist() {
        let doc = synth_document(&args(FamilyArg::Orth, Some(InitArg::Haar))).unwrap();
        let csv = freqz_csv(&doc, 512).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "omega,mag_h0,mag_h1");
        assert_eq!(lines.len(), 513);
        let last: Vec<f64> = lines[512].split(',').map(|v| v.parse().unwrap()).collect();
        assert!((last[0] - PI).abs() < 1e-15);
        assert!(last[1].abs() <= 1e-12);
        assert!((last[2] - 2f64.sqrt()).abs() < 1e-12);
        assert!(freqz_csv(&doc, 1).is_err());
    }
}
