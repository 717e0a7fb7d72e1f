//! Declarative benchmark scenarios: a versioned JSON document describing the
//! sweep grid and per-solver configuration overrides.

use std::collections::BTreeMap;
use std::path::Path;

use csrec::imageio::{phantom, read_pgm, GrayImage, PhantomKind};
use csrec::solvers::{SolverConfig, TvMode};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Solver selector used in scenario files and CSV rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Omp,
    Gpsr,
    GpsrBb,
    Spgl1,
    NestaL1,
    NestaTv,
    Tval3,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::Omp,
        SolverKind::Gpsr,
        SolverKind::GpsrBb,
        SolverKind::Spgl1,
        SolverKind::NestaL1,
        SolverKind::NestaTv,
        SolverKind::Tval3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Omp => "omp",
            SolverKind::Gpsr => "gpsr",
            SolverKind::GpsrBb => "gpsr_bb",
            SolverKind::Spgl1 => "spgl1",
            SolverKind::NestaL1 => "nesta_l1",
            SolverKind::NestaTv => "nesta_tv",
            SolverKind::Tval3 => "tval3",
        }
    }

    pub fn parse(name: &str) -> Result<SolverKind> {
        SolverKind::ALL
            .into_iter()
            .find(|kind| kind.as_str() == name)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown solver {name:?}; expected one of omp, gpsr, gpsr_bb, spgl1, nesta_l1, nesta_tv, tval3"
                ))
            })
    }

    /// Solvers that reconstruct an image's gradient structure and therefore
    /// need to run in the pixel domain.
    pub fn is_tv(&self) -> bool {
        matches!(self, SolverKind::NestaTv | SolverKind::Tval3)
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Synthetic image family names accepted in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomName {
    NestedRectangles,
    GradientRamp,
    RandomSparseSpikes,
}

impl PhantomName {
    pub fn kind(&self) -> PhantomKind {
        match self {
            PhantomName::NestedRectangles => PhantomKind::NestedRectangles,
            PhantomName::GradientRamp => PhantomKind::GradientRamp,
            PhantomName::RandomSparseSpikes => PhantomKind::RandomSparseSpikes,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PhantomName::NestedRectangles => "nested_rectangles",
            PhantomName::GradientRamp => "gradient_ramp",
            PhantomName::RandomSparseSpikes => "random_sparse_spikes",
        }
    }
}

/// One image in the sweep: either a synthetic phantom or a PGM file on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImageSource {
    Phantom {
        phantom: PhantomName,
        size: usize,
        #[serde(default)]
        seed: u64,
    },
    Path { path: String },
}

impl ImageSource {
    /// Stable identifier used in result rows and file names.
    pub fn id(&self) -> String {
        match self {
            ImageSource::Phantom {
                phantom,
                size,
                seed,
            } => format!("{}_{size}x{size}_seed{seed}", phantom.as_str()),
            ImageSource::Path { path } => path.clone(),
        }
    }

    /// Materializes the image. Relative paths resolve against `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<GrayImage> {
        match self {
            ImageSource::Phantom {
                phantom: name,
                size,
                seed,
            } => phantom(name.kind(), *size, *seed)
                .map_err(|e| HarnessError::Config(format!("phantom {}: {e}", self.id()))),
            ImageSource::Path { path } => {
                let resolved = base_dir.join(path);
                let bytes = std::fs::read(&resolved).map_err(|e| {
                    HarnessError::Io(format!("reading {}: {e}", resolved.display()))
                })?;
                let (image, _maxval) = read_pgm(&bytes)
                    .map_err(|e| HarnessError::Io(format!("decoding {}: {e}", resolved.display())))?;
                Ok(image)
            }
        }
    }
}

/// Optional sparsifying transform applied before sensing. The DCT pipeline
/// is a simulation-only device: it sparsifies in software before measuring,
/// which no physical acquisition front-end can do, but it lets smooth images
/// exercise the L1 solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsifier {
    #[default]
    None,
    Dct,
}

/// Partial [`SolverConfig`]: only the fields present in the document are
/// overridden, everything else keeps its default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverride {
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub lambda: Option<f64>,
    pub tau: Option<f64>,
    pub mu_smooth: Option<f64>,
    pub mu_penalty: Option<f64>,
    pub continuation_steps: Option<usize>,
    /// "anisotropic" or "isotropic".
    pub tv_mode: Option<String>,
    pub nonmonotone_window: Option<usize>,
    pub debias: Option<bool>,
}

impl ConfigOverride {
    fn apply(&self, cfg: &mut SolverConfig) -> Result<()> {
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = Some(v);
        }
        if let Some(v) = self.tau {
            cfg.tau = Some(v);
        }
        if let Some(v) = self.mu_smooth {
            cfg.mu_smooth = v;
        }
        if let Some(v) = self.mu_penalty {
            cfg.mu_penalty = v;
        }
        if let Some(v) = self.continuation_steps {
            cfg.continuation_steps = v;
        }
        if let Some(mode) = &self.tv_mode {
            cfg.tv_mode = match mode.as_str() {
                "anisotropic" => TvMode::Anisotropic,
                "isotropic" => TvMode::Isotropic,
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown tv_mode {other:?}; expected \"anisotropic\" or \"isotropic\""
                    )))
                }
            };
        }
        if let Some(v) = self.nonmonotone_window {
            cfg.nonmonotone_window = v;
        }
        if let Some(v) = self.debias {
            cfg.debias = v;
        }
        Ok(())
    }
}

/// The full sweep description read from a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Schema version; this build understands version 1.
    pub version: u32,
    pub images: Vec<ImageSource>,
    pub solvers: Vec<SolverKind>,
    /// Measurement ratios m/n in (0, 1]; m = round(ratio * n) on the padded
    /// pixel count.
    pub ratios: Vec<f64>,
    /// SNR levels in dB; `null` is the no-noise sentinel.
    #[serde(default = "default_snrs")]
    pub snrs_db: Vec<Option<f64>>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub sparsifier: Sparsifier,
    /// Configuration overrides applied to every solver.
    #[serde(default)]
    pub config: ConfigOverride,
    /// Per-solver configuration overrides, applied after `config`.
    #[serde(default)]
    pub overrides: BTreeMap<SolverKind, ConfigOverride>,
}

fn default_snrs() -> Vec<Option<f64>> {
    vec![None]
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<ScenarioSpec> {
        let spec: ScenarioSpec = serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("scenario parse: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported scenario version {}; this build reads version {SCHEMA_VERSION}",
                self.version
            )));
        }
        if self.images.is_empty() {
            return Err(HarnessError::Config("scenario lists no images".into()));
        }
        if self.solvers.is_empty() {
            return Err(HarnessError::Config("scenario lists no solvers".into()));
        }
        if self.ratios.is_empty() {
            return Err(HarnessError::Config("scenario lists no ratios".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("scenario lists no seeds".into()));
        }
        if self.snrs_db.is_empty() {
            return Err(HarnessError::Config("scenario lists no noise levels".into()));
        }
        for &ratio in &self.ratios {
            if !(ratio.is_finite() && ratio > 0.0 && ratio <= 1.0) {
                return Err(HarnessError::Config(format!(
                    "ratio {ratio} outside (0, 1]"
                )));
            }
        }
        for snr in self.snrs_db.iter().flatten() {
            if snr.is_nan() {
                return Err(HarnessError::Config("snr_db must not be NaN".into()));
            }
        }
        for image in &self.images {
            if let ImageSource::Phantom { size, .. } = image {
                if *size == 0 || !size.is_power_of_two() {
                    return Err(HarnessError::Config(format!(
                        "phantom size must be a power of two, got {size}"
                    )));
                }
            }
        }
        if self.sparsifier == Sparsifier::Dct {
            if let Some(tv) = self.solvers.iter().find(|s| s.is_tv()) {
                return Err(HarnessError::Config(format!(
                    "sparsifier \"dct\" runs solvers in the DCT coefficient domain, where the \
                     total-variation objective of {tv} is meaningless; drop the sparsifier or \
                     the TV solvers"
                )));
            }
        }
        Ok(())
    }

    /// Resolved solver configuration for one sweep cell: library defaults,
    /// then the harness debias default for GPSR, then the scenario-wide
    /// override, then the per-solver override.
    pub fn config_for(&self, solver: SolverKind) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::default();
        // GPSR's shrinkage bias is systematic; benchmark runs compare the
        // debiased variant unless a scenario explicitly opts out.
        if matches!(solver, SolverKind::Gpsr | SolverKind::GpsrBb) {
            cfg.debias = true;
        }
        self.config.apply(&mut cfg)?;
        if let Some(per_solver) = self.overrides.get(&solver) {
            per_solver.apply(&mut cfg)?;
        }
        cfg.validate()
            .map_err(|e| HarnessError::Config(format!("{solver}: {e}")))?;
        Ok(cfg)
    }
}
