use std::path::{Path, PathBuf};

use polaritonic::numerics::Grid1D;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Calibrate,
    Bare,
    Absorb,
    Pes1,
    Pes2,
    Nonbo,
    UscScan,
    ScalingReport,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Calibrate => "calibrate",
            Task::Bare => "bare",
            Task::Absorb => "absorb",
            Task::Pes1 => "pes1",
            Task::Pes2 => "pes2",
            Task::Nonbo => "nonbo",
            Task::UscScan => "usc-scan",
            Task::ScalingReport => "scaling-report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaMode {
    /// Maximum of the bare absorption spectrum (zero detuning).
    Auto,
    /// `E_e - E_g` at the ground-state equilibrium.
    Vertical,
}

/// Cavity frequency: a mode name or a value in hartree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaC {
    Hartree(f64),
    Mode(OmegaMode),
}

/// One coupling or a list, hartree-based atomic units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Couplings {
    One(f64),
    Many(Vec<f64>),
}

impl Couplings {
    pub fn list(&self) -> Vec<f64> {
        match self {
            Couplings::One(g) => vec![*g],
            Couplings::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityConfig {
    pub omega_c: OmegaC,
    pub g: Couplings,
    /// Fock cutoff for single-molecule solves.
    pub n_max: usize,
    /// Fock cutoff for the exact two-molecule solve.
    pub two_mol_n_max: usize,
    /// Fock cutoff of the per-geometry two-molecule blocks (1 gives the 4×4 blocks).
    pub pair_n_max: usize,
}

impl Default for CavityConfig {
    fn default() -> Self {
        Self { omega_c: OmegaC::Mode(OmegaMode::Auto), g: Couplings::Many(vec![0.004]), n_max: 4, two_mol_n_max: 3, pair_n_max: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid1D, CliError> {
        Grid1D::new(self.min, self.max, self.points).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridsConfig {
    pub x: GridSpec,
    /// Nuclear grid; the fixture's own grid when absent.
    pub r: Option<GridSpec>,
    /// Points per axis of the two-molecule lattice.
    pub lattice_points: usize,
}

impl Default for GridsConfig {
    fn default() -> Self {
        Self { x: GridSpec { min: -15.0, max: 15.0, points: 501 }, r: None, lattice_points: 61 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisConfig {
    pub electronic_states: usize,
    pub n_ground: usize,
    pub n_excited: usize,
    /// Vibrational levels per surface in BOA spectra.
    pub boa_levels: usize,
    /// Bare states of each character per molecule in the exact two-molecule solve.
    pub two_mol_states: usize,
    /// 1D vibrational functions per axis of the two-molecule BOA basis.
    pub product_levels: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { electronic_states: 4, n_ground: 30, n_excited: 30, boa_levels: 24, two_mol_states: 12, product_levels: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub epsilon_ev: f64,
    pub half_span_ev: f64,
    pub points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { epsilon_ev: 0.015, half_span_ev: 1.5, points: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Pes2Config {
    /// Fit the harmonic correlation model to LP, DS and UP for every `g`.
    pub fit: bool,
}

impl Default for Pes2Config {
    fn default() -> Self {
        Self { fit: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    /// Name of the written fixture file (without extension).
    #[serde(default = "default_calibrated_name")]
    pub name: String,
    pub omega_vib_ev: f64,
    pub delta_r: f64,
    pub transition_ev: f64,
    pub dipole: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iterations")]
    pub max_iterations: u64,
}

fn default_calibrated_name() -> String {
    "calibrated".into()
}

fn default_restarts() -> usize {
    1
}

fn default_iterations() -> u64 {
    400
}

fn default_fixtures() -> Vec<String> {
    vec!["anthracene_like".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub task: Option<Task>,
    /// Built-in fixture names or paths to `.params` files.
    #[serde(default = "default_fixtures")]
    pub fixtures: Vec<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cavity: CavityConfig,
    #[serde(default)]
    pub grids: GridsConfig,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub pes2: Pes2Config,
    #[serde(default)]
    pub calibrate: Option<CalibrateConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config parses")
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.fixtures.is_empty() {
            return bad("at least one fixture is required".into());
        }
        let gs = self.cavity.g.list();
        if gs.is_empty() || gs.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return bad(format!("couplings must be finite and nonnegative, got {gs:?}"));
        }
        if let OmegaC::Hartree(w) = self.cavity.omega_c {
            if !(w.is_finite() && w > 0.0) {
                return bad(format!("omega_c must be positive, got {w}"));
            }
        }
        if self.cavity.n_max == 0 || self.cavity.two_mol_n_max == 0 || self.cavity.pair_n_max == 0 {
            return bad("Fock cutoffs must be at least 1".into());
        }
        if self.basis.electronic_states < 2 {
            return bad("electronic_states must be at least 2".into());
        }
        if self.spectrum.epsilon_ev <= 0.0 || self.spectrum.half_span_ev <= 0.0 || self.spectrum.points < 3 {
            return bad("spectrum needs positive width and span and at least 3 points".into());
        }
        self.grids.x.grid()?;
        if let Some(r) = &self.grids.r {
            r.grid()?;
        }
        if self.grids.lattice_points < 5 {
            return bad("lattice_points must be at least 5".into());
        }
        Ok(())
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.cavity.g.list()
    }
}
