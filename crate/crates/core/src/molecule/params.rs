use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::numerics::Grid1D;
use crate::{Error, Result};

/// The seven model parameters, atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeParams {
    /// Reduced nuclear mass.
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub alpha: f64,
    pub r0: f64,
    #[serde(rename = "De")]
    pub de: f64,
    #[serde(rename = "R0")]
    pub r_eq: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

impl MoleculeParams {
    pub const NAMES: [&'static str; 7] = ["M", "Z", "alpha", "r0", "De", "R0", "A"];

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Self::NAMES.iter().zip(self.as_array()) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.z < 1.0 {
            return Err(Error::param(format!("Z must be at least 1, got {}", self.z)));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 7] {
        [self.mass, self.z, self.alpha, self.r0, self.de, self.r_eq, self.a]
    }

    fn set(&mut self, name: &str, v: f64) -> bool {
        let slot = match name {
            "M" => &mut self.mass,
            "Z" => &mut self.z,
            "alpha" => &mut self.alpha,
            "r0" => &mut self.r0,
            "De" => &mut self.de,
            "R0" => &mut self.r_eq,
            "A" => &mut self.a,
            _ => return false,
        };
        *slot = v;
        true
    }
}

/// A parameter file: model parameters, an optional nuclear grid and the
/// leading comment block.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub params: MoleculeParams,
    pub grid_r: Option<Grid1D>,
    pub header: Vec<String>,
}

impl Fixture {
    pub fn new(params: MoleculeParams) -> Self {
        Self { params, grid_r: None, header: Vec::new() }
    }

    /// Parse `name = value` lines; `#` starts a comment.
    ///
    /// Keys: the seven parameter names plus the optional `r_min`, `r_max`, `n_r`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = MoleculeParams { mass: 0.0, z: 0.0, alpha: 0.0, r0: 0.0, de: 0.0, r_eq: 0.0, a: 0.0 };
        let mut seen = [false; 7];
        let (mut r_min, mut r_max, mut n_r) = (None, None, None);
        let mut header = Vec::new();
        let mut in_header = true;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if let Some(c) = trimmed.strip_prefix('#') {
                if in_header {
                    header.push(c.trim().to_string());
                }
                continue;
            }
            let body = trimmed.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            in_header = false;
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected `name = value`, got `{body}`") })?;
            let key = key.trim();
            let value = value.trim();
            let num: f64 = value
                .parse()
                .map_err(|_| Error::Parse { line, message: format!("`{value}` is not a number") })?;
            match key {
                "r_min" => r_min = Some(num),
                "r_max" => r_max = Some(num),
                "n_r" => {
                    if num.fract() != 0.0 || num < 0.0 {
                        return Err(Error::Parse { line, message: "n_r must be a non-negative integer".into() });
                    }
                    n_r = Some(num as usize)
                }
                _ => {
                    let i = MoleculeParams::NAMES
                        .iter()
                        .position(|n| *n == key)
                        .ok_or_else(|| Error::Parse { line, message: format!("unknown key `{key}`") })?;
                    if seen[i] {
                        return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
                    }
                    seen[i] = true;
                    p.set(key, num);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Parse { line: 0, message: format!("missing key `{}`", MoleculeParams::NAMES[i]) });
        }
        p.validate()?;
        let grid_r = match (r_min, r_max, n_r) {
            (None, None, None) => None,
            (Some(lo), Some(hi), Some(n)) => Some(Grid1D::new(lo, hi, n)?),
            _ => return Err(Error::Parse { line: 0, message: "r_min, r_max and n_r must be given together".into() }),
        };
        Ok(Self { params: p, grid_r, header })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for h in &self.header {
            let _ = writeln!(s, "# {h}");
        }
        for (name, v) in MoleculeParams::NAMES.iter().zip(self.params.as_array()) {
            let _ = writeln!(s, "{name} = {v:?}");
        }
        if let Some(g) = &self.grid_r {
            let _ = writeln!(s, "r_min = {:?}\nr_max = {:?}\nn_r = {}", g.min(), g.max(), g.len());
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Built-in molecule with a large displacement and fast vibration.
    pub fn anthracene_like() -> Self {
        Self::parse(include_str!("../../fixtures/anthracene_like.params")).expect("bundled fixture parses")
    }

    /// Built-in molecule with a small displacement and slow vibration.
    pub fn r6g_like() -> Self {
        Self::parse(include_str!("../../fixtures/r6g_like.params")).expect("bundled fixture parses")
    }

    /// Look up a built-in fixture by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "anthracene_like" | "anthracene-like" | "anthracene" => Ok(Self::anthracene_like()),
            "r6g_like" | "r6g-like" | "r6g" => Ok(Self::r6g_like()),
            other => Err(Error::param(format!("unknown fixture '{other}'"))),
        }
    }
}
