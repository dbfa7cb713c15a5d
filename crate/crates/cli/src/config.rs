//! Run configuration: a TOML file with sections `[lattice]`, `[model]`,
//! `[elliptic]`, `[numerics]`, `[mc]` and `[output]`. Every key is optional
//! and has the default listed here; unknown keys and sections are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub model: ModelSection,
    pub elliptic: EllipticSection,
    pub numerics: NumericsSection,
    pub mc: McSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    /// Dimension. Default 1.
    pub d: usize,
    /// Sites per axis. Default 8.
    #[serde(rename = "L")]
    pub l: usize,
    /// Spacing. Default 1.
    pub a: f64,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self { d: 1, l: 8, a: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Bare mass squared. Default 1.
    pub m2: f64,
    /// Quartic coupling (`lambda phi^4 / 24`). Default 0.
    pub lambda: f64,
    /// Coincident propagator entering `M^2 = m^2 + (lambda/2) G_nn` for the
    /// Lamé spectrum. Default 0.
    pub gnn: f64,
    /// Constant background used for the C3 scan. Default 1.
    pub phi: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            m2: 1.0,
            lambda: 0.0,
            gnn: 0.0,
            phi: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EllipticSection {
    /// Parameter `m = k^2`, in `[-1, 1)`. Default 0.5.
    pub m: f64,
    /// Wave amplitude. Default 1 (ignored by `classical-verify` when `lambda != 0`,
    /// where the continuum constraint fixes it).
    pub b: f64,
    /// Background momentum for `lame-spectrum`; one component per dimension.
    /// Default: eight sites per period of `sn^2` along axis 0.
    pub p0: Option<Vec<f64>>,
    /// Phase. Default 0.
    pub theta: f64,
}

impl Default for EllipticSection {
    fn default() -> Self {
        Self {
            m: 0.5,
            b: 1.0,
            p0: None,
            theta: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    /// Gap-equation tolerance. Default 1e-12.
    pub tol: f64,
    /// Potential harmonics `R`. Default 40.
    pub harmonics: usize,
    /// Band half-width `N`. Default `3R`.
    pub band: Option<usize>,
    /// Spacings for `classical-verify`. Default [0.1, 0.05, 0.025].
    pub spacings: Vec<f64>,
    /// Box length for `classical-verify`. Default 2.
    pub box_length: f64,
    /// Wave periods in the box for `classical-verify`. Default 1.
    pub windings: usize,
    /// Extents `L` for `cumulants`. Default [2, 4, 6, 8].
    pub extents: Vec<usize>,
    /// Momentum samples for `lame-spectrum`. Default 48.
    pub samples: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            harmonics: 40,
            band: None,
            spacings: vec![0.1, 0.05, 0.025],
            box_length: 2.0,
            windings: 1,
            extents: vec![2, 4, 6, 8],
            samples: 48,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    /// Total sweeps per chain, thermalization included. Default 100000.
    pub sweeps: usize,
    /// Default 5000.
    pub thermalization: usize,
    /// Initial proposal half-width. Default 1.
    pub proposal_width: f64,
    /// Default 1.
    pub seed: u64,
    /// Independent chains. Default 1.
    pub chains: usize,
    /// Also write the per-sweep series as CSV. Default false.
    pub dump_series: bool,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            sweeps: 100_000,
            thermalization: 5_000,
            proposal_width: 1.0,
            seed: 1,
            chains: 1,
            dump_series: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Directory for `report.json` and CSV tables. Default `out`.
    pub dir: PathBuf,
    /// Write CSV tables. Default true.
    pub csv: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: true,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn band(&self) -> usize {
        self.numerics.band.unwrap_or(3 * self.numerics.harmonics)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let finite = [
            ("lattice.a", self.lattice.a),
            ("model.m2", self.model.m2),
            ("model.lambda", self.model.lambda),
            ("model.gnn", self.model.gnn),
            ("model.phi", self.model.phi),
            ("elliptic.m", self.elliptic.m),
            ("elliptic.b", self.elliptic.b),
            ("elliptic.theta", self.elliptic.theta),
            ("numerics.tol", self.numerics.tol),
            ("numerics.box_length", self.numerics.box_length),
            ("mc.proposal_width", self.mc.proposal_width),
        ];
        if let Some((key, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            bail!("{key} must be finite");
        }
        if self.lattice.d == 0 || self.lattice.l == 0 || self.lattice.a <= 0.0 {
            bail!("lattice needs d >= 1, L >= 1 and a > 0");
        }
        if self.numerics.tol <= 0.0 {
            bail!("numerics.tol must be positive");
        }
        if self.numerics.harmonics == 0 {
            bail!("numerics.harmonics must be at least 1");
        }
        if self
            .numerics
            .spacings
            .iter()
            .any(|&a| !a.is_finite() || a <= 0.0)
        {
            bail!("numerics.spacings must be positive");
        }
        if self.numerics.extents.contains(&0) {
            bail!("numerics.extents must be positive");
        }
        if self.mc.sweeps <= self.mc.thermalization {
            bail!("mc.sweeps must exceed mc.thermalization");
        }
        if self.mc.chains == 0 {
            bail!("mc.chains must be at least 1");
        }
        if self.mc.proposal_width <= 0.0 {
            bail!("mc.proposal_width must be positive");
        }
        if let Some(p0) = &self.elliptic.p0 {
            if p0.len() != self.lattice.d {
                bail!(
                    "elliptic.p0 has {} components for d = {}",
                    p0.len(),
                    self.lattice.d
                );
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.band(), 120);
    }

    #[test]
    fn sections_and_dotted_keys() {
        let cfg =
            RunConfig::from_toml("lattice.d = 2\nlattice.L = 4\n[model]\nlambda = 0.5\n").unwrap();
        assert_eq!((cfg.lattice.d, cfg.lattice.l), (2, 4));
        assert_eq!(cfg.model.lambda, 0.5);
    }

    #[test]
    fn strict_parsing() {
        assert!(RunConfig::from_toml("[model]\nlamda = 1.0\n").is_err());
        assert!(RunConfig::from_toml("[modle]\nlambda = 1.0\n").is_err());
        assert!(RunConfig::from_toml("lattice.a = -1.0\n").is_err());
        assert!(RunConfig::from_toml("lattice.d = 2\nelliptic.p0 = [1.0]\n").is_err());
    }
}
