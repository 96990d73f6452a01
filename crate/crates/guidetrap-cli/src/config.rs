//! Declarative run configuration: a TOML file, overridden field by field by command-line flags.

use anyhow::{bail, Context, Result};
use guidetrap::contour::{ContourTable, Preset};
use guidetrap::{ModeFamily, SolveOptions};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    A,
    Eps,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<SweepParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Explicit parameter values; replaces from/to/steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldTable {
    /// [lo, hi, n]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<(f64, f64, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<(f64, f64, usize)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Include boundary traces in JSON results.
    #[serde(default)]
    pub traces: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub contour: ContourTable,
    #[serde(default)]
    pub geometry: GeometryTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ModeFamily>,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub sweep: SweepTable,
    #[serde(default)]
    pub field: FieldTable,
    #[serde(default)]
    pub output: OutputTable,
}

/// Flags shared by every computing subcommand. Each one overrides the matching config entry.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Circle radius (circle preset).
    #[arg(long)]
    pub r0: Option<f64>,
    /// Perturbation amplitude (perturbed_circle preset).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Strip half-width.
    #[arg(long)]
    pub b: Option<f64>,
    /// Vertical offset of the obstacle centre.
    #[arg(long)]
    pub a: Option<f64>,
    /// Obstacle scale.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Contour nodes.
    #[arg(long)]
    pub n_nodes: Option<usize>,
    /// Fixed-point tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PresetArg {
    Circle,
    PerturbedCircle,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn apply(&mut self, args: &CommonArgs) {
        if let Some(p) = args.preset {
            // A preset on the command line replaces whatever contour the file described.
            self.contour = ContourTable {
                preset: Some(match p {
                    PresetArg::Circle => Preset::Circle,
                    PresetArg::PerturbedCircle => Preset::PerturbedCircle,
                }),
                ..Default::default()
            };
        }
        if args.r0.is_some() {
            self.contour.r0 = args.r0;
        }
        if args.beta.is_some() {
            self.contour.beta = args.beta;
        }
        let g = &mut self.geometry;
        g.b = args.b.or(g.b);
        g.a = args.a.or(g.a);
        g.eps = args.eps.or(g.eps);
        if let Some(n) = args.n_nodes {
            self.solver.n_nodes = n;
        }
        if let Some(t) = args.tol {
            self.solver.tol = t;
        }
    }

    /// Fills defaults that the provenance block must show explicitly.
    pub fn resolve_defaults(&mut self) {
        self.geometry.b.get_or_insert(1.0);
    }

    pub fn b(&self) -> f64 {
        self.geometry.b.unwrap_or(1.0)
    }

    pub fn require_a(&self) -> Result<f64> {
        self.geometry.a.context("missing geometry.a (use --a or [geometry] a = ...)")
    }

    pub fn require_eps(&self) -> Result<f64> {
        self.geometry.eps.context("missing geometry.eps (use --eps or [geometry] eps = ...)")
    }

    pub fn sweep_values(&self) -> Result<Vec<f64>> {
        let s = &self.sweep;
        if let Some(v) = &s.values {
            if v.is_empty() {
                bail!("sweep.values is empty");
            }
            return Ok(v.clone());
        }
        match (s.from, s.to, s.steps) {
            (Some(lo), Some(hi), Some(n)) if n >= 2 => {
                Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
            }
            (Some(lo), _, Some(1)) => Ok(vec![lo]),
            _ => bail!("sweep needs `values` or `from`, `to` and `steps`"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut cfg = RunConfig::from_toml(
            "[contour]\npreset = \"circle\"\nr0 = 2.0\n[geometry]\na = 0.5\neps = 0.01\n[solver]\nn_nodes = 64\n",
        )
        .unwrap();
        cfg.apply(&CommonArgs { eps: Some(0.02), n_nodes: Some(96), ..Default::default() });
        cfg.resolve_defaults();
        assert_eq!(cfg.geometry, GeometryTable { b: Some(1.0), a: Some(0.5), eps: Some(0.02) });
        assert_eq!(cfg.solver.n_nodes, 96);
        assert_eq!(cfg.contour.r0, Some(2.0));
    }

    #[test]
    fn unknown_fields_report_their_location() {
        let err = RunConfig::from_toml("[geometry]\nb = 1.0\nc = 2.0\n").unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains('c') && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn sweep_grid() {
        let cfg = RunConfig {
            sweep: SweepTable { from: Some(0.5), to: Some(0.7), steps: Some(3), ..Default::default() },
            ..Default::default()
        };
        let v = cfg.sweep_values().unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 0.6).abs() < 1e-15);
    }
}
