//! Command line and config file. Every setting may come from a flag or from
//! the TOML file given by `--config`; flags win.

use crate::error::{CliError, CliResult};
use crate::output::Format;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "abelkit", version, about = "Abel equations, Vein's solutions and oscillator: data and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub settings: Settings,
    /// TOML file with default settings (keys as the long flags, `-` → `_`).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Invariants of an equation given by coefficient expressions.
    Analyze,
    /// Constant-coefficient equation through an initial point.
    SolveConst,
    /// Third-order hyperbolic functions on an x-window.
    Phi,
    /// Vein's equation.
    Vein {
        #[command(subcommand)]
        action: VeinAction,
    },
    /// Vein's oscillator.
    Oscillator {
        #[command(subcommand)]
        action: OscillatorAction,
    },
    /// Run the acceptance suite; exit status 0 iff every criterion passes.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum VeinAction {
    /// Explicit solution on one branch, with its residual.
    Solve,
    /// Identity and invariant checks.
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum OscillatorAction {
    /// Trajectories, isoclines, coefficient curves and fixed points.
    Portrait,
}

macro_rules! settings {
    ($( $(#[$doc:meta])* $field:ident : $ty:ty = $long:literal ),* $(,)?) => {
        /// Settings shared by all subcommands; all optional until resolved.
        #[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct Settings {
            $(
                $(#[$doc])*
                #[arg(long = $long, global = true, allow_hyphen_values = true)]
                #[serde(rename = $long, default)]
                pub $field: Option<$ty>,
            )*
        }

        impl Settings {
            /// Field-wise `self` over `fallback`.
            pub fn over(self, fallback: Settings) -> Settings {
                Settings { $( $field: self.$field.or(fallback.$field), )* }
            }
        }
    };
}

settings! {
    /// Vein parameter a.
    a: f64 = "a",
    /// Vein parameter b.
    b: f64 = "b",
    /// Constant of the t-functions.
    c: f64 = "c",
    /// Constant coefficient of y⁰.
    a0: f64 = "A0",
    /// Constant coefficient of y¹.
    a1: f64 = "A1",
    /// Constant coefficient of y².
    a2: f64 = "A2",
    /// Constant coefficient of y³.
    a3: f64 = "A3",
    /// Free parameter k available to expressions.
    k: f64 = "k",
    /// Coefficient f0 as an expression in x.
    f0: String = "f0",
    /// Coefficient f1 as an expression in x.
    f1: String = "f1",
    /// Coefficient f2 as an expression in x.
    f2: String = "f2",
    /// Coefficient f3 as an expression in x.
    f3: String = "f3",
    /// Anchor of the antiderivatives.
    anchor: f64 = "anchor",
    /// Value of ω at the anchor, as an expression evaluated there.
    scale: String = "scale",
    /// Initial abscissa.
    x0: f64 = "x0",
    /// Initial value.
    y0: f64 = "y0",
    x_min: f64 = "x-min",
    x_max: f64 = "x-max",
    v_min: f64 = "v-min",
    v_max: f64 = "v-max",
    s_min: f64 = "s-min",
    s_max: f64 = "s-max",
    /// Integration length of each portrait trajectory.
    zeta_max: f64 = "zeta-max",
    /// Number of samples across the x-window.
    samples: usize = "samples",
    /// Seed grid, MxN.
    grid: String = "grid",
    /// Branch index (0-based, in increasing s).
    branch: usize = "branch",
    /// Cyclic family 1, 2 or 3.
    family: u8 = "family",
    /// Tolerance for pass/fail decisions.
    tol: f64 = "tol",
    /// Output directory.
    out: PathBuf = "out",
    /// Table format.
    format: Format = "format",
}

impl Settings {
    pub fn load_file(path: &Path) -> CliResult<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Flags over the config file (if any).
    pub fn resolve(flags: Settings, file: Option<&Path>) -> CliResult<Settings> {
        Ok(match file {
            Some(p) => flags.over(Settings::load_file(p)?),
            None => flags,
        })
    }

    /// Named parameters visible to expressions.
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("k", self.k)] {
            if let Some(v) = v {
                m.insert(name.to_string(), v);
            }
        }
        for (name, v) in [("A0", self.a0), ("A1", self.a1), ("A2", self.a2), ("A3", self.a3)] {
            if let Some(v) = v {
                m.insert(name.to_string(), v);
            }
        }
        m
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> CliResult<T> {
        value.clone().ok_or_else(|| CliError::config(format!("--{name} is required")))
    }

    pub fn tol_or(&self, default: f64) -> CliResult<f64> {
        let t = self.tol.unwrap_or(default);
        if t > 0.0 && t.is_finite() {
            Ok(t)
        } else {
            Err(CliError::config(format!("--tol must be positive, got {t}")))
        }
    }

    pub fn samples_or(&self, default: usize) -> CliResult<usize> {
        let n = self.samples.unwrap_or(default);
        if n >= 2 {
            Ok(n)
        } else {
            Err(CliError::config(format!("--samples must be at least 2, got {n}")))
        }
    }

    pub fn x_window_or(&self, default: (f64, f64)) -> CliResult<(f64, f64)> {
        window(self.x_min.unwrap_or(default.0), self.x_max.unwrap_or(default.1), "x")
    }

    pub fn v_window_or(&self, default: (f64, f64)) -> CliResult<(f64, f64)> {
        window(self.v_min.unwrap_or(default.0), self.v_max.unwrap_or(default.1), "v")
    }

    pub fn s_window_or(&self, default: (f64, f64)) -> CliResult<(f64, f64)> {
        window(self.s_min.unwrap_or(default.0), self.s_max.unwrap_or(default.1), "s")
    }

    pub fn grid_or(&self, default: (usize, usize)) -> CliResult<(usize, usize)> {
        match &self.grid {
            None => Ok(default),
            Some(g) => parse_grid(g),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("abelkit-out"))
    }

    pub fn table_format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

fn window(lo: f64, hi: f64, name: &str) -> CliResult<(f64, f64)> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok((lo, hi))
    } else {
        Err(CliError::config(format!("{name}-window [{lo}, {hi}] is empty or not finite")))
    }
}

/// `"MxN"` with both factors positive.
pub fn parse_grid(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::config(format!("--grid expects MxN with positive integers, got `{text}`"));
    let (m, n) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if m == 0 || n == 0 {
        return Err(bad());
    }
    Ok((m, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "a = 2.0\nb = -1.0\nA3 = 1.0\ngrid = \"4x3\"\nformat = \"json\"\n").unwrap();
        let cli = Cli::try_parse_from(["abelkit", "phi", "--a", "1.0", "--config", path.to_str().unwrap()]).unwrap();
        let s = Settings::resolve(cli.settings, cli.config.as_deref()).unwrap();
        assert_eq!(s.a, Some(1.0));
        assert_eq!(s.b, Some(-1.0));
        assert_eq!(s.a3, Some(1.0));
        assert_eq!(s.grid_or((1, 1)).unwrap(), (4, 3));
        assert_eq!(s.table_format(), Format::Json);
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "alpha = 1.0\n").unwrap();
        assert!(matches!(Settings::load_file(&path), Err(CliError::Config(_))));
    }

    #[test]
    fn validation() {
        let s = Settings { samples: Some(1), tol: Some(0.0), x_min: Some(1.0), x_max: Some(1.0), ..Default::default() };
        assert!(s.samples_or(10).is_err());
        assert!(s.tol_or(1e-6).is_err());
        assert!(s.x_window_or((0.0, 1.0)).is_err());
        assert_eq!(parse_grid("5x7").unwrap(), (5, 7));
        assert!(parse_grid("5x0").is_err());
        assert!(parse_grid("five").is_err());
    }

    #[test]
    fn subcommands_parse() {
        let cli = Cli::try_parse_from(["abelkit", "vein", "solve", "--a", "1", "--b=-2", "--family", "2"]).unwrap();
        assert_eq!(cli.command, Command::Vein { action: VeinAction::Solve });
        assert_eq!(cli.settings.b, Some(-2.0));
        let cli = Cli::try_parse_from(["abelkit", "solve-const", "--A0", "-1.5", "--A3", "1"]).unwrap();
        assert_eq!(cli.settings.a0, Some(-1.5));
        assert_eq!(cli.settings.a3, Some(1.0));
        assert!(Cli::try_parse_from(["abelkit", "oscillator", "portrait", "--grid", "3x3"]).is_ok());
    }
}
