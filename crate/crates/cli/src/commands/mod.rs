//! Subcommand implementations. Each returns its artifacts in memory; the
//! caller writes them only when the whole run succeeded.

mod analyze;
mod oscillator;
mod phi;
mod solve_const;
mod vein;

use crate::config::{Command, OscillatorAction, Settings, VeinAction};
use crate::error::CliResult;
use crate::output::Artifacts;

pub use analyze::analyze;
pub use oscillator::portrait;
pub use phi::phi;
pub use solve_const::solve_const;
pub use vein::{vein_check, vein_solve};

/// Result of a subcommand.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Artifacts,
    /// Human-readable summary for stdout.
    pub summary: Vec<String>,
    /// False when a check or verification did not pass.
    pub success: bool,
}

impl Outcome {
    fn ok(artifacts: Artifacts, summary: Vec<String>) -> Self {
        Outcome { artifacts, summary, success: true }
    }
}

pub fn run(command: Command, s: &Settings) -> CliResult<Outcome> {
    match command {
        Command::Analyze => analyze(s),
        Command::SolveConst => solve_const(s),
        Command::Phi => phi(s),
        Command::Vein { action: VeinAction::Solve } => vein_solve(s),
        Command::Vein { action: VeinAction::Check } => vein_check(s),
        Command::Oscillator { action: OscillatorAction::Portrait } => portrait(s),
        Command::Verify => verify(s),
    }
}

fn verify(s: &Settings) -> CliResult<Outcome> {
    let results = crate::acceptance::run_all();
    let mut artifacts = Artifacts::default();
    if s.out.is_some() {
        artifacts.json("verify.json", &crate::acceptance::Report::new(&results))?;
    }
    let summary = results.iter().map(|r| r.line()).collect();
    Ok(Outcome { artifacts, summary, success: results.iter().all(|r| r.passed) })
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

/// Points spaced `h` apart from `lo`, ending at `hi` (spacing adjusted).
pub fn step_grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round().max(1.0) as usize;
    linspace(lo, hi, n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_both_ends() {
        let g = linspace(-1.0, 2.0, 4);
        assert_eq!(g, vec![-1.0, 0.0, 1.0, 2.0]);
        let s = step_grid(0.0, 0.3, 0.1);
        assert_eq!(s.len(), 4);
        assert_eq!(*s.last().unwrap(), 0.3);
        assert_eq!(linspace(1.0, 3.0, 1), vec![2.0]);
    }
}
