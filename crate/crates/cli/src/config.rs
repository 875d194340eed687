use std::collections::BTreeMap;
use std::path::PathBuf;

use charpoly_core::Precision;

/// Tolerances that `--tol NAME=VALUE` may override.
pub const TOLERANCE_NAMES: [&str; 2] = ["contour-imag", "mc-imag"];

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision: Precision,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub gnuplot_path: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn tolerance(&self, name: &str) -> Option<f64> {
        debug_assert!(TOLERANCE_NAMES.contains(&name));
        self.tolerances.get(name).copied()
    }
}

pub fn parse_precision(text: &str) -> Result<Precision, String> {
    let bits: u32 = text
        .parse()
        .map_err(|_| format!("{text:?} is not an integer bit count"))?;
    Precision::new(bits).map_err(|e| e.to_string())
}

pub fn parse_tolerance(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {text:?}"))?;
    if !TOLERANCE_NAMES.contains(&name) {
        return Err(format!(
            "unknown tolerance {name:?}; known names: {}",
            TOLERANCE_NAMES.join(", ")
        ));
    }
    let value: f64 = value
        .parse()
        .map_err(|_| format!("tolerance {name} needs a number, got {value:?}"))?;
    if !(value.is_finite() && value >= 0.0) {
        return Err(format!("tolerance {name} must be finite and non-negative"));
    }
    Ok((name.to_string(), value))
}
