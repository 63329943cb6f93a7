//! Resolved run description: defaults, optional JSON config file, CLI
//! flags; flags override the file, the file overrides defaults. Every
//! resolved field is echoed into output metadata.

use rischan::channelmodels::Scheme;
use rischan::metrics::ModulationParams;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSel {
    Dh,
    T,
    Both,
}

impl SchemeSel {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeSel::Dh => vec![Scheme::Dh],
            SchemeSel::T => vec![Scheme::T],
            SchemeSel::Both => vec![Scheme::Dh, Scheme::T],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSel {
    Closed,
    Quad,
    Both,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scheme: SchemeSel,
    pub n_list: Vec<u32>,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub gamma_th_db: f64,
    pub modulation: ModulationParams,
    pub modulation_label: String,
    pub samples: u64,
    pub seed: u64,
    pub substreams: u32,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub method: MethodSel,
    pub tol_scale: f64,
    pub criteria: Option<Vec<u32>>,
    /// Reconstructed command line for metadata headers.
    pub command_line: String,
}

impl RunSpec {
    pub fn grid_db(&self) -> Vec<f64> {
        let mut grid = Vec::new();
        let mut x = self.snr_start_db;
        // half-step slack absorbs accumulated rounding at the stop edge
        while x <= self.snr_stop_db + 0.5 * self.snr_step_db {
            grid.push(x);
            x += self.snr_step_db;
        }
        grid
    }

    pub fn gamma_th_linear(&self) -> f64 {
        rischan::db_to_lin(self.gamma_th_db)
    }

    /// Metadata lines embedded in every output file.
    pub fn metadata(&self, command: &str) -> Vec<(String, String)> {
        vec![
            ("command".into(), command.into()),
            ("command_line".into(), self.command_line.clone()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            (
                "scheme".into(),
                match self.scheme {
                    SchemeSel::Dh => "dh".into(),
                    SchemeSel::T => "t".into(),
                    SchemeSel::Both => "both".into(),
                },
            ),
            (
                "n_list".into(),
                self.n_list
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "snr_db".into(),
                format!(
                    "{}:{}:{}",
                    self.snr_start_db, self.snr_stop_db, self.snr_step_db
                ),
            ),
            ("gamma_th_db".into(), self.gamma_th_db.to_string()),
            ("modulation".into(), self.modulation_label.clone()),
            ("samples".into(), self.samples.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("substreams".into(), self.substreams.to_string()),
            (
                "method".into(),
                match self.method {
                    MethodSel::Closed => "closed".into(),
                    MethodSel::Quad => "quad".into(),
                    MethodSel::Both => "both".into(),
                },
            ),
            ("tol_scale".into(), self.tol_scale.to_string()),
        ]
    }
}

/// Raw JSON config file; every field optional, mirroring the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub scheme: Option<String>,
    pub n: Option<String>,
    pub snr_db: Option<String>,
    pub gamma_th_db: Option<f64>,
    #[serde(rename = "mod")]
    pub modulation: Option<String>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub substreams: Option<u32>,
    pub out: Option<String>,
    pub svg: Option<bool>,
    pub method: Option<String>,
    pub tol_scale: Option<f64>,
    pub criteria: Option<String>,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn parse_scheme(s: &str) -> Result<SchemeSel, UsageError> {
    match s {
        "dh" => Ok(SchemeSel::Dh),
        "t" => Ok(SchemeSel::T),
        "both" => Ok(SchemeSel::Both),
        other => Err(UsageError(format!(
            "invalid --scheme '{other}' (expected dh, t or both)"
        ))),
    }
}

pub fn parse_method(s: &str) -> Result<MethodSel, UsageError> {
    match s {
        "closed" => Ok(MethodSel::Closed),
        "quad" => Ok(MethodSel::Quad),
        "both" => Ok(MethodSel::Both),
        other => Err(UsageError(format!(
            "invalid --method '{other}' (expected closed, quad or both)"
        ))),
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<u32>, UsageError> {
    let list: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
    let list = list.map_err(|e| UsageError(format!("invalid --n '{s}': {e}")))?;
    if list.is_empty() || list.iter().any(|&n| n == 0) {
        return Err(UsageError(format!(
            "invalid --n '{s}': element counts must be >= 1"
        )));
    }
    Ok(list)
}

pub fn parse_criteria(s: &str) -> Result<Vec<u32>, UsageError> {
    let list: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
    let list = list.map_err(|e| UsageError(format!("invalid --criteria '{s}': {e}")))?;
    if list.is_empty() || list.iter().any(|&c| c == 0 || c > 10) {
        return Err(UsageError(format!(
            "invalid --criteria '{s}': ids must be in 1..=10"
        )));
    }
    Ok(list)
}

pub fn parse_snr_range(s: &str) -> Result<(f64, f64, f64), UsageError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(UsageError(format!(
            "invalid --snr-db '{s}' (expected start:stop:step)"
        )));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|e| UsageError(format!("invalid --snr-db '{s}': {e}")))?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || stop < start {
        return Err(UsageError(format!(
            "invalid --snr-db '{s}': need stop >= start and step > 0"
        )));
    }
    Ok((start, stop, step))
}

pub fn parse_modulation(s: &str) -> Result<(ModulationParams, String), UsageError> {
    if s == "dpsk" {
        return Ok((ModulationParams::dpsk(), "dpsk".into()));
    }
    if let Some(rest) = s.strip_prefix("custom:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            let p = parts[0].trim().parse::<f64>();
            let q = parts[1].trim().parse::<f64>();
            if let (Ok(p), Ok(q)) = (p, q) {
                if p > 0.0 && q > 0.0 {
                    return Ok((ModulationParams::custom(p, q), format!("custom:{p},{q}")));
                }
            }
        }
    }
    Err(UsageError(format!(
        "invalid --mod '{s}' (expected dpsk or custom:p,q with p, q > 0)"
    )))
}
