//! Experiment configuration: a JSON document plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use adjlab::{build_root_system, CartanType, RootSystemSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Radius of the target ball around the identity in the interior test.
    pub interior_epsilon: f64,
    /// Allowed distance of the BCH exponent from 2.
    pub bch_exponent_window: f64,
    /// Gauss-Newton target for vanishing orbit sums.
    pub orbit_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { interior_epsilon: 1e-3, bch_exponent_window: 0.05, orbit_residual: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub group: String,
    /// Largest level of the scanned highest weights; rank-dependent when absent.
    pub weight_bound: Option<usize>,
    /// Torus grid points per root angle for disk estimates.
    pub grid: Option<usize>,
    /// Torus grid for raw character dumps.
    pub scan_grid: Option<usize>,
    /// Extra weight bounds reported by `estimate-c`.
    pub weight_series: Vec<usize>,
    /// Extra grids reported by `estimate-c`; each must divide the next.
    pub grid_series: Vec<usize>,
    pub class_t: Vec<f64>,
    pub class_axes: usize,
    pub n_max: usize,
    pub multistart: usize,
    pub orbit_n_max: usize,
    pub walk_steps: usize,
    pub bch_k: usize,
    pub mu_n: usize,
    pub mu_delta: f64,
    pub mu_samples: usize,
    pub arcs: Vec<[f64; 2]>,
    pub class_power_bound: u64,
    pub arc_samples: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub svg: bool,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            group: "A1".into(),
            weight_bound: None,
            grid: None,
            scan_grid: None,
            weight_series: Vec::new(),
            grid_series: Vec::new(),
            class_t: vec![0.3, 1.0, 2.0],
            class_axes: 1,
            n_max: 6,
            multistart: 32,
            orbit_n_max: 16,
            walk_steps: 10_000,
            bch_k: 2,
            mu_n: 4,
            mu_delta: 0.05,
            mu_samples: 1000,
            arcs: vec![[0.45, 0.55], [0.3, 0.7]],
            class_power_bound: 2,
            arc_samples: 10_000,
            seed: 0,
            output: PathBuf::from("adjlab-out"),
            svg: true,
            tolerances: Tolerances::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub group: Option<String>,
    pub weight_bound: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub no_svg: bool,
}

/// A validated configuration with the rank-dependent defaults filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub cartan_type: CartanType,
    pub rs: RootSystemSpec,
    pub weight_bound: usize,
    pub grid: usize,
    pub scan_grid: usize,
    pub weight_series: Vec<usize>,
    pub grid_series: Vec<usize>,
}

pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Resolved, Vec<String>> {
    let mut config = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| vec![format!("config {}: {e}", p.display())])?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| vec![format!("config {}: {e}", p.display())])?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(g) = &overrides.group {
        config.group = g.clone();
    }
    if let Some(w) = overrides.weight_bound {
        config.weight_bound = Some(w);
    }
    if let Some(g) = overrides.grid {
        config.grid = Some(g);
    }
    if let Some(s) = overrides.seed {
        config.seed = s;
    }
    if let Some(o) = &overrides.output {
        config.output = o.clone();
    }
    if overrides.no_svg {
        config.svg = false;
    }
    resolve(config)
}

pub fn resolve(config: ExperimentConfig) -> Result<Resolved, Vec<String>> {
    let mut errs = Vec::new();
    let cartan_type: Option<CartanType> = match config.group.parse() {
        Ok(t) => Some(t),
        Err(e) => {
            errs.push(format!("group: {e}"));
            None
        }
    };
    let rs = cartan_type.and_then(|t| match build_root_system(t) {
        Ok(rs) => Some(rs),
        Err(e) => {
            errs.push(format!("group: {e}"));
            None
        }
    });
    let rank = rs.as_ref().map_or(1, |r| r.rank);
    let weight_bound = config.weight_bound.unwrap_or(if rank == 1 { 40 } else { 6 });
    let grid = config.grid.unwrap_or(match rank {
        1 => 8000,
        2 => 48,
        _ => 8,
    });
    let scan_grid = config.scan_grid.unwrap_or(match rank {
        1 => 512,
        2 => 32,
        _ => 6,
    });
    let positive: [(&str, usize); 8] = [
        ("weight_bound", weight_bound),
        ("grid", grid),
        ("scan_grid", scan_grid),
        ("class_axes", config.class_axes),
        ("n_max", config.n_max),
        ("multistart", config.multistart),
        ("walk_steps", config.walk_steps),
        ("mu_n", config.mu_n),
    ];
    for (name, v) in positive {
        if v == 0 {
            errs.push(format!("{name}: must be positive"));
        }
    }
    if config.bch_k < 2 {
        errs.push("bch_k: must be at least 2".into());
    }
    if config.orbit_n_max < 2 {
        errs.push("orbit_n_max: must be at least 2".into());
    }
    if config.mu_samples == 0 || config.arc_samples == 0 {
        errs.push("mu_samples, arc_samples: must be positive".into());
    }
    if !(config.mu_delta > 0.0 && config.mu_delta.is_finite()) {
        errs.push("mu_delta: must be positive".into());
    }
    if config.class_t.is_empty() || config.class_t.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        errs.push("class_t: need at least one positive scale".into());
    }
    for (i, [lo, hi]) in config.arcs.iter().enumerate() {
        if !(*lo > 0.0 && lo <= hi && *hi < 1.0) {
            errs.push(format!("arcs[{i}]: need 0 < lo <= hi < 1"));
        }
    }
    if config.class_power_bound == 0 {
        errs.push("class_power_bound: must be positive".into());
    }
    let t = &config.tolerances;
    for (name, v) in [
        ("tolerances.interior_epsilon", t.interior_epsilon),
        ("tolerances.bch_exponent_window", t.bch_exponent_window),
        ("tolerances.orbit_residual", t.orbit_residual),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            errs.push(format!("{name}: must be positive"));
        }
    }
    let mut weight_series = config.weight_series.clone();
    weight_series.push(weight_bound);
    weight_series.sort_unstable();
    weight_series.dedup();
    if weight_series.iter().any(|&w| w == 0 || w > weight_bound) {
        errs.push("weight_series: entries must lie in 1..=weight_bound".into());
    }
    let mut grid_series = config.grid_series.clone();
    grid_series.push(grid);
    grid_series.sort_unstable();
    grid_series.dedup();
    if grid_series.iter().any(|&g| g == 0 || g > grid) || grid_series.windows(2).any(|w| w[1] % w[0] != 0) {
        errs.push("grid_series: entries must divide each other and the grid".into());
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(Resolved {
        cartan_type: cartan_type.expect("checked"),
        rs: rs.expect("checked"),
        weight_bound,
        grid,
        scan_grid,
        weight_series,
        grid_series,
        config,
    })
}
