use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rvb_core::multipartite::DEFAULT_SEED;
use rvb_core::{parse_key_values, Boundary, LatticeSpec, Variant};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Enumerate,
    Assemble,
    Rdm,
    WernerScan,
    Bounds,
    LoopCf,
    Multipartite,
    ReproducePaper,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Enumerate,
        Task::Assemble,
        Task::Rdm,
        Task::WernerScan,
        Task::Bounds,
        Task::LoopCf,
        Task::Multipartite,
        Task::ReproducePaper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Enumerate => "enumerate",
            Task::Assemble => "assemble",
            Task::Rdm => "rdm",
            Task::WernerScan => "werner-scan",
            Task::Bounds => "bounds",
            Task::LoopCf => "loop-cf",
            Task::Multipartite => "multipartite",
            Task::ReproducePaper => "reproduce-paper",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ConfigError(format!("unknown task `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Raw settings from a config file or the command line. Every field is
/// optional so the two sources can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub lattice: Option<String>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub boundary: Option<String>,
    pub variant: Option<String>,
    pub n: Option<usize>,
    pub tasks: Option<String>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub coverings: Option<PathBuf>,
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| ConfigError(format!("`{key}` = `{value}`: {e}")))
}

impl Settings {
    /// Parse flat `key=value` text.
    pub fn from_config_text(text: &str) -> Result<Self, ConfigError> {
        let map = parse_key_values(text).map_err(|e| ConfigError(e.to_string()))?;
        let mut s = Settings::default();
        for (k, v) in &map {
            match k.as_str() {
                "lattice" => s.lattice = Some(v.clone()),
                "rows" => s.rows = Some(parse_field(k, v)?),
                "cols" => s.cols = Some(parse_field(k, v)?),
                "boundary" => s.boundary = Some(v.clone()),
                "variant" => s.variant = Some(v.clone()),
                "n" => s.n = Some(parse_field(k, v)?),
                "tasks" => s.tasks = Some(v.clone()),
                "out" => s.out = Some(PathBuf::from(v)),
                "tol" => s.tol = Some(parse_field(k, v)?),
                "seed" => s.seed = Some(parse_field(k, v)?),
                "coverings" => s.coverings = Some(PathBuf::from(v)),
                other => return Err(ConfigError(format!("unknown key `{other}`"))),
            }
        }
        Ok(s)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            lattice: over.lattice.or(self.lattice),
            rows: over.rows.or(self.rows),
            cols: over.cols.or(self.cols),
            boundary: over.boundary.or(self.boundary),
            variant: over.variant.or(self.variant),
            n: over.n.or(self.n),
            tasks: over.tasks.or(self.tasks),
            out: over.out.or(self.out),
            tol: over.tol.or(self.tol),
            seed: over.seed.or(self.seed),
            coverings: over.coverings.or(self.coverings),
        }
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_OUT: &str = "rvb-out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    pub variant: Variant,
    /// JSON ensemble file, required for the custom variant.
    pub coverings: Option<PathBuf>,
    pub tasks: Vec<Task>,
    pub out: PathBuf,
    pub tol: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(lattice: LatticeSpec, variant: Variant, tasks: Vec<Task>) -> Self {
        RunConfig {
            lattice,
            variant,
            coverings: None,
            tasks,
            out: PathBuf::from(DEFAULT_OUT),
            tol: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let boundary = match s.boundary.as_deref() {
            None | Some("open") => Boundary::Open,
            Some("periodic") => Boundary::Periodic,
            Some(other) => return Err(ConfigError(format!("unknown boundary `{other}`"))),
        };
        let lattice = match s.lattice.as_deref().unwrap_or("grid") {
            "grid" | "square" => {
                let rows = s.rows.unwrap_or(4);
                let cols = s.cols.unwrap_or(rows);
                LatticeSpec::square(rows, cols, boundary)
            }
            "complete-bipartite" | "complete_bipartite" | "kbip" => {
                let n =
                    s.n.ok_or_else(|| ConfigError("complete-bipartite lattice needs `n`".into()))?;
                LatticeSpec::complete_bipartite(n)
            }
            other => return Err(ConfigError(format!("unknown lattice `{other}`"))),
        }
        .map_err(|e| ConfigError(e.to_string()))?;

        let variant = match s.variant.as_deref() {
            None if lattice.is_grid() => Variant::Liquid,
            None => Variant::Gas,
            Some("gas") => Variant::Gas,
            Some("liquid") => Variant::Liquid,
            Some("custom") => Variant::Custom,
            Some(other) => return Err(ConfigError(format!("unknown variant `{other}`"))),
        };
        if variant == Variant::Custom && s.coverings.is_none() {
            return Err(ConfigError("custom variant needs a `coverings` file".into()));
        }
        if variant == Variant::Liquid && !lattice.is_grid() {
            return Err(ConfigError("the liquid variant needs a grid lattice".into()));
        }

        let tasks = s
            .tasks
            .as_deref()
            .unwrap_or("")
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Task::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        if tasks.is_empty() {
            return Err(ConfigError("task list is empty".into()));
        }

        let tol = s.tol.unwrap_or(DEFAULT_TOLERANCE);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConfigError(format!("tolerance must be positive, got {tol}")));
        }

        Ok(RunConfig {
            lattice,
            variant,
            coverings: s.coverings.clone(),
            tasks,
            out: s.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            tol,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}
