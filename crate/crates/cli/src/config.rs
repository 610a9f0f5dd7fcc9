use std::path::{Path, PathBuf};

use serde::Deserialize;
use sixvertex_core::{parse_float, Float, Phase, PhaseParams, Precision};

use crate::cli::{Args, CheckKind, Cli, Command, Format};
use crate::grid::{parse_grid, parse_n_range};
use crate::Failure;

pub const BITS_ENV: &str = "SIXVERTEX_BITS";
const DEFAULT_BITS: u32 = 256;
const DEFAULT_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Exact,
    Check,
    Bulk,
    Density,
    Fit,
}

/// A decimal parameter in the config file. TOML floats are refused: they
/// have already been rounded to 53 bits by the parser.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Decimal {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Decimal {
    fn into_text(self, key: &str) -> Result<String, Failure> {
        match self {
            Decimal::Text(s) => Ok(s),
            Decimal::Int(i) => Ok(i.to_string()),
            Decimal::Float(x) => Err(Failure::Input(format!(
                "config key `{key}`: write decimal values as strings (e.g. {key} = \"{x}\") so they \
                 are read at full precision"
            ))),
        }
    }
}

/// The config file: the same keys as the command-line flags, plus the
/// command itself.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<CommandKind>,
    check: Option<CheckKind>,
    phase: Option<String>,
    t: Option<Decimal>,
    gamma: Option<Decimal>,
    zeta: Option<Decimal>,
    n: Option<Decimal>,
    bits: Option<u32>,
    grid: Option<usize>,
    cutoff: Option<i64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

fn read_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Input(format!("invalid config {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Exact,
    Check(CheckKind),
    Bulk,
    Density,
    Fit,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Exact => "exact",
            Task::Check(_) => "check",
            Task::Bulk => "bulk",
            Task::Density => "density",
            Task::Fit => "fit",
        }
    }
}

/// Fully resolved run: flags over config file over environment over
/// defaults. Parameters are validated against their phase region before
/// anything is computed.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: Task,
    pub phase: Option<Phase>,
    t: Option<String>,
    gamma: Option<String>,
    zeta: Option<String>,
    pub n: Option<(usize, usize)>,
    pub precision: Precision,
    pub grid: usize,
    pub cutoff: Option<i64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

fn env_bits() -> Result<Option<u32>, Failure> {
    match std::env::var(BITS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Input(format!("{BITS_ENV}={v} is not a bit count"))),
        Err(_) => Ok(None),
    }
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<RunConfig, Failure> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let (task, args) = match cli.command {
            Some(Command::Exact(a)) => (Task::Exact, a),
            Some(Command::Check { check, args }) => (Task::Check(check), args),
            Some(Command::Bulk(a)) => (Task::Bulk, a),
            Some(Command::Density(a)) => (Task::Density, a),
            Some(Command::Fit(a)) => (Task::Fit, a),
            None => {
                let task = match file.command {
                    Some(CommandKind::Exact) => Task::Exact,
                    Some(CommandKind::Check) => Task::Check(file.check.ok_or_else(|| {
                        Failure::Input("config with command = \"check\" needs a `check` key".into())
                    })?),
                    Some(CommandKind::Bulk) => Task::Bulk,
                    Some(CommandKind::Density) => Task::Density,
                    Some(CommandKind::Fit) => Task::Fit,
                    None => {
                        return Err(Failure::Input(
                            "no command given: use a subcommand or set `command` in the config file".into(),
                        ))
                    }
                };
                (task, Args::default())
            }
        };
        Self::merge(task, args, file)
    }

    fn merge(task: Task, args: Args, file: FileConfig) -> Result<RunConfig, Failure> {
        let text = |flag: Option<String>, from_file: Option<Decimal>, key: &str| -> Result<Option<String>, Failure> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => from_file.map(|d| d.into_text(key)).transpose(),
            }
        };
        let phase = args
            .phase
            .or(file.phase)
            .map(|s| s.parse::<Phase>().map_err(|e: sixvertex_core::Error| Failure::Input(e.to_string())))
            .transpose()?;
        let t = text(args.t, file.t, "t")?;
        let gamma = text(args.gamma, file.gamma, "gamma")?;
        let zeta = text(args.zeta, file.zeta, "zeta")?;
        if t.is_some() && zeta.is_some() {
            return Err(Failure::Input("give either --t or --zeta, not both".into()));
        }
        let n = text(args.n, file.n, "n")?
            .map(|s| parse_n_range(&s).map_err(Failure::Input))
            .transpose()?;
        let bits = match args.bits.or(file.bits) {
            Some(b) => b,
            None => env_bits()?.unwrap_or(DEFAULT_BITS),
        };
        let precision = Precision::new(bits).map_err(|e| Failure::Input(e.to_string()))?;
        let grid = args.grid.or(file.grid).unwrap_or(DEFAULT_GRID);
        if grid == 0 {
            return Err(Failure::Input("--grid must be positive".into()));
        }
        let jobs = args.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(Failure::Input("--jobs must be positive".into()));
        }
        Ok(RunConfig {
            task,
            phase,
            t,
            gamma,
            zeta,
            n,
            precision,
            grid,
            cutoff: args.cutoff.or(file.cutoff),
            format: args.format.or(file.format).unwrap_or_default(),
            out: args.out.or(file.out),
            jobs,
        })
    }

    pub fn bits(&self) -> u32 {
        self.precision.bits()
    }

    pub fn require_phase(&self) -> Result<Phase, Failure> {
        self.phase
            .ok_or_else(|| Failure::Input(format!("`{}` needs --phase", self.task.name())))
    }

    pub fn require_n(&self) -> Result<(usize, usize), Failure> {
        self.n
            .ok_or_else(|| Failure::Input(format!("`{}` needs --n", self.task.name())))
    }

    /// Every parameter point of the grid, `γ` outermost, each validated.
    pub fn points(&self) -> Result<Vec<PhaseParams>, Failure> {
        let phase = self.require_phase()?;
        let bits = self.bits();
        let gammas = match &self.gamma {
            Some(g) => parse_grid(g, bits).map_err(Failure::Input)?,
            None => return Err(Failure::Input(format!("`{}` needs --gamma", self.task.name()))),
        };
        let (values, by_zeta) = match (&self.t, &self.zeta) {
            (Some(t), None) => (parse_grid(t, bits).map_err(Failure::Input)?, false),
            (None, Some(z)) => (parse_grid(z, bits).map_err(Failure::Input)?, true),
            _ => return Err(Failure::Input(format!("`{}` needs --t or --zeta", self.task.name()))),
        };
        if by_zeta && phase == Phase::Ferroelectric {
            return Err(Failure::Input(
                "the FE phase is parameterised by --t (ζ = t/γ is not confined there)".into(),
            ));
        }
        let mut out = Vec::with_capacity(gammas.len() * values.len());
        for g in &gammas {
            for v in &values {
                let params = if by_zeta {
                    PhaseParams::from_zeta(phase, v.clone(), g.clone())
                } else {
                    PhaseParams::new(phase, v.clone(), g.clone())
                };
                out.push(params.map_err(|e| Failure::Input(e.to_string()))?);
            }
        }
        Ok(out)
    }

    /// The single parameter point of a non-grid command.
    pub fn point(&self) -> Result<PhaseParams, Failure> {
        let mut pts = self.points()?;
        if pts.len() != 1 {
            return Err(Failure::Input(format!(
                "`{}` takes a single parameter point, got a grid of {}",
                self.task.name(),
                pts.len()
            )));
        }
        Ok(pts.remove(0))
    }

    pub fn has_point(&self) -> bool {
        self.phase.is_some() || self.gamma.is_some() || self.t.is_some() || self.zeta.is_some()
    }
}

/// Parses one decimal for tests and defaults.
pub fn decimal(s: &str, bits: u32) -> Float {
    parse_float(s, bits).expect("literal decimal")
}
