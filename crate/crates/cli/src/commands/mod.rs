//! One module per subcommand, plus the shared run context and initial conditions.

pub mod mbo;
pub mod obstacle;
pub mod profile;
pub mod simulate;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

use acsplit::potentials::optimal_profile;
use acsplit::{make_field, GridSpec, PotentialSpec, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{usage, CliError};
use crate::output::RunInfo;

/// Global options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub out: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Context {
    pub fn info(&self, config: Config) -> RunInfo {
        RunInfo {
            config,
            seed: self.seed,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Worker pool for independent runs; `None` threads means one per core.
    pub fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Run(e.into()))
    }
}

/// Shape of the starting field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// A centered disc with the potential's optimal profile across its boundary.
    Profile,
    /// A centered disc with values ±1.
    Sharp,
    /// Independent uniform values in `[−1, 1]`, drawn from the seeded generator.
    Random,
}

impl std::str::FromStr for Init {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "profile" => Ok(Init::Profile),
            "sharp" | "circle" => Ok(Init::Sharp),
            "random" => Ok(Init::Random),
            other => Err(format!(
                "unknown init '{other}', expected profile, sharp or random"
            )),
        }
    }
}

pub fn grid_from(cfg: &Config) -> Result<GridSpec, CliError> {
    GridSpec::new(cfg.get("n")?, cfg.positive("length")?).map_err(usage)
}

pub fn initial_field(
    init: Init,
    grid: GridSpec,
    r0: f64,
    eps: f64,
    spec: &PotentialSpec,
    ctx: &Context,
) -> Result<ScalarField, CliError> {
    let c = 0.5 * grid.length();
    let rho = move |x: f64, y: f64| ((x - c).powi(2) + (y - c).powi(2)).sqrt();
    let field = match init {
        Init::Profile => make_field(grid, |x, y| optimal_profile(spec, (r0 - rho(x, y)) / eps)),
        Init::Sharp => make_field(grid, |x, y| if rho(x, y) < r0 { 1.0 } else { -1.0 }),
        Init::Random => {
            let mut rng = ctx.rng();
            let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            ScalarField::from_values(grid, values)
        }
    };
    field.map_err(usage)
}
