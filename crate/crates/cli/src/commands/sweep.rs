use acsplit::stepper::{Stepper, StepperConfig};
use acsplit::{PotentialSpec, ScalarField, Tau};
use anyhow::anyhow;
use rayon::prelude::*;

use super::{grid_from, initial_field, Context, Init};
use crate::config::{key, Config, Key};
use crate::error::{usage, CliError};
use crate::output::{num, write_file, Plot, Series, Table};

pub const KEYS: &[Key] = &[
    key("potential", "wr:R=100"),
    key("n", "128"),
    key("length", "1"),
    key("eps", "0.1,0.05"),
    key("taus", "0.001,0.01,0.1,1,10,100,inf"),
    key("r0", "0.4"),
    key("init", "profile"),
    key("level_fraction", "0.5"),
    key("cap", "500"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Reached,
    Cap,
    Failed,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Reached => "reached",
            Status::Cap => "cap",
            Status::Failed => "failed",
        }
    }
}

struct Outcome {
    iterations: usize,
    status: Status,
    error: Option<String>,
}

/// Steps until the energy drops to `level_fraction · E(u₀)`, at most `cap` times.
fn iterations_to_level(
    cfg: StepperConfig,
    u0: &ScalarField,
    level_fraction: f64,
    cap: usize,
) -> Outcome {
    let failed = |iterations, e: String| Outcome {
        iterations,
        status: Status::Failed,
        error: Some(e),
    };
    let mut stepper = match Stepper::new(cfg) {
        Ok(s) => s,
        Err(e) => return failed(0, e.to_string()),
    };
    let level = match stepper.energy(u0) {
        Ok(e0) => level_fraction * e0,
        Err(e) => return failed(0, e.to_string()),
    };
    let mut u = u0.clone();
    for k in 1..=cap {
        match stepper.step(&u) {
            Ok((next, report)) => {
                if report.energy_after <= level {
                    return Outcome {
                        iterations: k,
                        status: Status::Reached,
                        error: None,
                    };
                }
                u = next;
            }
            Err(e) => return failed(k, e.to_string()),
        }
    }
    Outcome {
        iterations: cap,
        status: Status::Cap,
        error: None,
    }
}

pub fn execute(cfg: Config, ctx: &Context) -> Result<(), CliError> {
    let spec: PotentialSpec = cfg.get("potential")?;
    let grid = grid_from(&cfg)?;
    let eps_list: Vec<f64> = cfg.list("eps")?;
    let taus: Vec<Tau> = cfg.list("taus")?;
    let r0 = cfg.positive("r0")?;
    let init: Init = cfg.get("init")?;
    let level_fraction = cfg.positive("level_fraction")?;
    if level_fraction >= 1.0 {
        return Err(CliError::Usage(format!(
            "level_fraction must lie in (0, 1), got {level_fraction}"
        )));
    }
    let cap: usize = cfg.get("cap")?;

    let mut jobs = Vec::new();
    for &eps in &eps_list {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(CliError::Usage(format!("eps must be positive, got {eps}")));
        }
        let u0 = initial_field(init, grid, r0, eps, &spec, ctx)?;
        for &tau in &taus {
            let stepper_cfg = StepperConfig::new(grid, spec, eps, tau).map_err(usage)?;
            jobs.push((eps, tau, stepper_cfg, u0.clone()));
        }
    }

    let outcomes: Vec<Outcome> = ctx.pool()?.install(|| {
        jobs.par_iter()
            .map(|(_, _, c, u0)| iterations_to_level(c.clone(), u0, level_fraction, cap))
            .collect()
    });

    let info = ctx.info(cfg);
    let mut table = Table::new(["eps", "tau", "iterations_to_level", "reached"]);
    let mut failures = Vec::new();
    for ((eps, tau, _, _), out) in jobs.iter().zip(&outcomes) {
        table.push(vec![
            num(*eps),
            tau.to_string(),
            out.iterations.to_string(),
            out.status.as_str().into(),
        ]);
        if let Some(e) = &out.error {
            failures.push(format!("eps={eps} tau={tau}: {e}"));
        }
    }
    write_file(
        &ctx.out,
        "sweep_tau.csv",
        table.render(&info.csv_preamble(&[])),
    )?;

    let series = eps_list
        .iter()
        .map(|&eps| {
            let points = jobs
                .iter()
                .zip(&outcomes)
                .filter(|((e, tau, _, _), _)| *e == eps && !tau.is_infinite())
                .map(|((_, tau, _, _), out)| (tau.value(), out.iterations as f64))
                .collect();
            Series::solid(format!("eps={eps}"), points)
        })
        .collect();
    let plot = Plot {
        title: format!("iterations until E <= {level_fraction} E0, {spec}"),
        x_label: "tau (finite values)".into(),
        y_label: "iterations".into(),
        log_x: true,
        series,
        ..Plot::default()
    };
    write_file(&ctx.out, "sweep_tau.svg", plot.to_svg(&info.metadata()))?;

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Run(anyhow!("{}", failures.join("; "))))
    }
}
