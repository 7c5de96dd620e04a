use acsplit::PotentialSpec;

use super::Context;
use crate::config::{key, Config, Key};
use crate::error::{usage, CliError};
use crate::output::{num, write_file, Table};

pub const KEYS: &[Key] = &[
    key(
        "potentials",
        "wr:R=100,wbar,standard,barrier_abs,barrier_quad,elloneg:alpha=0.5",
    ),
    key("x_min", "-4"),
    key("x_max", "4"),
    key("u_min", "-1.5"),
    key("u_max", "1.5"),
    key("samples", "401"),
];

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

fn range(cfg: &Config, lo: &str, hi: &str) -> Result<(f64, f64), CliError> {
    let (a, b): (f64, f64) = (cfg.get(lo)?, cfg.get(hi)?);
    if a.is_finite() && b.is_finite() && a < b {
        Ok((a, b))
    } else {
        Err(CliError::Usage(format!(
            "need finite {lo} < {hi}, got {a} and {b}"
        )))
    }
}

pub fn execute(cfg: Config, ctx: &Context) -> Result<(), CliError> {
    let specs: Vec<PotentialSpec> = cfg.list("potentials")?;
    let (x_min, x_max) = range(&cfg, "x_min", "x_max")?;
    let (u_min, u_max) = range(&cfg, "u_min", "u_max")?;
    let samples: usize = cfg.get("samples")?;
    if samples < 2 {
        return Err(CliError::Usage(format!(
            "samples must be at least 2, got {samples}"
        )));
    }
    let ids: Vec<String> = specs.iter().map(ToString::to_string).collect();
    let constants = specs
        .iter()
        .zip(&ids)
        .map(|(s, id)| {
            Ok((
                format!("c_w.{id}"),
                s.normalization_constant().map_err(usage)?.to_string(),
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let info = ctx.info(cfg);

    let mut profiles = Table::new(std::iter::once("x".to_string()).chain(ids.iter().cloned()));
    let shapes: Vec<_> = specs.iter().map(PotentialSpec::profile).collect();
    for x in linspace(x_min, x_max, samples) {
        profiles.push(
            std::iter::once(num(x))
                .chain(shapes.iter().map(|p| num(p.value(x))))
                .collect(),
        );
    }
    write_file(
        &ctx.out,
        "profiles.csv",
        profiles.render(&info.csv_preamble(&constants)),
    )?;

    let mut potentials = Table::new(std::iter::once("u".to_string()).chain(ids.iter().cloned()));
    for u in linspace(u_min, u_max, samples) {
        potentials.push(
            std::iter::once(num(u))
                .chain(specs.iter().map(|s| num(s.w(u))))
                .collect(),
        );
    }
    write_file(
        &ctx.out,
        "potentials.csv",
        potentials.render(&info.csv_preamble(&constants)),
    )?;
    Ok(())
}
