use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};

use acsplit::diagnostics::TraceMetadata;
use acsplit::spectral::write_binary;
use acsplit::stepper::{run, NoHook, StepperConfig};
use acsplit::{PotentialSpec, Tau};
use anyhow::{anyhow, Context as _};

use super::{grid_from, initial_field, Context, Init};
use crate::config::{key, Config, Key};
use crate::error::{usage, CliError};
use crate::output::{write_file, Plot, Series};

pub const KEYS: &[Key] = &[
    key("potential", "wr:R=100"),
    key("n", "128"),
    key("length", "1"),
    key("eps", "0.1"),
    key("tau", "100"),
    key("steps", "200"),
    key("r0", "0.4"),
    key("init", "profile"),
    key("c_eff_ref", "0.29"),
];

/// Marks the start of the metadata trailer appended after the field data.
pub const FIELD_TRAILER_MAGIC: &[u8; 8] = b"ACSFMETA";

const TRACE_KEYS: [&str; 5] = ["potential", "n", "length", "eps", "tau"];

pub fn execute(cfg: Config, ctx: &Context) -> Result<(), CliError> {
    let spec: PotentialSpec = cfg.get("potential")?;
    let grid = grid_from(&cfg)?;
    let eps = cfg.positive("eps")?;
    let tau: Tau = cfg.get("tau")?;
    let steps: usize = cfg.get("steps")?;
    let r0 = cfg.positive("r0")?;
    let init: Init = cfg.get("init")?;
    let c_eff_ref = cfg.positive("c_eff_ref")?;
    let c_w = spec.normalization_constant().map_err(usage)?;
    let stepper_cfg = StepperConfig::new(grid, spec, eps, tau).map_err(usage)?;
    let u0 = initial_field(init, grid, r0, eps, &spec, ctx)?;

    let info = ctx.info(cfg);
    let mut outcome = run(&u0, &stepper_cfg, steps, &mut NoHook).map_err(|e| anyhow!(e))?;
    let meta: &mut TraceMetadata = outcome.trace.meta_mut();
    meta.extra
        .push(("command".into(), info.config.command().into()));
    meta.extra.push(("seed".into(), info.seed.to_string()));
    for (k, v) in info.config.entries() {
        if !TRACE_KEYS.contains(k) {
            meta.extra.push(((*k).into(), v.clone()));
        }
    }
    meta.extra.push(("c_w".into(), c_w.to_string()));

    let mut csv = Vec::new();
    outcome.trace.write_csv(&mut csv)?;
    write_file(&ctx.out, "trace.csv", csv)?;

    let path = ctx.out.join("final_field.bin");
    let mut w = BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    write_binary(&outcome.field, &mut w)?;
    w.write_all(FIELD_TRAILER_MAGIC)?;
    for line in info.metadata() {
        writeln!(w, "{line}")?;
    }
    w.flush()?;

    let scale = c_eff_ref * eps * eps;
    let measured: Vec<(f64, f64)> = outcome
        .trace
        .records()
        .iter()
        .map(|r| (r.step as f64 * scale, r.energy / c_w))
        .collect();
    let t_end = measured.last().map_or(0.0, |p| p.0);
    let t_vanish = r0 * r0 / 2.0;
    let reference: Vec<(f64, f64)> = (0..=200)
        .map(|k| t_end.max(t_vanish) * k as f64 / 200.0)
        .map(|t| (t, 2.0 * PI * (r0 * r0 - 2.0 * t).max(0.0).sqrt()))
        .collect();
    let plot = Plot {
        title: format!("normalized energy, {spec}, eps={eps}, tau={tau}"),
        x_label: format!("k * {c_eff_ref} * eps^2"),
        y_label: "E / c_W".into(),
        series: vec![
            Series::solid("E / c_W", measured),
            Series::dashed("2 pi sqrt(r0^2 - 2t)", reference),
        ],
        ..Plot::default()
    };
    write_file(&ctx.out, "energy.svg", plot.to_svg(&info.metadata()))?;

    match outcome.error {
        Some((step, err)) => Err(CliError::Run(anyhow!("step {step}: {err}"))),
        None => Ok(()),
    }
}
