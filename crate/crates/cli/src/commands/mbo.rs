use acsplit::diagnostics::interface_radius;
use acsplit::thresholding::{eo_energy, MboScheme, MboState};
use acsplit::PotentialSpec;
use anyhow::anyhow;

use super::{grid_from, initial_field, Context, Init};
use crate::config::{key, Config, Key};
use crate::error::{usage, CliError};
use crate::output::{num, write_file, Plot, Series, Table};

pub const KEYS: &[Key] = &[
    key("n", "128"),
    key("length", "1"),
    key("eps", "0.05"),
    key("steps", "20"),
    key("r0", "0.4"),
    key("init", "sharp"),
];

pub fn execute(cfg: Config, ctx: &Context) -> Result<(), CliError> {
    let grid = grid_from(&cfg)?;
    let eps = cfg.positive("eps")?;
    let steps: usize = cfg.get("steps")?;
    let r0 = cfg.positive("r0")?;
    let init: Init = cfg.get("init")?;
    let scheme = MboScheme::new(grid, eps).map_err(usage)?;
    let u0 = initial_field(init, grid, r0, eps, &PotentialSpec::wbar(), ctx)?;

    let info = ctx.info(cfg);
    let mut table = Table::new(["step", "radius", "eo_energy", "reference_radius"]);
    let mut measured = Vec::new();
    let mut reference = Vec::new();
    let mut state = MboState::new(u0);
    let mut failure = None;
    for k in 0..=steps {
        if k > 0 {
            match scheme.step(&state) {
                Ok(next) => state = next,
                Err(e) => {
                    failure = Some(anyhow!("step {k}: {e}"));
                    break;
                }
            }
        }
        let radius = interface_radius(&state.u_tilde);
        let energy = eo_energy(&state.u_tilde, scheme.tau()).map_err(|e| anyhow!(e))?;
        // Thresholding moves a circle by r² = r₀² − kε²/2.
        let expected =
            (init != Init::Random).then(|| (r0 * r0 - 0.5 * k as f64 * eps * eps).max(0.0).sqrt());
        table.push(vec![
            k.to_string(),
            radius.map(num).unwrap_or_default(),
            num(energy),
            expected.map(num).unwrap_or_default(),
        ]);
        measured.push((k as f64, radius.unwrap_or(0.0)));
        if let Some(r) = expected {
            reference.push((k as f64, r));
        }
    }
    write_file(&ctx.out, "mbo.csv", table.render(&info.csv_preamble(&[])))?;

    let mut series = vec![Series::solid("area radius", measured)];
    if !reference.is_empty() {
        series.push(Series::dashed("sqrt(r0^2 - k eps^2 / 2)", reference));
    }
    let plot = Plot {
        title: format!("thresholding, eps={eps}"),
        x_label: "step".into(),
        y_label: "radius".into(),
        series,
        ..Plot::default()
    };
    write_file(&ctx.out, "mbo.svg", plot.to_svg(&info.metadata()))?;
    failure.map_or(Ok(()), |e| Err(CliError::Run(e)))
}
