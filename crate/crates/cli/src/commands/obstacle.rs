use acsplit::potentials::optimal_profile;
use acsplit::radial::{profile_comparison, radial_solution, scaling_study, RadialProblem};
use acsplit::PotentialSpec;

use super::Context;
use crate::config::{key, Config, Key};
use crate::error::{usage, CliError};
use crate::output::{num, write_file, Plot, RunInfo, Series, Table};

pub const KEYS: &[Key] = &[
    key("d", "3"),
    key("r", "2"),
    key("eps", "0.05"),
    key("samples", "801"),
];

pub fn execute(cfg: Config, ctx: &Context) -> Result<(), CliError> {
    let d: u32 = cfg.get("d")?;
    let r = cfg.positive("r")?;
    let eps_list: Vec<f64> = cfg.list("eps")?;
    let samples: usize = cfg.get("samples")?;
    if samples < 2 {
        return Err(CliError::Usage(format!(
            "samples must be at least 2, got {samples}"
        )));
    }
    let info = ctx.info(cfg);
    match eps_list.as_slice() {
        [eps] => single(&info, ctx, r, *eps, d, samples),
        _ => sweep(&info, ctx, r, &eps_list, d),
    }
}

fn single(
    info: &RunInfo,
    ctx: &Context,
    r: f64,
    eps: f64,
    d: u32,
    samples: usize,
) -> Result<(), CliError> {
    let problem = RadialProblem::new(r, eps, d).map_err(usage)?;
    let sol = radial_solution(&problem).map_err(usage)?;
    let barrier = PotentialSpec::barrier_abs();
    let width = sol.r_o - sol.r_i;
    let (lo, hi) = ((sol.r_i - width).max(0.0), sol.r_o + width);
    let extra = [
        ("r_i".to_string(), sol.r_i.to_string()),
        ("r_o".to_string(), sol.r_o.to_string()),
        ("r_new".to_string(), sol.r_new.to_string()),
        (
            "profile_deviation".to_string(),
            profile_comparison(&sol).to_string(),
        ),
    ];
    let mut table = Table::new(["s", "u", "u_prime", "profile"]);
    let (mut u_pts, mut p_pts) = (Vec::new(), Vec::new());
    for k in 0..samples {
        let s = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        let (u, p) = (sol.u(s), optimal_profile(&barrier, (sol.r_new - s) / eps));
        table.push(vec![num(s), num(u), num(sol.u_prime(s)), num(p)]);
        u_pts.push((s, u));
        p_pts.push((s, p));
    }
    write_file(
        &ctx.out,
        "obstacle.csv",
        table.render(&info.csv_preamble(&extra)),
    )?;
    let plot = Plot {
        title: format!("radial obstacle step, d={d}, r={r}, eps={eps}"),
        x_label: "s".into(),
        y_label: "u(s)".into(),
        series: vec![
            Series::solid("u", u_pts),
            Series::dashed("profile at r_new", p_pts),
        ],
        ..Plot::default()
    };
    let mut meta = info.metadata();
    meta.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
    write_file(&ctx.out, "obstacle.svg", plot.to_svg(&meta))?;
    Ok(())
}

fn sweep(info: &RunInfo, ctx: &Context, r: f64, eps_list: &[f64], d: u32) -> Result<(), CliError> {
    let study = scaling_study(r, d, eps_list);
    if study.rows.is_empty() {
        let reasons: Vec<String> = study
            .skipped
            .iter()
            .map(|(e, err)| format!("eps={e}: {err}"))
            .collect();
        return Err(CliError::Usage(format!(
            "no admissible eps: {}",
            reasons.join("; ")
        )));
    }
    let mut extra = Vec::new();
    if let Some(s) = study.slopes() {
        extra.push(("slope_r_minus_ri".to_string(), s.r_minus_ri.to_string()));
        extra.push(("slope_ro_minus_r".to_string(), s.ro_minus_r.to_string()));
        extra.push(("slope_r_minus_rnew".to_string(), s.r_minus_rnew.to_string()));
    }
    for (eps, err) in &study.skipped {
        extra.push((format!("skipped_eps_{eps}"), err.to_string()));
    }
    let mut csv = info.csv_preamble(&extra).into_bytes();
    study.write_csv(&mut csv)?;
    write_file(&ctx.out, "obstacle_scaling.csv", csv)?;

    let column = |f: fn(&acsplit::radial::ScalingRow) -> f64| {
        study.rows.iter().map(|row| (row.eps, f(row))).collect()
    };
    let eps: Vec<f64> = study.rows.iter().map(|row| row.eps).collect();
    let plot = Plot {
        title: format!("radial obstacle scaling, d={d}, r={r}"),
        x_label: "eps".into(),
        y_label: "gap".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series::solid("r - r_i", column(|row| row.r_minus_ri)),
            Series::solid("r_o - r", column(|row| row.ro_minus_r)),
            Series::solid("r - r_new", column(|row| row.r_minus_rnew)),
            Series::dashed("eps", eps.iter().map(|&e| (e, e)).collect()),
            Series::dashed("eps^2 / 2", eps.iter().map(|&e| (e, 0.5 * e * e)).collect()),
        ],
    };
    let mut meta = info.metadata();
    meta.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
    write_file(&ctx.out, "obstacle_scaling.svg", plot.to_svg(&meta))?;
    Ok(())
}
