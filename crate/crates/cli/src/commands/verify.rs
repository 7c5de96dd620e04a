use std::f64::consts::SQRT_2;
use std::fmt;

use acsplit::diagnostics::{dissipation_check_with, drift_bound_l2};
use acsplit::potentials::{beta_min, beta_minimizer, one_d_first_step};
use acsplit::radial::{radial_solution, scaling_study, RadialProblem};
use acsplit::stepper::{step_quadratic, Stepper, StepperConfig};
use acsplit::thresholding::{
    eo_energy, kernel_moments, kernel_velocity, mbo_step, MboScheme, MboState,
};
use acsplit::{lp_norm, make_field, GridSpec, PotentialSpec, ScalarField, Tau};
use anyhow::anyhow;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{initial_field, Context, Init};
use crate::config::{key, Config, Key};
use crate::error::{usage, CliError};
use crate::output::write_file;

pub const KEYS: &[Key] = &[
    key("groups", "constants,radial,oracle,descent,thresholding"),
    key("n", "128"),
    key("steps", "50"),
    key("oracle_n", "512"),
];

const GROUPS: [&str; 5] = ["constants", "radial", "oracle", "descent", "thresholding"];

/// One line of the report; counts print as integers.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub count: bool,
}

impl Check {
    fn value(id: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            measured,
            expected,
            tolerance,
            count: false,
        }
    }

    fn count(id: impl Into<String>, measured: usize, expected: usize) -> Self {
        Self {
            id: id.into(),
            measured: measured as f64,
            expected: expected as f64,
            tolerance: 0.0,
            count: true,
        }
    }

    pub fn passed(&self) -> bool {
        (self.measured - self.expected).abs() <= self.tolerance
    }
}

fn measured(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.7}")
    }
}

fn short(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.7}")
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let value = if self.count {
            short(self.measured)
        } else {
            measured(self.measured)
        };
        write!(
            f,
            "{} {status} {value} {} {:e}",
            self.id,
            short(self.expected),
            self.tolerance
        )
    }
}

fn run_err<E: fmt::Display>(e: E) -> CliError {
    CliError::Run(anyhow!("{e}"))
}

fn constants(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let m = kernel_moments().map_err(run_err)?;
    let mut checks = vec![
        Check::value("kernel_m0", m.mass, 1.0, 1e-6),
        Check::value("kernel_m2", m.second, 6.0, 1e-6),
        Check::value("kernel_plane", m.plane, 1.5, 1e-6),
    ];
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let e: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let s = [[e[0], e[3], e[4]], [e[3], e[1], e[5]], [e[4], e[5], e[2]]];
        let n = loop {
            let d: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.1 {
                break d.map(|x| x / norm);
            }
        };
        let nsn: f64 = (0..3)
            .map(|i| n[i] * (0..3).map(|j| s[i][j] * n[j]).sum::<f64>())
            .sum();
        let expected = -0.5 * (e[0] + e[1] + e[2] - nsn);
        worst = worst.max((kernel_velocity(&s, &n).map_err(run_err)? - expected).abs());
    }
    checks.push(Check::value("kernel_velocity", worst, 0.0, 1e-6));
    let (beta4, z4) = beta_minimizer(4.0, 50.0, 1e-12).map_err(run_err)?;
    checks.push(Check::value(
        "beta_p2",
        beta_min(2.0, 50.0, 1e-12).map_err(run_err)?,
        1.0,
        1e-8,
    ));
    checks.push(Check::value("beta_p4", beta4, 1.0 / 3.0, 1e-8));
    checks.push(Check::value("beta_p4_argmin", z4, 3.0, 1e-8));
    let c_wbar = PotentialSpec::wbar()
        .normalization_constant()
        .map_err(run_err)?;
    checks.push(Check::value("c_wbar", c_wbar, SQRT_2, 1e-8));
    for r in [1.0, 10.0, 100.0] {
        let second = PotentialSpec::wr(r)
            .map_err(run_err)?
            .w_second_derivative(1.0)
            .unwrap_or(f64::NAN);
        checks.push(Check::value(
            format!("wr_curvature_R{r}"),
            second,
            2.0 * r / (r + 1.0),
            1e-8,
        ));
    }
    Ok(checks)
}

fn radial() -> Result<Vec<Check>, CliError> {
    let (mut powers, mut squares) = (0.0f64, 0.0f64);
    let (mut bound_violations, mut points) = (0, 0);
    for d in [3u32, 4, 5, 10] {
        for r in [1.0, 2.0, 5.0] {
            for eps in [0.2, 0.1, 0.05, 0.01] {
                let Ok(p) = RadialProblem::new(r, eps, d) else {
                    continue;
                };
                let sol = radial_solution(&p).map_err(run_err)?;
                let di = d as i32;
                let target = 2.0 * r.powi(di);
                powers =
                    powers.max(((sol.r_i.powi(di) + sol.r_o.powi(di) - target) / target).abs());
                let target_sq = 2.0 * r * r - 4.0 * f64::from(d - 2) * eps * eps;
                squares = squares
                    .max(((sol.r_i.powi(2) + sol.r_o.powi(2) - target_sq) / target_sq).abs());
                if r - sol.r_i > 2.0 * eps + 10.0 * eps * eps {
                    bound_violations += 1;
                }
                points += 1;
            }
        }
    }
    let mut checks = vec![
        Check::value("radial_identity_powers", powers, 0.0, 1e-10),
        Check::value("radial_identity_squares", squares, 0.0, 1e-10),
        Check::count("radial_ri_bound", points - bound_violations, points),
    ];
    let sweep = [0.2, 0.1, 0.05, 0.025, 0.0125];
    for d in [3u32, 10] {
        let s = scaling_study(2.0, d, &sweep)
            .slopes()
            .ok_or_else(|| run_err(format!("no scaling slopes for d={d}")))?;
        checks.push(Check::value(
            format!("radial_slope_rnew_d{d}"),
            s.r_minus_rnew,
            2.0,
            0.15,
        ));
        checks.push(Check::value(
            format!("radial_slope_ri_d{d}"),
            s.r_minus_ri,
            1.0,
            0.1,
        ));
        checks.push(Check::value(
            format!("radial_slope_ro_d{d}"),
            s.ro_minus_r,
            1.0,
            0.1,
        ));
    }
    Ok(checks)
}

fn oracle(n: usize) -> Result<Vec<Check>, CliError> {
    let grid = GridSpec::new(n, 1.0).map_err(usage)?;
    let u0 = make_field(grid, |x, _| if x < 0.5 { -1.0 } else { 1.0 }).map_err(run_err)?;
    let mut checks = Vec::new();
    for eps in [0.1, 0.05] {
        for tau in [Tau::Finite(1.0), Tau::Finite(100.0), Tau::Infinite] {
            let cfg = StepperConfig::new(grid, PotentialSpec::wbar(), eps, tau).map_err(run_err)?;
            let (u1, _) = step_quadratic(&u0, &cfg).map_err(run_err)?;
            // Sum of single-interface responses over the periodic images of both interfaces.
            let exact = |x: f64| {
                (-4..=4).fold(-1.0, |v, k| {
                    let s = f64::from(k);
                    v + one_d_first_step(x - 0.5 - s, eps, tau)
                        - one_d_first_step(x - 1.0 - s, eps, tau)
                })
            };
            let err = (0..n)
                .map(|i| (u1.get(i, 0) - exact(grid.center(i))).abs())
                .fold(0.0, f64::max);
            let tol = 1e-6 + 10.0 * (-SQRT_2 / (2.0 * eps)).exp();
            checks.push(Check::value(
                format!("oracle_1d_eps{eps}_tau{tau}"),
                err,
                0.0,
                tol,
            ));
        }
    }
    Ok(checks)
}

fn descent(n: usize, steps: usize, ctx: &Context) -> Result<Vec<Check>, CliError> {
    let grid = GridSpec::unit(n).map_err(usage)?;
    let mut jobs = Vec::new();
    for eps in [0.1, 0.05] {
        let kinds = [
            PotentialSpec::wr(100.0).map_err(run_err)?,
            PotentialSpec::standard(),
            PotentialSpec::barrier_quadratic(),
        ];
        for spec in kinds {
            for tau in [
                Tau::Finite(eps * eps),
                Tau::Finite(eps),
                Tau::Finite(1.0),
                Tau::Finite(1e3),
                Tau::Infinite,
            ] {
                if let Ok(cfg) = StepperConfig::new(grid, spec, eps, tau) {
                    let u0 = initial_field(Init::Profile, grid, 0.3, eps, &spec, ctx)?;
                    jobs.push((cfg, u0));
                }
            }
        }
    }
    let results: Vec<Result<(usize, bool), String>> = ctx.pool()?.install(|| {
        jobs.par_iter()
            .map(|(cfg, u0)| descent_run(cfg, u0, steps).map_err(|e| e.to_string()))
            .collect()
    });
    let (mut good_steps, mut good_drift) = (0, 0);
    for r in results {
        let (good, drift_ok) = r.map_err(run_err)?;
        good_steps += good;
        good_drift += usize::from(drift_ok);
    }
    Ok(vec![
        Check::count("dissipation_lattice", good_steps, jobs.len() * steps),
        Check::count("drift_bound", good_drift, jobs.len()),
    ])
}

/// Steps that decreased the energy and satisfied every descent inequality, and the drift verdict.
fn descent_run(
    cfg: &StepperConfig,
    u0: &ScalarField,
    steps: usize,
) -> anyhow::Result<(usize, bool)> {
    let mut stepper = Stepper::new(cfg.clone())?;
    let e0 = stepper.energy(u0)?;
    let mut u = u0.clone();
    let mut good = 0;
    for _ in 0..steps {
        let (next, rep) = stepper.step(&u)?;
        let mut holds = rep.energy_decreased();
        for pair in cfg.potential.curvature_pairs() {
            holds &=
                dissipation_check_with(stepper.energy_functional(), &u, &next, cfg.tau, *pair)?
                    .holds;
        }
        good += usize::from(holds);
        u = next;
    }
    let drift = lp_norm(&u.sub(u0)?, 2.0)?;
    Ok((good, drift <= drift_bound_l2(e0, steps, cfg.eps)))
}

fn thresholding(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let eps = 0.05;
    let grid = GridSpec::unit(n).map_err(usage)?;
    let random = |rng: &mut ChaCha8Rng, binary: bool| {
        let values = (0..grid.len())
            .map(|_| {
                if binary {
                    if rng.gen_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    rng.gen_range(-1.5..1.5)
                }
            })
            .collect();
        ScalarField::from_values(grid, values).map_err(run_err)
    };
    let u = random(rng, false)?;
    let cfg =
        StepperConfig::new(grid, PotentialSpec::wbar(), eps, Tau::Infinite).map_err(run_err)?;
    let (stepped, _) = step_quadratic(&u, &cfg).map_err(run_err)?;
    let mbo = mbo_step(&MboState::new(u), eps).map_err(run_err)?;
    let consistency = mbo.u.max_abs_diff(&stepped).map_err(run_err)?;

    let scheme = MboScheme::new(grid, eps).map_err(run_err)?;
    let mut state = MboState::new(random(rng, true)?);
    let mut prev = eo_energy(&state.u_tilde, scheme.tau()).map_err(run_err)?;
    let mut monotone = 0;
    for _ in 0..100 {
        state = scheme.step(&state).map_err(run_err)?;
        let next = eo_energy(&state.u_tilde, scheme.tau()).map_err(run_err)?;
        monotone += usize::from(next <= prev * (1.0 + 1e-8));
        prev = next;
    }

    let scheme = MboScheme::new(grid, 0.1).map_err(run_err)?;
    let mut ordered = 0;
    for _ in 0..50 {
        let lower = random(rng, true)?;
        let upper = lower
            .zip_map(&random(rng, true)?, f64::max)
            .map_err(run_err)?;
        let a = scheme.step(&MboState::new(lower)).map_err(run_err)?;
        let b = scheme.step(&MboState::new(upper)).map_err(run_err)?;
        ordered += usize::from(a.u.values().iter().zip(b.u.values()).all(|(x, y)| x <= y));
    }
    Ok(vec![
        Check::value("mbo_consistency", consistency, 0.0, 1e-10),
        Check::count("eo_monotone", monotone, 100),
        Check::count("comparison_principle", ordered, 50),
    ])
}

pub fn execute(cfg: Config, ctx: &Context) -> Result<(), CliError> {
    let groups: Vec<String> = cfg.list("groups")?;
    if let Some(bad) = groups.iter().find(|g| !GROUPS.contains(&g.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown group '{bad}', expected some of {}",
            GROUPS.join(", ")
        )));
    }
    let n: usize = cfg.get("n")?;
    let steps: usize = cfg.get("steps")?;
    let oracle_n: usize = cfg.get("oracle_n")?;
    if steps == 0 {
        return Err(CliError::Usage("steps must be positive".into()));
    }
    let mut rng = ctx.rng();
    let mut checks = Vec::new();
    for group in GROUPS.iter().filter(|g| groups.iter().any(|s| s == *g)) {
        checks.extend(match *group {
            "constants" => constants(&mut rng)?,
            "radial" => radial()?,
            "oracle" => oracle(oracle_n)?,
            "descent" => descent(n, steps, ctx)?,
            _ => thresholding(n, &mut rng)?,
        });
    }
    let info = ctx.info(cfg);
    let mut report = info.csv_preamble(&[]);
    for c in &checks {
        println!("{c}");
        report.push_str(&format!("{c}\n"));
    }
    write_file(&ctx.out, "verify.txt", report)?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification {
            failed,
            total: checks.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_lines_match_the_documented_shape() {
        let c = Check::value("kernel_m0", 1.0, 1.0, 1e-6);
        assert_eq!(c.to_string(), "kernel_m0 PASS 1.0000000 1 1e-6");
        let c = Check::value("beta_p4", 1.0 / 3.0, 1.0 / 3.0, 1e-8);
        assert_eq!(c.to_string(), "beta_p4 PASS 0.3333333 0.3333333 1e-8");
        let c = Check::count("dissipation_lattice", 1399, 1400);
        assert_eq!(
            Check::value("gap", 3.5e-5, 0.0, 1e-6).to_string(),
            "gap FAIL 3.500e-5 0 1e-6"
        );
        assert_eq!(c.to_string(), "dissipation_lattice FAIL 1399 1400 0e0");
    }
}
