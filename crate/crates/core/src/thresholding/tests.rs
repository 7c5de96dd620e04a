use super::*;
use crate::diagnostics::interface_radius;
use crate::potentials::PotentialSpec;
use crate::spectral::make_field;
use crate::stepper::{step_quadratic, StepperConfig};
use crate::tau::Tau;
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid(n: usize) -> GridSpec {
    GridSpec::unit(n).unwrap()
}

fn circle(n: usize, r0: f64) -> ScalarField {
    make_field(grid(n), |x, y| {
        if (x - 0.5).powi(2) + (y - 0.5).powi(2) < r0 * r0 {
            1.0
        } else {
            -1.0
        }
    })
    .unwrap()
}

fn random_binary(n: usize, seed: u64) -> ScalarField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * n)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    ScalarField::from_values(grid(n), values).unwrap()
}

#[test]
fn plus_one_is_fixed() {
    let state = MboState::new(ScalarField::constant(grid(16), 1.0));
    let next = mbo_step(&state, 0.1).unwrap();
    assert!(next.u.max_abs_diff(&state.u).unwrap() < 1e-14);
    assert_eq!(next.u_tilde, state.u_tilde);
}

#[test]
fn sign_of_zero_is_plus_one() {
    let state = MboState::new(ScalarField::constant(grid(8), 0.0));
    assert!(state.u_tilde.values().iter().all(|&v| v == 1.0));
}

#[test]
fn rejects_bad_parameters() {
    let u = ScalarField::constant(grid(8), 1.0);
    assert!(mbo_step(&MboState::new(u.clone()), 0.0).is_err());
    assert!(eo_energy(&u, -1.0).is_err());
    let outside = ScalarField::constant(grid(8), 1.1);
    assert!(matches!(
        eo_energy(&outside, 0.1),
        Err(ThresholdingError::BoxViolation { .. })
    ));
}

#[test]
fn matches_quadratic_step_with_wbar() {
    let eps = 0.05;
    let u = make_field(grid(64), |x, y| {
        (2.0 * PI * x).sin() * (4.0 * PI * y).cos() + 0.1
    })
    .unwrap();
    let cfg = StepperConfig::new(grid(64), PotentialSpec::wbar(), eps, Tau::Infinite).unwrap();
    let (stepped, _) = step_quadratic(&u, &cfg).unwrap();
    let next = mbo_step(&MboState::new(u), eps).unwrap();
    assert!(next.u.max_abs_diff(&stepped).unwrap() < 1e-10);
}

#[test]
fn circle_shrinks_by_curvature_law() {
    let (n, r0, eps) = (256, 0.4, 0.05);
    let scheme = MboScheme::new(grid(n), eps).unwrap();
    let h = grid(n).h();
    let mut state = MboState::new(circle(n, r0));
    // In the plane the screened kernel advances the flow by τ/2 = ε²/4 per step.
    for k in 1..=20 {
        state = scheme.step(&state).unwrap();
        let r = interface_radius(&state.u).unwrap();
        let exact = (r0 * r0 - k as f64 * scheme.tau()).sqrt();
        assert!((r - exact).abs() <= 3.0 * h, "k={k}: {r} vs {exact}");
    }
}

#[test]
fn eo_energy_of_wells_vanishes() {
    for c in [1.0, -1.0] {
        let u = ScalarField::constant(grid(16), c);
        assert!(eo_energy(&u, 0.01).unwrap().abs() < 1e-14);
    }
}

#[test]
fn eo_energy_approximates_scaled_perimeter() {
    // A flat interface contributes √τ·F_τ ≈ its length.
    let (eps, r0) = (0.05, 0.4);
    let tau = 0.5 * eps * eps;
    let f = eo_energy(&circle(256, r0), tau).unwrap();
    let perimeter = 2.0 * PI * r0;
    let scaled = tau.sqrt() * f;
    assert!(
        (scaled - perimeter).abs() <= 0.25 * perimeter,
        "{scaled} vs {perimeter}"
    );
}

#[test]
fn eo_energy_decreases_along_circle_iterates() {
    let eps = 0.05;
    let scheme = MboScheme::new(grid(128), eps).unwrap();
    let mut state = MboState::new(circle(128, 0.35));
    let mut prev = eo_energy(&state.u_tilde, scheme.tau()).unwrap();
    for _ in 0..15 {
        state = scheme.step(&state).unwrap();
        let next = eo_energy(&state.u_tilde, scheme.tau()).unwrap();
        assert!(next <= prev * (1.0 + 1e-8), "{next} > {prev}");
        prev = next;
    }
}

#[test]
fn kernel_moments_match_identities() {
    let m = kernel_moments().unwrap();
    assert!((m.mass - 1.0).abs() < 1e-6, "{}", m.mass);
    assert!((m.second - 6.0).abs() < 1e-6, "{}", m.second);
    assert!((m.plane - 1.5).abs() < 1e-6, "{}", m.plane);
}

#[test]
fn kernel_velocity_examples() {
    let zero = [[0.0; 3]; 3];
    assert!(kernel_velocity(&zero, &[0.0, 0.0, 1.0]).unwrap().abs() < 1e-12);
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let n = [1.0 / 3f64.sqrt(); 3];
    assert!((kernel_velocity(&id, &n).unwrap() + 1.0).abs() < 1e-6);
    let diag = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]];
    assert!((kernel_velocity(&diag, &[1.0, 0.0, 0.0]).unwrap() + 2.5).abs() < 1e-6);
    assert!(kernel_velocity(&id, &[1.0, 1.0, 0.0]).is_err());
    let skew = [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
    assert!(kernel_velocity(&skew, &[1.0, 0.0, 0.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn eo_energy_decreases_from_random_data(seed in any::<u64>()) {
        let eps = 0.1;
        let scheme = MboScheme::new(grid(32), eps).unwrap();
        let mut state = MboState::new(random_binary(32, seed));
        let mut prev = eo_energy(&state.u_tilde, scheme.tau()).unwrap();
        for _ in 0..8 {
            state = scheme.step(&state).unwrap();
            prop_assert!(state.u.max_abs() <= 1.0 + 1e-12);
            let next = eo_energy(&state.u_tilde, scheme.tau()).unwrap();
            prop_assert!(next <= prev * (1.0 + 1e-8) + 1e-12, "{} > {}", next, prev);
            prev = next;
        }
    }

    #[test]
    fn comparison_principle(seed in any::<u64>(), extra in any::<u64>()) {
        let scheme = MboScheme::new(grid(128), 0.1).unwrap();
        let lower = random_binary(128, seed);
        let bump = random_binary(128, extra);
        let upper = lower.zip_map(&bump, f64::max).unwrap();
        let a = scheme.step(&MboState::new(lower)).unwrap();
        let b = scheme.step(&MboState::new(upper)).unwrap();
        let worst = a.u.values().iter().zip(b.u.values()).fold(f64::NEG_INFINITY, |m, (x, y)| m.max(x - y));
        prop_assert!(worst <= 1e-12, "{}", worst);
    }

    #[test]
    fn kernel_velocity_is_half_perp_trace(
        entries in proptest::array::uniform6(-3.0f64..3.0),
        dir in proptest::array::uniform3(-1.0f64..1.0),
    ) {
        let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        prop_assume!(norm > 0.1);
        let n = [dir[0] / norm, dir[1] / norm, dir[2] / norm];
        let [a, b, c, d, e, f] = entries;
        let s = [[a, d, e], [d, b, f], [e, f, c]];
        let sn: Vec<f64> = (0..3).map(|i| s[i][0] * n[0] + s[i][1] * n[1] + s[i][2] * n[2]).collect();
        let nsn = n[0] * sn[0] + n[1] * sn[1] + n[2] * sn[2];
        let expected = -0.5 * (a + b + c - nsn);
        let v = kernel_velocity(&s, &n).unwrap();
        prop_assert!((v - expected).abs() < 1e-6, "{} vs {}", v, expected);
    }
}
