use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use acsplit::spectral::read_binary;
use tempfile::TempDir;

fn acsplit(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acsplit"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).expect("readable output")
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

const SMALL: [&str; 3] = ["n=32", "eps=0.1", "r0=0.3"];

#[test]
fn help_and_usage_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&acsplit(dir.path(), &["--help"])), 0);
    assert_eq!(code(&acsplit(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&acsplit(dir.path(), &["simulate", "nn=32"])), 1);
    assert_eq!(code(&acsplit(dir.path(), &["simulate", "n=abc"])), 1);
    assert_eq!(
        code(&acsplit(
            dir.path(),
            &["simulate", "potential=standard", "tau=inf"]
        )),
        1
    );
    assert_eq!(
        code(&acsplit(dir.path(), &["--threads", "0", "sweep-tau"])),
        1
    );
    let err = acsplit(dir.path(), &["mbo", "stepz=3"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("unknown key 'stepz'"));
}

#[test]
fn run_failure_exits_two() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(code(&acsplit(&blocker, &["profile"])), 2);
}

#[test]
fn zero_steps_give_header_only_trace() {
    let dir = TempDir::new().unwrap();
    let out = acsplit(dir.path(), &["simulate", "steps=0", "n=32"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("trace.csv"));
    assert_eq!(
        data_lines(&csv),
        ["step,energy,radius,l2_move,lp_move,h1_move,inner_iters"]
    );
}

#[test]
fn simulate_outputs_embed_config_and_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [&["simulate", "steps=5"][..], &SMALL[..]].concat();
    for dir in [&a, &b] {
        assert_eq!(code(&acsplit(dir.path(), &args)), 0);
    }
    for name in ["trace.csv", "final_field.bin", "energy.svg"] {
        let (x, y) = (
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
        );
        assert_eq!(x, y, "{name} differs between identical runs");
    }
    let csv = read(a.path().join("trace.csv"));
    for line in [
        "# format_version=1",
        "# command=simulate",
        "# steps=5",
        "# r0=0.3",
        "# status=ok",
    ] {
        assert!(csv.lines().any(|l| l == line), "missing {line}");
    }
    assert_eq!(data_lines(&csv).len(), 1 + 6);
    let svg = read(a.path().join("energy.svg"));
    assert!(svg.contains("<!--\nformat_version=1\ncommand=simulate\n"));
    assert!(svg.contains("c_eff_ref=0.29"));

    let bytes = fs::read(a.path().join("final_field.bin")).unwrap();
    let field = read_binary(bytes.as_slice(), 1.0).unwrap();
    assert_eq!(field.grid().n(), 32);
    let trailer = String::from_utf8_lossy(&bytes[16 + 8 * 32 * 32..]).to_string();
    assert!(trailer.starts_with("ACSFMETAformat_version=1\n"));
    assert!(trailer.contains("potential=wr:R=100\n"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small run\nn = 32\nsteps = 4  # overridden\npotential=wbar\ntau=inf\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_acsplit"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .args(["simulate", "steps=2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("trace.csv"));
    assert!(csv.contains("# potential=wbar\n") && csv.contains("# tau=inf\n"));
    assert_eq!(data_lines(&csv).len(), 1 + 3);
    fs::write(&cfg, "n=32\nbogus=1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_acsplit"))
        .args(["--config", cfg.to_str().unwrap(), "simulate"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "sweep-tau",
        "n=32",
        "eps=0.1",
        "taus=0.01,1,inf",
        "r0=0.3",
        "cap=60",
    ];
    assert_eq!(
        code(&acsplit(
            a.path(),
            &[&["--threads", "1"][..], &args[..]].concat()
        )),
        0
    );
    assert_eq!(
        code(&acsplit(
            b.path(),
            &[&["--threads", "3"][..], &args[..]].concat()
        )),
        0
    );
    let csv = read(a.path().join("sweep_tau.csv"));
    assert_eq!(csv, read(b.path().join("sweep_tau.csv")));
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "eps,tau,iterations_to_level,reached");
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("1e-1,inf,"));
    assert!(read(a.path().join("sweep_tau.svg")).contains("level_fraction=0.5"));
}

#[test]
fn sweep_with_single_tau_and_unreachable_level() {
    let dir = TempDir::new().unwrap();
    let out = acsplit(
        dir.path(),
        &[
            "sweep-tau",
            "n=32",
            "eps=0.1",
            "taus=1",
            "cap=1",
            "level_fraction=0.01",
        ],
    );
    assert_eq!(code(&out), 0);
    let csv = read(dir.path().join("sweep_tau.csv"));
    assert_eq!(data_lines(&csv)[1..], ["1e-1,1,1,cap"]);
}

#[test]
fn mbo_follows_seed() {
    let dirs: Vec<TempDir> = (0..3).map(|_| TempDir::new().unwrap()).collect();
    for (dir, seed) in dirs.iter().zip(["1", "1", "2"]) {
        let out = acsplit(
            dir.path(),
            &["--seed", seed, "mbo", "n=32", "steps=3", "init=random"],
        );
        assert_eq!(code(&out), 0);
    }
    let csv: Vec<String> = dirs
        .iter()
        .map(|d| read(d.path().join("mbo.csv")))
        .collect();
    assert_eq!(csv[0], csv[1]);
    assert_ne!(data_lines(&csv[0]), data_lines(&csv[2]));
    assert!(csv[0].contains("# seed=1\n"));

    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&acsplit(
            dir.path(),
            &["mbo", "n=64", "steps=4", "eps=0.05"]
        )),
        0
    );
    let csv = read(dir.path().join("mbo.csv"));
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "step,radius,eo_energy,reference_radius");
    assert_eq!(rows.len(), 6);
    assert!(rows
        .iter()
        .skip(1)
        .all(|r| r.split(',').all(|f| !f.is_empty())));
}

#[test]
fn obstacle_single_and_sweep() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&acsplit(
            dir.path(),
            &["obstacle", "d=3", "r=2", "eps=0.05", "samples=11"]
        )),
        0
    );
    let csv = read(dir.path().join("obstacle.csv"));
    assert!(csv.contains("# r_i=1.9267418595618437\n"));
    assert!(csv.contains("# r_new=1.9983121383887226\n"));
    assert_eq!(data_lines(&csv).len(), 12);

    assert_eq!(
        code(&acsplit(
            dir.path(),
            &["obstacle", "d=10", "eps=0.2,0.1,0.05"]
        )),
        0
    );
    let csv = read(dir.path().join("obstacle_scaling.csv"));
    assert!(csv.contains("# slope_r_minus_rnew="));
    assert_eq!(
        data_lines(&csv)[0],
        "eps,r_minus_ri,ro_minus_r,r_minus_rnew"
    );
    let svg = read(dir.path().join("obstacle_scaling.svg"));
    assert!(svg.contains(">eps^2 / 2<"));

    assert_eq!(
        code(&acsplit(
            dir.path(),
            &["obstacle", "d=10", "r=0.1", "eps=0.2"]
        )),
        1
    );
}

#[test]
fn profile_tables_cover_all_kinds() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&acsplit(dir.path(), &["profile", "samples=5"])), 0);
    let profiles = read(dir.path().join("profiles.csv"));
    let header = "x,wr:R=100,wbar,standard,barrier_abs,barrier_quad,elloneg:alpha=0.5";
    assert_eq!(data_lines(&profiles)[0], header);
    assert!(profiles.contains("# c_w.wbar=1.4142135623730954\n"));
    let potentials = read(dir.path().join("potentials.csv"));
    let first = data_lines(&potentials)[1];
    assert!(first.starts_with("-1.5e0,"));
    assert!(first.contains(",inf,inf,"));
}

#[test]
fn verify_reports_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = acsplit(
        dir.path(),
        &["verify", "groups=constants,thresholding", "n=32"],
    );
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert_eq!(code(&out), 0, "{stdout}");
    assert!(stdout
        .lines()
        .any(|l| l == "kernel_m0 PASS 1.0000000 1 1e-6"));
    assert!(stdout
        .lines()
        .any(|l| l == "beta_p4 PASS 0.3333333 0.3333333 1e-8"));
    for line in stdout.lines() {
        assert_eq!(line.split(' ').count(), 5, "{line}");
    }
    assert!(
        read(dir.path().join("verify.txt")).starts_with("# format_version=1\n# command=verify\n")
    );

    let out = acsplit(dir.path(), &["verify", "groups=descent", "n=32", "steps=3"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("dissipation_lattice PASS 84 84 0e0"));

    assert_eq!(code(&acsplit(dir.path(), &["verify", "groups=radial"])), 3);
    assert_eq!(code(&acsplit(dir.path(), &["verify", "groups=nope"])), 1);
}
