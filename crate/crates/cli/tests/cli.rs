use std::process::{Command, Output};

fn mathieu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mathieu")).args(args).env_remove("MATHIEU_TABLE_CACHE").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn tables_lists_characteristic_values() {
    let o = mathieu(&["tables", "--theta", "9.8696", "--nmax", "100", "--pmax", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("class,n,p,value"));
    let chars = s.lines().filter(|l| l.starts_with("a,") || l.starts_with("b,")).count();
    assert!(chars >= 100, "{chars}");
    let a0: f64 = s.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(a0 < 0.0);
}

#[test]
fn a_over_lambda_sets_theta() {
    let a = stdout(&mathieu(&["tables", "--a-over-lambda", "2", "--nmax", "3", "--pmax", "40"]));
    let b = stdout(&mathieu(&["tables", "--theta", &format!("{}", std::f64::consts::PI.powi(2)), "--nmax", "3", "--pmax", "40"]));
    assert_eq!(a, b);
}

#[test]
fn output_is_deterministic() {
    let args = ["radial", "--theta", "9.8696", "--nmax", "8", "--samples", "7"];
    let (a, b) = (mathieu(&args), mathieu(&args));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert_eq!(s.lines().next(), Some("n,u,k_abs_x,re,im"));
    // 17 significant digits
    let re = s.lines().nth(1).unwrap().split(',').nth(3).unwrap();
    assert_eq!(re.split('e').next().unwrap().trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn headers_of_every_csv() {
    let cases: [(&[&str], &str); 5] = [
        (&["residual", "--theta", "9.8696", "--nmax", "6", "--samples", "4"], "class,n,u,branch,eps"),
        (&["wkbdemo", "--v0", "1", "--energy", "-20", "--xmax", "3", "--samples", "5"], "x,psi,regime"),
        (&["green", "--geometry", "slit", "--bc", "neumann", "--source-x", "1", "--source-y", "3", "--window", "-1,1,-1,1", "--samples", "2x2"], "x,y,u,v,re,im"),
        (&["farfield", "--v0", "1.5707963267948966", "--u0", "5", "--um", "5", "--samples", "5"], "alpha,I_norm,I_fraunhofer"),
        (&["angular", "--theta", "1", "--nmax", "2", "--samples", "3"], "class,n,v,value,deriv"),
    ];
    for (args, header) in cases {
        let o = mathieu(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).lines().next(), Some(header));
    }
}

#[test]
fn green_rows_follow_samples() {
    let o = mathieu(&["green", "--geometry", "strip", "--bc", "dirichlet", "--source-x", "0.5", "--source-y", "1.5", "--window", "-2,2,-1,1", "--samples", "5x3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 15);
}

#[test]
fn strip_source_on_strip_is_a_precondition_error() {
    let o = mathieu(&["green", "--geometry", "strip", "--bc", "neumann", "--source-x", "0.5", "--source-y", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(mathieu(&["tables", "--theta", "1", "--bogus"]).status.code(), Some(1));
    assert_eq!(mathieu(&["tables"]).status.code(), Some(1));
    assert_eq!(mathieu(&["nosuch"]).status.code(), Some(1));
    assert_eq!(mathieu(&["radial", "--theta", "1", "--umax", "-1"]).status.code(), Some(1));
    let o = mathieu(&["green", "--geometry", "slit", "--bc", "neumann", "--source-x", "1", "--source-y", "3", "--window", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["tables", "angular", "radial", "residual", "wkbdemo", "green", "farfield", "validate"] {
        let o = mathieu(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}

#[test]
fn cache_directory_from_environment() {
    let dir = std::env::temp_dir().join(format!("mathieu-cli-cache-{}", std::process::id()));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_mathieu"))
            .args(["tables", "--theta", "3", "--nmax", "4", "--pmax", "40"])
            .env("MATHIEU_TABLE_CACHE", &dir)
            .output()
            .unwrap()
    };
    let a = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    assert_eq!(run().stdout, a.stdout);
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn validate_passes() {
    let o = mathieu(&["validate", "--pairs", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("ok")));
}
