mod common;

use common::lab;

#[test]
fn orbit_of_one_seventh_closes() {
    let run = lab("orbit", "[orbit]\nx = \"1/7\"\nq = 3\nlength = 7\n", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rows = run.rows("orbit_orbit.csv");
    assert_eq!(rows.len(), 7);
    let points: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(points, ["1/7", "3/7", "2/7", "6/7", "4/7", "5/7", "1/7"]);
    assert_eq!(run.summary("orbit")["results"]["closed"], true);
}

#[test]
fn entropy_of_powers_of_two() {
    let run = lab("entropy", "[entropy]\nspec = \"kind=geometric, c=2\"\nq = 6\nn_max = 8\n", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let summary = run.summary("entropy");
    assert_eq!(summary["results"]["verdict"], "positive via p=3");
    let rows = run.rows("entropy_p3.csv");
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let n = i as u32 + 1;
        assert_eq!(row[0], n.to_string());
        assert_eq!(row[2], (2 * 3u64.pow(n - 1)).to_string());
    }
    assert_eq!(run.rows("entropy_p2.csv").len(), 8);
}

#[test]
fn padic_certificate_for_three() {
    let run = lab("padic", "[padic]\na = 3\np = 2\n", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let cert = &run.summary("padic")["results"]["certificate"];
    assert_eq!(cert["stride"], 2);
    assert_eq!(cert["v_log"], 3);
    assert_eq!(cert["guard_ok"], true);
    let rows = run.rows("padic_interpolation.csv");
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[3] == "true"));
    assert_eq!(rows[1][1], "9");
}

#[test]
fn padic_mahler_screen() {
    let run = lab("padic", "[padic]\na = 3\np = 2\nspec = \"kind=geometric, c=2\"\nk_max = 16\n", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.summary("padic")["results"]["continuity"]["verdict"], "fails");
    let rows = run.rows("padic_mahler.csv");
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|r| r[1] == "1" && r[2] == "0"));
}

#[test]
fn dimension_of_cantor_endpoints() {
    let cfg = "[dim]\ndelta_min = \"1/19683\"\ndelta_max = \"1/9\"\nscales = 8\n\n[dim.cloud]\nkind = \"cantor\"\nlevel = 10\n";
    let run = lab("dim", cfg, &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let slope: f64 = run.summary("dim")["results"]["slope"].as_str().unwrap().parse().unwrap();
    assert!((slope - 2f64.ln() / 3f64.ln()).abs() < 0.05, "{slope}");
    assert_eq!(run.rows("dim_counts.csv").len(), 8);
}

#[test]
fn density_metrics_and_witness() {
    let cfg = r#"
[density]
x = "sqrt2"
digits = 50
a = "kind=polynomial, p=\"n\""
b = "kind=polynomial, p=\"n\""
c = "kind=geometric, c=2"
a_range = [1, 40]
b_range = [1, 40]
c_range = [0, 3]
max_product = "10^8"

[density.epsilon]
spec = "kind=polynomial, p=\"n\""
x0 = "1/1000"
eps = "1/100"
"#;
    let run = lab("density", cfg, &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let metrics = run.rows("density_metrics.csv");
    assert_eq!(metrics[0][0], "points");
    assert_eq!(run.rows("density_weyl.csv").len(), 4);
    assert_eq!(run.summary("density")["results"]["epsilon_witness"]["dense"], true);
}
