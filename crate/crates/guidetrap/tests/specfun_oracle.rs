use guidetrap::specfun::{cylinder_values, n0_prime_expansion};
use serde_json::Value;

fn fixture() -> Vec<Value> {
    let text = include_str!("fixtures/bessel.json");
    let v: Value = serde_json::from_str(text).unwrap();
    v["values"].as_array().unwrap().clone()
}

#[test]
fn cylinder_values_match_arbitrary_precision_reference() {
    let mut worst: f64 = 0.0;
    for row in fixture() {
        let x = row["x"].as_f64().unwrap();
        let v = cylinder_values(x).unwrap();
        let pairs = [
            (v.j0, row["j0"].as_f64().unwrap()),
            (-v.j0_prime, row["j1"].as_f64().unwrap()),
            (v.y0, row["y0"].as_f64().unwrap()),
            (-v.y0_prime, row["y1"].as_f64().unwrap()),
        ];
        for (got, want) in pairs {
            let tol = if x <= 50.0 { 1e-12f64.max(4e-16 * want.abs()) } else { 1e-11 };
            let err = (got - want).abs();
            worst = worst.max(err / tol);
            assert!(err <= tol, "x = {x}: got {got:e}, want {want:e}, err {err:e}");
        }
    }
    println!("worst error / tolerance = {worst:.3}");
}

#[test]
fn x_equals_two_example() {
    let v = cylinder_values(2.0f64).unwrap();
    assert!((v.j0 - 0.22389077914123567).abs() < 1e-15);
    assert!((v.y0 - 0.5103756726497451).abs() < 1e-15);
}

#[test]
fn n0_prime_expansion_examples() {
    let (value, _) = n0_prime_expansion(0.01f64).unwrap();
    let exact = cylinder_values(0.01f64).unwrap().y0_prime;
    assert!((value - exact).abs() <= 1e-6 * exact.abs());
    let (_, rem) = n0_prime_expansion(0.1f64).unwrap();
    assert!(rem.abs() / cylinder_values(0.1f64).unwrap().y0_prime.abs() <= 1e-3);
    let mut ratios = Vec::new();
    for r in [0.2f64, 0.1, 0.05, 0.025] {
        let (_, rem) = n0_prime_expansion(r).unwrap();
        ratios.push(rem.abs() / (r.powi(3) * r.ln().abs()));
    }
    assert!(ratios.iter().all(|&q| q <= 1.0), "{ratios:?}");
    assert!(n0_prime_expansion(0.5f64).is_err());
}
