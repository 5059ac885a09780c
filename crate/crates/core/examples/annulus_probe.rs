use exdist::modfam::{discrete_modulus, CurveConstraint, GridScene, SolverOptions};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let tol: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1e-2);
    let scene = GridScene::annulus(2, 1.0, std::f64::consts::E, n).unwrap();
    let t = std::time::Instant::now();
    let reach: i64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(2);
    let sweeps: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(4);
    let batch: usize = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(32);
    let opts = SolverOptions { reach: Some(reach), sweeps, batch, ..SolverOptions::with_tol(tol) };
    let r = discrete_modulus(&scene, CurveConstraint::Unconstrained, &opts).unwrap();
    println!(
        "n={n} value={:.5} lower={:.5} gap={:.2e} iters={} paths={} err={:.3}% t={:.2?}",
        r.value,
        r.lower,
        r.gap,
        r.iterations,
        r.witnesses.len(),
        100.0 * (r.value / std::f64::consts::TAU - 1.0),
        t.elapsed()
    );
}
