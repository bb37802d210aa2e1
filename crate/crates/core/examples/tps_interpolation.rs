//! Fit a thin plate spline to scattered samples, with GCV picking the
//! smoothing parameter.
use eddy_glider::tps::{default_lambda_grid, TpsModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> eddy_glider::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = |x: [f64; 3]| (3.0 * x[0]).sin() + x[1] * x[1] - 0.5 * x[2];
    let pts: Vec<[f64; 3]> = (0..300).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    let noisy: Vec<f64> = pts.iter().map(|p| f(*p) + 0.01 * (rng.random::<f64>() - 0.5)).collect();

    let (model, gcv) = TpsModel::fit_gcv(&pts, &noisy, &default_lambda_grid())?;
    println!(
        "gcv picked lambda = {:.2e} (condition {:.1e})",
        gcv.chosen,
        model.condition()
    );

    let mut err: f64 = 0.0;
    for _ in 0..1000 {
        let q = [rng.random(), rng.random(), rng.random()];
        err = err.max((model.predict(q) - f(q)).abs());
    }
    println!("max error on 1000 fresh points: {err:.4}");

    let exact = TpsModel::fit(&pts, &noisy, 0.0)?;
    println!(
        "lambda = 0 residual at a node: {:.1e}",
        (exact.predict(pts[0]) - noisy[0]).abs()
    );
    Ok(())
}
