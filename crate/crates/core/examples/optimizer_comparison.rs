//! Run every optimizer on Rosenbrock with the same budget.
use eddy_glider::optim::{OptProblem, OptimizerKind, OptimizerSpec};

fn main() -> eddy_glider::Result<()> {
    let rosen = |x: &[f64]| {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum::<f64>()
    };
    let p = OptProblem::new(&[(-2.048, 2.048); 6], rosen)?;
    for kind in OptimizerKind::ALL {
        let spec = OptimizerSpec {
            max_evals: Some(12_000),
            ..OptimizerSpec::new(kind)
        };
        let r = spec.run(&p, 3)?;
        println!(
            "{kind:>6}: {:.3e} after {} evaluations, {} generations",
            r.value, r.evaluations, r.generations
        );
    }
    Ok(())
}
