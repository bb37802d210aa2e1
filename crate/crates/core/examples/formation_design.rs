//! Compare survey layouts and pick the one with the lowest error.
use eddy_glider::block::BaseMethod;
use eddy_glider::design::{default_test_set, design_sweep, FormationKind, InterpConfig};
use eddy_glider::eddy::{synth_eddy, EddyParams};
use eddy_glider::geo::{GridSpec, Region};
use eddy_glider::glider::GliderParams;

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let truth = synth_eddy(&EddyParams::default(), &GridSpec::default(), &region)?.temperature;
    let g = GliderParams::default();
    let test = default_test_set(&truth, &g);
    // a fixed smoothing parameter keeps the sweep quick
    let interp = InterpConfig {
        method: BaseMethod::tps_fixed(1e-6),
        ..InterpConfig::default()
    };
    let report = design_sweep(&FormationKind::ALL, &[4, 6], &truth, &g, &interp, &test)?;
    for c in &report.candidates {
        match (&c.eval, &c.error) {
            (Some(e), _) => println!("{:>10} K={} {:7.1} km  rmse {:.4}", c.kind, c.k, c.length_km, e.rmse),
            (None, Some(err)) => println!("{:>10} K={} {:7.1} km  {err}", c.kind, c.k, c.length_km),
            _ => {}
        }
    }
    let best = &report.candidates[report.chosen];
    println!("chosen: {} with {} gliders", best.kind, best.k);
    Ok(())
}
