//! Reconstruct the eddy from five parallel glider lines with the
//! overlapping block model and compare depth-block counts.
use std::time::Instant;

use eddy_glider::block::{make_partition, BaseMethod, BlockedModel};
use eddy_glider::design::{default_test_set, gen_formation, rmse, sample_formation, FormationKind};
use eddy_glider::eddy::{synth_eddy, EddyParams};
use eddy_glider::geo::{GridSpec, Region};
use eddy_glider::glider::GliderParams;

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let truth = synth_eddy(&EddyParams::default(), &GridSpec::default(), &region)?.temperature;
    let g = GliderParams::default();
    let lines = gen_formation(FormationKind::Parallel, 5, &region)?;
    let data = sample_formation(&lines, &g, &truth)?;
    let test = default_test_set(&truth, &g);
    let xq = test.normalized(&region)?;
    println!("{} samples from {}", data.len(), lines.label());

    for b_dep in [20, 40] {
        let p = make_partition(3, 3, b_dep, 0.25)?;
        let t = Instant::now();
        let (m, report) = BlockedModel::fit_dataset(&data, &region, &p, &BaseMethod::tps_fixed(1e-6))?;
        let secs = t.elapsed().as_secs_f64();
        let pred = m.predict_many(&xq)?;
        println!(
            "B_dep={b_dep:3}: {} blocks fitted, {} singular, fit {secs:.2} s, rmse {:.4}",
            report.fitted,
            report.singular,
            rmse(&pred, &test.values())
        );
    }
    Ok(())
}
