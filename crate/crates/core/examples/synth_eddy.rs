//! Generate the synthetic eddy and print a temperature cross-section.
use eddy_glider::eddy::{synth_eddy, EddyParams};
use eddy_glider::geo::{GridSpec, Region};

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let grid = GridSpec::default();
    let eddy = synth_eddy(&EddyParams::default(), &grid, &region)?;
    let t = &eddy.temperature;
    let (lo, hi) = t.value_range();
    println!("{} nodes, temperature {lo:.2}..{hi:.2} C", grid.len());

    // zonal section through the middle row
    let j = grid.n_lat / 2;
    for k in (0..grid.n_dep()).step_by(4) {
        let row: Vec<String> = (0..grid.n_lon)
            .step_by(3)
            .map(|i| format!("{:5.1}", t.value(i, j, k)))
            .collect();
        println!("{:6.0} m |{}", grid.levels[k], row.join(""));
    }
    let c = &eddy.current;
    let speed =
        c.u.values()
            .iter()
            .zip(c.v.values())
            .map(|(u, v)| u.hypot(*v))
            .fold(0.0, f64::max);
    println!("peak swirl {speed:.3} m/s");
    Ok(())
}
