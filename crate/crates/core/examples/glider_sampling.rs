//! Fly one straight survey line, then drift a single dive in a current.
use eddy_glider::current::UniformCurrent;
use eddy_glider::eddy::{synth_eddy, EddyParams};
use eddy_glider::geo::{GridSpec, Region, SurfacePoint};
use eddy_glider::glider::{expected_cycles, sample_line, simulate_cycle, GliderParams, LinePath};

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let truth = synth_eddy(&EddyParams::default(), &GridSpec::default(), &region)?.temperature;
    let g = GliderParams::default();

    let path = LinePath::new(SurfacePoint::new(142.4, 38.2), SurfacePoint::new(145.1, 38.2))?;
    let len = path.length_km(&region);
    let (data, track) = sample_line(&path, &g, &truth)?;
    println!(
        "{len:.1} km line: {:.1} cycles, {} samples, {} surfacings",
        expected_cycles(len, &g),
        data.len(),
        track.surfacings.len()
    );

    let east = UniformCurrent { u: 0.1, v: 0.0 };
    let dive = simulate_cycle(&region, region.center(), 90.0, &g, &east, 0.0, 10.0)?;
    let start = region.project(region.center());
    println!(
        "heading north in a 0.1 m/s eastward current: moved ({:.2}, {:.2}) km",
        dive.end_km[0] - start[0],
        dive.end_km[1] - start[1]
    );
    Ok(())
}
