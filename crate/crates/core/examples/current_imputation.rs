//! Learn subsurface/surface velocity ratios from a current history and
//! use them to fill in depth from surface observations.
use eddy_glider::current::{build_ratio_dataset, fit_ratio_model, RatioModel};
use eddy_glider::eddy::{drifting_current, EddyParams};
use eddy_glider::geo::{GridSpec, Region};

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let history = drifting_current(&EddyParams::default(), &GridSpec::default(), &region, 5, [3.0, -1.0])?;
    let pairs = build_ratio_dataset(&history)?;
    let model = fit_ratio_model(&pairs)?;
    println!(
        "zonal fit: {:?} (r2 {:.4}, {} pairs)",
        model.zonal.coefficients, model.zonal.r2, model.zonal.n
    );

    let reference = RatioModel::default_profile();
    for z in [0.0, 100.0, 400.0, 800.0] {
        println!(
            "z={z:4.0} m  learned {:.3}  reference {:.3}  imputed from (0.2, 0.1): {:?}",
            model.zonal_ratio(z),
            reference.zonal_ratio(z),
            reference.impute(z, [0.2, 0.1]).map(|v| (v * 1e3).round() / 1e3)
        );
    }
    Ok(())
}
