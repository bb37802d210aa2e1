//! Five-fold cross-validation of blocked TPS against inverse distance
//! weighting on randomly scattered samples.
use eddy_glider::block::{make_partition, BaseMethod};
use eddy_glider::crossval::cross_validate;
use eddy_glider::eddy::{synth_eddy, EddyParams};
use eddy_glider::geo::{GridSpec, Region};

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let grid = GridSpec::uniform(20, 15, 20, 0.0, 830.0);
    let field = synth_eddy(&EddyParams::default(), &grid, &region)?.temperature;
    let data = field.to_dataset();
    let part = make_partition(3, 2, 4, 0.25)?;

    for (name, method) in [("tps", BaseMethod::tps_fixed(1e-6)), ("idw", BaseMethod::idw())] {
        let cv = cross_validate(&data, &region, &part, &method, 5, 1)?;
        println!(
            "{name}: cv rmse {:.4} (folds {:?})",
            cv.rmse,
            cv.fold_rmse.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
