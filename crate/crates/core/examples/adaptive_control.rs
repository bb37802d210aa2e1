//! Steer a glider along a straight mission through the eddy's swirl.
use eddy_glider::control::{run_mission, table_missions, ControlConfig};
use eddy_glider::current::{CurrentProvider, RatioModel, TrueCurrent};
use eddy_glider::eddy::{eddy_current, EddyParams};
use eddy_glider::geo::{GridSpec, Region};
use eddy_glider::optim::{OptimizerKind, OptimizerSpec};

fn main() -> eddy_glider::Result<()> {
    let region = Region::default();
    let field = eddy_current(&EddyParams::default(), &GridSpec::default(), &region)?;
    let planner = CurrentProvider::from_history(std::slice::from_ref(&field), RatioModel::default_profile())?;
    let truth = TrueCurrent::new(vec![field])?;

    let mission = table_missions()[4];
    let opt = OptimizerSpec::new(OptimizerKind::Depso);
    let res = run_mission(&mission, &region, &ControlConfig::default(), &opt, &planner, &truth, 1)?;
    println!("{:?} after {} surfacings", res.outcome, res.surfacings.len());
    for s in res.surfacings.iter().step_by(10) {
        println!(
            "k={:3} heading {:7.2}  H={:2}  w=({:.2}, {:.2})  off line {:.3} km",
            s.k, s.heading, s.horizon, s.w1, s.w2, s.deviation_km
        );
    }
    if let Some(d) = res.deviation {
        println!("deviation min/mean/max {:.3}/{:.3}/{:.3} km", d.min, d.mean, d.max);
    }
    Ok(())
}
