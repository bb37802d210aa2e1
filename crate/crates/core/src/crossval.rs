//! K-fold cross-validation of blocked interpolation.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::block::{BaseMethod, BlockPartition, BlockedModel};
use crate::design::rmse;
use crate::error::Result;
use crate::geo::{kfold_split, Dataset, Region};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: usize,
    pub fold_rmse: Vec<f64>,
    /// RMSE pooled over every held-out prediction.
    pub rmse: f64,
    pub seconds: f64,
}

/// Fit on `k − 1` folds and predict the remaining one, `k` times.
pub fn cross_validate(
    data: &Dataset,
    region: &Region,
    partition: &BlockPartition,
    method: &BaseMethod,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let start = Instant::now();
    let folds = kfold_split(data.len(), k, seed)?;
    let mut fold_rmse = Vec::with_capacity(k);
    let mut ss = 0.0;
    for (f, held) in folds.iter().enumerate() {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, idx)| idx.iter().copied())
            .collect();
        let (model, _) = BlockedModel::fit_dataset(&data.subset(&train), region, partition, method)?;
        let test = data.subset(held);
        let pred = model.predict_many(&test.normalized(region)?)?;
        let r = rmse(&pred, &test.values());
        ss += r * r * held.len() as f64;
        fold_rmse.push(r);
    }
    Ok(CvReport {
        folds: k,
        fold_rmse,
        rmse: (ss / data.len() as f64).sqrt(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{GridSpec, GriddedField3D};

    #[test]
    fn affine_field_has_zero_cv_error() {
        let region = Region::new((0.0, 1.0), (0.0, 1.0), (0.0, 100.0)).unwrap();
        let f = GriddedField3D::from_fn(region, GridSpec::uniform(5, 5, 4, 0.0, 100.0), |p| {
            1.0 + 2.0 * p.lon - p.lat + 0.01 * p.depth
        })
        .unwrap();
        let rep = cross_validate(
            &f.to_dataset(),
            &region,
            &BlockPartition::single(),
            &BaseMethod::tps_fixed(1e-3),
            5,
            4,
        )
        .unwrap();
        assert_eq!(rep.fold_rmse.len(), 5);
        assert!(rep.rmse < 1e-8, "{}", rep.rmse);
    }
}
