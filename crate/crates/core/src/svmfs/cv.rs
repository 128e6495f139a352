//! k-fold selection of `λ` and the penalty parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::PenaltySpec;
use crate::data::{kfold_indices, standardize, Dataset};
use crate::dcacore::DcaConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::metrics::pwco;
use super::schemes::{run_scheme, FsRunReport, InitialPoint, Scheme};
use super::updating::updating_theta_run;

/// How each training fold is solved.
#[derive(Debug, Clone, PartialEq)]
pub enum Trainer<T> {
    Fixed(Scheme),
    /// Capped-ℓ1 with the growing-θ procedure and the given increment.
    UpdatingTheta(T),
}

#[derive(Debug, Clone)]
pub struct CvSetup<T> {
    pub lambdas: Vec<T>,
    pub penalties: Vec<PenaltySpec<T>>,
    pub trainer: Trainer<T>,
    pub folds: usize,
    pub seed: u64,
    pub standardize: bool,
    pub cfg: DcaConfig,
}

/// Mean validation scores of one parameter combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub lambda: f64,
    pub penalty: String,
    pub theta: f64,
    pub mean_pwco: f64,
    pub mean_sf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub cells: Vec<CvCell>,
    pub best: usize,
}

impl CvOutcome {
    pub fn best_cell(&self) -> &CvCell {
        &self.cells[self.best]
    }
}

/// Trains on `train` and fills in test accuracy when `test` is given.
pub fn train_and_score<T: Real>(
    train: &Dataset<T>,
    test: Option<&Dataset<T>>,
    lambda: T,
    spec: &PenaltySpec<T>,
    trainer: &Trainer<T>,
    cfg: &DcaConfig,
) -> Result<FsRunReport> {
    let inst = train.to_instance(lambda)?;
    let mut report = match trainer {
        Trainer::Fixed(scheme) => run_scheme(&inst, spec, *scheme, cfg, &InitialPoint::HingeLp)?,
        Trainer::UpdatingTheta(dt) => updating_theta_run(&inst, *dt, cfg)?,
    };
    if let Some(test) = test {
        let x: Vec<T> = report.x.iter().map(|&v| T::lit(v)).collect();
        report.pwco_test = Some(pwco(&x, T::lit(report.b), &test.features, &test.labels)?);
    }
    Ok(report)
}

/// Runs every `(λ, penalty)` pair on every fold and picks the pair with
/// the best mean validation accuracy, then the fewest selected features,
/// then the smallest `θ`. Remaining ties keep the earlier grid entry.
pub fn cross_validate<T: Real>(ds: &Dataset<T>, setup: &CvSetup<T>) -> Result<CvOutcome> {
    if setup.lambdas.is_empty() || setup.penalties.is_empty() {
        return Err(Error::Domain("parameter grids must be nonempty".into()));
    }
    let folds = kfold_indices(ds.len(), setup.folds, setup.seed)?;
    let splits: Vec<(Dataset<T>, Dataset<T>)> = folds
        .iter()
        .enumerate()
        .map(|(f, val_idx)| {
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, v)| v.iter().copied())
                .collect();
            let (tr, va) = (ds.subset(&train_idx), ds.subset(val_idx));
            if setup.standardize {
                standardize(&tr, &va)
            } else {
                Ok((tr, va))
            }
        })
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for &lam in &setup.lambdas {
        for spec in &setup.penalties {
            for f in 0..splits.len() {
                jobs.push((lam, *spec, f));
            }
        }
    }
    let results: Vec<Result<(f64, usize)>> = jobs
        .par_iter()
        .map(|(lam, spec, f)| {
            let (tr, va) = &splits[*f];
            let r = train_and_score(tr, Some(va), *lam, spec, &setup.trainer, &setup.cfg)?;
            Ok((r.pwco_test.expect("validation score"), r.sf))
        })
        .collect();

    let k = splits.len();
    let mut cells = Vec::new();
    let mut it = results.into_iter();
    for &lam in &setup.lambdas {
        for spec in &setup.penalties {
            let mut acc = 0.0;
            let mut sf = 0.0;
            for _ in 0..k {
                let (p, s) = it.next().expect("one result per job")?;
                acc += p;
                sf += s as f64;
            }
            cells.push(CvCell {
                lambda: lam.as_f64(),
                penalty: spec.to_string(),
                theta: spec.theta().as_f64(),
                mean_pwco: acc / k as f64,
                mean_sf: sf / k as f64,
            });
        }
    }
    let mut best = 0;
    for (i, c) in cells.iter().enumerate().skip(1) {
        let b = &cells[best];
        let better = c.mean_pwco > b.mean_pwco
            || (c.mean_pwco == b.mean_pwco && (c.mean_sf < b.mean_sf || (c.mean_sf == b.mean_sf && c.theta < b.theta)));
        if better {
            best = i;
        }
    }
    Ok(CvOutcome { cells, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_data() -> Dataset<f64> {
        // Feature 0 separates the classes, feature 1 is noise.
        let mut f = Vec::new();
        let mut y = Vec::new();
        for k in 0..20 {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            f.push(vec![s * (1.0 + 0.05 * k as f64), ((k * 7) % 5) as f64 * 0.1 - 0.2]);
            y.push(if s > 0.0 { 1 } else { -1 });
        }
        Dataset::new(f, y).unwrap()
    }

    #[test]
    fn picks_an_accurate_sparse_setting() {
        let setup = CvSetup {
            lambdas: vec![0.1, 0.99],
            penalties: vec![PenaltySpec::cap(5.0).unwrap()],
            trainer: Trainer::Fixed(Scheme::Dca1),
            folds: 4,
            seed: 1,
            standardize: false,
            cfg: DcaConfig::default(),
        };
        let out = cross_validate(&line_data(), &setup).unwrap();
        assert_eq!(out.cells.len(), 2);
        assert_eq!(out.best_cell().lambda, 0.1);
        assert_eq!(out.best_cell().mean_pwco, 100.0);
        let again = cross_validate(&line_data(), &setup).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let setup = CvSetup::<f64> {
            lambdas: vec![],
            penalties: vec![PenaltySpec::cap(5.0).unwrap()],
            trainer: Trainer::Fixed(Scheme::Dca1),
            folds: 4,
            seed: 1,
            standardize: false,
            cfg: DcaConfig::default(),
        };
        assert!(cross_validate(&line_data(), &setup).is_err());
    }
}
