use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sparse_dca::approx::{PenaltyKind, PenaltySpec};
use sparse_dca::data::{load_csv, load_libsvm, standardize, Dataset};
use sparse_dca::dcacore::DcaConfig;
use sparse_dca::exactpen::{support_enum_oracle, BoxedInstance, OracleResult, DEFAULT_N_LIMIT};
use sparse_dca::svmfs::{
    cross_validate, pwco, run_scheme, train_and_score, CvOutcome, CvSetup, FsRunReport, InitialPoint, Scheme, Trainer,
};

use crate::args::{CompareArgs, CvArgs, DataArgs, Format, OracleArgs, SolverArgs, TrainArgs};
use crate::output::{csv_field, to_json};

fn load(path: &Path, label_col: &str) -> Result<Dataset<f64>> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let ds = if is_csv {
        load_csv(path, label_col)
    } else {
        load_libsvm(path)
    };
    ds.with_context(|| format!("cannot load {}", path.display()))
}

/// Training and optional test data, widened to a common feature count and
/// standardized on request.
fn load_pair(args: &DataArgs) -> Result<(Dataset<f64>, Option<Dataset<f64>>)> {
    let mut train = load(&args.data, &args.label_col)?;
    let mut test = match &args.test {
        Some(p) => Some(load(p, &args.label_col)?),
        None => None,
    };
    if let Some(t) = test.as_mut() {
        let n = train.n_features().max(t.n_features());
        train.widen(n);
        t.widen(n);
    }
    if args.standardize {
        let other = test.clone().unwrap_or_else(|| train.clone());
        let (tr, te) = standardize(&train, &other)?;
        train = tr;
        if test.is_some() {
            test = Some(te);
        }
    }
    Ok((train, test))
}

fn dca_config(s: &SolverArgs) -> Result<DcaConfig> {
    let cfg = DcaConfig {
        stop_tol: s.tol,
        max_iter: s.max_iter,
        n_starts: s.starts,
        seed: s.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_scheme(s: &str) -> Result<Scheme> {
    Ok(s.parse()?)
}

fn parse_penalty(s: &str) -> Result<PenaltySpec<f64>> {
    Ok(s.parse()?)
}

fn trainer_of(update_theta: bool, dtheta: f64, scheme: Scheme) -> Trainer<f64> {
    if update_theta {
        Trainer::UpdatingTheta(dtheta)
    } else {
        Trainer::Fixed(scheme)
    }
}

fn check_pairing(scheme: Scheme, spec: &PenaltySpec<f64>) -> Result<()> {
    if !scheme.accepts(spec.kind()) {
        bail!("scheme {scheme} cannot be used with penalty {}", spec.kind().name());
    }
    Ok(())
}

fn single_run(args: &TrainArgs) -> Result<FsRunReport> {
    let (train, test) = load_pair(&args.data)?;
    let cfg = dca_config(&args.solver)?;
    let scheme = parse_scheme(&args.scheme)?;
    let spec = parse_penalty(&args.penalty)?;
    if !args.update_theta {
        check_pairing(scheme, &spec)?;
    }
    let trainer = trainer_of(args.update_theta, args.dtheta, scheme);
    Ok(train_and_score(
        &train,
        test.as_ref(),
        args.lambda,
        &spec,
        &trainer,
        &cfg,
    )?)
}

pub fn train(args: &TrainArgs) -> Result<String> {
    let report = single_run(args)?;
    Ok(match args.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => format!("{}\n{}\n", FsRunReport::CSV_HEADER, report.csv_row()),
    })
}

/// Iteration trace with the objective and, for growing-θ runs, the θ used
/// to produce each iterate.
pub fn report(args: &TrainArgs) -> Result<String> {
    let r = single_run(args)?;
    let trace = r.trace.as_ref().context("run produced no trace")?;
    let mut out = String::from("iteration,objective,iterate_change,theta\n");
    for (k, f) in trace.objectives.iter().enumerate() {
        let change = if k == 0 {
            String::new()
        } else {
            format!("{:e}", trace.iterate_change[k - 1])
        };
        let theta = match (k, r.theta_trace.is_empty()) {
            (_, true) => format!("{:e}", r.theta),
            (0, false) => String::new(),
            (_, false) => format!("{:e}", r.theta_trace[k - 1]),
        };
        out.push_str(&format!("{k},{f:e},{change},{theta}\n"));
    }
    Ok(out)
}

fn grid_penalties(args: &CvArgs) -> Result<Vec<PenaltySpec<f64>>> {
    let family = args.penalty.trim().to_ascii_lowercase();
    let probe = parse_penalty(&format!("{family}:theta=1"))
        .or_else(|_| parse_penalty(&format!("{family}:theta=2")))
        .with_context(|| format!("unknown penalty family '{family}'"))?;
    let uses_a = matches!(probe.kind(), PenaltyKind::Scad | PenaltyKind::PiL);
    let mut specs = Vec::new();
    for &theta in &args.grid_theta {
        if uses_a {
            for &a in &args.grid_a {
                if a <= 1.0 {
                    log::warn!("skipping a = {a}: {family} needs a > 1");
                    continue;
                }
                specs.push(parse_penalty(&format!("{family}:theta={theta},a={a}"))?);
            }
        } else {
            match parse_penalty(&format!("{family}:theta={theta}")) {
                Ok(s) => specs.push(s),
                Err(e) => log::warn!("skipping theta = {theta}: {e}"),
            }
        }
    }
    if specs.is_empty() {
        bail!("the parameter grid is empty");
    }
    Ok(specs)
}

#[derive(Serialize)]
struct CvReport {
    cv: CvOutcome,
    /// Model retrained on all training data with the selected parameters.
    model: FsRunReport,
}

pub fn cv(args: &CvArgs) -> Result<String> {
    let mut data = args.data.clone();
    // Folds are standardized one by one inside the sweep.
    data.standardize = false;
    let (train, test) = load_pair(&data)?;
    let cfg = dca_config(&args.solver)?;
    let scheme = parse_scheme(&args.scheme)?;
    let penalties = if args.update_theta {
        vec![PenaltySpec::cap(args.dtheta)?]
    } else {
        let p = grid_penalties(args)?;
        check_pairing(scheme, &p[0])?;
        p
    };
    if args.grid_lambda.is_empty() {
        bail!("--grid-lambda is empty");
    }
    let setup = CvSetup {
        lambdas: args.grid_lambda.clone(),
        penalties,
        trainer: trainer_of(args.update_theta, args.dtheta, scheme),
        folds: args.folds,
        seed: args.solver.seed,
        standardize: args.data.standardize,
        cfg: cfg.clone(),
    };
    let outcome = cross_validate(&train, &setup)?;
    let best = outcome.best_cell();
    let spec = parse_penalty(&best.penalty)?;
    let (train, test) = if args.data.standardize {
        let other = test.clone().unwrap_or_else(|| train.clone());
        let (tr, te) = standardize(&train, &other)?;
        (tr, test.map(|_| te))
    } else {
        (train, test)
    };
    let model = train_and_score(&train, test.as_ref(), best.lambda, &spec, &setup.trainer, &cfg)?;
    Ok(match args.output.format {
        Format::Json => to_json(&CvReport { cv: outcome, model })?,
        Format::Csv => {
            let mut out = String::from("lambda,penalty,theta,mean_pwco,mean_sf,best\n");
            for (i, c) in outcome.cells.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.lambda,
                    csv_field(&c.penalty),
                    c.theta,
                    c.mean_pwco,
                    c.mean_sf,
                    i == outcome.best
                ));
            }
            out
        }
    })
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
struct Stat {
    mean: f64,
    std: f64,
}

fn stat(v: &[f64]) -> Stat {
    if v.is_empty() {
        return Stat::default();
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Stat { mean, std: var.sqrt() }
}

#[derive(Debug, Serialize)]
struct CompareRow {
    scheme: String,
    penalty: String,
    /// `ok`, or why the pair was not run.
    status: String,
    runs: usize,
    sf: Stat,
    pwco_train: Stat,
    pwco_test: Option<Stat>,
    objective: Stat,
    l0_objective: Stat,
    iterations: Stat,
    wall_seconds: Stat,
}

pub fn compare(args: &CompareArgs) -> Result<String> {
    let (train, test) = load_pair(&args.data)?;
    let cfg = dca_config(&args.solver)?;
    let inst = train.to_instance(args.lambda)?;
    let schemes: Vec<Scheme> = args.scheme.iter().map(|s| parse_scheme(s)).collect::<Result<_>>()?;
    let specs: Vec<PenaltySpec<f64>> = args.penalty.iter().map(|s| parse_penalty(s)).collect::<Result<_>>()?;
    let single = DcaConfig {
        n_starts: 1,
        ..cfg.clone()
    };
    let mut rows = Vec::new();
    for &scheme in &schemes {
        for spec in &specs {
            let mut row = CompareRow {
                scheme: scheme.to_string(),
                penalty: spec.to_string(),
                status: "ok".into(),
                runs: 0,
                sf: Stat::default(),
                pwco_train: Stat::default(),
                pwco_test: None,
                objective: Stat::default(),
                l0_objective: Stat::default(),
                iterations: Stat::default(),
                wall_seconds: Stat::default(),
            };
            if !scheme.accepts(spec.kind()) {
                row.status = "incompatible".into();
                rows.push(row);
                continue;
            }
            let mut reports = Vec::new();
            for k in 0..cfg.n_starts {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
                let x = (0..inst.n_features()).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let b = rng.random_range(-1.0..=1.0);
                let mut r = run_scheme(&inst, spec, scheme, &single, &InitialPoint::Given { x, b })?;
                if let Some(t) = &test {
                    r.pwco_test = Some(pwco(&r.x, r.b, &t.features, &t.labels)?);
                }
                reports.push(r);
            }
            let col = |f: &dyn Fn(&FsRunReport) -> f64| stat(&reports.iter().map(f).collect::<Vec<_>>());
            row.runs = reports.len();
            row.sf = col(&|r| r.sf as f64);
            row.pwco_train = col(&|r| r.pwco_train);
            if test.is_some() {
                row.pwco_test = Some(col(&|r| r.pwco_test.unwrap_or(0.0)));
            }
            row.objective = col(&|r| r.objective);
            row.l0_objective = col(&|r| r.l0_objective);
            row.iterations = col(&|r| r.iterations as f64);
            row.wall_seconds = col(&|r| r.wall_seconds);
            rows.push(row);
        }
    }
    Ok(match args.output.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut out = String::from(
                "scheme,penalty,status,runs,sf_mean,sf_std,pwco_train_mean,pwco_train_std,\
                 pwco_test_mean,pwco_test_std,objective_mean,objective_std,wall_seconds_mean\n",
            );
            for r in &rows {
                let (tm, ts) = r
                    .pwco_test
                    .map(|s| (s.mean.to_string(), s.std.to_string()))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.scheme,
                    csv_field(&r.penalty),
                    r.status,
                    r.runs,
                    r.sf.mean,
                    r.sf.std,
                    r.pwco_train.mean,
                    r.pwco_train.std,
                    tm,
                    ts,
                    r.objective.mean,
                    r.objective.std,
                    r.wall_seconds.mean
                ));
            }
            out
        }
    })
}

#[derive(Serialize)]
struct OracleReport {
    m_box: f64,
    oracle: OracleResult<f64>,
    run: FsRunReport,
    /// ℓ0 objective of the run minus the global optimum.
    gap: f64,
}

pub fn oracle(args: &OracleArgs) -> Result<String> {
    let (train, _) = load_pair(&args.run.data)?;
    let inst = train.to_instance(args.run.lambda)?;
    if inst.n_features() > DEFAULT_N_LIMIT {
        bail!(
            "exact search refused: {} features exceed the limit of {DEFAULT_N_LIMIT}",
            inst.n_features()
        );
    }
    let boxed = BoxedInstance::new(inst, args.m_box)?;
    let oracle = support_enum_oracle(&boxed, DEFAULT_N_LIMIT)?;
    let run = single_run(&args.run)?;
    let gap = run.l0_objective - oracle.objective;
    let rep = OracleReport {
        m_box: args.m_box,
        oracle,
        run,
        gap,
    };
    Ok(match args.run.output.format {
        Format::Json => to_json(&rep)?,
        Format::Csv => format!(
            "oracle_objective,oracle_support,run_l0_objective,gap\n{},{},{},{}\n",
            rep.oracle.objective,
            csv_field(
                &rep.oracle
                    .support
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            rep.run.l0_objective,
            rep.gap
        ),
    })
}
