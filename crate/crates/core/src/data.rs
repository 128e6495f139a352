//! Dataset loading, splitting and standardization.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::svmfs::SvmInstance;

/// Labelled points with dense features. Labels are `+1` or `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub features: Vec<Vec<T>>,
    pub labels: Vec<i8>,
    pub feature_names: Option<Vec<String>>,
}

impl<T: Real> Dataset<T> {
    pub fn new(features: Vec<Vec<T>>, labels: Vec<i8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(first) = features.first() {
            let n = first.len();
            if features.iter().any(|r| r.len() != n) {
                return Err(Error::Data("rows differ in length".into()));
            }
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::Data("labels must be +1 or -1".into()));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("features must be finite".into()));
        }
        Ok(Dataset {
            features,
            labels,
            feature_names: None,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Splits into the `+1` and `-1` classes.
    pub fn to_instance(&self, lambda: T) -> Result<SvmInstance<T>> {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (row, &y) in self.features.iter().zip(&self.labels) {
            if y > 0 {
                a.push(row.clone());
            } else {
                b.push(row.clone());
            }
        }
        SvmInstance::new(a, b, lambda)
    }

    /// Pads every row with zeros up to `n` features.
    pub fn widen(&mut self, n: usize) {
        for r in &mut self.features {
            if r.len() < n {
                r.resize(n, T::zero());
            }
        }
    }
}

fn parse_label(tok: &str, line: usize) -> Result<i8> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("unreadable label '{tok}'"),
    })?;
    if v == 1.0 {
        Ok(1)
    } else if v == -1.0 {
        Ok(-1)
    } else if v == 0.0 || v == 2.0 {
        log::warn!("line {line}: label {tok} mapped to -1");
        Ok(-1)
    } else {
        Err(Error::Parse {
            line,
            msg: format!("label '{tok}' is not one of +1, -1, 0, 2"),
        })
    }
}

/// Parses LIBSVM text: `<label> <index>:<value> ...` with 1-based,
/// strictly increasing indices. Blank lines and `#` comments are skipped.
pub fn parse_libsvm<T: Real, R: Read>(input: R) -> Result<Dataset<T>> {
    let mut rows: Vec<Vec<(usize, T)>> = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0usize;
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let label = parse_label(toks.next().expect("nonempty line"), lineno)?;
        let mut entries = Vec::new();
        let mut last = 0usize;
        for tok in toks {
            let bad = |msg: String| Error::Parse { line: lineno, msg };
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| bad(format!("malformed token '{tok}'")))?;
            let idx: usize = idx.parse().map_err(|_| bad(format!("bad index in '{tok}'")))?;
            let val: f64 = val.parse().map_err(|_| bad(format!("bad value in '{tok}'")))?;
            if idx == 0 {
                return Err(bad("indices are 1-based".into()));
            }
            if idx <= last {
                return Err(bad(format!("index {idx} does not increase")));
            }
            if !val.is_finite() {
                return Err(bad(format!("non-finite value in '{tok}'")));
            }
            last = idx;
            entries.push((idx - 1, T::lit(val)));
        }
        n = n.max(last);
        rows.push(entries);
        labels.push(label);
    }
    let features = rows
        .into_iter()
        .map(|entries| {
            let mut r = vec![T::zero(); n];
            for (i, v) in entries {
                r[i] = v;
            }
            r
        })
        .collect();
    Dataset::new(features, labels)
}

pub fn load_libsvm<T: Real>(path: impl AsRef<Path>) -> Result<Dataset<T>> {
    parse_libsvm(std::fs::File::open(path)?)
}

/// Writes LIBSVM text with 17 significant digits, omitting zeros.
pub fn write_libsvm<T: Real, W: Write>(ds: &Dataset<T>, mut out: W) -> Result<()> {
    for (row, &y) in ds.features.iter().zip(&ds.labels) {
        write!(out, "{}", if y > 0 { "+1" } else { "-1" })?;
        for (i, v) in row.iter().enumerate() {
            if *v != T::zero() {
                write!(out, " {}:{:.16e}", i + 1, v.as_f64())?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a CSV file with a header row; `label_col` names the label column
/// and every other column is a feature.
pub fn parse_csv<T: Real, R: Read>(input: R, label_col: &str) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = rdr.headers()?.clone();
    let li = headers
        .iter()
        .position(|h| h.trim() == label_col)
        .ok_or_else(|| Error::Data(format!("no column named '{label_col}'")))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != li)
        .map(|(_, h)| h.trim().to_string())
        .collect();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        // Header is line 1.
        let lineno = k + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        if rec.len() != headers.len() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("{} fields, header has {}", rec.len(), headers.len()),
            });
        }
        labels.push(parse_label(rec[li].trim(), lineno)?);
        let mut row = Vec::with_capacity(names.len());
        for (i, f) in rec.iter().enumerate() {
            if i == li {
                continue;
            }
            let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad number '{f}'"),
            })?;
            row.push(T::lit(v));
        }
        features.push(row);
    }
    let mut ds = Dataset::new(features, labels)?;
    ds.feature_names = Some(names);
    Ok(ds)
}

pub fn load_csv<T: Real>(path: impl AsRef<Path>, label_col: &str) -> Result<Dataset<T>> {
    parse_csv(std::fs::File::open(path)?, label_col)
}

/// Shuffles `0..m` with `seed` and cuts it into `k` contiguous folds whose
/// sizes differ by at most one.
pub fn kfold_indices(m: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || m < k {
        return Err(Error::Domain(format!("cannot split {m} points into {k} folds")));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = m / k + usize::from(f < m % k);
        folds.push(idx[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

/// Z-scores every feature with the training mean and standard deviation.
/// Constant training features are left untouched.
pub fn standardize<T: Real>(train: &Dataset<T>, test: &Dataset<T>) -> Result<(Dataset<T>, Dataset<T>)> {
    if train.is_empty() {
        return Err(Error::Data("empty training set".into()));
    }
    let n = train.n_features();
    if !test.is_empty() && test.n_features() != n {
        return Err(Error::Dimension("train and test feature counts differ".into()));
    }
    let m = T::lit(train.len() as f64);
    let mut shift = vec![T::zero(); n];
    let mut scale = vec![T::one(); n];
    for i in 0..n {
        let mean = train.features.iter().map(|r| r[i]).sum::<T>() / m;
        let var = train.features.iter().map(|r| (r[i] - mean) * (r[i] - mean)).sum::<T>() / m;
        if var > T::zero() {
            shift[i] = mean;
            scale[i] = var.sqrt();
        } else {
            log::warn!("feature {} is constant on the training set; left unscaled", i + 1);
        }
    }
    let apply = |ds: &Dataset<T>| -> Dataset<T> {
        let mut out = ds.clone();
        for r in &mut out.features {
            for i in 0..n {
                r[i] = (r[i] - shift[i]) / scale[i];
            }
        }
        out
    };
    Ok((apply(train), apply(test)))
}
