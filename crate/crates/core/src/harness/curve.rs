use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One point of an ensemble-selection curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub pool_size: usize,
    /// Mean test F-max across repetitions.
    pub mean: f64,
    pub stderr: f64,
    /// Mean size of the selected ensemble.
    pub mean_size: f64,
}

/// Trapezoidal area under `(x, y)` points divided by the x-range, so a
/// curve of F-max values yields a value on the F-max scale.
pub fn auesc(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Curve(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if points
        .windows(2)
        .any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::Curve("x values must be strictly increasing".into()));
    }
    // Integrate deviations from the first value so a flat curve is exact.
    let base = points[0].1;
    let area: f64 = points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * ((w[0].1 - base) + (w[1].1 - base)))
        .sum();
    let span = points[points.len() - 1].0 - points[0].0;
    Ok(base + area / span)
}

/// auESC of a curve; a single-point curve reports its only value.
pub fn curve_auesc(points: &[CurvePoint]) -> Result<f64> {
    match points {
        [] => Err(Error::Curve("empty curve".into())),
        [only] => Ok(only.mean),
        _ => auesc(
            &points
                .iter()
                .map(|p| (p.pool_size as f64, p.mean))
                .collect::<Vec<_>>(),
        ),
    }
}

/// Sample mean and standard error of the mean (0 for a single value).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    if values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

/// Size and performance of selected ensembles relative to the full
/// ensemble at one pool size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsimonyPoint {
    pub pool_size: usize,
    pub size_ratio: f64,
    pub perf_ratio: f64,
}

/// `size_ratio@K = mean selected size / K` and
/// `perf_ratio@K = mean selected F-max / mean full-ensemble F-max`.
pub fn parsimony_ratios(
    selected: &[CurvePoint],
    full: &[CurvePoint],
    checkpoints: &[usize],
) -> Result<Vec<ParsimonyPoint>> {
    checkpoints
        .iter()
        .map(|&k| {
            let find = |curve: &[CurvePoint], which: &str| {
                curve
                    .iter()
                    .find(|p| p.pool_size == k)
                    .copied()
                    .ok_or_else(|| {
                        Error::Report(format!("checkpoint {k} missing from {which} curve"))
                    })
            };
            let sel = find(selected, "selected")?;
            let fe = find(full, "full-ensemble")?;
            Ok(ParsimonyPoint {
                pool_size: k,
                size_ratio: sel.mean_size / k as f64,
                perf_ratio: sel.mean / fe.mean,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(pool_size: usize, mean: f64, mean_size: f64) -> CurvePoint {
        CurvePoint {
            pool_size,
            mean,
            stderr: 0.0,
            mean_size,
        }
    }

    #[test]
    fn auesc_examples() {
        let flat: Vec<(f64, f64)> = (1..=18).map(|k| (10.0 * k as f64, 0.6)).collect();
        assert_eq!(auesc(&flat).unwrap(), 0.6);
        assert_eq!(auesc(&[(10.0, 0.0), (20.0, 1.0)]).unwrap(), 0.5);
        // Uneven spacing weights the longer segment more.
        assert!((auesc(&[(0.0, 0.0), (1.0, 1.0), (3.0, 1.0)]).unwrap() - 2.5 / 3.0).abs() < 1e-15);
        assert!(auesc(&[(1.0, 0.5)]).is_err());
        assert!(auesc(&[(2.0, 0.5), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn stderr_of_identical_values_is_zero() {
        assert_eq!(mean_stderr(&[0.7; 6]), (0.7, 0.0));
        assert_eq!(mean_stderr(&[0.3]), (0.3, 0.0));
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn parsimony_examples() {
        let sel = [pt(60, 0.8, 60.0), pt(120, 0.9, 30.0)];
        let fe = [pt(60, 0.8, 60.0), pt(120, 0.6, 120.0)];
        let r = parsimony_ratios(&sel, &fe, &[60, 120]).unwrap();
        assert_eq!(r[0].size_ratio, 1.0);
        assert_eq!(r[0].perf_ratio, 1.0);
        assert_eq!(r[1].size_ratio, 0.25);
        assert!((r[1].perf_ratio - 1.5).abs() < 1e-15);
        assert!(matches!(
            parsimony_ratios(&sel, &fe, &[180]),
            Err(Error::Report(_))
        ));
    }
}
