//! Box-counting dimension of a point cloud: count occupied grid cells at
//! several scales and read the dimension off the log–log slope.

use std::collections::HashSet;

use crate::compact::PointSet;
use crate::error::Error;
use crate::Result;

/// Least-squares fit of `ln N(s)` against `ln (1/s)`.
#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    /// The fitted slope — the dimension estimate.
    pub dimension: f64,
    /// Scales actually used, as given.
    pub scales: Vec<f64>,
    /// Occupied-cell counts per scale.
    pub counts: Vec<usize>,
    /// Root-mean-square residual of the fit in log space; large values mean
    /// the scales are outside the cloud's scaling regime.
    pub fit_rms: f64,
}

/// Estimate the box-counting dimension of `set` over the given cell sizes.
///
/// Needs at least three scales spanning at least two octaves
/// (`max/min ≥ 4`); anything less makes the slope arithmetic meaningless
/// and is rejected as [`Error::DegenerateScales`].
pub fn box_dimension(set: &PointSet, scales: &[f64]) -> Result<DimensionEstimate> {
    if scales.len() < 3 {
        return Err(Error::DegenerateScales(format!(
            "need at least 3 scales, got {}",
            scales.len()
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = 0.0_f64;
    for &s in scales {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::DegenerateScales(format!("scale {s} is not a positive real")));
        }
        min = min.min(s);
        max = max.max(s);
    }
    if max / min < 4.0 - 1e-9 {
        return Err(Error::DegenerateScales(format!(
            "scales span {:.3} octaves, need at least 2 (max/min ≥ 4)",
            (max / min).log2()
        )));
    }

    let mut counts = Vec::with_capacity(scales.len());
    for &s in scales {
        counts.push(occupied_cells(set, s)?);
    }

    // Least squares for y = slope·x + b, x = ln(1/s), y = ln N.
    let n = scales.len() as f64;
    let xs: Vec<f64> = scales.iter().map(|&s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateScales("all scales are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (slope * x + intercept);
        ss_res += r * r;
    }

    Ok(DimensionEstimate {
        dimension: slope,
        scales: scales.to_vec(),
        counts,
        fit_rms: (ss_res / n).sqrt(),
    })
}

fn occupied_cells(set: &PointSet, cell: f64) -> Result<usize> {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for p in set.iter() {
        let mut key = Vec::with_capacity(set.dim());
        for &c in p {
            let k = (c / cell).floor();
            if k.abs() >= 4.6e18 {
                return Err(Error::InvalidParameter(format!(
                    "scale {cell} is too small relative to coordinate {c}"
                )));
            }
            key.push(k as i64);
        }
        seen.insert(key);
    }
    Ok(seen.len())
}
