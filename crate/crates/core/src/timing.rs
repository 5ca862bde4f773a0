//! Timing of the two algorithm phases over a sweep of random hull sizes.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::mscomplex::build_with_timings;
use crate::poly::{make_random_hull, Origin};

pub const DEFAULT_SIZES: [usize; 3] = [100, 1_000, 10_000];
pub const DEFAULT_REPETITIONS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub faces: usize,
    /// Medians over repetitions, in milliseconds.
    pub steps_1_3_ms: f64,
    pub steps_4_5_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub slope_1_3: f64,
    pub slope_4_5: f64,
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Whether every pair of sizes grows by at most `factor` times the ratio
/// predicted by `y ~ n^power`.
pub fn within_power_growth(rows: &[(usize, f64)], power: f64, factor: f64) -> bool {
    rows.iter().enumerate().all(|(i, &(n1, t1))| {
        rows[i + 1..]
            .iter()
            .all(|&(n2, t2)| t2 / t1 <= factor * (n2 as f64 / n1 as f64).powf(power))
    })
}

/// Times the pipeline on random hulls with the centroid as reference point.
/// Hulls are built outside the timed region. Each repetition uses a new seed.
pub fn scaling_sweep(
    sizes: &[usize],
    repetitions: usize,
    seed: u64,
) -> Result<ScalingReport, Error> {
    let mut rows = Vec::new();
    for &n in sizes {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut faces = 0;
        for r in 0..repetitions.max(1) {
            let poly = make_random_hull(n, seed.wrapping_add(r as u64))?;
            faces = poly.num_faces();
            let rp = poly.with_reference(Origin::Centroid)?;
            let (_, t) = build_with_timings(&rp)?;
            a.push(t.steps_1_3.as_secs_f64() * 1e3);
            b.push(t.steps_4_5.as_secs_f64() * 1e3);
        }
        rows.push(ScalingRow {
            n,
            faces,
            steps_1_3_ms: median(&mut a),
            steps_4_5_ms: median(&mut b),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let slope = |f: fn(&ScalingRow) -> f64| {
        if rows.len() < 2 {
            f64::NAN
        } else {
            loglog_slope(&xs, &rows.iter().map(f).collect::<Vec<_>>())
        }
    };
    let slope_1_3 = slope(|r| r.steps_1_3_ms);
    let slope_4_5 = slope(|r| r.steps_4_5_ms);
    Ok(ScalingReport {
        rows,
        slope_1_3,
        slope_4_5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [10.0, 100.0, 1000.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn growth_check() {
        assert!(within_power_growth(&[(100, 1.0), (1000, 15.0)], 1.0, 2.0));
        assert!(!within_power_growth(&[(100, 1.0), (1000, 25.0)], 1.0, 2.0));
    }

    #[test]
    fn small_sweep_runs() {
        let r = scaling_sweep(&[50, 100], 2, 1).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.slope_1_3.is_finite());
    }
}
