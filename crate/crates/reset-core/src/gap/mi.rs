//! Plug-in (conditional) mutual information over per-dimension equal-width
//! histograms, in bits, and the data-processing-inequality check.
//!
//! Conditioning bins the conditioning vectors on the same kind of grid and
//! averages the within-bin mutual information weighted by bin mass. The
//! plug-in estimator has positive bias at finite n; inequality checks carry
//! the fixed slack [`EPS_MI`] to absorb it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Estimator slack, in bits, for inequality checks.
pub const EPS_MI: f64 = 0.05;

/// Conditional mutual information estimates for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiReport {
    /// I(start ; intermediate | goal), bits.
    pub i_s0_sb: f64,
    /// I(start ; reduced | goal), bits.
    pub i_s0_sa: f64,
    pub bins: usize,
    pub n: usize,
}

impl MiReport {
    pub fn dpi_holds(&self) -> bool {
        self.i_s0_sa <= self.i_s0_sb + EPS_MI
    }
}

/// Assign each row a per-dimension equal-width bin key over the sample's own
/// range. Degenerate dimensions (no spread) map to bin zero.
fn bin_keys(samples: &[Vec<f64>], bins: usize) -> Vec<Vec<u8>> {
    assert!(bins >= 2 && bins <= u8::MAX as usize);
    assert!(!samples.is_empty());
    let d = samples[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in samples {
        for j in 0..d {
            lo[j] = lo[j].min(row[j]);
            hi[j] = hi[j].max(row[j]);
        }
    }
    samples
        .iter()
        .map(|row| {
            (0..d)
                .map(|j| {
                    let range = hi[j] - lo[j];
                    if range <= 0.0 {
                        0u8
                    } else {
                        let idx = ((row[j] - lo[j]) / range * bins as f64).floor() as usize;
                        idx.min(bins - 1) as u8
                    }
                })
                .collect()
        })
        .collect()
}

/// Plug-in MI in bits between two pre-binned discrete variables, restricted
/// to the given sample indices.
fn discrete_mi(xk: &[Vec<u8>], yk: &[Vec<u8>], idx: &[usize]) -> f64 {
    let n = idx.len() as f64;
    let mut joint: BTreeMap<(&[u8], &[u8]), usize> = BTreeMap::new();
    let mut mx: BTreeMap<&[u8], usize> = BTreeMap::new();
    let mut my: BTreeMap<&[u8], usize> = BTreeMap::new();
    for &i in idx {
        *joint.entry((&xk[i], &yk[i])).or_insert(0) += 1;
        *mx.entry(&xk[i]).or_insert(0) += 1;
        *my.entry(&yk[i]).or_insert(0) += 1;
    }
    let mut mi = 0.0;
    for ((x, y), c) in &joint {
        let pxy = *c as f64 / n;
        let px = mx[x] as f64 / n;
        let py = my[y] as f64 / n;
        mi += pxy * (pxy / (px * py)).log2();
    }
    mi.max(0.0)
}

/// Plug-in (conditional) mutual information in bits between `x` and `y`,
/// optionally conditioned on `cond`, over `bins` equal-width bins per
/// dimension. Returns 0 for fully degenerate inputs.
pub fn mi_binned(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    cond: Option<&[Vec<f64>]>,
    bins: usize,
) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(bins >= 2);
    let n = x.len();
    let xk = bin_keys(x, bins);
    let yk = bin_keys(y, bins);
    match cond {
        None => {
            let idx: Vec<usize> = (0..n).collect();
            discrete_mi(&xk, &yk, &idx)
        }
        Some(c) => {
            assert_eq!(c.len(), n);
            let ck = bin_keys(c, bins);
            let mut groups: BTreeMap<&[u8], Vec<usize>> = BTreeMap::new();
            for (i, key) in ck.iter().enumerate() {
                groups.entry(key).or_default().push(i);
            }
            let mut cmi = 0.0;
            for idx in groups.values() {
                let w = idx.len() as f64 / n as f64;
                cmi += w * discrete_mi(&xk, &yk, idx);
            }
            cmi
        }
    }
}

/// Data-processing check: processing the intermediate states cannot add
/// information about the starts, up to estimator slack.
pub fn dpi_check(
    s0: &[Vec<f64>],
    sb: &[Vec<f64>],
    sa: &[Vec<f64>],
    goal: &[Vec<f64>],
    bins: usize,
) -> bool {
    mi_report(s0, sb, sa, goal, bins).dpi_holds()
}

/// Both conditional MI estimates of the data-processing comparison.
pub fn mi_report(
    s0: &[Vec<f64>],
    sb: &[Vec<f64>],
    sa: &[Vec<f64>],
    goal: &[Vec<f64>],
    bins: usize,
) -> MiReport {
    MiReport {
        i_s0_sb: mi_binned(s0, sb, Some(goal), bins),
        i_s0_sa: mi_binned(s0, sa, Some(goal), bins),
        bins,
        n: s0.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn uniform_rows(n: usize, d: usize, tag: &str) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut rng = stream(91, tag, i as u64);
                (0..d).map(|_| rng.gen_range(0.0..1.0)).collect()
            })
            .collect()
    }

    #[test]
    fn independent_variables_have_near_zero_mi() {
        let x = uniform_rows(4000, 1, "x");
        let y = uniform_rows(4000, 1, "y");
        let mi = mi_binned(&x, &y, None, 4);
        assert!(mi.abs() <= EPS_MI, "mi={mi}");
    }

    #[test]
    fn fair_bit_copy_has_one_bit() {
        let x: Vec<Vec<f64>> = (0..2000)
            .map(|i| vec![if i % 2 == 0 { 0.25 } else { 0.75 }])
            .collect();
        let mi = mi_binned(&x, &x, None, 2);
        assert!((mi - 1.0).abs() < 1e-12, "mi={mi}");
    }

    #[test]
    fn collapse_cannot_gain_information() {
        let x = uniform_rows(2000, 1, "cx");
        let sign: Vec<Vec<f64>> = x
            .iter()
            .map(|r| vec![if r[0] >= 0.5 { 1.0 } else { -1.0 }])
            .collect();
        let self_mi = mi_binned(&x, &x, None, 8);
        let collapsed = mi_binned(&x, &sign, None, 8);
        assert!(collapsed <= self_mi + 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let x = uniform_rows(600, 2, "sx");
        let y: Vec<Vec<f64>> = x
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut rng = stream(93, "sy", i as u64);
                vec![r[0] * 0.7 + rng.gen_range(0.0..0.3), rng.gen_range(0.0..1.0)]
            })
            .collect();
        let a = mi_binned(&x, &y, None, 5);
        let b = mi_binned(&y, &x, None, 5);
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn degenerate_single_bin_is_zero() {
        let x = vec![vec![0.5]; 100];
        assert_eq!(mi_binned(&x, &x, None, 8), 0.0);
    }

    #[test]
    fn estimates_are_nonnegative() {
        let x = uniform_rows(300, 3, "nx");
        let y = uniform_rows(300, 3, "ny");
        let g = uniform_rows(300, 2, "ng");
        assert!(mi_binned(&x, &y, Some(&g), 4) >= 0.0);
        assert!(mi_binned(&x, &y, None, 4) >= 0.0);
    }

    #[test]
    fn dpi_holds_for_deterministic_maps() {
        let n = 2000;
        let s0 = uniform_rows(n, 3, "d0");
        let sb = s0.clone();
        let goal = uniform_rows(n, 2, "dg");

        // Identity, constant, coordinate projection, coordinate collapse.
        let maps: Vec<Box<dyn Fn(&[f64]) -> Vec<f64>>> = vec![
            Box::new(|r: &[f64]| r.to_vec()),
            Box::new(|_: &[f64]| vec![0.3, 0.3, 0.3]),
            Box::new(|r: &[f64]| vec![r[0]]),
            Box::new(|r: &[f64]| vec![if r[1] >= 0.5 { 1.0 } else { 0.0 }, r[2]]),
        ];
        for (mi_case, map) in maps.iter().enumerate() {
            let sa: Vec<Vec<f64>> = sb.iter().map(|r| map(r)).collect();
            assert!(
                dpi_check(&s0, &sb, &sa, &goal, 8),
                "map {mi_case} violated the data-processing check"
            );
        }
    }

    #[test]
    fn constant_processing_carries_no_information() {
        let n = 1500;
        let s0 = uniform_rows(n, 2, "c0");
        let sb = s0.clone();
        let sa = vec![vec![0.0, 0.0]; n];
        let goal = uniform_rows(n, 2, "cg");
        let report = mi_report(&s0, &sb, &sa, &goal, 8);
        assert!(report.i_s0_sa.abs() < 1e-12);
        assert!(report.dpi_holds());
    }
}
