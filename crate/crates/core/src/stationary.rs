//! Stationary recovering cocycles for Exponential(1) weights.
//!
//! The box `[lo, hi]` is bordered by a ghost row `c2 = hi.c2 + 1` carrying
//! i.i.d. `I ~ Exp(1 - α)` and a ghost column `c1 = hi.c1 + 1` carrying
//! i.i.d. `J ~ Exp(α)`. The interior is filled towards the southwest by
//!
//! ```text
//! I(x) = w(x) + max(0, I(x + e2) - J(x + e1))
//! J(x) = w(x) + max(0, J(x + e1) - I(x + e2))
//! ```
//!
//! so recovery and plaquette closure hold exactly. Increments along any
//! down-right staircase are i.i.d. with the boundary marginals.

use crate::cocycle::{EdgeCocycle, Provenance, TiltVector};
use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Site};
use crate::lpp::passage_time;
use crate::rng::{site_uniform, STREAM_BOUNDARY_COL, STREAM_BOUNDARY_ROW};
use crate::stats;
use crate::tolerances;
use crate::weights::{WeightDistribution, WeightField};
use rayon::prelude::*;

/// Minimum staircase length accepted by [`burke_check`].
pub const MIN_BURKE_SAMPLE: usize = 100;
/// Smallest scale accepted by [`shape_estimate`].
pub const MIN_SHAPE_N: u64 = 32;

/// A validated parameter in `[ALPHA_MARGIN, 1 - ALPHA_MARGIN]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        let m = tolerances::ALPHA_MARGIN;
        if alpha.is_finite() && alpha >= m && alpha <= 1.0 - m {
            Ok(Alpha(alpha))
        } else {
            Err(Error::OutOfRange { name: "alpha", value: alpha })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Rate of the e1-increments.
    pub fn rate_i(self) -> f64 {
        1.0 - self.0
    }

    /// Rate of the e2-increments.
    pub fn rate_j(self) -> f64 {
        self.0
    }
}

/// Ghost boundary value `I` on the row above the box.
#[inline]
fn boundary_i(seed: u64, alpha: Alpha, c1: i64, c2: i64) -> f64 {
    -site_uniform(seed, STREAM_BOUNDARY_ROW, Site::new(c1, c2)).ln() / alpha.rate_i()
}

/// Ghost boundary value `J` on the column right of the box.
#[inline]
fn boundary_j(seed: u64, alpha: Alpha, c1: i64, c2: i64) -> f64 {
    -site_uniform(seed, STREAM_BOUNDARY_COL, Site::new(c1, c2)).ln() / alpha.rate_j()
}

fn check_bulk(bulk: &WeightField, region: &BoxRegion) -> Result<()> {
    match bulk.dist() {
        Some(d) if d.is_exp1() => {}
        _ => return Err(Error::WrongBulkDistribution),
    }
    bulk.covers(region)
}

/// Stationary cocycle on `region` driven by `bulk`, with boundary
/// randomness keyed by `boundary_seed`.
pub fn stationary_cocycle(
    bulk: &WeightField,
    alpha: Alpha,
    boundary_seed: u64,
    region: BoxRegion,
) -> Result<EdgeCocycle> {
    check_bulk(bulk, &region)?;
    let (w, h) = (region.width(), region.height());
    let (lo, hi) = (region.lo(), region.hi());
    let mut inc1 = vec![0.0; region.area()];
    let mut inc2 = vec![0.0; region.area()];
    let mut up: Vec<f64> = (0..w).map(|c| boundary_i(boundary_seed, alpha, lo.c1 + c as i64, hi.c2 + 1)).collect();
    for r in (0..h).rev() {
        let c2 = lo.c2 + r as i64;
        let mut right = boundary_j(boundary_seed, alpha, hi.c1 + 1, c2);
        let row = r * w;
        for c in (0..w).rev() {
            let omega = bulk.at(Site::new(lo.c1 + c as i64, c2));
            let i_up = up[c];
            let d = i_up - right;
            let i = omega + d.max(0.0);
            let j = omega + (-d).max(0.0);
            inc1[row + c] = i;
            inc2[row + c] = j;
            up[c] = i;
            right = j;
        }
    }
    Ok(EdgeCocycle::with_provenance(
        region,
        inc1,
        inc2,
        Provenance::Stationary { alpha: alpha.get(), seed: boundary_seed },
    ))
}

/// Two stationary cocycles on common bulk and common boundary uniforms.
/// Sitewise `I^α <= I^α'` and `J^α >= J^α'`.
pub fn coupled_pair(
    bulk: &WeightField,
    alpha: f64,
    alpha_prime: f64,
    boundary_seed: u64,
    region: BoxRegion,
) -> Result<(EdgeCocycle, EdgeCocycle)> {
    let a = Alpha::new(alpha)?;
    let b = Alpha::new(alpha_prime)?;
    if alpha >= alpha_prime {
        return Err(Error::NotOrdered(alpha, alpha_prime));
    }
    Ok((stationary_cocycle(bulk, a, boundary_seed, region)?, stationary_cocycle(bulk, b, boundary_seed, region)?))
}

/// Count of sites where a coupled pair violates `I^α <= I^α'` or `J^α >= J^α'`.
pub fn coupling_violations(lower: &EdgeCocycle, upper: &EdgeCocycle) -> Result<usize> {
    if lower.region() != upper.region() {
        return Err(Error::DomainMismatch);
    }
    let bad_i = lower.inc1_values().iter().zip(upper.inc1_values()).filter(|(a, b)| a > b).count();
    let bad_j = lower.inc2_values().iter().zip(upper.inc2_values()).filter(|(a, b)| a < b).count();
    Ok(bad_i + bad_j)
}

/// Distributional summary of increments along the southwest staircase of a
/// stationary cocycle: `I` along the bottom row and `J` along the left column.
#[derive(Debug, Clone, PartialEq)]
pub struct BurkeReport {
    pub alpha: f64,
    pub n_i: usize,
    pub n_j: usize,
    pub mean_i: f64,
    pub mean_j: f64,
    pub ks_i: f64,
    pub ks_j: f64,
    pub ks_threshold_i: f64,
    pub ks_threshold_j: f64,
    pub acf1_i: f64,
    pub acf1_j: f64,
    pub acf_band_i: f64,
    pub acf_band_j: f64,
    pub seed: u64,
}

impl BurkeReport {
    pub fn ks_i_passes(&self) -> bool {
        self.ks_i < self.ks_threshold_i
    }

    pub fn ks_j_passes(&self) -> bool {
        self.ks_j < self.ks_threshold_j
    }
}

/// Increments along the southwest staircase of `c`.
pub fn staircase_samples(c: &EdgeCocycle) -> (Vec<f64>, Vec<f64>) {
    let r = c.region();
    let (lo, hi) = (r.lo(), r.hi());
    let i = (lo.c1..=hi.c1).map(|c1| c.inc1(Site::new(c1, lo.c2))).collect();
    let j = (lo.c2..=hi.c2).rev().map(|c2| c.inc2(Site::new(lo.c1, c2))).collect();
    (i, j)
}

/// KS and lag-1 autocorrelation of the staircase increments against
/// `Exp(1 - α)` and `Exp(α)`.
pub fn burke_check(c: &EdgeCocycle, alpha: f64) -> Result<BurkeReport> {
    let a = Alpha::new(alpha)?;
    let (i, j) = staircase_samples(c);
    let got = i.len() + j.len();
    if got < MIN_BURKE_SAMPLE {
        return Err(Error::SampleTooSmall { got, min: MIN_BURKE_SAMPLE });
    }
    let seed = match c.provenance() {
        Provenance::Stationary { seed, .. } => seed,
        _ => 0,
    };
    let band = |n: usize| 2.0 / (n as f64).sqrt();
    Ok(BurkeReport {
        alpha,
        n_i: i.len(),
        n_j: j.len(),
        mean_i: stats::mean(&i),
        mean_j: stats::mean(&j),
        ks_i: stats::ks_statistic(&i, stats::exp_cdf(a.rate_i())),
        ks_j: stats::ks_statistic(&j, stats::exp_cdf(a.rate_j())),
        ks_threshold_i: stats::ks_critical_95(i.len()),
        ks_threshold_j: stats::ks_critical_95(j.len()),
        acf1_i: stats::autocorrelation_lag1(&i),
        acf1_j: stats::autocorrelation_lag1(&j),
        acf_band_i: band(i.len()),
        acf_band_j: band(j.len()),
        seed,
    })
}

/// Mean increments `h = (-1/(1-α), -1/α)`.
pub fn alpha_to_tilt(alpha: f64) -> Result<TiltVector> {
    let a = Alpha::new(alpha)?;
    Ok(TiltVector { h1: -1.0 / a.rate_i(), h2: -1.0 / a.rate_j() })
}

/// Characteristic direction `ξ ∝ ((1-α)², α²)` normalized to the simplex.
pub fn alpha_to_direction(alpha: f64) -> Result<(f64, f64)> {
    let a = Alpha::new(alpha)?;
    let (x, y) = (a.rate_i() * a.rate_i(), a.rate_j() * a.rate_j());
    Ok((x / (x + y), y / (x + y)))
}

/// Exact shape function of Exponential(1) LPP, `(√ξ1 + √ξ2)²`.
pub fn exp_shape(xi: (f64, f64)) -> f64 {
    let s = xi.0.sqrt() + xi.1.sqrt();
    s * s
}

/// Monte Carlo estimate of `L(0, ⌊nξ⌋) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeEstimate {
    pub xi: (f64, f64),
    pub n: u64,
    pub target: Site,
    pub per_seed: Vec<f64>,
    pub mean: f64,
    pub ci95: f64,
    /// `(√ξ1 + √ξ2)²` for Exponential(1) weights.
    pub exact: Option<f64>,
}

impl ShapeEstimate {
    pub fn relative_error(&self) -> Option<f64> {
        self.exact.map(|g| self.mean / g - 1.0)
    }
}

/// `L(0, ⌊nξ⌋) / n`, one sample per seed.
pub fn shape_estimate(dist: WeightDistribution, xi: (f64, f64), n: u64, seeds: &[u64]) -> Result<ShapeEstimate> {
    if n < MIN_SHAPE_N {
        return Err(Error::OutOfRange { name: "n", value: n as f64 });
    }
    if !(xi.0 >= 0.0 && xi.1 >= 0.0 && ((xi.0 + xi.1) - 1.0).abs() <= 1e-12) {
        return Err(Error::OutOfRange { name: "xi", value: xi.0 });
    }
    if seeds.is_empty() {
        return Err(Error::Config("no seeds".into()));
    }
    let dist = dist.validated()?;
    let target = Site::new((n as f64 * xi.0).floor() as i64, (n as f64 * xi.1).floor() as i64);
    let region = BoxRegion::new(Site::ORIGIN, target)?;
    let per_seed = seeds
        .par_iter()
        .map(|&seed| {
            let f = WeightField::generate(region, dist, seed)?;
            Ok(passage_time(&f, Site::ORIGIN, target)? / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = stats::mean(&per_seed);
    let ci95 = if per_seed.len() > 1 { stats::ci95_half_width(&per_seed) } else { f64::NAN };
    let exact = dist.is_exp1().then(|| exp_shape(xi));
    Ok(ShapeEstimate { xi, n, target, per_seed, mean, ci95, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{cocycle_order, TieBreak};
    use crate::lattice::Order;

    fn exp_field(side: i64, seed: u64) -> WeightField {
        let r = BoxRegion::square_from_origin(side, side).unwrap();
        WeightField::generate(r, WeightDistribution::exponential(1.0).unwrap(), seed).unwrap()
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(0.5).is_ok());
        for bad in [0.0, 1.0, -0.1, 1e-7, f64::NAN] {
            assert!(Alpha::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_identities() {
        let f = exp_field(60, 3);
        for alpha in [0.2, 0.5, 0.8] {
            let c = stationary_cocycle(&f, Alpha::new(alpha).unwrap(), 11, *f.region()).unwrap();
            assert!(c.check_recovery(&f).unwrap().max_violation <= 1e-9);
            assert!(c.check_plaquette().max_defect <= 1e-9);
            assert_eq!(c.tie_fraction(), 0.0);
        }
    }

    #[test]
    fn rejects_non_exponential_bulk() {
        let r = BoxRegion::square_from_origin(5, 5).unwrap();
        let f = WeightField::generate(r, WeightDistribution::Uniform01, 1).unwrap();
        assert_eq!(stationary_cocycle(&f, Alpha::new(0.5).unwrap(), 0, r).unwrap_err(), Error::WrongBulkDistribution);
        let g = WeightField::generate(r, WeightDistribution::exponential(2.0).unwrap(), 1).unwrap();
        assert_eq!(stationary_cocycle(&g, Alpha::new(0.5).unwrap(), 0, r).unwrap_err(), Error::WrongBulkDistribution);
    }

    #[test]
    fn sub_box_of_bulk_is_allowed() {
        let f = exp_field(20, 1);
        let r = BoxRegion::new(Site::new(5, 5), Site::new(14, 9)).unwrap();
        let c = stationary_cocycle(&f, Alpha::new(0.4).unwrap(), 2, r).unwrap();
        assert!(c.check_recovery(&f).unwrap().violating_sites.is_empty());
    }

    #[test]
    fn tilt_formulas() {
        assert_eq!(alpha_to_tilt(0.5).unwrap(), TiltVector { h1: -2.0, h2: -2.0 });
        let t = alpha_to_tilt(0.25).unwrap();
        assert!((t.h1 + 4.0 / 3.0).abs() < 1e-15 && t.h2 == -4.0);
        let s = alpha_to_tilt(0.75).unwrap();
        assert_eq!((t.h1, t.h2), (s.h2, s.h1));
        assert_eq!(alpha_to_tilt(0.6).unwrap().order(&alpha_to_tilt(0.4).unwrap()), Order::Precedes);
        assert!(alpha_to_tilt(1.0).is_err());
    }

    #[test]
    fn direction_formulas() {
        assert_eq!(alpha_to_direction(0.5).unwrap(), (0.5, 0.5));
        let d = alpha_to_direction(1.0 / 3.0).unwrap();
        assert!((d.0 - 0.8).abs() < 1e-12 && (d.1 - 0.2).abs() < 1e-12);
        assert!(alpha_to_direction(0.2).unwrap().0 > alpha_to_direction(0.3).unwrap().0);
        let edge = alpha_to_direction(tolerances::ALPHA_MARGIN).unwrap();
        assert!(edge.0 < 1.0 && edge.1 > 0.0);
    }

    #[test]
    fn boundary_coupling_is_monotone() {
        let (a, b) = (Alpha::new(0.3).unwrap(), Alpha::new(0.6).unwrap());
        for c1 in 0..50 {
            assert!(boundary_i(7, a, c1, 10) <= boundary_i(7, b, c1, 10));
            assert!(boundary_j(7, a, 10, c1) >= boundary_j(7, b, 10, c1));
        }
    }

    #[test]
    fn coupled_pair_orders() {
        let f = exp_field(40, 9);
        let (lo, hi) = coupled_pair(&f, 0.35, 0.65, 4, *f.region()).unwrap();
        assert_eq!(coupling_violations(&lo, &hi).unwrap(), 0);
        assert_eq!(cocycle_order(&hi, &lo).unwrap(), Order::Precedes);
        assert_eq!(coupled_pair(&f, 0.5, 0.5, 4, *f.region()).unwrap_err(), Error::NotOrdered(0.5, 0.5));
        assert!(matches!(coupled_pair(&f, 0.0, 0.5, 4, *f.region()), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn burke_small_sample_rejected() {
        let f = exp_field(5, 1);
        let c = stationary_cocycle(&f, Alpha::new(0.5).unwrap(), 1, *f.region()).unwrap();
        assert_eq!(burke_check(&c, 0.5).unwrap_err(), Error::SampleTooSmall { got: 10, min: 100 });
    }

    #[test]
    fn burke_report_fields() {
        let r = BoxRegion::square_from_origin(400, 30).unwrap();
        let f = WeightField::generate(r, WeightDistribution::exponential(1.0).unwrap(), 5).unwrap();
        let c = stationary_cocycle(&f, Alpha::new(0.5).unwrap(), 5, r).unwrap();
        let rep = burke_check(&c, 0.5).unwrap();
        assert_eq!((rep.n_i, rep.n_j, rep.seed), (400, 30, 5));
        assert!((rep.ks_threshold_i - 1.36 / 20.0).abs() < 1e-15);
        assert!(rep.mean_i > 1.5 && rep.mean_i < 2.5);
    }

    #[test]
    fn arrows_follow_min_increment() {
        let f = exp_field(30, 2);
        let c = stationary_cocycle(&f, Alpha::new(0.5).unwrap(), 3, *f.region()).unwrap();
        let p = c.cocycle_geodesic(&f, Site::ORIGIN, TieBreak::Plus).unwrap();
        assert!(!p.is_axis());
    }

    #[test]
    fn shape_preconditions() {
        let d = WeightDistribution::exponential(1.0).unwrap();
        assert!(shape_estimate(d, (0.5, 0.5), 0, &[1]).is_err());
        assert!(shape_estimate(d, (0.5, 0.6), 64, &[1]).is_err());
    }

    #[test]
    fn shape_on_axis_is_law_of_large_numbers() {
        let d = WeightDistribution::two_point(0.0, 1.0, 0.5).unwrap();
        let seeds: Vec<u64> = (0..20).collect();
        let est = shape_estimate(d, (1.0, 0.0), 2000, &seeds).unwrap();
        assert_eq!(est.target, Site::new(2000, 0));
        assert!(est.exact.is_none());
        assert!((est.mean - 0.5).abs() < 0.02, "{}", est.mean);
    }
}
