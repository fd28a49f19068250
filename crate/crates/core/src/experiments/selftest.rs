use super::config::ExperimentConfig;
use super::report::{params, Report, ReportRow, SeedTag};
use crate::cocycle::{
    busemann_convergence_probe, crossing_check, monotone_violations, sandwich_holds, EdgeCocycle, TieBreak,
};
use crate::error::Result;
use crate::lattice::{path_order, BoxRegion, Site};
use crate::lpp::{
    brute_force_passage_time, enumerate_geodesics, leftmost_geodesic, lpp_values, lpp_values_wavefront, passage_time,
    rightmost_geodesic,
};
use crate::stationary::{stationary_cocycle, Alpha};
use crate::weights::{WeightDistribution, WeightField};
use rayon::prelude::*;

/// Mismatch counts of the passage-time and geodesic oracles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleCounts {
    pub pairs: usize,
    pub value: usize,
    pub wavefront: usize,
    pub rightmost: usize,
    pub leftmost: usize,
}

impl OracleCounts {
    pub fn violations(&self) -> usize {
        self.value + self.wavefront + self.rightmost + self.leftmost
    }

    fn add(mut self, o: OracleCounts) -> Self {
        self.pairs += o.pairs;
        self.value += o.value;
        self.wavefront += o.wavefront;
        self.rightmost += o.rightmost;
        self.leftmost += o.leftmost;
        self
    }
}

/// Compare DP passage values with brute-force maxima for every `u <= v` in a
/// `side × side` field, and the rightmost/leftmost geodesics with the
/// extreme enumerated geodesics.
pub fn oracle_equivalence(dist: WeightDistribution, seed: u64, side: i64) -> Result<OracleCounts> {
    let region = BoxRegion::square_from_origin(side, side)?;
    let field = WeightField::generate(region, dist, seed)?;
    let hi = region.hi();
    let mut out = OracleCounts::default();
    for u in region.sites() {
        let sub = BoxRegion::new(u, hi)?;
        let dp = lpp_values(&field, u, &sub)?;
        let wf = lpp_values_wavefront(&field, u, &sub)?;
        if dp.values().iter().zip(wf.values()).any(|(a, b)| a.to_bits() != b.to_bits()) {
            out.wavefront += 1;
        }
        for v in sub.sites() {
            out.pairs += 1;
            if dp.get(v)?.to_bits() != brute_force_passage_time(&field, u, v)?.to_bits() {
                out.value += 1;
            }
            let all = enumerate_geodesics(&field, u, v)?;
            let right = rightmost_geodesic(&field, u, v)?;
            let left = leftmost_geodesic(&field, u, v)?;
            let is_max = all.contains(&right) && all.iter().all(|g| path_order(g, &right).is_ok_and(|o| o.is_le()));
            let is_min = all.contains(&left) && all.iter().all(|g| path_order(&left, g).is_ok_and(|o| o.is_le()));
            out.rightmost += usize::from(!is_max);
            out.leftmost += usize::from(!is_min);
        }
    }
    Ok(out)
}

/// Violation counts of the deterministic cocycle identities.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IdentityCounts {
    pub cocycles: usize,
    pub recovery: usize,
    pub closure: usize,
    pub geodesic: usize,
    pub sandwich: usize,
    pub crossing: usize,
    pub probe: usize,
    pub max_recovery: f64,
    pub max_closure: f64,
    pub max_crossing: f64,
}

impl IdentityCounts {
    pub fn violations(&self) -> usize {
        self.recovery + self.closure + self.geodesic + self.sandwich + self.crossing + self.probe
    }

    fn add(mut self, o: IdentityCounts) -> Self {
        self.cocycles += o.cocycles;
        self.recovery += o.recovery;
        self.closure += o.closure;
        self.geodesic += o.geodesic;
        self.sandwich += o.sandwich;
        self.crossing += o.crossing;
        self.probe += o.probe;
        self.max_recovery = self.max_recovery.max(o.max_recovery);
        self.max_closure = self.max_closure.max(o.max_closure);
        self.max_crossing = self.max_crossing.max(o.max_crossing);
        self
    }

    fn record(&mut self, c: &EdgeCocycle, field: &WeightField, tol: f64) -> Result<()> {
        let rec = c.check_recovery(field)?.max_violation;
        let clo = c.check_plaquette().max_defect;
        self.cocycles += 1;
        self.recovery += usize::from(rec > tol);
        self.closure += usize::from(clo > tol);
        self.max_recovery = self.max_recovery.max(rec);
        self.max_closure = self.max_closure.max(clo);
        Ok(())
    }
}

fn start_grid(region: &BoxRegion, per_side: i64) -> Vec<Site> {
    let (lo, w, h) = (region.lo(), region.width() as i64, region.height() as i64);
    let (sx, sy) = ((w / per_side).max(1), (h / per_side).max(1));
    let mut out = Vec::new();
    for b in (0..h).step_by(sy as usize) {
        for a in (0..w).step_by(sx as usize) {
            out.push(lo.offset(a, b));
        }
    }
    out
}

/// Recovery/closure of terminal and stationary cocycles, cocycle geodesics
/// against rightmost geodesics, the `Minus ⪯ Plus` sandwich, crossing
/// monotonicity and monotone Busemann probes, on one `side × side` sample.
pub fn exact_identity_suite(
    dists: &[WeightDistribution],
    alphas: &[f64],
    seed: u64,
    side: i64,
    tol: f64,
) -> Result<IdentityCounts> {
    let region = BoxRegion::square_from_origin(side, side)?;
    let v = region.hi();
    let inner = BoxRegion::new(Site::ORIGIN, v.offset(-1, -1))?;
    let mut out = IdentityCounts::default();
    let starts = start_grid(&inner, 5);
    for &dist in dists {
        let f = WeightField::generate(region, dist, seed)?;
        let c = EdgeCocycle::from_terminal(&f, v, inner)?;
        out.record(&c, &f, tol)?;
        for &u in &starts {
            let ok = match c.cocycle_geodesic(&f, u, TieBreak::Plus) {
                Ok(p) => rightmost_geodesic(&f, u, v)?.truncate_at_level(p.end_level()) == p,
                Err(_) => false,
            };
            out.geodesic += usize::from(!ok);
            out.sandwich += usize::from(!sandwich_holds(&c, u)?);
        }

        let m = side / 3;
        let near = BoxRegion::new(Site::ORIGIN, Site::new(m - 1, m - 1))?;
        let cr = crossing_check(&f, m + side - 1, &near)?;
        out.crossing += usize::from(cr.max_violation > tol);
        out.max_crossing = out.max_crossing.max(cr.max_violation);

        let rail = rightmost_geodesic(&f, Site::ORIGIN, v)?;
        let stride = (side / 25).max(1) as usize;
        let all_levels: Vec<i64> = (1..=rail.end_level()).step_by(stride).collect();
        for x in start_grid(&near, 2) {
            let levels: Vec<i64> = all_levels.iter().copied().filter(|&l| x.le(rail.at_level(l).unwrap())).collect();
            let seq = busemann_convergence_probe(&f, &rail, x, Site::ORIGIN, &levels)?;
            out.probe += monotone_violations(&seq);
        }
        // x on the rail northeast of y = π_k: B_n(x, π_k) <= -L(π_k, x)
        let k = rail.end_level() / 4;
        let (y, x) = (rail.at_level(k).unwrap(), rail.at_level(2 * k).unwrap());
        let bound = -passage_time(&f, y, x)?;
        let levels: Vec<i64> = all_levels.iter().copied().filter(|&l| l >= 2 * k).collect();
        let seq = busemann_convergence_probe(&f, &rail, x, y, &levels)?;
        out.probe += seq.iter().filter(|&&b| b > bound + tol).count();
    }
    if !alphas.is_empty() {
        let f = WeightField::generate(region, WeightDistribution::Exponential { rate: 1.0 }, seed)?;
        for &a in alphas {
            let c = stationary_cocycle(&f, Alpha::new(a)?, seed, region)?;
            out.record(&c, &f, tol)?;
            for &u in &starts {
                out.sandwich += usize::from(!sandwich_holds(&c, u)?);
            }
        }
    }
    Ok(out)
}

const ORACLE_SIDE: i64 = 4;

fn oracle_dists() -> [WeightDistribution; 4] {
    [
        WeightDistribution::Exponential { rate: 1.0 },
        WeightDistribution::Geometric { p: 0.5 },
        WeightDistribution::Uniform01,
        WeightDistribution::TwoPoint { a: 0.0, b: 1.0, prob_a: 0.5 },
    ]
}

/// Oracle equivalence plus the exact identity suite over the configured seeds.
pub fn run_selftest(cfg: &ExperimentConfig) -> Result<Report> {
    const NAME: &str = "selftest";
    let seeds = cfg.seeds.seeds();
    let mut dists = vec![WeightDistribution::Exponential { rate: 1.0 }, WeightDistribution::Geometric { p: 0.5 }];
    if !dists.contains(&cfg.dist) {
        dists.push(cfg.dist);
    }
    let mut rows = Vec::new();
    let mut violations = 0;

    for dist in oracle_dists() {
        let p = params(&[("dist", dist.to_string()), ("side", ORACLE_SIDE.to_string())]);
        let counts: Vec<OracleCounts> =
            seeds.par_iter().map(|&s| oracle_equivalence(dist, s, ORACLE_SIDE)).collect::<Result<_>>()?;
        for (&s, c) in seeds.iter().zip(&counts) {
            rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "oracle_violations", c.violations() as f64));
        }
        let total = counts.iter().fold(OracleCounts::default(), |a, &b| a.add(b));
        rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "oracle_pairs", total.pairs as f64));
        rows.push(ReportRow::new(NAME, SeedTag::All, p, "oracle_violations", total.violations() as f64));
        violations += total.violations();
    }

    for &n in &cfg.sizes {
        let p = params(&[("n", n.to_string())]);
        let counts: Vec<IdentityCounts> = seeds
            .par_iter()
            .map(|&s| exact_identity_suite(&dists, &cfg.alphas, s, n as i64, cfg.tolerance))
            .collect::<Result<_>>()?;
        for (&s, c) in seeds.iter().zip(&counts) {
            rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "identity_violations", c.violations() as f64));
            rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "max_recovery_defect", c.max_recovery));
            rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "max_closure_defect", c.max_closure));
        }
        let t = counts.iter().fold(IdentityCounts::default(), |a, &b| a.add(b));
        for (metric, value) in [
            ("cocycles", t.cocycles as f64),
            ("recovery_violations", t.recovery as f64),
            ("closure_violations", t.closure as f64),
            ("geodesic_violations", t.geodesic as f64),
            ("sandwich_violations", t.sandwich as f64),
            ("crossing_violations", t.crossing as f64),
            ("probe_violations", t.probe as f64),
            ("max_recovery_defect", t.max_recovery),
            ("max_closure_defect", t.max_closure),
            ("max_crossing_violation", t.max_crossing),
        ] {
            rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), metric, value));
        }
        violations += t.violations();
    }
    Ok(Report::new(NAME, rows, violations, seeds))
}
