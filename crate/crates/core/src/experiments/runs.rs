use super::config::ExperimentConfig;
use super::report::{params, Report, ReportRow, SeedTag};
use crate::cocycle::{EdgeCocycle, TieBreak};
use crate::error::{Error, Result};
use crate::lattice::{coalescence_check, BoxRegion, Coalescence, FinitePath, Site};
use crate::lpp::GeoTree;
use crate::quantile::{example_measure, example_tree, quantile_properties_check, PathMeasure};
use crate::rng::SplitMix;
use crate::stationary::{coupling_violations, shape_estimate, stationary_cocycle, Alpha};
use crate::stats;
use crate::weights::{WeightDistribution, WeightField};
use rayon::prelude::*;

fn exp1() -> WeightDistribution {
    WeightDistribution::Exponential { rate: 1.0 }
}

fn square(lo: i64, hi: i64) -> Result<BoxRegion> {
    BoxRegion::new(Site::new(lo, lo), Site::new(hi, hi))
}

/// Shape estimates over the configured directions and scales, with
/// concavity and symmetry probes.
pub fn run_shape(cfg: &ExperimentConfig) -> Result<Report> {
    const NAME: &str = "shape";
    let seeds = cfg.seeds.seeds();
    let mut rows = Vec::new();
    let mut dirs = cfg.directions.clone();
    dirs.sort_by(f64::total_cmp);
    dirs.dedup();
    for &n in &cfg.sizes {
        let mut est = Vec::new();
        for &x1 in &dirs {
            let e = shape_estimate(cfg.dist, (x1, 1.0 - x1), n, &seeds)?;
            let p = params(&[("n", n.to_string()), ("xi1", format!("{x1:?}"))]);
            for (&s, &v) in seeds.iter().zip(&e.per_seed) {
                rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "L_over_n", v));
            }
            rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "mean", e.mean));
            rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "ci95", e.ci95));
            if let (Some(g), Some(rel)) = (e.exact, e.relative_error()) {
                rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "exact", g));
                rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "rel_error", rel));
            }
            est.push((x1, e.mean, e.ci95));
        }
        for i in 0..est.len() {
            for k in i + 2..est.len() {
                let mid = 0.5 * (est[i].0 + est[k].0);
                if let Some(j) = (i + 1..k).find(|&j| (est[j].0 - mid).abs() < 1e-12) {
                    let margin = est[j].1 - 0.5 * (est[i].1 + est[k].1);
                    let slack = est[j].2 + est[i].2.max(est[k].2);
                    let p = params(&[
                        ("n", n.to_string()),
                        ("xi1_lo", format!("{:?}", est[i].0)),
                        ("xi1_hi", format!("{:?}", est[k].0)),
                    ]);
                    rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "concavity_margin", margin));
                    rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "concavity_slack", slack));
                    rows.push(ReportRow::new(
                        NAME,
                        SeedTag::All,
                        p,
                        "concavity_ok",
                        f64::from(u8::from(margin >= -slack)),
                    ));
                }
            }
        }
        for a in &est {
            if let Some(b) = est.iter().find(|b| a.0 < 0.5 && (b.0 - (1.0 - a.0)).abs() < 1e-12) {
                let p = params(&[("n", n.to_string()), ("xi1", format!("{:?}", a.0))]);
                rows.push(ReportRow::new(NAME, SeedTag::All, p.clone(), "symmetry_gap", (a.1 - b.1).abs()));
                rows.push(ReportRow::new(NAME, SeedTag::All, p, "symmetry_joint_ci", a.2.hypot(b.2)));
            }
        }
    }
    Ok(Report::new(NAME, rows, 0, seeds))
}

/// Outcome for one start pair of the coalescence experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalescencePair {
    pub separation: u64,
    pub start: Site,
    /// First common site of the two arrow paths inside the largest box.
    pub meet: Option<Site>,
}

impl CoalescencePair {
    /// Coalesced inside the window `[0, n - 1]²`.
    pub fn coalesced_within(&self, n: u64) -> bool {
        let n = n as i64;
        self.meet.is_some_and(|m| m.c1 < n && m.c2 < n)
    }
}

/// Follow `Plus` arrows of the stationary cocycle on `[0, N - 1]²`
/// (`N` the largest size) from every start of the grid and from the start
/// shifted by each separation along `e1`, and record where the pairs meet.
pub fn coalescence_pairs(cfg: &ExperimentConfig, alpha: f64, seed: u64) -> Result<Vec<CoalescencePair>> {
    let big = *cfg.sizes.iter().max().ok_or_else(|| Error::Config("empty size list".into()))? as i64;
    let region = square(0, big - 1)?;
    let bulk = WeightField::generate(region, exp1(), seed)?;
    let c = stationary_cocycle(&bulk, Alpha::new(alpha)?, seed, region)?;
    let g = cfg.start_spacing() as i64;
    let k = cfg.starts_per_side as i64;
    let mut out = Vec::new();
    for b in 0..k {
        for a in 0..k {
            let u = Site::new(a * g, b * g);
            let pu = c.arrow_path(u, TieBreak::Plus, usize::MAX)?;
            for &sep in &cfg.separations {
                let meet = if sep == 0 {
                    Some(u)
                } else {
                    let pv = c.arrow_path(u.offset(sep as i64, 0), TieBreak::Plus, usize::MAX)?;
                    first_meeting(&pu, &pv)?
                };
                out.push(CoalescencePair { separation: sep, start: u, meet });
            }
        }
    }
    Ok(out)
}

fn first_meeting(p: &FinitePath, q: &FinitePath) -> Result<Option<Site>> {
    Ok(match coalescence_check(p, q) {
        Ok(Coalescence::CoalescedAt(m)) => Some(m),
        Ok(_) | Err(Error::DisjointLevelRange) => None,
        Err(e) => return Err(e),
    })
}

/// Fraction of start pairs whose arrow paths meet inside nested windows.
pub fn run_coalescence(cfg: &ExperimentConfig) -> Result<Report> {
    const NAME: &str = "coalescence";
    let seeds = cfg.seeds.seeds();
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rows = Vec::new();
    let mut violations = 0;
    for &alpha in &cfg.alphas {
        let per_seed: Vec<Vec<CoalescencePair>> =
            seeds.par_iter().map(|&s| coalescence_pairs(cfg, alpha, s)).collect::<Result<_>>()?;
        for &sep in &cfg.separations {
            let mut prev_fraction = f64::NEG_INFINITY;
            for &n in &sizes {
                let p = params(&[("alpha", format!("{alpha:?}")), ("n", n.to_string()), ("sep", sep.to_string())]);
                let (mut hits, mut total) = (0usize, 0usize);
                for (&s, pairs) in seeds.iter().zip(&per_seed) {
                    let mine: Vec<_> = pairs.iter().filter(|q| q.separation == sep).collect();
                    let h = mine.iter().filter(|q| q.coalesced_within(n)).count();
                    rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "coalesced_pairs", h as f64));
                    rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "pairs", mine.len() as f64));
                    hits += h;
                    total += mine.len();
                }
                let fraction = hits as f64 / total as f64;
                rows.push(ReportRow::new(NAME, SeedTag::All, p, "fraction", fraction));
                if sep == 0 && fraction != 1.0 {
                    violations += 1;
                }
                if fraction < prev_fraction {
                    violations += 1;
                }
                prev_fraction = fraction;
            }
        }
    }
    Ok(Report::new(NAME, rows, violations, seeds))
}

/// Coupled stationary chains over the alpha grid: order violations and the
/// modulus `mean |I^α - I^α'|` as the spacing is halved.
pub fn run_monotone_tilt(cfg: &ExperimentConfig) -> Result<Report> {
    const NAME: &str = "monotone";
    let seeds = cfg.seeds.seeds();
    let mut rows = Vec::new();
    let mut violations = 0;
    for &n in &cfg.sizes {
        let region = square(0, n as i64 - 1)?;
        let per_seed: Vec<(Vec<ReportRow>, usize)> = seeds
            .par_iter()
            .map(|&seed| -> Result<(Vec<ReportRow>, usize)> {
                let bulk = WeightField::generate(region, exp1(), seed)?;
                let build = |a: f64| -> Result<EdgeCocycle> { stationary_cocycle(&bulk, Alpha::new(a)?, seed, region) };
                let grid: Vec<EdgeCocycle> = cfg.alphas.iter().map(|&a| build(a)).collect::<Result<_>>()?;
                let mut out = Vec::new();
                let mut bad = 0;
                for (k, w) in cfg.alphas.windows(2).enumerate() {
                    for r in 0..=cfg.refinements {
                        let ap = w[0] + (w[1] - w[0]) / f64::from(1u32 << r);
                        let upper_owned;
                        let upper = if r == 0 {
                            &grid[k + 1]
                        } else {
                            upper_owned = build(ap)?;
                            &upper_owned
                        };
                        let v = coupling_violations(&grid[k], upper)?;
                        bad += v;
                        let p = params(&[
                            ("alpha", format!("{:?}", w[0])),
                            ("alpha_prime", format!("{ap:?}")),
                            ("n", n.to_string()),
                        ]);
                        let m1 = mean_abs_diff(grid[k].inc1_values(), upper.inc1_values());
                        let m2 = mean_abs_diff(grid[k].inc2_values(), upper.inc2_values());
                        out.push(ReportRow::new(NAME, SeedTag::Seed(seed), p.clone(), "order_violations", v as f64));
                        out.push(ReportRow::new(NAME, SeedTag::Seed(seed), p.clone(), "modulus_I", m1));
                        out.push(ReportRow::new(NAME, SeedTag::Seed(seed), p, "modulus_J", m2));
                    }
                }
                Ok((out, bad))
            })
            .collect::<Result<_>>()?;
        let mut total = 0;
        for (r, v) in per_seed {
            rows.extend(r);
            total += v;
        }
        violations += total;
        rows.push(ReportRow::new(
            NAME,
            SeedTag::All,
            params(&[("n", n.to_string())]),
            "order_violations",
            total as f64,
        ));
        let keys: Vec<String> = {
            let mut k: Vec<String> =
                rows.iter().filter(|r| r.metric == "modulus_I").map(|r| r.params.clone()).collect();
            k.sort();
            k.dedup();
            k
        };
        for p in keys {
            let vals: Vec<f64> =
                rows.iter().filter(|r| r.metric == "modulus_I" && r.params == p).map(|r| r.value).collect();
            rows.push(ReportRow::new(NAME, SeedTag::All, p, "median_modulus_I", stats::median(&vals)));
        }
    }
    Ok(Report::new(NAME, rows, violations, seeds))
}

fn mean_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// Route-A versus route-B comparison at one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessSample {
    pub horizon: i64,
    pub terminal: Site,
    /// Median over the window of `|I_A - I_B|`, gaps below the tolerance counted as zero.
    pub median_gap: f64,
    pub zero_fraction: f64,
    /// KS distance of the route-A `I` sample from `Exp(1 - α)`.
    pub ks_a: f64,
    /// Two-sample KS distance between route-A and route-B `I` samples.
    pub ks_ab: f64,
}

/// Route A: terminal differences toward the points of the stationary `Plus`
/// geodesic rail from the origin at each horizon level. Route B: the
/// stationary cocycle itself. Both are compared on the square of half-width
/// `w` centred at `(0, -offset)`.
pub fn uniqueness_gaps(
    alpha: f64,
    seed: u64,
    horizons: &[i64],
    w: i64,
    offset: i64,
    tolerance: f64,
) -> Result<Vec<UniquenessSample>> {
    let top = *horizons.iter().max().ok_or_else(|| Error::Config("empty horizon list".into()))?;
    let region = BoxRegion::new(Site::new(-w, -offset - w), Site::new(top + 1, top + 1))?;
    let bulk = WeightField::generate(region, exp1(), seed)?;
    let a = Alpha::new(alpha)?;
    let b = stationary_cocycle(&bulk, a, seed, region)?;
    let rail = b.arrow_path(Site::ORIGIN, TieBreak::Plus, top as usize)?;
    let window = BoxRegion::new(Site::new(-w, -offset - w), Site::new(w, -offset + w))?;
    let route_b: Vec<f64> = window.sites().map(|x| b.inc1(x)).collect();
    horizons
        .iter()
        .map(|&h| {
            let v = rail.at_level(h).ok_or(Error::OutOfRange { name: "horizon", value: h as f64 })?;
            if !window.hi().offset(1, 1).le(v) {
                let nan = f64::NAN;
                return Ok(UniquenessSample {
                    horizon: h,
                    terminal: v,
                    median_gap: nan,
                    zero_fraction: nan,
                    ks_a: nan,
                    ks_ab: nan,
                });
            }
            let route_a = EdgeCocycle::from_terminal(&bulk, v, window)?;
            let gaps: Vec<f64> = route_a
                .inc1_values()
                .iter()
                .zip(&route_b)
                .map(|(x, y)| {
                    let g = (x - y).abs();
                    if g <= tolerance {
                        0.0
                    } else {
                        g
                    }
                })
                .collect();
            let zeros = gaps.iter().filter(|&&g| g == 0.0).count();
            Ok(UniquenessSample {
                horizon: h,
                terminal: v,
                median_gap: stats::median(&gaps),
                zero_fraction: zeros as f64 / gaps.len() as f64,
                ks_a: stats::ks_statistic(route_a.inc1_values(), stats::exp_cdf(a.rate_i())),
                ks_ab: stats::ks_two_sample(route_a.inc1_values(), &route_b),
            })
        })
        .collect()
}

/// Per-seed median gaps between the two routes as the horizon grows.
pub fn run_uniqueness_proxy(cfg: &ExperimentConfig) -> Result<Report> {
    const NAME: &str = "uniqueness";
    let seeds = cfg.seeds.seeds();
    let w = cfg.window as i64;
    let off = cfg.window_offset as i64;
    let mut rows = Vec::new();
    for &alpha in &cfg.alphas {
        let per_seed: Vec<Vec<UniquenessSample>> = seeds
            .par_iter()
            .map(|&s| uniqueness_gaps(alpha, s, &cfg.horizons, w, off, cfg.tolerance))
            .collect::<Result<_>>()?;
        let base = |h: i64| {
            params(&[
                ("alpha", format!("{alpha:?}")),
                ("horizon", h.to_string()),
                ("window", w.to_string()),
                ("offset", off.to_string()),
            ])
        };
        for (&s, samples) in seeds.iter().zip(&per_seed) {
            for q in samples {
                let p = base(q.horizon);
                rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "median_gap", q.median_gap));
                rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "zero_fraction", q.zero_fraction));
                rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p.clone(), "ks_route_a", q.ks_a));
                rows.push(ReportRow::new(NAME, SeedTag::Seed(s), p, "ks_routes", q.ks_ab));
            }
        }
        for (k, &h) in cfg.horizons.iter().enumerate() {
            let col = |f: fn(&UniquenessSample) -> f64| per_seed.iter().map(|v| f(&v[k])).collect::<Vec<f64>>();
            let p = base(h);
            rows.push(ReportRow::new(
                NAME,
                SeedTag::All,
                p.clone(),
                "median_of_median_gap",
                stats::median(&col(|q| q.median_gap)),
            ));
            rows.push(ReportRow::new(
                NAME,
                SeedTag::All,
                p.clone(),
                "median_zero_fraction",
                stats::median(&col(|q| q.zero_fraction)),
            ));
            rows.push(ReportRow::new(NAME, SeedTag::All, p, "median_ks_route_a", stats::median(&col(|q| q.ks_a))));
        }
        for k in 0..cfg.horizons.len().saturating_sub(1) {
            let dec = per_seed.iter().filter(|v| v[k + 1].median_gap < v[k].median_gap).count();
            let p = params(&[
                ("alpha", format!("{alpha:?}")),
                ("from", cfg.horizons[k].to_string()),
                ("to", cfg.horizons[k + 1].to_string()),
                ("window", w.to_string()),
                ("offset", off.to_string()),
            ]);
            rows.push(ReportRow::new(NAME, SeedTag::All, p, "decrease_fraction", dec as f64 / seeds.len() as f64));
        }
    }
    Ok(Report::new(NAME, rows, 0, seeds))
}

/// Random measure with up to `max_atoms` atoms on the rays of `tree`.
pub(crate) fn random_measure(tree: &GeoTree, max_atoms: u64, rng: &mut SplitMix) -> Result<PathMeasure> {
    let rays = tree.rays();
    let k = 1 + rng.below(max_atoms.min(rays.len() as u64)) as usize;
    let mut idx: Vec<usize> = (0..rays.len()).collect();
    for i in 0..k {
        let j = i + rng.below((rays.len() - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    let raw: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
    let total: f64 = raw.iter().sum();
    PathMeasure::new(chosen.into_iter().zip(raw).map(|(i, m)| (rays[i].clone(), m / total)).collect())
}

/// Quantile-path identities on random trees and measures, plus the
/// three-atom example.
pub fn run_quantile_demo(cfg: &ExperimentConfig) -> Result<Report> {
    const NAME: &str = "quantile";
    let seeds = cfg.seeds.seeds();
    let per_seed: Vec<(u64, crate::quantile::QuantileReport, usize, u64)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = SplitMix::new(seed);
            let depth = 1 + rng.below(cfg.max_depth) as i64;
            let field = WeightField::generate(square(0, depth - 1)?, cfg.dist, seed)?;
            let tree = GeoTree::build(&field, Site::ORIGIN, depth)?;
            let mu = random_measure(&tree, cfg.max_atoms, &mut rng)?;
            let rep = quantile_properties_check(&tree, &mu, cfg.resolution as usize)?;
            Ok((seed, rep, mu.len(), depth as u64))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut violations = 0;
    let p = params(&[("max_atoms", cfg.max_atoms.to_string()), ("max_depth", cfg.max_depth.to_string())]);
    for (seed, rep, atoms, depth) in &per_seed {
        let t = SeedTag::Seed(*seed);
        rows.push(ReportRow::new(NAME, t, p.clone(), "violations", rep.violations() as f64));
        rows.push(ReportRow::new(NAME, t, p.clone(), "atoms", *atoms as f64));
        rows.push(ReportRow::new(NAME, t, p.clone(), "depth", *depth as f64));
        rows.push(ReportRow::new(
            NAME,
            t,
            p.clone(),
            "charges_trivial_ray",
            f64::from(u8::from(rep.charges_trivial_ray)),
        ));
        violations += rep.violations();
    }
    rows.push(ReportRow::new(NAME, SeedTag::All, p, "violations", violations as f64));
    let ex = example_measure();
    let ex_rep = quantile_properties_check(&example_tree(), &ex, cfg.resolution as usize)?;
    violations += ex_rep.violations();
    for (k, b) in ex.thresholds().iter().enumerate().skip(1) {
        rows.push(ReportRow::new(NAME, SeedTag::All, "instance=example", format!("threshold_{k}"), *b));
    }
    rows.push(ReportRow::new(NAME, SeedTag::All, "instance=example", "violations", ex_rep.violations() as f64));
    Ok(Report::new(NAME, rows, violations, seeds))
}
