//! Quantile paths of a probability measure on the rays of a geodesic tree.
//!
//! For a measure `μ` with atoms `γ_1 ⪯ ... ⪯ γ_m` and cumulative masses
//! `0 = b_0 < b_1 < ... < b_m = 1`, the quantile path at `s ∈ (b_{k-1}, b_k]`
//! is `γ_k`, and `s = 0` maps to the minimal ray of the tree. Equivalently,
//! `q(s)` is the least tree ray `ρ` with `μ{γ ⪯ ρ} >= s`.

use crate::error::{Error, Result};
use crate::lattice::{coalescence_check, Coalescence, FinitePath, Site};
use crate::lpp::GeoTree;
use crate::tolerances;
use std::io::{Read, Write};

/// A finitely supported probability measure on the rays of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMeasure {
    atoms: Vec<(FinitePath, f64)>,
}

impl PathMeasure {
    /// Atoms must be listed in strictly increasing path order with positive
    /// masses summing to one.
    pub fn new(atoms: Vec<(FinitePath, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if let Some((_, m)) = atoms.iter().find(|(_, m)| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidMeasure(format!("non-positive mass {m}")));
        }
        let total: f64 = atoms.iter().map(|(_, m)| m).sum();
        if (total - 1.0).abs() > tolerances::MASS {
            return Err(Error::InvalidMeasure(format!("total mass {total}")));
        }
        for pair in atoms.windows(2) {
            let o =
                crate::lattice::path_order(&pair[0].0, &pair[1].0).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
            if o != crate::lattice::Order::Precedes {
                return Err(Error::InvalidMeasure(format!("atoms out of order: {:?}", o)));
            }
        }
        Ok(PathMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(FinitePath, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Cumulative masses `b_0 = 0, ..., b_m = 1`, the last one exact.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.atoms.len() + 1);
        b.push(0.0);
        let mut acc = 0.0;
        for (_, m) in &self.atoms {
            acc += m;
            b.push(acc);
        }
        *b.last_mut().unwrap() = 1.0;
        b
    }

    /// Whether some atom is an axis ray.
    pub fn charges_trivial_ray(&self) -> bool {
        self.atoms.iter().any(|(p, _)| p.is_axis())
    }

    /// Write `ray_id,mass` and `ray_id,steps` CSV files.
    pub fn write_csv<W1: Write, W2: Write>(&self, masses: W1, rays: W2) -> Result<()> {
        let mut m = csv::Writer::from_writer(masses);
        let mut r = csv::Writer::from_writer(rays);
        m.write_record(["ray_id", "mass"])?;
        r.write_record(["ray_id", "steps"])?;
        for (id, (p, mass)) in self.atoms.iter().enumerate() {
            m.write_record([id.to_string(), format!("{mass:?}")])?;
            r.write_record([id.to_string(), p.step_string()])?;
        }
        m.flush()?;
        r.flush()?;
        Ok(())
    }

    /// Read the two files written by [`PathMeasure::write_csv`]; rays start at `root`.
    pub fn read_csv<R1: Read, R2: Read>(root: Site, masses: R1, rays: R2) -> Result<Self> {
        let mut ray_of = std::collections::BTreeMap::new();
        for rec in csv::Reader::from_reader(rays).records() {
            let rec = rec?;
            let id: u64 = parse_field(&rec, 0)?;
            let steps = rec.get(1).unwrap_or("");
            ray_of.insert(id, FinitePath::parse_steps(root, steps)?);
        }
        let mut atoms = Vec::new();
        for rec in csv::Reader::from_reader(masses).records() {
            let rec = rec?;
            let id: u64 = parse_field(&rec, 0)?;
            let mass: f64 = parse_field(&rec, 1)?;
            let ray = ray_of.remove(&id).ok_or_else(|| Error::Parse(format!("no ray with id {id}")))?;
            atoms.push((ray, mass));
        }
        PathMeasure::new(atoms)
    }
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize) -> Result<T> {
    let text = rec.get(k).ok_or_else(|| Error::Parse(format!("missing column {k}")))?;
    text.trim().parse().map_err(|_| Error::Parse(format!("bad value {text:?}")))
}

/// The step function `s -> q(s)` of a measure on a tree, as indices into the
/// tree's ordered ray list.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileMap {
    rays: Vec<FinitePath>,
    right_isolated: Vec<usize>,
    thresholds: Vec<f64>,
    atom_rays: Vec<usize>,
    /// `F(γ_k) = μ{x ⪯ γ_k}` for every tree ray.
    cdf: Vec<f64>,
}

impl QuantileMap {
    pub fn new(tree: &GeoTree, mu: &PathMeasure) -> Result<Self> {
        let rays = tree.rays();
        let mut atom_rays = Vec::with_capacity(mu.len());
        for (p, _) in mu.atoms() {
            let k = tree
                .position(&rays, p)
                .ok_or_else(|| Error::InvalidMeasure(format!("ray {} is not in the tree", p.step_string())))?;
            atom_rays.push(k);
        }
        let thresholds = mu.thresholds();
        let mut cdf = Vec::with_capacity(rays.len());
        let mut seen = 0;
        for k in 0..rays.len() {
            while seen < atom_rays.len() && atom_rays[seen] <= k {
                seen += 1;
            }
            cdf.push(thresholds[seen]);
        }
        let right_isolated = tree.isolated_rays().right;
        Ok(QuantileMap { rays, right_isolated, thresholds, atom_rays, cdf })
    }

    pub fn rays(&self) -> &[FinitePath] {
        &self.rays
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Tree ray index of each atom.
    pub fn atom_rays(&self) -> &[usize] {
        &self.atom_rays
    }

    /// `μ{x ⪯ γ}` for the tree ray with index `k`.
    pub fn cdf(&self, k: usize) -> f64 {
        self.cdf[k]
    }

    fn check_s(s: f64) -> Result<()> {
        if (0.0..=1.0).contains(&s) {
            Ok(())
        } else {
            Err(Error::SOutOfRange(s))
        }
    }

    /// Index of `q(s)` from the threshold table.
    pub fn index(&self, s: f64) -> Result<usize> {
        Self::check_s(s)?;
        if s == 0.0 {
            return Ok(0);
        }
        let k = self.thresholds.partition_point(|&b| b < s);
        Ok(self.atom_rays[k - 1])
    }

    /// Least right-isolated ray with `F >= s`.
    pub fn index_inf_isolated(&self, s: f64) -> Result<usize> {
        Self::check_s(s)?;
        Ok(self.right_isolated.iter().copied().find(|&k| self.cdf[k] >= s).expect("F = 1 on the last ray"))
    }

    /// Least tree ray with `F >= s`.
    pub fn index_inf_all(&self, s: f64) -> Result<usize> {
        Self::check_s(s)?;
        Ok((0..self.rays.len()).find(|&k| self.cdf[k] >= s).expect("F = 1 on the last ray"))
    }

    pub fn path(&self, s: f64) -> Result<&FinitePath> {
        Ok(&self.rays[self.index(s)?])
    }
}

/// `q(s)` for the measure `μ` on `tree`.
pub fn quantile_path(tree: &GeoTree, mu: &PathMeasure, s: f64) -> Result<FinitePath> {
    QuantileMap::check_s(s)?;
    Ok(QuantileMap::new(tree, mu)?.path(s)?.clone())
}

/// Violation counts of the quantile-path identities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantileReport {
    pub n_points: usize,
    pub monotonicity: usize,
    pub left_continuity: usize,
    pub interval_identity: usize,
    pub inf_agreement: usize,
    pub pushforward: usize,
    /// `s = 0` maps to the minimal ray while the inf over isolated rays
    /// with `F >= 0` is some other ray.
    pub s0_discrepancy: bool,
    pub charges_trivial_ray: bool,
}

impl QuantileReport {
    pub fn violations(&self) -> usize {
        self.monotonicity + self.left_continuity + self.interval_identity + self.inf_agreement + self.pushforward
    }

    pub fn merge(&mut self, other: &QuantileReport) {
        self.n_points += other.n_points;
        self.monotonicity += other.monotonicity;
        self.left_continuity += other.left_continuity;
        self.interval_identity += other.interval_identity;
        self.inf_agreement += other.inf_agreement;
        self.pushforward += other.pushforward;
        self.s0_discrepancy |= other.s0_discrepancy;
        self.charges_trivial_ray |= other.charges_trivial_ray;
    }
}

/// The `s` values probed: a uniform grid with `resolution` cells, every
/// threshold, its float neighbours, and the midpoints between thresholds.
fn probe_points(thresholds: &[f64], resolution: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=resolution).map(|i| i as f64 / resolution as f64).collect();
    for &b in thresholds {
        pts.extend([b, b.next_down(), b.next_up()]);
    }
    for w in thresholds.windows(2) {
        pts.push(0.5 * (w[0] + w[1]));
    }
    pts.retain(|s| (0.0..=1.0).contains(s));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Check monotonicity, left-continuity, the interval identity
/// `{s : q(s) ⪯ γ} = [0, μ{x ⪯ γ}]`, agreement of the isolated-ray and
/// full-tree infima, and the pushforward of Lebesgue measure.
pub fn quantile_properties_check(tree: &GeoTree, mu: &PathMeasure, resolution: usize) -> Result<QuantileReport> {
    let q = QuantileMap::new(tree, mu)?;
    let b = q.thresholds();
    let pts = probe_points(b, resolution.max(1));
    let idx: Vec<usize> = pts.iter().map(|&s| q.index(s)).collect::<Result<_>>()?;
    let mut rep = QuantileReport {
        n_points: pts.len(),
        charges_trivial_ray: mu.charges_trivial_ray(),
        s0_discrepancy: q.index_inf_isolated(0.0)? != q.index(0.0)?,
        ..Default::default()
    };

    rep.monotonicity = idx.windows(2).filter(|w| w[0] > w[1]).count();

    // constant on (b_{k-1}, b_k]
    for (k, w) in b.windows(2).enumerate() {
        let expect = q.atom_rays()[k];
        for (&s, &i) in pts.iter().zip(&idx) {
            if s > w[0] && s <= w[1] && i != expect {
                rep.left_continuity += 1;
            }
        }
    }

    for g in 0..q.rays().len() {
        let f = q.cdf(g);
        for (&s, &i) in pts.iter().zip(&idx) {
            if (i <= g) != (s <= f) {
                rep.interval_identity += 1;
            }
        }
    }

    for (&s, &i) in pts.iter().zip(&idx) {
        let inf_ri = q.index_inf_isolated(s)?;
        let inf_all = q.index_inf_all(s)?;
        if s > 0.0 && (inf_ri != i || inf_all != i) {
            rep.inf_agreement += 1;
        }
    }

    for (k, (_, m)) in mu.atoms().iter().enumerate() {
        if ((b[k + 1] - b[k]) - m).abs() > tolerances::MASS {
            rep.pushforward += 1;
        }
    }
    Ok(rep)
}

/// Interval comparison for one coalescing pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInterval {
    pub ray_u: String,
    pub ray_v: String,
    pub upper_u: f64,
    pub upper_v: f64,
    pub equal: bool,
}

/// Outcome of [`quantile_coalescence_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoalescenceQuantileReport {
    pub pairs: Vec<PairInterval>,
}

impl CoalescenceQuantileReport {
    pub fn violations(&self) -> usize {
        self.pairs.iter().filter(|p| !p.equal).count()
    }
}

/// Upper end of `{s : q(s) ⪯ γ}`, located from the step structure and
/// confirmed at the float neighbours.
fn interval_upper(q: &QuantileMap, g: usize) -> Result<f64> {
    let f = q.cdf(g);
    let inside = q.index(f)? <= g;
    let outside = f >= 1.0 || q.index(f.next_up())? > g;
    if inside && outside {
        Ok(f)
    } else {
        Ok(f64::NAN)
    }
}

/// For each supplied pair `(π, γ)` of coalescing rays carrying equal mass,
/// compare `{s : q_u(s) ⪯ π}` with `{s : q_v(s) ⪯ γ}`.
pub fn quantile_coalescence_check(
    tree_u: &GeoTree,
    tree_v: &GeoTree,
    mu_u: &PathMeasure,
    mu_v: &PathMeasure,
    pairs: &[(FinitePath, FinitePath)],
) -> Result<CoalescenceQuantileReport> {
    let qu = QuantileMap::new(tree_u, mu_u)?;
    let qv = QuantileMap::new(tree_v, mu_v)?;
    if pairs.len() != mu_u.len() {
        return Err(Error::PairingInvalid(format!("{} pairs for {} atoms", pairs.len(), mu_u.len())));
    }
    let mass_of = |mu: &PathMeasure, p: &FinitePath| mu.atoms().iter().find(|(a, _)| a == p).map(|(_, m)| *m);
    let mut out = Vec::with_capacity(pairs.len());
    for (pi, gamma) in pairs {
        let mu_mass =
            mass_of(mu_u, pi).ok_or_else(|| Error::PairingInvalid(format!("{} is not an atom", pi.step_string())))?;
        let mv_mass = mass_of(mu_v, gamma)
            .ok_or_else(|| Error::PairingInvalid(format!("{} is not an atom", gamma.step_string())))?;
        if (mu_mass - mv_mass).abs() > tolerances::MASS {
            return Err(Error::PairingInvalid(format!("masses {mu_mass} and {mv_mass} differ")));
        }
        if !matches!(coalescence_check(pi, gamma)?, Coalescence::CoalescedAt(_)) {
            return Err(Error::PairingInvalid(format!(
                "{} and {} do not coalesce",
                pi.step_string(),
                gamma.step_string()
            )));
        }
        let gu = qu.rays().iter().position(|r| r == pi).expect("atom is a tree ray");
        let gv = qv.rays().iter().position(|r| r == gamma).expect("atom is a tree ray");
        let (upper_u, upper_v) = (interval_upper(&qu, gu)?, interval_upper(&qv, gv)?);
        out.push(PairInterval {
            ray_u: pi.step_string(),
            ray_v: gamma.step_string(),
            upper_u,
            upper_v,
            equal: (upper_u - upper_v).abs() <= tolerances::MASS,
        });
    }
    Ok(CoalescenceQuantileReport { pairs: out })
}

/// Tree used by the three-atom example: root at the origin, horizon 4,
/// rays `UUUU ≺ UUUR ≺ URUR ≺ RRRU ≺ RRRR`.
pub fn example_tree() -> GeoTree {
    let rays: Vec<FinitePath> =
        ["UUUR", "URUR", "RRRU"].iter().map(|t| FinitePath::parse_steps(Site::ORIGIN, t).unwrap()).collect();
    GeoTree::from_rays(Site::ORIGIN, 4, &rays).expect("consistent rays")
}

/// Masses 0.2, 0.5, 0.3 on the three non-axis rays of [`example_tree`].
pub fn example_measure() -> PathMeasure {
    let atoms = [("UUUR", 0.2), ("URUR", 0.5), ("RRRU", 0.3)]
        .iter()
        .map(|(t, m)| (FinitePath::parse_steps(Site::ORIGIN, t).unwrap(), *m))
        .collect();
    PathMeasure::new(atoms).unwrap()
}
