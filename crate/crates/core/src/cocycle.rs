//! Recovering cocycles on a box, stored as edge increments.
//!
//! `I(x) = B(x, x + e1)` and `J(x) = B(x, x + e2)` are kept for every site of
//! the box; `B(x, y)` for general pairs is obtained by telescoping. A
//! cocycle *recovers* a weight field when `min(I(x), J(x)) = w(x)`, and is
//! *closed* when `I(x) + J(x + e1) = J(x) + I(x + e2)` on every plaquette.

use crate::error::{Error, Result};
use crate::lattice::{path_order, site_order, BoxRegion, FinitePath, Order, Site, Step};
use crate::lpp::TerminalGrid;
use crate::tolerances;
use crate::weights::WeightField;
use std::io::Write;
use std::sync::OnceLock;

/// How a cocycle was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    /// Finite Busemann approximant `L(x, v) - L(y, v)`.
    FromTerminal(Site),
    /// Exponential stationary construction.
    Stationary {
        alpha: f64,
        seed: u64,
    },
    Raw,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::FromTerminal(v) => write!(f, "from_terminal{v}"),
            Provenance::Stationary { alpha, seed } => write!(f, "stationary(alpha={alpha},seed={seed})"),
            Provenance::Raw => write!(f, "raw"),
        }
    }
}

/// Edge increments of a cocycle on a box.
#[derive(Debug, Clone)]
pub struct EdgeCocycle {
    region: BoxRegion,
    inc1: Vec<f64>,
    inc2: Vec<f64>,
    provenance: Provenance,
    closure: OnceLock<PlaquetteReport>,
}

/// Tie-breaking rule for arrow fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TieBreak {
    /// `E1` at ties.
    Plus,
    /// `E2` at ties.
    Minus,
}

/// Outcome of [`EdgeCocycle::check_recovery`].
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub max_violation: f64,
    pub violating_sites: Vec<Site>,
    pub n_checked: usize,
}

/// Outcome of [`EdgeCocycle::check_plaquette`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlaquetteReport {
    pub max_defect: f64,
    pub worst: Option<Site>,
    pub n_violations: usize,
    pub n_checked: usize,
}

/// A vector ordered by `h <= h'` iff `h1 <= h1'` and `h2 >= h2'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltVector {
    pub h1: f64,
    pub h2: f64,
}

impl TiltVector {
    pub fn order(&self, other: &TiltVector) -> Order {
        let le = self.h1 <= other.h1 && self.h2 >= other.h2;
        let ge = self.h1 >= other.h1 && self.h2 <= other.h2;
        match (le, ge) {
            (true, true) => Order::Equal,
            (true, false) => Order::Precedes,
            (false, true) => Order::Succeeds,
            (false, false) => Order::Incomparable,
        }
    }
}

/// Empirical tilt with sitewise standard errors. The increments of a
/// cocycle are correlated, so the errors are indicative only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltEstimate {
    pub tilt: TiltVector,
    pub se1: f64,
    pub se2: f64,
    pub n_sites: usize,
}

/// Outcome of [`crossing_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub level: i64,
    pub n_terminals: usize,
    pub n_checked: usize,
    pub max_violation: f64,
    pub n_violations: usize,
}

impl EdgeCocycle {
    /// A cocycle from explicit increments (row-major over `region`).
    pub fn raw(region: BoxRegion, inc1: Vec<f64>, inc2: Vec<f64>) -> Result<Self> {
        if inc1.len() != region.area() || inc2.len() != region.area() {
            return Err(Error::DomainMismatch);
        }
        Ok(Self::with_provenance(region, inc1, inc2, Provenance::Raw))
    }

    pub(crate) fn with_provenance(region: BoxRegion, inc1: Vec<f64>, inc2: Vec<f64>, provenance: Provenance) -> Self {
        EdgeCocycle { region, inc1, inc2, provenance, closure: OnceLock::new() }
    }

    /// Finite Busemann approximant toward the terminal `v`:
    /// `I(x) = L(x, v) - L(x + e1, v)`, `J(x) = L(x, v) - L(x + e2, v)`.
    ///
    /// Every site of `region` must satisfy `x + e1 + e2 <= v`.
    pub fn from_terminal(field: &WeightField, v: Site, region: BoxRegion) -> Result<Self> {
        let corner = region.hi().offset(1, 1);
        if !corner.le(v) {
            return Err(Error::TerminalNotNortheast { terminal: v, site: region.hi() });
        }
        let grid = TerminalGrid::new(field, region.lo(), v)?;
        let mut inc1 = Vec::with_capacity(region.area());
        let mut inc2 = Vec::with_capacity(region.area());
        for x in region.sites() {
            let here = grid.at(x);
            inc1.push(here - grid.at(x.step(Step::E1)));
            inc2.push(here - grid.at(x.step(Step::E2)));
        }
        Ok(Self::with_provenance(region, inc1, inc2, Provenance::FromTerminal(v)))
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn inc1_values(&self) -> &[f64] {
        &self.inc1
    }

    pub fn inc2_values(&self) -> &[f64] {
        &self.inc2
    }

    /// `I(x) = B(x, x + e1)`.
    #[inline]
    pub fn inc1(&self, x: Site) -> f64 {
        self.inc1[self.region.index(x)]
    }

    /// `J(x) = B(x, x + e2)`.
    #[inline]
    pub fn inc2(&self, x: Site) -> f64 {
        self.inc2[self.region.index(x)]
    }

    #[inline]
    pub fn increment(&self, x: Site, s: Step) -> f64 {
        match s {
            Step::E1 => self.inc1(x),
            Step::E2 => self.inc2(x),
        }
    }

    /// Recovery defect `|min(I, J) - w|` over the box.
    pub fn check_recovery(&self, field: &WeightField) -> Result<RecoveryReport> {
        if field.covers(&self.region).is_err() {
            return Err(Error::DomainMismatch);
        }
        let mut max_violation: f64 = 0.0;
        let mut violating_sites = Vec::new();
        for (k, x) in self.region.sites().enumerate() {
            let d = (self.inc1[k].min(self.inc2[k]) - field.at(x)).abs();
            max_violation = max_violation.max(d);
            if d > tolerances::IDENTITY {
                violating_sites.push(x);
            }
        }
        Ok(RecoveryReport { max_violation, violating_sites, n_checked: self.region.area() })
    }

    /// Plaquette closure defect `|I(x) + J(x+e1) - J(x) - I(x+e2)|` for all
    /// `x` with `x + e1 + e2` in the box. Cached after the first call.
    pub fn check_plaquette(&self) -> PlaquetteReport {
        self.closure
            .get_or_init(|| {
                let (w, h) = (self.region.width(), self.region.height());
                let mut rep = PlaquetteReport { max_defect: 0.0, worst: None, n_violations: 0, n_checked: 0 };
                for r in 0..h.saturating_sub(1) {
                    for c in 0..w - 1 {
                        let k = r * w + c;
                        let d = (self.inc1[k] + self.inc2[k + 1] - self.inc2[k] - self.inc1[k + w]).abs();
                        rep.n_checked += 1;
                        if d > rep.max_defect || rep.worst.is_none() {
                            if d > rep.max_defect {
                                rep.max_defect = d;
                            }
                            rep.worst = Some(self.region.site_at(k));
                        }
                        if d > tolerances::IDENTITY {
                            rep.n_violations += 1;
                        }
                    }
                }
                rep
            })
            .clone()
    }

    /// `B(x, y)` along the staircase `x -> (y.c1, x.c2) -> y`.
    pub fn evaluate(&self, x: Site, y: Site) -> Result<f64> {
        for z in [x, y] {
            if !self.region.contains(z) {
                return Err(Error::OutOfBox(z));
            }
        }
        let defect = self.check_plaquette().max_defect;
        if defect > tolerances::IDENTITY {
            return Err(Error::ClosureViolated(defect));
        }
        let mut acc = 0.0;
        if y.c1 >= x.c1 {
            for c in x.c1..y.c1 {
                acc += self.inc1(Site::new(c, x.c2));
            }
        } else {
            for c in y.c1..x.c1 {
                acc -= self.inc1(Site::new(c, x.c2));
            }
        }
        if y.c2 >= x.c2 {
            for c in x.c2..y.c2 {
                acc += self.inc2(Site::new(y.c1, c));
            }
        } else {
            for c in y.c2..x.c2 {
                acc -= self.inc2(Site::new(y.c1, c));
            }
        }
        Ok(acc)
    }

    /// Empirical tilt `h = -(mean I, mean J)` over the whole box.
    pub fn tilt_estimate(&self) -> TiltEstimate {
        self.tilt_estimate_on(&self.region).expect("own region")
    }

    /// Empirical tilt over a sub-box.
    pub fn tilt_estimate_on(&self, window: &BoxRegion) -> Result<TiltEstimate> {
        if !self.region.contains_box(window) {
            return Err(Error::DomainMismatch);
        }
        let (a, b): (Vec<f64>, Vec<f64>) = window.sites().map(|x| (self.inc1(x), self.inc2(x))).unzip();
        let n = a.len();
        let se = |v: &[f64]| (crate::stats::variance(v) / n as f64).sqrt();
        Ok(TiltEstimate {
            tilt: TiltVector { h1: -crate::stats::mean(&a), h2: -crate::stats::mean(&b) },
            se1: se(&a),
            se2: se(&b),
            n_sites: n,
        })
    }

    /// Recovery-minimal step at `x`.
    #[inline]
    pub fn arrow(&self, x: Site, tie: TieBreak) -> Step {
        let k = self.region.index(x);
        let (i, j) = (self.inc1[k], self.inc2[k]);
        match tie {
            TieBreak::Plus if i <= j => Step::E1,
            TieBreak::Minus if i < j => Step::E1,
            _ => Step::E2,
        }
    }

    /// Arrow at every site, row-major.
    pub fn arrow_field(&self, tie: TieBreak) -> Vec<Step> {
        self.region.sites().map(|x| self.arrow(x, tie)).collect()
    }

    /// Fraction of sites where `I(x) == J(x)` exactly.
    pub fn tie_fraction(&self) -> f64 {
        let ties = self.inc1.iter().zip(&self.inc2).filter(|(a, b)| a == b).count();
        ties as f64 / self.region.area() as f64
    }

    /// Follow arrows from `u` until the path leaves the box (the first site
    /// outside is included) or `max_steps` steps have been taken.
    pub fn arrow_path(&self, u: Site, tie: TieBreak, max_steps: usize) -> Result<FinitePath> {
        if !self.region.contains(u) {
            return Err(Error::OutOfBox(u));
        }
        let mut steps = Vec::new();
        let mut x = u;
        while self.region.contains(x) && steps.len() < max_steps {
            let s = self.arrow(x, tie);
            steps.push(s);
            x = x.step(s);
        }
        Ok(FinitePath::new(u, steps))
    }

    /// Cocycle geodesic from `u`: the arrow path, after checking closure on
    /// the box and recovery along the path.
    pub fn cocycle_geodesic(&self, field: &WeightField, u: Site, tie: TieBreak) -> Result<FinitePath> {
        let defect = self.check_plaquette().max_defect;
        if defect > tolerances::IDENTITY {
            return Err(Error::ClosureViolated(defect));
        }
        let path = self.arrow_path(u, tie, usize::MAX)?;
        for (k, &s) in path.steps().iter().enumerate() {
            let x = path.vertices()[k];
            let w = field.get(x).map_err(|_| Error::DomainMismatch)?;
            let d = (self.increment(x, s) - w).abs();
            if d > tolerances::IDENTITY {
                return Err(Error::RecoveryViolated(d));
            }
        }
        Ok(path)
    }

    /// CSV with header `c1,c2,I,J`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["c1", "c2", "I", "J"])?;
        for (k, x) in self.region.sites().enumerate() {
            w.write_record([x.c1.to_string(), x.c2.to_string(), self.inc1[k].to_string(), self.inc2[k].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Southeast order on cocycles: `B <= B'` iff `I >= I'` and `J <= J'` sitewise,
/// with equality up to the identity tolerance.
pub fn cocycle_order(a: &EdgeCocycle, b: &EdgeCocycle) -> Result<Order> {
    if a.region != b.region {
        return Err(Error::DomainMismatch);
    }
    let tol = tolerances::IDENTITY;
    let mut less = false;
    let mut greater = false;
    for k in 0..a.region.area() {
        let (i, ip) = (a.inc1[k], b.inc1[k]);
        let (j, jp) = (a.inc2[k], b.inc2[k]);
        if i > ip + tol || j < jp - tol {
            less = true;
        }
        if i < ip - tol || j > jp + tol {
            greater = true;
        }
        if less && greater {
            break;
        }
    }
    Ok(Order::from_flags(less, greater))
}

/// Path-crossing monotonicity of terminal differences.
///
/// For `⪯`-adjacent terminals `w ⪯ w'` on `level` with `w, w' >= region.hi + e1 + e2`,
/// checks `L(x,w) - L(x+e1,w) >= L(x,w') - L(x+e1,w')` and
/// `L(x,w) - L(x+e2,w) <= L(x,w') - L(x+e2,w')` for every `x` in `region`.
pub fn crossing_check(field: &WeightField, level: i64, region: &BoxRegion) -> Result<CrossingReport> {
    let corner = region.hi().offset(1, 1);
    let terminals: Vec<Site> = (corner.c1..=level - corner.c2).map(|c1| Site::new(c1, level - c1)).collect();
    let mut rep =
        CrossingReport { level, n_terminals: terminals.len(), n_checked: 0, max_violation: 0.0, n_violations: 0 };
    if terminals.is_empty() {
        return Ok(rep);
    }
    // ascending in the southeast order: c1 increasing
    let grids =
        terminals.iter().rev().map(|&w| TerminalGrid::new(field, region.lo(), w)).collect::<Result<Vec<_>>>()?;
    let grids: Vec<TerminalGrid> = grids.into_iter().rev().collect();
    for pair in grids.windows(2) {
        let (g, gp) = (&pair[0], &pair[1]);
        debug_assert_eq!(site_order(g.terminal(), gp.terminal()), Order::Precedes);
        for x in region.sites() {
            let here = g.at(x);
            let here_p = gp.at(x);
            let v1 = (here_p - gp.at(x.step(Step::E1))) - (here - g.at(x.step(Step::E1)));
            let v2 = (here - g.at(x.step(Step::E2))) - (here_p - gp.at(x.step(Step::E2)));
            for v in [v1, v2] {
                rep.n_checked += 1;
                if v > 0.0 {
                    rep.max_violation = rep.max_violation.max(v);
                }
                if v > tolerances::IDENTITY {
                    rep.n_violations += 1;
                }
            }
        }
    }
    Ok(rep)
}

/// Busemann approximants `B_n(x, y) = L(x, rail_n) - L(y, rail_n)` for the
/// rail vertices at the given levels.
pub fn busemann_convergence_probe(
    field: &WeightField,
    rail: &FinitePath,
    x: Site,
    y: Site,
    levels: &[i64],
) -> Result<Vec<f64>> {
    let lo = Site::new(x.c1.min(y.c1), x.c2.min(y.c2));
    levels
        .iter()
        .map(|&n| {
            let t = rail.at_level(n).ok_or(Error::OutOfRange { name: "rail level", value: n as f64 })?;
            for z in [x, y] {
                if !z.le(t) {
                    return Err(Error::TerminalNotNortheast { terminal: t, site: z });
                }
            }
            let g = TerminalGrid::new(field, lo, t)?;
            Ok(g.at(x) - g.at(y))
        })
        .collect()
}

/// Number of decreases (beyond tolerance) in a sequence expected to be nondecreasing.
pub fn monotone_violations(seq: &[f64]) -> usize {
    seq.windows(2).filter(|w| w[1] < w[0] - tolerances::IDENTITY).count()
}

/// Sandwich check: the `Minus` arrow path from `u` must precede or equal the `Plus` one.
pub fn sandwich_holds(c: &EdgeCocycle, u: Site) -> Result<bool> {
    let minus = c.arrow_path(u, TieBreak::Minus, usize::MAX)?;
    let plus = c.arrow_path(u, TieBreak::Plus, usize::MAX)?;
    Ok(path_order(&minus, &plus)?.is_le())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{s, tie_grid, w3};
    use crate::lpp::{passage_time, rightmost_geodesic};

    fn w3_cocycle() -> EdgeCocycle {
        EdgeCocycle::from_terminal(&w3(), s(2, 2), BoxRegion::new(s(0, 0), s(1, 1)).unwrap()).unwrap()
    }

    #[test]
    fn from_terminal_w3_increments() {
        let c = w3_cocycle();
        assert_eq!(c.inc1(s(0, 0)), 2.0);
        assert_eq!(c.inc2(s(0, 0)), 1.0);
        assert_eq!(c.inc1(s(0, 0)).min(c.inc2(s(0, 0))), w3().at(s(0, 0)));
        assert_eq!(c.provenance(), Provenance::FromTerminal(s(2, 2)));
    }

    #[test]
    fn from_terminal_adjacent_sites_are_single_path_sums() {
        // x = v - e1 - e2: both continuations are single paths.
        let f = w3();
        let c = EdgeCocycle::from_terminal(&f, s(2, 2), BoxRegion::new(s(1, 1), s(1, 1)).unwrap()).unwrap();
        // L(x,v) = w(1,1) + max(w(2,1), w(1,2)); L(x+e1,v) = w(2,1); L(x+e2,v) = w(1,2)
        let l = f.at(s(1, 1)) + f.at(s(2, 1)).max(f.at(s(1, 2)));
        assert_eq!(c.inc1(s(1, 1)), l - f.at(s(2, 1)));
        assert_eq!(c.inc2(s(1, 1)), l - f.at(s(1, 2)));
    }

    #[test]
    fn from_terminal_requires_margin() {
        let r = BoxRegion::new(s(0, 0), s(1, 2)).unwrap();
        assert!(matches!(EdgeCocycle::from_terminal(&w3(), s(2, 2), r), Err(Error::TerminalNotNortheast { .. })));
    }

    #[test]
    fn recovery_and_closure_of_w3() {
        let c = w3_cocycle();
        let rec = c.check_recovery(&w3()).unwrap();
        assert!(rec.max_violation <= 1e-9 && rec.violating_sites.is_empty());
        let pl = c.check_plaquette();
        assert!(pl.max_defect <= 1e-9 && pl.n_violations == 0);
        assert_eq!(pl.n_checked, 1);
    }

    #[test]
    fn raw_recovery_counterexample() {
        let f = w3();
        let r = BoxRegion::new(s(0, 0), s(1, 1)).unwrap();
        let c = w3_cocycle();
        let mut i = c.inc1_values().to_vec();
        let mut j = c.inc2_values().to_vec();
        let k = r.index(s(1, 0));
        i[k] = f.at(s(1, 0)) - 1.0;
        j[k] = f.at(s(1, 0)) - 1.0;
        let raw = EdgeCocycle::raw(r, i, j).unwrap();
        let rep = raw.check_recovery(&f).unwrap();
        assert_eq!(rep.max_violation, 1.0);
        assert_eq!(rep.violating_sites, vec![s(1, 0)]);
    }

    #[test]
    fn raw_plaquette_perturbation() {
        let c = w3_cocycle();
        let r = *c.region();
        let mut i = c.inc1_values().to_vec();
        i[r.index(s(0, 1))] += 0.25;
        let raw = EdgeCocycle::raw(r, i, c.inc2_values().to_vec()).unwrap();
        let rep = raw.check_plaquette();
        assert!((rep.max_defect - 0.25).abs() < 1e-12);
        assert_eq!(rep.worst, Some(s(0, 0)));
        assert!(matches!(raw.evaluate(s(0, 0), s(1, 1)), Err(Error::ClosureViolated(_))));
    }

    #[test]
    fn recovery_domain_mismatch() {
        let c = w3_cocycle();
        let small = WeightField::from_fn(BoxRegion::new(s(0, 0), s(0, 0)).unwrap(), |_| 1.0);
        assert_eq!(c.check_recovery(&small), Err(Error::DomainMismatch));
    }

    #[test]
    fn evaluate_w3() {
        let c = w3_cocycle();
        assert_eq!(c.evaluate(s(0, 0), s(0, 0)).unwrap(), 0.0);
        // L(0,0 -> 2,2) - L(1,1 -> 2,2) = 8 - 2
        assert_eq!(c.evaluate(s(0, 0), s(1, 1)).unwrap(), 6.0);
        assert_eq!(c.evaluate(s(1, 1), s(0, 0)).unwrap(), -6.0);
        assert!(matches!(c.evaluate(s(0, 0), s(2, 2)), Err(Error::OutOfBox(_))));
    }

    #[test]
    fn order_on_w3_terminals() {
        let f = w3();
        let r = BoxRegion::new(s(0, 0), s(0, 0)).unwrap();
        let a = EdgeCocycle::from_terminal(&f, s(1, 2), r).unwrap();
        let b = EdgeCocycle::from_terminal(&f, s(2, 1), r).unwrap();
        assert_eq!((a.inc1(s(0, 0)), b.inc1(s(0, 0))), (4.0, 1.0));
        assert_eq!((a.inc2(s(0, 0)), b.inc2(s(0, 0))), (1.0, 3.0));
        assert_eq!(cocycle_order(&a, &b).unwrap(), Order::Precedes);
        assert_eq!(cocycle_order(&b, &a).unwrap(), Order::Succeeds);
        assert_eq!(cocycle_order(&a, &a).unwrap(), Order::Equal);
        let t = (a.tilt_estimate().tilt, b.tilt_estimate().tilt);
        assert_eq!(t.0.order(&t.1), Order::Precedes);
    }

    #[test]
    fn constant_cocycle_tilt() {
        let r = BoxRegion::square_from_origin(4, 3).unwrap();
        let c = EdgeCocycle::raw(r, vec![1.5; 12], vec![-0.5; 12]).unwrap();
        let t = c.tilt_estimate();
        assert_eq!(t.tilt, TiltVector { h1: -1.5, h2: 0.5 });
        assert_eq!(t.se1, 0.0);
    }

    #[test]
    fn arrows_and_ties() {
        let r = BoxRegion::square_from_origin(2, 1).unwrap();
        let c = EdgeCocycle::raw(r, vec![1.0, 2.0], vec![2.0, 2.0]).unwrap();
        assert_eq!(c.arrow(s(0, 0), TieBreak::Plus), Step::E1);
        assert_eq!(c.arrow(s(0, 0), TieBreak::Minus), Step::E1);
        assert_eq!(c.arrow(s(1, 0), TieBreak::Plus), Step::E1);
        assert_eq!(c.arrow(s(1, 0), TieBreak::Minus), Step::E2);
        assert_eq!(c.tie_fraction(), 0.5);
    }

    #[test]
    fn w3_cocycle_geodesic_is_prefix_of_rightmost() {
        let f = w3();
        let c = w3_cocycle();
        let p = c.cocycle_geodesic(&f, s(0, 0), TieBreak::Plus).unwrap();
        let full = rightmost_geodesic(&f, s(0, 0), s(2, 2)).unwrap();
        assert_eq!(p.step_string(), "UU");
        assert_eq!(full.truncate_at_level(p.end_level()), p);
    }

    #[test]
    fn tie_grid_plus_takes_e1() {
        let f = tie_grid();
        let c = EdgeCocycle::from_terminal(&f, s(1, 1), BoxRegion::new(s(0, 0), s(0, 0)).unwrap()).unwrap();
        assert_eq!(c.inc1(s(0, 0)), c.inc2(s(0, 0)));
        assert_eq!(c.cocycle_geodesic(&f, s(0, 0), TieBreak::Plus).unwrap().step_string(), "R");
        assert_eq!(c.cocycle_geodesic(&f, s(0, 0), TieBreak::Minus).unwrap().step_string(), "U");
        assert!(sandwich_holds(&c, s(0, 0)).unwrap());
    }

    #[test]
    fn cocycle_geodesic_rejects_broken_recovery() {
        let f = w3();
        let c = w3_cocycle();
        let r = *c.region();
        let j: Vec<f64> = c.inc2_values().iter().map(|v| v + 0.5).collect();
        let i: Vec<f64> = c.inc1_values().iter().map(|v| v + 0.5).collect();
        let raw = EdgeCocycle::raw(r, i, j).unwrap();
        assert!(matches!(raw.cocycle_geodesic(&f, s(0, 0), TieBreak::Plus), Err(Error::RecoveryViolated(_))));
    }

    #[test]
    fn crossing_w3() {
        let f = w3();
        let r = BoxRegion::new(s(0, 0), s(0, 0)).unwrap();
        // L values quoted for the terminals (1,2) and (2,1)
        assert_eq!(passage_time(&f, s(0, 0), s(1, 2)).unwrap(), 7.0);
        assert_eq!(passage_time(&f, s(1, 0), s(1, 2)).unwrap(), 3.0);
        assert_eq!(passage_time(&f, s(0, 0), s(2, 1)).unwrap(), 5.0);
        assert_eq!(passage_time(&f, s(1, 0), s(2, 1)).unwrap(), 4.0);
        let rep = crossing_check(&f, 3, &r).unwrap();
        assert_eq!(rep.n_terminals, 2);
        assert_eq!(rep.n_violations, 0);
        assert_eq!(rep.max_violation, 0.0);
    }

    #[test]
    fn crossing_identical_terminal_is_vacuous() {
        let f = w3();
        let r = BoxRegion::new(s(0, 0), s(0, 0)).unwrap();
        let rep = crossing_check(&f, 2, &r).unwrap();
        assert_eq!(rep.n_terminals, 1);
        assert_eq!(rep.n_checked, 0);
    }

    #[test]
    fn probe_on_w3_rail() {
        let f = w3();
        let rail = rightmost_geodesic(&f, s(0, 0), s(2, 2)).unwrap();
        let y = rail.at_level(0).unwrap();
        let seq = busemann_convergence_probe(&f, &rail, s(0, 1), y, &[1, 2, 3, 4]).unwrap();
        assert_eq!(monotone_violations(&seq), 0);
        assert!(matches!(
            busemann_convergence_probe(&f, &rail, s(1, 0), y, &[2]),
            Err(Error::TerminalNotNortheast { .. })
        ));
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        w3_cocycle().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("c1,c2,I,J\n0,0,2,1\n"));
    }
}
