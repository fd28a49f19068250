//! Last-passage values, geodesic extraction and the brute-force oracle.
//!
//! Convention: `L(u, v)` is the maximum over up-right paths from `u` to `v`
//! of the weights collected on every vertex except `v`. In particular
//! `L(u, u) = 0` and `L(u, u + e1) = w(u)`.

mod tree;

pub use tree::{GeoTree, IsolatedRays};

use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, FinitePath, Site, Step};
use crate::weights::WeightField;
use rayon::prelude::*;
use std::io::Write;

/// Largest total step count accepted by the enumeration oracle.
pub const MAX_ENUMERATION_STEPS: u64 = 24;

/// `L(u, x)` for every `x` in a box whose lower-left corner is `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PassageGrid {
    region: BoxRegion,
    values: Vec<f64>,
}

impl PassageGrid {
    pub fn origin(&self) -> Site {
        self.region.lo()
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: Site) -> Result<f64> {
        if !self.region.contains(x) {
            return Err(Error::OutOfBox(x));
        }
        Ok(self.values[self.region.index(x)])
    }

    #[inline]
    pub(crate) fn at(&self, x: Site) -> f64 {
        self.values[self.region.index(x)]
    }

    /// CSV with header `c1,c2,L`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["c1", "c2", "L"])?;
        for (x, v) in self.region.sites().zip(&self.values) {
            w.write_record([x.c1.to_string(), x.c2.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Check that `field` carries every weight needed for paths from `lo` to `hi`
/// (all sites of `[lo, hi]` except `hi` itself).
pub(crate) fn covers_except_corner(field: &WeightField, lo: Site, hi: Site) -> Result<()> {
    if lo == hi {
        return Ok(());
    }
    let r = field.region();
    if !r.contains(lo) {
        return Err(Error::FieldDoesNotCoverBox(lo));
    }
    for x in [hi.offset(-1, 0), hi.offset(0, -1)] {
        if lo.le(x) && !r.contains(x) {
            return Err(Error::FieldDoesNotCoverBox(x));
        }
    }
    Ok(())
}

fn forward_fill(field: &WeightField, region: BoxRegion) -> PassageGrid {
    let (w, h) = (region.width(), region.height());
    let lo = region.lo();
    let mut values = vec![0.0; region.area()];
    for r in 0..h {
        for c in 0..w {
            if r == 0 && c == 0 {
                continue;
            }
            let x = Site::new(lo.c1 + c as i64, lo.c2 + r as i64);
            let mut best = f64::NEG_INFINITY;
            if c > 0 {
                best = values[r * w + c - 1] + field.at(x.offset(-1, 0));
            }
            if r > 0 {
                best = best.max(values[(r - 1) * w + c] + field.at(x.offset(0, -1)));
            }
            values[r * w + c] = best;
        }
    }
    PassageGrid { region, values }
}

/// Passage values `L(u, x)` for all `x` in `region`, where `u = region.lo()`.
pub fn lpp_values(field: &WeightField, u: Site, region: &BoxRegion) -> Result<PassageGrid> {
    if u != region.lo() {
        return Err(Error::DomainMismatch);
    }
    field.covers(region)?;
    Ok(forward_fill(field, *region))
}

/// Same values as [`lpp_values`], filled antidiagonal by antidiagonal with
/// each antidiagonal computed in parallel. Bit-identical to the row-major fill.
pub fn lpp_values_wavefront(field: &WeightField, u: Site, region: &BoxRegion) -> Result<PassageGrid> {
    if u != region.lo() {
        return Err(Error::DomainMismatch);
    }
    field.covers(region)?;
    let (w, h) = (region.width(), region.height());
    let lo = region.lo();
    let mut values = vec![0.0; region.area()];
    let mut diag = Vec::new();
    for d in 1..(w + h - 1) {
        let c_lo = d.saturating_sub(h - 1);
        let c_hi = d.min(w - 1);
        let prev = &values;
        (c_lo..c_hi + 1)
            .into_par_iter()
            .map(|c| {
                let r = d - c;
                let x = Site::new(lo.c1 + c as i64, lo.c2 + r as i64);
                let mut best = f64::NEG_INFINITY;
                if c > 0 {
                    best = prev[r * w + c - 1] + field.at(x.offset(-1, 0));
                }
                if r > 0 {
                    best = best.max(prev[(r - 1) * w + c] + field.at(x.offset(0, -1)));
                }
                best
            })
            .collect_into_vec(&mut diag);
        for (k, c) in (c_lo..=c_hi).enumerate() {
            values[(d - c) * w + c] = diag[k];
        }
    }
    Ok(PassageGrid { region: *region, values })
}

/// `L(x, v)` for every `x` in `[lo, v]`, computed by a backward sweep from `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalGrid {
    region: BoxRegion,
    values: Vec<f64>,
}

impl TerminalGrid {
    pub fn new(field: &WeightField, lo: Site, v: Site) -> Result<Self> {
        if !lo.le(v) {
            return Err(Error::TerminalNotNortheast { terminal: v, site: lo });
        }
        covers_except_corner(field, lo, v)?;
        let region = BoxRegion::new(lo, v)?;
        let (w, h) = (region.width(), region.height());
        let mut values = vec![0.0; region.area()];
        for r in (0..h).rev() {
            for c in (0..w).rev() {
                if r == h - 1 && c == w - 1 {
                    continue;
                }
                let x = Site::new(lo.c1 + c as i64, lo.c2 + r as i64);
                let mut best = f64::NEG_INFINITY;
                if c + 1 < w {
                    best = values[r * w + c + 1];
                }
                if r + 1 < h {
                    best = best.max(values[(r + 1) * w + c]);
                }
                values[r * w + c] = field.at(x) + best;
            }
        }
        Ok(TerminalGrid { region, values })
    }

    pub fn terminal(&self) -> Site {
        self.region.hi()
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn get(&self, x: Site) -> Result<f64> {
        if !self.region.contains(x) {
            return Err(Error::OutOfBox(x));
        }
        Ok(self.values[self.region.index(x)])
    }

    #[inline]
    pub(crate) fn at(&self, x: Site) -> f64 {
        self.values[self.region.index(x)]
    }
}

/// Point-to-point passage value `L(u, v)`.
pub fn passage_time(field: &WeightField, u: Site, v: Site) -> Result<f64> {
    if !u.le(v) {
        return Err(Error::NotComparable(u, v));
    }
    covers_except_corner(field, u, v)?;
    Ok(forward_fill(field, BoxRegion::new(u, v)?).at(v))
}

#[derive(Clone, Copy, PartialEq)]
enum TieBreak {
    Right,
    Left,
}

fn backtrack(field: &WeightField, u: Site, v: Site, tie: TieBreak) -> Result<FinitePath> {
    if !u.le(v) {
        return Err(Error::NotComparable(u, v));
    }
    covers_except_corner(field, u, v)?;
    let grid = forward_fill(field, BoxRegion::new(u, v)?);
    let mut rev = Vec::with_capacity((v.level() - u.level()) as usize);
    let mut x = v;
    while x != u {
        let step = if x.c1 == u.c1 {
            Step::E2
        } else if x.c2 == u.c2 {
            Step::E1
        } else {
            let (p1, p2) = (x.offset(-1, 0), x.offset(0, -1));
            let a = grid.at(p1) + field.at(p1);
            let b = grid.at(p2) + field.at(p2);
            if a > b || (a == b && tie != TieBreak::Right) {
                Step::E1
            } else {
                Step::E2
            }
        };
        rev.push(step);
        x = match step {
            Step::E1 => x.offset(-1, 0),
            Step::E2 => x.offset(0, -1),
        };
    }
    rev.reverse();
    Ok(FinitePath::new(u, rev))
}

/// The rightmost geodesic from `u` to `v`.
///
/// Backtracks from `v`; on a predecessor tie the final step into the current
/// vertex is recorded as `E2`, which keeps the path as far southeast as possible.
pub fn rightmost_geodesic(field: &WeightField, u: Site, v: Site) -> Result<FinitePath> {
    backtrack(field, u, v, TieBreak::Right)
}

/// Mirror of [`rightmost_geodesic`]: ties resolved toward the northwest.
pub fn leftmost_geodesic(field: &WeightField, u: Site, v: Site) -> Result<FinitePath> {
    backtrack(field, u, v, TieBreak::Left)
}

fn enumeration_guard(field: &WeightField, u: Site, v: Site) -> Result<()> {
    if !u.le(v) {
        return Err(Error::NotComparable(u, v));
    }
    let steps = (v.level() - u.level()) as u64;
    if steps > MAX_ENUMERATION_STEPS {
        return Err(Error::TooLargeForEnumeration { steps, max: MAX_ENUMERATION_STEPS });
    }
    covers_except_corner(field, u, v)
}

/// Visit every up-right path from `u` to `v` in lexicographic order with
/// `E2 < E1`, passing its steps and its weight (excluding `v`) summed in path order.
pub fn for_each_path(field: &WeightField, u: Site, v: Site, mut visit: impl FnMut(&[Step], f64)) -> Result<()> {
    enumeration_guard(field, u, v)?;
    fn rec(
        field: &WeightField,
        x: Site,
        v: Site,
        acc: f64,
        steps: &mut Vec<Step>,
        visit: &mut dyn FnMut(&[Step], f64),
    ) {
        if x == v {
            visit(steps, acc);
            return;
        }
        let acc = acc + field.at(x);
        if x.c2 < v.c2 {
            steps.push(Step::E2);
            rec(field, x.step(Step::E2), v, acc, steps, visit);
            steps.pop();
        }
        if x.c1 < v.c1 {
            steps.push(Step::E1);
            rec(field, x.step(Step::E1), v, acc, steps, visit);
            steps.pop();
        }
    }
    let mut steps = Vec::new();
    rec(field, u, v, 0.0, &mut steps, &mut visit);
    Ok(())
}

/// Brute-force `L(u, v)` over all up-right paths.
pub fn brute_force_passage_time(field: &WeightField, u: Site, v: Site) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for_each_path(field, u, v, |_, s| best = best.max(s))?;
    Ok(best)
}

/// All maximizing paths from `u` to `v`, sorted ascending in a linear
/// extension of the southeast path order (the last one is the rightmost).
pub fn enumerate_geodesics(field: &WeightField, u: Site, v: Site) -> Result<Vec<FinitePath>> {
    let mut best = f64::NEG_INFINITY;
    let mut found: Vec<Vec<Step>> = Vec::new();
    for_each_path(field, u, v, |steps, s| {
        if s > best {
            best = s;
            found.clear();
        }
        if s == best {
            found.push(steps.to_vec());
        }
    })?;
    Ok(found.into_iter().map(|s| FinitePath::new(u, s)).collect())
}
