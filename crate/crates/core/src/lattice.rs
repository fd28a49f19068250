//! Lattice sites, rectangular boxes, finite up-right paths and the
//! southeast partial orders on them.
//!
//! Paths are indexed by antidiagonal level: the vertex of a path at level
//! `l` is the unique vertex `x` with `x.c1 + x.c2 == l`.

use crate::error::{Error, Result};
use std::fmt;

/// Largest admissible side length of a [`BoxRegion`].
pub const MAX_BOX_SIDE: u64 = 1 << 20;
/// Largest admissible number of sites in a [`BoxRegion`].
pub const MAX_BOX_AREA: u64 = 1 << 28;

/// A site of `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site {
    pub c1: i64,
    pub c2: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { c1: 0, c2: 0 };

    pub const fn new(c1: i64, c2: i64) -> Self {
        Site { c1, c2 }
    }

    /// Antidiagonal level `c1 + c2`.
    #[inline]
    pub fn level(self) -> i64 {
        self.c1 + self.c2
    }

    #[inline]
    pub fn step(self, s: Step) -> Site {
        match s {
            Step::E1 => Site::new(self.c1 + 1, self.c2),
            Step::E2 => Site::new(self.c1, self.c2 + 1),
        }
    }

    #[inline]
    pub fn offset(self, d1: i64, d2: i64) -> Site {
        Site::new(self.c1 + d1, self.c2 + d2)
    }

    #[inline]
    pub fn add(self, z: Site) -> Site {
        Site::new(self.c1 + z.c1, self.c2 + z.c2)
    }

    #[inline]
    pub fn sub(self, z: Site) -> Site {
        Site::new(self.c1 - z.c1, self.c2 - z.c2)
    }

    /// Coordinatewise `self <= other`.
    #[inline]
    pub fn le(self, other: Site) -> bool {
        self.c1 <= other.c1 && self.c2 <= other.c2
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.c1, self.c2)
    }
}

/// Unit step of an up-right path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    E1,
    E2,
}

impl Step {
    /// `R` for `E1`, `U` for `E2`.
    pub fn as_char(self) -> char {
        match self {
            Step::E1 => 'R',
            Step::E2 => 'U',
        }
    }

    pub fn from_char(c: char) -> Option<Step> {
        match c {
            'R' => Some(Step::E1),
            'U' => Some(Step::E2),
            _ => None,
        }
    }
}

/// Result of comparing two objects under a (partial) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Precedes,
    Succeeds,
    Equal,
    Incomparable,
}

impl Order {
    pub fn reverse(self) -> Order {
        match self {
            Order::Precedes => Order::Succeeds,
            Order::Succeeds => Order::Precedes,
            o => o,
        }
    }

    /// `Precedes` or `Equal`.
    pub fn is_le(self) -> bool {
        matches!(self, Order::Precedes | Order::Equal)
    }

    /// Fold a sitewise relation into an accumulated one.
    pub(crate) fn combine(acc: (bool, bool), o: Order) -> (bool, bool) {
        match o {
            Order::Precedes => (true, acc.1),
            Order::Succeeds => (acc.0, true),
            Order::Equal => acc,
            Order::Incomparable => (true, true),
        }
    }

    pub(crate) fn from_flags(less: bool, greater: bool) -> Order {
        match (less, greater) {
            (false, false) => Order::Equal,
            (true, false) => Order::Precedes,
            (false, true) => Order::Succeeds,
            (true, true) => Order::Incomparable,
        }
    }
}

/// Southeast order on sites: `a ⪯ b` iff `a.c1 <= b.c1` and `a.c2 >= b.c2`.
pub fn site_order(a: Site, b: Site) -> Order {
    if a == b {
        return Order::Equal;
    }
    let ab = a.c1 <= b.c1 && a.c2 >= b.c2;
    let ba = b.c1 <= a.c1 && b.c2 >= a.c2;
    match (ab, ba) {
        (true, false) => Order::Precedes,
        (false, true) => Order::Succeeds,
        _ => Order::Incomparable,
    }
}

/// A closed rectangle `[lo, hi]` of sites, iterated row-major from `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoxRegion {
    lo: Site,
    hi: Site,
}

impl BoxRegion {
    pub fn new(lo: Site, hi: Site) -> Result<Self> {
        if !lo.le(hi) {
            return Err(Error::InvalidBox { lo, hi });
        }
        let width = (hi.c1 - lo.c1) as u64 + 1;
        let height = (hi.c2 - lo.c2) as u64 + 1;
        if width > MAX_BOX_SIDE || height > MAX_BOX_SIDE || width.saturating_mul(height) > MAX_BOX_AREA {
            return Err(Error::BoxTooLarge { width, height });
        }
        Ok(BoxRegion { lo, hi })
    }

    /// The box `[(0,0), (w-1, h-1)]`.
    pub fn square_from_origin(w: i64, h: i64) -> Result<Self> {
        BoxRegion::new(Site::ORIGIN, Site::new(w - 1, h - 1))
    }

    pub fn lo(&self) -> Site {
        self.lo
    }

    pub fn hi(&self) -> Site {
        self.hi
    }

    pub fn width(&self) -> usize {
        (self.hi.c1 - self.lo.c1) as usize + 1
    }

    pub fn height(&self) -> usize {
        (self.hi.c2 - self.lo.c2) as usize + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    #[inline]
    pub fn contains(&self, x: Site) -> bool {
        self.lo.le(x) && x.le(self.hi)
    }

    pub fn contains_box(&self, other: &BoxRegion) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    /// Row-major linear index; caller guarantees containment.
    #[inline]
    pub fn index(&self, x: Site) -> usize {
        debug_assert!(self.contains(x));
        (x.c2 - self.lo.c2) as usize * self.width() + (x.c1 - self.lo.c1) as usize
    }

    #[inline]
    pub fn site_at(&self, idx: usize) -> Site {
        let w = self.width();
        Site::new(self.lo.c1 + (idx % w) as i64, self.lo.c2 + (idx / w) as i64)
    }

    pub fn translate(&self, z: Site) -> Result<BoxRegion> {
        BoxRegion::new(self.lo.add(z), self.hi.add(z))
    }

    pub fn intersect(&self, other: &BoxRegion) -> Option<BoxRegion> {
        let lo = Site::new(self.lo.c1.max(other.lo.c1), self.lo.c2.max(other.lo.c2));
        let hi = Site::new(self.hi.c1.min(other.hi.c1), self.hi.c2.min(other.hi.c2));
        BoxRegion::new(lo, hi).ok()
    }

    /// Sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let (lo, hi) = (self.lo, self.hi);
        (lo.c2..=hi.c2).flat_map(move |c2| (lo.c1..=hi.c1).map(move |c1| Site::new(c1, c2)))
    }
}

impl fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite up-right path given by its origin and steps.
///
/// The vertex list is materialized at construction so that the vertex at
/// any level is an O(1) lookup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePath {
    origin: Site,
    steps: Vec<Step>,
    vertices: Vec<Site>,
}

impl FinitePath {
    pub fn new(origin: Site, steps: Vec<Step>) -> Self {
        let mut vertices = Vec::with_capacity(steps.len() + 1);
        let mut x = origin;
        vertices.push(x);
        for &s in &steps {
            x = x.step(s);
            vertices.push(x);
        }
        FinitePath { origin, steps, vertices }
    }

    /// Rebuild a path from consecutive vertices; `None` if some gap is not a unit up-right step.
    pub fn from_vertices(vertices: &[Site]) -> Option<Self> {
        let (&first, rest) = vertices.split_first()?;
        let mut steps = Vec::with_capacity(rest.len());
        let mut prev = first;
        for &v in rest {
            let s = if v == prev.step(Step::E1) {
                Step::E1
            } else if v == prev.step(Step::E2) {
                Step::E2
            } else {
                return None;
            };
            steps.push(s);
            prev = v;
        }
        Some(FinitePath::new(first, steps))
    }

    /// `len` steps in direction `s` from `origin`.
    pub fn axis(origin: Site, s: Step, len: usize) -> Self {
        FinitePath::new(origin, vec![s; len])
    }

    /// Parse a step string over `{R, U}`.
    pub fn parse_steps(origin: Site, text: &str) -> Result<Self> {
        let steps = text
            .chars()
            .map(|c| Step::from_char(c).ok_or_else(|| Error::Parse(format!("bad step '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FinitePath::new(origin, steps))
    }

    pub fn step_string(&self) -> String {
        self.steps.iter().map(|s| s.as_char()).collect()
    }

    pub fn origin(&self) -> Site {
        self.origin
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn vertices(&self) -> &[Site] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start_level(&self) -> i64 {
        self.origin.level()
    }

    pub fn end_level(&self) -> i64 {
        self.origin.level() + self.steps.len() as i64
    }

    pub fn end(&self) -> Site {
        *self.vertices.last().expect("path has at least its origin")
    }

    /// Vertex at antidiagonal level `level`, if the path covers it.
    #[inline]
    pub fn at_level(&self, level: i64) -> Option<Site> {
        let i = level - self.start_level();
        if i < 0 {
            return None;
        }
        self.vertices.get(i as usize).copied()
    }

    /// Prefix up to and including level `level`.
    pub fn truncate_at_level(&self, level: i64) -> FinitePath {
        let k = (level - self.start_level()).clamp(0, self.steps.len() as i64) as usize;
        FinitePath::new(self.origin, self.steps[..k].to_vec())
    }

    /// Sum of weights over all vertices except the last one.
    pub fn weight_excluding_end(&self, w: impl Fn(Site) -> f64) -> f64 {
        let mut acc = 0.0;
        for &x in &self.vertices[..self.vertices.len() - 1] {
            acc += w(x);
        }
        acc
    }

    /// Whether the path consists of a single step direction (or is empty).
    pub fn is_axis(&self) -> bool {
        self.steps.iter().all(|&s| s == Step::E1) || self.steps.iter().all(|&s| s == Step::E2)
    }

    pub fn contains(&self, x: Site) -> bool {
        self.at_level(x.level()) == Some(x)
    }
}

fn common_levels(p: &FinitePath, q: &FinitePath) -> Result<(i64, i64)> {
    let a = p.start_level().max(q.start_level());
    let b = p.end_level().min(q.end_level());
    if a > b {
        return Err(Error::DisjointLevelRange);
    }
    Ok((a, b))
}

/// Levelwise southeast order on the common level range of two paths.
pub fn path_order(p: &FinitePath, q: &FinitePath) -> Result<Order> {
    let (a, b) = common_levels(p, q)?;
    let mut flags = (false, false);
    for l in a..=b {
        let (x, y) = (p.at_level(l).unwrap(), q.at_level(l).unwrap());
        flags = Order::combine(flags, site_order(x, y));
        if flags == (true, true) {
            break;
        }
    }
    Ok(Order::from_flags(flags.0, flags.1))
}

/// Finite-window coalescence status of two paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coalescence {
    /// The paths agree from this site through the end of the common window.
    CoalescedAt(Site),
    /// No shared site after the first common level.
    DisjointInWindow,
    /// Shared sites exist but the paths differ at the window end.
    Undecided,
}

/// Decide coalescence within the common level window of `p` and `q`.
pub fn coalescence_check(p: &FinitePath, q: &FinitePath) -> Result<Coalescence> {
    let (a, b) = common_levels(p, q)?;
    let at = |l| (p.at_level(l).unwrap(), q.at_level(l).unwrap());
    let (pe, qe) = at(b);
    if pe == qe {
        let mut l = b;
        while l > a {
            let (x, y) = at(l - 1);
            if x != y {
                break;
            }
            l -= 1;
        }
        return Ok(Coalescence::CoalescedAt(at(l).0));
    }
    let shares_later = ((a + 1)..=b).any(|l| {
        let (x, y) = at(l);
        x == y
    });
    Ok(if shares_later { Coalescence::Undecided } else { Coalescence::DisjointInWindow })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(origin: (i64, i64), steps: &str) -> FinitePath {
        FinitePath::parse_steps(Site::new(origin.0, origin.1), steps).unwrap()
    }

    #[test]
    fn site_order_examples() {
        assert_eq!(site_order(Site::new(0, 1), Site::new(1, 0)), Order::Precedes);
        assert_eq!(site_order(Site::new(3, 5), Site::new(3, 5)), Order::Equal);
        assert_eq!(site_order(Site::new(0, 0), Site::new(1, 1)), Order::Incomparable);
        assert_eq!(site_order(Site::new(1, 0), Site::new(0, 1)), Order::Succeeds);
    }

    #[test]
    fn path_order_examples() {
        let left = path((0, 0), "UUU");
        let right = path((0, 0), "RRR");
        assert_eq!(path_order(&left, &right).unwrap(), Order::Precedes);
        assert_eq!(path_order(&left, &left).unwrap(), Order::Equal);
        // (1,0),(1,1) vs (0,1),(1,1)
        let p = path((0, 0), "RU");
        let q = path((0, 0), "UR");
        assert_eq!(path_order(&p, &q).unwrap(), Order::Succeeds);
        let crossing_a = path((0, 0), "RUUR");
        let crossing_b = path((0, 0), "URRU");
        assert_eq!(path_order(&crossing_a, &crossing_b).unwrap(), Order::Incomparable);
    }

    #[test]
    fn path_order_disjoint_range() {
        let p = path((0, 0), "RR");
        let q = path((5, 5), "RR");
        assert_eq!(path_order(&p, &q), Err(Error::DisjointLevelRange));
        assert_eq!(coalescence_check(&p, &q), Err(Error::DisjointLevelRange));
    }

    #[test]
    fn coalescence_examples() {
        let p = path((0, 0), "RRUU");
        assert_eq!(coalescence_check(&p, &p).unwrap(), Coalescence::CoalescedAt(Site::ORIGIN));
        let e1 = path((0, 0), "RRRRR");
        let e2 = path((0, 0), "UUUUU");
        assert_eq!(coalescence_check(&e1, &e2).unwrap(), Coalescence::DisjointInWindow);
        let p = path((0, 0), "RUU");
        let q = path((0, 0), "URU");
        assert_eq!(coalescence_check(&p, &q).unwrap(), Coalescence::CoalescedAt(Site::new(1, 1)));
        let p = path((0, 0), "RUR");
        let q = path((0, 0), "URU");
        assert_eq!(coalescence_check(&p, &q).unwrap(), Coalescence::Undecided);
    }

    #[test]
    fn paths_from_different_origins_compare_on_common_levels() {
        let p = path((0, 0), "RRRR");
        let q = path((0, 2), "RR");
        assert_eq!(path_order(&p, &q).unwrap(), Order::Succeeds);
        let r = path((2, 0), "UU");
        assert_eq!(coalescence_check(&r, &path((0, 0), "RRUU")).unwrap(), Coalescence::CoalescedAt(Site::new(2, 0)));
    }

    #[test]
    fn box_bounds_and_indexing() {
        let b = BoxRegion::new(Site::new(-2, 3), Site::new(4, 5)).unwrap();
        assert_eq!(b.width(), 7);
        assert_eq!(b.height(), 3);
        for (i, x) in b.sites().enumerate() {
            assert_eq!(b.index(x), i);
            assert_eq!(b.site_at(i), x);
        }
        assert!(matches!(BoxRegion::new(Site::ORIGIN, Site::new(1 << 21, 0)), Err(Error::BoxTooLarge { .. })));
        assert!(matches!(BoxRegion::new(Site::new(1, 0), Site::ORIGIN), Err(Error::InvalidBox { .. })));
    }

    #[test]
    fn vertices_follow_levels() {
        let p = path((3, -1), "RUURU");
        for (i, v) in p.vertices().iter().enumerate() {
            assert_eq!(v.level(), p.start_level() + i as i64);
            assert_eq!(p.at_level(v.level()), Some(*v));
        }
        assert_eq!(FinitePath::from_vertices(p.vertices()).unwrap(), p);
        assert_eq!(p.step_string(), "RUURU");
    }
}
