use crate::error::{Error, Result};
use crate::lattice::{path_order, BoxRegion, FinitePath, Order, Site, Step};
use crate::weights::WeightField;
use std::collections::HashMap;
use std::io::Write;

const OPEN_E1: u8 = 1;
const OPEN_E2: u8 = 2;

/// Arrow encoding of the tree of locally-rightmost geodesics from a root,
/// truncated at an antidiagonal horizon.
///
/// Edge `(x, x + e_i)` is open iff for every level between `level(x) + 1`
/// and the horizon some rightmost geodesic from the root to a site of that
/// level passes through both `x` and `x + e_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeoTree {
    root: Site,
    horizon: i64,
    region: BoxRegion,
    open: Vec<u8>,
}

impl GeoTree {
    /// Build the tree from the weights on the triangle `{x >= root, level(x) <= horizon}`.
    pub fn build(field: &WeightField, root: Site, horizon: i64) -> Result<GeoTree> {
        let depth = horizon - root.level();
        if depth < 0 {
            return Err(Error::InvalidTree(format!("horizon {horizon} below root level")));
        }
        if depth > 0 {
            field.covers(&BoxRegion::new(root, root.offset(depth - 1, depth - 1))?)?;
        }
        let region = BoxRegion::new(root, root.offset(depth, depth))?;
        let n = depth as usize;
        let w = n + 1;
        // Forward pass: passage values and rightmost parents on the triangle.
        // parent: 0 = root, 1 = came by E1 (from x - e1), 2 = came by E2.
        let mut lpp = vec![0.0f64; w * w];
        let mut parent = vec![0u8; w * w];
        for d in 1..=n {
            for c in 0..=d {
                let r = d - c;
                let x = root.offset(c as i64, r as i64);
                let (val, from) = if r == 0 {
                    (lpp[c - 1] + field.at(x.offset(-1, 0)), OPEN_E1)
                } else if c == 0 {
                    (lpp[(r - 1) * w] + field.at(x.offset(0, -1)), OPEN_E2)
                } else {
                    let a = lpp[r * w + c - 1] + field.at(x.offset(-1, 0));
                    let b = lpp[(r - 1) * w + c] + field.at(x.offset(0, -1));
                    // rightmost tie rule: the final step is E2
                    if a > b {
                        (a, OPEN_E1)
                    } else {
                        (b, OPEN_E2)
                    }
                };
                lpp[r * w + c] = val;
                parent[r * w + c] = from;
            }
        }
        // Backward sweep: a site survives iff its parent-subtree reaches the horizon.
        let mut alive = vec![false; w * w];
        let mut open = vec![0u8; w * w];
        for c in 0..=n {
            alive[(n - c) * w + c] = true;
        }
        for d in (0..n).rev() {
            for c in 0..=d {
                let r = d - c;
                let mut bits = 0u8;
                if parent[r * w + c + 1] == OPEN_E1 && alive[r * w + c + 1] {
                    bits |= OPEN_E1;
                }
                if parent[(r + 1) * w + c] == OPEN_E2 && alive[(r + 1) * w + c] {
                    bits |= OPEN_E2;
                }
                open[r * w + c] = bits;
                alive[r * w + c] = bits != 0;
            }
        }
        Ok(GeoTree { root, horizon, region, open })
    }

    /// Hand-built tree from explicit rays. Both axis rays are added. The union
    /// of the rays must give every site at most one parent.
    pub fn from_rays(root: Site, horizon: i64, rays: &[FinitePath]) -> Result<GeoTree> {
        let depth = horizon - root.level();
        if depth < 0 {
            return Err(Error::InvalidTree(format!("horizon {horizon} below root level")));
        }
        let region = BoxRegion::new(root, root.offset(depth, depth))?;
        let mut all: Vec<FinitePath> = rays.to_vec();
        all.push(FinitePath::axis(root, Step::E1, depth as usize));
        all.push(FinitePath::axis(root, Step::E2, depth as usize));
        let mut parent_of: HashMap<Site, Site> = HashMap::new();
        let mut open = vec![0u8; region.area()];
        for ray in &all {
            if ray.origin() != root || ray.end_level() != horizon {
                return Err(Error::InvalidTree(format!(
                    "ray {} from {} does not run from the root to the horizon",
                    ray.step_string(),
                    ray.origin()
                )));
            }
            for (k, &s) in ray.steps().iter().enumerate() {
                let x = ray.vertices()[k];
                let y = ray.vertices()[k + 1];
                if let Some(&p) = parent_of.get(&y) {
                    if p != x {
                        return Err(Error::InvalidTree(format!("site {y} has two parents")));
                    }
                }
                parent_of.insert(y, x);
                open[region.index(x)] |= if s == Step::E1 { OPEN_E1 } else { OPEN_E2 };
            }
        }
        Ok(GeoTree { root, horizon, region, open })
    }

    pub fn root(&self) -> Site {
        self.root
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn depth(&self) -> usize {
        (self.horizon - self.root.level()) as usize
    }

    /// Whether edge `(x, x + e_i)` is open.
    pub fn is_open(&self, x: Site, s: Step) -> bool {
        if !self.region.contains(x) || x.level() >= self.horizon {
            return false;
        }
        let bit = if s == Step::E1 { OPEN_E1 } else { OPEN_E2 };
        self.open[self.region.index(x)] & bit != 0
    }

    /// All root-to-horizon rays, ascending in the southeast order.
    pub fn rays(&self) -> Vec<FinitePath> {
        let mut out = Vec::new();
        let mut steps = Vec::with_capacity(self.depth());
        self.collect(self.root, &mut steps, &mut out);
        out
    }

    fn collect(&self, x: Site, steps: &mut Vec<Step>, out: &mut Vec<FinitePath>) {
        if x.level() == self.horizon {
            out.push(FinitePath::new(self.root, steps.clone()));
            return;
        }
        // E2 first: the northwest branch comes first in the order.
        for s in [Step::E2, Step::E1] {
            if self.is_open(x, s) {
                steps.push(s);
                self.collect(x.step(s), steps, out);
                steps.pop();
            }
        }
    }

    /// Index of `ray` in [`GeoTree::rays`], if it is a tree ray.
    pub fn position(&self, rays: &[FinitePath], ray: &FinitePath) -> Option<usize> {
        rays.iter().position(|r| r == ray)
    }

    /// Verify the structural invariants: every open edge continues to the
    /// horizon, and the rays are pairwise comparable and strictly increasing.
    pub fn check_invariants(&self) -> Result<()> {
        for x in self.region.sites() {
            if x.level() >= self.horizon {
                continue;
            }
            for s in [Step::E1, Step::E2] {
                if self.is_open(x, s) {
                    let y = x.step(s);
                    let continues = y.level() == self.horizon || self.is_open(y, Step::E1) || self.is_open(y, Step::E2);
                    if !continues {
                        return Err(Error::InvalidTree(format!("open edge at {x} is a dead end")));
                    }
                }
            }
        }
        let rays = self.rays();
        for pair in rays.windows(2) {
            if path_order(&pair[0], &pair[1])? != Order::Precedes {
                return Err(Error::InvalidTree("rays are not strictly ordered".into()));
            }
        }
        Ok(())
    }

    /// Rays as CSV rows `ray_id,level,c1,c2`.
    pub fn write_rays_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["ray_id", "level", "c1", "c2"])?;
        for (id, ray) in self.rays().iter().enumerate() {
            for v in ray.vertices() {
                w.write_record([id.to_string(), v.level().to_string(), v.c1.to_string(), v.c2.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Left- and right-isolated rays at finite horizon.
    ///
    /// For every realized prefix (every tree vertex together with its unique
    /// path from the root) the rays through it form a contiguous run of the
    /// ordered ray list; the first element of each run is collected into the
    /// left list and the last into the right list. Trivial axis rays are
    /// kept and flagged.
    pub fn isolated_rays(&self) -> IsolatedRays {
        let rays = self.rays();
        let mut runs: HashMap<Site, (usize, usize)> = HashMap::new();
        for (k, ray) in rays.iter().enumerate() {
            for &v in ray.vertices() {
                runs.entry(v).and_modify(|r| r.1 = k).or_insert((k, k));
            }
        }
        let mut left: Vec<usize> = runs.values().map(|r| r.0).collect();
        let mut right: Vec<usize> = runs.values().map(|r| r.1).collect();
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        let last = rays.len().saturating_sub(1);
        IsolatedRays { left, right, trivial: [0, last], n_rays: rays.len() }
    }
}

/// Indices into [`GeoTree::rays`] of the left- and right-isolated rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedRays {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Indices of the two trivial axis rays (`u + Z e2` first, `u + Z e1` last).
    pub trivial: [usize; 2],
    pub n_rays: usize,
}

impl IsolatedRays {
    pub fn is_trivial(&self, idx: usize) -> bool {
        self.trivial.contains(&idx)
    }

    /// Every ray `k` equals the infimum of the right-isolated rays at or above it.
    pub fn right_dense(&self) -> bool {
        (0..self.n_rays).all(|k| self.right.iter().copied().filter(|&r| r >= k).min() == Some(k))
    }

    /// Every ray `k` equals the supremum of the left-isolated rays at or below it.
    pub fn left_dense(&self) -> bool {
        (0..self.n_rays).all(|k| self.left.iter().copied().filter(|&l| l <= k).max() == Some(k))
    }
}
