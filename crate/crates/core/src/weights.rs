//! Seeded i.i.d. weight fields.
//!
//! The value at a site is `dist.sample(U)` where `U` is the counter-based
//! uniform keyed by `(seed, site + offset)`. Consequently overlapping boxes
//! with the same seed agree on their overlap, and shifting a field is pure
//! bookkeeping on the offset.

use crate::error::{Error, Result};
use crate::lattice::{BoxRegion, Site};
use crate::rng::{site_uniform, STREAM_BULK};
use rayon::prelude::*;
use std::fmt;
use std::io::{Read, Write};

/// Largest absolute coordinate a generated field may be evaluated at.
pub const MAX_COORD: i64 = 1 << 31;

/// Marginal law of a single weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDistribution {
    Exponential {
        rate: f64,
    },
    /// Support `{0, 1, 2, ...}`: number of failures before the first success.
    Geometric {
        p: f64,
    },
    Uniform01,
    /// `a` with probability `prob_a`, otherwise `b`.
    TwoPoint {
        a: f64,
        b: f64,
        prob_a: f64,
    },
}

impl WeightDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        WeightDistribution::Exponential { rate }.validated()
    }

    pub fn geometric(p: f64) -> Result<Self> {
        WeightDistribution::Geometric { p }.validated()
    }

    pub fn two_point(a: f64, b: f64, prob_a: f64) -> Result<Self> {
        WeightDistribution::TwoPoint { a, b, prob_a }.validated()
    }

    /// Reject parameters giving zero variance or an ill-defined law.
    pub fn validated(self) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidDistribution(m.to_string()));
        match self {
            WeightDistribution::Exponential { rate } if !(rate.is_finite() && rate > 0.0) => {
                bad("exponential rate must be positive")
            }
            WeightDistribution::Geometric { p } if !(p > 0.0 && p < 1.0) => {
                bad("geometric success probability must lie in (0,1)")
            }
            WeightDistribution::TwoPoint { a, b, prob_a } => {
                if !(a.is_finite() && b.is_finite()) || a == b {
                    bad("two-point values must be finite and distinct")
                } else if !(prob_a > 0.0 && prob_a < 1.0) {
                    bad("two-point probability must lie in (0,1)")
                } else {
                    Ok(self)
                }
            }
            _ => Ok(self),
        }
    }

    /// Inverse-CDF transform of a uniform on `(0,1)`.
    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        match *self {
            WeightDistribution::Exponential { rate } => -u.ln() / rate,
            WeightDistribution::Geometric { p } => (u.ln() / (1.0 - p).ln()).floor(),
            WeightDistribution::Uniform01 => u,
            WeightDistribution::TwoPoint { a, b, prob_a } => {
                if u < prob_a {
                    a
                } else {
                    b
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            WeightDistribution::Exponential { rate } => 1.0 / rate,
            WeightDistribution::Geometric { p } => (1.0 - p) / p,
            WeightDistribution::Uniform01 => 0.5,
            WeightDistribution::TwoPoint { a, b, prob_a } => prob_a * a + (1.0 - prob_a) * b,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            WeightDistribution::Exponential { rate } => 1.0 / (rate * rate),
            WeightDistribution::Geometric { p } => (1.0 - p) / (p * p),
            WeightDistribution::Uniform01 => 1.0 / 12.0,
            WeightDistribution::TwoPoint { a, b, prob_a } => prob_a * (1.0 - prob_a) * (a - b) * (a - b),
        }
    }

    pub fn is_exp1(&self) -> bool {
        matches!(self, WeightDistribution::Exponential { rate } if *rate == 1.0)
    }

    /// Parse `exp`, `exp:RATE`, `geom:P`, `unif`, `twopoint:A:B:PA`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}' in '{text}'")));
        match parts.as_slice() {
            ["exp"] => WeightDistribution::exponential(1.0),
            ["exp", r] => WeightDistribution::exponential(num(r)?),
            ["geom", p] => WeightDistribution::geometric(num(p)?),
            ["unif"] => Ok(WeightDistribution::Uniform01),
            ["twopoint", a, b, pa] => WeightDistribution::two_point(num(a)?, num(b)?, num(pa)?),
            _ => Err(Error::Parse(format!("unknown distribution '{text}'"))),
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDistribution::Exponential { rate } if *rate == 1.0 => write!(f, "exp"),
            WeightDistribution::Exponential { rate } => write!(f, "exp:{rate}"),
            WeightDistribution::Geometric { p } => write!(f, "geom:{p}"),
            WeightDistribution::Uniform01 => write!(f, "unif"),
            WeightDistribution::TwoPoint { a, b, prob_a } => write!(f, "twopoint:{a}:{b}:{prob_a}"),
        }
    }
}

/// Where the values of a field came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSource {
    /// Value at `x` is `dist.sample(site_uniform(seed, x + offset))`.
    Generated { seed: u64, dist: WeightDistribution, offset: Site },
    /// Values supplied directly (fixtures, CSV loads).
    Explicit,
}

/// An immutable rectangle of site weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    region: BoxRegion,
    values: Vec<f64>,
    source: FieldSource,
}

fn check_generable(b: &BoxRegion, offset: Site) -> Result<()> {
    for x in [b.lo().add(offset), b.hi().add(offset)] {
        if x.c1.abs() > MAX_COORD || x.c2.abs() > MAX_COORD {
            return Err(Error::OutOfDomain(x));
        }
    }
    Ok(())
}

impl WeightField {
    /// Sample a field; deterministic in `(region, dist, seed)`.
    pub fn generate(region: BoxRegion, dist: WeightDistribution, seed: u64) -> Result<Self> {
        let dist = dist.validated()?;
        check_generable(&region, Site::ORIGIN)?;
        let w = region.width();
        let mut values = vec![0.0; region.area()];
        values.par_chunks_mut(w).enumerate().for_each(|(row, chunk)| {
            let c2 = region.lo().c2 + row as i64;
            for (k, v) in chunk.iter_mut().enumerate() {
                let x = Site::new(region.lo().c1 + k as i64, c2);
                *v = dist.sample(site_uniform(seed, STREAM_BULK, x));
            }
        });
        Ok(WeightField { region, values, source: FieldSource::Generated { seed, dist, offset: Site::ORIGIN } })
    }

    /// A field with explicitly given values in row-major order.
    pub fn from_values(region: BoxRegion, values: Vec<f64>) -> Result<Self> {
        if values.len() != region.area() {
            return Err(Error::DomainMismatch);
        }
        Ok(WeightField { region, values, source: FieldSource::Explicit })
    }

    /// Build from a closure evaluated on every site.
    pub fn from_fn(region: BoxRegion, f: impl Fn(Site) -> f64) -> Self {
        let values = region.sites().map(f).collect();
        WeightField { region, values, source: FieldSource::Explicit }
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn source(&self) -> FieldSource {
        self.source
    }

    pub fn dist(&self) -> Option<WeightDistribution> {
        match self.source {
            FieldSource::Generated { dist, .. } => Some(dist),
            FieldSource::Explicit => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.source {
            FieldSource::Generated { seed, .. } => Some(seed),
            FieldSource::Explicit => None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checked lookup.
    pub fn get(&self, x: Site) -> Result<f64> {
        if !self.region.contains(x) {
            return Err(Error::FieldDoesNotCoverBox(x));
        }
        Ok(self.values[self.region.index(x)])
    }

    /// Unchecked-in-release lookup for inner loops whose domain was validated.
    #[inline]
    pub fn at(&self, x: Site) -> f64 {
        self.values[self.region.index(x)]
    }

    pub fn covers(&self, b: &BoxRegion) -> Result<()> {
        for x in [b.lo(), b.hi()] {
            if !self.region.contains(x) {
                return Err(Error::FieldDoesNotCoverBox(x));
            }
        }
        Ok(())
    }

    /// The shifted environment: output value at `x` equals input value at `x + z`.
    pub fn shift(&self, z: Site) -> Result<WeightField> {
        let region = BoxRegion::new(self.region.lo().sub(z), self.region.hi().sub(z))?;
        check_generable(&region, Site::ORIGIN)?;
        let source = match self.source {
            FieldSource::Generated { seed, dist, offset } => {
                let offset = offset.add(z);
                check_generable(&region, offset)?;
                FieldSource::Generated { seed, dist, offset }
            }
            FieldSource::Explicit => FieldSource::Explicit,
        };
        Ok(WeightField { region, values: self.values.clone(), source })
    }

    /// Regenerate a generated field on another box, keeping seed, law and offset.
    pub fn regenerate(&self, region: BoxRegion) -> Result<WeightField> {
        match self.source {
            FieldSource::Generated { seed, dist, offset } => {
                check_generable(&region, offset)?;
                let values =
                    region.sites().map(|x| dist.sample(site_uniform(seed, STREAM_BULK, x.add(offset)))).collect();
                Ok(WeightField { region, values, source: self.source })
            }
            FieldSource::Explicit => Err(Error::DomainMismatch),
        }
    }

    /// CSV with header `c1,c2,value`, rows in row-major order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["c1", "c2", "value"])?;
        for (x, v) in self.region.sites().zip(&self.values) {
            w.write_record([x.c1.to_string(), x.c2.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load a CSV written by [`WeightField::write_csv`]; the sites must fill a rectangle.
    pub fn read_csv<R: Read>(input: R) -> Result<WeightField> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["c1", "c2", "value"] {
            return Err(Error::Parse("expected header c1,c2,value".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let p = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short row".into()));
            let c1: i64 = p(0)?.parse().map_err(|_| Error::Parse("bad c1".into()))?;
            let c2: i64 = p(1)?.parse().map_err(|_| Error::Parse("bad c2".into()))?;
            let v: f64 = p(2)?.parse().map_err(|_| Error::Parse("bad value".into()))?;
            rows.push((Site::new(c1, c2), v));
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty field".into()));
        }
        let lo = Site::new(rows.iter().map(|r| r.0.c1).min().unwrap(), rows.iter().map(|r| r.0.c2).min().unwrap());
        let hi = Site::new(rows.iter().map(|r| r.0.c1).max().unwrap(), rows.iter().map(|r| r.0.c2).max().unwrap());
        let region = BoxRegion::new(lo, hi)?;
        if rows.len() != region.area() {
            return Err(Error::Parse("sites do not fill a rectangle".into()));
        }
        let mut values = vec![f64::NAN; region.area()];
        for (x, v) in rows {
            let slot = &mut values[region.index(x)];
            if !slot.is_nan() {
                return Err(Error::Parse(format!("duplicate site {x}")));
            }
            *slot = v;
        }
        WeightField::from_values(region, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(w: i64, h: i64) -> BoxRegion {
        BoxRegion::square_from_origin(w, h).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let d = WeightDistribution::exponential(1.0).unwrap();
        let a = WeightField::generate(bx(30, 20), d, 11).unwrap();
        let b = WeightField::generate(bx(30, 20), d, 11).unwrap();
        assert_eq!(a, b);
        let c = WeightField::generate(bx(30, 20), d, 12).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn two_point_support() {
        let d = WeightDistribution::two_point(0.0, 1.0, 0.5).unwrap();
        let f = WeightField::generate(bx(50, 50), d, 3).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(f.values().contains(&0.0) && f.values().contains(&1.0));
    }

    #[test]
    fn geometric_support_starts_at_zero() {
        let d = WeightDistribution::geometric(0.4).unwrap();
        let f = WeightField::generate(bx(100, 100), d, 5).unwrap();
        assert!(f.values().iter().all(|&v| v >= 0.0 && v.fract() == 0.0));
        let zeros = f.values().iter().filter(|&&v| v == 0.0).count() as f64 / 10_000.0;
        assert!((zeros - 0.4).abs() < 0.03, "P(X=0) = {zeros}");
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(WeightDistribution::exponential(0.0).is_err());
        assert!(WeightDistribution::geometric(1.0).is_err());
        assert!(WeightDistribution::two_point(1.0, 1.0, 0.5).is_err());
        assert!(WeightDistribution::two_point(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn lookup_outside_box_is_error() {
        let f = WeightField::generate(bx(3, 3), WeightDistribution::Uniform01, 0).unwrap();
        assert_eq!(f.get(Site::new(3, 0)), Err(Error::FieldDoesNotCoverBox(Site::new(3, 0))));
        assert!(f.get(Site::new(2, 2)).is_ok());
    }

    #[test]
    fn shift_examples() {
        let d = WeightDistribution::exponential(1.0).unwrap();
        let f = WeightField::generate(bx(10, 10), d, 8).unwrap();
        assert_eq!(f.shift(Site::ORIGIN).unwrap(), f);
        let g = f.shift(Site::new(1, 0)).unwrap();
        assert_eq!(g.get(Site::ORIGIN).unwrap(), f.get(Site::new(1, 0)).unwrap());
        let back = g.shift(Site::new(-1, 0)).unwrap();
        assert_eq!(back, f);
        // shifted field agrees with regeneration from its bookkeeping
        let z = Site::new(3, -2);
        let s = f.shift(z).unwrap();
        assert_eq!(s.regenerate(*s.region()).unwrap(), s);
    }

    #[test]
    fn shift_out_of_domain() {
        let f = WeightField::generate(bx(2, 2), WeightDistribution::Uniform01, 0).unwrap();
        assert!(matches!(f.shift(Site::new(MAX_COORD + 5, 0)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn overlapping_boxes_agree() {
        let d = WeightDistribution::Uniform01;
        let a = WeightField::generate(BoxRegion::new(Site::new(-5, -5), Site::new(5, 5)).unwrap(), d, 77).unwrap();
        let b = WeightField::generate(BoxRegion::new(Site::new(0, 0), Site::new(20, 8)).unwrap(), d, 77).unwrap();
        let common = a.region().intersect(b.region()).unwrap();
        for x in common.sites() {
            assert_eq!(a.at(x), b.at(x));
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = WeightField::generate(bx(4, 3), WeightDistribution::exponential(1.0).unwrap(), 1).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("c1,c2,value\n"));
        let g = WeightField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.region(), f.region());
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["exp", "exp:2", "geom:0.3", "unif", "twopoint:0:1:0.5"] {
            let d = WeightDistribution::parse(s).unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!(WeightDistribution::parse("cauchy").is_err());
    }
}
