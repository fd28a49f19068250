//! Flat `key = value` experiment configuration.

use crate::error::{Error, Result};
use crate::lattice::MAX_BOX_SIDE;
use crate::tolerances;
use crate::weights::WeightDistribution;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Shape,
    Coalescence,
    Monotone,
    Uniqueness,
    Quantile,
    Selftest,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Shape,
        ExperimentKind::Coalescence,
        ExperimentKind::Monotone,
        ExperimentKind::Uniqueness,
        ExperimentKind::Quantile,
        ExperimentKind::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Shape => "shape",
            ExperimentKind::Coalescence => "coalescence",
            ExperimentKind::Monotone => "monotone",
            ExperimentKind::Uniqueness => "uniqueness",
            ExperimentKind::Quantile => "quantile",
            ExperimentKind::Selftest => "selftest",
        }
    }

    /// Whether the experiment builds stationary cocycles.
    pub fn needs_exponential(self) -> bool {
        matches!(self, ExperimentKind::Coalescence | ExperimentKind::Monotone | ExperimentKind::Uniqueness)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Seeds as an explicit list or as `base .. base + count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range { base: u64, count: u64 },
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Range { base, count } => (*base..base + count).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SeedSpec::List(v) => v.len(),
            SeedSpec::Range { count, .. } => *count as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All parameters of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dist: WeightDistribution,
    pub alphas: Vec<f64>,
    /// Box sides; for `shape` the scales `n`.
    pub sizes: Vec<u64>,
    pub horizons: Vec<i64>,
    /// First coordinates `ξ1` of the probed directions.
    pub directions: Vec<f64>,
    pub separations: Vec<u64>,
    pub seeds: SeedSpec,
    /// Half-width of the comparison window of `uniqueness`.
    pub window: u64,
    /// The `uniqueness` window is centred this many sites below the rail root.
    pub window_offset: u64,
    pub starts_per_side: u64,
    /// Number of halvings of the alpha spacing in `monotone`.
    pub refinements: u32,
    pub max_depth: u64,
    pub max_atoms: u64,
    pub resolution: u64,
    /// Absolute tolerance for exact identities.
    pub tolerance: f64,
    pub out_dir: PathBuf,
}

const KEYS: [&str; 19] = [
    "experiment",
    "dist",
    "alphas",
    "sizes",
    "horizons",
    "directions",
    "separations",
    "seeds",
    "base_seed",
    "seed_count",
    "window",
    "window_offset",
    "starts_per_side",
    "refinements",
    "max_depth",
    "max_atoms",
    "resolution",
    "tolerance",
    "out_dir",
];

impl ExperimentConfig {
    /// Default campaign for each experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut c = ExperimentConfig {
            experiment: kind,
            dist: WeightDistribution::Exponential { rate: 1.0 },
            alphas: vec![0.5],
            sizes: vec![300],
            horizons: vec![400, 1600],
            directions: vec![0.5],
            separations: vec![0, 20],
            seeds: SeedSpec::Range { base: 0, count: 50 },
            window: 48,
            window_offset: 0,
            starts_per_side: 2,
            refinements: 2,
            max_depth: 6,
            max_atoms: 5,
            resolution: 64,
            tolerance: tolerances::IDENTITY,
            out_dir: PathBuf::from("results"),
        };
        match kind {
            ExperimentKind::Shape => {
                c.sizes = vec![800];
                c.directions = vec![0.3, 0.5, 0.7];
            }
            ExperimentKind::Coalescence => {
                c.sizes = vec![250, 500, 1000, 2000];
                c.seeds = SeedSpec::Range { base: 0, count: 200 };
            }
            ExperimentKind::Monotone => {
                c.alphas = vec![0.3, 0.4, 0.5, 0.6, 0.7];
            }
            ExperimentKind::Uniqueness => {
                c.seeds = SeedSpec::Range { base: 0, count: 100 };
            }
            ExperimentKind::Quantile => {
                c.dist = WeightDistribution::Geometric { p: 0.5 };
                c.seeds = SeedSpec::Range { base: 0, count: 1000 };
            }
            ExperimentKind::Selftest => {
                c.alphas = vec![0.3, 0.5, 0.7];
                c.sizes = vec![40];
                c.seeds = SeedSpec::Range { base: 0, count: 10 };
            }
        }
        c
    }

    /// Parse a config file. `kind` supplies the experiment when the file has
    /// no `experiment` key; a conflicting key is an error.
    pub fn parse(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key {k:?}", no + 1)));
            }
            if pairs.iter().any(|(p, _): &(&str, &str)| *p == k) {
                return Err(Error::Config(format!("line {}: duplicate key {k:?}", no + 1)));
            }
            pairs.push((k, v));
        }
        let get = |k: &str| pairs.iter().find(|(p, _)| *p == k).map(|(_, v)| *v);
        let file_kind = get("experiment").map(ExperimentKind::from_str).transpose()?;
        let kind = match (file_kind, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config is for {a}, not {b}")));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("missing key \"experiment\"".into())),
        };
        let mut c = ExperimentConfig::defaults(kind);
        for &(k, v) in &pairs {
            match k {
                "experiment" => {}
                "dist" => c.dist = WeightDistribution::parse(v).map_err(|e| Error::Config(e.to_string()))?,
                "alphas" => c.alphas = parse_list(k, v)?,
                "sizes" => c.sizes = parse_list(k, v)?,
                "horizons" => c.horizons = parse_list(k, v)?,
                "directions" => c.directions = parse_list(k, v)?,
                "separations" => c.separations = parse_list(k, v)?,
                "seeds" => c.seeds = SeedSpec::List(parse_list(k, v)?),
                "base_seed" | "seed_count" => {}
                "window" => c.window = parse_one(k, v)?,
                "window_offset" => c.window_offset = parse_one(k, v)?,
                "starts_per_side" => c.starts_per_side = parse_one(k, v)?,
                "refinements" => c.refinements = parse_one(k, v)?,
                "max_depth" => c.max_depth = parse_one(k, v)?,
                "max_atoms" => c.max_atoms = parse_one(k, v)?,
                "resolution" => c.resolution = parse_one(k, v)?,
                "tolerance" => c.tolerance = parse_one(k, v)?,
                "out_dir" => c.out_dir = PathBuf::from(v),
                _ => unreachable!(),
            }
        }
        match (get("seeds"), get("base_seed"), get("seed_count")) {
            (Some(_), None, None) => {}
            (Some(_), _, _) => return Err(Error::Config("give either seeds or base_seed/seed_count".into())),
            (None, b, n) if b.is_some() || n.is_some() => {
                let base = b.map(|v| parse_one("base_seed", v)).transpose()?.unwrap_or(0);
                let count = match n {
                    Some(v) => parse_one("seed_count", v)?,
                    None => c.seeds.len() as u64,
                };
                c.seeds = SeedSpec::Range { base, count };
            }
            _ => {}
        }
        Ok(c)
    }

    /// Serialize; `parse(to_text())` reproduces the config exactly.
    pub fn to_text(&self) -> String {
        fn list<T: std::fmt::Debug>(v: &[T]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
        }
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "dist = {}", self.dist);
        let _ = writeln!(s, "alphas = {}", list(&self.alphas));
        let _ = writeln!(s, "sizes = {}", list(&self.sizes));
        let _ = writeln!(s, "horizons = {}", list(&self.horizons));
        let _ = writeln!(s, "directions = {}", list(&self.directions));
        let _ = writeln!(s, "separations = {}", list(&self.separations));
        match &self.seeds {
            SeedSpec::List(v) => {
                let _ = writeln!(s, "seeds = {}", list(v));
            }
            SeedSpec::Range { base, count } => {
                let _ = writeln!(s, "base_seed = {base}");
                let _ = writeln!(s, "seed_count = {count}");
            }
        }
        let _ = writeln!(s, "window = {}", self.window);
        let _ = writeln!(s, "window_offset = {}", self.window_offset);
        let _ = writeln!(s, "starts_per_side = {}", self.starts_per_side);
        let _ = writeln!(s, "refinements = {}", self.refinements);
        let _ = writeln!(s, "max_depth = {}", self.max_depth);
        let _ = writeln!(s, "max_atoms = {}", self.max_atoms);
        let _ = writeln!(s, "resolution = {}", self.resolution);
        let _ = writeln!(s, "tolerance = {:?}", self.tolerance);
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        s
    }

    /// Reject invalid parameters before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.seeds.is_empty() {
            return bad("empty seed list".into());
        }
        if let Err(e) = self.dist.validated() {
            return bad(e.to_string());
        }
        if self.experiment.needs_exponential() && !self.dist.is_exp1() {
            return bad(format!("{} needs dist = exp", self.experiment));
        }
        let m = tolerances::ALPHA_MARGIN;
        for &a in &self.alphas {
            if !(a.is_finite() && a >= m && a <= 1.0 - m) {
                return bad(format!("alpha {a} outside [{m}, {}]", 1.0 - m));
            }
        }
        if self.experiment.needs_exponential() && self.alphas.is_empty() {
            return bad("empty alpha list".into());
        }
        if self.experiment == ExperimentKind::Monotone && self.alphas.windows(2).any(|w| w[0] >= w[1]) {
            return bad("alphas must be strictly increasing".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-6) {
            return bad(format!("tolerance {} outside (0, 1e-6]", self.tolerance));
        }
        let needs_sizes = !matches!(self.experiment, ExperimentKind::Quantile | ExperimentKind::Uniqueness);
        if needs_sizes && self.sizes.is_empty() {
            return bad("empty size list".into());
        }
        for &n in &self.sizes {
            if n == 0 || n > MAX_BOX_SIDE {
                return bad(format!("size {n} outside [1, {MAX_BOX_SIDE}]"));
            }
        }
        match self.experiment {
            ExperimentKind::Shape => {
                if let Some(&n) = self.sizes.iter().find(|&&n| n < crate::stationary::MIN_SHAPE_N) {
                    return bad(format!("shape needs n >= {}, got {n}", crate::stationary::MIN_SHAPE_N));
                }
                if self.directions.is_empty() {
                    return bad("empty direction list".into());
                }
                if let Some(d) = self.directions.iter().find(|d| !(0.0..=1.0).contains(*d)) {
                    return bad(format!("direction {d} outside [0, 1]"));
                }
            }
            ExperimentKind::Coalescence => {
                let smallest = *self.sizes.iter().min().unwrap();
                if self.separations.is_empty() {
                    return bad("empty separation list".into());
                }
                if self.starts_per_side == 0 {
                    return bad("starts_per_side must be positive".into());
                }
                let reach = self.start_spacing() * (self.starts_per_side - 1);
                if let Some(&s) = self.separations.iter().find(|&&s| reach + s >= smallest) {
                    return bad(format!("separation {s} does not fit in the smallest window {smallest}"));
                }
            }
            ExperimentKind::Uniqueness => {
                if self.horizons.is_empty() {
                    return bad("empty horizon list".into());
                }
                if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("horizons must be strictly increasing".into());
                }
                let min_h = 4 * (self.window as i64 + 1);
                if self.horizons[0] < min_h {
                    return bad(format!("horizons must be at least {min_h} for window {}", self.window));
                }
                if self.horizons[self.horizons.len() - 1] as u64 + self.window + self.window_offset + 2 > MAX_BOX_SIDE {
                    return bad("horizon too large".into());
                }
            }
            ExperimentKind::Quantile => {
                if self.max_atoms == 0 {
                    return bad("max_atoms must be positive (empty measure)".into());
                }
                if self.max_depth == 0 || self.max_depth > 20 {
                    return bad(format!("max_depth {} outside [1, 20]", self.max_depth));
                }
                if self.resolution == 0 {
                    return bad("resolution must be positive".into());
                }
            }
            ExperimentKind::Monotone => {}
            ExperimentKind::Selftest => {
                if let Some(&n) = self.sizes.iter().find(|&&n| n < 8) {
                    return bad(format!("selftest boxes need side >= 8, got {n}"));
                }
            }
        }
        Ok(())
    }

    /// Spacing of the start grid of `coalescence`.
    pub fn start_spacing(&self) -> u64 {
        let smallest = self.sizes.iter().copied().min().unwrap_or(1);
        (smallest / (2 * self.starts_per_side.max(1))).max(1)
    }
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_one(key, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::defaults(kind);
            c.validate().unwrap();
            let back = ExperimentConfig::parse(&c.to_text(), None).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn explicit_seed_list_round_trips() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Monotone);
        c.seeds = SeedSpec::List(vec![3, 1, 4]);
        c.alphas = vec![0.1 + 0.2, 0.7];
        let back = ExperimentConfig::parse(&c.to_text(), None).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_overrides_and_comments() {
        let text = "# campaign\nexperiment = shape\nsizes = 64, 128\nbase_seed = 10\nseed_count = 3\n";
        let c = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(c.sizes, vec![64, 128]);
        assert_eq!(c.seeds.seeds(), vec![10, 11, 12]);
    }

    #[test]
    fn parse_errors() {
        assert!(ExperimentConfig::parse("sizes = 3", None).is_err());
        assert!(ExperimentConfig::parse("experiment = shape\nbogus = 1", None).is_err());
        assert!(ExperimentConfig::parse("experiment = shape\nsizes = a", None).is_err());
        assert!(ExperimentConfig::parse("experiment = shape\nsizes = 1\nsizes = 2", None).is_err());
        assert!(ExperimentConfig::parse("experiment = shape", Some(ExperimentKind::Monotone)).is_err());
        assert!(ExperimentConfig::parse("experiment = nope", None).is_err());
        assert!(ExperimentConfig::parse("experiment = shape\nseeds = 1\nbase_seed = 2", None).is_err());
    }

    #[test]
    fn validation_errors() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::Quantile);
        c.max_atoms = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::Monotone);
        c.alphas = vec![0.5, 0.4];
        assert!(c.validate().is_err());
        c.alphas = vec![0.0];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::Shape);
        c.sizes = vec![0];
        assert!(c.validate().is_err());
        c.sizes = vec![16];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::Coalescence);
        c.dist = WeightDistribution::Uniform01;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::Coalescence);
        c.separations = vec![500];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(ExperimentKind::Selftest);
        c.seeds = SeedSpec::List(vec![]);
        assert!(c.validate().is_err());
    }
}
