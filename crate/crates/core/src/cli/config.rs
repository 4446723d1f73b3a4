use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::graded_breakpoints;

/// Benchmark identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    Hertz2d,
    Hertz3d,
    Hertz2dLarge,
    Hertz2dLargeDirichlet,
    InfSup,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] =
        [Benchmark::Hertz2d, Benchmark::Hertz3d, Benchmark::Hertz2dLarge, Benchmark::Hertz2dLargeDirichlet, Benchmark::InfSup];

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Hertz2d => "hertz2d",
            Benchmark::Hertz3d => "hertz3d",
            Benchmark::Hertz2dLarge => "hertz2d-large",
            Benchmark::Hertz2dLargeDirichlet => "hertz2d-large-dirichlet",
            Benchmark::InfSup => "infsup",
        }
    }

    pub fn dim(&self) -> usize {
        if *self == Benchmark::Hertz3d {
            3
        } else {
            2
        }
    }

    pub fn large_deformation(&self) -> bool {
        matches!(self, Benchmark::Hertz2dLarge | Benchmark::Hertz2dLargeDirichlet)
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown benchmark '{s}' (expected one of: hertz2d, hertz3d, hertz2d-large, hertz2d-large-dirichlet, infsup)")))
    }
}

/// Everything a benchmark run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub benchmark: Benchmark,
    pub degree: usize,
    /// Number of meshes: all but the finest are reported.
    pub levels: usize,
    /// Bisections of the reference mesh beyond the finest reported one.
    pub reference_offset: usize,
    /// Spans per direction of the coarsest mesh.
    pub base_spans: usize,
    /// `(span_fraction, length_fraction)` of the graded base mesh.
    pub grading: (f64, f64),
    /// Grade the direction normal to the contact face as well.
    pub grade_normal: bool,
    pub radius: f64,
    pub young: f64,
    pub poisson: f64,
    pub pressure: f64,
    /// Prescribed vertical displacement of the loaded face (Dirichlet variant).
    pub displacement: f64,
    pub load_steps: usize,
    pub newton_tol: f64,
    /// Gauss points per direction (0: degree + 1).
    pub quad_points: usize,
    pub out: PathBuf,
}

impl RunConfig {
    /// Defaults of each benchmark.
    pub fn defaults(benchmark: Benchmark) -> Self {
        let mut c = RunConfig {
            benchmark,
            degree: 2,
            levels: 5,
            reference_offset: 2,
            base_spans: 6,
            grading: (0.8, 0.1),
            grade_normal: true,
            radius: 1.0,
            young: 1.0,
            poisson: 0.3,
            pressure: 0.003,
            displacement: 0.0,
            load_steps: 10,
            newton_tol: 1e-10,
            quad_points: 0,
            out: PathBuf::from(format!("out/{}", benchmark.name())),
        };
        match benchmark {
            Benchmark::Hertz3d => {
                c.levels = 3;
                c.reference_offset = 1;
                c.base_spans = 4;
                c.grading = (0.75, 0.1);
                c.pressure = 1e-4;
            }
            Benchmark::Hertz2dLarge => {
                c.levels = 4;
                c.pressure = 0.1;
                c.base_spans = 4;
                c.grading = (0.5, 0.5);
            }
            Benchmark::Hertz2dLargeDirichlet => {
                c.levels = 4;
                c.pressure = 0.0;
                c.displacement = -0.4;
                c.grading = (0.5, 0.3);
            }
            Benchmark::InfSup => {
                c.levels = 3;
                c.base_spans = 4;
            }
            Benchmark::Hertz2d => {
                c.base_spans = 3;
                c.grading = (0.8, 0.2);
            }
        }
        c
    }

    pub fn quadrature_points(&self) -> usize {
        if self.quad_points == 0 {
            self.degree + 1
        } else {
            self.quad_points
        }
    }

    /// Parses a flat `key = value` file (`#` starts a comment). The
    /// `benchmark` key selects the defaults the other keys override.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let bench = pairs
            .iter()
            .find(|(k, _)| k == "benchmark")
            .ok_or_else(|| Error::Config("missing 'benchmark' key".into()))?
            .1
            .parse()?;
        let mut cfg = RunConfig::defaults(bench);
        for (k, v) in &pairs {
            if k != "benchmark" {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides one setting from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("invalid value '{v}' for '{key}'")))
        }
        match key {
            "degree" => self.degree = num(key, value)?,
            "levels" => self.levels = num(key, value)?,
            "reference_offset" => self.reference_offset = num(key, value)?,
            "base_spans" => self.base_spans = num(key, value)?,
            "grading" => {
                let (a, b) = value.split_once(',').ok_or_else(|| Error::Config("grading expects 'span_fraction,length_fraction'".into()))?;
                self.grading = (num(key, a.trim())?, num(key, b.trim())?);
            }
            "grade_normal" => self.grade_normal = num(key, value)?,
            "span_fraction" => self.grading.0 = num(key, value)?,
            "length_fraction" => self.grading.1 = num(key, value)?,
            "radius" => self.radius = num(key, value)?,
            "young" => self.young = num(key, value)?,
            "poisson" => self.poisson = num(key, value)?,
            "pressure" => self.pressure = num(key, value)?,
            "displacement" => self.displacement = num(key, value)?,
            "load_steps" => self.load_steps = num(key, value)?,
            "newton_tol" => self.newton_tol = num(key, value)?,
            "quad_points" => self.quad_points = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.degree < 2 {
            return bad("degree must be at least 2");
        }
        if self.base_spans < 1 {
            return bad("base_spans must be at least 1");
        }
        if self.benchmark == Benchmark::InfSup {
            if self.levels < 1 {
                return bad("infsup needs at least one level");
            }
        } else {
            if self.reference_offset < 1 {
                return bad("reference_offset must be at least 1");
            }
            if self.levels < 2 {
                return bad("levels must be at least 2 (one reported mesh and the reference)");
            }
            if self.base_spans < 2 {
                return bad("graded meshes need base_spans >= 2");
            }
            let (s, l) = self.grading;
            if !(s > 0.0 && s < 1.0 && l > 0.0 && l < 1.0) {
                return bad("grading fractions must lie in (0, 1)");
            }
            if let Err(e) = graded_breakpoints(self.base_spans, s, l) {
                return Err(Error::Config(format!("grading: {e}")));
            }
        }
        if !(self.radius > 0.0) || !(self.young > 0.0) || !(0.0..0.5).contains(&self.poisson) {
            return bad("invalid geometry or material");
        }
        if self.load_steps < 1 || !(self.newton_tol > 0.0) {
            return bad("invalid solver settings");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_overrides() {
        let c = RunConfig::parse("# run\nbenchmark = hertz2d\npressure = 0.01\ngrading = 0.7, 0.2\nlevels=4\n").unwrap();
        assert_eq!(c.benchmark, Benchmark::Hertz2d);
        assert_eq!(c.pressure, 0.01);
        assert_eq!(c.grading, (0.7, 0.2));
        assert_eq!(c.levels, 4);
        assert_eq!(c.quadrature_points(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("benchmark = hertz4d"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("pressure = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("benchmark = hertz2d\nfoo = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("benchmark = infsup\nbase_spans = 0"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("benchmark = hertz2d\nlevels = 1"), Err(Error::Config(_))));
    }

    #[test]
    fn names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
    }
}
