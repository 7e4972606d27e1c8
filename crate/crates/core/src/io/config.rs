//! INI-style run configuration.
//!
//! Lines are `key = value`, optionally grouped under `[section]` headers;
//! `#` or `;` start a comment at line start or after whitespace. Every key
//! has one home section. A key may appear before any header or under its
//! home section, never under another one.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flows::{abc_vorticity, random_divfree_vorticity, taylor_green_vorticity};
use crate::reference::StepperConfig;
use crate::slab::{PartitionPolicy, PicardConfig, SlabSchemeConfig};
use crate::spectral::{Grid, SpectralVectorField};

use super::snapshot::load_field;

/// File name of the normalized echo inside the output directory.
pub const ECHO_FILE: &str = "config.ini";

const SECTIONS: [&str; 6] = ["run", "reference", "partition", "scheme", "sampling", "study"];

/// `(section, key)` in echo order.
const KEYS: [(&str, &str); 20] = [
    ("run", "n"),
    ("run", "nu"),
    ("run", "T"),
    ("run", "initial"),
    ("run", "output"),
    ("reference", "dt"),
    ("partition", "policy"),
    ("partition", "slabs"),
    ("partition", "epsilon0"),
    ("partition", "C"),
    ("partition", "dt_floor"),
    ("scheme", "provider"),
    ("scheme", "tol"),
    ("scheme", "max_iter"),
    ("scheme", "samples_per_slab"),
    ("sampling", "scalar_every"),
    ("sampling", "field_every"),
    ("study", "study_slabs"),
    ("study", "gamma"),
    ("study", "monitor_stride"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    TaylorGreen,
    AbcBeltrami,
    RandomDivfree(u64),
    File(PathBuf),
}

impl InitialCondition {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        let inner = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_suffix(')'))
                .map(str::trim)
        };
        match s {
            "taylor-green" => Ok(InitialCondition::TaylorGreen),
            "abc-beltrami" => Ok(InitialCondition::AbcBeltrami),
            _ => {
                if let Some(seed) = inner("random-divfree(") {
                    seed.parse()
                        .map(InitialCondition::RandomDivfree)
                        .map_err(|_| format!("seed {seed:?} is not an unsigned 64-bit integer"))
                } else if let Some(path) = inner("file(") {
                    if path.is_empty() {
                        Err("file() needs a path".into())
                    } else {
                        Ok(InitialCondition::File(PathBuf::from(path)))
                    }
                } else {
                    Err(format!(
                        "unknown initial condition {s:?}; expected taylor-green, abc-beltrami, random-divfree(SEED) or file(PATH)"
                    ))
                }
            }
        }
    }

    fn render(&self) -> String {
        match self {
            InitialCondition::TaylorGreen => "taylor-green".into(),
            InitialCondition::AbcBeltrami => "abc-beltrami".into(),
            InitialCondition::RandomDivfree(seed) => format!("random-divfree({seed})"),
            InitialCondition::File(p) => format!("file({})", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    Uniform,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderMode {
    SelfConsistent,
    Reference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub nu: f64,
    pub t_end: f64,
    pub initial: InitialCondition,
    pub output: PathBuf,
    /// Reference stepper time step.
    pub dt: f64,
    pub partition: PartitionKind,
    pub slabs: usize,
    pub eps0: f64,
    pub c: f64,
    pub dt_floor: f64,
    pub provider: ProviderMode,
    pub tol: f64,
    pub max_iter: usize,
    pub samples_per_slab: usize,
    /// Reference scalar cadence in steps.
    pub scalar_every: usize,
    /// Snapshot cadence: reference steps, or slab sample points.
    pub field_every: usize,
    /// Slab counts of the `study` refinement sequence.
    pub study_slabs: Vec<usize>,
    pub gamma: f64,
    /// Snapshot stride of the coarse monitor pass used for the error band.
    pub monitor_stride: usize,
}

struct Entry {
    value: String,
    line: usize,
}

struct Raw {
    source: String,
    entries: BTreeMap<&'static str, Entry>,
}

fn home_section(key: &str) -> Option<(&'static str, &'static str)> {
    KEYS.iter().copied().find(|(_, k)| *k == key)
}

fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'#' || b == b';') && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

impl Raw {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.source.clone(),
            line,
            message: message.into(),
        }
    }

    fn parse(text: &str, source: &str) -> Result<Raw> {
        let mut raw = Raw {
            source: source.to_string(),
            entries: BTreeMap::new(),
        };
        let mut section: Option<&'static str> = None;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| raw.err(lineno, format!("malformed section header {line:?}")))?
                    .trim();
                section = Some(
                    SECTIONS
                        .iter()
                        .copied()
                        .find(|s| *s == name)
                        .ok_or_else(|| raw.err(lineno, format!("unknown section [{name}]")))?,
                );
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| raw.err(lineno, format!("expected `key = value`, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let (home, key) = home_section(key)
                .ok_or_else(|| raw.err(lineno, format!("unknown key {key:?}")))?;
            if let Some(s) = section {
                if s != home {
                    return Err(raw.err(lineno, format!("key {key:?} belongs in [{home}], not [{s}]")));
                }
            }
            if let Some(prev) = raw.entries.get(key) {
                return Err(raw.err(lineno, format!("duplicate key {key:?} (first on line {})", prev.line)));
            }
            if value.is_empty() {
                return Err(raw.err(lineno, format!("key {key:?} has an empty value")));
            }
            raw.entries.insert(key, Entry { value: value.to_string(), line: lineno });
        }
        Ok(raw)
    }

    /// Apply a `key=value` override; it reports as line 0.
    fn set(&mut self, assignment: &str) -> Result<()> {
        let bad = |m: String| Error::Config { path: "--set".into(), line: 0, message: m };
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {assignment:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let (_, key) = home_section(key).ok_or_else(|| bad(format!("unknown key {key:?}")))?;
        if value.is_empty() {
            return Err(bad(format!("key {key:?} has an empty value")));
        }
        self.entries.insert(key, Entry { value: value.to_string(), line: 0 });
        Ok(())
    }

    fn key_err(&self, key: &str, message: impl Into<String>) -> Error {
        let line = self.entries.get(key).map_or(0, |e| e.line);
        let path = if line == 0 && self.entries.contains_key(key) {
            "--set".to_string()
        } else {
            self.source.clone()
        };
        Error::Config {
            path,
            line,
            message: format!("{key}: {}", message.into()),
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.entries.get(key) {
            Some(e) => e
                .value
                .parse()
                .map_err(|_| self.key_err(key, format!("cannot parse {:?}", e.value))),
            None => default.ok_or_else(|| self.key_err(key, "required key is missing")),
        }
    }

    fn check(&self, key: &str, ok: bool, what: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            let v = self.entries.get(key).map_or("default", |e| e.value.as_str());
            Err(self.key_err(key, format!("value {v} out of range: {what}")))
        }
    }

    fn build(&self) -> Result<RunConfig> {
        let n: usize = self.get("n", None)?;
        self.check("n", n >= 4 && n % 2 == 0, "must be even and at least 4")?;
        let nu: f64 = self.get("nu", Some(1.0))?;
        self.check("nu", nu > 0.0 && nu.is_finite(), "must be positive")?;
        let t_end: f64 = self.get("T", None)?;
        self.check("T", t_end > 0.0 && t_end.is_finite(), "must be positive")?;
        let initial = match self.entries.get("initial") {
            Some(e) => InitialCondition::parse(&e.value).map_err(|m| self.key_err("initial", m))?,
            None => InitialCondition::TaylorGreen,
        };
        let output: PathBuf = self.get("output", Some(PathBuf::from("out")))?;

        let dt: f64 = self.get("dt", Some(1e-3))?;
        self.check("dt", dt > 0.0 && dt <= t_end, "must lie in (0, T]")?;
        let steps = (t_end / dt).round();
        self.check("dt", (steps * dt - t_end).abs() <= 1e-9 * t_end, "T must be a multiple of dt")?;

        let partition = match self.get::<String>("policy", Some("uniform".into()))?.as_str() {
            "uniform" => PartitionKind::Uniform,
            "adaptive" => PartitionKind::Adaptive,
            other => return Err(self.key_err("policy", format!("expected uniform or adaptive, got {other:?}"))),
        };
        let slabs: usize = self.get("slabs", Some(16))?;
        self.check("slabs", slabs >= 1, "must be at least 1")?;
        let eps0: f64 = self.get("epsilon0", Some(0.5))?;
        self.check("epsilon0", eps0 > 0.0 && eps0 < 1.0, "must lie in (0, 1)")?;
        let c: f64 = self.get("C", Some(1.0))?;
        self.check("C", c > 0.0 && c.is_finite(), "must be positive")?;
        let dt_floor: f64 = self.get("dt_floor", Some(1e-6))?;
        self.check("dt_floor", dt_floor >= 0.0 && dt_floor < t_end, "must lie in [0, T)")?;

        let provider = match self.get::<String>("provider", Some("self-consistent".into()))?.as_str() {
            "self-consistent" => ProviderMode::SelfConsistent,
            "reference" => ProviderMode::Reference,
            other => {
                return Err(self.key_err("provider", format!("expected self-consistent or reference, got {other:?}")))
            }
        };
        let tol: f64 = self.get("tol", Some(1e-10))?;
        self.check("tol", tol > 0.0 && tol.is_finite(), "must be positive")?;
        let max_iter: usize = self.get("max_iter", Some(50))?;
        self.check("max_iter", max_iter >= 1, "must be at least 1")?;
        let samples_per_slab: usize = self.get("samples_per_slab", Some(16))?;
        self.check("samples_per_slab", samples_per_slab >= 1, "must be at least 1")?;

        let scalar_every: usize = self.get("scalar_every", Some(1))?;
        self.check("scalar_every", scalar_every >= 1, "must be at least 1")?;
        let field_every: usize = self.get("field_every", Some(10))?;
        self.check("field_every", field_every >= 1, "must be at least 1")?;

        let study_slabs = match self.entries.get("study_slabs") {
            Some(e) => e
                .value
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| self.key_err("study_slabs", format!("cannot parse {:?}", e.value)))?,
            None => vec![4, 8, 16, 32],
        };
        self.check(
            "study_slabs",
            study_slabs.len() >= 3 && study_slabs[0] >= 1 && study_slabs.windows(2).all(|w| w[1] > w[0]),
            "needs at least 3 strictly increasing positive counts",
        )?;
        let gamma: f64 = self.get("gamma", Some(0.2))?;
        self.check("gamma", gamma > 0.0 && gamma < 0.25, "must lie in (0, 1/4)")?;
        let monitor_stride: usize = self.get("monitor_stride", Some(2))?;
        self.check("monitor_stride", monitor_stride >= 2, "must be at least 2")?;

        Ok(RunConfig {
            n,
            nu,
            t_end,
            initial,
            output,
            dt,
            partition,
            slabs,
            eps0,
            c,
            dt_floor,
            provider,
            tol,
            max_iter,
            samples_per_slab,
            scalar_every,
            field_every,
            study_slabs,
            gamma,
            monitor_stride,
        })
    }
}

/// Read and validate a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    load_config_with(path, &[])
}

/// Read a configuration file, then apply `key=value` overrides in order.
pub fn load_config_with(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        line: 0,
        message: format!("unreadable file: {e}"),
    })?;
    let mut raw = Raw::parse(&text, &path.display().to_string())?;
    for s in overrides {
        raw.set(s)?;
    }
    raw.build()
}

impl RunConfig {
    /// Parse configuration text; `source` names it in error messages.
    pub fn parse(text: &str, source: &str) -> Result<RunConfig> {
        Raw::parse(text, source)?.build()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n)
    }

    pub fn reference_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn stepper(&self) -> StepperConfig {
        StepperConfig::new(self.dt, self.nu)
    }

    pub fn scheme(&self) -> SlabSchemeConfig {
        let mut s = SlabSchemeConfig::new(self.nu);
        s.picard = PicardConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            ..PicardConfig::new(self.nu)
        };
        s.samples_per_slab = self.samples_per_slab;
        s.field_every = self.field_every;
        s
    }

    pub fn partition_policy(&self) -> PartitionPolicy {
        self.partition_policy_with(self.slabs)
    }

    pub fn partition_policy_with(&self, slabs: usize) -> PartitionPolicy {
        match self.partition {
            PartitionKind::Uniform => PartitionPolicy::Uniform { slabs },
            PartitionKind::Adaptive => PartitionPolicy::Adaptive {
                eps0: self.eps0,
                c: self.c,
                dt_floor: self.dt_floor,
            },
        }
    }

    pub fn initial_vorticity(&self) -> Result<SpectralVectorField> {
        let g = self.grid()?;
        Ok(match &self.initial {
            InitialCondition::TaylorGreen => taylor_green_vorticity(g),
            InitialCondition::AbcBeltrami => abc_vorticity(g),
            InitialCondition::RandomDivfree(seed) => random_divfree_vorticity(g, *seed),
            InitialCondition::File(p) => {
                let snap = load_field(p)?;
                if snap.n as usize != self.n {
                    return Err(Error::Snapshot {
                        path: p.clone(),
                        message: format!("grid {} does not match n = {}", snap.n, self.n),
                    });
                }
                snap.into_field()?
            }
        })
    }

    /// Canonical text with every key; parsing it reproduces `self`.
    pub fn normalized(&self) -> String {
        let value = |key: &str| -> String {
            match key {
                "n" => self.n.to_string(),
                "nu" => format!("{:?}", self.nu),
                "T" => format!("{:?}", self.t_end),
                "initial" => self.initial.render(),
                "output" => self.output.display().to_string(),
                "dt" => format!("{:?}", self.dt),
                "policy" => match self.partition {
                    PartitionKind::Uniform => "uniform".into(),
                    PartitionKind::Adaptive => "adaptive".into(),
                },
                "slabs" => self.slabs.to_string(),
                "epsilon0" => format!("{:?}", self.eps0),
                "C" => format!("{:?}", self.c),
                "dt_floor" => format!("{:?}", self.dt_floor),
                "provider" => match self.provider {
                    ProviderMode::SelfConsistent => "self-consistent".into(),
                    ProviderMode::Reference => "reference".into(),
                },
                "tol" => format!("{:?}", self.tol),
                "max_iter" => self.max_iter.to_string(),
                "samples_per_slab" => self.samples_per_slab.to_string(),
                "scalar_every" => self.scalar_every.to_string(),
                "field_every" => self.field_every.to_string(),
                "study_slabs" => self
                    .study_slabs
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                "gamma" => format!("{:?}", self.gamma),
                "monitor_stride" => self.monitor_stride.to_string(),
                _ => unreachable!("key table and renderer disagree"),
            }
        };
        let mut out = String::from("# normalized run configuration\n");
        for section in SECTIONS {
            let _ = writeln!(out, "\n[{section}]");
            for (_, key) in KEYS.iter().filter(|(s, _)| *s == section) {
                let _ = writeln!(out, "{key} = {}", value(key));
            }
        }
        out
    }

    /// Write the normalized text to `dir/config.ini`.
    pub fn echo(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(ECHO_FILE);
        std::fs::write(&path, self.normalized()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(text: &str) -> (usize, String) {
        match RunConfig::parse(text, "t.cfg") {
            Err(Error::Config { line, message, .. }) => (line, message),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let c = RunConfig::parse("n = 16\nT = 0.5\n", "t.cfg").unwrap();
        assert_eq!(c.n, 16);
        assert_eq!(c.t_end, 0.5);
        assert_eq!(c.nu, 1.0);
        assert_eq!(c.eps0, 0.5);
        assert_eq!(c.c, 1.0);
        assert_eq!(c.tol, 1e-10);
        assert_eq!(c.samples_per_slab, 16);
        assert_eq!(c.scalar_every, 1);
        assert_eq!(c.field_every, 10);
        assert_eq!(c.initial, InitialCondition::TaylorGreen);
        assert_eq!(c.partition, PartitionKind::Uniform);
        assert_eq!(c.provider, ProviderMode::SelfConsistent);
    }

    #[test]
    fn range_error_names_key_and_line() {
        let (line, msg) = parse_err("n = 16\nT = 0.5\nepsilon0 = 1.5\n");
        assert_eq!(line, 3);
        assert!(msg.contains("epsilon0"), "{msg}");
    }

    #[test]
    fn unknown_and_misplaced_keys_rejected() {
        let (line, msg) = parse_err("n = 16\n\n[run]\nT = 1\nviscosity = 2\n");
        assert_eq!(line, 5);
        assert!(msg.contains("viscosity"));
        let (line, _) = parse_err("[scheme]\nn = 16\nT = 1\n");
        assert_eq!(line, 2);
        let (line, _) = parse_err("[physics]\n");
        assert_eq!(line, 1);
        let (line, msg) = parse_err("n = 16\nn = 8\nT = 1\n");
        assert_eq!(line, 2);
        assert!(msg.contains("duplicate"));
        let (_, msg) = parse_err("T = 1\n");
        assert!(msg.contains("n: required"));
    }

    #[test]
    fn comments_and_initial_conditions() {
        let c = RunConfig::parse(
            "# header\nn = 8 ; grid\nT = 0.5   # end\ninitial = random-divfree( 42 )\n",
            "t.cfg",
        )
        .unwrap();
        assert_eq!(c.initial, InitialCondition::RandomDivfree(42));
        let c = RunConfig::parse("n=8\nT=1\ninitial=file(a/b.vslb)\n", "t").unwrap();
        assert_eq!(c.initial, InitialCondition::File("a/b.vslb".into()));
        assert!(RunConfig::parse("n=8\nT=1\ninitial=vortex\n", "t").is_err());
        assert!(RunConfig::parse("n=8\nT=1\ninitial=random-divfree(-1)\n", "t").is_err());
    }

    #[test]
    fn dt_lattice_and_gamma_ranges() {
        assert!(RunConfig::parse("n=8\nT=1\ndt=0.3\n", "t").is_err());
        assert!(RunConfig::parse("n=8\nT=1\ngamma=0.3\n", "t").is_err());
        assert!(RunConfig::parse("n=8\nT=1\nstudy_slabs=4,8\n", "t").is_err());
        assert!(RunConfig::parse("n=7\nT=1\n", "t").is_err());
    }

    #[test]
    fn normalized_round_trips() {
        let text = "n = 8\nT = 0.25\n[partition]\npolicy = adaptive\nC = 2\n[study]\nstudy_slabs = 2, 4, 8\n";
        let c = RunConfig::parse(text, "t").unwrap();
        let norm = c.normalized();
        let again = RunConfig::parse(&norm, "echo").unwrap();
        assert_eq!(again, c);
        assert_eq!(again.normalized(), norm);
    }

    #[test]
    fn overrides_apply_last() {
        let mut raw = Raw::parse("n = 8\nT = 1\n", "t").unwrap();
        raw.set("nu = 0.1").unwrap();
        raw.set("slabs=4").unwrap();
        let c = raw.build().unwrap();
        assert_eq!((c.nu, c.slabs), (0.1, 4));
        assert!(raw.set("bogus=1").is_err());
        raw.set("epsilon0=2").unwrap();
        match raw.build() {
            Err(Error::Config { path, line, .. }) => assert_eq!((path.as_str(), line), ("--set", 0)),
            other => panic!("{other:?}"),
        }
    }
}
