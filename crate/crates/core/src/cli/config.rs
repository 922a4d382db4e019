//! Scenario configuration: a strict `[section]` / `key = value` format.
//!
//! Keys may be dotted, and a key under `[a]` written as `b.c` is the same as
//! `a.b.c` at top level. `#` starts a comment. Vectors are whitespace-separated
//! components (`1 0 0`; a lone number is the x component) and lists are
//! comma-separated. Complex numbers are `re` or `re im`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;

use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseIssue {
    /// 1-based; 0 when the issue is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error: {}", join_issues(.0))]
    Parse(Vec<ParseIssue>),
    #[error("validation error: {0}")]
    Validation(String),
}

fn join_issues(issues: &[ParseIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "expected one of {}, got '{s}'",
                        [$($text),+].join(" | ")
                    )),
                }
            }
        }
    };
}

keyword_enum!(ModelChoice {
    FreeGaussian => "free_gaussian",
    Coherent => "coherent",
    Harmonic => "harmonic",
    Step => "step",
    Central => "central",
});

keyword_enum!(RadialChoice {
    Hydrogen => "hydrogen",
    Oscillator => "oscillator",
});

keyword_enum!(PotentialChoice {
    Auto => "auto",
    Free => "free",
    Step => "step",
    Harmonic => "harmonic",
    Coulomb => "coulomb",
    Harmonic3D => "harmonic3d",
});

keyword_enum!(Mode {
    Trajectory => "trajectory",
    Dbb => "dbb",
    Ensemble => "ensemble",
    Classify => "classify",
    Sweep => "sweep",
    Radial => "radial",
    Check => "check",
});

keyword_enum!(VelocityInit {
    Given => "given",
    Dbb => "dbb",
    DbbPlus => "dbb_plus",
});

keyword_enum!(EnsembleLaw {
    Dbb => "dbb",
    Gaussian => "gaussian",
});

#[derive(Debug, Clone, PartialEq)]
pub struct CentralConfig {
    pub l: u32,
    /// Indexed `m = -l..=l`.
    pub coefficients: Vec<Complex64>,
    pub radial: RadialChoice,
    /// Principal number of the hydrogen-like profile.
    pub n: u32,
    pub a0: f64,
    pub omega: f64,
    pub hbar: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub kind: ModelChoice,
    pub coherent_a: f64,
    pub harmonic_n: u32,
    pub step_e: f64,
    pub step_v: f64,
    pub central: CentralConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialConfig {
    pub kind: PotentialChoice,
    pub height: f64,
    pub stiffness: f64,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub t0: f64,
    /// Initial positions; broadcast against `v0` when one of them has length 1.
    pub x0: Vec<Vec3>,
    pub v0: Vec<Vec3>,
    pub velocity: VelocityInit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
    pub sample_times: Vec<f64>,
    pub escape_radius: f64,
    pub stop_on_escape: bool,
    pub center_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n: usize,
    pub seed: u64,
    pub law: EnsembleLaw,
    pub v0: Vec3,
    pub sigma_tilde: f64,
    pub sample_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub etilde: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub etilde_min: f64,
    pub etilde_max: f64,
    pub etilde_n: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub c_n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialConfig {
    pub r0: f64,
    pub m0: f64,
    /// Paired with `c` entry by entry.
    pub rdot0: Vec<f64>,
    pub c: Vec<f64>,
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: String,
    pub stem: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub potential: PotentialConfig,
    pub run: RunConfig,
    pub integrator: IntegratorConfig,
    pub ensemble: EnsembleConfig,
    pub classify: ClassifyConfig,
    pub sweep: SweepConfig,
    pub radial: RadialConfig,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig {
                kind: ModelChoice::Coherent,
                coherent_a: 1.0,
                harmonic_n: 0,
                step_e: 0.25,
                step_v: 1.0,
                central: CentralConfig {
                    l: 1,
                    coefficients: vec![
                        Complex64::new(0.0, 0.0),
                        Complex64::new(0.0, 0.0),
                        Complex64::new(1.0, 0.0),
                    ],
                    radial: RadialChoice::Hydrogen,
                    n: 2,
                    a0: 1.0,
                    omega: 1.0,
                    hbar: 1.0,
                    mass: 1.0,
                },
            },
            potential: PotentialConfig {
                kind: PotentialChoice::Auto,
                height: 1.0,
                stiffness: 1.0,
                strength: 1.0,
            },
            run: RunConfig {
                mode: Mode::Trajectory,
                t0: 0.0,
                x0: vec![[0.0; 3]],
                v0: vec![[0.0; 3]],
                velocity: VelocityInit::Given,
            },
            integrator: IntegratorConfig {
                rel_tol: 1e-9,
                abs_tol: 1e-9,
                max_step: f64::INFINITY,
                t_end: 10.0,
                sample_times: Vec::new(),
                escape_radius: 10.0,
                stop_on_escape: true,
                center_radius: Some(1e-3),
            },
            ensemble: EnsembleConfig {
                n: 10_000,
                seed: 0,
                law: EnsembleLaw::Dbb,
                v0: [0.0; 3],
                sigma_tilde: 0.0,
                sample_times: vec![0.0, 0.5, 1.0, 2.0, 5.0],
            },
            classify: ClassifyConfig {
                etilde: 0.0,
                c: 0.0,
            },
            sweep: SweepConfig {
                etilde_min: -2.0,
                etilde_max: 2.0,
                etilde_n: 41,
                c_min: -2.0,
                c_max: 2.0,
                c_n: 41,
            },
            radial: RadialConfig {
                r0: 1.0,
                m0: 2.0,
                rdot0: vec![1.0, 0.0, -1.0],
                c: vec![0.0, -0.5, 0.5],
                t_end: 3.0,
                samples: 301,
            },
            output: OutputConfig {
                dir: "out".into(),
                stem: "run".into(),
            },
        }
    }
}

struct Entry {
    value: String,
    line: usize,
}

/// Typed, consuming access to the parsed key table.
struct Reader {
    entries: BTreeMap<String, Entry>,
    issues: Vec<ParseIssue>,
}

impl Reader {
    fn take<T>(&mut self, key: &str, slot: &mut T, parse: impl Fn(&str) -> Result<T, String>) {
        if let Some(e) = self.entries.remove(key) {
            match parse(e.value.trim()) {
                Ok(v) => *slot = v,
                Err(msg) => self.issues.push(ParseIssue {
                    line: e.line,
                    message: format!("{key}: {msg}"),
                }),
            }
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v = f64::from_str(s).map_err(|_| format!("expected a number, got '{s}'"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if !v.is_finite() {
        return Err(format!("expected a finite number, got '{s}'"));
    }
    Ok(v)
}

fn parse_int<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse()
        .map_err(|_| format!("expected a non-negative integer, got '{s}'"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true | false, got '{s}'")),
    }
}

fn parse_keyword<T: FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| item(p.trim())).collect()
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.is_empty() || parts.len() > 3 {
        return Err(format!("expected 1 to 3 components, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (d, p) in parts.iter().enumerate() {
        v[d] = parse_finite(p)?;
    }
    Ok(v)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_finite(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_finite(re)?, parse_finite(im)?)),
        _ => Err(format!("expected 're' or 're im', got '{s}'")),
    }
}

fn parse_optional_radius(s: &str) -> Result<Option<f64>, String> {
    if s == "none" {
        Ok(None)
    } else {
        parse_finite(s).map(Some)
    }
}

fn parse_text(s: &str) -> Result<String, String> {
    if s.is_empty() {
        Err("expected a non-empty value".into())
    } else {
        Ok(s.to_string())
    }
}

/// Parses `text` and runs [`ScenarioConfig::validate`] on the result.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let c = parse_syntax(text)?;
    c.validate()?;
    Ok(c)
}

fn parse_syntax(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    let mut issues = Vec::new();
    let mut section = String::new();
    let valid_key = |k: &str| {
        !k.is_empty()
            && k.split('.')
                .all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) if valid_key(name.trim()) => section = name.trim().to_string(),
                _ => issues.push(ParseIssue {
                    line,
                    message: format!("malformed section header '{body}'"),
                }),
            }
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            issues.push(ParseIssue {
                line,
                message: format!("expected 'key = value', got '{body}'"),
            });
            continue;
        };
        let k = k.trim();
        if !valid_key(k) {
            issues.push(ParseIssue {
                line,
                message: format!("malformed key '{k}'"),
            });
            continue;
        }
        let full = if section.is_empty() {
            k.to_string()
        } else {
            format!("{section}.{k}")
        };
        if let Some(prev) = entries.get(&full) {
            let prev: &Entry = prev;
            issues.push(ParseIssue {
                line,
                message: format!("duplicate key {full} (first set on line {})", prev.line),
            });
            continue;
        }
        entries.insert(
            full,
            Entry {
                value: v.trim().to_string(),
                line,
            },
        );
    }

    let mut r = Reader { entries, issues };
    let mut c = ScenarioConfig::default();
    {
        let m = &mut c.model;
        r.take("model.kind", &mut m.kind, parse_keyword);
        r.take("model.coherent.a", &mut m.coherent_a, parse_finite);
        r.take("model.harmonic.n", &mut m.harmonic_n, parse_int);
        r.take("model.step.E", &mut m.step_e, parse_finite);
        r.take("model.step.V", &mut m.step_v, parse_finite);
        let ce = &mut m.central;
        r.take("model.central.l", &mut ce.l, parse_int);
        r.take("model.central.coefficients", &mut ce.coefficients, |s| {
            parse_list(s, parse_complex)
        });
        r.take("model.central.radial", &mut ce.radial, parse_keyword);
        r.take("model.central.n", &mut ce.n, parse_int);
        r.take("model.central.a0", &mut ce.a0, parse_finite);
        r.take("model.central.omega", &mut ce.omega, parse_finite);
        r.take("model.central.hbar", &mut ce.hbar, parse_finite);
        r.take("model.central.mass", &mut ce.mass, parse_finite);
    }
    {
        let p = &mut c.potential;
        r.take("potential.kind", &mut p.kind, parse_keyword);
        r.take("potential.height", &mut p.height, parse_finite);
        r.take("potential.stiffness", &mut p.stiffness, parse_finite);
        r.take("potential.strength", &mut p.strength, parse_finite);
    }
    {
        let run = &mut c.run;
        r.take("run.mode", &mut run.mode, parse_keyword);
        r.take("run.t0", &mut run.t0, parse_finite);
        r.take("run.x0", &mut run.x0, |s| parse_list(s, parse_vec3));
        r.take("run.v0", &mut run.v0, |s| parse_list(s, parse_vec3));
        r.take("run.velocity", &mut run.velocity, parse_keyword);
    }
    {
        let g = &mut c.integrator;
        r.take("integrator.rel_tol", &mut g.rel_tol, parse_finite);
        r.take("integrator.abs_tol", &mut g.abs_tol, parse_finite);
        r.take("integrator.max_step", &mut g.max_step, parse_f64);
        r.take("integrator.t_end", &mut g.t_end, parse_finite);
        r.take("integrator.sample_times", &mut g.sample_times, |s| {
            parse_list(s, parse_finite)
        });
        r.take(
            "integrator.escape_radius",
            &mut g.escape_radius,
            parse_finite,
        );
        r.take(
            "integrator.stop_on_escape",
            &mut g.stop_on_escape,
            parse_bool,
        );
        r.take(
            "integrator.center_radius",
            &mut g.center_radius,
            parse_optional_radius,
        );
    }
    {
        let e = &mut c.ensemble;
        r.take("ensemble.n", &mut e.n, parse_int);
        r.take("ensemble.seed", &mut e.seed, parse_int);
        r.take("ensemble.law", &mut e.law, parse_keyword);
        r.take("ensemble.v0", &mut e.v0, parse_vec3);
        r.take("ensemble.sigma_tilde", &mut e.sigma_tilde, parse_finite);
        r.take("ensemble.sample_times", &mut e.sample_times, |s| {
            parse_list(s, parse_finite)
        });
    }
    r.take("classify.etilde", &mut c.classify.etilde, parse_finite);
    r.take("classify.C", &mut c.classify.c, parse_finite);
    {
        let s = &mut c.sweep;
        r.take("sweep.etilde_min", &mut s.etilde_min, parse_finite);
        r.take("sweep.etilde_max", &mut s.etilde_max, parse_finite);
        r.take("sweep.etilde_n", &mut s.etilde_n, parse_int);
        r.take("sweep.C_min", &mut s.c_min, parse_finite);
        r.take("sweep.C_max", &mut s.c_max, parse_finite);
        r.take("sweep.C_n", &mut s.c_n, parse_int);
    }
    {
        let d = &mut c.radial;
        r.take("radial.r0", &mut d.r0, parse_finite);
        r.take("radial.m0", &mut d.m0, parse_finite);
        r.take("radial.rdot0", &mut d.rdot0, |s| {
            parse_list(s, parse_finite)
        });
        r.take("radial.C", &mut d.c, |s| parse_list(s, parse_finite));
        r.take("radial.t_end", &mut d.t_end, parse_finite);
        r.take("radial.samples", &mut d.samples, parse_int);
    }
    r.take("output.dir", &mut c.output.dir, parse_text);
    r.take("output.stem", &mut c.output.stem, parse_text);

    let Reader {
        entries,
        mut issues,
    } = r;
    for (key, e) in entries {
        issues.push(ParseIssue {
            line: e.line,
            message: format!("unknown key {key}"),
        });
    }
    if issues.is_empty() {
        Ok(c)
    } else {
        issues.sort_by_key(|i| i.line);
        Err(ConfigError::Parse(issues))
    }
}

fn fmt_vec3(v: &Vec3) -> String {
    format!("{} {} {}", v[0], v[1], v[2])
}

fn fmt_list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn fmt_complex(c: &Complex64) -> String {
    format!("{} {}", c.re, c.im)
}

impl ScenarioConfig {
    /// Every key with its value, in file order.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let m = &self.model;
        let ce = &m.central;
        let p = &self.potential;
        let run = &self.run;
        let g = &self.integrator;
        let e = &self.ensemble;
        let s = &self.sweep;
        let d = &self.radial;
        let kv: Vec<(&str, String)> = vec![
            ("model.kind", m.kind.as_str().into()),
            ("model.coherent.a", m.coherent_a.to_string()),
            ("model.harmonic.n", m.harmonic_n.to_string()),
            ("model.step.E", m.step_e.to_string()),
            ("model.step.V", m.step_v.to_string()),
            ("model.central.l", ce.l.to_string()),
            (
                "model.central.coefficients",
                fmt_list(&ce.coefficients, fmt_complex),
            ),
            ("model.central.radial", ce.radial.as_str().into()),
            ("model.central.n", ce.n.to_string()),
            ("model.central.a0", ce.a0.to_string()),
            ("model.central.omega", ce.omega.to_string()),
            ("model.central.hbar", ce.hbar.to_string()),
            ("model.central.mass", ce.mass.to_string()),
            ("potential.kind", p.kind.as_str().into()),
            ("potential.height", p.height.to_string()),
            ("potential.stiffness", p.stiffness.to_string()),
            ("potential.strength", p.strength.to_string()),
            ("run.mode", run.mode.as_str().into()),
            ("run.t0", run.t0.to_string()),
            ("run.x0", fmt_list(&run.x0, fmt_vec3)),
            ("run.v0", fmt_list(&run.v0, fmt_vec3)),
            ("run.velocity", run.velocity.as_str().into()),
            ("integrator.rel_tol", g.rel_tol.to_string()),
            ("integrator.abs_tol", g.abs_tol.to_string()),
            ("integrator.max_step", g.max_step.to_string()),
            ("integrator.t_end", g.t_end.to_string()),
            (
                "integrator.sample_times",
                fmt_list(&g.sample_times, f64::to_string),
            ),
            ("integrator.escape_radius", g.escape_radius.to_string()),
            ("integrator.stop_on_escape", g.stop_on_escape.to_string()),
            (
                "integrator.center_radius",
                g.center_radius.map_or("none".into(), |r| r.to_string()),
            ),
            ("ensemble.n", e.n.to_string()),
            ("ensemble.seed", e.seed.to_string()),
            ("ensemble.law", e.law.as_str().into()),
            ("ensemble.v0", fmt_vec3(&e.v0)),
            ("ensemble.sigma_tilde", e.sigma_tilde.to_string()),
            (
                "ensemble.sample_times",
                fmt_list(&e.sample_times, f64::to_string),
            ),
            ("classify.etilde", self.classify.etilde.to_string()),
            ("classify.C", self.classify.c.to_string()),
            ("sweep.etilde_min", s.etilde_min.to_string()),
            ("sweep.etilde_max", s.etilde_max.to_string()),
            ("sweep.etilde_n", s.etilde_n.to_string()),
            ("sweep.C_min", s.c_min.to_string()),
            ("sweep.C_max", s.c_max.to_string()),
            ("sweep.C_n", s.c_n.to_string()),
            ("radial.r0", d.r0.to_string()),
            ("radial.m0", d.m0.to_string()),
            ("radial.rdot0", fmt_list(&d.rdot0, f64::to_string)),
            ("radial.C", fmt_list(&d.c, f64::to_string)),
            ("radial.t_end", d.t_end.to_string()),
            ("radial.samples", d.samples.to_string()),
            ("output.dir", self.output.dir.clone()),
            ("output.stem", self.output.stem.clone()),
        ];
        kv.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Renders every key; `parse_config(&c.render())` reproduces `c`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut current = String::new();
        for (key, value) in self.key_values() {
            // the section is everything before the last dot
            let (section, leaf) = key.rsplit_once('.').expect("keys are dotted");
            if section != current {
                if !out.is_empty() {
                    out.push('\n');
                }
                let _ = writeln!(out, "[{section}]");
                current = section.to_string();
            }
            let _ = writeln!(out, "{leaf} = {value}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("[model]\nkind = coherent\n\n[model.coherent]\na = 1.0\n").unwrap();
        assert_eq!(c, ScenarioConfig::default());
    }

    #[test]
    fn dotted_keys_anywhere() {
        let a = parse_config("model.kind = step\nmodel.step.E = 0.5\n").unwrap();
        let b = parse_config("[model]\nkind = step\nstep.E = 0.5\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.model.step_e, 0.5);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("[model]\nkind = coherent\nfoo = 1\n").unwrap_err();
        let ConfigError::Parse(issues) = err else {
            panic!()
        };
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].line, 3);
        assert!(issues[0].message.contains("model.foo"));
    }

    #[test]
    fn malformed_lines_are_reported_with_locations() {
        let err = parse_config("[run\nmode = fly\nx0 = 1 2 3 4\njunk\n").unwrap_err();
        let ConfigError::Parse(issues) = err else {
            panic!()
        };
        let lines: Vec<usize> = issues.iter().map(|i| i.line).collect();
        assert_eq!(lines, vec![1, 2, 3, 4]);
    }

    #[test]
    fn duplicate_keys_rejected() {
        assert!(parse_config("run.t0 = 1\n[run]\nt0 = 2\n").is_err());
    }

    #[test]
    fn values_parse() {
        let c = parse_config(
            "[run]\nx0 = 1 2 3, 4\nv0 = \nvelocity = dbb\n[model]\nkind = central\n[model.central]\ncoefficients = 0.6, 0 -0.8, 0\n[integrator]\ncenter_radius = none\nmax_step = inf\n",
        )
        .unwrap();
        assert_eq!(c.run.x0, vec![[1.0, 2.0, 3.0], [4.0, 0.0, 0.0]]);
        assert!(c.run.v0.is_empty());
        assert_eq!(c.model.central.coefficients[1], Complex64::new(0.0, -0.8));
        assert_eq!(c.integrator.center_radius, None);
        assert_eq!(c.integrator.max_step, f64::INFINITY);
    }

    #[test]
    fn render_round_trip_default() {
        let c = ScenarioConfig::default();
        assert_eq!(parse_config(&c.render()).unwrap(), c);
    }
}
