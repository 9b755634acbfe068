//! Run configuration: a line-oriented `section.key = value` file.
//!
//! Blank lines and text after `#` are ignored. Keys are unique except
//! `domain.cavity`, which may repeat. Every key is validated on load,
//! whichever subcommand runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use gpscav_core::elasticity::{Profile, SolveMethod, SolverOptions, TractionSegment, TractionSpec};
use gpscav_core::geometry::ArcInterval;
use gpscav_core::inverse::VanishingMode;
use gpscav_core::mesh::MeshOptions;
use gpscav_core::{DomainSpec, ElementOrder, PlateMaterial, Point2, StarShape};

use crate::error::CliError;

/// Recognized keys with a one-line description, in documentation order.
pub const KEYS: &[(&str, &str)] = &[
    ("run.output_dir", "directory receiving outputs (default `out`)"),
    ("run.seed", "seed for every random draw (default 0)"),
    ("run.threads", "worker threads, 0 for all cores (default 0)"),
    ("domain.outer", "outer boundary as `star cx cy rho0 K a1 b1 ... aK bK`"),
    ("domain.cavity", "cavity star line; repeat for several cavities"),
    ("domain.cavity_file", "file of cavity star lines, appended after `domain.cavity`"),
    ("domain.sigma", "measurement arc `s0 s1` in outer arclength, or `full`"),
    ("domain.p0", "anchor point `x1 x2` (default: midpoint of the arc)"),
    ("domain.r0", "regularity length scale"),
    ("domain.m0", "regularity constant M0"),
    ("domain.m1", "area constant M1"),
    ("domain.alpha", "Hölder exponent in (0, 1] (default 1)"),
    ("material.e", "Young's modulus (default 1)"),
    ("material.nu", "Poisson ratio in (-1, 0.5) (default 0.3)"),
    ("material.h", "plate thickness (default 1)"),
    ("load.type", "normal | vector | stress | radial_cos | point (default normal)"),
    ("load.p", "normal pressure for `normal` (default 1)"),
    ("load.vector", "force density or point force `f1 f2`"),
    ("load.stress", "constant stress `N11 N22 N12` for `stress`"),
    ("load.amp", "amplitude for `radial_cos` (default 1)"),
    ("load.k", "angular mode for `radial_cos` (default 2)"),
    ("load.arc", "loaded arc `s0 s1`, or `full` (default full)"),
    ("mesh.h", "target edge length"),
    ("mesh.cavity_factor", "cavity spacing as a multiple of mesh.h (default 1)"),
    ("mesh.min_angle", "minimum angle in degrees, in (0, 33] (default 25)"),
    ("mesh.relaxed", "skip the a-priori class check (default false)"),
    ("mesh.file", "existing gpsmesh file used instead of meshing"),
    ("solver.order", "element degree 1 or 2 (default 1)"),
    ("solver.method", "direct | iterative (default direct)"),
    ("solver.tol", "iterative relative residual (default 1e-10)"),
    ("solver.max_iter", "iterative iteration cap (default 20000)"),
    ("solver.project_load", "remove the rigid part of an unbalanced load (default true)"),
    ("solver.equilibrium_tol", "relative rigid residual accepted as balanced (default 1e-8)"),
    ("airy.patch", "disk | rect (default rect)"),
    ("airy.center", "disk center `x1 x2`"),
    ("airy.cavity", "cavity index of a rect patch (default 0)"),
    ("airy.theta", "polar angle of the rect patch on the cavity (default 0)"),
    ("airy.patch_radius", "disk radius or rect half-width (default 0.4)"),
    ("airy.degree", "polynomial degree of φ, 2..=16 (default 8)"),
    ("airy.slack", "multiplicative slack of the energy comparison (default 0.05)"),
    ("airy.samples", "cavity arc samples of the Dirichlet check (default 64)"),
    ("inverse.cavity", "index of the unknown cavity (default 0)"),
    ("inverse.direction", "`radial` or a parameter perturbation `dρ0 da1 db1 ...`"),
    ("inverse.dcenter", "center perturbation `dx1 dx2` per unit t (default 0 0)"),
    ("inverse.t_values", "explicit family parameters; 0 is always added"),
    ("inverse.t_start", "first geometric family parameter (default 1.5e-3)"),
    ("inverse.t_ratio", "geometric ratio of family parameters (default 1.6)"),
    ("inverse.t_count", "number of geometric family parameters (default 10)"),
    ("inverse.sigma_samples", "Σ samples of the Cauchy gap (default 512)"),
    ("inverse.distance_samples", "samples of the set distances (default 1024)"),
    ("inverse.d0_factor", "small-distance threshold over r0 (default 0.1)"),
    ("inverse.rate_mode", "boundary | interior (default boundary)"),
    ("inverse.rate_center", "center `x1 x2` (default: cavity point at angle 0)"),
    ("inverse.rate_rmax", "largest radius (default 0.8)"),
    ("inverse.rate_levels", "number of dyadic radii, at least 4 (default 4)"),
    ("inverse.profile_rho", "radii of the smallness profile"),
    ("inverse.profile_s", "offset factor s ≥ 1 (default 1.5)"),
    ("inverse.target", "star line of the cavity generating synthetic data"),
    ("inverse.init", "initial star line (default: the domain cavity)"),
    ("inverse.modes", "Fourier modes fitted (default 2)"),
    ("inverse.fit_center", "also fit the cavity center (default false)"),
    ("inverse.noise", "relative noise level on Σ data (default 0)"),
    ("inverse.reg_weights", "regularization weights for the discrepancy principle"),
    ("inverse.tau", "discrepancy factor τ ≥ 1 (default 1.1)"),
    ("inverse.max_iter", "Gauss–Newton iteration cap (default 50)"),
    ("inverse.fd_step", "finite-difference step over r0 (default 1e-4)"),
    ("inverse.step_tol", "step tolerance over r0 (default 1e-5)"),
];

#[derive(Clone, Debug)]
pub struct RunSection {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct MeshSection {
    pub options: MeshOptions,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatchChoice {
    Disk { center: Option<Point2> },
    Rect { cavity: usize, theta: f64 },
}

#[derive(Clone, Debug)]
pub struct AirySection {
    pub patch: PatchChoice,
    pub radius: f64,
    pub degree: u32,
    pub slack: f64,
    pub samples: usize,
}

#[derive(Clone, Debug)]
pub struct InverseSection {
    pub cavity: usize,
    /// `None` for the radial family.
    pub direction: Option<Vec<f64>>,
    pub dcenter: Point2,
    pub t_values: Vec<f64>,
    pub sigma_samples: usize,
    pub distance_samples: usize,
    pub d0_factor: f64,
    pub rate_mode: VanishingMode,
    pub rate_center: Option<Point2>,
    pub rate_rmax: f64,
    pub rate_levels: usize,
    pub profile_rho: Vec<f64>,
    pub profile_s: f64,
    pub target: Option<StarShape>,
    pub init: Option<StarShape>,
    pub modes: usize,
    pub fit_center: bool,
    pub noise: f64,
    pub reg_weights: Vec<f64>,
    pub tau: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub step_tol: f64,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub path: PathBuf,
    pub run: RunSection,
    pub domain: DomainSpec,
    pub material: PlateMaterial,
    pub load: TractionSpec,
    pub mesh: MeshSection,
    pub solver: SolverOptions,
    pub airy: AirySection,
    pub inverse: InverseSection,
}

struct Entry {
    line: usize,
    value: String,
}

/// Raw key/value table with typed accessors that name the key on failure.
struct Table {
    base: PathBuf,
    entries: BTreeMap<String, Vec<Entry>>,
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

impl Table {
    fn parse(text: &str, base: PathBuf) -> Result<Self, CliError> {
        let mut entries: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected `section.key = value`, found `{body}`")))?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.iter().any(|(k, _)| *k == key) {
                return Err(CliError::Config(format!("line {line}: unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(CliError::Config(format!("line {line}: {key} has an empty value")));
            }
            let slot = entries.entry(key.to_string()).or_default();
            if !slot.is_empty() && key != "domain.cavity" {
                return Err(CliError::Config(format!(
                    "line {line}: {key} is already set on line {}",
                    slot[0].line
                )));
            }
            slot.push(Entry {
                line,
                value: value.to_string(),
            });
        }
        Ok(Self { base, entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|v| v[0].value.as_str())
    }

    fn all(&self, key: &str) -> Vec<&str> {
        self.entries
            .get(key)
            .map(|v| v.iter().map(|e| e.value.as_str()).collect())
            .unwrap_or_default()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => {
                let x: f64 = v.parse().map_err(|_| config_err(key, format!("`{v}` is not a number")))?;
                if !x.is_finite() {
                    return Err(config_err(key, format!("`{v}` is not finite")));
                }
                Ok(x)
            }
        }
    }

    fn f64_req(&self, key: &str) -> Result<f64, CliError> {
        if self.raw(key).is_none() {
            return Err(config_err(key, "required key is missing"));
        }
        self.f64_or(key, 0.0)
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| config_err(key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(config_err(key, format!("`{v}` is not a boolean"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        v.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| config_err(key, format!("`{s}` is not a finite number")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn point(&self, key: &str) -> Result<Option<Point2>, CliError> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some(Point2::new(v[0], v[1]))),
            Some(v) => Err(config_err(key, format!("expected two numbers, found {}", v.len()))),
        }
    }

    fn star(&self, key: &str, text: &str) -> Result<StarShape, CliError> {
        StarShape::parse_line(text).map_err(|e| config_err(key, e))
    }

    fn path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let p = self.base.join(v);
        if !p.is_file() {
            return Err(config_err(key, format!("file `{}` does not exist", p.display())));
        }
        Ok(Some(p))
    }

    fn arc(&self, key: &str) -> Result<Option<(f64, f64)>, CliError> {
        if self.raw(key) == Some("full") {
            return Ok(None);
        }
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
            Some(_) => Err(config_err(key, "expected `s0 s1` or `full`")),
        }
    }

    fn choice<'a>(&'a self, key: &str, allowed: &[&'a str], default: &'a str) -> Result<&'a str, CliError> {
        let v = self.raw(key).unwrap_or(default);
        if allowed.contains(&v) {
            Ok(v)
        } else {
            Err(config_err(key, format!("`{v}` is not one of {}", allowed.join(", "))))
        }
    }
}

fn require(key: &str, ok: bool, msg: impl std::fmt::Display) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(config_err(key, msg))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = Self::parse(&text, base)?;
        cfg.path = path.to_path_buf();
        Ok(cfg)
    }

    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: PathBuf) -> Result<Self, CliError> {
        let t = Table::parse(text, base)?;
        let run = RunSection {
            output_dir: PathBuf::from(t.raw("run.output_dir").unwrap_or("out")),
            seed: t
                .raw("run.seed")
                .map(|v| v.parse().map_err(|_| config_err("run.seed", format!("`{v}` is not an unsigned integer"))))
                .transpose()?
                .unwrap_or(0),
            threads: t.usize_or("run.threads", 0)?,
        };
        let domain = parse_domain(&t)?;
        let material = parse_material(&t)?;
        let load = parse_load(&t, &domain)?;
        let mesh = parse_mesh(&t, &domain)?;
        let solver = parse_solver(&t)?;
        let airy = parse_airy(&t, &domain)?;
        let inverse = parse_inverse(&t, &domain)?;
        Ok(Self {
            path: PathBuf::new(),
            run,
            domain,
            material,
            load,
            mesh,
            solver,
            airy,
            inverse,
        })
    }
}

fn parse_domain(t: &Table) -> Result<DomainSpec, CliError> {
    let outer_line = t.raw("domain.outer").ok_or_else(|| config_err("domain.outer", "required key is missing"))?;
    let outer = t.star("domain.outer", outer_line)?;
    let mut cavities = Vec::new();
    for line in t.all("domain.cavity") {
        cavities.push(t.star("domain.cavity", line)?);
    }
    if let Some(p) = t.path("domain.cavity_file")? {
        let text = fs::read_to_string(&p).map_err(|e| config_err("domain.cavity_file", e))?;
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                let s = StarShape::parse_line(body)
                    .map_err(|e| config_err("domain.cavity_file", format!("{} line {}: {e}", p.display(), i + 1)))?;
                cavities.push(s);
            }
        }
    }
    let sigma = t.arc("domain.sigma")?;
    let r0 = t.f64_req("domain.r0")?;
    let m0 = t.f64_req("domain.m0")?;
    let m1 = t.f64_req("domain.m1")?;
    let alpha = t.f64_or("domain.alpha", 1.0)?;
    require("domain.r0", r0 > 0.0, format!("must be positive, got {r0}"))?;
    require("domain.m0", m0 > 0.0, format!("must be positive, got {m0}"))?;
    require("domain.m1", m1 > 0.0, format!("must be positive, got {m1}"))?;
    require("domain.alpha", alpha > 0.0 && alpha <= 1.0, format!("must lie in (0, 1], got {alpha}"))?;
    let mut d = DomainSpec::new(outer, cavities, sigma, r0, m0, m1, alpha).map_err(|e| config_err("domain.sigma", e))?;
    if let Some(p0) = t.point("domain.p0")? {
        d = d.with_p0(p0);
    }
    Ok(d)
}

fn parse_material(t: &Table) -> Result<PlateMaterial, CliError> {
    let e = t.f64_or("material.e", 1.0)?;
    let nu = t.f64_or("material.nu", 0.3)?;
    let h = t.f64_or("material.h", 1.0)?;
    require("material.e", e > 0.0, format!("must be positive, got {e}"))?;
    require("material.nu", nu > -1.0 && nu < 0.5, format!("{nu} is outside the range (-1, 0.5)"))?;
    require("material.h", h > 0.0, format!("must be positive, got {h}"))?;
    PlateMaterial::homogeneous(e, nu, h).map_err(|e| config_err("material", e))
}

fn parse_load(t: &Table, d: &DomainSpec) -> Result<TractionSpec, CliError> {
    let total = d.outer_length();
    let kind = t.choice("load.type", &["normal", "vector", "stress", "radial_cos", "point"], "normal")?;
    let interval = match t.arc("load.arc")? {
        None => ArcInterval::full(total),
        Some((a, b)) => ArcInterval::new(a, b, total).map_err(|e| config_err("load.arc", e))?,
    };
    let vector = |key: &str| -> Result<[f64; 2], CliError> {
        match t.list(key)? {
            Some(v) if v.len() == 2 => Ok([v[0], v[1]]),
            Some(_) => Err(config_err(key, "expected two numbers")),
            None => Err(config_err(key, format!("required for load.type = {kind}"))),
        }
    };
    let profile = match kind {
        "normal" => Profile::Normal(t.f64_or("load.p", 1.0)?),
        "vector" => Profile::Vector(vector("load.vector")?),
        "stress" => match t.list("load.stress")? {
            Some(v) if v.len() == 3 => Profile::Stress([[v[0], v[2]], [v[2], v[1]]]),
            Some(_) => return Err(config_err("load.stress", "expected `N11 N22 N12`")),
            None => return Err(config_err("load.stress", "required for load.type = stress")),
        },
        "radial_cos" => {
            let k = t.usize_or("load.k", 2)?;
            Profile::RadialCos {
                amp: t.f64_or("load.amp", 1.0)?,
                k: u32::try_from(k).map_err(|_| config_err("load.k", "too large"))?,
            }
        }
        _ => {
            let f = vector("load.vector")?;
            return Ok(TractionSpec::new(vec![TractionSegment::point(interval.start, f, total)]));
        }
    };
    Ok(TractionSpec::new(vec![TractionSegment::new(interval, profile)]))
}

fn parse_mesh(t: &Table, d: &DomainSpec) -> Result<MeshSection, CliError> {
    let h = t.f64_req("mesh.h")?;
    require("mesh.h", h > 0.0, format!("must be positive, got {h}"))?;
    let relaxed = t.bool_or("mesh.relaxed", false)?;
    require(
        "mesh.h",
        relaxed || h <= d.r0 / 4.0,
        format!("{h} exceeds r0/4 = {}; set mesh.relaxed = true to override", d.r0 / 4.0),
    )?;
    let factor = t.f64_or("mesh.cavity_factor", 1.0)?;
    require("mesh.cavity_factor", factor > 0.0, format!("must be positive, got {factor}"))?;
    let angle = t.f64_or("mesh.min_angle", 25.0)?;
    require("mesh.min_angle", angle > 0.0 && angle <= 33.0, format!("{angle} is outside (0, 33]"))?;
    let mut options = MeshOptions::new(h).cavity_factor(factor).relaxed(relaxed);
    options.min_angle_deg = angle;
    Ok(MeshSection {
        options,
        file: t.path("mesh.file")?,
    })
}

fn parse_solver(t: &Table) -> Result<SolverOptions, CliError> {
    let order = match t.usize_or("solver.order", 1)? {
        1 => ElementOrder::Linear,
        2 => ElementOrder::Quadratic,
        p => return Err(config_err("solver.order", format!("{p} is not 1 or 2"))),
    };
    let method = match t.choice("solver.method", &["direct", "iterative"], "direct")? {
        "direct" => SolveMethod::Direct,
        _ => SolveMethod::Iterative,
    };
    let tol = t.f64_or("solver.tol", 1e-10)?;
    require("solver.tol", tol > 0.0 && tol < 1.0, format!("{tol} is outside (0, 1)"))?;
    let max_iter = t.usize_or("solver.max_iter", 20_000)?;
    require("solver.max_iter", max_iter > 0, "must be positive")?;
    let eq = t.f64_or("solver.equilibrium_tol", 1e-8)?;
    require("solver.equilibrium_tol", eq > 0.0, format!("must be positive, got {eq}"))?;
    Ok(SolverOptions {
        order,
        method,
        tol,
        max_iter,
        project_load: t.bool_or("solver.project_load", true)?,
        equilibrium_tol: eq,
    })
}

fn parse_airy(t: &Table, d: &DomainSpec) -> Result<AirySection, CliError> {
    let patch = match t.choice("airy.patch", &["disk", "rect"], "rect")? {
        "disk" => PatchChoice::Disk {
            center: t.point("airy.center")?,
        },
        _ => {
            let cavity = t.usize_or("airy.cavity", 0)?;
            require(
                "airy.cavity",
                cavity < d.cavities.len().max(1),
                format!("no cavity {cavity}; the domain has {}", d.cavities.len()),
            )?;
            PatchChoice::Rect {
                cavity,
                theta: t.f64_or("airy.theta", 0.0)?,
            }
        }
    };
    let radius = t.f64_or("airy.patch_radius", 0.4)?;
    require("airy.patch_radius", radius > 0.0, format!("must be positive, got {radius}"))?;
    let degree = t.usize_or("airy.degree", 8)?;
    require("airy.degree", (2..=16).contains(&degree), format!("{degree} is outside 2..=16"))?;
    let slack = t.f64_or("airy.slack", 0.05)?;
    require("airy.slack", slack >= 0.0, format!("must be non-negative, got {slack}"))?;
    let samples = t.usize_or("airy.samples", 64)?;
    require("airy.samples", samples >= 2, "must be at least 2")?;
    Ok(AirySection {
        patch,
        radius,
        degree: degree as u32,
        slack,
        samples,
    })
}

fn positive_list(t: &Table, key: &str) -> Result<Option<Vec<f64>>, CliError> {
    let v = t.list(key)?;
    if let Some(v) = &v {
        require(key, !v.is_empty(), "list is empty")?;
        require(key, v.iter().all(|x| *x > 0.0), "all values must be positive")?;
    }
    Ok(v)
}

fn parse_inverse(t: &Table, d: &DomainSpec) -> Result<InverseSection, CliError> {
    let cavity = t.usize_or("inverse.cavity", 0)?;
    require(
        "inverse.cavity",
        cavity < d.cavities.len().max(1),
        format!("no cavity {cavity}; the domain has {}", d.cavities.len()),
    )?;
    let direction = match t.raw("inverse.direction") {
        None | Some("radial") => None,
        Some(_) => {
            let v = t.list("inverse.direction")?.unwrap_or_default();
            require("inverse.direction", v.len() % 2 == 1, "expected `dρ0 da1 db1 ...` of odd length")?;
            Some(v)
        }
    };
    let t_values = match t.list("inverse.t_values")? {
        Some(v) => v,
        None => {
            let start = t.f64_or("inverse.t_start", 1.5e-3)?;
            let ratio = t.f64_or("inverse.t_ratio", 1.6)?;
            let count = t.usize_or("inverse.t_count", 10)?;
            require("inverse.t_start", start > 0.0, format!("must be positive, got {start}"))?;
            require("inverse.t_ratio", ratio > 1.0, format!("must exceed 1, got {ratio}"))?;
            require("inverse.t_count", count >= 1, "must be at least 1")?;
            (0..count).map(|k| start * ratio.powi(k as i32)).collect()
        }
    };
    let mut t_values: Vec<f64> = std::iter::once(0.0).chain(t_values.into_iter().filter(|v| *v != 0.0)).collect();
    t_values.dedup();
    let sigma_samples = t.usize_or("inverse.sigma_samples", 512)?;
    require("inverse.sigma_samples", sigma_samples >= 16, "must be at least 16")?;
    let distance_samples = t.usize_or("inverse.distance_samples", 1024)?;
    require("inverse.distance_samples", distance_samples >= 64, "must be at least 64")?;
    let d0_factor = t.f64_or("inverse.d0_factor", 0.1)?;
    require("inverse.d0_factor", d0_factor > 0.0, format!("must be positive, got {d0_factor}"))?;
    let rate_mode = match t.choice("inverse.rate_mode", &["boundary", "interior"], "boundary")? {
        "boundary" => VanishingMode::Boundary,
        _ => VanishingMode::Interior,
    };
    let rate_rmax = t.f64_or("inverse.rate_rmax", 0.8)?;
    require("inverse.rate_rmax", rate_rmax > 0.0, format!("must be positive, got {rate_rmax}"))?;
    let rate_levels = t.usize_or("inverse.rate_levels", 4)?;
    require("inverse.rate_levels", rate_levels >= 4, "at least 4 radii are needed to span three dyadic levels")?;
    let profile_rho = positive_list(t, "inverse.profile_rho")?.unwrap_or_else(|| vec![0.3, 0.15, 0.075]);
    let profile_s = t.f64_or("inverse.profile_s", 1.5)?;
    require("inverse.profile_s", profile_s >= 1.0, format!("must be at least 1, got {profile_s}"))?;
    let target = t.raw("inverse.target").map(|v| t.star("inverse.target", v)).transpose()?;
    let init = t.raw("inverse.init").map(|v| t.star("inverse.init", v)).transpose()?;
    let modes = t.usize_or("inverse.modes", 2)?;
    require("inverse.modes", modes <= 8, format!("{modes} exceeds 8"))?;
    let noise = t.f64_or("inverse.noise", 0.0)?;
    require("inverse.noise", noise >= 0.0, format!("must be non-negative, got {noise}"))?;
    let reg_weights = t.list("inverse.reg_weights")?.unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4, 0.0]);
    require(
        "inverse.reg_weights",
        !reg_weights.is_empty() && reg_weights.iter().all(|w| *w >= 0.0),
        "weights must be non-negative and not empty",
    )?;
    let tau = t.f64_or("inverse.tau", 1.1)?;
    require("inverse.tau", tau >= 1.0, format!("must be at least 1, got {tau}"))?;
    let max_iter = t.usize_or("inverse.max_iter", 50)?;
    let fd_step = t.f64_or("inverse.fd_step", 1e-4)?;
    require("inverse.fd_step", fd_step > 0.0, format!("must be positive, got {fd_step}"))?;
    let step_tol = t.f64_or("inverse.step_tol", 1e-5)?;
    require("inverse.step_tol", step_tol > 0.0, format!("must be positive, got {step_tol}"))?;
    Ok(InverseSection {
        cavity,
        direction,
        dcenter: t.point("inverse.dcenter")?.unwrap_or(Point2::ORIGIN),
        t_values,
        sigma_samples,
        distance_samples,
        d0_factor,
        rate_mode,
        rate_center: t.point("inverse.rate_center")?,
        rate_rmax,
        rate_levels,
        profile_rho,
        profile_s,
        target,
        init,
        modes,
        fit_center: t.bool_or("inverse.fit_center", false)?,
        noise,
        reg_weights,
        tau,
        max_iter,
        fd_step,
        step_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "
domain.outer = star 0 0 2 0
domain.cavity = star 0 0 1 0   # inner circle
domain.r0 = 0.5
domain.m0 = 0.5
domain.m1 = 10
mesh.h = 0.1
";

    fn parse(extra: &str) -> Result<RunConfig, CliError> {
        RunConfig::parse(&format!("{BASE}{extra}"), PathBuf::new())
    }

    fn message(r: Result<RunConfig, CliError>) -> String {
        match r {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_fill_optional_sections() {
        let c = parse("").unwrap();
        assert_eq!(c.run.seed, 0);
        assert_eq!(c.domain.cavities.len(), 1);
        assert_eq!(c.solver.order, ElementOrder::Linear);
        assert_eq!(c.inverse.t_values.len(), 11);
        assert_eq!(c.inverse.t_values[0], 0.0);
        assert_eq!(c.airy.patch, PatchChoice::Rect { cavity: 0, theta: 0.0 });
    }

    #[test]
    fn invalid_values_name_their_key() {
        assert!(message(parse("material.nu = 0.6")).contains("material.nu"));
        assert!(message(parse("material.nu = 0.6")).contains("(-1, 0.5)"));
        assert!(message(parse("solver.order = 3")).contains("solver.order"));
        assert!(message(parse("inverse.profile_s = 0.5")).contains("inverse.profile_s"));
        assert!(message(parse("airy.degree = 40")).contains("airy.degree"));
        assert!(message(parse("mesh.file = missing.gpsmesh")).contains("mesh.file"));
        assert!(message(parse("load.type = stress")).contains("load.stress"));
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        assert!(message(parse("mesh.size = 0.1")).contains("unknown key `mesh.size`"));
        assert!(message(parse("mesh.h = 0.2")).contains("already set"));
        assert!(message(parse("just text")).contains("expected `section.key = value`"));
        assert!(parse("domain.cavity = star 1 1 0.2 0").is_ok());
    }

    #[test]
    fn coarse_meshes_need_the_relaxed_flag() {
        let text = BASE.replace("mesh.h = 0.1", "mesh.h = 0.3");
        assert!(message(RunConfig::parse(&text, PathBuf::new())).contains("mesh.h"));
        assert!(RunConfig::parse(&format!("{text}mesh.relaxed = true\n"), PathBuf::new()).is_ok());
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let c = parse(
            "run.threads = 2\nsolver.method = iterative\nload.type = radial_cos\nload.k = 3\ninverse.direction = 0 0.1 0\n\
             inverse.t_values = 0.01, 0.02\nairy.patch = disk\nairy.center = 1.5 0\n",
        )
        .unwrap();
        assert_eq!(c.inverse.t_values, vec![0.0, 0.01, 0.02]);
        assert_eq!(c.inverse.direction, Some(vec![0.0, 0.1, 0.0]));
    }
}
