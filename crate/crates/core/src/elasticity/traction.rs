//! Boundary tractions on `∂Ω`: specification, load vectors, equilibrium
//! against rigid motions and spectral boundary Sobolev norms.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::space::FeSpace;
use crate::error::{Error, Result};
use crate::geometry::{ArcInterval, DomainSpec, Point2};
use crate::mesh::{gauss_legendre, BoundaryTag};
use crate::tensor::{self, Mat2};

/// Traction density along an arclength interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `p·n`.
    Normal(f64),
    /// Constant vector.
    Vector([f64; 2]),
    /// `amp·cos(kθ)·n`, `θ` the polar angle about the outer center.
    RadialCos { amp: f64, k: u32 },
    /// `S·n` for a constant symmetric stress `S`.
    Stress(Mat2),
    /// Concentrated force at the interval start.
    Point([f64; 2]),
}

impl Profile {
    fn density(&self, p: Point2, n: Point2, center: Point2) -> [f64; 2] {
        match self {
            Profile::Normal(q) => [q * n.x1, q * n.x2],
            Profile::Vector(v) => *v,
            Profile::RadialCos { amp, k } => {
                let theta = (p.x2 - center.x2).atan2(p.x1 - center.x1);
                let s = amp * (*k as f64 * theta).cos();
                [s * n.x1, s * n.x2]
            }
            Profile::Stress(m) => [m[0][0] * n.x1 + m[0][1] * n.x2, m[1][0] * n.x1 + m[1][1] * n.x2],
            Profile::Point(_) => [0.0, 0.0],
        }
    }

    fn scaled(&self, a: f64) -> Self {
        match self {
            Profile::Normal(q) => Profile::Normal(a * q),
            Profile::Vector(v) => Profile::Vector([a * v[0], a * v[1]]),
            Profile::RadialCos { amp, k } => Profile::RadialCos { amp: a * amp, k: *k },
            Profile::Stress(m) => Profile::Stress(tensor::scale(m, a)),
            Profile::Point(f) => Profile::Point([a * f[0], a * f[1]]),
        }
    }
}

/// One loaded interval of the outer boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct TractionSegment {
    pub interval: ArcInterval,
    pub profile: Profile,
}

impl TractionSegment {
    pub fn new(interval: ArcInterval, profile: Profile) -> Self {
        Self { interval, profile }
    }

    /// Concentrated force `f` at arclength `s`.
    pub fn point(s: f64, f: [f64; 2], total: f64) -> Self {
        Self {
            interval: ArcInterval {
                start: s.rem_euclid(total),
                length: 0.0,
                total,
            },
            profile: Profile::Point(f),
        }
    }

    fn is_point(&self) -> bool {
        matches!(self.profile, Profile::Point(_))
    }
}

/// Traction `N̂` on `∂Ω`, a sum of segment profiles.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TractionSpec {
    pub segments: Vec<TractionSegment>,
}

impl fmt::Display for TractionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[{}, {}] {:?}", s.interval.start, s.interval.end(), s.profile)?;
        }
        Ok(())
    }
}

/// Discrete rigid-motion residuals of a load.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumReport {
    /// `(∫N̂·e1, ∫N̂·e2)`.
    pub force: [f64; 2],
    /// `∫N̂·(−x2, x1)`.
    pub moment: f64,
    /// `Σ|f_i|` over the load vector, the scale residuals compare with.
    pub load_scale: f64,
    /// L²(Σ) norm of the rigid traction removed by the projection, if any.
    pub correction: Option<f64>,
}

impl EquilibriumReport {
    pub fn max_residual(&self) -> f64 {
        self.force[0].abs().max(self.force[1].abs()).max(self.moment.abs())
    }

    pub fn is_balanced(&self, rel_tol: f64) -> bool {
        self.max_residual() <= rel_tol * self.load_scale.max(f64::MIN_POSITIVE)
    }
}

/// Weighting of the spectral boundary norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SobolevOrder {
    MinusHalf,
    MinusOne,
}

impl SobolevOrder {
    fn exponent(self) -> f64 {
        match self {
            SobolevOrder::MinusHalf => -0.5,
            SobolevOrder::MinusOne => -1.0,
        }
    }
}

const EDGE_GAUSS: usize = 6;
const SPECTRAL_SAMPLES: usize = 1024;

impl TractionSpec {
    pub fn new(segments: Vec<TractionSegment>) -> Self {
        Self { segments }
    }

    /// Uniform normal traction `p` on the whole outer boundary.
    pub fn uniform_normal(domain: &DomainSpec, p: f64) -> Self {
        Self::new(vec![TractionSegment::new(
            ArcInterval::full(domain.outer_length()),
            Profile::Normal(p),
        )])
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| match &s.profile {
            Profile::Normal(q) => *q == 0.0,
            Profile::Vector(v) | Profile::Point(v) => v[0] == 0.0 && v[1] == 0.0,
            Profile::RadialCos { amp, .. } => *amp == 0.0,
            Profile::Stress(m) => tensor::max_abs(m) == 0.0,
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::new(
            self.segments
                .iter()
                .map(|s| TractionSegment::new(s.interval, s.profile.scaled(a)))
                .collect(),
        )
    }

    /// Checks that every segment is compactly contained in Σ.
    pub fn check_support(&self, domain: &DomainSpec) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if (s.interval.total - domain.outer_length()).abs() > 1e-9 * domain.outer_length() {
                return Err(Error::Load(format!(
                    "segment {i} was built for a boundary of length {}, not {}",
                    s.interval.total,
                    domain.outer_length()
                )));
            }
            if !domain.sigma.contains_compactly(s.interval.start, s.interval.length) {
                return Err(Error::Load(format!(
                    "segment {i} [{}, {}] is not compactly contained in Sigma [{}, {}]",
                    s.interval.start,
                    s.interval.end(),
                    domain.sigma.start,
                    domain.sigma.end()
                )));
            }
        }
        Ok(())
    }

    /// Density at a boundary point `p` with arclength `s` and normal `n`.
    pub fn density(&self, domain: &DomainSpec, p: Point2, s: f64, n: Point2) -> [f64; 2] {
        let c = domain.outer.center();
        let mut out = [0.0; 2];
        for seg in &self.segments {
            if !seg.is_point() && seg.interval.contains(s) {
                let v = seg.profile.density(p, n, c);
                out[0] += v[0];
                out[1] += v[1];
            }
        }
        out
    }

    /// Load vector `∫_{∂Ω} N̂·φ_i` (interleaved components) on the polygonal
    /// outer boundary of the mesh.
    pub fn assemble(&self, space: &FeSpace, domain: &DomainSpec) -> Result<Vec<f64>> {
        self.check_support(domain)?;
        self.assemble_with(space, domain, |p, s, n| self.density(domain, p, s, n), true)
    }

    fn assemble_with(
        &self,
        space: &FeSpace,
        domain: &DomainSpec,
        density: impl Fn(Point2, f64, Point2) -> [f64; 2],
        with_points: bool,
    ) -> Result<Vec<f64>> {
        let mesh = space.mesh();
        let mut f = vec![0.0; 2 * space.num_dofs()];
        let (gx, gw) = gauss_legendre(EDGE_GAUSS);
        let owners = mesh.boundary_edge_owners();
        for (e, &(t, le)) in mesh.boundary_edges.iter().zip(&owners) {
            if !e.tag.is_outer() {
                continue;
            }
            let (a, b) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
            let len = a.dist(b);
            let frame = mesh.boundary_frame_between(e.nodes[0], e.nodes[1])?;
            let (dofs, _) = space.element_dofs(t);
            for (x, w) in gx.iter().zip(&gw) {
                let p = a + (b - a) * *x;
                let s = domain.outer_arclength(p);
                let v = density(p, s, frame.n);
                if v == [0.0, 0.0] {
                    continue;
                }
                let (slots, vals, m) = space.edge_trace(le, *x);
                for k in 0..m {
                    let d = dofs[slots[k]];
                    f[2 * d] += w * len * vals[k] * v[0];
                    f[2 * d + 1] += w * len * vals[k] * v[1];
                }
            }
        }
        if with_points {
            for seg in self.segments.iter().filter(|s| s.is_point()) {
                let Profile::Point(force) = seg.profile else { unreachable!() };
                self.add_point_load(space, domain, &owners, seg.interval.start, force, &mut f)?;
            }
        }
        Ok(f)
    }

    fn add_point_load(
        &self,
        space: &FeSpace,
        domain: &DomainSpec,
        owners: &[(usize, usize)],
        s: f64,
        force: [f64; 2],
        f: &mut [f64],
    ) -> Result<()> {
        let mesh = space.mesh();
        let total = domain.outer_length();
        for (e, &(t, le)) in mesh.boundary_edges.iter().zip(owners) {
            if !e.tag.is_outer() {
                continue;
            }
            let sa = domain.outer_arclength(mesh.nodes[e.nodes[0]]);
            let span = (domain.outer_arclength(mesh.nodes[e.nodes[1]]) - sa).rem_euclid(total);
            let off = (s - sa).rem_euclid(total);
            if off <= span {
                let x = if span > 0.0 { off / span } else { 0.0 };
                let (dofs, _) = space.element_dofs(t);
                let (slots, vals, m) = space.edge_trace(le, x);
                for k in 0..m {
                    let d = dofs[slots[k]];
                    f[2 * d] += vals[k] * force[0];
                    f[2 * d + 1] += vals[k] * force[1];
                }
                return Ok(());
            }
        }
        Err(Error::Load(format!("point load at arclength {s} lies on no boundary edge")))
    }

    /// Rigid-motion residuals of the discrete load.
    pub fn equilibrium(&self, space: &FeSpace, domain: &DomainSpec) -> Result<EquilibriumReport> {
        let f = self.assemble(space, domain)?;
        Ok(equilibrium_of(space, &f, None))
    }
}

/// Rigid-motion residuals of a load vector.
pub fn equilibrium_of(space: &FeSpace, f: &[f64], correction: Option<f64>) -> EquilibriumReport {
    let pts = space.dof_points();
    let mut force = [0.0; 2];
    let mut moment = 0.0;
    for (i, p) in pts.iter().enumerate() {
        force[0] += f[2 * i];
        force[1] += f[2 * i + 1];
        moment += -p.x2 * f[2 * i] + p.x1 * f[2 * i + 1];
    }
    EquilibriumReport {
        force,
        moment,
        load_scale: f.iter().map(|v| v.abs()).sum(),
        correction,
    }
}

/// `(∫N̂·r_k)` residuals, optionally after projecting the load onto the
/// equilibrated subspace by subtracting a rigid traction supported on Σ.
pub fn check_load_equilibrium(
    t: &TractionSpec,
    space: &FeSpace,
    domain: &DomainSpec,
    project: bool,
) -> Result<(Vec<f64>, EquilibriumReport)> {
    let mesh = space.mesh();
    if !mesh.boundary_edges.iter().any(|e| e.tag == BoundaryTag::Sigma) {
        return Err(Error::Load("mesh has no Sigma edges".into()));
    }
    let mut f = t.assemble(space, domain)?;
    if !project {
        let rep = equilibrium_of(space, &f, None);
        return Ok((f, rep));
    }
    let rigid = |k: usize, p: Point2| match k {
        0 => [1.0, 0.0],
        1 => [0.0, 1.0],
        _ => [-p.x2, p.x1],
    };
    let on_sigma = |s: f64| domain.sigma.contains(s);
    let mut g = Vec::with_capacity(3);
    for k in 0..3 {
        g.push(t.assemble_with(
            space,
            domain,
            |p, s, _| if on_sigma(s) { rigid(k, p) } else { [0.0, 0.0] },
            false,
        )?);
    }
    let pts = space.dof_points();
    let moment_of = |v: &[f64], k: usize| -> f64 {
        pts.iter()
            .enumerate()
            .map(|(i, p)| {
                let r = rigid(k, *p);
                r[0] * v[2 * i] + r[1] * v[2 * i + 1]
            })
            .sum()
    };
    let a = Matrix3::from_fn(|r, c| moment_of(&g[c], r));
    let rhs = Vector3::from_fn(|r, _| moment_of(&f, r));
    let c = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Load("Sigma too short to carry a rigid correction".into()))?;
    for k in 0..3 {
        for (fi, gi) in f.iter_mut().zip(&g[k]) {
            *fi -= c[k] * gi;
        }
    }
    // ∫_Σ |Σ c_k r_k|² = cᵀ A c, since A_{rk} = ∫_Σ r_r·r_k.
    let correction = (c.dot(&(a * c))).max(0.0).sqrt();
    let rep = equilibrium_of(space, &f, Some(correction));
    Ok((f, rep))
}

/// Fourier coefficients `(c1_k, c2_k)` of the traction over the exact outer
/// curve, `k` from `−N/2` to `N/2 − 1` in FFT order.
fn fourier(t: &TractionSpec, domain: &DomainSpec) -> (Vec<[Complex<f64>; 2]>, f64) {
    let table = domain.outer_table();
    let total = table.length();
    let n = SPECTRAL_SAMPLES;
    let mut comps = [vec![Complex::new(0.0, 0.0); n], vec![Complex::new(0.0, 0.0); n]];
    for j in 0..n {
        let s = total * j as f64 / n as f64;
        let theta = table.angle(s);
        let p = domain.outer.eval(theta);
        let v = t.density(domain, p, s, domain.outer.outward_normal(theta));
        comps[0][j] = Complex::new(v[0], 0.0);
        comps[1][j] = Complex::new(v[1], 0.0);
    }
    let fft = FftPlanner::new().plan_fft_forward(n);
    for c in &mut comps {
        fft.process(c);
        for v in c.iter_mut() {
            *v /= n as f64;
        }
    }
    let mut out: Vec<[Complex<f64>; 2]> = (0..n).map(|k| [comps[0][k], comps[1][k]]).collect();
    for seg in t.segments.iter().filter(|s| s.is_point()) {
        let Profile::Point(force) = seg.profile else { unreachable!() };
        for (k, o) in out.iter_mut().enumerate() {
            let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            let ph = Complex::from_polar(1.0 / total, -TAU * kk * seg.interval.start / total);
            o[0] += ph * force[0];
            o[1] += ph * force[1];
        }
    }
    (out, total)
}

/// `(L Σ_k (1+k²)^order |ĉ_k|²)^{1/2}` over the arclength Fourier modes of
/// both traction components (`k` the integer mode index, `L` the length of
/// `∂Ω`).
pub fn boundary_sobolev_norm(t: &TractionSpec, domain: &DomainSpec, order: SobolevOrder) -> f64 {
    let (c, total) = fourier(t, domain);
    spectral_norm(&c, total, order)
}

fn spectral_norm(c: &[[Complex<f64>; 2]], total: f64, order: SobolevOrder) -> f64 {
    let n = c.len();
    let e = order.exponent();
    let s: f64 = c
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            (1.0 + kk * kk).powf(e) * (v[0].norm_sqr() + v[1].norm_sqr())
        })
        .sum();
    (total * s).sqrt()
}

/// `F = ‖N̂‖_{H^{−1/2}} / ‖N̂‖_{H^{−1}}`.
pub fn frequency_ratio(t: &TractionSpec, domain: &DomainSpec) -> Result<f64> {
    let (c, total) = fourier(t, domain);
    let lo = spectral_norm(&c, total, SobolevOrder::MinusOne);
    if lo == 0.0 {
        return Err(Error::Load("zero traction: frequency ratio undefined".into()));
    }
    Ok(spectral_norm(&c, total, SobolevOrder::MinusHalf) / lo)
}
