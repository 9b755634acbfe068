use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use super::Point2;
use crate::error::{Error, Result};

/// Largest supported Fourier order of a cavity radius function.
pub const MAX_MODES: usize = 8;

const POSITIVITY_SAMPLES: usize = 4096;

/// Closed curve `θ ↦ center + ρ(θ)(cos θ, sin θ)` with a truncated Fourier
/// radius `ρ(θ) = ρ0 + Σ_k (a_k cos kθ + b_k sin kθ)`.
///
/// The radius is checked to be strictly positive on a dense sample at
/// construction; a `StarShape` value is therefore always a simple closed curve,
/// star-shaped with respect to its center.
#[derive(Clone, Debug, PartialEq)]
pub struct StarShape {
    center: Point2,
    rho0: f64,
    fourier: Vec<(f64, f64)>,
}

impl StarShape {
    pub fn new(center: Point2, rho0: f64, fourier: Vec<(f64, f64)>) -> Result<Self> {
        if !center.is_finite() || !rho0.is_finite() {
            return Err(Error::InvalidShape("non-finite center or radius".into()));
        }
        if fourier.len() > MAX_MODES {
            return Err(Error::InvalidShape(format!(
                "{} Fourier modes requested, at most {MAX_MODES} supported",
                fourier.len()
            )));
        }
        if fourier.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidShape("non-finite Fourier coefficient".into()));
        }
        let shape = Self {
            center,
            rho0,
            fourier,
        };
        let (theta, rho) = (0..POSITIVITY_SAMPLES)
            .map(|i| {
                let t = TAU * i as f64 / POSITIVITY_SAMPLES as f64;
                (t, shape.radius(t))
            })
            .fold((0.0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        if rho <= 0.0 {
            return Err(Error::InvalidShape(format!(
                "radius function is non-positive ({rho:.6e}) at theta = {theta:.6}"
            )));
        }
        Ok(shape)
    }

    pub fn circle(center: Point2, radius: f64) -> Result<Self> {
        Self::new(center, radius, Vec::new())
    }

    /// Builds a shape from the parameter vector `[ρ0, a1, b1, …, aK, bK]`.
    pub fn from_params(center: Point2, params: &[f64]) -> Result<Self> {
        if params.is_empty() || params.len() % 2 == 0 {
            return Err(Error::InvalidShape(format!(
                "parameter vector must have odd length 1 + 2K, got {}",
                params.len()
            )));
        }
        let fourier = params[1..].chunks(2).map(|c| (c[0], c[1])).collect();
        Self::new(center, params[0], fourier)
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn fourier(&self) -> &[(f64, f64)] {
        &self.fourier
    }

    pub fn num_modes(&self) -> usize {
        self.fourier.len()
    }

    /// `[ρ0, a1, b1, …, aK, bK]`.
    pub fn params(&self) -> Vec<f64> {
        std::iter::once(self.rho0)
            .chain(self.fourier.iter().flat_map(|&(a, b)| [a, b]))
            .collect()
    }

    /// Same shape padded with zero coefficients up to `modes` Fourier orders.
    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        let mut fourier = self.fourier.clone();
        if modes < fourier.len() {
            if fourier[modes..].iter().any(|&(a, b)| a != 0.0 || b != 0.0) {
                return Err(Error::InvalidShape(format!(
                    "cannot truncate shape to {modes} modes without changing it"
                )));
            }
            fourier.truncate(modes);
        } else {
            fourier.resize(modes, (0.0, 0.0));
        }
        Self::new(self.center, self.rho0, fourier)
    }

    /// `self + t·(dcenter, dparams)`, with missing coefficients treated as zero.
    pub fn displaced(&self, dcenter: Point2, dparams: &[f64], t: f64) -> Result<Self> {
        let mut params = self.params();
        if dparams.len() > params.len() {
            params.resize(dparams.len(), 0.0);
        }
        for (p, d) in params.iter_mut().zip(dparams) {
            *p += t * d;
        }
        if params.len() % 2 == 0 {
            params.push(0.0);
        }
        Self::from_params(self.center + dcenter * t, &params)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.fourier
            .iter()
            .enumerate()
            .fold(self.rho0, |acc, (i, &(a, b))| {
                let k = (i + 1) as f64;
                let (s, c) = (k * theta).sin_cos();
                acc + a * c + b * s
            })
    }

    /// `m`-th derivative of the radius function.
    pub fn radius_derivative(&self, theta: f64, m: u32) -> f64 {
        let shift = m as f64 * FRAC_PI_2;
        let base = if m == 0 { self.rho0 } else { 0.0 };
        self.fourier
            .iter()
            .enumerate()
            .fold(base, |acc, (i, &(a, b))| {
                let k = (i + 1) as f64;
                let (s, c) = (k * theta + shift).sin_cos();
                acc + k.powi(m as i32) * (a * c + b * s)
            })
    }

    pub fn eval(&self, theta: f64) -> Point2 {
        self.center + Point2::from_polar(self.radius(theta), theta)
    }

    /// Velocity `dγ/dθ` of the counterclockwise parametrization.
    pub fn velocity(&self, theta: f64) -> Point2 {
        let rho = self.radius(theta);
        let drho = self.radius_derivative(theta, 1);
        let (s, c) = theta.sin_cos();
        Point2::new(drho * c - rho * s, drho * s + rho * c)
    }

    pub fn speed(&self, theta: f64) -> f64 {
        self.radius(theta).hypot(self.radius_derivative(theta, 1))
    }

    /// Unit normal pointing out of the enclosed region.
    pub fn outward_normal(&self, theta: f64) -> Point2 {
        let v = self.velocity(theta).normalized();
        Point2::new(v.x2, -v.x1)
    }

    /// Polar angle of `p` about the center, in `[0, 2π)`.
    pub fn polar_angle(&self, p: Point2) -> f64 {
        let d = p - self.center;
        let t = d.x2.atan2(d.x1);
        if t < 0.0 {
            t + TAU
        } else {
            t
        }
    }

    /// `|p − c| − ρ(θ(p))`: negative inside, positive outside.
    pub fn radial_gap(&self, p: Point2) -> f64 {
        (p - self.center).norm() - self.radius(self.polar_angle(p))
    }

    /// Strict interior membership.
    pub fn contains(&self, p: Point2) -> bool {
        self.radial_gap(p) < 0.0
    }

    /// `n` points at equal angular steps, counterclockwise, starting at θ = 0.
    pub fn polyline(&self, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|i| self.eval(TAU * i as f64 / n as f64))
            .collect()
    }

    pub fn area(&self) -> f64 {
        let sq: f64 = self.fourier.iter().map(|(a, b)| a * a + b * b).sum();
        std::f64::consts::PI * (self.rho0 * self.rho0 + 0.5 * sq)
    }

    pub fn min_radius(&self) -> f64 {
        (0..POSITIVITY_SAMPLES)
            .map(|i| self.radius(TAU * i as f64 / POSITIVITY_SAMPLES as f64))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_radius(&self) -> f64 {
        (0..POSITIVITY_SAMPLES)
            .map(|i| self.radius(TAU * i as f64 / POSITIVITY_SAMPLES as f64))
            .fold(0.0, f64::max)
    }

    /// Parses `star cx cy rho0 K a1 b1 ... aK bK`.
    pub fn parse_line(line: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidShape(format!("{msg} in `{line}`"));
        let mut it = line.split_whitespace();
        if it.next() != Some("star") {
            return Err(bad("expected keyword `star`"));
        }
        let nums: Vec<&str> = it.collect();
        if nums.len() < 4 {
            return Err(bad("expected `cx cy rho0 K`"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
        let cx = num(nums[0])?;
        let cy = num(nums[1])?;
        let rho0 = num(nums[2])?;
        let k: usize = nums[3]
            .parse()
            .map_err(|_| bad(&format!("bad mode count `{}`", nums[3])))?;
        if nums.len() != 4 + 2 * k {
            return Err(bad(&format!(
                "expected {} coefficients for K = {k}, found {}",
                2 * k,
                nums.len() - 4
            )));
        }
        let coeffs = nums[4..].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        let fourier = coeffs.chunks(2).map(|c| (c[0], c[1])).collect();
        Self::new(Point2::new(cx, cy), rho0, fourier)
    }
}

impl fmt::Display for StarShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "star {} {} {} {}",
            self.center.x1,
            self.center.x2,
            self.rho0,
            self.fourier.len()
        )?;
        for (a, b) in &self.fourier {
            write!(f, " {a} {b}")?;
        }
        Ok(())
    }
}

/// Point on a star shape at polar angle `theta`.
pub fn eval_star(shape: &StarShape, theta: f64) -> Point2 {
    shape.eval(theta)
}

const ARC_CELLS: usize = 2048;
const GAUSS4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS4_W: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// Arclength coordinate `s(θ)` of a star curve, measured counterclockwise from
/// θ = 0, with its inverse.
#[derive(Clone, Debug)]
pub struct ArclengthTable {
    shape: StarShape,
    cumulative: Vec<f64>,
}

impl ArclengthTable {
    pub fn new(shape: &StarShape) -> Self {
        let h = TAU / ARC_CELLS as f64;
        let mut cumulative = Vec::with_capacity(ARC_CELLS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..ARC_CELLS {
            acc += gauss_speed(shape, i as f64 * h, (i + 1) as f64 * h);
            cumulative.push(acc);
        }
        Self {
            shape: shape.clone(),
            cumulative,
        }
    }

    pub fn shape(&self) -> &StarShape {
        &self.shape
    }

    pub fn length(&self) -> f64 {
        self.cumulative[ARC_CELLS]
    }

    /// Arclength of the curve point at angle `theta` (reduced to `[0, 2π)`).
    pub fn arclength(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        let h = TAU / ARC_CELLS as f64;
        let cell = ((t / h) as usize).min(ARC_CELLS - 1);
        let t0 = cell as f64 * h;
        self.cumulative[cell] + gauss_speed(&self.shape, t0, t)
    }

    /// Angle of the curve point at arclength `s` (reduced modulo the length).
    pub fn angle(&self, s: f64) -> f64 {
        let len = self.length();
        let s = s.rem_euclid(len);
        let cell = match self
            .cumulative
            .binary_search_by(|v| v.partial_cmp(&s).expect("finite arclength"))
        {
            Ok(i) => i.min(ARC_CELLS - 1),
            Err(i) => i.saturating_sub(1).min(ARC_CELLS - 1),
        };
        let h = TAU / ARC_CELLS as f64;
        let (lo, hi) = (cell as f64 * h, (cell + 1) as f64 * h);
        let span = self.cumulative[cell + 1] - self.cumulative[cell];
        let mut t = lo + h * (s - self.cumulative[cell]) / span;
        for _ in 0..8 {
            let f = self.cumulative[cell] + gauss_speed(&self.shape, lo, t) - s;
            t = (t - f / self.shape.speed(t)).clamp(lo, hi);
            if f.abs() < 1e-15 * len {
                break;
            }
        }
        t
    }

    pub fn point_at(&self, s: f64) -> Point2 {
        self.shape.eval(self.angle(s))
    }
}

fn gauss_speed(shape: &StarShape, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GAUSS4_X
        .iter()
        .zip(GAUSS4_W)
        .map(|(x, w)| w * shape.speed(m + r * x))
        .sum::<f64>()
        * r
}
