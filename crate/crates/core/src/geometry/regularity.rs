//! Sampled verification of the `C^{k,α}` boundary class with constants
//! `r0`, `M0`: around each base point the curve must be the graph
//! `x2 = g(x1)` of a function on `[-r0, r0]` (in the local tangent frame)
//! whose normalized norm
//! `Σ_{i≤k} r0^i sup|g^(i)| + r0^{k+α} |g^(k)|_α` stays below `M0·r0`.
//!
//! Derivatives of `g` are exact: they come from truncated Taylor series of the
//! parametrization pushed through `g^(i+1) = (d/dθ g^(i)) / (du/dθ)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use super::{Point2, StarShape};

const ORDER: usize = 9;
const T_POINTS: usize = 65;
const BASE_POINTS: usize = 64;
const INTRUSION_SAMPLES: usize = 1024;

type Jet = [f64; ORDER];

fn mul(a: &Jet, b: &Jet) -> Jet {
    let mut c = [0.0; ORDER];
    for k in 0..ORDER {
        c[k] = (0..=k).map(|i| a[i] * b[k - i]).sum();
    }
    c
}

fn div(a: &Jet, b: &Jet) -> Jet {
    let mut c = [0.0; ORDER];
    for k in 0..ORDER {
        let s: f64 = (1..=k).map(|i| b[i] * c[k - i]).sum();
        c[k] = (a[k] - s) / b[0];
    }
    c
}

fn deriv(a: &Jet) -> Jet {
    let mut c = [0.0; ORDER];
    for k in 0..ORDER - 1 {
        c[k] = (k + 1) as f64 * a[k + 1];
    }
    c
}

/// Taylor coefficients of the local coordinates `(u, v)` of the curve around
/// `theta`, in the frame `(tau0, n0)` anchored at `origin`.
fn local_jets(shape: &StarShape, theta: f64, origin: Point2, tau0: Point2, n0: Point2) -> (Jet, Jet) {
    let mut rho = [0.0; ORDER];
    let mut cos = [0.0; ORDER];
    let mut sin = [0.0; ORDER];
    let mut fact = 1.0;
    for m in 0..ORDER {
        if m > 0 {
            fact *= m as f64;
        }
        rho[m] = shape.radius_derivative(theta, m as u32) / fact;
        let phase = theta + m as f64 * FRAC_PI_2;
        cos[m] = phase.cos() / fact;
        sin[m] = phase.sin() / fact;
    }
    let mut x = mul(&rho, &cos);
    let mut y = mul(&rho, &sin);
    x[0] += shape.center().x1 - origin.x1;
    y[0] += shape.center().x2 - origin.x2;
    let mut u = [0.0; ORDER];
    let mut v = [0.0; ORDER];
    for m in 0..ORDER {
        u[m] = x[m] * tau0.x1 + y[m] * tau0.x2;
        v[m] = x[m] * n0.x1 + y[m] * n0.x2;
    }
    (u, v)
}

/// Values `g^(i)(t)` for `i = 0..=k` at the curve point with angle `theta`.
fn graph_derivatives(shape: &StarShape, theta: f64, frame: (Point2, Point2, Point2), k: usize) -> Vec<f64> {
    let (u, v) = local_jets(shape, theta, frame.0, frame.1, frame.2);
    let du = deriv(&u);
    let mut h = v;
    let mut out = Vec::with_capacity(k + 1);
    out.push(h[0]);
    for _ in 0..k {
        h = div(&deriv(&h), &du);
        out.push(h[0]);
    }
    out
}

/// Outcome of a sampled regularity check.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    /// Largest sampled `‖g‖_{C^{k,α}} / (M0·r0)`; the class holds when ≤ 1.
    pub max_ratio: f64,
    /// Base angle attaining `max_ratio`.
    pub worst_theta: f64,
    /// Every sampled neighbourhood was a single graph over `[-r0, r0]`.
    pub graph_ok: bool,
    pub samples: usize,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.graph_ok && self.max_ratio <= 1.0
    }
}

/// Checks the `C^{k,α}` class with constants `r0`, `M0` at base angles
/// `thetas` (all of the curve when `None`).
pub fn graph_regularity(
    shape: &StarShape,
    k: usize,
    alpha: f64,
    r0: f64,
    m0: f64,
    thetas: Option<&[f64]>,
) -> RegularityReport {
    assert!(k <= ORDER - 2, "regularity order {k} not supported");
    let default: Vec<f64>;
    let bases = match thetas {
        Some(t) => t,
        None => {
            default = (0..BASE_POINTS)
                .map(|i| TAU * i as f64 / BASE_POINTS as f64)
                .collect();
            &default
        }
    };
    let mut report = RegularityReport {
        max_ratio: 0.0,
        worst_theta: 0.0,
        graph_ok: true,
        samples: 0,
    };
    for &theta0 in bases {
        match local_norm(shape, theta0, k, alpha, r0, m0) {
            Some(norm) => {
                let ratio = norm / (m0 * r0);
                if ratio > report.max_ratio {
                    report.max_ratio = ratio;
                    report.worst_theta = theta0;
                }
            }
            None => {
                report.graph_ok = false;
                report.worst_theta = theta0;
                report.max_ratio = f64::INFINITY;
            }
        }
        report.samples += T_POINTS;
    }
    report
}

/// Normalized `C^{k,α}` norm of the local graph at `theta0`, or `None` when the
/// curve is not a graph over `[-r0, r0]` inside `R_{r0, 2 M0 r0}`.
fn local_norm(shape: &StarShape, theta0: f64, k: usize, alpha: f64, r0: f64, m0: f64) -> Option<f64> {
    let origin = shape.eval(theta0);
    let tau0 = shape.velocity(theta0).normalized();
    let n0 = tau0.perp();
    let frame = (origin, tau0, n0);
    let u_of = |t: f64| (shape.eval(t) - origin).dot(tau0);
    let du_of = |t: f64| shape.velocity(t).dot(tau0);

    // Angles of the grid abscissae, continued outward from the base point.
    let mut thetas = vec![0.0; T_POINTS];
    let mid = T_POINTS / 2;
    thetas[mid] = theta0;
    for dir in [1i64, -1] {
        let mut theta = theta0;
        let mut j = mid as i64;
        loop {
            j += dir;
            if j < 0 || j >= T_POINTS as i64 {
                break;
            }
            let target = -r0 + 2.0 * r0 * j as f64 / (T_POINTS - 1) as f64;
            let mut t = theta + (target - u_of(theta)) / du_of(theta).max(1e-300);
            let mut converged = false;
            for _ in 0..50 {
                let d = du_of(t);
                if d <= 0.0 {
                    return None;
                }
                let step = (u_of(t) - target) / d;
                t -= step;
                if step.abs() < 1e-14 {
                    converged = true;
                    break;
                }
            }
            if !converged || (t - theta) * dir as f64 <= 0.0 || (t - theta0).abs() >= std::f64::consts::PI {
                return None;
            }
            theta = t;
            thetas[j as usize] = t;
        }
    }
    let (lo, hi) = (thetas[0], thetas[T_POINTS - 1]);
    // u must be monotone between consecutive abscissae.
    let monotone = thetas.windows(2).all(|w| {
        (0..8).all(|q| du_of(w[0] + (w[1] - w[0]) * q as f64 / 8.0) > 0.0)
    });
    if !monotone {
        return None;
    }
    // No other part of the curve may enter the rectangle.
    let half_height = 2.0 * m0 * r0;
    for i in 0..INTRUSION_SAMPLES {
        let t = theta0 + TAU * i as f64 / INTRUSION_SAMPLES as f64 - std::f64::consts::PI;
        if t >= lo && t <= hi {
            continue;
        }
        let p = shape.eval(t) - origin;
        if p.dot(tau0).abs() < r0 && p.dot(n0).abs() < half_height {
            return None;
        }
    }

    let derivs: Vec<Vec<f64>> = thetas
        .iter()
        .map(|&t| graph_derivatives(shape, t, frame, k))
        .collect();
    if derivs.iter().any(|d| d[0].abs() >= half_height) {
        return None;
    }
    let mut norm = 0.0;
    for i in 0..=k {
        let sup = derivs.iter().map(|d| d[i].abs()).fold(0.0, f64::max);
        norm += r0.powi(i as i32) * sup;
    }
    let h = 2.0 * r0 / (T_POINTS - 1) as f64;
    let mut holder: f64 = 0.0;
    for a in 0..T_POINTS {
        for b in a + 1..T_POINTS {
            let q = (derivs[a][k] - derivs[b][k]).abs() / ((b - a) as f64 * h).powf(alpha);
            holder = holder.max(q);
        }
    }
    norm += r0.powf(k as f64 + alpha) * holder;
    Some(norm)
}
