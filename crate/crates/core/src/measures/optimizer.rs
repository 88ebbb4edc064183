//! Two-stage minimizer over Bloch-sphere measurement directions: a fixed
//! `(θ, φ)` grid followed by Nelder–Mead refinement from the best grid points.

use crate::scalar::{cplx, Cplx, Real};

/// Unit Bloch direction `|m⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> MeasurementDirection<T> {
    pub fn new(theta: T, phi: T) -> Self {
        Self { theta, phi }
    }

    /// Folds any `(θ, φ)` into `θ ∈ [0, π]`, `φ ∈ [0, 2π)` without changing the projector pair.
    pub fn canonical(self) -> Self {
        let two_pi = T::PI() + T::PI();
        let mut theta = self.theta % two_pi;
        if theta < T::zero() {
            theta = theta + two_pi;
        }
        let mut phi = self.phi;
        if theta > T::PI() {
            theta = two_pi - theta;
            phi = phi + T::PI();
        }
        phi = phi % two_pi;
        if phi < T::zero() {
            phi = phi + two_pi;
        }
        Self { theta, phi }
    }

    /// `(|m⟩, |m⊥⟩)` as amplitude pairs.
    pub fn kets(&self) -> [[Cplx<T>; 2]; 2] {
        let half = T::lit(0.5);
        let (s, c) = (self.theta * half).sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let e = cplx(cp, sp);
        [
            [cplx(c, T::zero()), e * s],
            [-(e.conj() * s), cplx(c, T::zero())],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub starts: usize,
    pub diameter_tol: f64,
    pub value_tol: f64,
    pub max_iterations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_theta: 32,
            grid_phi: 64,
            starts: 3,
            diameter_tol: 1e-7,
            value_tol: 1e-9,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub value: T,
    pub direction: MeasurementDirection<T>,
    /// Best value on the coarse grid; `value ≤ grid_value` always.
    pub grid_value: T,
    /// False when any refinement run hit the iteration cap.
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Vertex<T> {
    x: [T; 2],
    f: T,
}

fn vertex_order<T: Real>(a: &Vertex<T>, b: &Vertex<T>) -> std::cmp::Ordering {
    a.f.partial_cmp(&b.f)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(
            a.x[0]
                .partial_cmp(&b.x[0])
                .unwrap_or(std::cmp::Ordering::Equal),
        )
        .then(
            a.x[1]
                .partial_cmp(&b.x[1])
                .unwrap_or(std::cmp::Ordering::Equal),
        )
}

fn diameter<T: Real>(s: &[Vertex<T>; 3]) -> T {
    let d = |a: &Vertex<T>, b: &Vertex<T>| (a.x[0] - b.x[0]).hypot(a.x[1] - b.x[1]);
    d(&s[0], &s[1]).max(d(&s[0], &s[2])).max(d(&s[1], &s[2]))
}

/// Nelder–Mead on two coordinates. Returns the best vertex and whether a
/// convergence test fired before the iteration cap.
fn nelder_mead<T: Real>(
    f: &impl Fn(T, T) -> T,
    start: [T; 2],
    step: [T; 2],
    cfg: &OptimizerConfig,
) -> (Vertex<T>, bool) {
    let eval = |x: [T; 2]| Vertex {
        x,
        f: f(x[0], x[1]),
    };
    let mut s = [
        eval(start),
        eval([start[0] + step[0], start[1]]),
        eval([start[0], start[1] + step[1]]),
    ];
    let (half, two) = (T::lit(0.5), T::lit(2.0));
    let diam_tol = T::tol(cfg.diameter_tol);
    let value_tol = T::tol(cfg.value_tol);
    for _ in 0..cfg.max_iterations {
        s.sort_by(vertex_order);
        // Both tests: a symmetric simplex can have equal values far from the minimum.
        if diameter(&s) < diam_tol && (s[2].f - s[0].f).abs() < value_tol {
            return (s[0], true);
        }
        let centroid = [
            (s[0].x[0] + s[1].x[0]) * half,
            (s[0].x[1] + s[1].x[1]) * half,
        ];
        let along = |t: T| {
            eval([
                centroid[0] + t * (s[2].x[0] - centroid[0]),
                centroid[1] + t * (s[2].x[1] - centroid[1]),
            ])
        };
        let reflected = along(-T::one());
        if reflected.f < s[0].f {
            let expanded = along(-two);
            s[2] = if expanded.f < reflected.f {
                expanded
            } else {
                reflected
            };
        } else if reflected.f < s[1].f {
            s[2] = reflected;
        } else {
            let contracted = if reflected.f < s[2].f {
                along(-half)
            } else {
                along(half)
            };
            if contracted.f < s[2].f.min(reflected.f) {
                s[2] = contracted;
            } else {
                let best = s[0].x;
                for v in s.iter_mut().skip(1) {
                    *v = eval([
                        best[0] + (v.x[0] - best[0]) * half,
                        best[1] + (v.x[1] - best[1]) * half,
                    ]);
                }
            }
        }
    }
    s.sort_by(vertex_order);
    (s[0], false)
}

/// Minimizes `f(θ, φ)` with the grid-then-simplex scheme.
pub fn minimize_direction<T: Real>(f: impl Fn(T, T) -> T, cfg: &OptimizerConfig) -> Minimum<T> {
    let d_theta = T::PI() / T::from_usize(cfg.grid_theta - 1).unwrap();
    let d_phi = (T::PI() + T::PI()) / T::from_usize(cfg.grid_phi).unwrap();
    let mut grid: Vec<Vertex<T>> = Vec::with_capacity(cfg.grid_theta * cfg.grid_phi);
    for i in 0..cfg.grid_theta {
        let theta = d_theta * T::from_usize(i).unwrap();
        for j in 0..cfg.grid_phi {
            let phi = d_phi * T::from_usize(j).unwrap();
            grid.push(Vertex {
                x: [theta, phi],
                f: f(theta, phi),
            });
        }
    }
    grid.sort_by(vertex_order);
    let grid_best = grid[0];
    let mut best = grid_best;
    let mut converged = true;
    for start in grid.iter().take(cfg.starts) {
        let (v, ok) = nelder_mead(&f, start.x, [d_theta, d_phi], cfg);
        converged &= ok;
        if vertex_order(&v, &best).is_lt() {
            best = v;
        }
    }
    Minimum {
        value: best.f,
        direction: MeasurementDirection::new(best.x[0], best.x[1]).canonical(),
        grid_value: grid_best.f,
        converged,
    }
}
