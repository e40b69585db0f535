//! Independent numerical tools: quadrature, a piecewise-constant transfer
//! matrix and a shooting eigen-solver. None of these use the closed forms of
//! the square models, so they serve as oracles for them.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Composite Simpson rule on `[a, b]` with `n` intervals (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

pub fn simpson_complex(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * (h / 3.0)
}

/// `⟨f_i, f_j⟩ = ∫ conj(f_i) f_j dx` on `[a, b]` by Simpson's rule.
pub fn gram_matrix(
    functions: &[&dyn Fn(f64) -> Complex64],
    a: f64,
    b: f64,
    n: usize,
) -> Vec<Vec<Complex64>> {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let samples: Vec<Vec<Complex64>> = functions
        .iter()
        .map(|f| (0..=n).map(|i| f(a + h * i as f64)).collect())
        .collect();
    let weight = |i: usize| {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    samples
        .iter()
        .map(|fi| {
            samples
                .iter()
                .map(|fj| {
                    let s: Complex64 = (0..=n).map(|i| weight(i) * fi[i].conj() * fj[i]).sum();
                    s * (h / 3.0)
                })
                .collect()
        })
        .collect()
}

/// `(cos qd, sin(qd)/q, −q sin qd)` with the `q → 0` limit handled.
fn propagator(q: Complex64, d: f64) -> (Complex64, Complex64, Complex64) {
    let z = q * d;
    let sinc = if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    };
    (z.cos(), sinc * d, -q * q * sinc * d)
}

/// Transmission probability through a sequence of constant-potential slabs
/// `(x0, x1, V)` (ordered, non-overlapping, V = 0 elsewhere) at energy `E > 0`.
///
/// The transmitted wave `e^{ikx}` is carried from the right edge to the left
/// edge by exact slab propagators for `(u, u')`, then split into incident and
/// reflected parts.
pub fn transfer_matrix_transmission(segments: &[(f64, f64, f64)], energy: f64) -> f64 {
    let k = energy.sqrt();
    let Some(&(_, right, _)) = segments.last() else {
        return 1.0;
    };
    let left = segments[0].0;
    let kc = Complex64::new(k, 0.0);
    let mut u = (I * kc * right).exp();
    let mut du = I * kc * u;
    let mut x = right;
    for &(x0, x1, v) in segments.iter().rev() {
        if x1 < x {
            // free gap between slabs
            let (c, s, m) = propagator(kc, x1 - x);
            (u, du) = (c * u + s * du, m * u + c * du);
        }
        let q = Complex64::new(energy - v, 0.0).sqrt();
        let (c, s, m) = propagator(q, x0 - x1);
        (u, du) = (c * u + s * du, m * u + c * du);
        x = x0;
    }
    let incident = 0.5 * (u + du / (I * kc)) * (-I * kc * left).exp();
    1.0 / incident.norm_sqr()
}

/// Slab decomposition of a potential sampled at segment midpoints, with the
/// grid aligned to the given breakpoints.
pub fn sample_slabs(
    v: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    steps: usize,
    breakpoints: &[f64],
) -> Vec<(f64, f64, f64)> {
    partition(a, b, steps, breakpoints)
        .into_iter()
        .flat_map(|(x0, x1, n)| {
            let h = (x1 - x0) / n as f64;
            let v = &v;
            (0..n).map(move |i| {
                let lo = x0 + h * i as f64;
                let hi = if i + 1 == n { x1 } else { lo + h };
                (lo, hi, v(0.5 * (lo + hi)))
            })
        })
        .collect()
}

/// Split `[a, b]` at interior breakpoints into sub-intervals, distributing
/// about `steps` uniform steps proportionally to length.
fn partition(a: f64, b: f64, steps: usize, breakpoints: &[f64]) -> Vec<(f64, f64, usize)> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let h = (b - a) / steps.max(1) as f64;
    edges
        .windows(2)
        .map(|w| (w[0], w[1], (((w[1] - w[0]) / h).ceil() as usize).max(1)))
        .collect()
}

/// Bound-state levels of `−u'' + V u = E u` on a Dirichlet box, by RK4
/// shooting with node counting.
///
/// The potential is sampled once at every RK4 stage point. Points that fall
/// on a breakpoint take the one-sided value of the segment being integrated,
/// so step discontinuities are resolved exactly.
pub struct ShootingSolver {
    segments: Vec<Segment>,
}

struct Segment {
    h: f64,
    /// `V` at the start, midpoint and end of each step.
    stages: Vec<(f64, f64, f64)>,
}

impl ShootingSolver {
    pub fn new(v: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize, breakpoints: &[f64]) -> Self {
        let segments = partition(a, b, steps, breakpoints)
            .into_iter()
            .map(|(x0, x1, n)| {
                let h = (x1 - x0) / n as f64;
                let nudge = 1e-12 * (x1 - x0).abs().max(1.0);
                let at = |x: f64| v(x.clamp(x0 + nudge, x1 - nudge));
                let stages = (0..n)
                    .map(|i| {
                        let lo = x0 + h * i as f64;
                        (at(lo), at(lo + 0.5 * h), at(lo + h))
                    })
                    .collect();
                Segment { h, stages }
            })
            .collect();
        ShootingSolver { segments }
    }

    /// Sign changes of the solution with `u(a) = 0`, `u'(a) = 1`. By Sturm
    /// oscillation this is the number of box levels below `energy`.
    pub fn node_count(&self, energy: f64) -> usize {
        let mut u = 0.0f64;
        let mut du = 1.0f64;
        let mut nodes = 0;
        let mut last_sign = 1.0f64;
        for seg in &self.segments {
            let h = seg.h;
            for &(v0, vm, v1) in &seg.stages {
                let f0 = v0 - energy;
                let fm = vm - energy;
                let f1 = v1 - energy;
                let k1 = (du, f0 * u);
                let k2 = (du + 0.5 * h * k1.1, fm * (u + 0.5 * h * k1.0));
                let k3 = (du + 0.5 * h * k2.1, fm * (u + 0.5 * h * k2.0));
                let k4 = (du + h * k3.1, f1 * (u + h * k3.0));
                u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                du += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                if u != 0.0 {
                    let sign = u.signum();
                    if sign != last_sign {
                        nodes += 1;
                        last_sign = sign;
                    }
                }
                let scale = u.abs().max(du.abs());
                if scale > 1e100 {
                    u /= scale;
                    du /= scale;
                }
            }
        }
        nodes
    }

    /// All levels in `(e_min, e_max)`, each bisected to `tol`.
    pub fn levels(&self, e_min: f64, e_max: f64, tol: f64) -> Vec<f64> {
        let n_lo = self.node_count(e_min);
        let n_hi = self.node_count(e_max);
        (n_lo..n_hi)
            .map(|n| {
                // smallest E with more than n nodes
                let (mut lo, mut hi) = (e_min, e_max);
                while hi - lo > tol {
                    let mid = 0.5 * (lo + hi);
                    if self.node_count(mid) > n {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }
}
