//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

/// Why a minimization stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    LineSearchFailed,
    IterationCap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsConfig {
    pub memory: usize,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_line_evals: usize,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        LbfgsConfig { memory: 10, grad_tol: 1e-10, max_iters: 20_000, c1: 1e-4, c2: 0.9, max_line_evals: 30 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Point {
    alpha: f64,
    f: f64,
    slope: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

struct Problem<'a, F> {
    func: &'a mut F,
    evaluations: usize,
}

impl<F: FnMut(&[f64], &mut [f64]) -> f64> Problem<'_, F> {
    fn eval_at(&mut self, x0: &[f64], dir: &[f64], alpha: f64) -> Point {
        let x: Vec<f64> = x0.iter().zip(dir).map(|(a, p)| a + alpha * p).collect();
        let mut g = vec![0.0; x.len()];
        let f = (self.func)(&x, &mut g);
        self.evaluations += 1;
        Point { alpha, f, slope: dot(&g, dir), x, g }
    }
}

/// Minimizer of the cubic through two points with known slopes, or `None`
/// when the interpolant has no interior minimum.
fn cubic_minimizer(a: &Point, b: &Point) -> Option<f64> {
    let d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    if disc.is_nan() || disc < 0.0 {
        return None;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
    t.is_finite().then_some(t)
}

/// Strong-Wolfe line search along `dir` from `(x0, f0, slope0)`. Returns the
/// accepted point, or the best sufficient-decrease point if the curvature
/// condition could not be met, or `None` when no decrease was found.
fn line_search<F: FnMut(&[f64], &mut [f64]) -> f64>(
    prob: &mut Problem<F>,
    x0: &[f64],
    f0: f64,
    slope0: f64,
    dir: &[f64],
    alpha_init: f64,
    cfg: &LbfgsConfig,
) -> Option<Point> {
    let armijo = |p: &Point| p.f <= f0 + cfg.c1 * p.alpha * slope0;
    let curvature = |p: &Point| p.slope.abs() <= -cfg.c2 * slope0;
    let mut prev = Point { alpha: 0.0, f: f0, slope: slope0, x: x0.to_vec(), g: Vec::new() };
    let mut alpha = alpha_init;
    let mut evals = 0;
    let (mut lo, mut hi) = loop {
        if evals >= cfg.max_line_evals {
            return (prev.alpha > 0.0).then_some(prev);
        }
        let cur = prob.eval_at(x0, dir, alpha);
        evals += 1;
        if !cur.f.is_finite() {
            alpha = 0.5 * (prev.alpha + alpha);
            continue;
        }
        if !armijo(&cur) || (prev.alpha > 0.0 && cur.f >= prev.f) {
            break (prev, cur);
        }
        if curvature(&cur) {
            return Some(cur);
        }
        if cur.slope >= 0.0 {
            break (cur, prev);
        }
        alpha = cur.alpha * 2.0;
        prev = cur;
    };
    while evals < cfg.max_line_evals {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= f64::EPSILON * b.max(1e-300) {
            break;
        }
        let alpha = match cubic_minimizer(&lo, &hi) {
            Some(t) if t > a + 0.1 * width && t < b - 0.1 * width => t,
            _ => 0.5 * (a + b),
        };
        let cur = prob.eval_at(x0, dir, alpha);
        evals += 1;
        if !armijo(&cur) || cur.f >= lo.f || !cur.f.is_finite() {
            hi = cur;
        } else {
            if curvature(&cur) {
                return Some(cur);
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    (lo.alpha > 0.0 && lo.f < f0).then_some(lo)
}

/// Minimize `func`, which returns `f(x)` and writes `∇f(x)` into its second
/// argument. Accepted objective values never increase.
pub fn minimize<F>(mut func: F, x0: &[f64], cfg: &LbfgsConfig) -> Minimum
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut prob = Problem { func: &mut func, evaluations: 0 };
    let mut x = x0.to_vec();
    let mut g = vec![0.0; x.len()];
    let mut f = (prob.func)(&x, &mut g);
    prob.evaluations += 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.memory);
    let mut iterations = 0;

    let termination = loop {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= cfg.grad_tol {
            break Termination::GradientTolerance;
        }
        if iterations >= cfg.max_iters {
            break Termination::IterationCap;
        }

        // Two-loop recursion for -H g.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if slope.is_nan() || slope >= 0.0 {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let alpha_init = if history.is_empty() { (1.0 / gnorm).min(1.0) } else { 1.0 };

        let mut step = line_search(&mut prob, &x, f, slope, &dir, alpha_init, cfg);
        if step.is_none() && !history.is_empty() {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            step = line_search(&mut prob, &x, f, -gnorm * gnorm, &dir, (1.0 / gnorm).min(1.0), cfg);
        }
        let Some(next) = step else {
            break Termination::LineSearchFailed;
        };

        let s: Vec<f64> = next.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > f64::EPSILON * dot(&y, &y) {
            if history.len() == cfg.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = next.x;
        g = next.g;
        f = next.f;
        iterations += 1;
    };

    Minimum { grad_norm: dot(&g, &g).sqrt(), x, f, iterations, evaluations: prob.evaluations, termination }
}
