//! Double-exponential quadrature.
//!
//! Two rules share one refinement loop: tanh-sinh on finite intervals and
//! exp-sinh on half-lines. Each level halves the step, reusing every node of
//! the previous level, and the difference between consecutive levels is the
//! error estimate. Node tables are built once per process.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budgets for every integral evaluator in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Absolute tolerance target.
    pub tol: f64,
    /// Upper bound on integrand evaluations per quadrature call.
    pub max_nodes: usize,
    /// Split point scale for half-line integrals (a Laplace transform at `s`
    /// splits at `split_scale / s`).
    pub split_scale: f64,
    /// Number of contour nodes used by the fixed-Talbot inversion.
    pub talbot_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: 1e-11,
            max_nodes: 6000,
            split_scale: 1.0,
            talbot_nodes: 32,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_nodes < 15 {
            return Err(Error::Domain(format!(
                "max_nodes must be at least 15, got {}",
                self.max_nodes
            )));
        }
        if !(self.split_scale > 0.0) || !self.split_scale.is_finite() {
            return Err(Error::Domain("split_scale must be positive and finite".into()));
        }
        if self.talbot_nodes < 4 {
            return Err(Error::Domain("talbot_nodes must be at least 4".into()));
        }
        Ok(())
    }
}

/// Result of a single quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

impl Quadrature {
    pub const ZERO: Quadrature = Quadrature {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };

    pub fn add(self, other: Quadrature) -> Quadrature {
        Quadrature {
            value: self.value + other.value,
            error: self.error + other.error,
            evals: self.evals + other.evals,
        }
    }
}

/// Stopping rule: converged when `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn met(&self, value: f64, error: f64) -> bool {
        error <= self.abs.max(self.rel * value.abs())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

const MAX_LEVEL: usize = 10;
const MIN_LEVEL: usize = 3;
const TANH_SINH_TMAX: f64 = 4.5;
const EXP_SINH_TMIN: f64 = -6.5;
const EXP_SINH_TMAX: f64 = 6.0;

#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    // tanh-sinh: distance from the endpoint on [-1, 1]; exp-sinh: abscissa
    x: f64,
    w: f64,
}

struct Table {
    // levels[k] holds the nodes new at level k, |t| increasing
    left: Vec<Vec<Node>>,
    right: Vec<Vec<Node>>,
    center: Option<Node>,
}

fn level_ts(level: usize, tmax: f64) -> Vec<f64> {
    let h = 0.5f64.powi(level as i32);
    let mut out = Vec::new();
    let mut j = 1usize;
    loop {
        let t = j as f64 * h;
        if t > tmax {
            break;
        }
        out.push(t);
        j += if level == 0 { 1 } else { 2 };
    }
    out
}

fn tanh_sinh_table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let node = |t: f64| {
            let u = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u).exp();
            // 1 - tanh(u) = 2e^{-2u}/(1+e^{-2u})
            let d = 2.0 * e / (1.0 + e);
            let ch = u.cosh();
            let w = FRAC_PI_2 * t.cosh() / (ch * ch);
            Node { t, x: d, w }
        };
        let mut right = Vec::new();
        for level in 0..=MAX_LEVEL {
            right.push(level_ts(level, TANH_SINH_TMAX).into_iter().map(node).collect());
        }
        Table {
            left: right.clone(),
            right,
            center: Some(Node {
                t: 0.0,
                x: 1.0,
                w: FRAC_PI_2,
            }),
        }
    })
}

fn exp_sinh_table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let node = |t: f64| {
            let u = FRAC_PI_2 * t.sinh();
            let x = u.exp();
            Node {
                t,
                x,
                w: FRAC_PI_2 * t.cosh() * x,
            }
        };
        let mut left = Vec::new();
        let mut right = Vec::new();
        for level in 0..=MAX_LEVEL {
            right.push(level_ts(level, EXP_SINH_TMAX).into_iter().map(node).collect());
            left.push(level_ts(level, -EXP_SINH_TMIN).into_iter().map(|t| node(-t)).collect());
        }
        Table {
            left,
            right,
            center: Some(node(0.0)),
        }
    })
}

/// Generic DE refinement. `map(node, side)` returns `(x, weight)` in the
/// original variable or `None` to skip the node.
fn refine<F, M>(mut f: F, table: &Table, map: M, tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
    M: Fn(&Node, bool) -> Option<(f64, f64)>,
{
    let mut evals = 0usize;
    let mut sum = 0.0;
    let mut cut = [f64::INFINITY, f64::INFINITY];
    let mut prev = f64::NAN;
    let mut err = f64::INFINITY;

    let mut eval = |node: &Node, right: bool, evals: &mut usize| -> Result<f64> {
        match map(node, right) {
            None => Ok(0.0),
            Some((x, w)) => {
                if w == 0.0 || !w.is_finite() || !x.is_finite() {
                    return Ok(0.0);
                }
                *evals += 1;
                let fx = f(x);
                if !fx.is_finite() {
                    return Err(Error::QuadratureFailure {
                        estimate: f64::NAN,
                        error: f64::INFINITY,
                        tol: tol.target(0.0),
                    });
                }
                Ok(w * fx)
            }
        }
    };

    for level in 0..=MAX_LEVEL {
        let h = 0.5f64.powi(level as i32);
        if level == 0 {
            let mut max_term = 0.0f64;
            let mut terms: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
            if let Some(c) = table.center.as_ref() {
                let v = eval(c, true, &mut evals)?;
                sum += v;
                max_term = max_term.max(v.abs());
            }
            for (side, nodes) in [(0usize, &table.left[0]), (1usize, &table.right[0])] {
                for n in nodes {
                    let v = eval(n, side == 1, &mut evals)?;
                    sum += v;
                    max_term = max_term.max(v.abs());
                    terms[side].push((n.t.abs(), v));
                }
            }
            // Truncate each tail one unit step past its last significant term.
            for side in 0..2 {
                let last = terms[side]
                    .iter()
                    .filter(|(_, v)| v.abs() > 1e-19 * max_term)
                    .map(|(t, _)| *t)
                    .fold(0.0f64, f64::max);
                cut[side] = last + 1.0;
            }
        } else {
            for (side, nodes) in [(0usize, &table.left[level]), (1usize, &table.right[level])] {
                for n in nodes {
                    if n.t.abs() > cut[side] {
                        break;
                    }
                    sum += eval(n, side == 1, &mut evals)?;
                }
            }
        }
        let value = sum * h;
        if level > 0 {
            err = (value - prev).abs();
            if level >= MIN_LEVEL && tol.met(value, err) {
                return Ok(Quadrature {
                    value,
                    error: err,
                    evals,
                });
            }
        }
        prev = value;
        if evals > max_nodes {
            break;
        }
    }
    Err(Error::QuadratureFailure {
        estimate: prev,
        error: err,
        tol: tol.target(prev),
    })
}

/// ∫_a^b f(x) dx by tanh-sinh. Endpoint singularities are fine; the
/// integrand is never evaluated exactly at an endpoint.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("tanh_sinh needs finite limits, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature::ZERO);
    }
    if a > b {
        let q = tanh_sinh(f, b, a, tol, max_nodes)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    let half = 0.5 * (b - a);
    let mid = a + half;
    let map = |n: &Node, right: bool| {
        let dist = half * n.x;
        let x = if n.t == 0.0 {
            mid
        } else if right {
            b - dist
        } else {
            a + dist
        };
        if x <= a || x >= b {
            return None;
        }
        Some((x, half * n.w))
    };
    refine(f, tanh_sinh_table(), map, tol, max_nodes)
}

/// ∫_a^∞ f(x) dx by exp-sinh, with abscissae `a + scale·e^{π/2 sinh t}`.
pub fn exp_sinh<F>(f: F, a: f64, scale: f64, tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    if !a.is_finite() || !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Domain(format!(
            "exp_sinh needs finite start and positive scale, got a={a}, scale={scale}"
        )));
    }
    let map = |n: &Node, _right: bool| {
        let x = a + scale * n.x;
        if x <= a {
            return None;
        }
        Some((x, scale * n.w))
    };
    refine(f, exp_sinh_table(), map, tol, max_nodes)
}

/// ∫_0^∞ f, split at `split`: tanh-sinh below, exp-sinh above.
pub fn half_line<F>(mut f: F, split: f64, tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    let lower = tanh_sinh(&mut f, 0.0, split, halve(tol), max_nodes)?;
    let upper = exp_sinh(&mut f, split, split, halve(tol), max_nodes)?;
    Ok(lower.add(upper))
}

/// ∫_a^b over a sequence of breakpoints, each panel by tanh-sinh.
pub fn tanh_sinh_panels<F>(mut f: F, points: &[f64], tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    let panels = points.len().saturating_sub(1).max(1) as f64;
    let tol = Tolerance {
        abs: tol.abs / panels,
        rel: tol.rel,
    };
    let mut acc = Quadrature::ZERO;
    for w in points.windows(2) {
        acc = acc.add(tanh_sinh(&mut f, w[0], w[1], tol, max_nodes)?);
    }
    Ok(acc)
}

/// Locate the scale of a positive-half-line integrand by scanning `y·|f(y)|`
/// on a logarithmic grid; returns the abscissa of the largest sample.
pub fn scan_peak<F>(mut f: F, lo: f64, hi: f64, per_decade: usize, hints: &[f64]) -> f64
where
    F: FnMut(f64) -> f64,
{
    let (l0, l1) = (lo.log10(), hi.log10());
    let n = ((l1 - l0) * per_decade as f64).ceil() as usize;
    let mut best = (f64::NEG_INFINITY, 1.0);
    let grid = (0..=n).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / n as f64));
    for y in grid.chain(hints.iter().copied().filter(|h| *h > 0.0 && h.is_finite())) {
        let g = y * f(y).abs();
        if g.is_finite() && g > best.0 {
            best = (g, y);
        }
    }
    best.1
}

/// ∫_0^∞ f for unimodal-ish integrands of unknown scale: scan for the peak of
/// `y·|f(y)|`, then split there.
pub fn half_line_scanned<F>(mut f: F, hints: &[f64], tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    let peak = scan_peak(&mut f, 1e-12, 1e12, 6, hints);
    half_line(f, peak, tol, max_nodes)
}

fn halve(tol: Tolerance) -> Tolerance {
    Tolerance {
        abs: 0.5 * tol.abs,
        rel: tol.rel,
    }
}
