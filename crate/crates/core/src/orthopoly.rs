//! Univariate classical orthogonal polynomials and Gauss–Jacobi quadrature.
//!
//! Gegenbauer polynomials `C_n^λ` are the zonal building block of every sphere
//! kernel in the crate; Jacobi weights `(1 - t)^a (1 + t)^b` appear as the radial
//! factor of ball rules after the substitution `t = 2r² - 1`.

use crate::special;
use crate::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Exponents of the Jacobi weight `(1 - t)^a (1 + t)^b` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    a: f64,
    b: f64,
}

impl JacobiParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > -1.0) || !(b.is_finite() && b > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents must exceed -1 (a = {a}, b = {b})"
            )));
        }
        Ok(Self { a, b })
    }

    /// The Gegenbauer weight `(1 - t²)^(λ - 1/2)` as a Jacobi weight.
    pub fn gegenbauer(lambda: f64) -> Result<Self> {
        Self::new(lambda - 0.5, lambda - 0.5)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Total mass `2^(a+b+1) B(a+1, b+1)` of the weight on `[-1, 1]`.
    pub fn mass(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        (a + b + 1.0).exp2() * special::beta(a + 1.0, b + 1.0)
    }

    /// Diagonal entry `α_j` of the Jacobi matrix.
    fn alpha(&self, j: usize) -> f64 {
        let (a, b) = (self.a, self.b);
        if j == 0 {
            return (b - a) / (a + b + 2.0);
        }
        let s = 2.0 * j as f64 + a + b;
        (b * b - a * a) / (s * (s + 2.0))
    }

    /// Off-diagonal entry `β_j` (j ≥ 1) of the Jacobi matrix.
    fn beta(&self, j: usize) -> f64 {
        let (a, b) = (self.a, self.b);
        let jf = j as f64;
        let s = 2.0 * jf + a + b;
        let sq = if j == 1 {
            // the generic form is 0/0 when a + b = -1
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * jf * (jf + a) * (jf + b) * (jf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        sq.sqrt()
    }
}

/// A Gauss–Jacobi rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    params: JacobiParams,
    exact_degree: usize,
}

impl QuadratureRule1D {
    /// Nodes in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    /// Highest polynomial degree integrated exactly, `2k - 1`.
    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(t_i)` in node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Gegenbauer polynomial `C_n^λ(t)` by the three-term recurrence
/// `k C_k = 2(k + λ - 1) t C_{k-1} - (k + 2λ - 2) C_{k-2}`.
///
/// `λ = 0` is rejected: the Chebyshev limit never arises for spheres of dimension ≥ 2.
pub fn gegenbauer_eval(lambda: f64, n: usize, t: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Gegenbauer parameter must be positive (got {lambda})"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * t;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda - 1.0) * t * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Jacobi polynomial `P_n^(a,b)(t)` in the standard normalisation
/// `P_n(1) = (a+1)_n / n!`.
pub fn jacobi_eval(params: JacobiParams, n: usize, t: f64) -> f64 {
    let (a, b) = (params.a, params.b);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * t;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal Jacobi polynomials `p̂_0..p̂_{k-1}` at `t` plus `p̂_k` and its derivative.
struct OrthonormalEval {
    value: f64,
    derivative: f64,
    sum_squares_below: f64,
}

fn orthonormal_eval(params: &JacobiParams, k: usize, t: f64, p0: f64) -> OrthonormalEval {
    let mut p_prev = 0.0;
    let mut p = p0;
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut sum_sq = 0.0;
    for j in 0..k {
        sum_sq += p * p;
        let shift = t - params.alpha(j);
        let back = if j == 0 { 0.0 } else { params.beta(j) };
        let beta_next = params.beta(j + 1);
        let p_next = (shift * p - back * p_prev) / beta_next;
        let dp_next = (shift * dp + p - back * dp_prev) / beta_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    OrthonormalEval {
        value: p,
        derivative: dp,
        sum_squares_below: sum_sq,
    }
}

/// `k`-point Gauss–Jacobi rule for the weight `(1 - t)^a (1 + t)^b`.
///
/// Nodes are the zeros of the degree-`k` orthonormal Jacobi polynomial, found by
/// Newton iteration on the three-term recurrence from Chebyshev-angle starting
/// values, deflating the roots already found. Weights are the Christoffel numbers
/// `1 / Σ_{j<k} p̂_j(t_i)²`, positive by construction.
pub fn gauss_jacobi_rule(params: JacobiParams, k: usize) -> Result<QuadratureRule1D> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "a Gauss rule needs at least one node".into(),
        ));
    }
    let (a, b) = (params.a, params.b);
    let p0 = 1.0 / params.mass().sqrt();
    let kf = k as f64;
    let mut roots: Vec<f64> = Vec::with_capacity(k);
    let mut weights: Vec<f64> = Vec::with_capacity(k);

    for i in 1..=k {
        let angle = (4.0 * i as f64 - 1.0 + 2.0 * a) * std::f64::consts::PI
            / (4.0 * kf + 2.0 * a + 2.0 * b + 2.0);
        let mut t = angle.cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let ev = orthonormal_eval(&params, k, t, p0);
            let deflation: f64 = roots.iter().map(|&r| 1.0 / (t - r)).sum();
            let step = 1.0 / (ev.derivative / ev.value - deflation);
            t -= step;
            if !step.is_finite() {
                break;
            }
            if step.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged || !t.is_finite() || t.abs() >= 1.0 {
            return Err(Error::NoConvergence { a, b, k, index: i - 1 });
        }
        let ev = orthonormal_eval(&params, k, t, p0);
        roots.push(t);
        weights.push(1.0 / ev.sum_squares_below);
    }

    let mut pairs: Vec<(f64, f64)> = roots.into_iter().zip(weights).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::NoConvergence { a, b, k, index: 0 });
    }
    if a == b {
        // mirror the positive half so the rule is exactly symmetric
        for i in 0..k / 2 {
            let j = k - 1 - i;
            let node = 0.5 * (pairs[j].0 - pairs[i].0);
            let weight = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-node, weight);
            pairs[j] = (node, weight);
        }
        if k % 2 == 1 {
            pairs[k / 2].0 = 0.0;
        }
    }
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule1D {
        nodes,
        weights,
        params,
        exact_degree: 2 * k - 1,
    })
}
