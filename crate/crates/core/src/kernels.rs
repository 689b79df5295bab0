//! Zonal reproducing kernels on `S^dim` and Gegenbauer-weighted ball kernels obtained
//! by integrating a sphere kernel over an auxiliary sphere.
//!
//! On `S^dim` with `λ = (dim-1)/2`, the projection onto spherical harmonics of degree
//! `k` has kernel
//!
//! ```text
//! P_k(x, y) = (k + λ)/λ · C_k^λ(⟨x, y⟩) / |S^dim|
//! ```
//!
//! and `K_n = Σ_{k ≤ n} P_k` reproduces all polynomials of degree ≤ `n`.
//!
//! For `(B^d, w_{m/2})` the kernels are
//!
//! ```text
//! K_n(w_{m/2}; x, y) = ∫_{S^m} K_n^{S^{d+m}}(⟨x, y⟩ + √(1-|y|²) ⟨x^c, η⟩) dω(η),
//! ```
//!
//! where `x^c ∈ ℝ^{m+1}` is any vector with `|x|² + |x^c|² = 1`. The integrand is a
//! polynomial of degree `n` in `η`, so a rule on `S^m` of degree `n` evaluates it
//! exactly. With the canonical choice `x^c = (√(1-|x|²), 0, …, 0)` only the first
//! coordinate of `η` enters, and lift nodes sharing it are merged.

use crate::cubature::{axial_sphere_rule, BallWeight, CubatureRule, Domain};
use crate::special;
use crate::{Error, Result};

/// Slack allowed on `|t| ≤ 1` and `|x| ≤ 1` before an argument is rejected.
const BOUNDARY_SLACK: f64 = 1e-12;
/// Batch width for lock-step recurrence evaluation.
const LANES: usize = 8;

/// `Σ_{k ≤ n} c_k C_k^λ(t)` with precomputed recurrence coefficients.
#[derive(Debug, Clone)]
struct GegenbauerSeries {
    lambda: f64,
    /// `C_k = p_k t C_{k-1} - q_k C_{k-2}` for `k ≥ 2` (entries 0, 1 unused).
    p: Vec<f64>,
    q: Vec<f64>,
    coeffs: Vec<f64>,
}

impl GegenbauerSeries {
    fn new(lambda: f64, coeffs: Vec<f64>) -> Self {
        let n = coeffs.len() - 1;
        let mut p = vec![0.0; n + 1];
        let mut q = vec![0.0; n + 1];
        for k in 2..=n {
            let kf = k as f64;
            p[k] = 2.0 * (kf + lambda - 1.0) / kf;
            q[k] = (kf + 2.0 * lambda - 2.0) / kf;
        }
        Self {
            lambda,
            p,
            q,
            coeffs,
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn eval(&self, t: f64) -> f64 {
        let mut acc = self.coeffs[0];
        if self.degree() == 0 {
            return acc;
        }
        let mut prev = 1.0;
        let mut cur = 2.0 * self.lambda * t;
        acc += self.coeffs[1] * cur;
        for k in 2..=self.degree() {
            let next = self.p[k] * t * cur - self.q[k] * prev;
            prev = cur;
            cur = next;
            acc += self.coeffs[k] * cur;
        }
        acc
    }

    #[inline]
    fn eval_lanes(&self, t: &[f64; LANES]) -> [f64; LANES] {
        let mut acc = [self.coeffs[0]; LANES];
        if self.degree() == 0 {
            return acc;
        }
        let mut prev = [1.0; LANES];
        let mut cur = [0.0; LANES];
        let two_lambda = 2.0 * self.lambda;
        for l in 0..LANES {
            cur[l] = two_lambda * t[l];
            acc[l] += self.coeffs[1] * cur[l];
        }
        for k in 2..=self.degree() {
            let (p, q, c) = (self.p[k], self.q[k], self.coeffs[k]);
            for l in 0..LANES {
                let next = p * t[l] * cur[l] - q * prev[l];
                prev[l] = cur[l];
                cur[l] = next;
                acc[l] += c * next;
            }
        }
        acc
    }

    /// Evaluates at every `t[i]` into `out[i]`.
    fn eval_batch(&self, t: &[f64], out: &mut [f64]) {
        debug_assert_eq!(t.len(), out.len());
        for (tc, oc) in t.chunks(LANES).zip(out.chunks_mut(LANES)) {
            let mut lanes = [0.0; LANES];
            lanes[..tc.len()].copy_from_slice(tc);
            let values = self.eval_lanes(&lanes);
            oc.copy_from_slice(&values[..tc.len()]);
        }
    }
}

/// Zonal kernels of degree `n` on `S^dim`, `dim ≥ 2`.
#[derive(Debug, Clone)]
pub struct SphereKernelSpec {
    dim: usize,
    n: usize,
    reproducing: GegenbauerSeries,
    projection: GegenbauerSeries,
}

impl SphereKernelSpec {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "zonal kernels need a sphere of dimension ≥ 2 (got S^{dim})"
            )));
        }
        let lambda = (dim as f64 - 1.0) / 2.0;
        let area = special::sphere_area(dim);
        let coeff = |k: usize| (k as f64 + lambda) / (lambda * area);
        let reproducing = GegenbauerSeries::new(lambda, (0..=n).map(coeff).collect());
        let mut top = vec![0.0; n + 1];
        top[n] = coeff(n);
        Ok(Self {
            dim,
            n,
            reproducing,
            projection: GegenbauerSeries::new(lambda, top),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `λ = (dim - 1)/2`.
    pub fn lambda(&self) -> f64 {
        self.reproducing.lambda
    }

    /// `K_n(x, y_j)` for unit `x` and each row-major unit `y_j`, written to `out`.
    pub fn kernel_row(&self, x: &[f64], ys: &[f64], out: &mut [f64]) -> Result<()> {
        let dim = self.dim + 1;
        check_len(x, dim)?;
        if ys.len() != out.len() * dim {
            return Err(Error::LengthMismatch {
                expected: out.len() * dim,
                got: ys.len(),
            });
        }
        let t: Vec<f64> = ys.chunks_exact(dim).map(|y| dot(x, y)).collect();
        self.reproducing.eval_batch(&t, out);
        Ok(())
    }
}

fn clamp_inner_product(t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0 + BOUNDARY_SLACK) {
        return Err(Error::InvalidParameter(format!(
            "inner product of unit vectors must lie in [-1, 1] (got {t})"
        )));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// `P_n(x, y)` on `S^dim` as a function of `t = ⟨x, y⟩`.
pub fn sphere_projection_kernel(spec: &SphereKernelSpec, t: f64) -> Result<f64> {
    Ok(spec.projection.eval(clamp_inner_product(t)?))
}

/// `K_n(x, y) = Σ_{k ≤ n} P_k(x, y)` on `S^dim` as a function of `t = ⟨x, y⟩`.
pub fn sphere_kernel(spec: &SphereKernelSpec, t: f64) -> Result<f64> {
    Ok(spec.reproducing.eval(clamp_inner_product(t)?))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn check_len(x: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

/// `√(1 - |x|²)` for a point of the closed ball, rejecting points outside it.
fn ball_height(x: &[f64]) -> Result<f64> {
    let norm_sq = dot(x, x);
    if !(norm_sq.sqrt() <= 1.0 + BOUNDARY_SLACK) {
        return Err(Error::OutsideBall {
            norm: norm_sq.sqrt(),
        });
    }
    Ok((1.0 - norm_sq).max(0.0).sqrt())
}

/// The canonical point `(x, √(1-|x|²), 0, …, 0)` on `S^total_dim` above `x ∈ B^d`.
pub fn complement_point(x: &[f64], total_dim: usize) -> Result<Vec<f64>> {
    if x.is_empty() || total_dim < x.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot complete a point of B^{} to S^{total_dim}",
            x.len()
        )));
    }
    let s = ball_height(x)?;
    let mut y = Vec::with_capacity(total_dim + 1);
    y.extend_from_slice(x);
    y.push(s);
    y.resize(total_dim + 1, 0.0);
    Ok(y)
}

/// Degree-`n` reproducing and projection kernels on `(B^d, w_{m/2})`.
#[derive(Debug, Clone)]
pub struct BallKernelSpec {
    w: BallWeight,
    n: usize,
    lift_rule: CubatureRule,
    /// Distinct first coordinates of the lift nodes with their summed weights.
    axial: Vec<(f64, f64)>,
    reproducing: GegenbauerSeries,
    projection: GegenbauerSeries,
}

impl BallKernelSpec {
    /// Kernels with a degree-`n` lift rule on `S^m` whose first coordinates are
    /// Gauss–Gegenbauer nodes.
    pub fn new(w: BallWeight, n: usize) -> Result<Self> {
        Self::with_lift_rule(w, n, axial_sphere_rule(w.m(), n)?)
    }

    /// Kernels evaluated with a caller-supplied rule on `S^m` of degree ≥ `n`.
    pub fn with_lift_rule(w: BallWeight, n: usize, lift_rule: CubatureRule) -> Result<Self> {
        if lift_rule.domain() != (Domain::Sphere { dim: w.m() }) {
            return Err(Error::DomainMismatch(format!(
                "kernels on {w} need a lift rule on S^{}, got one on {}",
                w.m(),
                lift_rule.domain()
            )));
        }
        if lift_rule.degree() < n {
            return Err(Error::DegreeDeficiency {
                rule_degree: lift_rule.degree(),
                required: n,
                n,
            });
        }
        let mut pairs: Vec<(f64, f64)> = lift_rule.nodes().map(|e| e[0]).zip(lift_rule.weights().iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut axial: Vec<(f64, f64)> = Vec::new();
        for (e, wt) in pairs {
            match axial.last_mut() {
                Some(last) if (e - last.0).abs() <= 1e-15 => last.1 += wt,
                _ => axial.push((e, wt)),
            }
        }
        let sphere = SphereKernelSpec::new(w.d() + w.m(), n)?;
        Ok(Self {
            w,
            n,
            lift_rule,
            axial,
            reproducing: sphere.reproducing,
            projection: sphere.projection,
        })
    }

    pub fn weight(&self) -> BallWeight {
        self.w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lift_rule(&self) -> &CubatureRule {
        &self.lift_rule
    }

    /// Number of distinct lift-node first coordinates used per kernel evaluation.
    pub fn axial_points(&self) -> usize {
        self.axial.len()
    }

    fn lifted(&self, series: &GegenbauerSeries, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(x, self.w.d())?;
        check_len(y, self.w.d())?;
        let b = ball_height(x)? * ball_height(y)?;
        let a = dot(x, y);
        Ok(self.axial.iter().map(|&(e, wt)| wt * series.eval(a + b * e)).sum())
    }

    /// `K_n(w_{m/2}; x, y)`.
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.lifted(&self.reproducing, x, y)
    }

    /// `P_n(w_{m/2}; x, y)`, the kernel of the projection onto orthogonal polynomials of
    /// degree exactly `n`.
    pub fn projection_kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.lifted(&self.projection, x, y)
    }

    /// `K_n(w_{m/2}; x, y)` with an arbitrary completion `x^c ∈ ℝ^{m+1}` of `x`,
    /// integrated over every lift node.
    pub fn kernel_with_complement(&self, x: &[f64], xc: &[f64], y: &[f64]) -> Result<f64> {
        check_len(x, self.w.d())?;
        check_len(y, self.w.d())?;
        check_len(xc, self.w.m() + 1)?;
        let total = dot(x, x) + dot(xc, xc);
        if (total - 1.0).abs() > BOUNDARY_SLACK {
            return Err(Error::InvalidParameter(format!(
                "(x, x^c) must be a unit vector (squared norm {total})"
            )));
        }
        let s = ball_height(y)?;
        let a = dot(x, y);
        let t: Vec<f64> = self.lift_rule.nodes().map(|eta| a + s * dot(xc, eta)).collect();
        let mut values = vec![0.0; t.len()];
        self.reproducing.eval_batch(&t, &mut values);
        Ok(values.iter().zip(self.lift_rule.weights()).map(|(v, w)| v * w).sum())
    }

    /// `K_n(w_{m/2}; x, y_j)` for each row-major `y_j`, written to `out`.
    pub fn kernel_row(&self, x: &[f64], ys: &[f64], out: &mut [f64]) -> Result<()> {
        self.lifted_row(&self.reproducing, x, ys, out)
    }

    /// `P_n(w_{m/2}; x, y_j)` for each row-major `y_j`, written to `out`.
    pub fn projection_row(&self, x: &[f64], ys: &[f64], out: &mut [f64]) -> Result<()> {
        self.lifted_row(&self.projection, x, ys, out)
    }

    fn lifted_row(&self, series: &GegenbauerSeries, x: &[f64], ys: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.w.d();
        check_len(x, d)?;
        if ys.len() != out.len() * d {
            return Err(Error::LengthMismatch {
                expected: out.len() * d,
                got: ys.len(),
            });
        }
        let sx = ball_height(x)?;
        let groups = self.axial.len();
        let block = (64 / groups).max(1);
        let mut t = Vec::with_capacity(block * groups);
        let mut values = vec![0.0; block * groups];
        for (ys_block, out_block) in ys.chunks(block * d).zip(out.chunks_mut(block)) {
            t.clear();
            for y in ys_block.chunks_exact(d) {
                let a = dot(x, y);
                let b = sx * ball_height(y)?;
                t.extend(self.axial.iter().map(|&(e, _)| a + b * e));
            }
            let values = &mut values[..t.len()];
            series.eval_batch(&t, values);
            for (o, vals) in out_block.iter_mut().zip(values.chunks_exact(groups)) {
                *o = vals.iter().zip(&self.axial).map(|(v, &(_, wt))| v * wt).sum();
            }
        }
        Ok(())
    }
}

/// `K_n(w_{m/2}; x, y)` with the canonical completion.
pub fn ball_kernel(spec: &BallKernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.kernel(x, y)
}

/// `P_n(w_{m/2}; x, y)` with the canonical completion.
pub fn ball_projection_kernel(spec: &BallKernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.projection_kernel(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::circle_rule;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sphere_examples() {
        let s0 = SphereKernelSpec::new(2, 0).unwrap();
        for t in [-1.0, 0.3, 1.0] {
            assert_relative_eq!(sphere_projection_kernel(&s0, t).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-15);
            assert_relative_eq!(sphere_kernel(&s0, t).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-15);
        }
        let s1 = SphereKernelSpec::new(2, 1).unwrap();
        assert_relative_eq!(sphere_projection_kernel(&s1, 1.0).unwrap(), 3.0 / (4.0 * PI), max_relative = 1e-15);
        let s3 = SphereKernelSpec::new(2, 3).unwrap();
        assert_relative_eq!(sphere_kernel(&s3, 1.0).unwrap(), 16.0 / (4.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn sphere_argument_validation() {
        assert!(SphereKernelSpec::new(1, 2).is_err());
        let s = SphereKernelSpec::new(2, 4).unwrap();
        assert_eq!(
            sphere_kernel(&s, 1.0 + 1e-13).unwrap(),
            sphere_kernel(&s, 1.0).unwrap()
        );
        assert!(sphere_kernel(&s, 1.0 + 1e-9).is_err());
        assert!(sphere_kernel(&s, f64::NAN).is_err());
    }

    #[test]
    fn batch_matches_scalar() {
        let s = SphereKernelSpec::new(4, 11).unwrap();
        let t: Vec<f64> = (0..19).map(|i| -1.0 + 2.0 * i as f64 / 18.0).collect();
        let mut out = vec![0.0; t.len()];
        s.reproducing.eval_batch(&t, &mut out);
        for (ti, oi) in t.iter().zip(&out) {
            assert_eq!(*oi, s.reproducing.eval(*ti));
        }
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement_point(&[0.0, 0.0], 3).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        let x = [0.6, 0.8];
        assert_eq!(complement_point(&x, 4).unwrap(), vec![0.6, 0.8, 0.0, 0.0, 0.0]);
        let y = complement_point(&[0.1, -0.5, 0.3], 5).unwrap();
        assert!((dot(&y, &y).sqrt() - 1.0).abs() <= 1e-14);
        assert!(matches!(complement_point(&[0.9, 0.9], 3), Err(Error::OutsideBall { .. })));
        assert!(complement_point(&[0.1, 0.1], 1).is_err());
    }

    #[test]
    fn ball_constant_kernel() {
        let spec = BallKernelSpec::new(BallWeight::new(2, 1).unwrap(), 0).unwrap();
        let v = ball_kernel(&spec, &[0.2, -0.7], &[0.5, 0.5]).unwrap();
        assert_relative_eq!(v, 1.0 / PI, max_relative = 1e-15);
        for (d, m) in [(1, 1), (3, 2), (2, 4)] {
            let w = BallWeight::new(d, m).unwrap();
            let spec = BallKernelSpec::new(w, 0).unwrap();
            let x = vec![0.1; d];
            assert_relative_eq!(ball_projection_kernel(&spec, &x, &x).unwrap(), 1.0 / w.mass(), max_relative = 1e-14);
        }
    }

    #[test]
    fn lift_rule_validation() {
        let w = BallWeight::new(2, 2).unwrap();
        assert!(matches!(
            BallKernelSpec::with_lift_rule(w, 3, circle_rule(3)),
            Err(Error::DomainMismatch(_))
        ));
        let w = BallWeight::new(2, 1).unwrap();
        assert!(matches!(
            BallKernelSpec::with_lift_rule(w, 4, circle_rule(3)),
            Err(Error::DegreeDeficiency { .. })
        ));
        let spec = BallKernelSpec::new(w, 4).unwrap();
        assert!(spec.kernel(&[0.1], &[0.1, 0.2]).is_err());
        assert!(matches!(spec.kernel(&[1.1, 0.0], &[0.1, 0.2]), Err(Error::OutsideBall { .. })));
    }

    #[test]
    fn axial_merging_shrinks_lift_nodes() {
        let spec = BallKernelSpec::new(BallWeight::new(2, 1).unwrap(), 8).unwrap();
        assert_eq!(spec.lift_rule().len(), 9);
        assert_eq!(spec.axial_points(), 5);
        let spec = BallKernelSpec::new(BallWeight::new(2, 3).unwrap(), 8).unwrap();
        assert_eq!(spec.axial_points(), 5);
    }

    #[test]
    fn row_matches_pointwise() {
        let spec = BallKernelSpec::new(BallWeight::new(3, 2).unwrap(), 6).unwrap();
        let x = [0.2, -0.3, 0.5];
        let ys: Vec<f64> = (0..37).flat_map(|i| {
            let a = i as f64 * 0.37;
            let r = (i as f64 / 37.0).sqrt();
            [r * a.cos() * 0.6, r * a.sin() * 0.6, r * 0.8 * (1.0 - 2.0 * (i % 2) as f64)]
        }).collect();
        let mut out = vec![0.0; 37];
        spec.kernel_row(&x, &ys, &mut out).unwrap();
        let mut proj = vec![0.0; 37];
        spec.projection_row(&x, &ys, &mut proj).unwrap();
        for (j, y) in ys.chunks_exact(3).enumerate() {
            assert_relative_eq!(out[j], spec.kernel(&x, y).unwrap(), max_relative = 1e-13, epsilon = 1e-13);
            assert_relative_eq!(proj[j], spec.projection_kernel(&x, y).unwrap(), max_relative = 1e-13, epsilon = 1e-13);
        }
    }
}
