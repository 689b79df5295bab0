//! Hyperinterpolation operators, their Lebesgue functions, grid estimates of
//! Lebesgue constants, and log–log growth fits.
//!
//! For a positive-weight rule `{(x_α, λ_α)}` of degree ≥ `2n`,
//!
//! ```text
//! L_n f(x) = Σ_α λ_α K_n(x, x_α) f(x_α),      Λ(x) = Σ_α λ_α |K_n(x, x_α)|,
//! ```
//!
//! `L_n` is a projection onto `Π_n`, and its operator norm on `C(B^d)` is `sup Λ`.
//! The sup is estimated from below by scanning a polar grid and refining once around
//! the best grid point.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::cubature::{BallWeight, CubatureRule, Domain, Symmetry};
use crate::kernels::{BallKernelSpec, SphereKernelSpec};
use crate::{Error, Result};

/// Minimum number of radial levels of a default grid.
pub const MIN_RADIAL_LEVELS: usize = 64;
/// Points per coordinate of the local refinement scan.
pub const REFINEMENT_POINTS: usize = 11;
/// Tolerance on `|x| = 1` for points passed to sphere operators.
const SPHERE_POINT_TOL: f64 = 1e-12;

/// Default multiplier `G / n` of the radial level count.
///
/// Dense three-dimensional grids are far more expensive (the rule, the grid and the
/// kernel all grow with the dimension), so higher dimensions use a coarser default.
pub fn default_grid_scale(ambient_dim: usize) -> usize {
    if ambient_dim <= 2 {
        12
    } else {
        2
    }
}

/// An operator `f ↦ Σ_α λ_α K_n(·, x_α) f(x_α)` built from a cubature rule.
pub trait KernelOperator: Sync {
    /// Polynomial degree `n` of the kernel.
    fn n(&self) -> usize;

    fn rule(&self) -> &CubatureRule;

    /// Writes `K_n(x, x_α)` for every rule node into `out`.
    fn kernel_row(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    fn domain(&self) -> Domain {
        self.rule().domain()
    }

    /// `f(x_α)` in rule node order.
    fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<Vec<f64>>
    where
        Self: Sized,
    {
        self.rule()
            .nodes()
            .enumerate()
            .map(|(index, x)| {
                let value = f(x);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFinite { index, value })
                }
            })
            .collect()
    }

    /// `L_n f(x)` from samples `f(x_α)` in rule node order.
    fn apply(&self, samples: &[f64], x: &[f64]) -> Result<f64> {
        let rule = self.rule();
        if samples.len() != rule.len() {
            return Err(Error::LengthMismatch {
                expected: rule.len(),
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: samples[index],
            });
        }
        let mut row = vec![0.0; rule.len()];
        self.kernel_row(x, &mut row)?;
        Ok(row
            .iter()
            .zip(rule.weights())
            .zip(samples)
            .map(|((k, w), f)| w * k * f)
            .sum())
    }

    /// `Λ(x) = Σ_α λ_α |K_n(x, x_α)|`.
    fn lebesgue_function(&self, x: &[f64]) -> Result<f64> {
        let rule = self.rule();
        let mut row = vec![0.0; rule.len()];
        self.kernel_row(x, &mut row)?;
        Ok(row.iter().zip(rule.weights()).map(|(k, w)| w * k.abs()).sum())
    }
}

/// Hyperinterpolation of degree `n` on `(B^d, w_{m/2})`.
#[derive(Debug, Clone)]
pub struct Hyperinterpolant {
    kernel: BallKernelSpec,
    rule: CubatureRule,
    nodes: Vec<f64>,
}

fn check_rule_degree(rule: &CubatureRule, n: usize) -> Result<()> {
    if rule.degree() < 2 * n {
        return Err(Error::DegreeDeficiency {
            rule_degree: rule.degree(),
            required: 2 * n,
            n,
        });
    }
    Ok(())
}

impl Hyperinterpolant {
    /// Degree-`n` operator on `w` from `rule`, which must live on the same weighted
    /// ball and have degree ≥ `2n`.
    pub fn build(w: BallWeight, n: usize, rule: CubatureRule) -> Result<Self> {
        Self::with_kernel(BallKernelSpec::new(w, n)?, rule)
    }

    /// Operator with an explicitly constructed kernel.
    pub fn with_kernel(kernel: BallKernelSpec, rule: CubatureRule) -> Result<Self> {
        let w = kernel.weight();
        if rule.domain() != Domain::WeightedBall(w) {
            return Err(Error::DomainMismatch(format!(
                "kernel lives on {w} but the rule on {}",
                rule.domain()
            )));
        }
        check_rule_degree(&rule, kernel.n())?;
        let nodes = rule.nodes().flatten().copied().collect();
        Ok(Self { kernel, rule, nodes })
    }

    pub fn weight(&self) -> BallWeight {
        self.kernel.weight()
    }

    pub fn kernel(&self) -> &BallKernelSpec {
        &self.kernel
    }
}

impl KernelOperator for Hyperinterpolant {
    fn n(&self) -> usize {
        self.kernel.n()
    }

    fn rule(&self) -> &CubatureRule {
        &self.rule
    }

    fn kernel_row(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.kernel.kernel_row(x, &self.nodes, out)
    }
}

/// Hyperinterpolation of degree `n` on `S^dim`.
#[derive(Debug, Clone)]
pub struct SphereHyperinterpolant {
    kernel: SphereKernelSpec,
    rule: CubatureRule,
    nodes: Vec<f64>,
}

impl SphereHyperinterpolant {
    pub fn build(dim: usize, n: usize, rule: CubatureRule) -> Result<Self> {
        if rule.domain() != (Domain::Sphere { dim }) {
            return Err(Error::DomainMismatch(format!(
                "operator on S^{dim} given a rule on {}",
                rule.domain()
            )));
        }
        check_rule_degree(&rule, n)?;
        let kernel = SphereKernelSpec::new(dim, n)?;
        let nodes = rule.nodes().flatten().copied().collect();
        Ok(Self { kernel, rule, nodes })
    }

    pub fn kernel(&self) -> &SphereKernelSpec {
        &self.kernel
    }
}

impl KernelOperator for SphereHyperinterpolant {
    fn n(&self) -> usize {
        self.kernel.n()
    }

    fn rule(&self) -> &CubatureRule {
        &self.rule
    }

    fn kernel_row(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= SPHERE_POINT_TOL) {
            return Err(Error::InvalidParameter(format!(
                "point of norm {norm} is not on S^{}",
                self.kernel.dim()
            )));
        }
        self.kernel.kernel_row(x, &self.nodes, out)
    }
}

/// Angular range of one polar coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
struct AngleRange {
    length: f64,
    intervals: usize,
    /// Whether the right endpoint is a grid value (false for a full period).
    closed: bool,
}

impl AngleRange {
    fn step(&self) -> f64 {
        self.length / self.intervals as f64
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let count = if self.closed { self.intervals + 1 } else { self.intervals };
        (0..count).map(move |j| {
            if self.closed && j == self.intervals {
                self.length
            } else {
                self.length * j as f64 / self.intervals as f64
            }
        })
    }

    fn refined(&self) -> Self {
        Self {
            intervals: 2 * self.intervals,
            ..*self
        }
    }
}

/// Product grid in polar coordinates over a ball or a sphere, restricted to a
/// fundamental sector of a symmetry group of the rule.
///
/// A point has radius `r = sin u` (ball only; `u_i = π i / (2G)`, clustering radii
/// near the boundary) and direction
///
/// ```text
/// ξ = (cos θ_1, sin θ_1 cos θ_2, …, sin θ_1 ⋯ sin θ_{D-2} cos φ, sin θ_1 ⋯ sin θ_{D-2} sin φ).
/// ```
///
/// The `θ_1` range shrinks to `[0, π/2]` under `x_1 ↦ -x_1`, and the `φ` range to
/// `[0, 2π/N)` or `[0, π/N]` under rotations of order `N` in the last coordinate plane
/// (with or without `x_D ↦ -x_D`). The orbit of a sector grid under the group then has
/// the same angular spacing as the full grid. [`PolarGrid::refined`] halves every step,
/// and the refined grid contains the coarse one.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    ambient: usize,
    ball: bool,
    radial_levels: usize,
    /// `θ_1, …, θ_{D-2}` then `φ`; for `D = 1` only `φ` with `ξ = cos φ`.
    angles: Vec<AngleRange>,
    symmetry: Symmetry,
}

impl PolarGrid {
    /// Grid with `radial_levels` radial steps (ignored on spheres) and
    /// `2·radial_levels + 1` equispaced points per full angle, reduced to the sector of
    /// `symmetry`.
    pub fn new(domain: Domain, radial_levels: usize, symmetry: Symmetry) -> Result<Self> {
        if radial_levels == 0 {
            return Err(Error::InvalidParameter("grid needs at least one radial level".into()));
        }
        let (ambient, ball) = match domain {
            Domain::Sphere { dim } => (dim + 1, false),
            Domain::WeightedBall(w) => (w.d(), true),
        };
        if !ball && ambient < 2 {
            return Err(Error::InvalidParameter("sphere grids need S^dim with dim ≥ 1".into()));
        }
        let g = radial_levels;
        let full_step = 2.0 * PI / (2 * g + 1) as f64;
        let mut angles = Vec::new();
        if ambient == 1 {
            let reflect = symmetry.first_axis_reflection || symmetry.last_axis_reflection;
            angles.push(if reflect {
                AngleRange { length: 0.0, intervals: 1, closed: false }
            } else {
                AngleRange { length: 2.0 * PI, intervals: 2, closed: false }
            });
        } else {
            for k in 0..ambient.saturating_sub(2) {
                let half = k == 0 && symmetry.first_axis_reflection;
                angles.push(AngleRange {
                    length: if half { PI / 2.0 } else { PI },
                    intervals: if half { g } else { 2 * g },
                    closed: true,
                });
            }
            let rotation = symmetry.last_plane_rotation.max(1) as f64;
            let (length, closed) = if symmetry.last_axis_reflection {
                (PI / rotation, true)
            } else {
                (2.0 * PI / rotation, false)
            };
            let intervals = if !closed && rotation == 1.0 {
                2 * g + 1
            } else {
                ((length / full_step).ceil() as usize).max(1)
            };
            angles.push(AngleRange { length, intervals, closed });
        }
        Ok(Self {
            ambient,
            ball,
            radial_levels: g,
            angles,
            symmetry,
        })
    }

    /// Default grid for an operator of degree `n` using `rule`: `G = max(scale·n, 64)`
    /// radial levels, reduced by the rule's recorded symmetries after verifying them.
    pub fn for_rule(rule: &CubatureRule, n: usize, grid_scale: usize) -> Result<Self> {
        let claimed = rule.symmetry();
        let symmetry = if claimed.holds_for(rule) { claimed } else { Symmetry::NONE };
        Self::new(rule.domain(), (grid_scale * n).max(MIN_RADIAL_LEVELS), symmetry)
    }

    /// The same grid with every step halved; contains all points of `self`.
    pub fn refined(&self) -> Self {
        Self {
            radial_levels: 2 * self.radial_levels,
            // the two directions of B^1 need no angular refinement
            angles: if self.ambient == 1 {
                self.angles.clone()
            } else {
                self.angles.iter().map(AngleRange::refined).collect()
            },
            ..self.clone()
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn radial_levels(&self) -> usize {
        self.radial_levels
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Number of intervals of each angle, `θ_1, …, φ`.
    pub fn angular_intervals(&self) -> Vec<usize> {
        self.angles.iter().map(|a| a.intervals).collect()
    }

    /// Number of coordinates `(u, θ…, φ)` describing a point.
    fn params(&self) -> usize {
        self.angles.len() + usize::from(self.ball)
    }

    fn radial_step(&self) -> f64 {
        PI / (2 * self.radial_levels) as f64
    }

    /// Point from polar coordinates `(u?, θ_1, …, φ)`.
    fn point(&self, coords: &[f64], out: &mut [f64]) {
        let (r, angles) = if self.ball {
            (coords[0].clamp(0.0, PI / 2.0).sin(), &coords[1..])
        } else {
            (1.0, coords)
        };
        if self.ambient == 1 {
            out[0] = r * angles[0].cos();
            return;
        }
        let mut scale = r;
        let last = angles.len() - 1;
        for (k, &a) in angles[..last].iter().enumerate() {
            let (s, c) = exact_sin_cos(a);
            out[k] = scale * c;
            scale *= s;
        }
        let (s, c) = exact_sin_cos(angles[last]);
        out[self.ambient - 2] = scale * c;
        out[self.ambient - 1] = scale * s;
    }

    /// Grid points in deterministic order (radius, then `θ_1, …, φ`), without
    /// duplicates at the origin or on coordinate poles, with their polar coordinates.
    fn enumerate(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self.params();
        let mut coords: Vec<f64> = Vec::new();
        let mut prefix = Vec::with_capacity(p);
        let radii: Vec<f64> = if self.ball {
            (0..=self.radial_levels).map(|i| self.radial_step() * i as f64).collect()
        } else {
            vec![PI / 2.0]
        };
        for &u in &radii {
            prefix.clear();
            if self.ball {
                prefix.push(u);
            }
            if self.ball && u == 0.0 {
                coords.extend_from_slice(&prefix);
                coords.extend(std::iter::repeat(0.0).take(self.angles.len()));
                continue;
            }
            self.enumerate_angles(0, &mut prefix, &mut coords);
        }
        let mut points = vec![0.0; coords.len() / p * self.ambient];
        for (c, x) in coords.chunks_exact(p).zip(points.chunks_exact_mut(self.ambient)) {
            self.point(c, x);
        }
        (coords, points)
    }

    fn enumerate_angles(&self, level: usize, prefix: &mut Vec<f64>, coords: &mut Vec<f64>) {
        if level == self.angles.len() {
            coords.extend_from_slice(prefix);
            return;
        }
        let is_polar = self.ambient >= 2 && level + 1 < self.angles.len();
        for a in self.angles[level].values() {
            prefix.push(a);
            if is_polar && (a == 0.0 || a == PI) {
                // remaining angles do not move the point
                coords.extend_from_slice(prefix);
                coords.extend(std::iter::repeat(0.0).take(self.angles.len() - level - 1));
            } else {
                self.enumerate_angles(level + 1, prefix, coords);
            }
            prefix.pop();
        }
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.enumerate().0.len() / self.params()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points, row-major.
    pub fn points(&self) -> Vec<f64> {
        self.enumerate().1
    }

    /// `REFINEMENT_POINTS` values per coordinate spanning one grid step either side of
    /// `center`.
    fn local_patch(&self, center: &[f64]) -> Vec<f64> {
        let p = self.params();
        let mut half_widths = Vec::with_capacity(p);
        if self.ball {
            half_widths.push(self.radial_step());
        }
        half_widths.extend(self.angles.iter().map(|a| if self.ambient == 1 { 0.0 } else { a.step() }));
        let per = REFINEMENT_POINTS;
        let total = per.pow(p as u32);
        let mut coords = Vec::with_capacity(total * p);
        for idx in 0..total {
            let mut rest = idx;
            for k in 0..p {
                let j = rest % per;
                rest /= per;
                let offset = -1.0 + 2.0 * j as f64 / (per - 1) as f64;
                coords.push(center[k] + offset * half_widths[k]);
            }
        }
        let mut points = vec![0.0; total * self.ambient];
        for (c, x) in coords.chunks_exact(p).zip(points.chunks_exact_mut(self.ambient)) {
            self.point(c, x);
        }
        points
    }
}

impl fmt::Display for PolarGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.ball { "ball" } else { "sphere" };
        write!(f, "polar {kind} grid, D = {}", self.ambient)?;
        if self.ball {
            write!(f, ", G = {}", self.radial_levels)?;
        }
        write!(f, ", angular intervals {:?}", self.angular_intervals())
    }
}

fn exact_sin_cos(a: f64) -> (f64, f64) {
    if a == 0.0 {
        (0.0, 1.0)
    } else if a == PI {
        (0.0, -1.0)
    } else {
        a.sin_cos()
    }
}

/// Lower estimate of `sup Λ` with where it was attained.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueReport {
    pub domain: Domain,
    pub n: usize,
    pub rule_degree: usize,
    pub rule_nodes: usize,
    pub estimate: f64,
    pub argmax: Vec<f64>,
    pub grid: PolarGrid,
    pub grid_points: usize,
    /// Points scanned in the local refinement pass (0 if skipped).
    pub refinement_points: usize,
}

/// CSV header matching [`LebesgueReport::csv_row`].
pub const CSV_HEADER: &str = "d,mu_numerator_over_2,n,rule_degree,rule_nodes,grid_points,lebesgue_estimate,argmax_radius";

impl LebesgueReport {
    pub fn argmax_radius(&self) -> f64 {
        self.argmax.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// One CSV row: `d, m, n, rule degree, rule nodes, grid points, estimate, |argmax|`.
    /// Spheres `S^dim` report `d = dim` and `m = 0`.
    pub fn csv_row(&self) -> String {
        let (d, m) = match self.domain {
            Domain::WeightedBall(w) => (w.d(), w.m()),
            Domain::Sphere { dim } => (dim, 0),
        };
        format!(
            "{d},{m},{},{},{},{},{:.16e},{:.16e}",
            self.n,
            self.rule_degree,
            self.rule_nodes,
            self.grid_points + self.refinement_points,
            self.estimate,
            self.argmax_radius()
        )
    }
}

/// `Λ` at every row-major point, evaluated in parallel, returned in point order.
pub fn lebesgue_values<O: KernelOperator>(op: &O, points: &[f64]) -> Result<Vec<f64>> {
    let dim = op.domain().ambient_dim();
    points
        .par_chunks(dim)
        .map(|x| op.lebesgue_function(x))
        .collect()
}

/// Index and value of the first maximum.
fn first_max(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// `max Λ` over `grid`, followed by a local refinement scan around the grid argmax.
pub fn lebesgue_constant<O: KernelOperator>(op: &O, grid: &PolarGrid) -> Result<LebesgueReport> {
    lebesgue_constant_with(op, grid, true)
}

/// [`lebesgue_constant`] with the refinement pass optional.
pub fn lebesgue_constant_with<O: KernelOperator>(op: &O, grid: &PolarGrid, refine: bool) -> Result<LebesgueReport> {
    let domain = op.domain();
    if grid.ambient_dim() != domain.ambient_dim() || grid.ball != matches!(domain, Domain::WeightedBall(_)) {
        return Err(Error::DomainMismatch(format!("{grid} does not cover {domain}")));
    }
    let dim = domain.ambient_dim();
    let (coords, points) = grid.enumerate();
    let values = lebesgue_values(op, &points)?;
    let (best, mut estimate) = first_max(&values);
    let mut argmax = points[best * dim..(best + 1) * dim].to_vec();
    let mut refinement_points = 0;
    if refine {
        let p = grid.params();
        let local = grid.local_patch(&coords[best * p..(best + 1) * p]);
        let local_values = lebesgue_values(op, &local)?;
        refinement_points = local_values.len();
        let (j, v) = first_max(&local_values);
        if v > estimate {
            estimate = v;
            argmax = local[j * dim..(j + 1) * dim].to_vec();
        }
    }
    let rule = op.rule();
    Ok(LebesgueReport {
        domain,
        n: op.n(),
        rule_degree: rule.degree(),
        rule_nodes: rule.len(),
        estimate,
        argmax,
        grid: grid.clone(),
        grid_points: values.len(),
        refinement_points,
    })
}

/// Lebesgue-constant estimate for degree-`n` hyperinterpolation on `S^dim`.
pub fn sphere_lebesgue_constant(dim: usize, n: usize, rule: CubatureRule, grid: &PolarGrid) -> Result<LebesgueReport> {
    lebesgue_constant(&SphereHyperinterpolant::build(dim, n, rule)?, grid)
}

/// `max |L_n f - f|` over row-major points, from samples `f(x_α)`.
pub fn sup_error<O, F>(op: &O, samples: &[f64], f: F, points: &[f64]) -> Result<f64>
where
    O: KernelOperator,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = op.domain().ambient_dim();
    let errors: Vec<f64> = points
        .par_chunks(dim)
        .map(|x| Ok((op.apply(samples, x)? - f(x)).abs()))
        .collect::<Result<_>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// Least-squares line through `(ln n, ln estimate)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|ln estimate - (intercept + slope ln n)|`.
    pub max_abs_residual: f64,
    pub points: Vec<(usize, f64)>,
}

/// Ordinary least squares of `ln estimate` against `ln n` over at least four points
/// with distinct positive `n` and positive estimates.
pub fn growth_fit(points: &[(usize, f64)]) -> Result<GrowthFit> {
    if points.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points, got {}", points.len())));
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("degrees must be distinct and positive".into()));
    }
    if let Some(&(n, e)) = points.iter().find(|p| !(p.1.is_finite() && p.1 > 0.0)) {
        return Err(Error::Fit(format!("estimate {e} at n = {n} is not positive")));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let count = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(GrowthFit {
        slope,
        intercept,
        max_abs_residual,
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::{ball_rule, circle_rule, sphere_rule};
    use approx::assert_relative_eq;

    fn ball(d: usize, m: usize) -> BallWeight {
        BallWeight::new(d, m).unwrap()
    }

    #[test]
    fn build_checks_degree_and_domain() {
        let w = ball(2, 1);
        assert!(Hyperinterpolant::build(w, 4, ball_rule(w, 8).unwrap()).is_ok());
        match Hyperinterpolant::build(w, 4, ball_rule(w, 7).unwrap()) {
            Err(Error::DegreeDeficiency { rule_degree: 7, required: 8, n: 4 }) => {}
            other => panic!("{other:?}"),
        }
        assert!(Hyperinterpolant::build(ball(1, 1), 3, ball_rule(ball(1, 1), 6).unwrap()).is_ok());
        assert!(matches!(
            Hyperinterpolant::build(w, 2, ball_rule(ball(2, 3), 4).unwrap()),
            Err(Error::DomainMismatch(_))
        ));
        assert!(SphereHyperinterpolant::build(2, 2, circle_rule(4)).is_err());
    }

    #[test]
    fn apply_validates_samples() {
        let w = ball(2, 1);
        let op = Hyperinterpolant::build(w, 2, ball_rule(w, 4).unwrap()).unwrap();
        let mut samples = op.sample(|_| 1.0).unwrap();
        assert_relative_eq!(op.apply(&samples, &[0.3, 0.2]).unwrap(), 1.0, max_relative = 1e-13);
        assert!(matches!(op.apply(&samples[1..], &[0.0, 0.0]), Err(Error::LengthMismatch { .. })));
        samples[2] = f64::INFINITY;
        assert!(matches!(op.apply(&samples, &[0.0, 0.0]), Err(Error::NonFinite { index: 2, .. })));
        assert!(op.sample(|x| if x[0] < 0.0 { f64::NAN } else { 1.0 }).is_err());
    }

    #[test]
    fn constant_lebesgue_function() {
        let w = ball(2, 1);
        let op = Hyperinterpolant::build(w, 0, ball_rule(w, 0).unwrap()).unwrap();
        for x in [[0.0, 0.0], [0.5, -0.5], [1.0, 0.0]] {
            assert_relative_eq!(op.lebesgue_function(&x).unwrap(), 1.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn grid_is_nested_under_refinement() {
        for (domain, rule) in [
            (Domain::WeightedBall(ball(2, 1)), ball_rule(ball(2, 1), 8).unwrap()),
            (Domain::WeightedBall(ball(3, 1)), ball_rule(ball(3, 1), 6).unwrap()),
            (Domain::WeightedBall(ball(1, 2)), ball_rule(ball(1, 2), 6).unwrap()),
            (Domain::Sphere { dim: 2 }, sphere_rule(2, 6).unwrap()),
        ] {
            let grid = PolarGrid::new(domain, 5, rule.symmetry()).unwrap();
            let fine = grid.refined();
            let coarse = grid.points();
            let fine_points = fine.points();
            let dim = grid.ambient_dim();
            for x in coarse.chunks_exact(dim) {
                let found = fine_points
                    .chunks_exact(dim)
                    .any(|y| x.iter().zip(y).all(|(a, b)| (a - b).abs() < 1e-13));
                assert!(found, "{domain}: {x:?} missing from refined grid");
            }
            assert!(fine.len() > grid.len());
        }
    }

    #[test]
    fn full_grid_counts() {
        let grid = PolarGrid::new(Domain::WeightedBall(ball(2, 1)), 4, Symmetry::NONE).unwrap();
        // origin once plus 4 circles of 9 points
        assert_eq!(grid.len(), 1 + 4 * 9);
        let grid = PolarGrid::new(Domain::Sphere { dim: 2 }, 2, Symmetry::NONE).unwrap();
        // θ ∈ {0, π/4, …, π}: two poles plus 3 circles of 5 points
        assert_eq!(grid.len(), 2 + 3 * 5);
        for x in grid.points().chunks_exact(3) {
            assert!((x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sector_orbit_reaches_full_grid_density() {
        let rule = ball_rule(ball(2, 1), 16).unwrap();
        let grid = PolarGrid::for_rule(&rule, 8, 12).unwrap();
        assert_eq!(grid.symmetry().last_plane_rotation, 17);
        let phi = grid.angular_intervals()[0];
        let step = (PI / 17.0) / phi as f64;
        assert!(step <= 2.0 * PI / (2 * grid.radial_levels() + 1) as f64 + 1e-15);
    }

    #[test]
    fn csv_row_format() {
        let w = ball(2, 1);
        let op = Hyperinterpolant::build(w, 0, ball_rule(w, 0).unwrap()).unwrap();
        let grid = PolarGrid::for_rule(op.rule(), 0, 12).unwrap();
        let report = lebesgue_constant(&op, &grid).unwrap();
        let row = report.csv_row();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        assert_eq!(&fields[..5], &["2", "1", "0", "0", "1"]);
        let estimate: f64 = fields[6].parse().unwrap();
        assert!((estimate - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn growth_fit_validation() {
        let pts: Vec<(usize, f64)> = [4, 6, 8, 12].iter().map(|&n| (n, 3.0 * (n as f64).powf(1.5))).collect();
        let fit = growth_fit(&pts).unwrap();
        assert!((fit.slope - 1.5).abs() <= 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() <= 1e-12);
        assert!(fit.max_abs_residual <= 1e-12);
        assert!(growth_fit(&pts[..3]).is_err());
        assert!(growth_fit(&[(4, 1.0), (4, 2.0), (6, 3.0), (8, 4.0)]).is_err());
        assert!(growth_fit(&[(4, 1.0), (5, 0.0), (6, 3.0), (8, 4.0)]).is_err());
        assert!(growth_fit(&[(0, 1.0), (5, 2.0), (6, 3.0), (8, 4.0)]).is_err());
    }
}
