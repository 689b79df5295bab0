//! Positive-weight cubature rules on spheres `S^dim` and on Gegenbauer-weighted
//! balls `(B^d, w_{m/2})`.
//!
//! All rules are product rules assembled from Gauss–Jacobi and equispaced circle
//! rules:
//!
//! - `S^1`: `N = degree + 1` equispaced points starting at angle 0.
//! - `(B^d, w_μ)`, `d ≥ 2`: radial Gauss–Jacobi × a rule on `S^{d-1}`. Writing
//!   `x = rξ`, the radial integral `∫₀¹ g(r) r^{d-1} (1-r²)^{μ-1/2} dr` becomes a
//!   Jacobi integral with `a = μ - 1/2`, `b = (d-2)/2` under `t = 2r² - 1`.
//! - `(B^1, w_μ)`: a single Gauss–Gegenbauer rule.
//! - `S^dim`, `dim ≥ 2`: a `(B^{dim-1}, w_{1/2})` rule lifted against a circle rule.
//!
//! A rule on `(B^d, w_{m/2})` and a rule on `S^m` combine into a rule on `S^{d+m}`
//! through `(x, √(1-|x|²) t)` ([`lift_ball_rule_to_sphere`]); projecting a rule on
//! `S^{d+m}` onto its first `d` coordinates gives a rule on `(B^d, w_{m/2})`
//! ([`restrict_sphere_rule_to_ball`]).

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};

use crate::oracle::{self, graded_multi_indices, MultiIndex};
use crate::orthopoly::{gauss_jacobi_rule, JacobiParams};
use crate::special;
use crate::{Error, Result};

/// Tolerance on `|x| = 1` for sphere nodes.
const SPHERE_NODE_TOL: f64 = 1e-14;
/// Relative error above which [`exactness_report`] flags a monomial.
pub const EXACTNESS_TOL: f64 = 1e-11;

/// The ball `B^d` with the Gegenbauer weight `w_μ(x) = (1 - |x|²)^(μ - 1/2)`, `μ = m/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BallWeight {
    d: usize,
    m: usize,
}

impl BallWeight {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "ball weight needs d ≥ 1 and m ≥ 1 (got d = {d}, m = {m})"
            )));
        }
        Ok(Self { d, m })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mu(&self) -> f64 {
        self.m as f64 / 2.0
    }

    /// `w_μ(x)`; zero outside the closed ball.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = 1.0 - x.iter().map(|v| v * v).sum::<f64>();
        if s < 0.0 {
            return 0.0;
        }
        if self.m == 1 {
            1.0
        } else {
            s.powf((self.m as f64 - 1.0) / 2.0)
        }
    }

    /// `∫_{B^d} w_μ = π^(d/2) Γ(μ + 1/2) / Γ(μ + (d+1)/2)`.
    pub fn mass(&self) -> f64 {
        let d = self.d as f64;
        PI.powf(d / 2.0) * special::gamma_ratio(self.mu() + 0.5, self.mu() + (d + 1.0) / 2.0)
    }
}

impl fmt::Display for BallWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(B^{}, w_{}/2)", self.d, self.m)
    }
}

/// Integration domain of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// The unit sphere `S^dim ⊂ ℝ^{dim+1}` with surface measure.
    Sphere { dim: usize },
    /// The unit ball with a Gegenbauer weight.
    WeightedBall(BallWeight),
}

impl Domain {
    pub fn sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("sphere dimension must be ≥ 1".into()));
        }
        Ok(Domain::Sphere { dim })
    }

    /// Number of coordinates of a point.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Domain::Sphere { dim } => dim + 1,
            Domain::WeightedBall(w) => w.d,
        }
    }

    /// Total measure, from the exact monomial integral of `1`.
    pub fn measure(&self) -> f64 {
        let one = MultiIndex::new(vec![0; self.ambient_dim()]);
        oracle::monomial_integral(&one, *self).expect("dimension matches by construction")
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Sphere { dim } => write!(f, "S^{dim}"),
            Domain::WeightedBall(w) => write!(f, "{w}"),
        }
    }
}

/// Orthogonal symmetries a rule is invariant under, in ambient coordinates
/// `x_1..x_D`.
///
/// Used to shrink Lebesgue-constant search grids to a fundamental sector. Every
/// claim can be re-checked with [`Symmetry::holds_for`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetry {
    /// Invariance under `x_1 → -x_1`.
    pub first_axis_reflection: bool,
    /// Order `N` of rotations by `2π/N` in the `(x_{D-1}, x_D)` plane (1 = none).
    pub last_plane_rotation: usize,
    /// Invariance under `x_D → -x_D`.
    pub last_axis_reflection: bool,
}

impl Symmetry {
    pub const NONE: Symmetry = Symmetry {
        first_axis_reflection: false,
        last_plane_rotation: 1,
        last_axis_reflection: false,
    };

    /// Checks every claimed generator against the node set and weights.
    pub fn holds_for(&self, rule: &CubatureRule) -> bool {
        let dim = rule.ambient_dim();
        let index = NodeIndex::new(rule);
        let mut maps: Vec<Box<dyn Fn(&mut [f64])>> = Vec::new();
        if self.first_axis_reflection {
            maps.push(Box::new(|x: &mut [f64]| x[0] = -x[0]));
        }
        if self.last_axis_reflection {
            maps.push(Box::new(move |x: &mut [f64]| x[dim - 1] = -x[dim - 1]));
        }
        if self.last_plane_rotation > 1 {
            if dim < 2 {
                return false;
            }
            let angle = 2.0 * PI / self.last_plane_rotation as f64;
            let (s, c) = angle.sin_cos();
            maps.push(Box::new(move |x: &mut [f64]| {
                let (u, v) = (x[dim - 2], x[dim - 1]);
                x[dim - 2] = c * u - s * v;
                x[dim - 1] = s * u + c * v;
            }));
        }
        let mut image = vec![0.0; dim];
        maps.iter().all(|map| {
            (0..rule.len()).all(|i| {
                image.copy_from_slice(rule.node(i));
                map(&mut image);
                index.contains(&image, rule.weights[i])
            })
        })
    }
}

/// Nodes sorted by first coordinate, for tolerance lookups.
struct NodeIndex<'a> {
    rule: &'a CubatureRule,
    order: Vec<usize>,
}

impl<'a> NodeIndex<'a> {
    const TOL: f64 = 1e-12;

    fn new(rule: &'a CubatureRule) -> Self {
        let mut order: Vec<usize> = (0..rule.len()).collect();
        order.sort_by(|&i, &j| rule.node(i)[0].total_cmp(&rule.node(j)[0]));
        Self { rule, order }
    }

    fn contains(&self, x: &[f64], weight: f64) -> bool {
        let start = self
            .order
            .partition_point(|&i| self.rule.node(i)[0] < x[0] - Self::TOL);
        self.order[start..]
            .iter()
            .take_while(|&&i| self.rule.node(i)[0] <= x[0] + Self::TOL)
            .any(|&i| {
                let y = self.rule.node(i);
                x.iter().zip(y).all(|(a, b)| (a - b).abs() <= Self::TOL)
                    && (self.rule.weights[i] - weight).abs() <= Self::TOL * weight
            })
    }
}

/// Positive weights and nodes with a declared polynomial exactness degree.
///
/// Nodes are stored row-major; node and weight lists are immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule {
    domain: Domain,
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    symmetry: Symmetry,
}

impl CubatureRule {
    /// Builds a rule from row-major `nodes`, validating positivity and that every node
    /// lies in the domain.
    pub fn new(domain: Domain, degree: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let dim = domain.ambient_dim();
        if let Domain::Sphere { dim: 0 } = domain {
            return Err(Error::InvalidParameter("sphere dimension must be ≥ 1".into()));
        }
        if weights.is_empty() {
            return Err(Error::InvalidParameter("a rule needs at least one node".into()));
        }
        if nodes.len() != weights.len() * dim {
            return Err(Error::LengthMismatch {
                expected: weights.len() * dim,
                got: nodes.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {i} is not strictly positive ({})",
                weights[i]
            )));
        }
        for (i, x) in nodes.chunks_exact(dim).enumerate() {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("node {i} is not finite")));
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ok = match domain {
                Domain::Sphere { .. } => (norm - 1.0).abs() <= SPHERE_NODE_TOL,
                Domain::WeightedBall(_) => norm <= 1.0 + SPHERE_NODE_TOL,
            };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "node {i} (norm {norm}) does not lie in {domain}"
                )));
            }
        }
        Ok(Self {
            domain,
            degree,
            nodes,
            weights,
            symmetry: Symmetry::NONE,
        })
    }

    fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Declared exactness degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient_dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let dim = self.ambient_dim();
        &self.nodes[i * dim..(i + 1) * dim]
    }

    pub fn nodes(&self) -> std::slice::ChunksExact<'_, f64> {
        self.nodes.chunks_exact(self.ambient_dim())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Symmetries recorded at construction (not re-verified).
    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ λ_α f(x_α)` in node order.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (i, (x, &w)) in self.nodes().zip(&self.weights).enumerate() {
            let value = f(x);
            if !value.is_finite() {
                return Err(Error::NonFinite { index: i, value });
            }
            sum += w * value;
        }
        Ok(sum)
    }

    /// Writes the rule as text: a header `kind dim m degree count` (`m = 0` for
    /// spheres), then one line `x_1 … x_k weight` per node with 17 significant digits.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        match self.domain {
            Domain::Sphere { dim } => writeln!(out, "sphere {dim} 0 {} {}", self.degree, self.len())?,
            Domain::WeightedBall(w) => {
                writeln!(out, "ball {} {} {} {}", w.d, w.m, self.degree, self.len())?
            }
        }
        for (x, w) in self.nodes().zip(&self.weights) {
            let mut line = String::new();
            for v in x {
                line.push_str(&format!("{v:.16e} "));
            }
            line.push_str(&format!("{w:.16e}"));
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Parses the format written by [`CubatureRule::write_text`]. Header fields may be
    /// separated by whitespace or commas.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
            Ok(s) => !s.trim().is_empty(),
            Err(_) => true,
        });
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty rule file".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        if fields.len() != 5 {
            return Err(parse_err(1, format!("expected 5 header fields, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<usize> {
            fields[i]
                .parse::<usize>()
                .map_err(|e| parse_err(1, format!("field {}: {e}", i + 1)))
        };
        let (dim, m, degree, count) = (num(1)?, num(2)?, num(3)?, num(4)?);
        let domain = match fields[0] {
            "sphere" => Domain::sphere(dim)?,
            "ball" => Domain::WeightedBall(BallWeight::new(dim, m)?),
            other => return Err(parse_err(1, format!("unknown domain kind '{other}'"))),
        };
        let width = domain.ambient_dim() + 1;
        let mut nodes = Vec::with_capacity(count * (width - 1));
        let mut weights = Vec::with_capacity(count);
        for (lineno, line) in lines {
            let line = line?;
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(lineno + 1, e.to_string()))?;
            if values.len() != width {
                return Err(parse_err(
                    lineno + 1,
                    format!("expected {width} numbers, found {}", values.len()),
                ));
            }
            nodes.extend_from_slice(&values[..width - 1]);
            weights.push(values[width - 1]);
        }
        if weights.len() != count {
            return Err(Error::LengthMismatch {
                expected: count,
                got: weights.len(),
            });
        }
        Self::new(domain, degree, nodes, weights)
    }
}

/// Equispaced rule on `S^1` with `degree + 1` points, the first at angle 0, each of
/// weight `2π/N`; exact for trigonometric polynomials of degree ≤ `degree`.
pub fn circle_rule(degree: usize) -> CubatureRule {
    let count = degree + 1;
    let mut nodes = Vec::with_capacity(2 * count);
    for j in 0..count {
        // negative angles for the upper half keep the rule exactly mirror-symmetric
        let k = if 2 * j <= count { j as f64 } else { j as f64 - count as f64 };
        let (s, c) = (2.0 * PI * k / count as f64).sin_cos();
        nodes.push(c);
        nodes.push(s);
    }
    let weights = vec![2.0 * PI / count as f64; count];
    CubatureRule::new(Domain::Sphere { dim: 1 }, degree, nodes, weights)
        .expect("circle nodes are unit vectors")
        .with_symmetry(Symmetry {
            first_axis_reflection: count % 2 == 0,
            last_plane_rotation: count,
            last_axis_reflection: true,
        })
}

/// Product rule on `S^dim` of exactness ≥ `degree`.
pub fn sphere_rule(dim: usize, degree: usize) -> Result<CubatureRule> {
    match dim {
        0 => Err(Error::InvalidParameter("sphere dimension must be ≥ 1".into())),
        1 => Ok(circle_rule(degree)),
        _ => {
            let ball = ball_rule(BallWeight::new(dim - 1, 1)?, degree)?;
            lift_ball_rule_to_sphere(&ball, &circle_rule(degree))
        }
    }
}

/// Rule on `S^dim` whose first coordinates are Gauss–Gegenbauer nodes: a
/// `(B^1, w_{(dim-1)/2})` rule lifted against a rule on `S^{dim-1}`.
///
/// Integrands that depend on `⟨e_1, η⟩` only collapse onto `⌊degree/2⌋ + 1` distinct
/// first coordinates, which keeps sphere-lift kernel evaluations cheap.
pub fn axial_sphere_rule(dim: usize, degree: usize) -> Result<CubatureRule> {
    match dim {
        0 => Err(Error::InvalidParameter("sphere dimension must be ≥ 1".into())),
        1 => Ok(circle_rule(degree)),
        _ => {
            let axis = ball_rule(BallWeight::new(1, dim - 1)?, degree)?;
            lift_ball_rule_to_sphere(&axis, &sphere_rule(dim - 1, degree)?)
        }
    }
}

/// Product rule on `(B^d, w_μ)` of exactness ≥ `degree`.
pub fn ball_rule(w: BallWeight, degree: usize) -> Result<CubatureRule> {
    let domain = Domain::WeightedBall(w);
    let a = w.mu() - 0.5;
    if w.d == 1 {
        let rule = gauss_jacobi_rule(JacobiParams::new(a, a)?, degree / 2 + 1)?;
        return Ok(CubatureRule::new(domain, degree, rule.nodes().to_vec(), rule.weights().to_vec())?
            .with_symmetry(Symmetry {
                first_axis_reflection: true,
                last_plane_rotation: 1,
                last_axis_reflection: true,
            }));
    }
    // After angular integration only even powers of r survive, so the radial factor is a
    // polynomial of degree ⌊degree/2⌋ in t = 2r² - 1.
    let b = (w.d as f64 - 2.0) / 2.0;
    let radial_points = (degree / 2) / 2 + 1;
    let radial = gauss_jacobi_rule(JacobiParams::new(a, b)?, radial_points)?;
    let scale = 0.25 * (-(a + b)).exp2();
    let angular = sphere_rule(w.d - 1, degree)?;

    let mut nodes = Vec::with_capacity(radial.len() * angular.len() * w.d);
    let mut weights = Vec::with_capacity(radial.len() * angular.len());
    for (&t, &rw) in radial.nodes().iter().zip(radial.weights()) {
        let r = (0.5 * (1.0 + t)).sqrt();
        for (xi, &aw) in angular.nodes().zip(angular.weights()) {
            nodes.extend(xi.iter().map(|v| r * v));
            weights.push(scale * rw * aw);
        }
    }
    Ok(CubatureRule::new(domain, degree, nodes, weights)?.with_symmetry(angular.symmetry))
}

/// Rule on `S^{d+m}` with nodes `(x_α, √(1-|x_α|²) t_β)` and weights `λ_α ν_β`,
/// from a rule on `(B^d, w_{m/2})` and a rule on `S^m`. The declared degree is the
/// smaller of the two input degrees.
pub fn lift_ball_rule_to_sphere(ball: &CubatureRule, cap: &CubatureRule) -> Result<CubatureRule> {
    let w = match ball.domain {
        Domain::WeightedBall(w) => w,
        other => {
            return Err(Error::DomainMismatch(format!(
                "lift expects a weighted-ball rule, got a rule on {other}"
            )))
        }
    };
    match cap.domain {
        Domain::Sphere { dim } if dim == w.m => {}
        other => {
            return Err(Error::DomainMismatch(format!(
                "lift of a rule on {w} needs a rule on S^{}, got one on {other}",
                w.m
            )))
        }
    }
    let out_dim = w.d + w.m + 1;
    let mut nodes = Vec::with_capacity(ball.len() * cap.len() * out_dim);
    let mut weights = Vec::with_capacity(ball.len() * cap.len());
    for (x, &bw) in ball.nodes().zip(&ball.weights) {
        let s = (1.0 - x.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
        for (t, &cw) in cap.nodes().zip(&cap.weights) {
            nodes.extend_from_slice(x);
            nodes.extend(t.iter().map(|v| s * v));
            weights.push(bw * cw);
        }
    }
    let symmetry = Symmetry {
        first_axis_reflection: ball.symmetry.first_axis_reflection,
        last_plane_rotation: cap.symmetry.last_plane_rotation,
        last_axis_reflection: cap.symmetry.last_axis_reflection,
    };
    Ok(CubatureRule::new(
        Domain::Sphere { dim: w.d + w.m },
        ball.degree.min(cap.degree),
        nodes,
        weights,
    )?
    .with_symmetry(symmetry))
}

/// Rule on `(B^d, w_{m/2})` from a rule on `S^{d+m}`: nodes are the first `d`
/// coordinates, weights are divided by `|S^m|`. The declared degree is kept.
pub fn restrict_sphere_rule_to_ball(sph: &CubatureRule, d: usize) -> Result<CubatureRule> {
    let dim = match sph.domain {
        Domain::Sphere { dim } => dim,
        other => {
            return Err(Error::DomainMismatch(format!(
                "restriction expects a sphere rule, got a rule on {other}"
            )))
        }
    };
    if d == 0 || d >= dim {
        return Err(Error::DomainMismatch(format!(
            "cannot restrict a rule on S^{dim} to B^{d}: need 1 ≤ d < {dim}"
        )));
    }
    let m = dim - d;
    let area = special::sphere_area(m);
    let nodes: Vec<f64> = sph.nodes().flat_map(|y| y[..d].iter().copied()).collect();
    let weights: Vec<f64> = sph.weights.iter().map(|w| w / area).collect();
    let symmetry = Symmetry {
        first_axis_reflection: sph.symmetry.first_axis_reflection,
        ..Symmetry::NONE
    };
    Ok(CubatureRule::new(Domain::WeightedBall(BallWeight::new(d, m)?), sph.degree, nodes, weights)?
        .with_symmetry(symmetry))
}

/// One row of an [`ExactnessReport`].
#[derive(Debug, Clone)]
pub struct ExactnessEntry {
    pub monomial: MultiIndex,
    pub rule_value: f64,
    pub exact: f64,
    /// `|rule - exact| / max(|exact|, Σ λ_α |x_α|^{|β|})`. The second term bounds the
    /// size of the cubature sum and only matters for monomials whose integral vanishes.
    pub relative_error: f64,
}

/// Rule values against exact integrals for every monomial up to the declared degree.
#[derive(Debug, Clone)]
pub struct ExactnessReport {
    pub domain: Domain,
    pub degree: usize,
    pub tolerance: f64,
    pub entries: Vec<ExactnessEntry>,
}

impl ExactnessReport {
    pub fn failures(&self) -> impl Iterator<Item = &ExactnessEntry> {
        self.entries
            .iter()
            .filter(move |e| !(e.relative_error <= self.tolerance))
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn max_relative_error(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.relative_error)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ExactnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "exactness of a degree-{} rule on {} ({} monomials, tolerance {:e})",
            self.degree,
            self.domain,
            self.entries.len(),
            self.tolerance
        )?;
        writeln!(f, "{:<24} {:>24} {:>24} {:>12}", "monomial", "rule", "exact", "rel.err")?;
        for e in &self.entries {
            let flag = if e.relative_error <= self.tolerance { "" } else { "  FAIL" };
            writeln!(
                f,
                "{:<24} {:>24.16e} {:>24.16e} {:>12.3e}{flag}",
                e.monomial.to_string(),
                e.rule_value,
                e.exact,
                e.relative_error
            )?;
        }
        write!(
            f,
            "{} / {} monomials pass; max relative error {:.3e}",
            self.entries.len() - self.failures().count(),
            self.entries.len(),
            self.max_relative_error()
        )
    }
}

/// Compares the rule against exact monomial integrals for all total degrees up to the
/// rule's declared degree.
pub fn exactness_report(rule: &CubatureRule) -> ExactnessReport {
    exactness_report_to(rule, rule.degree)
}

/// [`exactness_report`] with an explicit maximum degree.
pub fn exactness_report_to(rule: &CubatureRule, max_degree: usize) -> ExactnessReport {
    let dim = rule.ambient_dim();
    let indices = graded_multi_indices(dim, max_degree);
    let mut sums = vec![0.0; indices.len()];
    let mut norm_sums = vec![0.0; max_degree + 1];
    let mut powers = vec![0.0; dim * (max_degree + 1)];
    for (x, &w) in rule.nodes().zip(&rule.weights) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut power = w;
        for s in norm_sums.iter_mut() {
            *s += power;
            power *= norm;
        }
        for (c, &xc) in x.iter().enumerate() {
            let row = &mut powers[c * (max_degree + 1)..(c + 1) * (max_degree + 1)];
            row[0] = 1.0;
            for e in 1..=max_degree {
                row[e] = row[e - 1] * xc;
            }
        }
        for (k, beta) in indices.iter().enumerate() {
            let value: f64 = beta
                .exponents()
                .iter()
                .enumerate()
                .map(|(c, &e)| powers[c * (max_degree + 1) + e as usize])
                .product();
            sums[k] += w * value;
        }
    }
    let entries = indices
        .into_iter()
        .zip(sums)
        .map(|(monomial, rule_value)| {
            let scale = norm_sums[monomial.degree() as usize];
            let exact = oracle::monomial_integral(&monomial, rule.domain)
                .expect("multi-index length matches the domain");
            let denom = exact.abs().max(scale);
            let relative_error = if denom > 0.0 {
                (rule_value - exact).abs() / denom
            } else {
                0.0
            };
            ExactnessEntry {
                monomial,
                rule_value,
                exact,
                relative_error,
            }
        })
        .collect();
    ExactnessReport {
        domain: rule.domain,
        degree: max_degree,
        tolerance: EXACTNESS_TOL,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball(d: usize, m: usize) -> BallWeight {
        BallWeight::new(d, m).unwrap()
    }

    #[test]
    fn ball_weight_validation_and_mass() {
        assert!(BallWeight::new(0, 1).is_err());
        assert!(BallWeight::new(2, 0).is_err());
        assert_relative_eq!(ball(2, 1).mass(), PI, max_relative = 1e-15);
        assert_relative_eq!(ball(1, 1).mass(), 2.0, max_relative = 1e-15);
        for d in 1..=4 {
            for m in 1..=4 {
                let w = ball(d, m);
                assert_relative_eq!(w.mass(), Domain::WeightedBall(w).measure(), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn circle_examples() {
        let r0 = circle_rule(0);
        assert_eq!(r0.len(), 1);
        assert_relative_eq!(r0.integrate(|_| 1.0).unwrap(), 2.0 * PI, max_relative = 1e-15);

        let r4 = circle_rule(4);
        assert_eq!(r4.len(), 5);
        assert_eq!(r4.node(0), &[1.0, 0.0]);
        let angle = |y: &[f64]| y[1].atan2(y[0]);
        assert!(r4.integrate(|y| (3.0 * angle(y)).cos()).unwrap().abs() < 1e-14);
        assert_relative_eq!(r4.integrate(|y| (2.0 * angle(y)).cos().powi(2)).unwrap(), PI, max_relative = 1e-14);
    }

    #[test]
    fn sphere_examples() {
        let s = sphere_rule(2, 3).unwrap();
        assert_relative_eq!(s.integrate(|_| 1.0).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert!(s.integrate(|y| y[0] * y[1]).unwrap().abs() < 1e-14);
        assert_relative_eq!(s.integrate(|y| y[2] * y[2]).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert!(sphere_rule(0, 3).is_err());
        for y in s.nodes() {
            let n: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn ball_examples() {
        let r = ball_rule(ball(2, 1), 2).unwrap();
        assert_relative_eq!(r.integrate(|_| 1.0).unwrap(), PI, max_relative = 1e-14);
        assert!(r.integrate(|x| x[0]).unwrap().abs() < 1e-15);
        assert_relative_eq!(r.integrate(|x| x[0] * x[0]).unwrap(), PI / 4.0, max_relative = 1e-14);

        let r = ball_rule(ball(2, 3), 6).unwrap();
        let exact = oracle::monomial_ball_integral(&MultiIndex::new(vec![4, 0]), ball(2, 3)).unwrap();
        assert_relative_eq!(r.integrate(|x| x[0].powi(4)).unwrap(), exact, max_relative = 1e-13);

        let s = sphere_rule(3, 5).unwrap();
        let exact = oracle::monomial_sphere_integral(&MultiIndex::new(vec![2, 2, 0, 0]), 3).unwrap();
        assert_relative_eq!(s.integrate(|y| (y[0] * y[1]).powi(2)).unwrap(), exact, max_relative = 1e-13);
    }

    #[test]
    fn lift_examples() {
        let lifted = lift_ball_rule_to_sphere(&ball_rule(ball(1, 1), 3).unwrap(), &circle_rule(3)).unwrap();
        assert_eq!(lifted.domain(), Domain::Sphere { dim: 2 });
        assert_eq!(lifted.len(), 2 * 4);
        assert_relative_eq!(lifted.integrate(|_| 1.0).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(lifted.integrate(|y| y[2] * y[2]).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert!(lifted.integrate(|y| y[0] * y[2]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn lift_declared_degree_is_minimum() {
        let lifted = lift_ball_rule_to_sphere(&ball_rule(ball(1, 1), 7).unwrap(), &circle_rule(4)).unwrap();
        assert_eq!(lifted.degree(), 4);
    }

    #[test]
    fn lift_rejects_mismatched_cap() {
        let b = ball_rule(ball(2, 3), 4).unwrap();
        assert!(matches!(lift_ball_rule_to_sphere(&b, &circle_rule(4)), Err(Error::DomainMismatch(_))));
        assert!(lift_ball_rule_to_sphere(&circle_rule(4), &circle_rule(4)).is_err());
    }

    #[test]
    fn restriction_examples() {
        let r = restrict_sphere_rule_to_ball(&sphere_rule(2, 4).unwrap(), 1).unwrap();
        assert_eq!(r.domain(), Domain::WeightedBall(ball(1, 1)));
        assert_eq!(r.degree(), 4);
        assert_relative_eq!(r.integrate(|_| 1.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(r.integrate(|x| x[0] * x[0]).unwrap(), 2.0 / 3.0, max_relative = 1e-14);
        assert!(r.integrate(|x| x[0].powi(3)).unwrap().abs() < 1e-15);
        assert!(restrict_sphere_rule_to_ball(&sphere_rule(2, 4).unwrap(), 2).is_err());
        assert!(restrict_sphere_rule_to_ball(&sphere_rule(2, 4).unwrap(), 0).is_err());
    }

    #[test]
    fn integrate_reports_nonfinite_node() {
        let r = circle_rule(3);
        let err = r.integrate(|y| if y[0] < -0.5 { f64::NAN } else { 1.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 2, .. }), "{err}");
    }

    #[test]
    fn exactness_reports() {
        assert!(exactness_report(&ball_rule(ball(2, 1), 8).unwrap()).passed());
        assert!(exactness_report(&circle_rule(6)).passed());
        for d in 1..=3 {
            for m in 1..=3 {
                for degree in [0, 1, 2, 5, 9] {
                    let report = exactness_report(&ball_rule(ball(d, m), degree).unwrap());
                    assert!(report.passed(), "d={d} m={m} degree={degree}: {}", report.max_relative_error());
                }
            }
        }
        for dim in 1..=4 {
            let report = exactness_report(&sphere_rule(dim, 7).unwrap());
            assert!(report.passed(), "dim={dim}");
            let report = exactness_report(&axial_sphere_rule(dim, 7).unwrap());
            assert!(report.passed(), "axial dim={dim}");
        }
    }

    #[test]
    fn perturbed_weight_is_flagged() {
        let r = ball_rule(ball(2, 1), 6).unwrap();
        let nodes: Vec<f64> = r.nodes().flatten().copied().collect();
        let mut weights = r.weights().to_vec();
        weights[3] *= 1.0 + 1e-3;
        let bad = CubatureRule::new(r.domain(), r.degree(), nodes, weights).unwrap();
        let report = exactness_report(&bad);
        assert!(!report.passed());
        assert!(report.failures().count() > 0);
    }

    #[test]
    fn degree_beyond_declared_fails() {
        // equispaced N-point circle rule cannot integrate y₁^N exactly
        let r = circle_rule(5);
        let report = exactness_report_to(&r, 6);
        assert!(!report.passed());
    }

    #[test]
    fn invalid_rules_rejected() {
        let dom = Domain::Sphere { dim: 1 };
        assert!(CubatureRule::new(dom, 0, vec![], vec![]).is_err());
        assert!(CubatureRule::new(dom, 0, vec![1.0, 0.0], vec![-1.0]).is_err());
        assert!(CubatureRule::new(dom, 0, vec![0.5, 0.0], vec![1.0]).is_err());
        assert!(CubatureRule::new(dom, 0, vec![1.0], vec![1.0]).is_err());
        let b = Domain::WeightedBall(ball(2, 1));
        assert!(CubatureRule::new(b, 0, vec![0.9, 0.9], vec![1.0]).is_err());
    }

    #[test]
    fn recorded_symmetries_hold() {
        let rules = [
            circle_rule(6),
            circle_rule(7),
            ball_rule(ball(1, 3), 8).unwrap(),
            ball_rule(ball(2, 1), 8).unwrap(),
            ball_rule(ball(3, 1), 8).unwrap(),
            sphere_rule(2, 9).unwrap(),
            sphere_rule(3, 4).unwrap(),
            axial_sphere_rule(3, 5).unwrap(),
        ];
        for r in &rules {
            assert!(r.symmetry().holds_for(r), "{:?} on {}", r.symmetry(), r.domain());
        }
        assert!(rules[3].symmetry().last_plane_rotation == 9);
        // a false claim is caught
        let claim = Symmetry { last_plane_rotation: 4, ..Symmetry::NONE };
        assert!(!claim.holds_for(&circle_rule(6)));
        let claim = Symmetry { first_axis_reflection: true, ..Symmetry::NONE };
        assert!(!claim.holds_for(&circle_rule(6)));
    }

    #[test]
    fn text_roundtrip() {
        let r = ball_rule(ball(2, 3), 5).unwrap();
        let mut buf = Vec::new();
        r.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("ball 2 3 5 {}\n", r.len())));
        let back = CubatureRule::read_text(&buf[..]).unwrap();
        assert_eq!(back.domain(), r.domain());
        assert_eq!(back.degree(), r.degree());
        for (a, b) in back.nodes().flatten().zip(r.nodes().flatten()) {
            assert_eq!(a, b);
        }
        assert_eq!(back.weights(), r.weights());

        let s = sphere_rule(2, 3).unwrap();
        let mut buf = Vec::new();
        s.write_text(&mut buf).unwrap();
        let back = CubatureRule::read_text(&buf[..]).unwrap();
        assert_eq!(back.weights(), s.weights());
    }

    #[test]
    fn text_header_with_commas_and_errors() {
        let text = "ball, 1, 1, 1, 1\n0.0 2.0\n";
        let r = CubatureRule::read_text(text.as_bytes()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(CubatureRule::read_text("ball 1 1 1 2\n0.0 2.0\n".as_bytes()).is_err());
        assert!(CubatureRule::read_text("cube 1 1 1 1\n0.0 2.0\n".as_bytes()).is_err());
        assert!(CubatureRule::read_text("ball 1 1 1 1\n0.0 x\n".as_bytes()).is_err());
        assert!(CubatureRule::read_text("".as_bytes()).is_err());
    }
}
