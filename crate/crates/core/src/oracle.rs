//! Independent ground truth for the rest of the crate.
//!
//! Two kinds of oracle live here:
//!
//! - exact monomial integrals over spheres `S^dim` and Gegenbauer-weighted balls,
//!   from Gamma-function identities;
//! - orthonormal polynomial bases built by modified Gram–Schmidt over products of
//!   Legendre polynomials, with inner products taken from those exact integrals. Summing
//!   `p(x) p(y)` over a basis slice gives reproducing kernels that share no code
//!   with the zonal and sphere-lift kernels in [`crate::kernels`].
//!
//! Dot products use Neumaier-compensated summation so the oracle stays tighter
//! than the tolerances it is used to check.

use std::collections::HashMap;

use crate::cubature::{BallWeight, Domain};
use crate::special;
use crate::{Error, Result};

/// Largest basis degree [`build_onb`] accepts.
pub const MAX_ONB_DEGREE: usize = 8;
/// Largest number of ambient variables [`build_onb`] accepts.
pub const MAX_ONB_VARIABLES: usize = 4;
/// Residual-norm ratio below which a Gram–Schmidt candidate counts as dependent.
const DEPENDENCE_RATIO: f64 = 1e-8;
/// Required closeness of the computed Gram matrix to the identity.
pub const GRAM_TOLERANCE: f64 = 1e-10;

/// Exponent vector of a monomial `x^β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|β|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `x^β`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }

    /// Componentwise sum, the exponent of a product of monomials.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices in `vars` variables of total degree ≤ `max_degree`, in graded
/// lexicographic order: by degree, then lexicographically descending
/// (`x₁²`, `x₁x₂`, `x₂²`, ...).
pub fn graded_multi_indices(vars: usize, max_degree: usize) -> Vec<MultiIndex> {
    fn fill(rest: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if slot + 1 == current.len() {
            current[slot] = rest;
            out.push(MultiIndex(current.clone()));
            return;
        }
        for e in (0..=rest).rev() {
            current[slot] = e;
            fill(rest - e, slot + 1, current, out);
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        return out;
    }
    let mut current = vec![0; vars];
    for degree in 0..=max_degree as u32 {
        fill(degree, 0, &mut current, &mut out);
    }
    out
}

/// `∫_{S^dim} y^β dω(y)`: zero if any exponent is odd, otherwise
/// `2 Π_j Γ((β_j+1)/2) / Γ((|β|+dim+1)/2)`. `dim = 0` is the two-point sphere `{±1}`.
pub fn monomial_sphere_integral(beta: &MultiIndex, dim: usize) -> Result<f64> {
    if beta.len() != dim + 1 {
        return Err(Error::LengthMismatch {
            expected: dim + 1,
            got: beta.len(),
        });
    }
    if beta.0.iter().any(|e| e % 2 == 1) {
        return Ok(0.0);
    }
    // Π_{j≥2} B(h_1+…+h_{j-1}, h_j) telescopes to Π Γ(h_j) / Γ(Σ h_j).
    let mut value = 2.0;
    let mut acc = 0.0;
    for &e in &beta.0 {
        let h = (e as f64 + 1.0) / 2.0;
        if acc > 0.0 {
            value *= special::beta(acc, h);
        }
        acc += h;
    }
    Ok(value)
}

/// `∫_{B^d} x^β w_μ(x) dx` by polar coordinates: the radial Beta integral
/// `½ B((|β|+d)/2, μ+1/2)` times the angular integral over `S^{d-1}`.
pub fn monomial_ball_integral(beta: &MultiIndex, w: BallWeight) -> Result<f64> {
    let d = w.d();
    if beta.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: beta.len(),
        });
    }
    let angular = monomial_sphere_integral(beta, d - 1)?;
    if angular == 0.0 {
        return Ok(0.0);
    }
    let radial = 0.5 * special::beta((beta.degree() as f64 + d as f64) / 2.0, w.mu() + 0.5);
    Ok(radial * angular)
}

/// The same ball integral recovered from `S^{d+m}`: padding `β` with `m+1` zeros and
/// integrating over the sphere gives `|S^m|` times the weighted ball integral.
pub fn monomial_ball_integral_via_sphere(beta: &MultiIndex, w: BallWeight) -> Result<f64> {
    let (d, m) = (w.d(), w.m());
    if beta.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: beta.len(),
        });
    }
    let mut padded = beta.0.clone();
    padded.resize(d + m + 1, 0);
    let sphere = monomial_sphere_integral(&MultiIndex(padded), d + m)?;
    Ok(sphere / special::sphere_area(m))
}

/// Exact integral of `x^β` against the measure of `domain`.
pub fn monomial_integral(beta: &MultiIndex, domain: Domain) -> Result<f64> {
    match domain {
        Domain::Sphere { dim } => monomial_sphere_integral(beta, dim),
        Domain::WeightedBall(w) => monomial_ball_integral(beta, w),
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Orthonormal polynomial basis of `Π_degree` restricted to a domain, split by degree.
///
/// Element `j` is a coefficient vector over [`OrthonormalBasis::monomials`]; the
/// elements of degree `k` span the orthogonal complement of `Π_{k-1}` in `Π_k`
/// (spherical harmonics of degree `k` when the domain is a sphere).
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    domain: Domain,
    degree: usize,
    monomials: Vec<MultiIndex>,
    elements: Vec<Vec<f64>>,
    element_degrees: Vec<usize>,
    gram_deviation: f64,
}

impl OrthonormalBasis {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn elements(&self) -> &[Vec<f64>] {
        &self.elements
    }

    pub fn element_degrees(&self) -> &[usize] {
        &self.element_degrees
    }

    /// Tolerance the Gram matrix was checked against.
    pub fn gram_tolerance(&self) -> f64 {
        GRAM_TOLERANCE
    }

    /// Largest observed `|⟨p_i, p_j⟩ - δ_ij|`.
    pub fn gram_deviation(&self) -> f64 {
        self.gram_deviation
    }

    /// Number of basis elements of each degree `0..=degree`.
    pub fn subspace_dimensions(&self) -> Vec<usize> {
        let mut dims = vec![0; self.degree + 1];
        for &k in &self.element_degrees {
            dims[k] += 1;
        }
        dims
    }

    /// Values of all graded monomials at `x`.
    pub fn monomial_values(&self, x: &[f64]) -> Vec<f64> {
        self.monomials.iter().map(|b| b.eval(x)).collect()
    }

    /// Values of every basis element at `x`.
    pub fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        let mv = self.monomial_values(x);
        self.elements.iter().map(|c| dot(c, &mv)).collect()
    }

    /// `p_j(x)`.
    pub fn eval(&self, j: usize, x: &[f64]) -> f64 {
        dot(&self.elements[j], &self.monomial_values(x))
    }

    /// `Σ_j p_j(x) p_j(y)` over the degree-`n` slice: the projection kernel onto
    /// orthogonal polynomials of degree exactly `n`.
    pub fn onb_kernel(&self, n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
        self.kernel_where(n, x, y, |k| k == n)
    }

    /// `Σ_{k ≤ n}` of [`OrthonormalBasis::onb_kernel`]: the reproducing kernel of `Π_n`.
    pub fn onb_kernel_upto(&self, n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
        self.kernel_where(n, x, y, |k| k <= n)
    }

    fn kernel_where(&self, n: usize, x: &[f64], y: &[f64], keep: impl Fn(usize) -> bool) -> Result<f64> {
        if n > self.degree {
            return Err(Error::InvalidParameter(format!(
                "kernel degree {n} exceeds basis degree {}",
                self.degree
            )));
        }
        let vars = self.domain.ambient_dim();
        for p in [x, y] {
            if p.len() != vars {
                return Err(Error::LengthMismatch {
                    expected: vars,
                    got: p.len(),
                });
            }
        }
        let px = self.eval_all(x);
        let py = self.eval_all(y);
        Ok(compensated_sum(
            self.element_degrees
                .iter()
                .enumerate()
                .filter(|(_, &k)| keep(k))
                .map(|(j, _)| px[j] * py[j]),
        ))
    }

    /// `⟨p, q⟩` for coefficient vectors over the graded monomials, by exact integrals.
    pub fn inner_product(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        let mut terms = Vec::with_capacity(p.len() * q.len());
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, &qj) in q.iter().enumerate() {
                if qj == 0.0 {
                    continue;
                }
                let beta = self.monomials[i].add(&self.monomials[j]);
                terms.push(pi * qj * monomial_integral(&beta, self.domain)?);
            }
        }
        Ok(compensated_sum(terms))
    }
}

/// Monomial coefficients of the Legendre polynomial `P_k`, index = power.
fn legendre_coefficients(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for j in 1..k {
        // (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}
        let mut next = vec![0.0; j + 2];
        for (p, &c) in cur.iter().enumerate() {
            next[p + 1] += (2 * j + 1) as f64 * c;
        }
        for (p, &c) in prev.iter().enumerate() {
            next[p] -= j as f64 * c;
        }
        for c in &mut next {
            *c /= (j + 1) as f64;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Orthonormal basis of `Π_degree` on `domain` by modified Gram–Schmidt (one
/// re-orthogonalisation pass), with inner products from exact monomial integrals.
///
/// Candidates are products `Π_i P_{β_i}(x_i)` of Legendre polynomials in graded order,
/// which keeps the Gram matrix far better conditioned than raw monomials. On spheres
/// only `β_1 ≤ 1` is used, since `y_1² = 1 - Σ_{i>1} y_i²` there; any remaining
/// dependent candidate is dropped. On balls a dependent candidate means the Gram
/// matrix is numerically singular, which is reported as an error.
pub fn build_onb(domain: Domain, degree: usize) -> Result<OrthonormalBasis> {
    let vars = domain.ambient_dim();
    if degree > MAX_ONB_DEGREE || vars > MAX_ONB_VARIABLES {
        return Err(Error::InvalidParameter(format!(
            "orthonormal basis limited to degree ≤ {MAX_ONB_DEGREE} and ≤ {MAX_ONB_VARIABLES} variables \
             (asked for degree {degree} in {vars} variables)"
        )));
    }
    let monomials = graded_multi_indices(vars, degree);
    let size = monomials.len();
    let position: HashMap<&MultiIndex, usize> = monomials.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let dropping = matches!(domain, Domain::Sphere { .. });

    let legendre: Vec<Vec<f64>> = (0..=degree).map(legendre_coefficients).collect();
    // sparse monomial expansions of the candidates
    let candidates: Vec<(usize, Vec<(usize, f64)>)> = monomials
        .iter()
        .enumerate()
        .filter(|(_, b)| !dropping || b.exponents()[0] <= 1)
        .map(|(k, b)| {
            let mut terms: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
            for &e in b.exponents() {
                let coeffs = &legendre[e as usize];
                terms = terms
                    .into_iter()
                    .flat_map(|(powers, c)| {
                        coeffs.iter().enumerate().filter(|(_, &a)| a != 0.0).map(move |(p, &a)| {
                            let mut powers = powers.clone();
                            powers.push(p as u32);
                            (powers, c * a)
                        })
                    })
                    .collect();
            }
            let sparse = terms
                .into_iter()
                .map(|(powers, c)| (position[&MultiIndex::new(powers)], c))
                .collect();
            (k, sparse)
        })
        .collect();

    let mut moments = vec![0.0; size * size];
    for i in 0..size {
        for j in i..size {
            let v = monomial_integral(&monomials[i].add(&monomials[j]), domain)?;
            moments[i * size + j] = v;
            moments[j * size + i] = v;
        }
    }
    let count = candidates.len();
    let mut gram = vec![0.0; count * count];
    for i in 0..count {
        for j in i..count {
            let v = compensated_sum(candidates[i].1.iter().flat_map(|&(a, ca)| {
                let moments = &moments;
                candidates[j].1.iter().map(move |&(b, cb)| ca * cb * moments[a * size + b])
            }));
            gram[i * count + j] = v;
            gram[j * count + i] = v;
        }
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..count)
            .map(|i| dot(&gram[i * count..(i + 1) * count], v))
            .collect()
    };

    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut element_degrees = Vec::new();

    for k in 0..count {
        let mut v = vec![0.0; count];
        v[k] = 1.0;
        for _pass in 0..2 {
            for (q, gq) in coords.iter().zip(&images) {
                let c = dot(gq, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let gv = apply(&v);
        let norm_sq = dot(&v, &gv);
        let ratio = (norm_sq.max(0.0) / gram[k * count + k]).sqrt();
        let index = candidates[k].0;
        if ratio < DEPENDENCE_RATIO {
            if dropping {
                continue;
            }
            return Err(Error::SingularGram { index, ratio });
        }
        let norm = norm_sq.sqrt();
        coords.push(v.iter().map(|x| x / norm).collect());
        images.push(gv.iter().map(|x| x / norm).collect());
        element_degrees.push(monomials[index].degree() as usize);
    }

    let mut deviation = 0.0f64;
    for (i, gq) in images.iter().enumerate() {
        for (j, q) in coords.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((dot(gq, q) - target).abs());
        }
    }
    if deviation > GRAM_TOLERANCE {
        return Err(Error::GramCheck { deviation });
    }

    let elements = coords
        .iter()
        .map(|q| {
            let mut c = vec![0.0; size];
            for (&qk, (_, sparse)) in q.iter().zip(&candidates) {
                for &(a, ca) in sparse {
                    c[a] += qk * ca;
                }
            }
            c
        })
        .collect();

    Ok(OrthonormalBasis {
        domain,
        degree,
        monomials,
        elements,
        element_degrees,
        gram_deviation: deviation,
    })
}
