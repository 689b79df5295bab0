#![allow(dead_code)]

use ballinterp::oracle::{graded_multi_indices, MultiIndex};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn unit_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point of the unit ball `B^d`.
pub fn ball_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let r = rng.gen::<f64>().powf(1.0 / d as f64);
    unit_vector(rng, d).into_iter().map(|x| r * x).collect()
}

/// Random polynomial of total degree ≤ `degree` as (monomial, coefficient) pairs.
pub struct Poly {
    pub terms: Vec<(MultiIndex, f64)>,
}

impl Poly {
    pub fn random(rng: &mut ChaCha8Rng, vars: usize, degree: usize) -> Self {
        let terms = graded_multi_indices(vars, degree)
            .into_iter()
            .map(|b| (b, rng.gen_range(-1.0..1.0)))
            .collect();
        Poly { terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(b, c)| c * b.eval(x)).sum()
    }

    /// Sum of |coefficient|, a bound on |p| over the unit ball.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).sum()
    }
}
