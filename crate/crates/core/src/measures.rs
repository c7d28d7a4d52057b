//! Probability measures over a finite action set.
//!
//! Actions are indexed from zero inside the library. Every comparison goes
//! through a [`Tolerance`]; nothing downstream compares weights bitwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for simplex validation, equalities and ties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 {
            Ok(Self(eps))
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT_EPS)
    }
}

/// A point on the probability simplex: the population measure, the
/// rational-only measure, or an influence measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Measure {
    weights: Vec<f64>,
}

impl Measure {
    /// Validates `weights` within `tol` and clamps them into `[0, 1]`.
    pub fn new(weights: Vec<f64>, tol: Tolerance) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let eps = tol.eps();
        let sum: f64 = weights.iter().sum();
        let in_range = weights
            .iter()
            .all(|w| w.is_finite() && *w >= -eps && *w <= 1.0 + eps);
        if !in_range || (sum - 1.0).abs() > eps {
            return Err(Error::NotASimplexPoint { weights, sum });
        }
        let weights = weights.into_iter().map(|w| w.clamp(0.0, 1.0)).collect();
        Ok(Self { weights })
    }

    /// The point mass on `action`.
    pub fn vertex(n: usize, action: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[action] = 1.0;
        Self { weights }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Max-norm distance to another measure of the same size.
    pub fn distance(&self, other: &Measure) -> f64 {
        max_norm(&self.weights, &other.weights)
    }

    /// `alpha * self + (1 - alpha) * delta_k`.
    pub fn mix_with_vertex(&self, alpha: f64, k: usize) -> Measure {
        let mut weights: Vec<f64> = self.weights.iter().map(|w| alpha * w).collect();
        weights[k] += 1.0 - alpha;
        Measure { weights }
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w:.6}")?;
        }
        write!(f, ")")
    }
}

pub fn make_measure(weights: Vec<f64>, tol: Tolerance) -> Result<Measure> {
    Measure::new(weights, tol)
}

/// Actions carrying mass strictly above `eps`.
pub fn support(mu: &Measure, tol: Tolerance) -> Vec<usize> {
    mu.weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > tol.eps())
        .map(|(i, _)| i)
        .collect()
}

/// The actions whose mass is within `eps` of the maximum.
pub fn argmax_set(values: &[f64], tol: Tolerance) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v >= max - tol.eps())
        .map(|(i, _)| i)
        .collect()
}

/// Majority action with ties resolved to the smallest index.
pub fn herding_choice(mu: &Measure, tol: Tolerance) -> usize {
    argmax_set(&mu.weights, tol)[0]
}

pub(crate) fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn m(w: &[f64]) -> Measure {
        Measure::new(w.to_vec(), tol()).unwrap()
    }

    #[test]
    fn make_measure_examples() {
        assert_eq!(m(&[0.5, 0.5]).n(), 2);
        assert_eq!(m(&[1.0, 0.0, 0.0]).weights(), &[1.0, 0.0, 0.0]);
        assert!(matches!(
            make_measure(vec![0.3, 0.9], tol()),
            Err(Error::NotASimplexPoint { .. })
        ));
        assert!(matches!(make_measure(vec![], tol()), Err(Error::EmptyMeasure)));
        assert!(make_measure(vec![1.2, -0.2], tol()).is_err());
    }

    #[test]
    fn clamps_within_tolerance() {
        let mu = m(&[1.0 + 5e-10, -5e-10]);
        assert_eq!(mu.weights(), &[1.0, 0.0]);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(support(&m(&[0.5, 0.5, 0.0]), tol()), vec![0, 1]);
        assert_eq!(support(&m(&[1.0, 0.0]), tol()), vec![0]);
        assert_eq!(support(&m(&[0.3, 0.7, 0.0]), tol()), vec![0, 1]);
    }

    #[test]
    fn herding_choice_examples() {
        assert_eq!(herding_choice(&m(&[0.2, 0.8]), tol()), 1);
        assert_eq!(herding_choice(&m(&[0.5, 0.5]), tol()), 0);
        assert_eq!(herding_choice(&m(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]), tol()), 0);
    }

    fn simplex(n: usize) -> impl Strategy<Value = Measure> {
        prop::collection::vec(0u32..6, n).prop_filter_map("nonzero", |raw| {
            let total: u32 = raw.iter().sum();
            (total > 0).then(|| {
                Measure::new(
                    raw.iter().map(|r| *r as f64 / total as f64).collect(),
                    Tolerance::default(),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn herding_choice_lies_in_nonempty_support(mu in (2usize..6).prop_flat_map(simplex)) {
            let s = support(&mu, tol());
            prop_assert!(!s.is_empty());
            prop_assert!(s.contains(&herding_choice(&mu, tol())));
        }

        #[test]
        fn herding_choice_is_permutation_covariant(
            (mu, perm) in (2usize..6).prop_flat_map(|n| {
                (simplex(n), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            })
        ) {
            // Relabel: new action perm[i] carries the mass of old action i.
            let mut permuted = vec![0.0; mu.n()];
            for (i, p) in perm.iter().enumerate() {
                permuted[*p] = mu.get(i);
            }
            let permuted = Measure::new(permuted, tol()).unwrap();
            let expected = argmax_set(mu.weights(), tol())
                .into_iter()
                .map(|i| perm[i])
                .min()
                .unwrap();
            prop_assert_eq!(herding_choice(&permuted, tol()), expected);
        }
    }
}
