//! Exact enumeration of classical equilibria and of the social optimum.
//!
//! Both reduce to linear systems over each support because utilities are
//! affine in the population measure. Supports are visited by size and then
//! lexicographically, so every result is deterministic.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::linalg::{solve_affine, AffineSolution};
use crate::measures::{argmax_set, max_norm, Measure, Tolerance};

/// Herding action `k` together with the rational measure it induces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HerdingAnnotation {
    pub action: usize,
    pub mu_r: Measure,
}

/// One isolated equilibrium, annotated with every valid herding action
/// (empty for classical equilibria).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub mu: Measure,
    pub herding: Vec<HerdingAnnotation>,
}

impl EquilibriumPoint {
    pub fn classical(mu: Measure) -> Self {
        Self {
            mu,
            herding: Vec::new(),
        }
    }

    pub fn herding_actions(&self) -> Vec<usize> {
        self.herding.iter().map(|h| h.action).collect()
    }
}

/// Segment of equilibria `base + t * direction`, `t` in `t_range`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumFamily {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub t_range: (f64, f64),
    /// Herding action the family was constructed under, if any.
    pub herding_action: Option<usize>,
}

impl EquilibriumFamily {
    pub fn at(&self, t: f64) -> Vec<f64> {
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(b, d)| (b + t * d).clamp(0.0, 1.0))
            .collect()
    }

    pub fn endpoints(&self) -> (Vec<f64>, Vec<f64>) {
        (self.at(self.t_range.0), self.at(self.t_range.1))
    }

    /// Max-norm distance from `w` to the segment.
    pub fn distance(&self, w: &[f64]) -> f64 {
        let (lo, hi) = self.t_range;
        let diff: Vec<f64> = w.iter().zip(&self.base).map(|(x, b)| x - b).collect();
        let dd: f64 = self.direction.iter().map(|d| d * d).sum();
        let t = if dd > 0.0 {
            (diff.iter().zip(&self.direction).map(|(x, d)| x * d).sum::<f64>() / dd).clamp(lo, hi)
        } else {
            lo
        };
        max_norm(w, &self.at(t))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub points: Vec<EquilibriumPoint>,
    pub families: Vec<EquilibriumFamily>,
}

impl EquilibriumSet {
    pub fn measures(&self) -> Vec<&Measure> {
        self.points.iter().map(|p| &p.mu).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.families.is_empty()
    }

    pub fn find(&self, w: &[f64], tol: Tolerance) -> Option<&EquilibriumPoint> {
        self.points
            .iter()
            .find(|p| max_norm(p.mu.weights(), w) <= tol.eps())
    }

    /// Whether `w` is one of the points or lies on a family, within `tol`.
    pub fn contains(&self, w: &[f64], tol: Tolerance) -> bool {
        self.find(w, tol).is_some() || self.families.iter().any(|f| f.distance(w) <= tol.eps())
    }

    /// Adds a point, merging herding annotations into an existing point
    /// within `tol`.
    pub(crate) fn insert(&mut self, point: EquilibriumPoint, tol: Tolerance) {
        if let Some(existing) = self
            .points
            .iter_mut()
            .find(|p| p.mu.distance(&point.mu) <= tol.eps())
        {
            for h in point.herding {
                if !existing.herding.iter().any(|e| e.action == h.action) {
                    existing.herding.push(h);
                }
            }
            existing.herding.sort_by_key(|h| h.action);
            return;
        }
        self.points.push(point);
    }

    /// Sorts points lexicographically by weights and absorbs points lying on
    /// a family.
    pub(crate) fn finish(&mut self, tol: Tolerance) {
        let families = self.families.clone();
        self.points
            .retain(|p| !families.iter().any(|f| f.distance(p.mu.weights()) <= tol.eps()));
        self.points
            .sort_by(|a, b| lexicographic(a.mu.weights(), b.mu.weights()));
        self.families.sort_by(|a, b| lexicographic(&a.base, &b.base));
    }
}

pub(crate) fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Nonempty subsets of `items`, ordered by size and then lexicographically.
pub(crate) fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let k = items.len();
    let mut out: Vec<Vec<usize>> = (1u64..(1u64 << k))
        .map(|mask| {
            (0..k)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| items[b])
                .collect()
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Outcome of solving the indifference system on one support.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum FaceOutcome {
    Point(Vec<f64>),
    Family { base: Vec<f64>, direction: Vec<f64>, t_range: (f64, f64) },
}

/// Indifference system on a support: the free actions `free` share
/// `total` mass on top of the fixed vector `fixed`, and every free action
/// earns the same utility.
pub(crate) struct IndifferenceSystem<'a> {
    pub game: &'a GameSpec,
    pub fixed: Vec<f64>,
    pub free: &'a [usize],
    pub total: f64,
}

impl IndifferenceSystem<'_> {
    fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut w = self.fixed.clone();
        for (v, &i) in x.iter().zip(self.free) {
            w[i] += v;
        }
        w
    }

    fn embed_direction(&self, x: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.fixed.len()];
        for (v, &i) in x.iter().zip(self.free) {
            w[i] = *v;
        }
        w
    }

    fn linear_system(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let u = self.game.utility_form();
        let s0 = self.free[0];
        let mut a = Vec::with_capacity(self.free.len());
        let mut rhs = Vec::with_capacity(self.free.len());
        for &i in &self.free[1..] {
            a.push(self.free.iter().map(|&j| u.m[i][j] - u.m[s0][j]).collect());
            let fixed_part: f64 = self
                .fixed
                .iter()
                .enumerate()
                .map(|(j, f)| (u.m[i][j] - u.m[s0][j]) * f)
                .sum();
            rhs.push(-(u.b[i] - u.b[s0] + fixed_part));
        }
        a.push(vec![1.0; self.free.len()]);
        rhs.push(self.total);
        (a, rhs)
    }

    /// Solves the system and keeps the part satisfying `constraints`, an
    /// affine map from the full measure to values that must all be
    /// `>= -eps`. Free masses must additionally be strictly positive.
    pub(crate) fn solve<F>(&self, constraints: F, tol: Tolerance) -> Result<Option<FaceOutcome>>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let eps = tol.eps();
        let (a, rhs) = self.linear_system();
        let (base, null_basis) = match solve_affine(&a, &rhs) {
            AffineSolution::Inconsistent => return Ok(None),
            AffineSolution::Affine { base, null_basis } => (base, null_basis),
        };
        match null_basis.len() {
            0 => {
                if base.iter().any(|x| *x <= eps) {
                    return Ok(None);
                }
                let w = self.embed(&base);
                Ok(constraints(&w).iter().all(|c| *c >= -eps).then_some(FaceOutcome::Point(w)))
            }
            1 => self.clip_segment(&base, &null_basis[0], constraints, tol),
            nullity => {
                if self.has_positive_interior(&base, &null_basis, eps) {
                    Err(Error::DegenerateGame {
                        support: self.free.to_vec(),
                        nullity,
                    })
                } else {
                    Ok(None)
                }
            }
        }
    }

    fn clip_segment<F>(
        &self,
        base: &[f64],
        dir: &[f64],
        constraints: F,
        tol: Tolerance,
    ) -> Result<Option<FaceOutcome>>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let eps = tol.eps();
        let scale = dir.iter().fold(0.0_f64, |a, d| a.max(d.abs()));
        let dir: Vec<f64> = dir.iter().map(|d| d / scale).collect();
        let w0 = self.embed(base);
        let dw = self.embed_direction(&dir);
        let w1: Vec<f64> = w0.iter().zip(&dw).map(|(a, b)| a + b).collect();

        // Free masses must be nonnegative; everything else comes from the caller.
        let mut values0: Vec<f64> = base.to_vec();
        let mut slopes: Vec<f64> = dir.clone();
        let c0 = constraints(&w0);
        let c1 = constraints(&w1);
        values0.extend(&c0);
        slopes.extend(c1.iter().zip(&c0).map(|(b, a)| b - a));

        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (v, s) in values0.iter().zip(&slopes) {
            if s.abs() <= 1e-12 {
                if *v < -eps {
                    return Ok(None);
                }
            } else if *s > 0.0 {
                lo = lo.max((-eps - v) / s);
            } else {
                hi = hi.min((-eps - v) / s);
            }
        }
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Ok(None);
        }
        // Snap the tolerance slack back onto the exact boundary.
        let snap = |t: f64| {
            values0
                .iter()
                .zip(&slopes)
                .filter(|(_, s)| s.abs() > 1e-12)
                .map(|(v, s)| -v / s)
                .find(|root| (root - t).abs() <= 2.0 * eps / 1e-12_f64.max(1.0))
                .unwrap_or(t)
        };
        let (lo, hi) = (snap(lo).max(lo - eps), snap(hi).min(hi + eps));
        let at = |t: f64| -> Vec<f64> { w0.iter().zip(&dw).map(|(a, b)| a + t * b).collect() };

        // Every free action must carry mass somewhere on the segment,
        // otherwise the solution belongs to a smaller support.
        let (wlo, whi) = (at(lo), at(hi));
        if self.free.iter().any(|&i| wlo[i].max(whi[i]) <= eps) {
            return Ok(None);
        }
        if hi - lo <= eps {
            let w = at(0.5 * (lo + hi));
            if self.free.iter().any(|&i| w[i] <= eps) {
                return Ok(None);
            }
            return Ok(Some(FaceOutcome::Point(w)));
        }
        let direction: Vec<f64> = whi.iter().zip(&wlo).map(|(b, a)| b - a).collect();
        Ok(Some(FaceOutcome::Family {
            base: wlo,
            direction,
            t_range: (0.0, 1.0),
        }))
    }

    /// Whether `{base + N t}` contains a point with every free mass
    /// strictly positive: true iff each coordinate is positive at some
    /// vertex of the (bounded) nonnegativity polytope.
    fn has_positive_interior(&self, base: &[f64], null_basis: &[Vec<f64>], eps: f64) -> bool {
        let d = null_basis.len();
        let p = base.len();
        let mut positive = vec![false; p];
        let idx: Vec<usize> = (0..p).collect();
        for zeros in subsets(&idx).into_iter().filter(|s| s.len() == d) {
            let a: Vec<Vec<f64>> = zeros
                .iter()
                .map(|&i| null_basis.iter().map(|v| v[i]).collect())
                .collect();
            let rhs: Vec<f64> = zeros.iter().map(|&i| -base[i]).collect();
            let AffineSolution::Affine { base: t, null_basis: nb } = solve_affine(&a, &rhs) else {
                continue;
            };
            if !nb.is_empty() {
                continue;
            }
            let x: Vec<f64> = (0..p)
                .map(|i| base[i] + (0..d).map(|k| t[k] * null_basis[k][i]).sum::<f64>())
                .collect();
            if x.iter().all(|v| *v >= -eps) {
                for (flag, v) in positive.iter_mut().zip(&x) {
                    *flag |= *v > eps;
                }
            }
        }
        positive.iter().all(|f| *f)
    }
}

/// Classical mean-field equilibria: every `mu` whose support lies in the
/// best-response set of `u(., mu)`.
pub fn classical_equilibria(g: &GameSpec, tol: Tolerance) -> Result<EquilibriumSet> {
    let n = g.n();
    let actions: Vec<usize> = (0..n).collect();
    let mut set = EquilibriumSet::default();
    for s in subsets(&actions) {
        let system = IndifferenceSystem {
            game: g,
            fixed: vec![0.0; n],
            free: &s,
            total: 1.0,
        };
        let s0 = s[0];
        let best_response = |w: &[f64]| {
            let u = g.utilities_raw(w);
            (0..n).map(|m| u[s0] - u[m]).collect::<Vec<_>>()
        };
        match system.solve(best_response, tol)? {
            None => {}
            Some(FaceOutcome::Point(w)) => {
                set.insert(EquilibriumPoint::classical(Measure::new(w, tol)?), tol)
            }
            Some(FaceOutcome::Family {
                base,
                direction,
                t_range,
            }) => set.families.push(EquilibriumFamily {
                base,
                direction,
                t_range,
                herding_action: None,
            }),
        }
    }
    set.finish(tol);
    Ok(set)
}

/// Re-checks the fixed point directly: support within the best responses.
pub fn is_classical_equilibrium(g: &GameSpec, mu: &Measure, tol: Tolerance) -> bool {
    let u = g.utilities_raw(mu.weights());
    let best = argmax_set(&u, tol);
    crate::measures::support(mu, tol)
        .iter()
        .all(|i| best.contains(i))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocialOptimum {
    pub argmax: Measure,
    pub value: f64,
}

/// Maximizes the quadratic social utility over the simplex by enumerating
/// faces and solving each face's stationarity system.
pub fn social_optimum(g: &GameSpec, tol: Tolerance) -> Result<SocialOptimum> {
    let n = g.n();
    let u = g.utility_form();
    let actions: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<f64>, f64)> = None;

    for s in subsets(&actions) {
        let k = s.len();
        // Unknowns: x_S then the multiplier.
        let mut a: Vec<Vec<f64>> = s
            .iter()
            .map(|&i| {
                let mut row: Vec<f64> = s.iter().map(|&j| u.m[i][j] + u.m[j][i]).collect();
                row.push(-1.0);
                row
            })
            .collect();
        let mut rhs: Vec<f64> = s.iter().map(|&i| -u.b[i]).collect();
        let mut sum_row = vec![1.0; k];
        sum_row.push(0.0);
        a.push(sum_row);
        rhs.push(1.0);

        let AffineSolution::Affine { base, null_basis } = solve_affine(&a, &rhs) else {
            continue;
        };
        if !null_basis.is_empty() {
            // Along a null direction d of the stationarity system the
            // objective has curvature d'Md, which vanishes in exact
            // arithmetic; the face maximum then also sits on its boundary.
            for v in &null_basis {
                let mut d = vec![0.0; n];
                for (x, &i) in v.iter().zip(&s) {
                    d[i] = *x;
                }
                let curvature: f64 = (0..n)
                    .map(|i| d[i] * (0..n).map(|j| u.m[i][j] * d[j]).sum::<f64>())
                    .sum();
                if curvature.abs() > 1e-8 {
                    return Err(Error::DegenerateGame {
                        support: s.clone(),
                        nullity: null_basis.len(),
                    });
                }
            }
            continue;
        }
        if base[..k].iter().any(|x| *x < -tol.eps()) {
            continue;
        }
        let mut w = vec![0.0; n];
        for (x, &i) in base[..k].iter().zip(&s) {
            w[i] = x.max(0.0);
        }
        let value = g.social_utility_raw(&w);
        if best.as_ref().is_none_or(|(_, b)| value > b + tol.eps()) {
            best = Some((w, value));
        }
    }
    let (w, value) = best.expect("vertices are always candidates");
    Ok(SocialOptimum {
        argmax: Measure::new(w, tol)?,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{builtin, AffineUtility, BuiltinParams};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn weights(set: &EquilibriumSet) -> Vec<Vec<f64>> {
        set.points.iter().map(|p| p.mu.weights().to_vec()).collect()
    }

    fn assert_points(set: &EquilibriumSet, expected: &[&[f64]]) {
        let got = weights(set);
        assert_eq!(got.len(), expected.len(), "got {got:?}");
        for (g, e) in got.iter().zip(expected) {
            assert!(max_norm(g, e) <= 1e-9, "got {got:?}, expected {expected:?}");
        }
    }

    #[test]
    fn classical_examples() {
        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        assert_points(&classical_equilibria(&g, tol()).unwrap(), &[&[0.5, 0.5]]);
        let g = builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap();
        assert_points(&classical_equilibria(&g, tol()).unwrap(), &[&[0.0, 0.0, 1.0]]);
        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        assert_points(&classical_equilibria(&g, tol()).unwrap(), &[&[1.0, 0.0, 0.0]]);
    }

    #[test]
    fn bandwidth_classical_is_top_level_only() {
        for n in 2..=6 {
            let g = builtin(BuiltinParams::Bandwidth { n }).unwrap();
            let set = classical_equilibria(&g, tol()).unwrap();
            assert!(set.families.is_empty());
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            assert_points(&set, &[&e]);
        }
    }

    #[test]
    fn identical_actions_form_a_family() {
        let g = GameSpec::new(
            vec!["x".into(), "y".into(), "z".into()],
            AffineUtility {
                b: vec![1.0, 1.0, 0.0],
                m: vec![vec![0.0; 3]; 3],
            },
        )
        .unwrap();
        let set = classical_equilibria(&g, tol()).unwrap();
        assert!(set.points.is_empty(), "{:?}", set.points);
        assert_eq!(set.families.len(), 1);
        let (a, b) = set.families[0].endpoints();
        let mut ends = [a, b];
        ends.sort_by(|x, y| lexicographic(x, y));
        assert!(max_norm(&ends[0], &[0.0, 1.0, 0.0]) < 1e-9);
        assert!(max_norm(&ends[1], &[1.0, 0.0, 0.0]) < 1e-9);
        assert!(set.contains(&[0.3, 0.7, 0.0], tol()));
        assert!(!set.contains(&[0.3, 0.6, 0.1], tol()));
    }

    #[test]
    fn fully_flat_game_is_degenerate() {
        let g = GameSpec::new(
            vec!["x".into(), "y".into(), "z".into()],
            AffineUtility {
                b: vec![0.0; 3],
                m: vec![vec![0.0; 3]; 3],
            },
        )
        .unwrap();
        assert!(matches!(
            classical_equilibria(&g, tol()),
            Err(Error::DegenerateGame { nullity: 2, .. })
        ));
    }

    #[test]
    fn social_optimum_examples() {
        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        let opt = social_optimum(&g, tol()).unwrap();
        assert_abs_diff_eq!(opt.value, -1.25, epsilon = 1e-12);
        assert!(max_norm(opt.argmax.weights(), &[0.5, 0.5]) < 1e-12);

        let g = builtin(BuiltinParams::Bandwidth { n: 3 }).unwrap();
        let opt = social_optimum(&g, tol()).unwrap();
        assert_abs_diff_eq!(opt.value, 0.25, epsilon = 1e-12);
        assert!(max_norm(opt.argmax.weights(), &[0.0, 1.0, 0.0]) < 1e-12);

        let rho = 0.8;
        let g = builtin(BuiltinParams::Braess3 { rho }).unwrap();
        let opt = social_optimum(&g, tol()).unwrap();
        assert_abs_diff_eq!(opt.value, (1.0 - 4.0 * rho) / (2.0 * rho), epsilon = 1e-12);
        assert_abs_diff_eq!(opt.value, -1.375, epsilon = 1e-12);
    }

    #[test]
    fn braess3_optimum_regime_split() {
        for rho in [0.1, 0.3, 0.45, 0.5, 0.55, 0.7, 0.9] {
            let g = builtin(BuiltinParams::Braess3 { rho }).unwrap();
            let opt = social_optimum(&g, tol()).unwrap();
            let at_ab = max_norm(opt.argmax.weights(), &[0.0, 0.0, 1.0]) < 1e-9;
            assert_eq!(at_ab, rho <= 0.5, "rho = {rho}: {}", opt.argmax);
            let closed = if rho <= 0.5 {
                -2.0 * rho
            } else {
                (1.0 - 4.0 * rho) / (2.0 * rho)
            };
            assert_abs_diff_eq!(opt.value, closed, epsilon = 1e-12);
        }
    }

    fn random_game(rng: &mut ChaCha8Rng, n: usize) -> GameSpec {
        GameSpec::new(
            (0..n).map(|i| format!("a{i}")).collect(),
            AffineUtility {
                b: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                m: (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
            },
        )
        .unwrap()
    }

    fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let s: f64 = e.iter().sum();
        e.iter().map(|x| x / s).collect()
    }

    #[test]
    fn social_optimum_dominates_monte_carlo_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut games: Vec<GameSpec> = (0..10).map(|i| random_game(&mut rng, 2 + i % 4)).collect();
        games.push(builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap());
        games.push(builtin(BuiltinParams::Bandwidth { n: 4 }).unwrap());
        for g in &games {
            let opt = social_optimum(g, tol()).unwrap();
            for _ in 0..10_000 {
                let w = random_simplex(&mut rng, g.n());
                assert!(g.social_utility_raw(&w) <= opt.value + 1e-12);
            }
        }
    }

    #[test]
    fn random_classical_equilibria_pass_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..60 {
            let g = random_game(&mut rng, 2 + i % 4);
            let set = classical_equilibria(&g, tol()).unwrap();
            assert!(!set.points.is_empty(), "finite games always have an equilibrium");
            for p in &set.points {
                assert!(is_classical_equilibrium(&g, &p.mu, Tolerance::new(1e-8).unwrap()));
            }
        }
    }

    #[test]
    fn subsets_are_ordered() {
        assert_eq!(
            subsets(&[0, 1, 2]),
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
    }
}
