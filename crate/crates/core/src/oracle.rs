//! Brute-force verifier written against the equilibrium definition alone.
//!
//! Nothing here calls the solver: membership is re-derived directly, the
//! exact enumeration works in rational-measure coordinates with a dense LU
//! solve, and completeness is probed by scanning an augmented simplex grid.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alpharne::HerdingPolicy;
use crate::classical::{EquilibriumFamily, EquilibriumSet};
use crate::error::Result;
use crate::game::{AffineUtility, GameSpec};
use crate::measures::{max_norm, Tolerance};

/// Slack of the grid-scan membership test.
pub const SCAN_EPS: f64 = 1e-6;
/// Distance below which scanned points are merged and matched to claims.
pub const CLUSTER_RADIUS: f64 = 1e-3;

/// Anything that maps `(action, population weights)` to a utility.
pub trait UtilityOracle {
    fn n(&self) -> usize;
    fn utility(&self, i: usize, w: &[f64]) -> f64;
}

impl UtilityOracle for GameSpec {
    fn n(&self) -> usize {
        GameSpec::n(self)
    }

    fn utility(&self, i: usize, w: &[f64]) -> f64 {
        let u = self.utility_form();
        u.b[i] + u.m[i].iter().zip(w).map(|(m, x)| m * x).sum::<f64>()
    }
}

/// A black-box utility over `n` actions.
pub struct FnUtility<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(usize, &[f64]) -> f64> UtilityOracle for FnUtility<F> {
    fn n(&self) -> usize {
        self.n
    }

    fn utility(&self, i: usize, w: &[f64]) -> f64 {
        (self.f)(i, w)
    }
}

/// Checks the equilibrium definition for `(w, k)` with slack `eps`.
/// Returns the reason on failure.
pub fn check_definition<U: UtilityOracle + ?Sized>(
    game: &U,
    w: &[f64],
    k: usize,
    alpha: f64,
    policy: HerdingPolicy,
    eps: f64,
) -> std::result::Result<(), String> {
    let n = game.n();
    if w.len() != n || k >= n {
        return Err("shape mismatch".into());
    }
    if w.iter().any(|x| *x < -eps) || (w.iter().sum::<f64>() - 1.0).abs() > eps {
        return Err("not on the simplex".into());
    }
    let herd = 1.0 - alpha;
    if w[k] < herd - eps {
        return Err(format!("action {k} holds {} < {herd}", w[k]));
    }
    let utilities: Vec<f64> = (0..n).map(|i| game.utility(i, w)).collect();
    let top = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for i in 0..n {
        let rational_mass = (w[i] - if i == k { herd } else { 0.0 }) / alpha;
        if rational_mass > eps && utilities[i] < top - eps {
            return Err(format!("rational mass on non-best action {i}"));
        }
    }
    if alpha < 1.0 {
        let heaviest = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let majority: Vec<usize> = (0..n).filter(|&i| w[i] >= heaviest - eps).collect();
        let admitted = match policy {
            HerdingPolicy::StrictMajority => majority[0] == k,
            HerdingPolicy::DeclaredHerding => {
                majority.contains(&k)
                    || ((w[k] - herd).abs() <= eps && alpha <= 1.0 - 1.0 / n as f64 + eps)
            }
        };
        if !admitted {
            return Err(format!("herding on {k} not admitted"));
        }
    }
    Ok(())
}

fn passes_for_some_k<U: UtilityOracle + ?Sized>(
    game: &U,
    w: &[f64],
    alpha: f64,
    policy: HerdingPolicy,
    eps: f64,
) -> bool {
    (0..game.n()).any(|k| check_definition(game, w, k, alpha, policy, eps).is_ok())
}

fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n)).map(move |mask| (0..n).filter(|b| mask & (1 << b) != 0).collect())
}

/// Exact enumeration in rational-measure coordinates: for each herding
/// action and rational support, solve the indifference system directly.
/// Singular systems are skipped, so degenerate games are out of scope.
pub fn independent_enumeration(
    g: &GameSpec,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Vec<Vec<f64>> {
    let n = g.n();
    let eps = tol.eps();
    let u = g.utility_form();
    let herd = 1.0 - alpha;
    let herding_actions: Vec<usize> = if alpha < 1.0 { (0..n).collect() } else { vec![0] };
    let mut found: Vec<Vec<f64>> = Vec::new();

    for &k in &herding_actions {
        for s in nonempty_subsets(n) {
            let d = s.len();
            // u(i, mu) = b_i + (1 - alpha) M_ik + alpha sum_j M_ij x_j.
            let base = |i: usize| u.b[i] + herd * u.m[i][k];
            let mut a = DMatrix::<f64>::zeros(d, d);
            let mut rhs = DVector::<f64>::zeros(d);
            for (row, &i) in s.iter().enumerate().skip(1) {
                for (col, &j) in s.iter().enumerate() {
                    a[(row - 1, col)] = alpha * (u.m[i][j] - u.m[s[0]][j]);
                }
                rhs[row - 1] = base(s[0]) - base(i);
            }
            for col in 0..d {
                a[(d - 1, col)] = 1.0;
            }
            rhs[d - 1] = 1.0;

            let sv = a.clone().svd(false, false).singular_values;
            let (smin, smax) = sv.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
            if smin <= 1e-10 * smax.max(1.0) {
                continue;
            }
            let Some(x) = a.lu().solve(&rhs) else { continue };
            if x.iter().any(|v| *v <= eps) {
                continue;
            }
            let mut w = vec![0.0; n];
            for (v, &i) in x.iter().zip(&s) {
                w[i] += alpha * v;
            }
            w[k] += herd;
            if check_definition(g, &w, k, alpha, policy, eps).is_ok()
                && !found.iter().any(|f| max_norm(f, &w) <= eps)
            {
                found.push(w);
            }
        }
    }
    sort_points(&mut found);
    found
}

fn sort_points(points: &mut [Vec<f64>]) {
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Coordinate values scanned along each axis.
fn grid_values(n: usize, alpha: f64, grid: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    values.extend([0.0, alpha, 1.0 - alpha, 0.5, 1.0 / n as f64, 1.0]);
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    values
}

/// All augmented-grid points passing the relaxed definition for some
/// herding action, merged into clusters of radius [`CLUSTER_RADIUS`].
pub fn grid_scan<U: UtilityOracle + ?Sized>(
    game: &U,
    alpha: f64,
    policy: HerdingPolicy,
    grid: usize,
) -> Vec<Vec<f64>> {
    let n = game.n();
    let values = grid_values(n, alpha, grid);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    scan_prefix(game, alpha, policy, &values, &mut prefix, 0.0, &mut clusters);
    sort_points(&mut clusters);
    clusters
}

/// Fills the first `n - 1` coordinates from `values` depth-first; the last
/// coordinate takes the remaining mass.
fn scan_prefix<U: UtilityOracle + ?Sized>(
    game: &U,
    alpha: f64,
    policy: HerdingPolicy,
    values: &[f64],
    prefix: &mut Vec<f64>,
    mass: f64,
    clusters: &mut Vec<Vec<f64>>,
) {
    let n = game.n();
    if prefix.len() == n - 1 {
        let mut w = prefix.clone();
        w.push((1.0 - mass).max(0.0));
        if passes_for_some_k(game, &w, alpha, policy, SCAN_EPS)
            && !clusters.iter().any(|c| max_norm(c, &w) <= CLUSTER_RADIUS)
        {
            clusters.push(w);
        }
        return;
    }
    for &v in values.iter().take_while(|v| mass + **v <= 1.0 + 1e-12) {
        prefix.push(v);
        scan_prefix(game, alpha, policy, values, prefix, mass + v, clusters);
        prefix.pop();
    }
}

fn segment_distance(f: &EquilibriumFamily, w: &[f64]) -> f64 {
    let (lo, hi) = f.t_range;
    let point = |t: f64| -> Vec<f64> { f.base.iter().zip(&f.direction).map(|(b, d)| b + t * d).collect() };
    let dd: f64 = f.direction.iter().map(|d| d * d).sum();
    let t = if dd > 0.0 {
        let proj: f64 = w
            .iter()
            .zip(&f.base)
            .zip(&f.direction)
            .map(|((x, b), d)| (x - b) * d)
            .sum();
        (proj / dd).clamp(lo, hi)
    } else {
        lo
    };
    max_norm(w, &point(t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipFailure {
    pub weights: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub membership_failures: Vec<MembershipFailure>,
    pub completeness_suspects: Vec<Vec<f64>>,
    pub scanned_clusters: usize,
    pub agreement: bool,
}

/// Re-checks every claimed equilibrium and looks for scanned equilibria
/// the claim misses. `grid` must be at least 50.
pub fn verify_set(
    g: &GameSpec,
    alpha: f64,
    policy: HerdingPolicy,
    claimed: &EquilibriumSet,
    grid: usize,
    tol: Tolerance,
) -> Result<OracleReport> {
    let grid = grid.max(50);
    let eps = tol.eps();
    let recheck = |w: &[f64], ks: Vec<usize>| -> Option<MembershipFailure> {
        let ks = if ks.is_empty() { (0..g.n()).collect() } else { ks };
        let mut reasons = Vec::new();
        for k in ks {
            match check_definition(g, w, k, alpha, policy, eps) {
                Ok(()) if alpha >= 1.0 => return None,
                Ok(()) => {}
                Err(r) => reasons.push(format!("k={k}: {r}")),
            }
        }
        (!reasons.is_empty()).then(|| MembershipFailure {
            weights: w.to_vec(),
            reason: reasons.join("; "),
        })
    };
    let mut membership_failures = Vec::new();
    for p in &claimed.points {
        let ks: Vec<usize> = p.herding.iter().map(|h| h.action).collect();
        if alpha < 1.0 && ks.is_empty() {
            membership_failures.push(MembershipFailure {
                weights: p.mu.weights().to_vec(),
                reason: "no herding action recorded".into(),
            });
            continue;
        }
        let ks = if alpha >= 1.0 { Vec::new() } else { ks };
        membership_failures.extend(recheck(p.mu.weights(), ks));
    }
    for f in &claimed.families {
        let (lo, hi) = f.t_range;
        for t in [lo, 0.5 * (lo + hi), hi] {
            let w: Vec<f64> = f.base.iter().zip(&f.direction).map(|(b, d)| b + t * d).collect();
            membership_failures.extend(recheck(&w, f.herding_action.into_iter().collect()));
        }
    }

    let clusters = grid_scan(g, alpha, policy, grid);
    let completeness_suspects: Vec<Vec<f64>> = clusters
        .iter()
        .filter(|c| {
            !claimed.points.iter().any(|p| max_norm(p.mu.weights(), c) <= CLUSTER_RADIUS)
                && !claimed.families.iter().any(|f| segment_distance(f, c) <= CLUSTER_RADIUS)
        })
        .cloned()
        .collect();
    let agreement = membership_failures.is_empty() && completeness_suspects.is_empty();
    Ok(OracleReport {
        membership_failures,
        completeness_suspects,
        scanned_clusters: clusters.len(),
        agreement,
    })
}

/// Affine game with every entry uniform in `[-1, 1]`, reproducible from `seed`.
pub fn random_affine_game(n: usize, seed: u64) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let m = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let mut g = GameSpec::new((1..=n).map(|i| format!("a{i}")).collect(), AffineUtility { b, m })
        .expect("random games are well formed");
    g.name = Some(format!("random-{n}-{seed}"));
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpharne::alpha_rne_set;
    use crate::classical::EquilibriumPoint;
    use crate::game::{builtin, BuiltinParams};
    use crate::measures::Measure;

    const DECLARED: HerdingPolicy = HerdingPolicy::DeclaredHerding;
    const STRICT: HerdingPolicy = HerdingPolicy::StrictMajority;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn assert_clusters(got: &[Vec<f64>], expected: &[&[f64]]) {
        assert_eq!(got.len(), expected.len(), "got {got:?}");
        for e in expected {
            assert!(got.iter().any(|c| max_norm(c, e) <= CLUSTER_RADIUS), "missing {e:?} in {got:?}");
        }
    }

    #[test]
    fn grid_scan_examples() {
        let g = builtin(BuiltinParams::Braess3 { rho: 0.5 }).unwrap();
        assert_clusters(
            &grid_scan(&g, 0.5, DECLARED, 100),
            &[&[0.0, 0.0, 1.0], &[0.5, 0.0, 0.5], &[0.0, 0.5, 0.5]],
        );
        let g = builtin(BuiltinParams::Bandwidth { n: 3 }).unwrap();
        assert_clusters(
            &grid_scan(&g, 0.3, DECLARED, 100),
            &[&[1.0, 0.0, 0.0], &[0.3, 0.7, 0.0], &[0.3, 0.0, 0.7]],
        );
        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        assert_clusters(&grid_scan(&g, 0.8, DECLARED, 100), &[&[1.0, 0.0, 0.0]]);
    }

    #[test]
    fn black_box_utilities_scan() {
        // Non-affine congestion: each route costs its load squared.
        let game = FnUtility {
            n: 2,
            f: |i: usize, w: &[f64]| -w[i] * w[i],
        };
        assert_clusters(&grid_scan(&game, 1.0, DECLARED, 50), &[&[0.5, 0.5]]);
    }

    #[test]
    fn verify_examples() {
        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        let full = alpha_rne_set(&g, 0.4, DECLARED, tol()).unwrap();
        let report = verify_set(&g, 0.4, DECLARED, &full, 100, tol()).unwrap();
        assert!(report.agreement, "{report:?}");

        let mut partial = full.clone();
        partial.points.retain(|p| p.mu.get(0) < 0.5);
        let report = verify_set(&g, 0.4, DECLARED, &partial, 100, tol()).unwrap();
        assert!(!report.agreement);
        assert_eq!(report.completeness_suspects.len(), 1);
        assert!(max_norm(&report.completeness_suspects[0], &[0.6, 0.4]) < CLUSTER_RADIUS);

        let mut bogus = full;
        bogus.points.push(EquilibriumPoint {
            mu: Measure::new(vec![0.2, 0.8], tol()).unwrap(),
            herding: Vec::new(),
        });
        let report = verify_set(&g, 0.4, DECLARED, &bogus, 100, tol()).unwrap();
        assert_eq!(report.membership_failures.len(), 1);
    }

    #[test]
    fn definition_rejects_minority_herding() {
        let g = builtin(BuiltinParams::Braess3 { rho: 0.5 }).unwrap();
        let w = [0.4, 0.0, 0.6];
        assert!(check_definition(&g, &w, 0, 0.6, DECLARED, 1e-9).is_ok());
        assert!(check_definition(&g, &w, 0, 0.6, STRICT, 1e-9).is_err());
    }

    #[test]
    fn enumeration_matches_solver_on_random_games() {
        for seed in 0..100 {
            let g = random_affine_game(3, seed);
            let oracle = independent_enumeration(&g, 0.55, STRICT, tol());
            let solver: Vec<Vec<f64>> = alpha_rne_set(&g, 0.55, STRICT, tol())
                .unwrap()
                .points
                .iter()
                .map(|p| p.mu.weights().to_vec())
                .collect();
            assert_eq!(oracle.len(), solver.len(), "seed {seed}: {oracle:?} vs {solver:?}");
            for (a, b) in oracle.iter().zip(&solver) {
                assert!(max_norm(a, b) <= 1e-9, "seed {seed}");
            }
        }
    }

    #[test]
    fn random_games_are_reproducible() {
        assert_eq!(random_affine_game(4, 3), random_affine_game(4, 3));
        assert_ne!(random_affine_game(4, 3), random_affine_game(4, 4));
    }
}
