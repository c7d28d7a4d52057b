//! Equilibria of a population with a rational fraction `alpha` and a
//! herding fraction `1 - alpha`.
//!
//! Every α-RNE either is a classical equilibrium with enough mass on a
//! herding action, or places exactly `1 - alpha` on the herding action with
//! the rational players indifferent across the rest. [`alpha_rne_set`]
//! builds both branches exactly.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classical::{
    classical_equilibria, subsets, EquilibriumFamily, EquilibriumPoint, EquilibriumSet,
    FaceOutcome, HerdingAnnotation, IndifferenceSystem,
};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::measures::{argmax_set, herding_choice, support, Measure, Tolerance};

/// How herding players are allowed to sit on an action.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HerdingPolicy {
    /// The herding action is the majority action, ties to the smallest index.
    StrictMajority,
    /// Any majority action, or an action holding exactly the herding mass
    /// `1 - alpha` as long as `alpha <= 1 - 1/n`.
    #[default]
    DeclaredHerding,
}

impl fmt::Display for HerdingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HerdingPolicy::StrictMajority => "strict",
            HerdingPolicy::DeclaredHerding => "declared",
        })
    }
}

impl FromStr for HerdingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" | "strict-majority" => Ok(HerdingPolicy::StrictMajority),
            "declared" | "declared-herding" => Ok(HerdingPolicy::DeclaredHerding),
            other => Err(Error::Unsupported(format!("herding policy '{other}'"))),
        }
    }
}

impl HerdingPolicy {
    /// Whether herding players may occupy `k` at `mu`.
    pub fn admits(self, mu: &Measure, k: usize, alpha: f64, tol: Tolerance) -> bool {
        match self {
            HerdingPolicy::StrictMajority => herding_choice(mu, tol) == k,
            HerdingPolicy::DeclaredHerding => {
                let n = mu.n() as f64;
                argmax_set(mu.weights(), tol).contains(&k)
                    || (tol.eq(mu.get(k), 1.0 - alpha) && alpha <= 1.0 - 1.0 / n + tol.eps())
            }
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// The measure of the rational players alone, given herding on `k`.
pub fn rational_measure(mu: &Measure, k: usize, alpha: f64, tol: Tolerance) -> Result<Measure> {
    check_alpha(alpha)?;
    if k >= mu.n() {
        return Err(Error::ActionOutOfRange { index: k, n: mu.n() });
    }
    let required = 1.0 - alpha;
    if mu.get(k) < required - tol.eps() {
        return Err(Error::HerdingMassTooSmall {
            action: k,
            mass: mu.get(k),
            required,
        });
    }
    let weights = mu
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let v = if i == k { (w - required) / alpha } else { w / alpha };
            v.max(0.0)
        })
        .collect();
    // Dividing by a small alpha inflates rounding error.
    Measure::new(weights, Tolerance::new(tol.eps() / alpha)?)
}

/// Outcome of a membership test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Tests whether `(mu, k)` is an α-RNE under `policy`.
pub fn is_alpha_rne(
    g: &GameSpec,
    mu: &Measure,
    k: usize,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Verdict {
    if let Err(e) = check_alpha(alpha) {
        return Verdict::Invalid(e.to_string());
    }
    if mu.n() != g.n() {
        return Verdict::Invalid(format!("measure has {} actions, game has {}", mu.n(), g.n()));
    }
    let mu_r = match rational_measure(mu, k, alpha, tol) {
        Ok(m) => m,
        Err(e) => return Verdict::Invalid(e.to_string()),
    };
    let u = g.utilities_raw(mu.weights());
    let best = argmax_set(&u, tol);
    if let Some(i) = support(&mu_r, tol).into_iter().find(|i| !best.contains(i)) {
        return Verdict::Invalid(format!(
            "rational players use action {i}, which is not a best response"
        ));
    }
    let composed = mu_r.mix_with_vertex(alpha, k);
    if composed.distance(mu) > tol.eps() {
        return Verdict::Invalid("composition with the herding mass does not reproduce mu".into());
    }
    if alpha < 1.0 && !policy.admits(mu, k, alpha, tol) {
        return Verdict::Invalid(format!("herding on action {k} violates the {policy} policy"));
    }
    Verdict::Valid
}

/// The two branches of the α-RNE set.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RneDecomposition {
    /// Classical equilibria with no admissible herding action.
    pub m_alpha_removed: Vec<EquilibriumPoint>,
    /// Classical equilibria that survive, annotated with herding actions.
    pub kept: EquilibriumSet,
    /// Equilibria holding exactly `1 - alpha` on the herding action.
    pub p_alpha: EquilibriumSet,
}

fn annotate(
    mu: &Measure,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
    candidates: impl IntoIterator<Item = usize>,
) -> Vec<HerdingAnnotation> {
    candidates
        .into_iter()
        .filter(|&k| mu.get(k) >= 1.0 - alpha - tol.eps() && policy.admits(mu, k, alpha, tol))
        .filter_map(|k| {
            rational_measure(mu, k, alpha, tol)
                .ok()
                .map(|mu_r| HerdingAnnotation { action: k, mu_r })
        })
        .collect()
}

/// Restricts a classical family to the part where herding on `k` is
/// admissible, using closed majority constraints.
fn herding_part(
    fam: &EquilibriumFamily,
    k: usize,
    alpha: f64,
    tol: Tolerance,
) -> Option<EquilibriumFamily> {
    let eps = tol.eps();
    let n = fam.base.len();
    let (w0, w1) = fam.endpoints();
    let mut values = vec![w0[k] - (1.0 - alpha)];
    let mut slopes = vec![w1[k] - w0[k]];
    for j in (0..n).filter(|&j| j != k) {
        values.push(w0[k] - w0[j]);
        slopes.push((w1[k] - w1[j]) - (w0[k] - w0[j]));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for (v, s) in values.iter().zip(&slopes) {
        if s.abs() <= 1e-12 {
            if *v < -eps {
                return None;
            }
        } else if *s > 0.0 {
            lo = lo.max(-v / s);
        } else {
            hi = hi.min(-v / s);
        }
    }
    (lo <= hi + eps).then(|| {
        let a = fam.at(lo);
        let b = fam.at(hi.max(lo));
        EquilibriumFamily {
            direction: b.iter().zip(&a).map(|(x, y)| x - y).collect(),
            base: a,
            t_range: (0.0, 1.0),
            herding_action: Some(k),
        }
    })
}

/// Splits the α-RNE set into its surviving classical part and the newly
/// constructed part.
pub fn rne_decomposition(
    g: &GameSpec,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<RneDecomposition> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return Err(Error::AlphaNotBelowOne(alpha));
    }
    let n = g.n();
    let classical = classical_equilibria(g, tol)?;
    let mut out = RneDecomposition::default();

    for p in classical.points {
        let herding = annotate(&p.mu, alpha, policy, tol, 0..n);
        if herding.is_empty() {
            out.m_alpha_removed.push(p);
        } else {
            out.kept.insert(EquilibriumPoint { mu: p.mu, herding }, tol);
        }
    }
    for fam in &classical.families {
        for k in 0..n {
            if let Some(part) = herding_part(fam, k, alpha, tol) {
                out.kept.families.push(part);
            }
        }
    }
    out.kept.finish(tol);

    for k in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let mut fixed = vec![0.0; n];
        fixed[k] = 1.0 - alpha;
        for s in subsets(&others) {
            let system = IndifferenceSystem {
                game: g,
                fixed: fixed.clone(),
                free: &s,
                total: alpha,
            };
            let s0 = s[0];
            let needs_majority = match policy {
                HerdingPolicy::StrictMajority => true,
                HerdingPolicy::DeclaredHerding => alpha > 1.0 - 1.0 / n as f64 + tol.eps(),
            };
            let constraints = |w: &[f64]| {
                let u = g.utilities_raw(w);
                let mut c: Vec<f64> = (0..n).map(|m| u[s0] - u[m]).collect();
                if needs_majority {
                    c.extend((0..n).filter(|&j| j != k).map(|j| w[k] - w[j]));
                }
                c
            };
            match system.solve(constraints, tol)? {
                None => {}
                Some(FaceOutcome::Point(w)) => {
                    let mu = Measure::new(w, tol)?;
                    if is_alpha_rne(g, &mu, k, alpha, policy, tol).is_valid() {
                        let mu_r = rational_measure(&mu, k, alpha, tol)?;
                        out.p_alpha.insert(
                            EquilibriumPoint {
                                mu,
                                herding: vec![HerdingAnnotation { action: k, mu_r }],
                            },
                            tol,
                        );
                    }
                }
                Some(FaceOutcome::Family {
                    base,
                    direction,
                    t_range,
                }) => out.p_alpha.families.push(EquilibriumFamily {
                    base,
                    direction,
                    t_range,
                    herding_action: Some(k),
                }),
            }
        }
    }
    out.p_alpha.finish(tol);
    Ok(out)
}

/// All α-RNE, each annotated with every admissible herding action.
pub fn alpha_rne_set(
    g: &GameSpec,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<EquilibriumSet> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return classical_equilibria(g, tol);
    }
    let parts = rne_decomposition(g, alpha, policy, tol)?;
    let mut set = parts.kept;
    for p in parts.p_alpha.points {
        set.insert(p, tol);
    }
    set.families.extend(parts.p_alpha.families);
    // A point may be admissible under herding actions discovered by only
    // one branch; re-annotate against every action.
    for p in &mut set.points {
        p.herding = annotate(&p.mu, alpha, policy, tol, 0..g.n())
            .into_iter()
            .filter(|h| is_alpha_rne(g, &p.mu, h.action, alpha, policy, tol).is_valid())
            .collect();
    }
    set.finish(tol);
    Ok(set)
}

/// Actions that are the herding choice at some α-RNE.
pub fn herding_choice_set(
    g: &GameSpec,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<Vec<usize>> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return Ok(Vec::new());
    }
    let set = alpha_rne_set(g, alpha, policy, tol)?;
    let mut actions: Vec<usize> = set
        .points
        .iter()
        .flat_map(|p| p.herding_actions())
        .chain(set.families.iter().filter_map(|f| f.herding_action))
        .collect();
    actions.sort_unstable();
    actions.dedup();
    Ok(actions)
}
