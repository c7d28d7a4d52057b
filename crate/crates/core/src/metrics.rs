//! Social utility, efficiency ratios, per-type utilities and the Braess
//! network comparison.

use std::io::Write;

use serde::Serialize;

use crate::alpharne::{alpha_rne_set, check_alpha, HerdingPolicy};
use crate::classical::{is_classical_equilibrium, social_optimum, EquilibriumFamily, EquilibriumSet};
use crate::error::{Error, Result};
use crate::game::{builtin, BuiltinParams, GameSpec};
use crate::measures::{argmax_set, Measure, Tolerance};
use crate::report::fmt_num;

pub fn social_utility(g: &GameSpec, mu: &Measure) -> Result<f64> {
    g.social_utility(mu)
}

/// Range of `u^s` over a family segment; `u^s` is quadratic along it.
fn family_range(g: &GameSpec, fam: &EquilibriumFamily) -> (f64, f64) {
    let (lo, hi) = fam.t_range;
    let q = |t: f64| g.social_utility_raw(&fam.at(t));
    let (q0, qm, q1) = (q(lo), q(0.5 * (lo + hi)), q(hi));
    let mut values = vec![q0, q1];
    // q(t) = q0 + b s + a s^2 with s the normalized position in [0, 1].
    let a = 2.0 * (q1 - 2.0 * qm + q0);
    let b = q1 - q0 - a;
    if a.abs() > 1e-15 {
        let s = -b / (2.0 * a);
        if (0.0..=1.0).contains(&s) {
            values.push(q(lo + s * (hi - lo)));
        }
    }
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| (mn.min(*v), mx.max(*v)))
}

/// Smallest and largest social utility over an equilibrium set.
pub fn social_range(g: &GameSpec, set: &EquilibriumSet) -> Option<(f64, f64)> {
    let values = set
        .points
        .iter()
        .map(|p| {
            let v = g.social_utility_raw(p.mu.weights());
            (v, v)
        })
        .chain(set.families.iter().map(|f| family_range(g, f)));
    values.reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
}

/// Price of anarchy and price of stability over the α-RNE set:
/// worst and best equilibrium social utility divided by the optimum.
///
/// For cost games (negative utilities) both ratios are at least one and
/// PoA is the larger; for payoff games both are at most one and PoA is
/// the smaller.
pub fn poa_pos(g: &GameSpec, alpha: f64, policy: HerdingPolicy, tol: Tolerance) -> Result<(f64, f64)> {
    let set = alpha_rne_set(g, alpha, policy, tol)?;
    let opt = social_optimum(g, tol)?;
    ratios(g, &set, opt.value, tol)
}

fn ratios(g: &GameSpec, set: &EquilibriumSet, u_star: f64, tol: Tolerance) -> Result<(f64, f64)> {
    if u_star.abs() <= tol.eps() {
        return Err(Error::UndefinedRatio);
    }
    let (worst, best) = social_range(g, set).ok_or(Error::UndefinedRatio)?;
    Ok((worst / u_star, best / u_star))
}

/// Utilities of a typical rational player (`u_r`, any best response) and
/// of a herding player on `k` (`u_i`).
pub fn per_type_utilities(g: &GameSpec, mu: &Measure, k: usize, tol: Tolerance) -> Result<(f64, f64)> {
    let u = g.utilities(mu)?;
    if k >= g.n() {
        return Err(Error::ActionOutOfRange { index: k, n: g.n() });
    }
    let best = argmax_set(&u, tol)[0];
    Ok((u[best], u[k]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Check {
    pub mu: Measure,
    pub herding_action: usize,
    pub u_r: f64,
    pub u_i: f64,
    pub in_n1: bool,
    pub herding_not_above_rational: bool,
    pub herding_not_above_optimum: bool,
    /// Only checked when `mu` is a classical equilibrium.
    pub equal_utilities: Option<bool>,
    pub optimum_not_below_rational: Option<bool>,
}

impl Theorem2Check {
    pub fn holds(&self) -> bool {
        self.herding_not_above_rational
            && self.herding_not_above_optimum
            && self.equal_utilities.unwrap_or(true)
            && self.optimum_not_below_rational.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub u_s_star: f64,
    pub checks: Vec<Theorem2Check>,
}

impl Theorem2Report {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(Theorem2Check::holds)
    }
}

/// Checks that herding players never beat rational ones, nor the social
/// optimum, at every α-RNE and every admissible herding action.
pub fn theorem2_check(g: &GameSpec, alpha: f64, policy: HerdingPolicy, tol: Tolerance) -> Result<Theorem2Report> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return Err(Error::AlphaNotBelowOne(alpha));
    }
    let set = alpha_rne_set(g, alpha, policy, tol)?;
    let u_s_star = social_optimum(g, tol)?.value;
    theorem2_on_set(g, &set, u_s_star, tol)
}

pub(crate) fn theorem2_on_set(
    g: &GameSpec,
    set: &EquilibriumSet,
    u_s_star: f64,
    tol: Tolerance,
) -> Result<Theorem2Report> {
    let eps = tol.eps();
    let mut checks = Vec::new();
    for p in &set.points {
        let in_n1 = is_classical_equilibrium(g, &p.mu, tol);
        for h in &p.herding {
            let (u_r, u_i) = per_type_utilities(g, &p.mu, h.action, tol)?;
            checks.push(Theorem2Check {
                mu: p.mu.clone(),
                herding_action: h.action,
                u_r,
                u_i,
                in_n1,
                herding_not_above_rational: u_i <= u_r + eps,
                herding_not_above_optimum: u_i <= u_s_star + eps,
                equal_utilities: in_n1.then_some((u_r - u_i).abs() <= eps),
                optimum_not_below_rational: in_n1.then_some(u_s_star >= u_r - eps),
            });
        }
    }
    Ok(Theorem2Report { u_s_star, checks })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumMetrics {
    pub mu: Measure,
    pub social_utility: f64,
    /// `(herding action, u_r, u_i)` for each admissible herding action.
    pub per_type: Vec<(usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub alpha: f64,
    pub policy: HerdingPolicy,
    pub u_s_star: f64,
    pub optimum: Measure,
    pub equilibria: Vec<EquilibriumMetrics>,
    /// `None` when the optimum is zero.
    pub poa: Option<f64>,
    pub pos: Option<f64>,
    /// Absent at `alpha = 1`, where there are no herding players.
    pub theorem2: Option<Theorem2Report>,
}

pub fn metrics_report(g: &GameSpec, alpha: f64, policy: HerdingPolicy, tol: Tolerance) -> Result<MetricsReport> {
    let set = alpha_rne_set(g, alpha, policy, tol)?;
    let opt = social_optimum(g, tol)?;
    let (poa, pos) = match ratios(g, &set, opt.value, tol) {
        Ok((a, b)) => (Some(a), Some(b)),
        Err(Error::UndefinedRatio) => (None, None),
        Err(e) => return Err(e),
    };
    let equilibria = set
        .points
        .iter()
        .map(|p| {
            let per_type = p
                .herding
                .iter()
                .map(|h| per_type_utilities(g, &p.mu, h.action, tol).map(|(r, i)| (h.action, r, i)))
                .collect::<Result<Vec<_>>>()?;
            Ok(EquilibriumMetrics {
                mu: p.mu.clone(),
                social_utility: g.social_utility_raw(p.mu.weights()),
                per_type,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let theorem2 = if alpha < 1.0 {
        Some(theorem2_on_set(g, &set, opt.value, tol)?)
    } else {
        None
    };
    Ok(MetricsReport {
        alpha,
        policy,
        u_s_star: opt.value,
        optimum: opt.argmax,
        equilibria,
        poa,
        pos,
        theorem2,
    })
}

/// Best-equilibrium (`g_b`) and worst-equilibrium (`g_w`) social utility of
/// the three-route network minus that of the two-route network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraessComparison {
    pub alpha: f64,
    pub rho: f64,
    pub g_b: f64,
    pub g_w: f64,
    pub alpha_bar: f64,
    pub u_b3: f64,
    pub u_w3: f64,
    pub u_2: f64,
    /// Which closed-form branch produced each of `u_b3`, `u_w3` and `u_2`.
    pub pieces: [&'static str; 3],
}

/// Social utility of the three-route equilibria with herding mass `1 - alpha`
/// on a two-link route.
fn braess3_herding_value(alpha: f64, rho: f64) -> f64 {
    -rho * alpha * alpha + alpha - rho - 1.0
}

/// Closed-form comparison at `(alpha, rho)`.
pub fn braess_comparison(alpha: f64, rho: f64) -> Result<BraessComparison> {
    check_alpha(alpha)?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParams(format!("rho must lie in (0, 1), got {rho}")));
    }
    let alpha_bar = (1.0 - rho) / rho;
    let direct = -2.0 * rho;
    let herding = braess3_herding_value(alpha, rho);
    // The herding equilibria exist for alpha <= 2/3; on their own they are
    // better than the all-AB point exactly when alpha >= alpha_bar.
    let (u_b3, u_w3, p3) = if alpha <= 2.0 / 3.0 {
        if herding >= direct {
            (herding, direct, "herding-best")
        } else {
            (direct, herding, "herding-worst")
        }
    } else {
        (direct, direct, "ab-only")
    };
    let (u_2, p2) = if alpha <= 0.5 {
        (-1.0 - rho + 2.0 * rho * alpha - 2.0 * rho * alpha * alpha, "split")
    } else {
        (-1.0 - rho / 2.0, "even")
    };
    Ok(BraessComparison {
        alpha,
        rho,
        g_b: u_b3 - u_2,
        g_w: u_w3 - u_2,
        alpha_bar,
        u_b3,
        u_w3,
        u_2,
        pieces: [p3, p3, p2],
    })
}

/// The printed piecewise forms of `g_b` and `g_w`, valid for `rho > 2/3`
/// where `alpha_bar < 1/2`.
pub fn braess_piecewise(alpha: f64, rho: f64) -> (f64, f64) {
    let ab = (1.0 - rho) / rho;
    let a2 = alpha * alpha;
    let g_b = if alpha < ab {
        1.0 - rho - 2.0 * rho * alpha + 2.0 * rho * a2
    } else if alpha <= 0.5 {
        rho * a2 - 2.0 * rho * alpha + alpha
    } else if alpha <= 2.0 / 3.0 {
        -rho * a2 - rho / 2.0 + alpha
    } else {
        1.0 - 1.5 * rho
    };
    let g_w = if alpha < ab {
        rho * a2 + alpha - 2.0 * rho * alpha
    } else if alpha <= 0.5 {
        1.0 - rho - 2.0 * rho * alpha + 2.0 * rho * a2
    } else {
        1.0 - 1.5 * rho
    };
    (g_b, g_w)
}

/// `(g_b, g_w)` computed from the enumerated equilibrium sets.
pub fn braess_comparison_enumerated(
    alpha: f64,
    rho: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let g3 = builtin(BuiltinParams::Braess3 { rho })?;
    let g2 = builtin(BuiltinParams::Braess2 { rho })?;
    let range = |g: &GameSpec| -> Result<(f64, f64)> {
        let set = alpha_rne_set(g, alpha, policy, tol)?;
        social_range(g, &set).ok_or_else(|| Error::InvalidGame("empty equilibrium set".into()))
    };
    let (w3, b3) = range(&g3)?;
    let (w2, b2) = range(&g2)?;
    Ok((b3 - b2, w3 - w2))
}

/// `lo:hi:count` grid; samples sit at the midpoints of `count` equal cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::InvalidParams(format!("bad range {lo}:{hi}:{count}")));
        }
        Ok(Self { lo, hi, count })
    }

    /// Parses `lo:hi:count` or a single value.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("range '{text}' is not lo:hi:count"));
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [v] => {
                let v: f64 = v.trim().parse().map_err(|_| bad())?;
                Self::new(v, v, 1)
            }
            [lo, hi, count] => Self::new(
                lo.trim().parse().map_err(|_| bad())?,
                hi.trim().parse().map_err(|_| bad())?,
                count.trim().parse().map_err(|_| bad())?,
            ),
            _ => Err(bad()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let width = (self.hi - self.lo) / self.count as f64;
        (0..self.count)
            .map(|i| self.lo + (i as f64 + 0.5) * width)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BraessSign {
    Paradox,
    Improvement,
    Boundary,
}

impl BraessSign {
    pub fn as_str(self) -> &'static str {
        match self {
            BraessSign::Paradox => "paradox",
            BraessSign::Improvement => "improvement",
            BraessSign::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub rho: f64,
    pub g_b: f64,
    pub g_w: f64,
    pub sign_b: BraessSign,
    pub poa: f64,
    pub pos: f64,
}

const BOUNDARY_EPS: f64 = 1e-9;

/// Whether `alpha` sits on a breakpoint of the closed form or `g_b` vanishes.
pub fn is_boundary(c: &BraessComparison) -> bool {
    [c.alpha_bar, 0.5, 2.0 / 3.0]
        .iter()
        .any(|bp| (c.alpha - bp).abs() <= BOUNDARY_EPS)
        || c.g_b.abs() <= BOUNDARY_EPS
}

/// Grid sweep of the Braess comparison; rows are ordered by alpha, then rho.
pub fn sweep(
    game_id: &str,
    alpha: GridRange,
    rho: GridRange,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<Vec<SweepRow>> {
    if game_id != "braess-compare" && game_id != "braess3" {
        return Err(Error::Unsupported(format!(
            "sweep is defined for the Braess comparison only, not '{game_id}'"
        )));
    }
    let mut rows = Vec::with_capacity(alpha.count * rho.count);
    for a in alpha.values() {
        for r in rho.values() {
            let c = braess_comparison(a, r)?;
            let sign_b = if is_boundary(&c) {
                BraessSign::Boundary
            } else if c.g_b < 0.0 {
                BraessSign::Paradox
            } else {
                BraessSign::Improvement
            };
            let (poa, pos) = poa_pos(&builtin(BuiltinParams::Braess3 { rho: r })?, a, policy, tol)?;
            rows.push(SweepRow {
                alpha: a,
                rho: r,
                g_b: c.g_b,
                g_w: c.g_w,
                sign_b,
                poa,
                pos,
            });
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: [&str; 7] = ["alpha", "rho", "g_b", "g_w", "sign_b", "poa", "pos"];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Unsupported(format!("csv output failed: {e}"));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            fmt_num(r.alpha),
            fmt_num(r.rho),
            fmt_num(r.g_b),
            fmt_num(r.g_w),
            r.sign_b.as_str().to_string(),
            fmt_num(r.poa),
            fmt_num(r.pos),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Unsupported(format!("csv output failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const BOTH: [HerdingPolicy; 2] = [HerdingPolicy::StrictMajority, HerdingPolicy::DeclaredHerding];
    const DECLARED: HerdingPolicy = HerdingPolicy::DeclaredHerding;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn m(w: &[f64]) -> Measure {
        Measure::new(w.to_vec(), tol()).unwrap()
    }

    #[test]
    fn social_utility_examples() {
        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        assert_abs_diff_eq!(social_utility(&g, &m(&[0.5, 0.5])).unwrap(), -1.25, epsilon = 1e-12);
        let g = builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap();
        assert_abs_diff_eq!(social_utility(&g, &m(&[0.0, 0.0, 1.0])).unwrap(), -1.6, epsilon = 1e-12);
        for n in 2..6 {
            let g = builtin(BuiltinParams::Bandwidth { n }).unwrap();
            assert_abs_diff_eq!(social_utility(&g, &Measure::vertex(n, 0)).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn poa_pos_examples() {
        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        for p in BOTH {
            // u^s((0.25, 0.75)) = -1.3125 against the optimum -1.25.
            let (poa, pos) = poa_pos(&g, 0.25, p, tol()).unwrap();
            assert_abs_diff_eq!(poa, 1.3125 / 1.25, epsilon = 1e-12);
            assert_abs_diff_eq!(pos, 1.05, epsilon = 1e-12);
            let (poa, pos) = poa_pos(&g, 0.8, p, tol()).unwrap();
            assert_abs_diff_eq!(poa, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pos, 1.0, epsilon = 1e-12);
        }

        let g = builtin(BuiltinParams::Bandwidth { n: 3 }).unwrap();
        let (poa, pos) = poa_pos(&g, 0.9, DECLARED, tol()).unwrap();
        assert_eq!((poa, pos), (0.0, 0.0));

        let (poa, pos) = poa_pos(&g, 0.3, DECLARED, tol()).unwrap();
        let alpha: f64 = 0.3;
        let expected = (2..=3)
            .map(|j| {
                let share = (1.0 - alpha) / j as f64;
                4.0 * (alpha + share) * (1.0 - alpha - share)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(pos, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(pos, 0.99556, epsilon = 1e-5);
        assert_eq!(poa, 0.0);

        let rho = 0.8;
        let g = builtin(BuiltinParams::Braess3 { rho }).unwrap();
        let (poa, pos) = poa_pos(&g, 0.9, DECLARED, tol()).unwrap();
        let closed = 4.0 * rho * rho / (4.0 * rho - 1.0);
        assert_abs_diff_eq!(poa, closed, epsilon = 1e-12);
        assert_abs_diff_eq!(pos, closed, epsilon = 1e-12);
        assert_abs_diff_eq!(poa, 1.163636, epsilon = 1e-6);
    }

    #[test]
    fn zero_optimum_is_undefined() {
        let g = GameSpec::new(
            vec!["x".into(), "y".into()],
            crate::game::AffineUtility {
                b: vec![0.0, -1.0],
                m: vec![vec![0.0; 2]; 2],
            },
        )
        .unwrap();
        assert_eq!(poa_pos(&g, 0.5, DECLARED, tol()), Err(Error::UndefinedRatio));
        let report = metrics_report(&g, 0.5, DECLARED, tol()).unwrap();
        assert_eq!(report.poa, None);
    }

    #[test]
    fn per_type_examples() {
        let g = builtin(BuiltinParams::Bandwidth { n: 3 }).unwrap();
        let (r, i) = per_type_utilities(&g, &m(&[0.3, 0.7, 0.0]), 1, tol()).unwrap();
        assert_abs_diff_eq!(r, 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(i, 0.175, epsilon = 1e-12);

        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        let (r, i) = per_type_utilities(&g, &m(&[0.4, 0.6]), 1, tol()).unwrap();
        assert_abs_diff_eq!(r, -1.2, epsilon = 1e-12);
        assert_abs_diff_eq!(i, -1.3, epsilon = 1e-12);
    }

    #[test]
    fn theorem2_examples() {
        let g = builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap();
        let report = theorem2_check(&g, 0.5, DECLARED, tol()).unwrap();
        let points: Vec<_> = report.checks.iter().map(|c| c.mu.clone()).collect();
        assert_eq!(alpha_rne_set(&g, 0.5, DECLARED, tol()).unwrap().points.len(), 3, "{points:?}");
        assert!(report.all_hold());

        let g = builtin(BuiltinParams::Bandwidth { n: 3 }).unwrap();
        let report = theorem2_check(&g, 0.3, DECLARED, tol()).unwrap();
        assert!(report.all_hold());
        let witness = report
            .checks
            .iter()
            .find(|c| c.mu.distance(&m(&[0.3, 0.7, 0.0])) < 1e-9)
            .unwrap();
        assert!(!witness.in_n1);
        assert!(witness.u_r > report.u_s_star);

        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        let report = theorem2_check(&g, 0.5, DECLARED, tol()).unwrap();
        let top = report
            .checks
            .iter()
            .find(|c| c.mu.distance(&Measure::vertex(3, 0)) < 1e-9)
            .unwrap();
        assert!(top.in_n1);
        assert_eq!((top.u_r, top.u_i), (3.0, 3.0));
        assert!(matches!(theorem2_check(&g, 1.0, DECLARED, tol()), Err(Error::AlphaNotBelowOne(_))));
    }

    #[test]
    fn comparison_examples() {
        assert_abs_diff_eq!(braess_comparison(0.5, 0.8).unwrap().g_b, -0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(braess_comparison(0.9, 0.8).unwrap().g_b, -0.2, epsilon = 1e-12);
        // 1 - rho - 2 rho alpha + 2 rho alpha^2 = 0.3 - 0.07 + 0.0035
        assert_abs_diff_eq!(braess_comparison(0.05, 0.7).unwrap().g_b, 0.2335, epsilon = 1e-12);
        assert_abs_diff_eq!(braess_comparison(0.9, 0.7).unwrap().g_b, -0.05, epsilon = 1e-12);
        for i in 1..=100 {
            let alpha = i as f64 / 100.0;
            assert!(braess_comparison(alpha, 0.8).unwrap().g_w < 0.0, "alpha = {alpha}");
        }
    }

    #[test]
    fn closed_form_matches_printed_pieces_above_two_thirds() {
        for i in 1..=60 {
            for j in 1..30 {
                let alpha = i as f64 / 60.0 - 0.003;
                let rho = 2.0 / 3.0 + j as f64 / 90.0;
                let c = braess_comparison(alpha, rho).unwrap();
                let (g_b, g_w) = braess_piecewise(alpha, rho);
                assert_abs_diff_eq!(c.g_b, g_b, epsilon = 1e-12);
                assert_abs_diff_eq!(c.g_w, g_w, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for alpha in [0.05, 0.2, 0.35, 0.45, 0.55, 0.6, 0.65, 0.7, 0.85, 1.0] {
            for rho in [0.2, 0.5, 0.6, 0.7, 0.8, 0.95] {
                let c = braess_comparison(alpha, rho).unwrap();
                let (g_b, g_w) = braess_comparison_enumerated(alpha, rho, DECLARED, tol()).unwrap();
                assert_abs_diff_eq!(c.g_b, g_b, epsilon = 1e-9);
                assert_abs_diff_eq!(c.g_w, g_w, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn grid_ranges() {
        let r = GridRange::parse("0:1:4").unwrap();
        assert_eq!(r.values(), vec![0.125, 0.375, 0.625, 0.875]);
        assert_eq!(GridRange::parse("0.9").unwrap().values(), vec![0.9]);
        assert!(GridRange::parse("1:0:3").is_err());
        assert!(GridRange::parse("0:1").is_err());
        assert!(GridRange::parse("0:1:0").is_err());
    }

    #[test]
    fn sweep_rows_and_csv() {
        let rows = sweep(
            "braess-compare",
            GridRange::parse("0.05:0.05:1").unwrap(),
            GridRange::parse("0.7").unwrap(),
            DECLARED,
            tol(),
        )
        .unwrap();
        assert_eq!(rows[0].sign_b, BraessSign::Improvement);
        let rows = sweep(
            "braess-compare",
            GridRange::parse("0:1:10").unwrap(),
            GridRange::parse("0.7:0.9:2").unwrap(),
            DECLARED,
            tol(),
        )
        .unwrap();
        assert_eq!(rows.len(), 20);
        assert_abs_diff_eq!(rows[0].alpha, 0.05);
        assert_abs_diff_eq!(rows[0].rho, 0.75);
        assert_abs_diff_eq!(rows[1].rho, 0.85);
        let at_09 = rows.iter().find(|r| (r.alpha - 0.95).abs() < 1e-12).unwrap();
        assert_eq!(at_09.sign_b, BraessSign::Paradox);

        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,rho,g_b,g_w,sign_b,poa,pos\n"));
        assert_eq!(text.lines().count(), 21);
        assert!(!text.contains('\r'));

        assert!(sweep("product", GridRange::parse("0.5").unwrap(), GridRange::parse("0.5").unwrap(), DECLARED, tol()).is_err());
    }
}
