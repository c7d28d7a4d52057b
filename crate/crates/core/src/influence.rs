//! Influence design: steer herding players to the action that maximizes a
//! designer objective, anticipating the rational players' response.

use serde::Serialize;

use crate::alpharne::{check_alpha, herding_choice_set, is_alpha_rne, HerdingPolicy};
use crate::classical::{classical_equilibria, EquilibriumSet};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::measures::{Measure, Tolerance};

/// What the designer maximizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `sum_a w_a * mu_a` for the composed population measure.
    AdoptionWeights(Vec<f64>),
    /// Social utility of the composed population measure.
    SocialUtility,
}

impl Objective {
    pub fn evaluate(&self, g: &GameSpec, mu: &Measure) -> Result<f64> {
        match self {
            Objective::AdoptionWeights(w) => {
                if w.len() != g.n() {
                    return Err(Error::DimensionMismatch {
                        expected: g.n(),
                        got: w.len(),
                    });
                }
                if w.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParams("adoption weights must be finite".into()));
                }
                Ok(w.iter().zip(mu.weights()).map(|(a, b)| a * b).sum())
            }
            Objective::SocialUtility => g.social_utility(mu),
        }
    }
}

fn check_herding_alpha(alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return Err(Error::AlphaNotBelowOne(alpha));
    }
    Ok(())
}

/// Classical equilibria of the rational players once herding players sit
/// on `herding`.
pub fn lower_level_equilibrium(g: &GameSpec, herding: usize, alpha: f64, tol: Tolerance) -> Result<EquilibriumSet> {
    check_herding_alpha(alpha)?;
    if herding >= g.n() {
        return Err(Error::ActionOutOfRange { index: herding, n: g.n() });
    }
    classical_equilibria(&g.conditioned_on_herding(herding, alpha), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerLevelDetail {
    pub herding_action: usize,
    pub points: usize,
    pub families: usize,
}

impl LowerLevelDetail {
    pub fn unique(&self) -> bool {
        self.points == 1 && self.families == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellPosedness {
    pub herding_set: Vec<usize>,
    pub details: Vec<LowerLevelDetail>,
}

impl WellPosedness {
    pub fn well_posed(&self) -> bool {
        self.details.iter().all(LowerLevelDetail::unique)
    }
}

/// Whether the rational response is unique for every equilibrium-herding
/// action.
pub fn well_posed(g: &GameSpec, alpha: f64, policy: HerdingPolicy, tol: Tolerance) -> Result<WellPosedness> {
    check_herding_alpha(alpha)?;
    let herding_set = herding_choice_set(g, alpha, policy, tol)?;
    let details = herding_set
        .iter()
        .map(|&h| {
            let set = lower_level_equilibrium(g, h, alpha, tol)?;
            Ok(LowerLevelDetail {
                herding_action: h,
                points: set.points.len(),
                families: set.families.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WellPosedness { herding_set, details })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceSolution {
    pub i_h_star: usize,
    pub nu_star: Measure,
    pub mu_r_star: Measure,
    pub mu_star: Measure,
    pub f_star: f64,
    /// `(herding action, objective value)` for every candidate.
    pub candidates: Vec<(usize, f64)>,
}

/// Best herding target for the designer; ties go to the smallest index.
pub fn design_influence(
    g: &GameSpec,
    alpha: f64,
    objective: &Objective,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<InfluenceSolution> {
    let posedness = well_posed(g, alpha, policy, tol)?;
    if posedness.herding_set.is_empty() {
        return Err(Error::EmptyHerdingSet);
    }
    if let Some(bad) = posedness.details.iter().find(|d| !d.unique()) {
        let count = if bad.families > 0 {
            "a continuum of".to_string()
        } else {
            bad.points.to_string()
        };
        return Err(Error::IllPosed {
            herding_action: bad.herding_action,
            count,
        });
    }
    let mut best: Option<InfluenceSolution> = None;
    let mut candidates = Vec::new();
    for &h in &posedness.herding_set {
        let lower = lower_level_equilibrium(g, h, alpha, tol)?;
        let mu_r = lower.points[0].mu.clone();
        let mu = mu_r.mix_with_vertex(alpha, h);
        if !is_alpha_rne(g, &mu, h, alpha, HerdingPolicy::DeclaredHerding, tol).is_valid() {
            continue;
        }
        let f = objective.evaluate(g, &mu)?;
        candidates.push((h, f));
        if best.as_ref().is_none_or(|b| f > b.f_star + tol.eps()) {
            best = Some(InfluenceSolution {
                i_h_star: h,
                nu_star: Measure::vertex(g.n(), h),
                mu_r_star: mu_r,
                mu_star: mu,
                f_star: f,
                candidates: Vec::new(),
            });
        }
    }
    let mut solution = best.ok_or(Error::EmptyHerdingSet)?;
    solution.candidates = candidates;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{builtin, AffineUtility, BuiltinParams};
    use crate::measures::max_norm;
    use approx::assert_abs_diff_eq;

    const DECLARED: HerdingPolicy = HerdingPolicy::DeclaredHerding;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn only_point(set: &EquilibriumSet) -> Vec<f64> {
        assert_eq!(set.points.len(), 1);
        assert!(set.families.is_empty());
        set.points[0].mu.weights().to_vec()
    }

    #[test]
    fn lower_level_examples() {
        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        assert_eq!(only_point(&lower_level_equilibrium(&g, 1, 0.5, tol()).unwrap()), vec![1.0, 0.0, 0.0]);
        let g = builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap();
        assert_eq!(only_point(&lower_level_equilibrium(&g, 0, 0.5, tol()).unwrap()), vec![0.0, 0.0, 1.0]);
        let g = builtin(BuiltinParams::Braess2 { rho: 0.5 }).unwrap();
        assert_eq!(only_point(&lower_level_equilibrium(&g, 1, 0.4, tol()).unwrap()), vec![1.0, 0.0]);
    }

    #[test]
    fn well_posed_examples() {
        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        assert!(well_posed(&g, 0.5, DECLARED, tol()).unwrap().well_posed());
        let g = builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap();
        assert!(well_posed(&g, 0.5, DECLARED, tol()).unwrap().well_posed());

        let twins = GameSpec::new(
            vec!["x".into(), "y".into(), "z".into()],
            AffineUtility {
                b: vec![1.0, 1.0, 0.0],
                m: vec![vec![0.0; 3]; 3],
            },
        )
        .unwrap();
        assert!(!well_posed(&twins, 0.5, DECLARED, tol()).unwrap().well_posed());
        assert!(matches!(
            design_influence(&twins, 0.5, &Objective::SocialUtility, DECLARED, tol()),
            Err(Error::IllPosed { .. })
        ));
    }

    #[test]
    fn design_examples() {
        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        let s = design_influence(&g, 0.5, &Objective::AdoptionWeights(vec![0.0, 1.0, 0.0]), DECLARED, tol()).unwrap();
        assert_eq!(s.i_h_star, 1);
        assert!(max_norm(s.mu_star.weights(), &[0.5, 0.5, 0.0]) < 1e-12);
        assert_abs_diff_eq!(s.f_star, 0.5, epsilon = 1e-12);
        assert_eq!(s.nu_star, Measure::vertex(3, 1));

        let s = design_influence(&g, 0.5, &Objective::AdoptionWeights(vec![1.0, 0.0, 0.0]), DECLARED, tol()).unwrap();
        assert_eq!(s.i_h_star, 0);
        assert_eq!(s.mu_star.weights(), &[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(s.f_star, 1.0, epsilon = 1e-12);

        let g = builtin(BuiltinParams::Braess3 { rho: 0.8 }).unwrap();
        let s = design_influence(&g, 0.5, &Objective::SocialUtility, DECLARED, tol()).unwrap();
        assert_eq!(s.i_h_star, 0);
        assert_abs_diff_eq!(s.f_star, -1.5, epsilon = 1e-9);
        let at_ab = s.candidates.iter().find(|(h, _)| *h == 2).unwrap().1;
        assert_abs_diff_eq!(at_ab, -1.6, epsilon = 1e-12);
        assert!(is_alpha_rne(&g, &s.mu_star, s.i_h_star, 0.5, DECLARED, tol()).is_valid());
        for (_, f) in &s.candidates {
            assert!(s.f_star >= *f);
        }
    }

    #[test]
    fn weight_length_is_checked() {
        let g = builtin(BuiltinParams::PRODUCT_DEFAULT).unwrap();
        assert!(matches!(
            design_influence(&g, 0.5, &Objective::AdoptionWeights(vec![1.0]), DECLARED, tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
