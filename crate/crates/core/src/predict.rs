//! Outcome prediction by iterated elimination of strictly dominated
//! actions, with herding players fixed to the equilibrium-herding set.

use serde::Serialize;

use crate::alpharne::{check_alpha, herding_choice_set, HerdingPolicy};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::measures::Tolerance;

/// Vertices of `{mu : mu[herding] >= 1 - alpha}` with rational mass on
/// `surviving` only: `(1 - alpha) delta_herding + alpha delta_j`.
pub fn region_vertices(n: usize, herding: usize, alpha: f64, surviving: &[usize]) -> Vec<Vec<f64>> {
    surviving
        .iter()
        .map(|&j| {
            let mut v = vec![0.0; n];
            v[herding] += 1.0 - alpha;
            v[j] += alpha;
            v
        })
        .collect()
}

/// Whether `j` beats `i` by more than `eps` at every vertex of every
/// herding region. Utility differences are affine, so this is strict
/// domination on the whole region.
pub fn is_dominated(
    g: &GameSpec,
    i: usize,
    j: usize,
    alpha: f64,
    herding: &[usize],
    surviving: &[usize],
    tol: Tolerance,
) -> bool {
    !herding.is_empty()
        && herding.iter().all(|&h| {
            region_vertices(g.n(), h, alpha, surviving)
                .iter()
                .all(|v| g.utility_raw(i, v) < g.utility_raw(j, v) - tol.eps())
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Elimination {
    pub round: usize,
    pub eliminated: usize,
    pub dominated_by: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionResult {
    pub herding_set: Vec<usize>,
    pub trace: Vec<Elimination>,
    pub surviving: Vec<usize>,
    pub unique_prediction: Option<usize>,
}

/// Eliminates, one per round, the smallest-index action strictly dominated
/// by some surviving action, until none is.
pub fn iterated_prediction(
    g: &GameSpec,
    alpha: f64,
    policy: HerdingPolicy,
    tol: Tolerance,
) -> Result<PredictionResult> {
    check_alpha(alpha)?;
    if alpha >= 1.0 {
        return Err(Error::AlphaNotBelowOne(alpha));
    }
    let herding_set = herding_choice_set(g, alpha, policy, tol)?;
    Ok(eliminate(g, alpha, &herding_set, tol, |candidates| candidates[0]))
}

/// Elimination loop; `pick` chooses which dominated action goes next.
pub(crate) fn eliminate<F>(
    g: &GameSpec,
    alpha: f64,
    herding_set: &[usize],
    tol: Tolerance,
    mut pick: F,
) -> PredictionResult
where
    F: FnMut(&[(usize, usize)]) -> (usize, usize),
{
    let mut surviving: Vec<usize> = (0..g.n()).collect();
    let mut trace = Vec::new();
    loop {
        let dominated: Vec<(usize, usize)> = surviving
            .iter()
            .filter_map(|&i| {
                surviving
                    .iter()
                    .find(|&&j| j != i && is_dominated(g, i, j, alpha, herding_set, &surviving, tol))
                    .map(|&j| (i, j))
            })
            .collect();
        if dominated.is_empty() {
            break;
        }
        let (i, j) = pick(&dominated);
        surviving.retain(|&a| a != i);
        trace.push(Elimination {
            round: trace.len() + 1,
            eliminated: i,
            dominated_by: j,
        });
    }
    let unique_prediction = (surviving.len() == 1).then(|| surviving[0]);
    PredictionResult {
        herding_set: herding_set.to_vec(),
        trace,
        surviving,
        unique_prediction,
    }
}
