//! Equilibria of the two-route network as the rational fraction varies.

use herding_games::{alpha_rne_set, builtin, BuiltinParams, HerdingPolicy, Tolerance};

fn main() -> herding_games::Result<()> {
    let g = builtin(BuiltinParams::Braess2 { rho: 0.5 })?;
    let tol = Tolerance::default();
    for alpha in [0.2, 0.4, 0.6, 0.8, 1.0] {
        let set = alpha_rne_set(&g, alpha, HerdingPolicy::DeclaredHerding, tol)?;
        println!("alpha = {alpha}");
        for p in &set.points {
            let herd: Vec<&str> = p.herding_actions().into_iter().map(|k| g.label(k)).collect();
            println!("  mu = {:?}  herding on {:?}", p.mu.weights(), herd);
        }
    }
    Ok(())
}
