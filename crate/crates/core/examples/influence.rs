//! Choosing which action to steer the herd toward.

use herding_games::{builtin, design_influence, BuiltinParams, HerdingPolicy, Objective, Tolerance};

fn main() -> herding_games::Result<()> {
    let tol = Tolerance::default();
    let policy = HerdingPolicy::DeclaredHerding;

    let product = builtin(BuiltinParams::PRODUCT_DEFAULT)?;
    let adoption = Objective::AdoptionWeights(vec![0.0, 1.0, 0.0]);
    let s = design_influence(&product, 0.5, &adoption, policy, tol)?;
    println!(
        "promote {}: population {:?}, share {}",
        product.label(s.i_h_star),
        s.mu_star.weights(),
        s.f_star
    );

    let roads = builtin(BuiltinParams::Braess3 { rho: 0.8 })?;
    let s = design_influence(&roads, 0.5, &Objective::SocialUtility, policy, tol)?;
    println!("route the herd via {}: social utility {}", roads.label(s.i_h_star), s.f_star);
    for (k, value) in s.candidates {
        println!("  candidate {}: {value}", roads.label(k));
    }
    Ok(())
}
