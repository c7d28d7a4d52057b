//! Price of anarchy and stability, and the herding-versus-rational utility
//! comparison, on the three-route network.

use herding_games::{builtin, metrics_report, theorem2_check, BuiltinParams, HerdingPolicy, Tolerance};

fn main() -> herding_games::Result<()> {
    let g = builtin(BuiltinParams::Braess3 { rho: 0.8 })?;
    let tol = Tolerance::default();
    let policy = HerdingPolicy::DeclaredHerding;
    for alpha in [0.3, 0.5, 0.9] {
        let r = metrics_report(&g, alpha, policy, tol)?;
        println!("alpha = {alpha}: u*_s = {}, PoA = {:?}, PoS = {:?}", r.u_s_star, r.poa, r.pos);
        for c in theorem2_check(&g, alpha, policy, tol)?.checks {
            println!(
                "  herding on {}: u_R = {:.4}, u_I = {:.4}",
                g.label(c.herding_action),
                c.u_r,
                c.u_i
            );
        }
    }
    Ok(())
}
