//! Iterated elimination of dominated actions.

use herding_games::{builtin, iterated_prediction, BuiltinParams, HerdingPolicy, Tolerance};

fn main() -> herding_games::Result<()> {
    let tol = Tolerance::default();
    for params in [BuiltinParams::PRODUCT_DEFAULT, BuiltinParams::Braess3 { rho: 0.8 }] {
        let g = builtin(params)?;
        let r = iterated_prediction(&g, 0.5, HerdingPolicy::DeclaredHerding, tol)?;
        println!("{}:", params.id());
        for e in &r.trace {
            println!(
                "  round {}: {} dominated by {}",
                e.round,
                g.label(e.eliminated),
                g.label(e.dominated_by)
            );
        }
        match r.unique_prediction {
            Some(a) => println!("  prediction: {}", g.label(a)),
            None => println!("  survivors: {:?}", r.surviving),
        }
    }
    Ok(())
}
