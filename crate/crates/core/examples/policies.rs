//! Where the strict-majority and declared-herding rules part ways.

use herding_games::{builtin, herding_choice_set, BuiltinParams, HerdingPolicy, Tolerance};

fn main() -> herding_games::Result<()> {
    let g = builtin(BuiltinParams::Bandwidth { n: 3 })?;
    let tol = Tolerance::default();
    for alpha in [0.3, 0.5, 0.6, 0.7] {
        let strict = herding_choice_set(&g, alpha, HerdingPolicy::StrictMajority, tol)?;
        let declared = herding_choice_set(&g, alpha, HerdingPolicy::DeclaredHerding, tol)?;
        println!("alpha = {alpha}: strict {strict:?}, declared {declared:?}");
    }
    Ok(())
}
