//! Coarse map of when adding the shortcut helps or hurts, printed as a
//! character grid (`+` paradox, `-` improvement, `0` neutral).

use herding_games::metrics::BraessSign;
use herding_games::{sweep, GridRange, HerdingPolicy, Tolerance};

fn main() -> herding_games::Result<()> {
    let alpha = GridRange::new(0.0, 1.0, 40)?;
    let rho = GridRange::new(2.0 / 3.0, 1.0, 12)?;
    let rows = sweep("braess-compare", alpha, rho, HerdingPolicy::DeclaredHerding, Tolerance::default())?;
    let per_alpha = rho.values().len();
    for (r, rho_value) in rho.values().iter().enumerate().rev() {
        let line: String = rows
            .iter()
            .skip(r)
            .step_by(per_alpha)
            .map(|row| match row.sign_b {
                BraessSign::Paradox => '+',
                BraessSign::Improvement => '-',
                _ => '0',
            })
            .collect();
        println!("rho {rho_value:.3} {line}");
    }
    Ok(())
}
