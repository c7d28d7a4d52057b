//! Cross-checking the exact solver against the brute-force oracle on
//! random games.

use herding_games::{alpha_rne_set, random_affine_game, verify_set, HerdingPolicy, Tolerance};

fn main() -> herding_games::Result<()> {
    let tol = Tolerance::default();
    let policy = HerdingPolicy::DeclaredHerding;
    for seed in 0..8 {
        let g = random_affine_game(3, seed);
        let set = match alpha_rne_set(&g, 0.6, policy, tol) {
            Ok(set) => set,
            Err(e) => {
                println!("seed {seed}: {e}");
                continue;
            }
        };
        let report = verify_set(&g, 0.6, policy, &set, 80, tol)?;
        println!(
            "seed {seed}: {} points, {} families, {} clusters scanned, agreement {}",
            set.points.len(),
            set.families.len(),
            report.scanned_clusters,
            report.agreement
        );
    }
    Ok(())
}
