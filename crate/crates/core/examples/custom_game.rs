//! Loading a game from JSON and solving it.

use herding_games::{alpha_rne_set, classical_equilibria, parse_game, social_optimum, HerdingPolicy, Tolerance};

const GAME: &str = r#"{
  "name": "coordination",
  "actions": ["left", "right"],
  "utility": { "type": "affine", "b": [0.2, 0], "M": [[1, 0], [0, 1]] }
}"#;

fn main() -> herding_games::Result<()> {
    let g = parse_game(GAME)?;
    let tol = Tolerance::default();
    let opt = social_optimum(&g, tol)?;
    println!("optimum {:?} worth {}", opt.argmax.weights(), opt.value);
    let nash = classical_equilibria(&g, tol)?;
    println!("classical: {:?}", nash.measures().iter().map(|m| m.weights()).collect::<Vec<_>>());
    let herd = alpha_rne_set(&g, 0.3, HerdingPolicy::DeclaredHerding, tol)?;
    for p in &herd.points {
        println!("alpha 0.3: {:?} herding on {:?}", p.mu.weights(), p.herding_actions());
    }
    Ok(())
}
