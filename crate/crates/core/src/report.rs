//! Deterministic number formatting shared by the CLI and CSV writers.

/// Rounds to 12 significant digits so printed output is stable across
/// platforms and summation orders.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest decimal text of `round_sig(x)`.
pub fn fmt_num(x: f64) -> String {
    format!("{}", round_sig(x))
}
