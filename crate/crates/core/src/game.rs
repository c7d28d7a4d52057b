//! Games with utilities affine in the population measure,
//! `u(i, mu) = b_i + sum_j M_ij mu_j`, plus the built-in example games and the
//! JSON game file format.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::measures::Measure;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineUtility {
    pub b: Vec<f64>,
    pub m: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub name: Option<String>,
    labels: Vec<String>,
    utility: AffineUtility,
}

/// Parameters of the built-in games.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinParams {
    /// Product selection with constant utilities `c1 > c2 > c3`.
    Product { c1: f64, c2: f64, c3: f64 },
    /// Two-route network, actions `(A, B)`.
    Braess2 { rho: f64 },
    /// Three-route network with the `AB` link, actions `(A, B, AB)`.
    Braess3 { rho: f64 },
    /// Bandwidth sharing with levels `1, 1/2, ..., 1/n`.
    Bandwidth { n: usize },
}

impl BuiltinParams {
    pub const PRODUCT_DEFAULT: BuiltinParams = BuiltinParams::Product {
        c1: 3.0,
        c2: 2.0,
        c3: 1.0,
    };

    pub fn id(&self) -> &'static str {
        match self {
            BuiltinParams::Product { .. } => "product",
            BuiltinParams::Braess2 { .. } => "braess2",
            BuiltinParams::Braess3 { .. } => "braess3",
            BuiltinParams::Bandwidth { .. } => "bandwidth",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BuiltinParams::Product { c1, c2, c3 } => {
                if !(c1 > c2 && c2 > c3) || ![c1, c2, c3].iter().all(|c| c.is_finite()) {
                    return Err(Error::InvalidParams(format!(
                        "product constants must satisfy c1 > c2 > c3, got ({c1}, {c2}, {c3})"
                    )));
                }
            }
            BuiltinParams::Braess2 { rho } | BuiltinParams::Braess3 { rho } => {
                if !(rho > 0.0 && rho < 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "congestion coefficient rho must lie in (0, 1), got {rho}"
                    )));
                }
            }
            BuiltinParams::Bandwidth { n } => {
                if n < 2 {
                    return Err(Error::InvalidParams(format!(
                        "bandwidth needs at least 2 levels, got {n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Transmission levels of the bandwidth game, highest first.
pub fn bandwidth_levels(n: usize) -> Vec<f64> {
    (1..=n).map(|j| 1.0 / j as f64).collect()
}

pub fn builtin(params: BuiltinParams) -> Result<GameSpec> {
    params.validate()?;
    let (labels, b, m): (Vec<String>, Vec<f64>, Vec<Vec<f64>>) = match params {
        BuiltinParams::Product { c1, c2, c3 } => (
            vec!["1".into(), "2".into(), "3".into()],
            vec![c1, c2, c3],
            vec![vec![0.0; 3]; 3],
        ),
        BuiltinParams::Braess2 { rho } => (
            vec!["A".into(), "B".into()],
            vec![-1.0, -1.0],
            vec![vec![-rho, 0.0], vec![0.0, -rho]],
        ),
        BuiltinParams::Braess3 { rho } => (
            vec!["A".into(), "B".into(), "AB".into()],
            vec![-1.0, -1.0, 0.0],
            vec![
                vec![-rho, 0.0, -rho],
                vec![0.0, -rho, -rho],
                vec![-rho, -rho, -2.0 * rho],
            ],
        ),
        BuiltinParams::Bandwidth { n } => {
            let levels = bandwidth_levels(n);
            let labels = (1..=n)
                .map(|j| if j == 1 { "1".to_string() } else { format!("1/{j}") })
                .collect();
            let m = levels
                .iter()
                .map(|li| levels.iter().map(|lj| -li * lj).collect())
                .collect();
            (labels, levels, m)
        }
    };
    let mut game = GameSpec::new(labels, AffineUtility { b, m })?;
    game.name = Some(params.id().to_string());
    Ok(game)
}

impl GameSpec {
    pub fn new(labels: Vec<String>, utility: AffineUtility) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::InvalidGame(format!("need at least 2 actions, got {n}")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidGame(format!("duplicate action label {l:?}")));
            }
        }
        if utility.b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: utility.b.len(),
            });
        }
        if utility.m.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: utility.m.len(),
            });
        }
        if let Some(row) = utility.m.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        if !utility.b.iter().chain(utility.m.iter().flatten()).all(|v| v.is_finite()) {
            return Err(Error::InvalidGame("non-finite utility coefficient".into()));
        }
        Ok(Self {
            name: None,
            labels,
            utility,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn utility_form(&self) -> &AffineUtility {
        &self.utility
    }

    /// `u(i, w)` for a raw weight vector, unchecked.
    #[inline]
    pub(crate) fn utility_raw(&self, i: usize, w: &[f64]) -> f64 {
        self.utility.b[i]
            + self.utility.m[i]
                .iter()
                .zip(w)
                .map(|(m, x)| m * x)
                .sum::<f64>()
    }

    pub(crate) fn utilities_raw(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n()).map(|i| self.utility_raw(i, w)).collect()
    }

    fn check(&self, i: usize, mu: &Measure) -> Result<()> {
        if mu.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: mu.n(),
            });
        }
        if i >= self.n() {
            return Err(Error::ActionOutOfRange { index: i, n: self.n() });
        }
        Ok(())
    }

    pub fn utility(&self, i: usize, mu: &Measure) -> Result<f64> {
        self.check(i, mu)?;
        Ok(self.utility_raw(i, mu.weights()))
    }

    /// All `u(i, mu)` at once.
    pub fn utilities(&self, mu: &Measure) -> Result<Vec<f64>> {
        self.check(0, mu)?;
        Ok(self.utilities_raw(mu.weights()))
    }

    pub fn utility_diff(&self, i: usize, j: usize, mu: &Measure) -> Result<f64> {
        self.check(i, mu)?;
        self.check(j, mu)?;
        Ok(self.utility_raw(i, mu.weights()) - self.utility_raw(j, mu.weights()))
    }

    /// Mass-weighted average utility `sum_i mu_i u(i, mu)`.
    pub fn social_utility(&self, mu: &Measure) -> Result<f64> {
        self.check(0, mu)?;
        Ok(self.social_utility_raw(mu.weights()))
    }

    pub(crate) fn social_utility_raw(&self, w: &[f64]) -> f64 {
        w.iter()
            .enumerate()
            .map(|(i, x)| x * self.utility_raw(i, w))
            .sum()
    }

    /// The game seen by rational players once the herding fraction `1 - alpha`
    /// sits on `herding`: `u'(i, nu) = u(i, alpha nu + (1 - alpha) delta_herding)`.
    pub fn conditioned_on_herding(&self, herding: usize, alpha: f64) -> GameSpec {
        let u = &self.utility;
        let b = (0..self.n())
            .map(|i| u.b[i] + (1.0 - alpha) * u.m[i][herding])
            .collect();
        let m = u
            .m
            .iter()
            .map(|row| row.iter().map(|v| alpha * v).collect())
            .collect();
        GameSpec {
            name: self.name.as_ref().map(|n| format!("{n}|herding={herding}")),
            labels: self.labels.clone(),
            utility: AffineUtility { b, m },
        }
    }

    /// `u -> scale * u + shift` applied uniformly to every action.
    pub fn rescaled(&self, scale: f64, shift: f64) -> GameSpec {
        let u = &self.utility;
        GameSpec {
            name: self.name.clone(),
            labels: self.labels.clone(),
            utility: AffineUtility {
                b: u.b.iter().map(|v| scale * v + shift).collect(),
                m: u
                    .m
                    .iter()
                    .map(|row| row.iter().map(|v| scale * v).collect())
                    .collect(),
            },
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn number_array(v: &Value, path: &str) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| schema(&format!("{path}[{i}]"), "expected a number"))
        })
        .collect()
}

/// Parses a game document:
/// `{"name"?, "actions": [..], "utility": {"type": "affine"?, "b": [..], "M": [[..]]}}`.
pub fn parse_game(text: &str) -> Result<GameSpec> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| schema("$", format!("invalid JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| schema("$", "expected an object"))?;

    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema("$.name", "expected a string")),
    };
    let actions = obj
        .get("actions")
        .ok_or_else(|| schema("$.actions", "missing field"))?
        .as_array()
        .ok_or_else(|| schema("$.actions", "expected an array of strings"))?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            a.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema(&format!("$.actions[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    let utility = obj
        .get("utility")
        .ok_or_else(|| schema("$.utility", "missing field"))?
        .as_object()
        .ok_or_else(|| schema("$.utility", "expected an object"))?;
    match utility.get("type") {
        None => {}
        Some(Value::String(t)) if t == "affine" => {}
        Some(_) => return Err(schema("$.utility.type", "only \"affine\" is supported")),
    }
    let b = number_array(
        utility.get("b").ok_or_else(|| schema("$.utility.b", "missing field"))?,
        "$.utility.b",
    )?;
    let m = utility
        .get("M")
        .ok_or_else(|| schema("$.utility.M", "missing field"))?
        .as_array()
        .ok_or_else(|| schema("$.utility.M", "expected an array of rows"))?
        .iter()
        .enumerate()
        .map(|(i, row)| number_array(row, &format!("$.utility.M[{i}]")))
        .collect::<Result<Vec<_>>>()?;

    let n = actions.len();
    if b.len() != n {
        return Err(schema("$.utility.b", format!("expected {n} entries, got {}", b.len())));
    }
    if m.len() != n {
        return Err(schema("$.utility.M", format!("expected {n} rows, got {}", m.len())));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(schema(
                &format!("$.utility.M[{i}]"),
                format!("expected {n} entries, got {}", row.len()),
            ));
        }
    }
    let mut game = GameSpec::new(actions, AffineUtility { b, m })?;
    game.name = name;
    Ok(game)
}

pub fn game_to_json(g: &GameSpec) -> Value {
    let mut obj = Map::new();
    if let Some(name) = &g.name {
        obj.insert("name".into(), json!(name));
    }
    obj.insert("actions".into(), json!(g.labels));
    obj.insert(
        "utility".into(),
        json!({"type": "affine", "b": g.utility.b, "M": g.utility.m}),
    );
    Value::Object(obj)
}

pub fn serialize_game(g: &GameSpec) -> String {
    serde_json::to_string_pretty(&game_to_json(g)).expect("game serializes")
}
