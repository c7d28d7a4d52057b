//! The `herding` command-line interface.
//!
//! Actions are numbered from 1 in all output, alongside their labels.
//! [`run`] is the whole program minus process I/O, which keeps it testable.

use std::fs;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::alpharne::{alpha_rne_set, herding_choice_set, HerdingPolicy};
use crate::classical::{classical_equilibria, social_optimum, EquilibriumSet};
use crate::error::Error;
use crate::game::{builtin, parse_game, BuiltinParams, GameSpec};
use crate::influence::{design_influence, Objective};
use crate::measures::{Measure, Tolerance};
use crate::metrics::{metrics_report, sweep, write_sweep_csv, GridRange, MetricsReport};
use crate::oracle::{verify_set, OracleReport};
use crate::predict::{iterated_prediction, PredictionResult};
use crate::report::{fmt_num, round_sig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

const ABOUT: &str = "Exact equilibria of finite-action mean-field games with rational and herding players";

const LONG_ABOUT: &str = "\
Exact equilibria of finite-action mean-field games with rational and herding players.

A fraction ALPHA of the population best-responds; the remaining 1 - ALPHA herds
onto a single action.

Herding policies (--policy):
  declared  (default) herding players may occupy any majority action, or an
            action holding exactly 1 - ALPHA of the mass when
            ALPHA <= 1 - 1/n.
  strict    herding players occupy the majority action, ties broken to the
            smallest index. This is the literal majority rule; for
            ALPHA in (1/2, 1 - 1/n] it rejects equilibria that `declared` keeps.

Games: product (--c c1,c2,c3), braess2 / braess3 (--rho), bandwidth (--n),
or a path to a game JSON file. Actions are numbered from 1.

Exit codes: 0 success, 2 usage error, 3 solver error, 4 oracle disagreement.";

#[derive(Debug, Parser)]
#[command(name = "herding", version, about = ABOUT, long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All α-RNE with herding annotations and rational measures
    Solve(AlphaArgs),
    /// Classical equilibria and the social optimum
    Classical(CommonArgs),
    /// Social utilities, PoA/PoS and per-type utility checks
    Metrics(AlphaArgs),
    /// Actions that are the herding choice at some α-RNE
    HerdingSet(AlphaArgs),
    /// Iterated elimination of strictly dominated actions
    Predict(AlphaArgs),
    /// Best herding target for a designer objective
    Influence(InfluenceArgs),
    /// Grid sweep of the Braess network comparison (CSV)
    Sweep(SweepArgs),
    /// Cross-check the α-RNE set with the independent oracle
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Declared,
    Strict,
}

impl From<PolicyArg> for HerdingPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Declared => HerdingPolicy::DeclaredHerding,
            PolicyArg::Strict => HerdingPolicy::StrictMajority,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Adoption,
    Social,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Built-in game id or path to a game JSON file
    #[arg(long)]
    game: String,
    /// Congestion coefficient for braess2 / braess3
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Number of levels for bandwidth
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Product constants c1,c2,c3
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [3.0, 2.0, 1.0])]
    c: Vec<f64>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Declared)]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this file instead of standard output
    #[arg(long)]
    out: Option<String>,
    /// Tolerance for equalities and ties
    #[arg(long, default_value_t = Tolerance::DEFAULT_EPS)]
    eps: f64,
}

#[derive(Debug, Args)]
struct AlphaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Fraction of rational players, in (0, 1]
    #[arg(long)]
    alpha: f64,
}

#[derive(Debug, Args)]
struct InfluenceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    alpha: f64,
    /// Designer objective; defaults to adoption when --weights is given
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Adoption weights w1,w2,...
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep target; only braess-compare is available
    #[arg(long, default_value = "braess-compare")]
    game: String,
    /// Alpha grid lo:hi:count (cell midpoints) or a single value
    #[arg(long, default_value = "0:1:50")]
    alpha: String,
    /// Rho grid lo:hi:count (cell midpoints) or a single value
    #[arg(long, default_value = "0.6666666666666666:1:50")]
    rho: String,
    #[arg(long, value_enum, default_value_t = PolicyArg::Declared)]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = Tolerance::DEFAULT_EPS)]
    eps: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    alpha: f64,
    /// Grid denominator of the completeness scan (at least 50)
    #[arg(long, default_value_t = 100)]
    grid: usize,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Self { code, stdout: String::new(), stderr }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegenerateGame { .. }
        | Error::IllPosed { .. }
        | Error::UndefinedRatio
        | Error::EmptyHerdingSet => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI on `args` (without the program name).
pub fn run<I, S>(args: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("herding".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput::fail(EXIT_USAGE, text)
            } else {
                CliOutput::ok(text)
            };
        }
    };
    match execute(cli.command) {
        Ok((code, doc, out)) => match out {
            Some(path) => match fs::write(&path, &doc) {
                Ok(()) => CliOutput { code, stdout: String::new(), stderr: String::new() },
                Err(e) => CliOutput::fail(EXIT_USAGE, format!("error: cannot write {path}: {e}\n")),
            },
            None => CliOutput { code, stdout: doc, stderr: String::new() },
        },
        Err(e) => CliOutput::fail(exit_code(&e), format!("error: {e}\n")),
    }
}

type Outcome = (i32, String, Option<String>);

fn execute(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Solve(a) => {
            let (g, tol, policy) = setup(&a.common)?;
            let set = alpha_rne_set(&g, a.alpha, policy, tol)?;
            let doc = render(a.common.format, || solve_json(&g, a.alpha, policy, &set), || solve_table(&g, &set))?;
            Ok((EXIT_OK, doc, a.common.out))
        }
        Command::Classical(c) => {
            let (g, tol, _) = setup(&c)?;
            let set = classical_equilibria(&g, tol)?;
            let opt = social_optimum(&g, tol)?;
            let json_doc = || {
                let mut v = solve_json(&g, 1.0, HerdingPolicy::default(), &set);
                v["social_optimum"] = json!({ "mu": nums(opt.argmax.weights()), "value": num(opt.value) });
                if let Some(o) = v.as_object_mut() {
                    o.remove("alpha");
                    o.remove("policy");
                }
                v
            };
            let table = || {
                format!(
                    "{}social optimum {} at {}\n",
                    solve_table(&g, &set),
                    fmt_num(opt.value),
                    measure_text(&g, &opt.argmax)
                )
            };
            let doc = render(c.format, json_doc, table)?;
            Ok((EXIT_OK, doc, c.out))
        }
        Command::Metrics(a) => {
            let (g, tol, policy) = setup(&a.common)?;
            let report = metrics_report(&g, a.alpha, policy, tol)?;
            let doc = render(a.common.format, || metrics_json(&g, &report), || metrics_table(&g, &report))?;
            Ok((EXIT_OK, doc, a.common.out))
        }
        Command::HerdingSet(a) => {
            let (g, tol, policy) = setup(&a.common)?;
            let h = herding_choice_set(&g, a.alpha, policy, tol)?;
            let json_doc = || {
                json!({
                    "game": game_header(&g),
                    "alpha": num(a.alpha),
                    "policy": policy.to_string(),
                    "herding_set": h.iter().map(|&k| action(&g, k)).collect::<Vec<_>>(),
                })
            };
            let table = || {
                let names: Vec<String> = h.iter().map(|&k| action_text(&g, k)).collect();
                format!("H_alpha = {{{}}}\n", names.join(", "))
            };
            let doc = render(a.common.format, json_doc, table)?;
            Ok((EXIT_OK, doc, a.common.out))
        }
        Command::Predict(a) => {
            let (g, tol, policy) = setup(&a.common)?;
            let r = iterated_prediction(&g, a.alpha, policy, tol)?;
            let doc = render(a.common.format, || predict_json(&g, a.alpha, policy, &r), || predict_table(&g, &r))?;
            Ok((EXIT_OK, doc, a.common.out))
        }
        Command::Influence(a) => {
            let (g, tol, policy) = setup(&a.common)?;
            let objective = match (a.objective, a.weights) {
                (Some(ObjectiveArg::Social), _) => Objective::SocialUtility,
                (_, Some(w)) => Objective::AdoptionWeights(w),
                (Some(ObjectiveArg::Adoption), None) => {
                    return Err(Error::InvalidParams("adoption objective needs --weights".into()))
                }
                (None, None) => Objective::SocialUtility,
            };
            let s = design_influence(&g, a.alpha, &objective, policy, tol)?;
            let json_doc = || {
                json!({
                    "game": game_header(&g),
                    "alpha": num(a.alpha),
                    "policy": policy.to_string(),
                    "objective": match &objective {
                        Objective::SocialUtility => json!({ "mode": "social" }),
                        Objective::AdoptionWeights(w) => json!({ "mode": "adoption", "weights": nums(w) }),
                    },
                    "i_h_star": action(&g, s.i_h_star),
                    "nu_star": nums(s.nu_star.weights()),
                    "mu_r_star": nums(s.mu_r_star.weights()),
                    "mu_star": nums(s.mu_star.weights()),
                    "f_star": num(s.f_star),
                    "candidates": s.candidates.iter().map(|(k, f)| json!({ "herding": action(&g, *k), "f": num(*f) })).collect::<Vec<_>>(),
                })
            };
            let table = || {
                format!(
                    "i_H* = {}\nmu* = {}\nmu_R* = {}\nf* = {}\n",
                    action_text(&g, s.i_h_star),
                    measure_text(&g, &s.mu_star),
                    measure_text(&g, &s.mu_r_star),
                    fmt_num(s.f_star)
                )
            };
            let doc = render(a.common.format, json_doc, table)?;
            Ok((EXIT_OK, doc, a.common.out))
        }
        Command::Sweep(a) => {
            let tol = Tolerance::new(a.eps)?;
            let rows = sweep(&a.game, GridRange::parse(&a.alpha)?, GridRange::parse(&a.rho)?, a.policy.into(), tol)?;
            let doc = match a.format {
                Format::Csv | Format::Table => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                Format::Json => pretty(&json!(rows
                    .iter()
                    .map(|r| json!({
                        "alpha": num(r.alpha),
                        "rho": num(r.rho),
                        "g_b": num(r.g_b),
                        "g_w": num(r.g_w),
                        "sign_b": r.sign_b.as_str(),
                        "poa": num(r.poa),
                        "pos": num(r.pos),
                    }))
                    .collect::<Vec<_>>())),
            };
            Ok((EXIT_OK, doc, a.out))
        }
        Command::Verify(a) => {
            let (g, tol, policy) = setup(&a.common)?;
            let set = alpha_rne_set(&g, a.alpha, policy, tol)?;
            let report = verify_set(&g, a.alpha, policy, &set, a.grid, tol)?;
            let code = if report.agreement { EXIT_OK } else { EXIT_DISAGREEMENT };
            let doc = render(a.common.format, || verify_json(&g, a.alpha, policy, &report), || verify_table(&report))?;
            Ok((code, doc, a.common.out))
        }
    }
}

fn setup(c: &CommonArgs) -> Result<(GameSpec, Tolerance, HerdingPolicy), Error> {
    Ok((load_game(c)?, Tolerance::new(c.eps)?, c.policy.into()))
}

fn load_game(c: &CommonArgs) -> Result<GameSpec, Error> {
    let params = match c.game.as_str() {
        "product" => BuiltinParams::Product { c1: c.c[0], c2: c.c[1], c3: c.c[2] },
        "braess2" => BuiltinParams::Braess2 { rho: c.rho },
        "braess3" => BuiltinParams::Braess3 { rho: c.rho },
        "bandwidth" => BuiltinParams::Bandwidth { n: c.n },
        path if Path::new(path).is_file() => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidGame(format!("cannot read {path}: {e}")))?;
            return parse_game(&text);
        }
        other => {
            return Err(Error::InvalidGame(format!(
                "'{other}' is neither a built-in game (product, braess2, braess3, bandwidth) nor a readable file"
            )))
        }
    };
    builtin(params)
}

fn render<J, T>(format: Format, json_doc: J, table: T) -> Result<String, Error>
where
    J: FnOnce() -> Value,
    T: FnOnce() -> String,
{
    match format {
        Format::Json => Ok(pretty(&json_doc())),
        Format::Table => Ok(table()),
        Format::Csv => Err(Error::Unsupported("csv output is only available for sweep".into())),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

fn action(g: &GameSpec, k: usize) -> Value {
    json!({ "action": k + 1, "label": g.label(k) })
}

fn action_text(g: &GameSpec, k: usize) -> String {
    format!("{} ({})", k + 1, g.label(k))
}

fn measure_text(g: &GameSpec, mu: &Measure) -> String {
    let parts: Vec<String> = mu
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{}={}", g.label(i), fmt_num(*w)))
        .collect();
    format!("({})", parts.join(", "))
}

fn game_header(g: &GameSpec) -> Value {
    json!({ "name": g.name, "labels": g.labels() })
}

fn solve_json(g: &GameSpec, alpha: f64, policy: HerdingPolicy, set: &EquilibriumSet) -> Value {
    let points: Vec<Value> = set
        .points
        .iter()
        .map(|p| {
            json!({
                "mu": nums(p.mu.weights()),
                "herding": p.herding.iter().map(|h| {
                    let mut a = action(g, h.action);
                    a["mu_r"] = nums(h.mu_r.weights());
                    a
                }).collect::<Vec<_>>(),
            })
        })
        .collect();
    let families: Vec<Value> = set
        .families
        .iter()
        .map(|f| {
            json!({
                "base": nums(&f.base),
                "direction": nums(&f.direction),
                "t_range": [num(f.t_range.0), num(f.t_range.1)],
                "herding": f.herding_action.map(|k| action(g, k)),
            })
        })
        .collect();
    json!({
        "game": game_header(g),
        "alpha": num(alpha),
        "policy": policy.to_string(),
        "equilibria": points,
        "families": families,
    })
}

fn solve_table(g: &GameSpec, set: &EquilibriumSet) -> String {
    let mut s = format!("{} equilibria\n", set.points.len());
    for p in &set.points {
        let herding: Vec<String> = p.herding.iter().map(|h| action_text(g, h.action)).collect();
        s.push_str(&measure_text(g, &p.mu));
        if !herding.is_empty() {
            s.push_str(&format!("  herding on {}", herding.join(", ")));
        }
        s.push('\n');
    }
    for f in &set.families {
        let (a, b) = f.endpoints();
        s.push_str(&format!(
            "segment from ({}) to ({})\n",
            a.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", "),
            b.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ")
        ));
    }
    s
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn metrics_json(g: &GameSpec, r: &MetricsReport) -> Value {
    json!({
        "game": game_header(g),
        "alpha": num(r.alpha),
        "policy": r.policy.to_string(),
        "u_s_star": num(r.u_s_star),
        "optimum": nums(r.optimum.weights()),
        "poa": opt_num(r.poa),
        "pos": opt_num(r.pos),
        "equilibria": r.equilibria.iter().map(|e| json!({
            "mu": nums(e.mu.weights()),
            "social_utility": num(e.social_utility),
            "per_type": e.per_type.iter().map(|(k, ur, ui)| {
                let mut a = action(g, *k);
                a["u_r"] = num(*ur);
                a["u_i"] = num(*ui);
                a
            }).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "theorem2": r.theorem2.as_ref().map(|t| json!({
            "all_hold": t.all_hold(),
            "checks": t.checks.iter().map(|c| json!({
                "mu": nums(c.mu.weights()),
                "herding": action(g, c.herding_action),
                "u_r": num(c.u_r),
                "u_i": num(c.u_i),
                "in_n1": c.in_n1,
                "u_i_le_u_r": c.herding_not_above_rational,
                "u_i_le_u_s_star": c.herding_not_above_optimum,
                "u_r_eq_u_i": c.equal_utilities,
                "u_s_star_ge_u_r": c.optimum_not_below_rational,
            })).collect::<Vec<_>>(),
        })),
    })
}

fn metrics_table(g: &GameSpec, r: &MetricsReport) -> String {
    let show = |x: Option<f64>| x.map_or("undefined".to_string(), fmt_num);
    let mut s = format!(
        "u_s* = {} at {}\nPoA = {}\nPoS = {}\n",
        fmt_num(r.u_s_star),
        measure_text(g, &r.optimum),
        show(r.poa),
        show(r.pos)
    );
    for e in &r.equilibria {
        s.push_str(&format!("{}  u_s = {}", measure_text(g, &e.mu), fmt_num(e.social_utility)));
        for (k, ur, ui) in &e.per_type {
            s.push_str(&format!("  [herding {}: u_R = {}, u_I = {}]", action_text(g, *k), fmt_num(*ur), fmt_num(*ui)));
        }
        s.push('\n');
    }
    if let Some(t) = &r.theorem2 {
        s.push_str(&format!("herding-vs-rational checks: {}\n", if t.all_hold() { "all hold" } else { "VIOLATED" }));
    }
    s
}

fn predict_json(g: &GameSpec, alpha: f64, policy: HerdingPolicy, r: &PredictionResult) -> Value {
    json!({
        "game": game_header(g),
        "alpha": num(alpha),
        "policy": policy.to_string(),
        "herding_set": r.herding_set.iter().map(|&k| action(g, k)).collect::<Vec<_>>(),
        "trace": r.trace.iter().map(|e| json!({
            "round": e.round,
            "eliminated": action(g, e.eliminated),
            "dominated_by": action(g, e.dominated_by),
        })).collect::<Vec<_>>(),
        "surviving": r.surviving.iter().map(|&k| action(g, k)).collect::<Vec<_>>(),
        "unique_prediction": r.unique_prediction.map(|k| action(g, k)),
    })
}

fn predict_table(g: &GameSpec, r: &PredictionResult) -> String {
    let mut s = String::new();
    for e in &r.trace {
        s.push_str(&format!(
            "round {}: eliminate {} (dominated by {})\n",
            e.round,
            action_text(g, e.eliminated),
            action_text(g, e.dominated_by)
        ));
    }
    let surviving: Vec<String> = r.surviving.iter().map(|&k| action_text(g, k)).collect();
    s.push_str(&format!("surviving: {}\n", surviving.join(", ")));
    match r.unique_prediction {
        Some(k) => s.push_str(&format!("prediction: {}\n", action_text(g, k))),
        None => s.push_str("prediction: none\n"),
    }
    s
}

fn verify_json(g: &GameSpec, alpha: f64, policy: HerdingPolicy, r: &OracleReport) -> Value {
    json!({
        "game": game_header(g),
        "alpha": num(alpha),
        "policy": policy.to_string(),
        "agreement": r.agreement,
        "scanned_clusters": r.scanned_clusters,
        "membership_failures": r.membership_failures.iter().map(|f| json!({
            "mu": nums(&f.weights),
            "reason": f.reason,
        })).collect::<Vec<_>>(),
        "completeness_suspects": r.completeness_suspects.iter().map(|w| nums(w)).collect::<Vec<_>>(),
    })
}

fn verify_table(r: &OracleReport) -> String {
    format!(
        "agreement: {}\nmembership failures: {}\ncompleteness suspects: {}\nscanned clusters: {}\n",
        r.agreement,
        r.membership_failures.len(),
        r.completeness_suspects.len(),
        r.scanned_clusters
    )
}
