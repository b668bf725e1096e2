//! The seven subcommands. Each one loads inputs, calls the library, and
//! emits a report through [`crate::out`]; nothing here computes anything
//! the library could.

use std::fs;
use std::time::Instant;

use num::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use spreadlab::diagprod::{build_diagonal_product, counting_report};
use spreadlab::f2::{AffineSubspace, F2Set};
use spreadlab::games::{
    concentration_experiment, conditional_win_experiment, game_value_bruteforce, make_ghz_game,
    strategy_battery, Game, RepeatedGame,
};
use spreadlab::infostats::{
    binary_entropy_gap, chernoff_reference, conditional_marginal_report, entropy_report, TripleSet,
};
use spreadlab::rat::{format_rat, parse_rat, rat, to_f64, Rat};
use spreadlab::spread::{check_algebraic_spread, AlgebraicVerdict, CheckMode, SpreadParams};
use spreadlab::uniformize::{uniformize_recursive, verify_decomposition, DecompositionResult};
use spreadlab::Budgets;

use crate::out::{emit_csv, emit_json, invalid, parse_dest, postcondition, Dest, Failure, Format};
use crate::{
    AppendixCheckArgs, ConcentrationArgs, GameValueArgs, HardCoordinateArgs, SpreadCheckArgs,
    SquareCoverArgs, UniformizeArgs,
};

pub struct Ctx {
    pub budgets: Budgets,
    pub verbose: bool,
}

impl Ctx {
    fn note(&self, msg: &str) {
        if self.verbose {
            eprintln!("[spreadlab] {msg}");
        }
    }

    /// Budget flags echoed into every report's config object.
    fn config(&self, mut v: serde_json::Value) -> serde_json::Value {
        if let serde_json::Value::Object(m) = &mut v {
            m.insert("max_pairs".into(), self.budgets.max_pair_bits.into());
            m.insert("max_triples".into(), self.budgets.max_triples.into());
        }
        v
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {path}: {e}")))
}

fn load_set(path: &str) -> Result<F2Set, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(|e| invalid(format!("{path}: {e}")))
}

fn load_space(path: &str) -> Result<AffineSubspace, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(|e| invalid(format!("{path}: {e}")))
}

/// The literal "ghz" or a game file path.
fn load_game(arg: &str) -> Result<Game, Failure> {
    if arg == "ghz" {
        return Ok(make_ghz_game());
    }
    Game::from_json(&read_file(arg)?).map_err(|e| invalid(format!("{arg}: {e}")))
}

fn parse_rat_flag(flag: &str, text: &str) -> Result<Rat, Failure> {
    parse_rat(text).map_err(|e| invalid(format!("{flag}: {e}")))
}

fn millis(t0: Instant) -> u64 {
    t0.elapsed().as_millis() as u64
}

/// An exact rational alongside its float rendering, for reports that feed
/// both assertions and plots.
#[derive(Serialize)]
struct RatJson {
    exact: String,
    value: f64,
}

impl RatJson {
    fn of(r: &Rat) -> RatJson {
        RatJson {
            exact: format_rat(r),
            value: to_f64(r),
        }
    }

    fn of_big(b: &num::BigRational) -> RatJson {
        RatJson {
            exact: b.to_string(),
            value: b.to_f64().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Serialize)]
struct VerdictJson {
    passed: bool,
    ratio: RatJson,
    exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<AffineSubspace>,
}

impl VerdictJson {
    fn of(v: &AlgebraicVerdict) -> VerdictJson {
        VerdictJson {
            passed: v.passed,
            ratio: RatJson::of(&v.observed_ratio),
            exhaustive: v.exhaustive,
            witness: v.witness.clone(),
        }
    }
}

fn parse_mode(mode: &str, seed_flag: Option<u64>) -> Result<CheckMode, Failure> {
    if mode == "exact" {
        return Ok(CheckMode::Exact);
    }
    let Some(rest) = mode.strip_prefix("sampled:") else {
        return Err(invalid(format!(
            "--mode expects \"exact\" or \"sampled:COUNT[:SEED]\", got {mode:?}"
        )));
    };
    let (count_text, seed) = match rest.split_once(':') {
        Some((c, s)) => {
            let seed: u64 = s
                .parse()
                .map_err(|_| invalid(format!("--mode sampled seed {s:?} is not a u64")))?;
            (c, seed)
        }
        None => match seed_flag {
            Some(s) => (rest, s),
            None => {
                return Err(invalid(
                    "sampled mode needs an explicit seed: add :SEED to --mode or pass --seed",
                ))
            }
        },
    };
    let samples: u64 = count_text
        .parse()
        .map_err(|_| invalid(format!("--mode sample count {count_text:?} is not a u64")))?;
    if samples == 0 {
        return Err(invalid("--mode sample count must be at least 1"));
    }
    Ok(CheckMode::Sampled { samples, seed })
}

pub fn spread_check(ctx: &Ctx, a: &SpreadCheckArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let dest = parse_dest(a.out.as_deref(), false)?;
    let set = load_set(&a.set)?;
    let space = match &a.space {
        Some(p) => load_space(p)?,
        None => AffineSubspace::full_space(set.ambient_dim())?,
    };
    let eps = parse_rat_flag("--eps", &a.eps)?;
    let params = SpreadParams::new(a.r, eps)?;
    let mode = parse_mode(&a.mode, a.seed)?;
    ctx.note(&format!(
        "checking ({}, {}) spreadness of a {}-point set",
        a.r,
        format_rat(&params.eps),
        set.size()
    ));
    let verdict = check_algebraic_spread(&set, &space, &params, mode, &ctx.budgets)?;
    let mode_echo = match mode {
        CheckMode::Exact => json!({"kind": "exact"}),
        CheckMode::Sampled { samples, seed } => {
            json!({"kind": "sampled", "samples": samples, "seed": seed})
        }
    };
    let config = ctx.config(json!({
        "set": a.set,
        "space": a.space,
        "r": a.r,
        "eps": format_rat(&params.eps),
        "mode": mode_echo,
    }));
    emit_json(
        &dest,
        "spread-check",
        config,
        millis(t0),
        VerdictJson::of(&verdict),
    )
}

#[derive(Serialize)]
struct SizesJson {
    x: u64,
    y: u64,
    z: u64,
    s: u64,
    t: u64,
}

#[derive(Serialize)]
struct DeviationsJson {
    s_density: RatJson,
    gamma_l1: RatJson,
    gamma_l2_sq: RatJson,
    t_normalized: RatJson,
}

#[derive(Serialize)]
struct SquareCoverJson {
    n: u32,
    sizes: SizesJson,
    alphas: [RatJson; 3],
    deviations: DeviationsJson,
    l1_mu_us: RatJson,
    mean_nontrivial: RatJson,
    /// Histogram of nonzero side-coordinate counts over the square triples.
    nontrivial_histogram: Vec<u64>,
}

/// Frozen column order for sweep post-processing; see also --help.
const SQUARE_COVER_HEADER: &str = "n,x_size,y_size,z_size,s_size,t_count,alpha_x,alpha_y,\
alpha_z,dev_s_density,dev_gamma_l1,dev_gamma_l2_sq,dev_t_normalized,l1_mu_us,mean_nontrivial";

pub fn square_cover(ctx: &Ctx, a: &SquareCoverArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let dest = parse_dest(a.out.as_deref(), true)?;
    let x = load_set(&a.x)?;
    let y = load_set(&a.y)?;
    let z = load_set(&a.z)?;
    ctx.note("building the diagonal product");
    let dp = build_diagonal_product(&x, &y, &z, &ctx.budgets)?;
    let report = counting_report(&dp)?;
    let l1_mu_us = dp.mu_uniform_l1()?;
    let (mean_nontrivial, hist) = dp.nontrivial_stats()?;
    let config = ctx.config(json!({"x": a.x, "y": a.y, "z": a.z}));
    if dest.format() == Format::Csv {
        let row = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            report.n,
            x.size(),
            y.size(),
            z.size(),
            report.s_size,
            report.t_count,
            to_f64(&report.alphas[0]),
            to_f64(&report.alphas[1]),
            to_f64(&report.alphas[2]),
            report.dev_s_density.to_f64().unwrap_or(f64::NAN),
            report.dev_gamma_l1.to_f64().unwrap_or(f64::NAN),
            report.dev_gamma_l2_sq.to_f64().unwrap_or(f64::NAN),
            report.dev_t_normalized.to_f64().unwrap_or(f64::NAN),
            to_f64(&l1_mu_us),
            to_f64(&mean_nontrivial),
        );
        return emit_csv(&dest, SQUARE_COVER_HEADER, &[row]);
    }
    let payload = SquareCoverJson {
        n: report.n,
        sizes: SizesJson {
            x: x.size(),
            y: y.size(),
            z: z.size(),
            s: report.s_size,
            t: report.t_count,
        },
        alphas: [
            RatJson::of(&report.alphas[0]),
            RatJson::of(&report.alphas[1]),
            RatJson::of(&report.alphas[2]),
        ],
        deviations: DeviationsJson {
            s_density: RatJson::of_big(&report.dev_s_density),
            gamma_l1: RatJson::of_big(&report.dev_gamma_l1),
            gamma_l2_sq: RatJson::of_big(&report.dev_gamma_l2_sq),
            t_normalized: RatJson::of_big(&report.dev_t_normalized),
        },
        l1_mu_us: RatJson::of(&l1_mu_us),
        mean_nontrivial: RatJson::of(&mean_nontrivial),
        nontrivial_histogram: hist,
    };
    emit_json(&dest, "square-cover", config, millis(t0), payload)
}

#[derive(Serialize)]
struct CertTripleJson {
    x: VerdictJson,
    y: VerdictJson,
    z: VerdictJson,
}

#[derive(Serialize)]
struct PieceJson {
    space: AffineSubspace,
    x_shift: u32,
    y_shift: u32,
    z_shift: u32,
    x_part: F2Set,
    y_part: F2Set,
    z_part: F2Set,
    pair_count: u64,
    good: bool,
    certificates: CertTripleJson,
}

#[derive(Serialize)]
struct VerifyJson {
    passed: bool,
    checks: u64,
    covered: u64,
    total: u64,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct DecompJson {
    n: u32,
    r: u32,
    eps: String,
    eta: String,
    total: u64,
    covered: u64,
    remainder: u64,
    coverage: f64,
    piece_count: usize,
    good_count: usize,
    good: Vec<usize>,
    pieces: Vec<PieceJson>,
    verification: VerifyJson,
}

fn decomp_json(
    result: &DecompositionResult,
    verification: &spreadlab::uniformize::VerificationReport,
) -> DecompJson {
    let good_set: std::collections::HashSet<usize> = result.good.iter().copied().collect();
    let pieces = result
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| PieceJson {
            space: p.space.clone(),
            x_shift: p.x_shift,
            y_shift: p.y_shift,
            z_shift: p.x_shift ^ p.y_shift,
            x_part: p.xi.clone(),
            y_part: p.yi.clone(),
            z_part: p.zi.clone(),
            pair_count: p.pair_count,
            good: good_set.contains(&i),
            certificates: CertTripleJson {
                x: VerdictJson::of(&p.certs.x),
                y: VerdictJson::of(&p.certs.y),
                z: VerdictJson::of(&p.certs.z),
            },
        })
        .collect();
    DecompJson {
        n: result
            .pieces
            .first()
            .map(|p| p.space.ambient_dim())
            .unwrap_or(0),
        r: result.params.r,
        eps: format_rat(&result.params.eps),
        eta: format_rat(&result.eta),
        total: result.total,
        covered: result.covered,
        remainder: result.remainder,
        coverage: if result.total == 0 {
            1.0
        } else {
            result.covered as f64 / result.total as f64
        },
        piece_count: result.pieces.len(),
        good_count: result.good.len(),
        good: result.good.clone(),
        pieces,
        verification: VerifyJson {
            passed: verification.passed(),
            checks: verification.checks,
            covered: verification.covered,
            total: verification.total,
            failures: verification.failures.clone(),
        },
    }
}

pub fn uniformize(ctx: &Ctx, a: &UniformizeArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let dest = parse_dest(a.out.as_deref(), false)?;
    let x = load_set(&a.x)?;
    let y = load_set(&a.y)?;
    let z = load_set(&a.z)?;
    let space = match &a.space {
        Some(p) => load_space(p)?,
        None => AffineSubspace::full_space(x.ambient_dim())?,
    };
    let eps = parse_rat_flag("--eps", &a.eps)?;
    let eta = parse_rat_flag("--eta", &a.eta)?;
    let params = SpreadParams::new(a.r, eps)?;
    let depth = match a.depth.as_str() {
        "auto" => None,
        d => Some(
            d.parse::<u32>()
                .map_err(|_| invalid(format!("--depth expects \"auto\" or a number, got {d:?}")))?,
        ),
    };
    ctx.note("decomposing");
    let result = uniformize_recursive(&x, &y, &z, &space, &params, &eta, depth, &ctx.budgets)?;
    ctx.note(&format!(
        "covered {} of {} pairs in {} pieces; re-verifying",
        result.covered,
        result.total,
        result.pieces.len()
    ));
    let verification = verify_decomposition(&result, &x, &y, &z, &space, &ctx.budgets)?;
    let config = ctx.config(json!({
        "x": a.x,
        "y": a.y,
        "z": a.z,
        "space": a.space,
        "r": a.r,
        "eps": format_rat(&params.eps),
        "eta": format_rat(&eta),
        "depth": a.depth,
    }));
    let payload = decomp_json(&result, &verification);
    emit_json(&dest, "uniformize", config, millis(t0), payload)?;
    if !verification.passed() {
        return Err(postcondition(format!(
            "verification found {} failure(s); first: {}",
            verification.failures.len(),
            verification.failures[0]
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct GameValueJson {
    game: String,
    reps: Option<u32>,
    value: RatJson,
    question_sizes: [u32; 3],
    answer_sizes: [u32; 3],
}

pub fn game_value(ctx: &Ctx, a: &GameValueArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let base = load_game(&a.game)?;
    let valued = match a.reps {
        None => base,
        Some(n) => {
            ctx.note(&format!("flattening the {n}-fold repetition"));
            RepeatedGame::new(base, n)?.flatten()?
        }
    };
    ctx.note("brute-forcing the value");
    let (value, _) = game_value_bruteforce(&valued, &ctx.budgets)?;
    let Some(out) = &a.out else {
        println!("{}", format_rat(&value));
        return Ok(());
    };
    let dest = parse_dest(Some(out), false)?;
    if matches!(dest, Dest::File(..)) {
        println!("{}", format_rat(&value));
    }
    let config = ctx.config(json!({"game": a.game, "reps": a.reps}));
    let payload = GameValueJson {
        game: a.game.clone(),
        reps: a.reps,
        value: RatJson::of(&value),
        question_sizes: valued.question_sizes(),
        answer_sizes: valued.answer_sizes(),
    };
    emit_json(&dest, "game-value", config, millis(t0), payload)
}

#[derive(Serialize)]
struct HardCoordRowJson {
    name: String,
    mean: RatJson,
    max_coordinate: RatJson,
}

#[derive(Serialize)]
struct HardCoordinateJson {
    game: String,
    n: u32,
    seed: u64,
    battery: String,
    event_sizes: [u64; 3],
    support_size: u64,
    rows: Vec<HardCoordRowJson>,
    max_mean: RatJson,
    max_mean_name: String,
}

pub fn hard_coordinate(ctx: &Ctx, a: &HardCoordinateArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let dest = parse_dest(a.out.as_deref(), false)?;
    if a.battery != "default" {
        return Err(invalid(format!(
            "unknown battery {:?}; the only battery is \"default\"",
            a.battery
        )));
    }
    let seed = a
        .seed
        .ok_or_else(|| invalid("the battery is seeded; pass --seed"))?;
    let base = load_game(&a.game)?;
    let e = load_set(&a.e)?;
    let f = load_set(&a.f)?;
    let g = load_set(&a.g)?;
    for (flag, set) in [("--e", &e), ("--f", &f), ("--g", &g)] {
        if set.ambient_dim() != a.n {
            return Err(invalid(format!(
                "--n is {} but the {flag} set has ambient dimension {}",
                a.n,
                set.ambient_dim()
            )));
        }
    }
    let gn = RepeatedGame::new(base.clone(), a.n)?;
    ctx.note("building the 50-strategy battery");
    let battery = strategy_battery(&gn, seed, &ctx.budgets)?;
    let mut rows = Vec::with_capacity(battery.len());
    let mut support_size = 0;
    for (name, s) in &battery {
        let rep = conditional_win_experiment(&base, s, &e, &f, &g, &ctx.budgets)?;
        support_size = rep.support_size;
        let max_coordinate = rep
            .per_coordinate
            .iter()
            .max()
            .copied()
            .unwrap_or_else(|| rat(0, 1));
        rows.push(HardCoordRowJson {
            name: name.clone(),
            mean: RatJson::of(&rep.mean),
            max_coordinate: RatJson::of(&max_coordinate),
        });
        ctx.note(&format!("{name}: mean {}", rows.last().unwrap().mean.exact));
    }
    let best = rows
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.mean.value.total_cmp(&b.mean.value))
        .map(|(i, _)| i)
        .expect("battery is nonempty");
    let config = ctx.config(json!({
        "game": a.game,
        "n": a.n,
        "e": a.e,
        "f": a.f,
        "g": a.g,
        "battery": a.battery,
        "seed": seed,
    }));
    let payload = HardCoordinateJson {
        game: a.game.clone(),
        n: a.n,
        seed,
        battery: a.battery.clone(),
        event_sizes: [e.size(), f.size(), g.size()],
        support_size,
        max_mean: RatJson {
            exact: rows[best].mean.exact.clone(),
            value: rows[best].mean.value,
        },
        max_mean_name: rows[best].name.clone(),
        rows,
    };
    emit_json(&dest, "hard-coordinate", config, millis(t0), payload)
}

#[derive(Serialize)]
struct ChernoffJson {
    mu: f64,
    delta: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct ConcentrationRowJson {
    name: String,
    threshold: u32,
    hits: u64,
    trials: u64,
    frequency: RatJson,
    wilson_low: f64,
    wilson_high: f64,
}

#[derive(Serialize)]
struct ConcentrationJson {
    game: String,
    n: u32,
    eps: String,
    trials: u64,
    seed: u64,
    value: RatJson,
    threshold: u32,
    /// Reference tail bound at mu = game value, delta = eps / value; null
    /// when eps >= value puts delta outside (0, 1).
    chernoff: Option<ChernoffJson>,
    rows: Vec<ConcentrationRowJson>,
    max_frequency: RatJson,
    max_frequency_name: String,
}

/// Frozen column order for sweep post-processing; see also --help.
const CONCENTRATION_HEADER: &str = "name,threshold,hits,trials,frequency,wilson_low,wilson_high";

pub fn concentration(ctx: &Ctx, a: &ConcentrationArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let dest = parse_dest(a.out.as_deref(), true)?;
    let seed = a
        .seed
        .ok_or_else(|| invalid("trials are sampled; pass --seed"))?;
    let eps = parse_rat_flag("--eps", &a.eps)?;
    let base = load_game(&a.game)?;
    let gn = RepeatedGame::new(base.clone(), a.n)?;
    ctx.note("building the 50-strategy battery");
    let battery = strategy_battery(&gn, seed, &ctx.budgets)?;
    ctx.note(&format!("playing {} trials per strategy", a.trials));
    let rows = concentration_experiment(&base, &battery, a.n, &eps, a.trials, seed, &ctx.budgets)?;
    if dest.format() == Format::Csv {
        let lines: Vec<String> = rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{},{}",
                    r.name,
                    r.threshold,
                    r.hits,
                    r.trials,
                    to_f64(&r.frequency),
                    r.wilson_low,
                    r.wilson_high
                )
            })
            .collect();
        return emit_csv(&dest, CONCENTRATION_HEADER, &lines);
    }
    let (value, _) = game_value_bruteforce(&base, &ctx.budgets)?;
    let chernoff = if eps < value {
        let delta = eps / value;
        chernoff_reference(a.n, &value, &delta)
            .ok()
            .map(|(lower, upper)| ChernoffJson {
                mu: to_f64(&value),
                delta: to_f64(&delta),
                lower,
                upper,
            })
    } else {
        None
    };
    let worst = rows
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.frequency.cmp(&b.frequency))
        .map(|(i, _)| i)
        .expect("battery is nonempty");
    let config = ctx.config(json!({
        "game": a.game,
        "n": a.n,
        "eps": format_rat(&eps),
        "trials": a.trials,
        "seed": seed,
    }));
    let payload = ConcentrationJson {
        game: a.game.clone(),
        n: a.n,
        eps: format_rat(&eps),
        trials: a.trials,
        seed,
        value: RatJson::of(&value),
        threshold: rows[0].threshold,
        chernoff,
        max_frequency: RatJson::of(&rows[worst].frequency),
        max_frequency_name: rows[worst].name.clone(),
        rows: rows
            .iter()
            .map(|r| ConcentrationRowJson {
                name: r.name.clone(),
                threshold: r.threshold,
                hits: r.hits,
                trials: r.trials,
                frequency: RatJson::of(&r.frequency),
                wilson_low: r.wilson_low,
                wilson_high: r.wilson_high,
            })
            .collect(),
    };
    emit_json(&dest, "concentration", config, millis(t0), payload)
}

#[derive(Serialize)]
struct GridJson {
    points: u32,
    holds: bool,
    min_slack: f64,
    min_at: String,
}

#[derive(Serialize)]
struct EntropyJson {
    n: u32,
    seed: u64,
    density: String,
    triple_count: u64,
    entropy: f64,
    h_x: f64,
    h_xy: f64,
    h_w_given_xy: f64,
    h_wi_given_xy: Vec<f64>,
    grid: GridJson,
}

#[derive(Serialize)]
struct MarginalJson {
    n: u32,
    seed: u64,
    density: String,
    triple_count: u64,
    mean: RatJson,
    max: Option<RatJson>,
    per_i: Vec<Option<RatJson>>,
    zero_mass: Vec<u32>,
}

/// Density of the sampled triple set; fixed so reports are comparable
/// across runs and dimensions.
const TRIPLE_DENSITY: (u64, u64) = (9, 10);

pub fn appendix_check(ctx: &Ctx, a: &AppendixCheckArgs) -> Result<(), Failure> {
    let t0 = Instant::now();
    let dest = parse_dest(a.out.as_deref(), false)?;
    let seed = a
        .seed
        .ok_or_else(|| invalid("the triple set is sampled; pass --seed"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = TripleSet::random_density(a.n, TRIPLE_DENSITY.0, TRIPLE_DENSITY.1, &mut rng)?;
    let density = format!("{}/{}", TRIPLE_DENSITY.0, TRIPLE_DENSITY.1);
    let config = ctx.config(json!({"which": a.which, "n": a.n, "seed": seed}));
    match a.which.as_str() {
        "entropy" => {
            let rep = entropy_report(&t)?;
            let mut min_slack = f64::INFINITY;
            let mut min_at = rat(0, 1);
            for k in 0..=1000 {
                let p = rat(k, 1000);
                let (lhs, rhs) = binary_entropy_gap(&p)?;
                if rhs - lhs < min_slack {
                    min_slack = rhs - lhs;
                    min_at = p;
                }
            }
            let holds = min_slack >= 0.0;
            let payload = EntropyJson {
                n: a.n,
                seed,
                density,
                triple_count: rep.triple_count,
                entropy: rep.entropy,
                h_x: rep.h_x,
                h_xy: rep.h_xy,
                h_w_given_xy: rep.h_w_given_xy,
                h_wi_given_xy: rep.h_wi_given_xy.clone(),
                grid: GridJson {
                    points: 1001,
                    holds,
                    min_slack,
                    min_at: format_rat(&min_at),
                },
            };
            emit_json(&dest, "appendix-check", config, millis(t0), payload)?;
            if !holds {
                return Err(postcondition(format!(
                    "binary entropy inequality violated at p = {}",
                    format_rat(&min_at)
                )));
            }
            Ok(())
        }
        "marginal" => {
            let rep = conditional_marginal_report(&t)?;
            let per_i: Vec<Option<RatJson>> = rep
                .per_i
                .iter()
                .map(|d| d.as_ref().map(RatJson::of))
                .collect();
            let max = rep
                .per_i
                .iter()
                .flatten()
                .max()
                .map(RatJson::of);
            let payload = MarginalJson {
                n: a.n,
                seed,
                density,
                triple_count: rep.triple_count,
                mean: RatJson::of_big(&rep.mean),
                max,
                per_i,
                zero_mass: rep.zero_mass.clone(),
            };
            emit_json(&dest, "appendix-check", config, millis(t0), payload)
        }
        other => Err(invalid(format!(
            "--which expects \"entropy\" or \"marginal\", got {other:?}"
        ))),
    }
}
