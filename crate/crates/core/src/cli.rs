//! The `betafreq` command line.
//!
//! Settings resolve in the order: command-line flag, then `--config` file,
//! then built-in default.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dimension::{dim_a_gamma, dimension_grid, singularity_certificate_at, DEFAULT_TOL};
use crate::ergodic::{mc_frequency_bernoulli, mc_frequency_lebesgue, parry_alpha1, reference_truncation};
use crate::error::{Error, Result};
use crate::field::BetaParams;
use crate::normalize::{normalize_counted, normalize_naive, normalize_two_sided, normalize_via_blocks};
use crate::probability::{
    closed_form_lemmas, omega_frequency_variant, parse_event, prob_center_digit_direct, prob_event,
    prob_joint, DigitEvent, EventSpec, JointEvent, OmegaVariant, ProbabilityBracket,
};
use crate::rational::{self, to_f64};
use crate::word::{BitWord, TwoSidedWord};
use crate::VERSION;

const DEFAULT_DEPTH: usize = 40;
const DEFAULT_LENGTH: usize = 1_000_000;
const DEFAULT_TRIALS: usize = 10;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_POINTS: usize = 101;

#[derive(Parser, Debug)]
#[command(name = "betafreq", version, about = "Digit frequencies of greedy expansions in multinacci bases")]
pub struct Cli {
    /// Order n of the multinacci base (2 = golden mean, 3 = tribonacci)
    #[arg(long, global = true)]
    beta_order: Option<usize>,
    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Cap on worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with default settings
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a word; "past|future" input is treated as two-sided
    Normalize {
        word: String,
        /// Stability radius for two-sided input
        #[arg(long, default_value_t = 0)]
        radius: usize,
        /// Algorithm to use
        #[arg(long, value_enum, default_value_t = Method::Leftmost)]
        method: Method,
    },
    /// Certified probability bracket of a digit event
    ExactProb {
        /// e.g. "y1=1", "y-1=0,y0=0", "y0=1,y1=0", "x0=1"
        #[arg(long)]
        event: String,
        #[arg(long)]
        depth: Option<usize>,
        /// Decide x0 from the concatenated window instead of boundary digits
        #[arg(long)]
        direct: bool,
    },
    /// Monte Carlo digit frequency of normalized fair-coin words
    FreqBernoulli(Sampling),
    /// Monte Carlo digit frequency of greedy expansions of uniform points
    FreqLebesgue(Sampling),
    /// Digit-1 frequency from Ω-words up to a truncation length
    Omega {
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, value_enum, default_value_t = Variant::Block)]
        variant: Variant,
    },
    /// Dimension of the frequency-gamma set, at one point or over a grid
    Dimension {
        /// Frequency as p/q
        #[arg(long)]
        gamma: Option<String>,
        /// Print a CSV grid over the feasible frequencies
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Singularity certificate for the chosen order
    Certificate {
        /// Ω truncation length (orders above 2)
        #[arg(long)]
        length: Option<usize>,
    },
    /// Golden-mean reproduction and a table over orders 2..=max-order
    Report {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Leftmost,
    Naive,
    Blocks,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Block,
    Normalized,
    Raw,
}

impl From<Variant> for OmegaVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Block => OmegaVariant::Block,
            Variant::Normalized => OmegaVariant::Normalized,
            Variant::Raw => OmegaVariant::Raw,
        }
    }
}

/// Defaults read from `--config`.
#[derive(Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub beta_order: Option<usize>,
    pub depth: Option<usize>,
    pub length: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub points: Option<usize>,
}

impl Config {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code: 0 on success, 1 on computation errors, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let order = cli.beta_order.or(config.beta_order).unwrap_or(2);
    let params = BetaParams::multinacci(order)?;
    let threads = cli.threads.or(config.threads);
    let json = cli.json;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let text = pool.install(|| dispatch(&cli.command, &params, &config, json))?;
    out.write_all(text.as_bytes())
        .map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))?;
    Ok(())
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn dispatch(command: &Command, params: &BetaParams, config: &Config, json: bool) -> Result<String> {
    let order = params.order();
    match command {
        Command::Normalize { word, radius, method } => normalize_cmd(word, *radius, *method, params, json),
        Command::ExactProb { event, depth, direct } => {
            let depth = depth.or(config.depth).unwrap_or(DEFAULT_DEPTH);
            let spec = parse_event(event)?;
            let bracket = if *direct && matches!(spec, EventSpec::Center) {
                prob_center_digit_direct(params, depth)?
            } else {
                prob_event(params, &spec, depth)?
            };
            if json {
                let mut v = serde_json::to_value(bracket.to_json(event)).expect("bracket json");
                v["tool_version"] = json!(VERSION);
                v["beta_order"] = json!(order);
                Ok(to_json(&v))
            } else {
                Ok(format!(
                    "event      {event}\ndepth      {depth}\nlower      {} ({:.12})\nupper      {} ({:.12})\nundecided  {} ({:.3e})\n",
                    rational::format(&bracket.lower),
                    to_f64(&bracket.lower),
                    rational::format(&bracket.upper),
                    to_f64(&bracket.upper),
                    rational::format(&bracket.undecided),
                    to_f64(&bracket.undecided),
                ))
            }
        }
        Command::FreqBernoulli(s) | Command::FreqLebesgue(s) => {
            let length = s.length.or(config.length).unwrap_or(DEFAULT_LENGTH);
            let trials = s.trials.or(config.trials).unwrap_or(DEFAULT_TRIALS);
            let seed = s.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
            let report = if matches!(command, Command::FreqBernoulli(_)) {
                mc_frequency_bernoulli(length, trials, seed, params)?
            } else {
                mc_frequency_lebesgue(length, trials, seed, params)?
            };
            if json {
                return Ok(to_json(&report));
            }
            Ok(format!(
                "order      {order}\nsampling   {:?}\nlength     {length}\ntrials     {trials}\nseed       {seed}\nestimate   {:.7} +/- {:.2e}\nalpha(1)   {:.7}\nbernoulli  [{:.7}, {:.7}]\n",
                report.sampling,
                report.estimate,
                report.stderr,
                report.reference_parry.approx,
                to_f64(&rational::parse(&report.reference_bernoulli.lower)?),
                to_f64(&rational::parse(&report.reference_bernoulli.upper)?),
            ))
        }
        Command::Omega { length, variant } => {
            let length = length.or(config.length).unwrap_or(40);
            let f = omega_frequency_variant(params, length, (*variant).into())?;
            let e = &f.enumeration;
            if json {
                return Ok(to_json(&json!({
                    "tool_version": VERSION,
                    "beta_order": order,
                    "truncation_length": length,
                    "variant": f.variant,
                    "lower": rational::format(&f.lower),
                    "upper": rational::format(&f.upper),
                    "width": rational::format(&f.width()),
                    "captured_ratio": rational::format(&f.captured_ratio),
                    "word_count": e.word_count().to_string(),
                    "captured_mass": rational::format(&e.captured_mass),
                    "tail_mass": rational::format(&e.tail_mass),
                    "captured_length": rational::format(&e.captured_length),
                })));
            }
            Ok(format!(
                "order            {order}\ntruncation       {length}\nvariant          {:?}\ninterval         [{:.9}, {:.9}]\nwidth            {:.3e}\ncaptured ratio   {:.9}\nwords            {}\ntail mass        {:.3e}\nmean length      {:.9} (limit {})\n",
                f.variant,
                to_f64(&f.lower),
                to_f64(&f.upper),
                to_f64(&f.width()),
                to_f64(&f.captured_ratio),
                e.word_count(),
                to_f64(&e.tail_mass),
                to_f64(&e.captured_length),
                (1u64 << (order + 1)) - 2,
            ))
        }
        Command::Dimension { gamma, csv, points } => {
            if *csv || gamma.is_none() {
                let points = points.or(config.points).unwrap_or(DEFAULT_POINTS);
                let grid = dimension_grid(params, points)?;
                if json {
                    return Ok(to_json(&grid));
                }
                let mut s = String::from("gamma,gamma_float,max_entropy,dimension\n");
                for r in grid {
                    s.push_str(&format!(
                        "{},{:.12},{:.12},{:.12}\n",
                        rational::format(&r.gamma),
                        to_f64(&r.gamma),
                        r.max_entropy,
                        r.dimension
                    ));
                }
                return Ok(s);
            }
            let g = rational::parse(gamma.as_deref().expect("checked above"))?;
            let r = dim_a_gamma(&g, params, DEFAULT_TOL)?;
            if json {
                let mut v = serde_json::to_value(&r).expect("dimension json");
                v["tool_version"] = json!(VERSION);
                return Ok(to_json(&v));
            }
            Ok(format!(
                "gamma        {} ({:.9})\nentropy      {:.12} nats\nlyapunov     {:.12}\ndimension    {:.9}\n",
                rational::format(&r.gamma),
                to_f64(&r.gamma),
                r.max_entropy,
                r.lyapunov,
                r.dimension
            ))
        }
        Command::Certificate { length } => {
            let l = length.or(config.length).unwrap_or(reference_truncation(order));
            let c = singularity_certificate_at(params, l)?;
            if json {
                return Ok(to_json(&c));
            }
            Ok(format!(
                "order        {order}\nbernoulli    [{:.9}, {:.9}] ({})\nalpha(1)     {:.9} = {}\nseparation   {:?}\nverdict      {}\n",
                to_f64(&rational::parse(&c.bernoulli_lower)?),
                to_f64(&rational::parse(&c.bernoulli_upper)?),
                c.bernoulli_source,
                c.alpha1_approx,
                c.alpha1,
                c.separation,
                c.verdict
            ))
        }
        Command::Report { depth, max_order } => {
            let depth = depth.or(config.depth).unwrap_or(DEFAULT_DEPTH);
            report(depth, *max_order, json)
        }
    }
}

fn normalize_cmd(word: &str, radius: usize, method: Method, params: &BetaParams, json: bool) -> Result<String> {
    if word.contains('|') {
        let w = TwoSidedWord::parse(word)?;
        let r = normalize_two_sided(&w, params, radius);
        if json {
            let mut v = serde_json::to_value(&r).expect("normalization json");
            v["tool_version"] = json!(VERSION);
            v["beta_order"] = json!(params.order());
            return Ok(to_json(&v));
        }
        let range = match r.final_range {
            Some((a, b)) => format!("final [{a}, {b}]"),
            None => "no final digits".to_string(),
        };
        let stability = if r.stable { "stable" } else { "unstable" };
        return Ok(format!("{}\n{range}, {stability} at radius {radius}\n", r.word));
    }
    let w = BitWord::parse(word)?;
    let (normal, rewrites) = match method {
        Method::Leftmost => normalize_counted(&w, params),
        Method::Naive => (normalize_naive(&w, params), 0),
        Method::Blocks => (normalize_via_blocks(&w, params), 0),
    };
    if json {
        return Ok(to_json(&json!({
            "tool_version": VERSION,
            "beta_order": params.order(),
            "input": w.to_string(),
            "output": normal.to_string(),
            "rewrites": rewrites,
        })));
    }
    Ok(format!("{normal}\n"))
}

fn bracket_json(name: &str, b: &ProbabilityBracket, expected: &rational::Rational) -> serde_json::Value {
    json!({
        "event": name,
        "closed_form": rational::format(expected),
        "lower": rational::format(&b.lower),
        "upper": rational::format(&b.upper),
        "undecided": rational::format(&b.undecided),
        "contains_closed_form": b.contains(expected),
    })
}

fn report(depth: usize, max_order: usize, json: bool) -> Result<String> {
    if max_order < 2 {
        return Err(Error::InvalidArgument("--max-order must be at least 2".into()));
    }
    let g = BetaParams::golden_mean();
    let c = closed_form_lemmas(&g)?;
    let future = |k, req| prob_event(&g, &EventSpec::Future(DigitEvent::digits_equal(k, req)), depth);
    let past = |k, req| prob_event(&g, &EventSpec::Past(DigitEvent::digits_equal(k, req)), depth);
    let rows = vec![
        ("P(y1=1)", future(1, vec![(0, 1)])?, c.future_y1_is_1.clone()),
        ("P(y1=y2=1)", future(2, vec![(0, 1), (1, 1)])?, c.future_y1_y2_are_1.clone()),
        ("P(y0=1)", past(1, vec![(0, 1)])?, c.past_y0_is_1.clone()),
        ("P(y-1=y0=0)", past(2, vec![(0, 0), (1, 0)])?, c.past_ym1_y0_are_0.clone()),
        ("P(case 1)", prob_joint(&g, &JointEvent::golden_case1(), depth)?, c.case1.clone()),
        ("P(case 2)", prob_joint(&g, &JointEvent::golden_case2(), depth)?, c.case2.clone()),
        ("P(x0=1)", prob_event(&g, &EventSpec::Center, depth)?, c.center_x0_is_1.clone()),
    ];
    let alpha = parry_alpha1(&g)?;
    let golden_cert = singularity_certificate_at(&g, 0)?;

    let mut table = Vec::new();
    for n in 2..=max_order {
        let p = BetaParams::multinacci(n)?;
        let l = reference_truncation(n);
        let f = omega_frequency_variant(&p, l, OmegaVariant::Block)?;
        let cert = singularity_certificate_at(&p, l)?;
        table.push((n, p.beta_f64(), l, f, cert));
    }

    if json {
        let v = json!({
            "tool_version": VERSION,
            "depth": depth,
            "golden_mean": {
                "brackets": rows.iter().map(|(n, b, e)| bracket_json(n, b, e)).collect::<Vec<_>>(),
                "alpha1": alpha,
                "alpha1_approx": g.to_f64(&alpha),
                "certificate": golden_cert,
            },
            "multinacci": table.iter().map(|(n, beta, l, f, cert)| json!({
                "beta_order": n,
                "beta": beta,
                "truncation_length": l,
                "bernoulli_lower": rational::format(&f.lower),
                "bernoulli_upper": rational::format(&f.upper),
                "alpha1": cert.alpha1,
                "alpha1_approx": cert.alpha1_approx,
                "separation": cert.separation,
                "dimension_bound": cert.dimension_bound,
            })).collect::<Vec<_>>(),
        });
        return Ok(to_json(&v));
    }

    let mut s = format!("Golden mean, enumeration depth {depth}\n\n");
    s.push_str(&format!(
        "{:<13} {:>7} {:>16} {:>16} {:>10}\n",
        "event", "exact", "lower", "upper", "undecided"
    ));
    for (name, b, e) in &rows {
        s.push_str(&format!(
            "{:<13} {:>7} {:>16.12} {:>16.12} {:>10.2e}\n",
            name,
            rational::format(e),
            to_f64(&b.lower),
            to_f64(&b.upper),
            to_f64(&b.undecided)
        ));
    }
    s.push_str(&format!(
        "\nalpha(1) = 1/(beta^2+1) = {:.9}\n5/18 - alpha(1)        = {:.9}\ndimension bound         = {:.6}\n{}\n",
        g.to_f64(&alpha),
        5.0 / 18.0 - g.to_f64(&alpha),
        golden_cert.dimension_bound.unwrap_or(f64::NAN),
        golden_cert.verdict
    ));
    s.push_str(&format!(
        "\n{:>5} {:>10} {:>5} {:>25} {:>10} {:>10}\n",
        "order", "beta", "L", "bernoulli interval", "alpha(1)", "dim bound"
    ));
    for (n, beta, l, f, cert) in &table {
        s.push_str(&format!(
            "{:>5} {:>10.7} {:>5} {:>12.7}, {:>11.7} {:>10.7} {:>10}\n",
            n,
            beta,
            l,
            to_f64(&f.lower),
            to_f64(&f.upper),
            cert.alpha1_approx,
            cert.dimension_bound
                .map(|d| format!("{d:.6}"))
                .unwrap_or_else(|| "-".into())
        ));
    }
    Ok(s)
}
