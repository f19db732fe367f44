// Subcommand implementations. Every command writes a plain-text report to the
// given writer and, where asked, CSV/JSON files.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use ccqmac_core::linalg::{EPS_EIG, EPS_HERM, EPS_SUPP};
use ccqmac_core::region::{RegionApprox, RegionMetadata};
use ccqmac_core::{
    assemble_common_code, assemble_conferencing_code, conferencing_bounds, conferencing_code_from_common,
    joint_pgm_decoder, membership, region_grid, success_probability_common, success_probability_conf,
    support_maximize, support_maximize_from, verify_rate_constraints, AssembledCode, Budget, CcqMac, CodeParams,
    ConferencingParams, FrontierSettings, InputLaw, OptimizerSettings, RatePoint, RegionMode, ResidualPolicy,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{self, num, CodeManifest, LawFile, NamedChannel, ProtocolFile};
use crate::{Cli, Command, DecoderArg, ModeArg, RegionArgs, ResidualArg};

macro_rules! frontier_header_pair {
    () => {
        "dir_index,dir_m,dir_n,support_value,inner_m,inner_n"
    };
}
macro_rules! frontier_header_triple {
    () => {
        "dir_index,dir_c,dir_x,dir_y,support_value,inner_c,inner_x,inner_y"
    };
}
macro_rules! simulate_header_comm {
    () => {
        "l,m,k,t,rate_c,rate_x,rate_y,delta,common_fallback,success"
    };
}
macro_rules! simulate_header_conf {
    () => {
        "l,m,n,rate_m,rate_n,conf_bits_m,conf_bits_n,delta,common_fallback,success"
    };
}
macro_rules! compare_header {
    () => {
        "dir_index,dir_m,dir_n,support_first,support_second,delta"
    };
}

pub const FRONTIER_HEADER_PAIR: &str = frontier_header_pair!();
pub const FRONTIER_HEADER_TRIPLE: &str = frontier_header_triple!();
pub const SIMULATE_HEADER_COMM: &str = simulate_header_comm!();
pub const SIMULATE_HEADER_CONF: &str = simulate_header_conf!();
pub const COMPARE_HEADER: &str = compare_header!();

pub const REGION_HELP: &str = concat!(
    "Frontier CSV header, mode conf:\n  ",
    frontier_header_pair!(),
    "\nFrontier CSV header, mode comm:\n  ",
    frontier_header_triple!(),
    "\nsupport_value is the best value of <dir, rate> found; inner_* is a rate point attaining it."
);
pub const CHECK_HELP: &str =
    "Prints one line: Inside (dominated by achieved points), Outside (beyond a supporting half-space) or Uncertain.";
pub const SIMULATE_HELP: &str = concat!(
    "Result CSV header, mode comm:\n  ",
    simulate_header_comm!(),
    "\nResult CSV header, mode conf:\n  ",
    simulate_header_conf!(),
    "\nsuccess is the exact average success probability; the leftover outcome counts as an error unless --residual fold."
);
pub const COMPARE_HELP: &str = concat!(
    "Comparison CSV header:\n  ",
    compare_header!(),
    "\ndelta is support_second - support_first."
);

/// Rates are turned into counts `ceil(2^(l R))` with this slack against
/// round-off at exact powers of two.
const COUNT_SLACK: f64 = 1e-9;
const MAX_COUNT_BITS: f64 = 40.0;

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let report = match cli.threads {
        None => dispatch(&cli.command)?,
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Invariant(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(&cli.command))?
        }
    };
    out.write_all(report.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn dispatch(command: &Command) -> CliResult<String> {
    Ok(match command {
        Command::Region {
            channel,
            mode,
            region,
            seed,
            out: path,
        } => cmd_region(channel, *mode, region, *seed, path)?,
        Command::Check {
            point,
            frontier,
            channel,
            mode,
            region,
            seed,
        } => cmd_check(point, frontier.as_deref(), channel.as_deref(), *mode, region, *seed)?,
        Command::Simulate {
            channel,
            mode,
            blocklength,
            messages,
            rates,
            law,
            delta,
            decoder,
            residual,
            region,
            seed,
            out: path,
            code_dir,
        } => cmd_simulate(&SimulateConfig {
            channel,
            mode: *mode,
            blocklengths: blocklength,
            messages,
            rates,
            law: law.as_deref(),
            delta: *delta,
            decoder: *decoder,
            residual: *residual,
            region,
            seed: *seed,
            out: path.as_deref(),
            code_dir: code_dir.as_deref(),
        })?,
        Command::Compare {
            channel,
            region,
            against,
            seed,
            out: path,
        } => cmd_compare(channel, region, against, *seed, path.as_deref())?,
    })
}

fn region_mode(mode: ModeArg, args: &RegionArgs) -> CliResult<RegionMode> {
    match mode {
        ModeArg::Comm => Ok(RegionMode::Common),
        ModeArg::Conf => {
            for (flag, v) in [("--conf-c", args.conf_c), ("--conf-d", args.conf_d)] {
                if v.is_nan() || v < 0.0 {
                    return Err(CliError::Usage(format!("{flag} must be a nonnegative number or inf, got {v}")));
                }
            }
            Ok(RegionMode::Conferencing {
                c: args.conf_c,
                d: args.conf_d,
            })
        }
    }
}

fn settings(args: &RegionArgs, seed: u64) -> FrontierSettings {
    FrontierSettings {
        n_directions: args.directions,
        optimizer: OptimizerSettings {
            starts: args.starts,
            seed,
            u_size: args.u_size,
            ..OptimizerSettings::default()
        },
    }
}

fn summary_directions(dimension: usize) -> Vec<Vec<f64>> {
    if dimension == 2 {
        vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]
    } else {
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]]
    }
}

fn label(direction: &[f64]) -> String {
    let parts: Vec<String> = direction.iter().map(|&x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}

/// Support values in the summary directions, re-optimized from the frontier's
/// laws plus fresh starts.
fn summary_supports(w: &CcqMac, region: &RegionApprox, optimizer: &OptimizerSettings) -> CliResult<Vec<(Vec<f64>, f64)>> {
    summary_directions(region.dimension())
        .into_par_iter()
        .map(|dir| {
            let res = support_maximize_from(w, &dir, region.mode, optimizer, &region.laws)?;
            let value = res.value.max(region.support(&dir)?);
            Ok((dir, value))
        })
        .collect()
}

fn frontier_csv(region: &RegionApprox) -> String {
    let mut s = String::new();
    s.push_str(if region.dimension() == 2 {
        FRONTIER_HEADER_PAIR
    } else {
        FRONTIER_HEADER_TRIPLE
    });
    s.push('\n');
    for (i, dir) in region.directions.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(dir.iter().map(|&x| num(x)));
        row.push(num(region.support_values[i]));
        row.extend(region.inner_points[i].as_slice().iter().map(|&x| num(x)));
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct Tolerances {
    eps_herm: f64,
    eps_eig: f64,
    eps_supp: f64,
}

#[derive(Serialize)]
struct SummaryEntry {
    direction: Vec<f64>,
    support: String,
}

#[derive(Serialize)]
struct RegionMeta {
    channel_name: String,
    channel_hash: String,
    mode: &'static str,
    /// Budgets as formatted numbers, `inf` included.
    conf_c: Option<String>,
    conf_d: Option<String>,
    seed: u64,
    starts: usize,
    u_size: usize,
    n_directions: usize,
    initial_step: f64,
    min_step: f64,
    tolerances: Tolerances,
    summary: Vec<SummaryEntry>,
}

/// `frontier.csv` → `frontier.meta.json`.
pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn cmd_region(channel: &Path, mode: ModeArg, args: &RegionArgs, seed: u64, out: &Path) -> CliResult<String> {
    let NamedChannel { name, channel: w } = format::load_channel(channel)?;
    let rmode = region_mode(mode, args)?;
    let settings = settings(args, seed);
    let region = region_grid(&w, &[rmode], &settings)?.remove(0);
    let summary = summary_supports(&w, &region, &settings.optimizer)?;

    format::write_text(out, &frontier_csv(&region))?;
    let md = &region.metadata;
    let (conf_c, conf_d) = match rmode {
        RegionMode::Conferencing { c, d } => (Some(num(c)), Some(num(d))),
        RegionMode::Common => (None, None),
    };
    let meta = RegionMeta {
        channel_name: name.clone(),
        channel_hash: md.channel_hash.clone(),
        mode: mode_name(mode),
        conf_c,
        conf_d,
        seed: md.seed,
        starts: md.starts,
        u_size: md.u_size,
        n_directions: md.n_directions,
        initial_step: md.initial_step,
        min_step: md.min_step,
        tolerances: Tolerances {
            eps_herm: EPS_HERM,
            eps_eig: EPS_EIG,
            eps_supp: EPS_SUPP,
        },
        summary: summary
            .iter()
            .map(|(d, v)| SummaryEntry {
                direction: d.clone(),
                support: num(*v),
            })
            .collect(),
    };
    let meta_json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    format::write_text(&meta_path(out), &(meta_json + "\n"))?;

    let mut report = String::new();
    let _ = writeln!(report, "channel {name} {}", md.channel_hash);
    let _ = writeln!(report, "mode {}", describe_mode(rmode));
    for (dir, value) in &summary {
        let _ = writeln!(report, "support {} {}", label(dir), num(*value));
    }
    let _ = writeln!(report, "frontier {} directions -> {}", md.n_directions, out.display());
    Ok(report)
}

fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Conf => "conf",
        ModeArg::Comm => "comm",
    }
}

fn describe_mode(mode: RegionMode) -> String {
    match mode {
        RegionMode::Conferencing { c, d } => format!("conf C={} D={}", num(c), num(d)),
        RegionMode::Common => "comm".to_string(),
    }
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("{what}: cannot parse \"{part}\": {e}")))
        })
        .collect()
}

/// Load a frontier CSV as a region approximation usable for membership.
pub fn load_frontier(path: &Path) -> CliResult<RegionApprox> {
    let text = format::read_text(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let dimension = match header {
        FRONTIER_HEADER_PAIR => 2,
        FRONTIER_HEADER_TRIPLE => 3,
        other => return Err(CliError::parse(path, format!("line 1: unrecognized header \"{other}\""))),
    };
    let mut directions = Vec::new();
    let mut support_values = Vec::new();
    let mut inner_points = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + 2 * dimension {
            return Err(CliError::parse(path, format!("line {}: expected {} fields, found {}", i + 2, 2 + 2 * dimension, fields.len())));
        }
        let values = parse_list(&fields[1..].join(","), "frontier").map_err(|e| CliError::parse(path, format!("line {}: {e}", i + 2)))?;
        directions.push(values[..dimension].to_vec());
        support_values.push(values[dimension]);
        inner_points.push(RatePoint::from_slice(&values[dimension + 1..]).map_err(|e| CliError::parse(path, e.to_string()))?);
    }
    if directions.is_empty() {
        return Err(CliError::parse(path, "no frontier rows"));
    }
    let mode = if dimension == 2 {
        RegionMode::Conferencing { c: 0.0, d: 0.0 }
    } else {
        RegionMode::Common
    };
    Ok(RegionApprox {
        mode,
        metadata: RegionMetadata {
            channel_hash: String::new(),
            seed: 0,
            starts: 0,
            u_size: 0,
            n_directions: directions.len(),
            initial_step: 0.0,
            min_step: 0.0,
        },
        directions,
        support_values,
        inner_points,
        laws: Vec::new(),
        terms: Vec::new(),
    })
}

fn cmd_check(
    point: &str,
    frontier: Option<&Path>,
    channel: Option<&Path>,
    mode: ModeArg,
    args: &RegionArgs,
    seed: Option<u64>,
) -> CliResult<String> {
    let coords = parse_list(point, "--point")?;
    let point = RatePoint::from_slice(&coords).map_err(|_| CliError::Usage(format!("--point needs 2 or 3 rates, got {}", coords.len())))?;
    let region = match (frontier, channel, seed) {
        (Some(path), _, _) => load_frontier(path)?,
        (None, Some(channel), Some(seed)) => {
            let w = format::load_channel(channel)?.channel;
            region_grid(&w, &[region_mode(mode, args)?], &settings(args, seed))?.remove(0)
        }
        _ => return Err(CliError::Usage("check needs --frontier, or --channel with --seed".into())),
    };
    if point.dimension() != region.dimension() {
        return Err(CliError::Usage(format!(
            "--point has {} rates but the region has dimension {}",
            point.dimension(),
            region.dimension()
        )));
    }
    Ok(format!("{}\n", membership(&point, &region)?))
}

/// Resolved options of the `simulate` command.
pub struct SimulateConfig<'a> {
    pub channel: &'a Path,
    pub mode: ModeArg,
    pub blocklengths: &'a [usize],
    pub messages: &'a [usize],
    pub rates: &'a [f64],
    pub law: Option<&'a Path>,
    pub delta: Option<f64>,
    pub decoder: DecoderArg,
    pub residual: ResidualArg,
    pub region: &'a RegionArgs,
    pub seed: u64,
    pub out: Option<&'a Path>,
    pub code_dir: Option<&'a Path>,
}

/// Message count `ceil(2^(l R))`, at least 1.
pub fn message_count(l: usize, rate: f64) -> CliResult<usize> {
    if rate.is_nan() || rate < 0.0 {
        return Err(CliError::Usage(format!("rates must be nonnegative, got {rate}")));
    }
    let bits = l as f64 * rate;
    if bits > MAX_COUNT_BITS {
        return Err(CliError::Usage(format!("rate {rate} at blocklength {l} needs 2^{bits} messages")));
    }
    Ok(((bits.exp2() - COUNT_SLACK).ceil() as usize).max(1))
}

fn counts_for(cfg: &SimulateConfig, l: usize, arity: usize) -> CliResult<Vec<usize>> {
    let names = if arity == 3 { "M,K,T" } else { "M,N" };
    if !cfg.messages.is_empty() {
        if cfg.messages.len() != arity || cfg.messages.contains(&0) {
            return Err(CliError::Usage(format!("--messages needs {arity} positive counts {names}")));
        }
        return Ok(cfg.messages.to_vec());
    }
    if cfg.rates.len() != arity {
        return Err(CliError::Usage(format!("--rates needs {arity} rates matching {names}")));
    }
    cfg.rates.iter().map(|&r| message_count(l, r)).collect()
}

fn simulation_law(cfg: &SimulateConfig, w: &CcqMac, mode: RegionMode) -> CliResult<InputLaw> {
    match cfg.law {
        Some(path) => {
            let law = format::load_law(path)?;
            law.check_matches(w).map_err(|e| CliError::parse(path, e.to_string()))?;
            Ok(law)
        }
        None => {
            let dir = vec![1.0; mode.dimension()];
            Ok(support_maximize(w, &dir, mode, &settings(cfg.region, cfg.seed).optimizer)?.law)
        }
    }
}

fn manifest(w: &CcqMac, law: &InputLaw, source: &AssembledCode, seed: u64, protocol: Option<ProtocolFile>) -> CodeManifest {
    let code = &source.code;
    let (m, k, t) = code.shape();
    let mut x_words = Vec::with_capacity(m * k);
    let mut y_words = Vec::with_capacity(m * t);
    for mi in 0..m {
        x_words.extend((0..k).map(|ki| code.x_word(ki, mi).to_vec()));
    }
    for mi in 0..m {
        y_words.extend((0..t).map(|ti| code.y_word(ti, mi).to_vec()));
    }
    CodeManifest {
        channel_hash: w.fingerprint(),
        l: code.blocklength(),
        m,
        k,
        t,
        seed,
        delta: source.delta.is_finite().then_some(source.delta),
        law: LawFile::from_law(law),
        u_words: source.u_words.clone(),
        x_words,
        y_words,
        protocol,
    }
}

fn rate(count: usize, l: usize) -> f64 {
    (count as f64).log2() / l as f64
}

fn cmd_simulate(cfg: &SimulateConfig) -> CliResult<String> {
    let w = format::load_channel(cfg.channel)?.channel;
    let mode = region_mode(cfg.mode, cfg.region)?;
    if cfg.blocklengths.contains(&0) {
        return Err(CliError::Usage("blocklengths must be positive".into()));
    }
    if let Some(d) = cfg.delta {
        if d.is_nan() || d <= 0.0 {
            return Err(CliError::Usage(format!("--delta must be positive, got {d}")));
        }
    }
    let law = simulation_law(cfg, &w, mode)?;
    let policy = match cfg.residual {
        ResidualArg::Error => ResidualPolicy::Error,
        ResidualArg::Fold => ResidualPolicy::Fold,
    };
    let budget = Budget::default();
    if let Some(dir) = cfg.code_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }

    let mut csv = String::from(match mode {
        RegionMode::Common => SIMULATE_HEADER_COMM,
        RegionMode::Conferencing { .. } => SIMULATE_HEADER_CONF,
    });
    csv.push('\n');
    for &l in cfg.blocklengths {
        let (row, manifest) = match mode {
            RegionMode::Common => {
                let counts = counts_for(cfg, l, 3)?;
                let params = CodeParams {
                    l,
                    m: counts[0],
                    k: counts[1],
                    t: counts[2],
                    delta: cfg.delta,
                    seed: cfg.seed,
                };
                let source = assemble_common_code(&w, &law, &params, &budget)?;
                let code = match cfg.decoder {
                    DecoderArg::TwoStage => source.code.clone(),
                    DecoderArg::Joint => source.code.with_povm(joint_pgm_decoder(&source.code, &w, &budget)?)?,
                };
                let success = success_probability_common(&code, &w, policy, &budget)?;
                let row = format!(
                    "{l},{},{},{},{},{},{},{},{},{}",
                    counts[0],
                    counts[1],
                    counts[2],
                    num(rate(counts[0], l)),
                    num(rate(counts[1], l)),
                    num(rate(counts[2], l)),
                    num(source.delta),
                    source.common_fallback,
                    num(success)
                );
                (row, manifest(&w, &law, &source, cfg.seed, None))
            }
            RegionMode::Conferencing { c, d } => {
                let counts = counts_for(cfg, l, 2)?;
                let params = ConferencingParams {
                    l,
                    m_size: counts[0],
                    n_size: counts[1],
                    c,
                    d,
                    delta: cfg.delta,
                    seed: cfg.seed,
                };
                let built = assemble_conferencing_code(&w, &law, &params, &budget)?;
                let code = match cfg.decoder {
                    DecoderArg::TwoStage => built.code,
                    DecoderArg::Joint => {
                        let common = built.source.code.with_povm(joint_pgm_decoder(&built.source.code, &w, &budget)?)?;
                        conferencing_code_from_common(&common, &built.code.protocol)?
                    }
                };
                let success = success_probability_conf(&code, &w, policy, &budget)?;
                let report = verify_rate_constraints(&code.protocol, c, d, l);
                let row = format!(
                    "{l},{},{},{},{},{},{},{},{},{}",
                    counts[0],
                    counts[1],
                    num(rate(counts[0], l)),
                    num(rate(counts[1], l)),
                    num(report.bits_1),
                    num(report.bits_2),
                    num(built.source.delta),
                    built.source.common_fallback,
                    num(success)
                );
                let protocol = ProtocolFile::from_protocol(&code.protocol);
                (row, manifest(&w, &law, &built.source, cfg.seed, Some(protocol)))
            }
        };
        csv.push_str(&row);
        csv.push('\n');
        if let Some(dir) = cfg.code_dir {
            format::write_text(&dir.join(format!("code_l{l}.json")), &(manifest.to_json() + "\n"))?;
        }
    }
    match cfg.out {
        Some(path) => {
            format::write_text(path, &csv)?;
            Ok(format!("{} blocklengths -> {}\n", cfg.blocklengths.len(), path.display()))
        }
        None => Ok(csv),
    }
}

fn cmd_compare(channel: &Path, args: &RegionArgs, against: &[f64], seed: u64, out: Option<&Path>) -> CliResult<String> {
    let w = format::load_channel(channel)?.channel;
    let &[c2, d2] = against else {
        return Err(CliError::Usage(format!("--against needs C2,D2, got {} values", against.len())));
    };
    let first = region_mode(ModeArg::Conf, args)?;
    let second = region_mode(
        ModeArg::Conf,
        &RegionArgs {
            conf_c: c2,
            conf_d: d2,
            ..args.clone()
        },
    )?;
    let settings = settings(args, seed);
    let regions = region_grid(&w, &[first, second], &settings)?;

    let sum_dir = [1.0, 1.0];
    let warm: Vec<InputLaw> = regions.iter().flat_map(|r| r.laws.iter().cloned()).collect();
    let modes = [first, second];
    let pooled: Vec<InputLaw> = modes
        .par_iter()
        .map(|&m| support_maximize_from(&w, &sum_dir, m, &settings.optimizer, &warm).map(|r| r.law))
        .collect::<Result<_, _>>()?;
    let mut sums = [0.0_f64; 2];
    for (i, mode) in modes.iter().enumerate() {
        let RegionMode::Conferencing { c, d } = *mode else { unreachable!() };
        sums[i] = regions[i].support(&sum_dir)?;
        for law in &pooled {
            sums[i] = sums[i].max(conferencing_bounds(&w, law, c, d)?.support(*mode, &sum_dir)?.0);
        }
    }

    let mut csv = String::from(COMPARE_HEADER);
    csv.push('\n');
    let mut max_delta = f64::NEG_INFINITY;
    for (i, dir) in regions[0].directions.iter().enumerate() {
        let (a, b) = (regions[0].support_values[i], regions[1].support_values[i]);
        max_delta = max_delta.max(b - a);
        let _ = writeln!(csv, "{i},{},{},{},{},{}", num(dir[0]), num(dir[1]), num(a), num(b), num(b - a));
    }

    let mut report = String::new();
    let _ = writeln!(report, "first {} sum-rate support {}", describe_mode(first), num(sums[0]));
    let _ = writeln!(report, "second {} sum-rate support {}", describe_mode(second), num(sums[1]));
    let _ = writeln!(report, "sum-rate delta {}", num(sums[1] - sums[0]));
    let _ = writeln!(report, "max delta over {} directions {}", regions[0].directions.len(), num(max_delta));
    match out {
        Some(path) => {
            format::write_text(path, &csv)?;
            let _ = writeln!(report, "comparison -> {}", path.display());
        }
        None => report.push_str(&csv),
    }
    Ok(report)
}
