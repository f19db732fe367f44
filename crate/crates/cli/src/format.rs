//! File formats: channel and law JSON, code and protocol manifests, number
//! formatting for CSV output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ccqmac_core::{
    CcqMac, CellPartition, ComplexMatrix, ConferenceProtocol, ConferenceStep, Distribution, InputLaw, StepRule, C64,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Format with nine significant digits, plain notation for moderate
/// magnitudes and exponent notation otherwise.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::parse(path, format!("line {} column {}: {e}", e.line(), e.column()))
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    x_size: usize,
    y_size: usize,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    states: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

/// A channel with its display name.
#[derive(Clone, Debug)]
pub struct NamedChannel {
    pub name: String,
    pub channel: CcqMac,
}

pub const DEFAULT_CHANNEL_NAME: &str = "unnamed";

pub fn parse_channel(text: &str, path: &Path) -> CliResult<NamedChannel> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    let (xs, ys, dim) = (file.x_size, file.y_size, file.dim);
    if xs == 0 || ys == 0 || dim == 0 {
        return Err(CliError::parse(path, "x_size, y_size and dim must be positive"));
    }
    let mut by_pair = BTreeMap::new();
    for (key, rows) in &file.states {
        let pair = parse_pair(key).ok_or_else(|| CliError::parse(path, format!("states: key \"{key}\" is not of the form \"x,y\"")))?;
        if pair.0 >= xs || pair.1 >= ys {
            return Err(CliError::parse(path, format!("states: key \"{key}\" outside the {xs}x{ys} alphabet")));
        }
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(CliError::parse(path, format!("states[\"{key}\"]: expected a {dim}x{dim} array")));
        }
        let entries: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
        by_pair.insert(pair, ComplexMatrix::from_row_slice(dim, dim, &entries));
    }
    let mut raw = Vec::with_capacity(xs * ys);
    for x in 0..xs {
        for y in 0..ys {
            let m = by_pair
                .remove(&(x, y))
                .ok_or_else(|| CliError::parse(path, format!("states: missing entry \"{x},{y}\"")))?;
            raw.push(m);
        }
    }
    let channel = CcqMac::new(xs, ys, raw).map_err(|e| CliError::parse(path, e.to_string()))?;
    Ok(NamedChannel {
        name: file.name.unwrap_or_else(|| DEFAULT_CHANNEL_NAME.to_string()),
        channel,
    })
}

fn parse_pair(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

pub fn load_channel(path: &Path) -> CliResult<NamedChannel> {
    parse_channel(&read_text(path)?, path)
}

pub fn channel_to_json(channel: &CcqMac, name: Option<&str>) -> String {
    let dim = channel.dim();
    let mut states = BTreeMap::new();
    for x in 0..channel.x_size() {
        for y in 0..channel.y_size() {
            let m = channel.output(x, y).matrix();
            let rows = (0..dim).map(|i| (0..dim).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
            states.insert(format!("{x},{y}"), rows);
        }
    }
    let file = ChannelFile {
        x_size: channel.x_size(),
        y_size: channel.y_size(),
        dim,
        name: name.map(str::to_string),
        states,
    };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

pub fn save_channel(channel: &CcqMac, name: Option<&str>, path: &Path) -> CliResult<()> {
    write_text(path, &channel_to_json(channel, name))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawFile {
    pub p: Vec<f64>,
    pub r: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
}

impl LawFile {
    pub fn from_law(law: &InputLaw) -> Self {
        let n = law.u_size();
        Self {
            p: law.p().as_slice().to_vec(),
            r: (0..n).map(|u| law.r(u).as_slice().to_vec()).collect(),
            s: (0..n).map(|u| law.s(u).as_slice().to_vec()).collect(),
        }
    }

    pub fn to_law(&self) -> ccqmac_core::Result<InputLaw> {
        // Exactly normalized rows are kept bit for bit; others are rescaled.
        let dist = |v: &[f64]| Distribution::new(v.to_vec()).or_else(|_| Distribution::normalized(v.to_vec()));
        let rows = |v: &[Vec<f64>]| v.iter().map(|r| dist(r)).collect::<ccqmac_core::Result<Vec<_>>>();
        InputLaw::new(dist(&self.p)?, rows(&self.r)?, rows(&self.s)?)
    }
}

pub fn load_law(path: &Path) -> CliResult<InputLaw> {
    let file: LawFile = serde_json::from_str(&read_text(path)?).map_err(|e| json_error(path, e))?;
    file.to_law().map_err(|e| CliError::parse(path, e.to_string()))
}

/// Serializable transcript rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleFile {
    Partition { size: usize, cells: usize },
    /// Entries `(message, history, output)`.
    Table(Vec<(usize, Vec<usize>, usize)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFile {
    pub f: RuleFile,
    pub v_size: usize,
    pub g: RuleFile,
    pub w_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub m_size: usize,
    pub n_size: usize,
    pub steps: Vec<StepFile>,
}

fn rule_to_file(rule: &StepRule) -> RuleFile {
    match rule {
        StepRule::Partition(p) => RuleFile::Partition {
            size: p.size(),
            cells: p.cells(),
        },
        StepRule::Table(t) => RuleFile::Table(t.iter().map(|((m, h), v)| (*m, h.clone(), *v)).collect()),
    }
}

fn rule_from_file(rule: &RuleFile) -> ccqmac_core::Result<StepRule> {
    Ok(match rule {
        RuleFile::Partition { size, cells } => StepRule::Partition(CellPartition::new(*size, *cells)?),
        RuleFile::Table(entries) => StepRule::Table(entries.iter().map(|(m, h, v)| ((*m, h.clone()), *v)).collect()),
    })
}

impl ProtocolFile {
    pub fn from_protocol(p: &ConferenceProtocol) -> Self {
        Self {
            m_size: p.m_size,
            n_size: p.n_size,
            steps: p
                .steps
                .iter()
                .map(|s| StepFile {
                    f: rule_to_file(&s.f),
                    v_size: s.v_size,
                    g: rule_to_file(&s.g),
                    w_size: s.w_size,
                })
                .collect(),
        }
    }

    pub fn to_protocol(&self) -> ccqmac_core::Result<ConferenceProtocol> {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                Ok(ConferenceStep {
                    f: rule_from_file(&s.f)?,
                    v_size: s.v_size,
                    g: rule_from_file(&s.g)?,
                    w_size: s.w_size,
                })
            })
            .collect::<ccqmac_core::Result<Vec<_>>>()?;
        Ok(ConferenceProtocol {
            m_size: self.m_size,
            n_size: self.n_size,
            steps,
        })
    }
}

/// Everything needed to regenerate a simulated code; measurement operators
/// are rebuilt from the seed rather than stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeManifest {
    pub channel_hash: String,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub seed: u64,
    /// Private typicality width; `null` stands for unbounded.
    pub delta: Option<f64>,
    pub law: LawFile,
    pub u_words: Vec<Vec<usize>>,
    /// `x_words[m * K + k]`.
    pub x_words: Vec<Vec<usize>>,
    /// `y_words[m * T + t]`.
    pub y_words: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolFile>,
}

impl CodeManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| json_error(path, e))
    }
}
