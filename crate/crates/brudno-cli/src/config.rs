//! Experiment configuration: a single TOML file per run, unknown keys
//! rejected, every seed explicit. The full schema is documented in
//! `docs/config-schema.md`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use brudno::semimeasure::{Member, SemiMeasure, WeightedFamily};
use brudno::spin::{diagonal_site, ChainState};
use brudno::symbolic::{CircleMap, IntervalPartition, SymbolicSource};

/// Caps mirrored from the library so validation can name them without
/// running anything.
pub const QUANTUM_SITE_CAP: usize = 12;
pub const AUDIT_N_CAP: usize = 14;
pub const DOMINANCE_N_CAP: usize = 12;
pub const TAU_LEN_CAP: usize = 20;
pub const PAIR_EXPONENT_CAP: u32 = 24;
pub const CLASSICAL_N_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ClassicalBrudno,
    QuantumBrudno,
    EncodingSelftest,
    SemimeasureAudit,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::ClassicalBrudno => "classical-brudno",
            ExperimentKind::QuantumBrudno => "quantum-brudno",
            ExperimentKind::EncodingSelftest => "encoding-selftest",
            ExperimentKind::SemimeasureAudit => "semimeasure-audit",
        }
    }
}

/// A number that may be written as a TOML float/integer or as an exact
/// rational string like `"1/3"`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Int(i64),
    Rational(String),
}

impl Num {
    pub fn to_f64(&self) -> Result<f64, String> {
        match self {
            Num::Float(x) => Ok(*x),
            Num::Int(i) => Ok(*i as f64),
            Num::Rational(s) => {
                let r = parse_rational(s)?;
                let num = rational_part_to_f64(r.numer())?;
                let den = rational_part_to_f64(r.denom())?;
                Ok(num / den)
            }
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    BigRational::from_str(s.trim())
        .map_err(|e| format!("cannot parse {s:?} as a rational a/b: {e}"))
}

fn rational_part_to_f64(n: &BigInt) -> Result<f64, String> {
    let s = n.to_string();
    s.parse::<f64>().map_err(|e| format!("{s}: {e}"))
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    /// I.i.d. symbols; `p[i]` is the probability of symbol `i`.
    Bernoulli { p: Vec<Num> },
    /// Primitive Markov chain started in its stationary law.
    Markov { transition: Vec<Vec<Num>> },
    /// Circle-map orbit read through an interval partition; all arithmetic
    /// exact rational.
    Orbit {
        /// "doubling" or "rotation".
        map: String,
        /// Rotation angle as a rational string; required for "rotation".
        #[serde(default)]
        alpha: Option<String>,
        /// Initial point in [0, 1) as a rational string.
        x0: String,
        /// Partition endpoints from "0" to "1"; defaults to the binary
        /// partition at "1/2".
        #[serde(default)]
        partition: Option<Vec<String>>,
        #[serde(default = "default_empirical_samples")]
        empirical_samples: usize,
    },
}

fn default_empirical_samples() -> usize {
    4096
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    /// `diag(p, 1−p)^{⊗n}` — the diagonal ergodic product state.
    DiagonalProduct { p: Num },
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// Classical: append the exact source law as an extra member so the
    /// finite-n chain inequality applies verbatim.
    #[serde(default)]
    pub append_source: bool,
    /// Quantum: weight of the state member (default ½).
    #[serde(default)]
    pub member_weight: Option<Num>,
    /// Quantum: weight reserved for the tracial state (default ½).
    #[serde(default)]
    pub tracial_weight: Option<Num>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Block/prefix lengths, strictly increasing.
    #[serde(default)]
    pub n_grid: Option<Vec<usize>>,
    /// Typicality windows ε (quantum).
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    /// Number of per-sequence trajectories (classical).
    #[serde(default)]
    pub per_sequence_seeds: Option<usize>,
    /// Monte-Carlo sample count for non-enumerable block lengths.
    #[serde(default)]
    pub mc_samples: Option<usize>,
    /// Monte-Carlo base seed.
    #[serde(default)]
    pub mc_seed: Option<u64>,
    /// Sampled minimal projections per (n, ε) (quantum).
    #[serde(default)]
    pub projection_seeds: Option<u64>,
    /// Verdict tolerance on the expected-rate endpoint, bits.
    #[serde(default)]
    pub tolerance_bits: Option<f64>,
    /// Verdict tolerance on per-sequence rates, bits.
    #[serde(default)]
    pub per_sequence_tolerance_bits: Option<f64>,
    /// Minimum number of per-sequence seeds that must land inside the
    /// tolerance (default: 95% of them).
    #[serde(default)]
    pub min_seed_hits: Option<usize>,
    /// Audit: largest n for the finite-n chain inequality.
    #[serde(default)]
    pub chain_n_max: Option<usize>,
    /// Audit: largest n for the counting bound.
    #[serde(default)]
    pub counting_n_max: Option<usize>,
    /// Audit: largest c (bits) for the counting bound.
    #[serde(default)]
    pub counting_c_max: Option<u32>,
    /// Audit: largest n for the exhaustive dominance scan.
    #[serde(default)]
    pub dominance_n_max: Option<usize>,
    /// Quantum: largest n for the member dominance bound.
    #[serde(default)]
    pub member_bound_n_max: Option<usize>,
    /// Encoding: exhaustive length-lex bijection up to this length.
    #[serde(default)]
    pub tau_max_len: Option<usize>,
    /// Encoding: pairing round-trips for every value below 2^this.
    #[serde(default)]
    pub pair_max_exponent: Option<u32>,
    /// Encoding: random elementary-vector round-trips.
    #[serde(default)]
    pub elementary_trials: Option<usize>,
    /// Base RNG seed for per-sequence path sampling (classical) and random
    /// round-trips (encoding).
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_log_base() -> u32 {
    2
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Documentation field: all entropies and complexities are base-2.
    /// Validation rejects anything else.
    #[serde(default = "default_log_base")]
    pub log_base: u32,
    #[serde(default)]
    pub description: Option<String>,
    /// Default output directory; the `--out` flag overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub run: Option<RunSpec>,
}

impl ExperimentConfig {
    pub fn run_spec(&self) -> RunSpec {
        self.run.clone().unwrap_or_default()
    }

    pub fn family_spec(&self) -> FamilySpec {
        self.family.clone().unwrap_or_default()
    }
}

/// One validation finding: the offending field and what is wrong with it.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub fn load(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let config: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| anyhow::anyhow!("cannot parse {}: {e}", path.display()))?;
    Ok(config)
}

/// Tolerant entry point for `brudno validate`: parse failures become
/// diagnostics instead of errors.
pub fn validate_file(path: &Path) -> Vec<Diagnostic> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return vec![Diagnostic::new("(file)", format!("cannot read: {e}"))],
    };
    match toml::from_str::<ExperimentConfig>(&text) {
        Ok(config) => validate(&config),
        Err(e) => vec![Diagnostic::new("(parse)", e.to_string())],
    }
}

/// Pure semantic validation; returns every finding rather than stopping at
/// the first.
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if config.log_base != 2 {
        out.push(Diagnostic::new(
            "log_base",
            format!("only base 2 is implemented, got {}", config.log_base),
        ));
    }
    let run = config.run_spec();
    match config.kind {
        ExperimentKind::ClassicalBrudno => {
            validate_classical_source(config, &mut out);
            if let Some(grid) = &run.n_grid {
                validate_grid(grid, CLASSICAL_N_CAP, "run.n_grid", &mut out);
            }
            if run.mc_samples == Some(0) || run.mc_samples == Some(1) {
                out.push(Diagnostic::new(
                    "run.mc_samples",
                    "need at least 2 samples for a standard error",
                ));
            }
            if run.per_sequence_seeds == Some(0) {
                out.push(Diagnostic::new("run.per_sequence_seeds", "must be positive"));
            }
            if let Some(t) = run.tolerance_bits {
                if t <= 0.0 {
                    out.push(Diagnostic::new("run.tolerance_bits", "must be positive"));
                }
            }
        }
        ExperimentKind::QuantumBrudno => {
            match &config.state {
                None => out.push(Diagnostic::new(
                    "state",
                    "quantum-brudno requires a [state] table",
                )),
                Some(spec) => {
                    if let Err(e) = build_state(spec) {
                        out.push(Diagnostic::new("state", e.to_string()));
                    } else {
                        let StateSpec::DiagonalProduct { p } = spec;
                        if let Ok(p) = p.to_f64() {
                            if !(p > 0.0 && p < 1.0) {
                                out.push(Diagnostic::new(
                                    "state.p",
                                    format!(
                                        "p = {p} gives a non-faithful site; typicality needs 0 < p < 1"
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
            if let Some(grid) = &run.n_grid {
                validate_grid(grid, QUANTUM_SITE_CAP, "run.n_grid", &mut out);
            }
            if let Some(eps) = &run.eps {
                if eps.is_empty() || eps.iter().any(|&e| e <= 0.0) {
                    out.push(Diagnostic::new("run.eps", "every ε must be positive"));
                }
            }
            if let Some(n) = run.member_bound_n_max {
                if n == 0 || n > QUANTUM_SITE_CAP {
                    out.push(Diagnostic::new(
                        "run.member_bound_n_max",
                        format!("{n} outside 1..={QUANTUM_SITE_CAP} (cap {QUANTUM_SITE_CAP})"),
                    ));
                }
            }
            let fam = config.family_spec();
            let mw = fam.member_weight.as_ref().map(|n| n.to_f64());
            let tw = fam.tracial_weight.as_ref().map(|n| n.to_f64());
            for (field, w) in [("family.member_weight", &mw), ("family.tracial_weight", &tw)] {
                match w {
                    Some(Err(e)) => out.push(Diagnostic::new(field, e.clone())),
                    Some(Ok(w)) if *w <= 0.0 => {
                        out.push(Diagnostic::new(field, "must be positive"))
                    }
                    _ => {}
                }
            }
            if let (Some(Ok(m)), Some(Ok(t))) = (mw, tw) {
                if m + t > 1.0 + 1e-12 {
                    out.push(Diagnostic::new(
                        "family",
                        format!("weights sum to {} > 1", m + t),
                    ));
                }
            }
            if fam.append_source {
                out.push(Diagnostic::new(
                    "family.append_source",
                    "only meaningful for classical kinds",
                ));
            }
        }
        ExperimentKind::EncodingSelftest => {
            if let Some(len) = run.tau_max_len {
                if len > TAU_LEN_CAP {
                    out.push(Diagnostic::new(
                        "run.tau_max_len",
                        format!("{len} exceeds the cap {TAU_LEN_CAP}"),
                    ));
                }
            }
            if let Some(exp) = run.pair_max_exponent {
                if exp > PAIR_EXPONENT_CAP {
                    out.push(Diagnostic::new(
                        "run.pair_max_exponent",
                        format!("{exp} exceeds the cap {PAIR_EXPONENT_CAP}"),
                    ));
                }
            }
            if run.elementary_trials == Some(0) {
                out.push(Diagnostic::new("run.elementary_trials", "must be positive"));
            }
        }
        ExperimentKind::SemimeasureAudit => {
            validate_classical_source(config, &mut out);
            if let Some(spec) = &config.source {
                if let Ok(source) = build_source(spec) {
                    match source_member(&source) {
                        Ok(None) => out.push(Diagnostic::new(
                            "source",
                            "the chain bound compares against the source's member law; \
                             orbit sources have none",
                        )),
                        Ok(Some(member)) => {
                            let fam = config.family_spec();
                            if let Ok(mu) = build_classical_family(&fam, &source) {
                                if mu.family().find_member(&member).is_none() {
                                    out.push(Diagnostic::new(
                                        "family.append_source",
                                        "the source is not a family member; set \
                                         append_source = true so the chain bound applies",
                                    ));
                                }
                            }
                        }
                        Err(_) => {}
                    }
                }
            }
            for (field, n, cap) in [
                ("run.chain_n_max", run.chain_n_max, AUDIT_N_CAP),
                ("run.counting_n_max", run.counting_n_max, AUDIT_N_CAP),
                ("run.dominance_n_max", run.dominance_n_max, DOMINANCE_N_CAP),
            ] {
                if let Some(n) = n {
                    if n == 0 || n > cap {
                        out.push(Diagnostic::new(
                            field,
                            format!("{n} outside 1..={cap} (cap {cap})"),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn validate_classical_source(config: &ExperimentConfig, out: &mut Vec<Diagnostic>) {
    match &config.source {
        None => out.push(Diagnostic::new(
            "source",
            format!("{} requires a [source] table", config.kind.as_str()),
        )),
        Some(spec) => {
            if let Err(e) = build_source(spec) {
                out.push(Diagnostic::new("source", e.to_string()));
            }
            if config.family_spec().append_source
                && matches!(spec, SourceSpec::Orbit { .. })
            {
                out.push(Diagnostic::new(
                    "family.append_source",
                    "orbit sources are not mixture members",
                ));
            }
        }
    }
}

fn validate_grid(grid: &[usize], cap: usize, field: &str, out: &mut Vec<Diagnostic>) {
    if grid.is_empty() {
        out.push(Diagnostic::new(field, "must be nonempty"));
        return;
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        out.push(Diagnostic::new(field, "must be strictly increasing"));
    }
    for &n in grid {
        if n == 0 || n > cap {
            out.push(Diagnostic::new(
                field,
                format!("n = {n} outside 1..={cap} (cap {cap})"),
            ));
        }
    }
}

pub fn build_source(spec: &SourceSpec) -> anyhow::Result<SymbolicSource> {
    match spec {
        SourceSpec::Bernoulli { p } => {
            let p: Vec<f64> = p
                .iter()
                .map(|n| n.to_f64())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(SymbolicSource::bernoulli(p)?)
        }
        SourceSpec::Markov { transition } => {
            let t: Vec<Vec<f64>> = transition
                .iter()
                .map(|row| row.iter().map(|n| n.to_f64()).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(SymbolicSource::markov(t)?)
        }
        SourceSpec::Orbit {
            map,
            alpha,
            x0,
            partition,
            empirical_samples,
        } => {
            let map = match map.as_str() {
                "doubling" => CircleMap::Doubling,
                "rotation" => {
                    let alpha = alpha
                        .as_deref()
                        .ok_or_else(|| anyhow::anyhow!("rotation needs an alpha angle"))?;
                    CircleMap::Rotation(parse_rational(alpha).map_err(|e| anyhow::anyhow!(e))?)
                }
                other => anyhow::bail!("unknown map {other:?}; use \"doubling\" or \"rotation\""),
            };
            let partition = match partition {
                None => IntervalPartition::binary(),
                Some(endpoints) => {
                    let pts = endpoints
                        .iter()
                        .map(|s| parse_rational(s))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| anyhow::anyhow!(e))?;
                    IntervalPartition::new(pts)?
                }
            };
            let x0 = parse_rational(x0).map_err(|e| anyhow::anyhow!(e))?;
            Ok(SymbolicSource::orbit(map, partition, x0, *empirical_samples)?)
        }
    }
}

pub fn build_state(spec: &StateSpec) -> anyhow::Result<ChainState> {
    match spec {
        StateSpec::DiagonalProduct { p } => {
            let p = p.to_f64().map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(ChainState::iid_product(diagonal_site(p)?)?)
        }
    }
}

/// The member law matching a stochastic source; `None` for orbits, which
/// are deterministic encodings rather than mixture components.
pub fn source_member(source: &SymbolicSource) -> anyhow::Result<Option<Member>> {
    Ok(match source {
        SymbolicSource::Bernoulli { p } => Some(Member::bernoulli(p.clone())?),
        SymbolicSource::Markov { transition, .. } => Some(Member::markov(transition.clone())?),
        SymbolicSource::Orbit { .. } => None,
    })
}

/// The classical mixture family: the default binary grid, optionally with
/// the exact source law appended as a member.
pub fn build_classical_family(
    family: &FamilySpec,
    source: &SymbolicSource,
) -> anyhow::Result<SemiMeasure> {
    let base = WeightedFamily::default_binary();
    if !family.append_source {
        return Ok(SemiMeasure::mixture(base));
    }
    let member = source_member(source)?
        .ok_or_else(|| anyhow::anyhow!("orbit sources are not mixture members"))?;
    let mut members = base.members().to_vec();
    // appending an already-present member would double-count its law
    if base.find_member(&member).is_none() {
        members.push(member);
    }
    Ok(SemiMeasure::mixture(WeightedFamily::with_dyadic_weights(
        2, members,
    )?))
}
