//! Scenario files: a TOML tree holding the lattice, the initial
//! preparation, the observation schedule, and the requested analyses.
//! Physical parameters live only here, never on the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use idlab_core::consistency::ScanConfig;
use idlab_core::verification::Tolerances;
use idlab_core::{Boundary, ExchangeStatistics, LatticeSpec};

/// Errors before any physics runs: I/O, syntax, or field validation.
#[derive(Debug)]
pub enum ScenarioError {
    Io(String),
    Parse(String),
    Invalid { field: String, message: String },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io(m) => write!(f, "cannot read scenario: {m}"),
            ScenarioError::Parse(m) => write!(f, "scenario parse error: {m}"),
            ScenarioError::Invalid { field, message } => {
                write!(f, "invalid scenario field '{field}': {message}")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

fn invalid(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    seed: Option<u64>,
    statistics: String,
    epsilon: Option<f64>,
    interaction: Option<f64>,
    lattice: LatticeSection,
    schedule: Vec<f64>,
    analyses: Vec<String>,
    initial: InitialSection,
    tolerances: Option<BTreeMap<String, f64>>,
    scan: Option<ScanSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSection {
    sites: usize,
    boundary: String,
    hopping: f64,
    potential: Option<PotentialSpec>,
    dt: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PotentialSpec {
    Uniform(f64),
    PerSite(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    packets: Option<Vec<PacketSpec>>,
    amplitudes: Option<Vec<AmplitudeSpec>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
    pub sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeSpec {
    positions: Vec<usize>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSection {
    scenarios: Option<usize>,
    min_sites: Option<usize>,
    max_sites: Option<usize>,
    isolation_samples: Option<usize>,
}

/// The analyses a scenario may request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analysis {
    TransitionMap,
    CompositionCheck,
    IsolationCheck,
    CandidateScan,
    Swap,
    Tracks,
    Leftmost,
    Distance,
    DiracContrast,
    SumRuleDemo,
}

impl Analysis {
    pub fn parse(name: &str) -> Option<Analysis> {
        Some(match name {
            "transition_map" => Analysis::TransitionMap,
            "composition_check" => Analysis::CompositionCheck,
            "isolation_check" => Analysis::IsolationCheck,
            "candidate_scan" => Analysis::CandidateScan,
            "swap" => Analysis::Swap,
            "tracks" => Analysis::Tracks,
            "leftmost" => Analysis::Leftmost,
            "distance" => Analysis::Distance,
            "dirac_contrast" => Analysis::DiracContrast,
            "sum_rule_demo" => Analysis::SumRuleDemo,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Analysis::TransitionMap => "transition_map",
            Analysis::CompositionCheck => "composition_check",
            Analysis::IsolationCheck => "isolation_check",
            Analysis::CandidateScan => "candidate_scan",
            Analysis::Swap => "swap",
            Analysis::Tracks => "tracks",
            Analysis::Leftmost => "leftmost",
            Analysis::Distance => "distance",
            Analysis::DiracContrast => "dirac_contrast",
            Analysis::SumRuleDemo => "sum_rule_demo",
        }
    }

    fn needs_packets(&self) -> bool {
        matches!(
            self,
            Analysis::TransitionMap
                | Analysis::CompositionCheck
                | Analysis::Swap
                | Analysis::Tracks
                | Analysis::DiracContrast
                | Analysis::SumRuleDemo
        )
    }
}

/// The initial preparation: Gaussian packets (sorted left to right) or an
/// explicit labelled-space wavefunction.
#[derive(Debug, Clone)]
pub enum Initial {
    Packets(Vec<PacketSpec>),
    Amplitudes(Vec<(Vec<usize>, Complex64)>),
}

impl Initial {
    pub fn particle_count(&self) -> usize {
        match self {
            Initial::Packets(p) => p.len(),
            Initial::Amplitudes(a) => a.first().map(|(pos, _)| pos.len()).unwrap_or(0),
        }
    }
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub seed: u64,
    pub statistics: ExchangeStatistics,
    pub epsilon: f64,
    pub interaction: f64,
    pub lattice: LatticeSpec,
    pub schedule: Vec<f64>,
    pub analyses: Vec<Analysis>,
    pub initial: Initial,
    pub tolerances: Tolerances,
    pub scan: ScanConfig,
    /// SHA-256 of the scenario file bytes; part of every output's metadata.
    pub source_hash: String,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let raw =
        std::fs::read(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| ScenarioError::Parse("scenario is not valid UTF-8".into()))?;
    let file: ScenarioFile =
        toml::from_str(&text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let mut hasher = Sha256::new();
    hasher.update(&raw);
    let source_hash = format!("{:x}", hasher.finalize());
    validate(file, source_hash)
}

fn validate(file: ScenarioFile, source_hash: String) -> Result<Scenario, ScenarioError> {
    let statistics = match file.statistics.as_str() {
        "boson" => ExchangeStatistics::Boson,
        "fermion" => ExchangeStatistics::Fermion,
        other => {
            return Err(invalid(
                "statistics",
                format!("expected 'boson' or 'fermion', got '{other}'"),
            ))
        }
    };

    let boundary = match file.lattice.boundary.as_str() {
        "open" => Boundary::Open,
        "periodic" => Boundary::Periodic,
        other => {
            return Err(invalid(
                "lattice.boundary",
                format!("expected 'open' or 'periodic', got '{other}'"),
            ))
        }
    };
    let sites = file.lattice.sites;
    let potential = match file.lattice.potential {
        None => vec![0.0; sites],
        Some(PotentialSpec::Uniform(v)) => vec![v; sites],
        Some(PotentialSpec::PerSite(v)) => {
            if v.len() != sites {
                return Err(invalid(
                    "lattice.potential",
                    format!("{} entries for {} sites", v.len(), sites),
                ));
            }
            v
        }
    };
    let lattice = LatticeSpec {
        sites,
        boundary,
        hopping: file.lattice.hopping,
        potential,
        dt: file.lattice.dt,
    };
    lattice
        .validate()
        .map_err(|e| invalid("lattice", e.to_string()))?;

    if file.schedule.is_empty() {
        return Err(invalid(
            "schedule",
            "at least one observation time required",
        ));
    }
    if !file.schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("schedule", "schedule not increasing"));
    }

    let mut analyses = Vec::new();
    for name in &file.analyses {
        let a = Analysis::parse(name)
            .ok_or_else(|| invalid("analyses", format!("unrecognized analysis '{name}'")))?;
        if !analyses.contains(&a) {
            analyses.push(a);
        }
    }
    if analyses.is_empty() {
        return Err(invalid("analyses", "at least one analysis required"));
    }

    let initial = match (file.initial.packets, file.initial.amplitudes) {
        (Some(mut packets), None) => {
            if packets.is_empty() {
                return Err(invalid("initial.packets", "empty packet list"));
            }
            for (i, p) in packets.iter().enumerate() {
                if p.sigma.is_nan() || p.sigma <= 0.0 {
                    return Err(invalid(
                        &format!("initial.packets[{i}].sigma"),
                        "width must be positive",
                    ));
                }
                if p.x0 < 0.0 || p.x0 >= sites as f64 {
                    return Err(invalid(
                        &format!("initial.packets[{i}].x0"),
                        format!("center {} outside lattice of {} sites", p.x0, sites),
                    ));
                }
            }
            // left-most-first labelling convention
            packets.sort_by(|a, b| a.x0.total_cmp(&b.x0));
            if statistics == ExchangeStatistics::Fermion {
                let centers: Vec<usize> = packets.iter().map(|p| p.x0.round() as usize).collect();
                if centers.windows(2).any(|w| w[0] == w[1]) {
                    return Err(invalid(
                        "initial.packets",
                        "fermionic events must be distinct (exclusion): coincident packet centers",
                    ));
                }
            }
            Initial::Packets(packets)
        }
        (None, Some(amplitudes)) => {
            if amplitudes.is_empty() {
                return Err(invalid("initial.amplitudes", "empty amplitude list"));
            }
            let n = amplitudes[0].positions.len();
            if n == 0 {
                return Err(invalid("initial.amplitudes", "empty position tuple"));
            }
            let mut entries = Vec::with_capacity(amplitudes.len());
            for (i, a) in amplitudes.iter().enumerate() {
                if a.positions.len() != n {
                    return Err(invalid(
                        &format!("initial.amplitudes[{i}]"),
                        "position tuples must all have the same length",
                    ));
                }
                if let Some(&p) = a.positions.iter().find(|&&p| p >= sites) {
                    return Err(invalid(
                        &format!("initial.amplitudes[{i}]"),
                        format!("site {p} outside lattice of {sites} sites"),
                    ));
                }
                if statistics == ExchangeStatistics::Fermion {
                    let mut sorted = a.positions.clone();
                    sorted.sort_unstable();
                    if sorted.windows(2).any(|w| w[0] == w[1]) && (a.re != 0.0 || a.im != 0.0) {
                        return Err(invalid(
                            &format!("initial.amplitudes[{i}]"),
                            "fermionic events must be distinct (exclusion): coincident positions",
                        ));
                    }
                }
                entries.push((a.positions.clone(), Complex64::new(a.re, a.im)));
            }
            Initial::Amplitudes(entries)
        }
        (Some(_), Some(_)) => {
            return Err(invalid(
                "initial",
                "give either packets or amplitudes, not both",
            ))
        }
        (None, None) => return Err(invalid("initial", "missing packets or amplitudes")),
    };

    for a in &analyses {
        if a.needs_packets() && !matches!(initial, Initial::Packets(_)) {
            return Err(invalid(
                "analyses",
                format!("analysis '{}' requires packet initial data", a.name()),
            ));
        }
    }
    let n = initial.particle_count();
    let needs_two = analyses.iter().any(|a| {
        matches!(
            a,
            Analysis::TransitionMap
                | Analysis::CompositionCheck
                | Analysis::Swap
                | Analysis::Tracks
                | Analysis::Leftmost
                | Analysis::Distance
                | Analysis::DiracContrast
        )
    });
    if needs_two && n != 2 {
        return Err(invalid(
            "initial",
            format!("two-particle analyses requested but {n} particles prepared"),
        ));
    }
    let needs_three_times = analyses
        .iter()
        .any(|a| matches!(a, Analysis::CompositionCheck | Analysis::SumRuleDemo));
    if needs_three_times && file.schedule.len() < 3 {
        return Err(invalid(
            "schedule",
            "composition_check and sum_rule_demo need at least three observation times",
        ));
    }

    let mut tolerances = Tolerances::default();
    if let Some(overrides) = file.tolerances {
        for (key, value) in overrides {
            tolerances
                .set(&key, value)
                .map_err(|_| invalid("tolerances", format!("unknown tolerance key '{key}'")))?;
        }
    }

    let seed = file.seed.unwrap_or(0);
    let mut scan = ScanConfig {
        seed,
        isolation_tol: tolerances.get("isolation"),
        composition_tol: tolerances.get("composition"),
        ..ScanConfig::default()
    };
    if let Some(section) = file.scan {
        if let Some(s) = section.scenarios {
            scan.scenarios = s;
        }
        if let Some(s) = section.min_sites {
            scan.min_sites = s;
        }
        if let Some(s) = section.max_sites {
            scan.max_sites = s;
        }
        if let Some(s) = section.isolation_samples {
            scan.isolation_samples = s;
        }
        if scan.min_sites < 2 || scan.max_sites < scan.min_sites {
            return Err(invalid("scan", "need 2 <= min_sites <= max_sites"));
        }
    }

    Ok(Scenario {
        seed,
        statistics,
        epsilon: file.epsilon.unwrap_or(1e-6),
        interaction: file.interaction.unwrap_or(0.0),
        lattice,
        schedule: file.schedule,
        analyses,
        initial,
        tolerances,
        scan,
        source_hash,
    })
}
