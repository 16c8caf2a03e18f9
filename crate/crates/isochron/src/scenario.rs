//! Scenario files: sectioned `key=value` text describing a full desk
//! experiment. Parsing is strict — unknown sections, unknown keys,
//! duplicates, and malformed values are all reported, and every problem
//! in the file is collected before giving up.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::burnup::{atoms_from_mass, build_chain, Chain, IrradiationScenario, Segment};
use crate::hfclock::{
    CampaignConfig, Detection, DriftModel, HyperfineClockSpec, RamseyConfig,
};
use crate::ladder::{JumpLadderConfig, LadderDetection};
use crate::nuclide::{parse_duration_s, NuclideId, NuclideRegistry};
use crate::separation::{SeparationPlan, Stage};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioIssue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ScenarioIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn format_issues(issues: &[ScenarioIssue]) -> String {
    issues
        .iter()
        .map(ScenarioIssue::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario has {} problem(s):\n{}", .0.len(), format_issues(.0))]
    Parse(Vec<ScenarioIssue>),
    #[error("missing required section(s): {}", .0.join(", "))]
    MissingSections(Vec<&'static str>),
    #[error("[{section}] {message}")]
    Assembly {
        section: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSection {
    pub nuclide: NuclideId,
    pub mass_g: f64,
    pub enrichment: f64,
    pub sigma_b: Option<f64>,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactorSection {
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub grid_points: usize,
    pub product: Option<NuclideId>,
    pub negligible_threshold: f64,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            grid_points: 301,
            product: None,
            negligible_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamseySection {
    pub free_s: f64,
    pub pulse_divider: f64,
    pub shots: u64,
    pub grid_points: usize,
    pub grid_span: f64,
    pub offset: f64,
    pub ions: u32,
    pub alpha: f64,
    pub detection: Option<Detection>,
}

impl RamseySection {
    pub fn config(&self) -> RamseyConfig {
        let mut config = RamseyConfig::pi_half(self.free_s, self.pulse_divider, self.shots);
        config.detection = self.detection;
        config
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftSection {
    pub model: DriftModel,
    pub new_age_s: f64,
    pub natural_age_s: f64,
}

impl Default for DriftSection {
    fn default() -> Self {
        DriftSection {
            model: DriftModel::None,
            new_age_s: 0.0,
            natural_age_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSection {
    pub config: JumpLadderConfig,
    pub runs: u32,
    pub bootstrap: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationSection {
    pub plan: SeparationPlan,
    pub per_stage: Option<f64>,
    pub target_suppression: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioDocument {
    pub target: Option<TargetSection>,
    pub reactor: Option<ReactorSection>,
    pub output: OutputSection,
    pub clock: Option<HyperfineClockSpec>,
    pub ramsey: Option<RamseySection>,
    pub drift: Option<DriftSection>,
    pub ladder: Option<LadderSection>,
    pub separation: Option<SeparationSection>,
}

const SECTION_NAMES: [&str; 8] = [
    "target",
    "reactor",
    "output",
    "clock",
    "ramsey",
    "drift",
    "ladder",
    "separation",
];

struct RawSection {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

/// One section's key set, with typed extraction and unknown-key reporting.
struct Reader<'a> {
    section: RawSection,
    taken: BTreeSet<String>,
    issues: &'a mut Vec<ScenarioIssue>,
}

impl<'a> Reader<'a> {
    fn new(section: RawSection, issues: &'a mut Vec<ScenarioIssue>) -> Self {
        Reader {
            section,
            taken: BTreeSet::new(),
            issues,
        }
    }

    fn push(&mut self, line: usize, message: String) {
        self.issues.push(ScenarioIssue { line, message });
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        self.taken.insert(key.to_string());
        self.section
            .entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, line)| (v.clone(), *line))
    }

    fn required<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Option<T> {
        match self.raw(key) {
            None => {
                let line = self.section.line;
                self.push(
                    line,
                    format!("[{}] missing required key '{}'", self.section.name, key),
                );
                None
            }
            Some((value, line)) => match parse(&value) {
                Ok(v) => Some(v),
                Err(message) => {
                    self.push(line, format!("key '{key}': {message}"));
                    None
                }
            },
        }
    }

    fn optional<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Option<Option<T>> {
        match self.raw(key) {
            None => Some(None),
            Some((value, line)) => match parse(&value) {
                Ok(v) => Some(Some(v)),
                Err(message) => {
                    self.push(line, format!("key '{key}': {message}"));
                    None
                }
            },
        }
    }

    fn finish(mut self) {
        let unknown: Vec<(String, usize)> = self
            .section
            .entries
            .iter()
            .filter(|(k, _, _)| !self.taken.contains(k))
            .map(|(k, _, line)| (k.clone(), *line))
            .collect();
        for (key, line) in unknown {
            let section = self.section.name.clone();
            self.push(line, format!("unknown key '{key}' in [{section}]"));
        }
    }
}

fn p_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>()
        .map_err(|_| format!("'{v}' is not a number"))
}

fn p_positive(v: &str) -> Result<f64, String> {
    let x = p_f64(v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{v}' must be positive"))
    }
}

fn p_nonnegative(v: &str) -> Result<f64, String> {
    let x = p_f64(v)?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{v}' must be non-negative"))
    }
}

fn p_u64(v: &str) -> Result<u64, String> {
    v.parse::<u64>()
        .map_err(|_| format!("'{v}' is not a non-negative integer"))
}

fn p_u32(v: &str) -> Result<u32, String> {
    v.parse::<u32>()
        .map_err(|_| format!("'{v}' is not a non-negative integer"))
}

fn p_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>()
        .map_err(|_| format!("'{v}' is not a non-negative integer"))
}

fn p_nuclide(v: &str) -> Result<NuclideId, String> {
    NuclideId::parse(v).map_err(|e| e.to_string())
}

fn p_fraction(v: &str) -> Result<f64, String> {
    let x = p_f64(v)?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("'{v}' must lie in [0, 1]"))
    }
}

/// `30d@1.0e13,12h@0` -> ordered flux segments.
fn p_segments(v: &str) -> Result<Vec<Segment>, String> {
    let mut segments = Vec::new();
    for part in v.split(',') {
        let (dur, flux) = part
            .trim()
            .split_once('@')
            .ok_or_else(|| format!("segment '{part}' is not duration@flux"))?;
        let duration_s = parse_duration_s(dur.trim())?;
        let flux = p_nonnegative(flux.trim())?;
        segments.push(Segment { duration_s, flux });
    }
    if segments.is_empty() {
        return Err("segments list is empty".into());
    }
    Ok(segments)
}

/// `1e4@0.98,1e4@0.98` -> separation stages (suppression@recovery).
fn p_stages(v: &str) -> Result<Vec<Stage>, String> {
    let mut stages = Vec::new();
    for part in v.split(',') {
        let (sup, rec) = part
            .trim()
            .split_once('@')
            .ok_or_else(|| format!("stage '{part}' is not suppression@recovery"))?;
        stages.push(Stage {
            suppression: p_f64(sup.trim())?,
            recovery: p_f64(rec.trim())?,
        });
    }
    Ok(stages)
}

/// `Sr-87:0.93,Sr-86:0.07` -> composition fractions.
fn p_composition(v: &str) -> Result<Vec<(NuclideId, f64)>, String> {
    let mut parts = Vec::new();
    for part in v.split(',') {
        let (name, fraction) = part
            .trim()
            .split_once(':')
            .ok_or_else(|| format!("entry '{part}' is not nuclide:fraction"))?;
        parts.push((p_nuclide(name.trim())?, p_fraction(fraction.trim())?));
    }
    if parts.is_empty() {
        return Err("composition is empty".into());
    }
    Ok(parts)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, ScenarioError> {
    let mut issues: Vec<ScenarioIssue> = Vec::new();
    let mut sections: Vec<RawSection> = Vec::new();
    let mut seen_sections: BTreeSet<String> = BTreeSet::new();
    // None = outside any section; Some(false) = inside an unknown section
    // (its keys are swallowed without further noise).
    let mut current_valid: Option<bool> = None;

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                issues.push(ScenarioIssue {
                    line: line_no,
                    message: format!("malformed section header '{line}'"),
                });
                current_valid = None;
                continue;
            };
            let name = name.trim().to_string();
            if !SECTION_NAMES.contains(&name.as_str()) {
                issues.push(ScenarioIssue {
                    line: line_no,
                    message: format!("unknown section [{name}]"),
                });
                current_valid = Some(false);
                continue;
            }
            if !seen_sections.insert(name.clone()) {
                issues.push(ScenarioIssue {
                    line: line_no,
                    message: format!("duplicate section [{name}]"),
                });
                current_valid = Some(false);
                continue;
            }
            sections.push(RawSection {
                name,
                line: line_no,
                entries: Vec::new(),
            });
            current_valid = Some(true);
        } else if let Some((key, value)) = line.split_once('=') {
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            match current_valid {
                None => issues.push(ScenarioIssue {
                    line: line_no,
                    message: format!("key '{key}' appears outside any [section]"),
                }),
                Some(false) => {} // swallowed; the section itself was reported
                Some(true) => {
                    let section = sections.last_mut().unwrap();
                    if section.entries.iter().any(|(k, _, _)| *k == key) {
                        issues.push(ScenarioIssue {
                            line: line_no,
                            message: format!("duplicate key '{key}' in [{}]", section.name),
                        });
                    } else {
                        section.entries.push((key, value, line_no));
                    }
                }
            }
        } else {
            issues.push(ScenarioIssue {
                line: line_no,
                message: format!("expected [section] or key=value, found '{line}'"),
            });
        }
    }

    let mut doc = ScenarioDocument::default();
    for section in sections {
        match section.name.as_str() {
            "target" => doc.target = read_target(section, &mut issues),
            "reactor" => doc.reactor = read_reactor(section, &mut issues),
            "output" => {
                if let Some(output) = read_output(section, &mut issues) {
                    doc.output = output;
                }
            }
            "clock" => doc.clock = read_clock(section, &mut issues),
            "ramsey" => doc.ramsey = read_ramsey(section, &mut issues),
            "drift" => doc.drift = read_drift(section, &mut issues),
            "ladder" => doc.ladder = read_ladder(section, &mut issues),
            "separation" => doc.separation = read_separation(section, &mut issues),
            _ => unreachable!("section names are pre-filtered"),
        }
    }

    if issues.is_empty() {
        Ok(doc)
    } else {
        Err(ScenarioError::Parse(issues))
    }
}

fn read_target(section: RawSection, issues: &mut Vec<ScenarioIssue>) -> Option<TargetSection> {
    let mut r = Reader::new(section, issues);
    let nuclide = r.required("nuclide", p_nuclide);
    let mass_g = r.required("mass_g", p_positive);
    let enrichment = r.optional("enrichment", |v| {
        let x = p_fraction(v)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err("enrichment must be positive".into())
        }
    });
    let sigma_b = r.optional("sigma_b", p_positive);
    let depth = r.optional("depth", |v| p_u32(v));
    r.finish();
    Some(TargetSection {
        nuclide: nuclide?,
        mass_g: mass_g?,
        enrichment: enrichment?.unwrap_or(1.0),
        sigma_b: sigma_b?,
        depth: depth?.unwrap_or(2),
    })
}

fn read_reactor(section: RawSection, issues: &mut Vec<ScenarioIssue>) -> Option<ReactorSection> {
    let header = section.line;
    let mut r = Reader::new(section, issues);
    let segments = r.optional("segments", p_segments);
    let flux = r.optional("flux", p_nonnegative);
    let duration = r.optional("duration", |v| parse_duration_s(v));
    r.finish();
    let (segments, flux, duration) = (segments?, flux?, duration?);
    match (segments, flux, duration) {
        (Some(segments), None, None) => Some(ReactorSection { segments }),
        (None, Some(flux), Some(duration_s)) => Some(ReactorSection {
            segments: vec![Segment { duration_s, flux }],
        }),
        _ => {
            issues.push(ScenarioIssue {
                line: header,
                message:
                    "[reactor] needs either segments=dur@flux[,...] or flux= plus duration="
                        .into(),
            });
            None
        }
    }
}

fn read_output(section: RawSection, issues: &mut Vec<ScenarioIssue>) -> Option<OutputSection> {
    let mut r = Reader::new(section, issues);
    let grid_points = r.optional("grid_points", |v| {
        let n = p_usize(v)?;
        if n >= 2 {
            Ok(n)
        } else {
            Err("grid_points must be >= 2".into())
        }
    });
    let product = r.optional("product", p_nuclide);
    let threshold = r.optional("negligible_threshold", p_fraction);
    r.finish();
    let defaults = OutputSection::default();
    Some(OutputSection {
        grid_points: grid_points?.unwrap_or(defaults.grid_points),
        product: product?,
        negligible_threshold: threshold?.unwrap_or(defaults.negligible_threshold),
    })
}

fn read_clock(
    section: RawSection,
    issues: &mut Vec<ScenarioIssue>,
) -> Option<HyperfineClockSpec> {
    let header = section.line;
    let mut r = Reader::new(section, issues);
    let nuclide = r.required("nuclide", p_nuclide);
    let nu0_hz = r.required("nu0_hz", p_positive);
    let f_lower = r.required("f_lower", |v| p_u32(v));
    let f_upper = r.required("f_upper", |v| p_u32(v));
    let pump_nm = r.optional("pump_nm", p_positive);
    let detect_nm = r.optional("detect_nm", p_positive);
    r.finish();
    let spec = HyperfineClockSpec {
        nuclide: nuclide?,
        nu0_hz: nu0_hz?,
        f_lower: f_lower?,
        f_upper: f_upper?,
        pump_nm: pump_nm?,
        detect_nm: detect_nm?,
    };
    if let Err(e) = spec.validate() {
        issues.push(ScenarioIssue {
            line: header,
            message: e.to_string(),
        });
        return None;
    }
    Some(spec)
}

fn read_ramsey(section: RawSection, issues: &mut Vec<ScenarioIssue>) -> Option<RamseySection> {
    let header = section.line;
    let mut r = Reader::new(section, issues);
    let free_s = r.required("free", |v| parse_duration_s(v));
    let pulse_divider = r.optional("pulse_divider", p_positive);
    let shots = r.required("shots", |v| {
        let n = p_u64(v)?;
        if n >= 1 {
            Ok(n)
        } else {
            Err("shots must be >= 1".into())
        }
    });
    let grid_points = r.optional("grid_points", |v| {
        let n = p_usize(v)?;
        if n >= 2 {
            Ok(n)
        } else {
            Err("grid_points must be >= 2".into())
        }
    });
    let grid_span = r.optional("grid_span", p_positive);
    let offset = r.optional("offset", p_f64);
    let ions = r.optional("ions", |v| {
        let n = p_u32(v)?;
        if n >= 2 {
            Ok(n)
        } else {
            Err("ions must be >= 2".into())
        }
    });
    let alpha = r.optional("alpha", |v| {
        let x = p_f64(v)?;
        if x > 0.0 && x < 1.0 {
            Ok(x)
        } else {
            Err("alpha must lie in (0, 1)".into())
        }
    });
    let bright = r.optional("detection_bright", p_positive);
    let dark = r.optional("detection_dark", p_nonnegative);
    let threshold = r.optional("detection_threshold", |v| {
        let n = p_u64(v)?;
        if n >= 1 {
            Ok(n)
        } else {
            Err("threshold must be >= 1".into())
        }
    });
    r.finish();
    let (bright, dark, threshold) = (bright?, dark?, threshold?);
    let detection = match (bright, dark, threshold) {
        (None, None, None) => None,
        (Some(bright_mean), Some(dark_mean), Some(threshold)) => Some(Detection {
            bright_mean,
            dark_mean,
            threshold,
        }),
        _ => {
            issues.push(ScenarioIssue {
                line: header,
                message: "detection needs all of detection_bright, detection_dark, detection_threshold".into(),
            });
            return None;
        }
    };
    Some(RamseySection {
        free_s: free_s?,
        pulse_divider: pulse_divider?.unwrap_or(1000.0),
        shots: shots?,
        grid_points: grid_points?.unwrap_or(11),
        grid_span: grid_span?.unwrap_or(0.6),
        offset: offset?.unwrap_or(0.0),
        ions: ions?.unwrap_or(2),
        alpha: alpha?.unwrap_or(0.05),
        detection,
    })
}

fn read_drift(section: RawSection, issues: &mut Vec<ScenarioIssue>) -> Option<DriftSection> {
    let header = section.line;
    let mut r = Reader::new(section, issues);
    let kind = r.required("kind", |v| match v {
        "none" | "relaxation" | "predecay" => Ok(v.to_string()),
        _ => Err(format!(
            "'{v}' is not a drift kind (none | relaxation | predecay)"
        )),
    });
    let amplitude = r.optional("amplitude", p_positive);
    let tau = r.optional("tau", |v| parse_duration_s(v));
    let kappa = r.optional("kappa", |v| parse_duration_s(v));
    let decay_time = r.optional("decay_time", |v| parse_duration_s(v));
    let new_age = r.optional("new_age", |v| parse_duration_s(v));
    let natural_age = r.optional("natural_age", |v| parse_duration_s(v));
    r.finish();
    let (amplitude, tau, kappa, decay_time) = (amplitude?, tau?, kappa?, decay_time?);
    let reject = |issues: &mut Vec<ScenarioIssue>, message: String| {
        issues.push(ScenarioIssue {
            line: header,
            message,
        });
    };
    let model = match kind?.as_str() {
        "none" => {
            if amplitude.is_some() || tau.is_some() || kappa.is_some() || decay_time.is_some() {
                reject(
                    issues,
                    "kind=none takes no model parameters".into(),
                );
                return None;
            }
            DriftModel::None
        }
        "relaxation" => match (amplitude, tau, kappa, decay_time) {
            (Some(amplitude), Some(tau_s), None, None) => DriftModel::Relaxation {
                amplitude,
                tau_s,
            },
            _ => {
                reject(
                    issues,
                    "kind=relaxation needs amplitude= and tau= (and no kappa/decay_time)".into(),
                );
                return None;
            }
        },
        "predecay" => match (amplitude, tau, kappa, decay_time) {
            (None, None, Some(kappa_s), Some(decay_time_s)) => DriftModel::Predecay {
                kappa_s,
                decay_time_s,
            },
            _ => {
                reject(
                    issues,
                    "kind=predecay needs kappa= and decay_time= (and no amplitude/tau)".into(),
                );
                return None;
            }
        },
        _ => unreachable!(),
    };
    Some(DriftSection {
        model,
        new_age_s: new_age?.unwrap_or(0.0),
        natural_age_s: natural_age?.unwrap_or(0.0),
    })
}

fn read_ladder(section: RawSection, issues: &mut Vec<ScenarioIssue>) -> Option<LadderSection> {
    let header = section.line;
    let mut r = Reader::new(section, issues);
    let lifetime_e1 = r.required("lifetime_e1", |v| parse_duration_s(v));
    let lifetime_e2 = r.required("lifetime_e2", |v| parse_duration_s(v));
    let interval = r.required("interval", |v| parse_duration_s(v));
    let perturbation = r.optional("perturbation", p_nonnegative);
    let beta = r.optional("beta_per_s", p_f64);
    let probe_sigma = r.required("probe_sigma", p_positive);
    let horizon = r.required("horizon", |v| parse_duration_s(v));
    let runs = r.optional("runs", |v| p_u32(v));
    let bootstrap = r.optional("bootstrap", |v| p_u32(v));
    let rate = r.optional("cycling_rate", p_positive);
    let efficiency = r.optional("efficiency", p_fraction);
    let window = r.optional("window", |v| parse_duration_s(v));
    let dark_mean = r.optional("dark_mean", p_nonnegative);
    let threshold = r.optional("threshold", |v| p_u64(v));
    let hazard_factor = r.optional("hazard_factor", p_positive);
    r.finish();
    let defaults = LadderDetection::hg199_defaults();
    let config = JumpLadderConfig {
        lifetime_e1_s: lifetime_e1?,
        lifetime_e2_s: lifetime_e2?,
        probe_interval_s: interval?,
        probe_perturbation: perturbation?.unwrap_or(0.0),
        detection: LadderDetection {
            cycling_rate_per_s: rate?.unwrap_or(defaults.cycling_rate_per_s),
            collection_efficiency: efficiency?.unwrap_or(defaults.collection_efficiency),
            window_s: window?.unwrap_or(defaults.window_s),
            dark_mean: dark_mean?.unwrap_or(defaults.dark_mean),
            threshold: threshold?.unwrap_or(defaults.threshold),
        },
        aging_beta_per_s: beta?.unwrap_or(0.0),
        probe_sigma_fractional: probe_sigma?,
        horizon_s: horizon?,
        hazard_factor: hazard_factor?.unwrap_or(1.0),
    };
    if let Err(e) = config.validate() {
        issues.push(ScenarioIssue {
            line: header,
            message: e.to_string(),
        });
        return None;
    }
    Some(LadderSection {
        config,
        runs: runs?.unwrap_or(100),
        bootstrap: bootstrap?.unwrap_or(1000),
    })
}

fn read_separation(
    section: RawSection,
    issues: &mut Vec<ScenarioIssue>,
) -> Option<SeparationSection> {
    let header = section.line;
    let mut r = Reader::new(section, issues);
    let stages = r.required("stages", p_stages);
    let composition = r.required("composition", p_composition);
    let product = r.required("product", p_nuclide);
    let excite_nm = r.optional("excite_nm", p_positive);
    let ionize_nm = r.optional("ionize_nm", p_positive);
    let per_stage = r.optional("per_stage", p_positive);
    let target_suppression = r.optional("target_suppression", p_positive);
    r.finish();
    let plan = SeparationPlan {
        stages: stages?,
        composition: composition?.into_iter().collect(),
        product: product?,
        excite_nm: excite_nm?,
        ionize_nm: ionize_nm?,
    };
    if let Err(e) = plan.validate() {
        issues.push(ScenarioIssue {
            line: header,
            message: e.to_string(),
        });
        return None;
    }
    Some(SeparationSection {
        plan,
        per_stage: per_stage?,
        target_suppression: target_suppression?,
    })
}

impl ScenarioDocument {
    fn require(
        &self,
        needs: &[(&'static str, bool)],
    ) -> Result<(), ScenarioError> {
        let missing: Vec<&'static str> = needs
            .iter()
            .filter(|(_, present)| !present)
            .map(|(name, _)| *name)
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::MissingSections(missing))
        }
    }

    /// Build the transmutation chain and irradiation scenario for `chain`.
    pub fn chain_inputs(
        &self,
        registry: &NuclideRegistry,
    ) -> Result<(Chain, IrradiationScenario), ScenarioError> {
        self.require(&[
            ("target", self.target.is_some()),
            ("reactor", self.reactor.is_some()),
        ])?;
        let target = self.target.as_ref().unwrap();
        let reactor = self.reactor.as_ref().unwrap();
        let assembly = |message: String| ScenarioError::Assembly {
            section: "target",
            message,
        };
        let nuclide = registry
            .get(target.nuclide)
            .map_err(|e| assembly(e.to_string()))?;
        let mut chain = build_chain(registry, target.nuclide, target.depth)
            .map_err(|e| assembly(e.to_string()))?;
        if let Some(sigma_b) = target.sigma_b {
            chain
                .override_sigma(target.nuclide, sigma_b)
                .map_err(|e| assembly(e.to_string()))?;
        }
        let atoms = atoms_from_mass(target.mass_g * target.enrichment, nuclide.mass_u);
        let scenario = IrradiationScenario {
            segments: reactor.segments.clone(),
            initial_atoms: [(target.nuclide, atoms)].into_iter().collect(),
            grid_points: self.output.grid_points,
        };
        Ok((chain, scenario))
    }

    /// Campaign configuration for `campaign` (drift section optional).
    pub fn campaign(&self) -> Result<CampaignConfig, ScenarioError> {
        self.require(&[
            ("clock", self.clock.is_some()),
            ("ramsey", self.ramsey.is_some()),
        ])?;
        let clock = self.clock.as_ref().unwrap();
        let ramsey = self.ramsey.as_ref().unwrap();
        let drift = self.drift.clone().unwrap_or_default();
        Ok(CampaignConfig {
            spec: clock.clone(),
            ramsey: ramsey.config(),
            grid_points: ramsey.grid_points,
            grid_span: ramsey.grid_span,
            ions_per_ensemble: ramsey.ions,
            injected_fractional_shift: ramsey.offset,
            drift: drift.model,
            new_age_s: drift.new_age_s,
            natural_age_s: drift.natural_age_s,
            alpha: ramsey.alpha,
        })
    }

    /// Clock spec plus interrogation parameters for `ramsey`.
    pub fn fringe_inputs(
        &self,
    ) -> Result<(&HyperfineClockSpec, &RamseySection), ScenarioError> {
        self.require(&[
            ("clock", self.clock.is_some()),
            ("ramsey", self.ramsey.is_some()),
        ])?;
        Ok((self.clock.as_ref().unwrap(), self.ramsey.as_ref().unwrap()))
    }

    pub fn ladder_inputs(&self) -> Result<&LadderSection, ScenarioError> {
        self.require(&[("ladder", self.ladder.is_some())])?;
        Ok(self.ladder.as_ref().unwrap())
    }

    pub fn separation_inputs(&self) -> Result<&SeparationSection, ScenarioError> {
        self.require(&[("separation", self.separation.is_some())])?;
        Ok(self.separation.as_ref().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nuclide::SECONDS_PER_YEAR;

    const GOOD: &str = "\
# production run
[target]
nuclide = Sr-86
mass_g = 20.0
enrichment = 0.999
sigma_b = 1.14

[reactor]
segments = 30d@1.0e13

[output]
grid_points = 301
product = Sr-87

[clock]
nuclide = Sr-87
nu0_hz = 5.0e9
f_lower = 4
f_upper = 5
pump_nm = 422
detect_nm = 408

[ramsey]
free = 1s
shots = 230276
grid_points = 11
offset = 1e-13
ions = 5

[drift]
kind = relaxation
amplitude = 1e-10
tau = 1e9y
natural_age = 4.6e9y

[separation]
stages = 1e4@0.98,1e4@0.98
composition = Sr-87:0.93,Sr-86:0.07
product = Sr-87
excite_nm = 461
ionize_nm = 405
";

    #[test]
    fn full_document_parses() {
        let doc = parse_scenario(GOOD).unwrap();
        let target = doc.target.as_ref().unwrap();
        assert_eq!(target.nuclide, NuclideId::parse("Sr-86").unwrap());
        assert_eq!(target.mass_g, 20.0);
        assert_eq!(target.sigma_b, Some(1.14));
        assert_eq!(target.depth, 2);
        let reactor = doc.reactor.as_ref().unwrap();
        assert_eq!(reactor.segments.len(), 1);
        assert_eq!(reactor.segments[0].flux, 1.0e13);
        assert_eq!(reactor.segments[0].duration_s, 30.0 * 86_400.0);
        assert_eq!(doc.output.grid_points, 301);
        let ramsey = doc.ramsey.as_ref().unwrap();
        assert_eq!(ramsey.shots, 230_276);
        assert_eq!(ramsey.pulse_divider, 1000.0);
        assert_eq!(ramsey.alpha, 0.05);
        let drift = doc.drift.as_ref().unwrap();
        assert!(matches!(
            drift.model,
            DriftModel::Relaxation { amplitude, .. } if amplitude == 1e-10
        ));
        assert!((drift.natural_age_s - 4.6e9 * SECONDS_PER_YEAR).abs() < 1.0);
        let campaign = doc.campaign().unwrap();
        assert_eq!(campaign.ions_per_ensemble, 5);
        assert_eq!(campaign.injected_fractional_shift, 1e-13);
        let registry = crate::nuclide::NuclideRegistry::builtin();
        let (chain, scenario) = doc.chain_inputs(registry).unwrap();
        assert_eq!(chain.seed, NuclideId::parse("Sr-86").unwrap());
        // Sigma override landed on the seed node.
        let seed_node = &chain.nodes()[chain.position(chain.seed).unwrap()];
        assert_eq!(seed_node.sigma_b, 1.14);
        assert_eq!(scenario.grid_points, 301);
        let sep = doc.separation_inputs().unwrap();
        assert_eq!(sep.plan.stages.len(), 2);
    }

    #[test]
    fn empty_file_reports_missing_sections_per_command() {
        let doc = parse_scenario("").unwrap();
        match doc.chain_inputs(crate::nuclide::NuclideRegistry::builtin()) {
            Err(ScenarioError::MissingSections(names)) => {
                assert_eq!(names, vec!["target", "reactor"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            doc.campaign(),
            Err(ScenarioError::MissingSections(ref names)) if *names == ["clock", "ramsey"]
        ));
        assert!(matches!(
            doc.ladder_inputs(),
            Err(ScenarioError::MissingSections(ref names)) if *names == ["ladder"]
        ));
    }

    #[test]
    fn all_errors_are_collected() {
        let text = "\
stray = 1
[nope]
x = 2
[target]
nuclide = Sr-86
nuclide = Sr-87
mass_g = -4
typo_key = 9
[reactor]
flux = -1
duration = 5d
";
        match parse_scenario(text) {
            Err(ScenarioError::Parse(issues)) => {
                let text: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
                assert_eq!(issues.len(), 6, "{text:?}");
                assert!(text[0].contains("outside any [section]"));
                assert!(text[1].contains("unknown section [nope]"));
                assert!(text[2].contains("duplicate key 'nuclide'"));
                assert!(text.iter().any(|t| t.contains("'-4' must be positive")));
                assert!(text.iter().any(|t| t.contains("unknown key 'typo_key'")));
                assert!(text.iter().any(|t| t.contains("'-1' must be non-negative")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reactor_paths_are_exclusive() {
        let both = "[reactor]\nsegments = 1d@1e13\nflux = 1e13\nduration = 1d\n";
        assert!(matches!(parse_scenario(both), Err(ScenarioError::Parse(_))));
        let neither = "[reactor]\nflux = 1e13\n";
        assert!(matches!(
            parse_scenario(neither),
            Err(ScenarioError::Parse(_))
        ));
        let simple = parse_scenario("[reactor]\nflux = 1e13\nduration = 12h\n").unwrap();
        let segments = &simple.reactor.unwrap().segments;
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].duration_s, 12.0 * 3600.0);
    }

    #[test]
    fn multi_segment_grammar() {
        let doc = parse_scenario("[reactor]\nsegments = 5d@1.0e13, 12h@0, 1y@5e12\n").unwrap();
        let segments = doc.reactor.unwrap().segments;
        assert_eq!(segments.len(), 3);
        assert_eq!(segments[1].flux, 0.0);
        assert_eq!(segments[2].duration_s, SECONDS_PER_YEAR);
        let bad = parse_scenario("[reactor]\nsegments = 5d:1e13\n");
        assert!(matches!(bad, Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn partial_detection_is_rejected() {
        let text =
            "[clock]\nnuclide=Sr-87\nnu0_hz=5e9\nf_lower=4\nf_upper=5\n[ramsey]\nfree=1s\nshots=10\ndetection_bright=5.9\n";
        match parse_scenario(text) {
            Err(ScenarioError::Parse(issues)) => {
                assert!(issues[0].message.contains("detection needs all"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn drift_kind_field_mismatch() {
        let text = "[drift]\nkind = predecay\namplitude = 1e-10\n";
        match parse_scenario(text) {
            Err(ScenarioError::Parse(issues)) => {
                assert!(issues[0].message.contains("kind=predecay needs"));
            }
            other => panic!("{other:?}"),
        }
        let none_extra = parse_scenario("[drift]\nkind = none\ntau = 1y\n");
        assert!(matches!(none_extra, Err(ScenarioError::Parse(_))));
        let ok = parse_scenario("[drift]\nkind = predecay\nkappa = 1e-5s\ndecay_time = 1e7s\n")
            .unwrap();
        assert!(matches!(
            ok.drift.unwrap().model,
            DriftModel::Predecay { .. }
        ));
    }

    #[test]
    fn ladder_section_round_trip() {
        let text = "\
[ladder]
lifetime_e1 = 100s
lifetime_e2 = 10s
interval = 0.1s
perturbation = 1e-5
beta_per_s = 1e-6
probe_sigma = 1e-7
horizon = 10s
runs = 50
";
        let doc = parse_scenario(text).unwrap();
        let ladder = doc.ladder_inputs().unwrap();
        assert_eq!(ladder.runs, 50);
        assert_eq!(ladder.bootstrap, 1000);
        assert_eq!(ladder.config.detection.threshold, 2);
        assert!((ladder.config.detection.bright_mean() - 5.9).abs() < 1e-12);
        // Zeno violations surface at parse time through validate().
        let tight = text.replace("interval = 0.1s", "interval = 0.01s");
        match parse_scenario(&tight) {
            Ok(d) => {
                // validate() passes (interval positive); budget enforcement
                // happens in make_schedule at run time.
                assert!(d.ladder.is_some());
            }
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\n\n[output]\ngrid_points = 5 # inline\n";
        let doc = parse_scenario(text).unwrap();
        assert_eq!(doc.output.grid_points, 5);
    }
}
