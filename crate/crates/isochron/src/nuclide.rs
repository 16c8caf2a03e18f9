//! Nuclide registry: identities, decay data, thermal capture cross
//! sections, and the plain-text data format they load from.
//!
//! The bundled registry covers the strontium, ytterbium/lutetium, thulium,
//! and mercury chains used by the simulation scenarios. Users can supply
//! their own file in the same format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

/// Seconds per Julian year (365.25 d), the `y` unit in data files.
pub const SECONDS_PER_YEAR: f64 = 31_557_600.0;

const ELEMENTS: [&str; 103] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr",
];

/// Nuclide identity: proton count, neutron count, and whether this entry is
/// a metastable isomer of the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NuclideId {
    pub z: u32,
    pub n: u32,
    pub isomer: bool,
}

impl NuclideId {
    pub fn mass_number(&self) -> u32 {
        self.z + self.n
    }

    /// Parse `"Sr-87"` or `"Sr-87m"`. Fails on unknown element symbols,
    /// missing dashes, or a mass number at or below the proton count.
    pub fn parse(name: &str) -> Result<Self, LookupError> {
        let bad = || LookupError::BadName(name.to_string());
        let (sym, rest) = name.split_once('-').ok_or_else(bad)?;
        let z = ELEMENTS
            .iter()
            .position(|e| *e == sym)
            .map(|i| i as u32 + 1)
            .ok_or_else(bad)?;
        let (digits, isomer) = match rest.strip_suffix('m') {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let a: u32 = digits.parse().map_err(|_| bad())?;
        if a <= z {
            return Err(bad());
        }
        Ok(NuclideId { z, n: a - z, isomer })
    }
}

impl fmt::Display for NuclideId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = ELEMENTS
            .get(self.z as usize - 1)
            .copied()
            .unwrap_or("??");
        write!(f, "{}-{}{}", sym, self.mass_number(), if self.isomer { "m" } else { "" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMode {
    BetaMinus,
    ElectronCapture,
    IsomericTransition,
    Alpha,
}

impl DecayMode {
    fn token(self) -> &'static str {
        match self {
            DecayMode::BetaMinus => "beta-",
            DecayMode::ElectronCapture => "ec",
            DecayMode::IsomericTransition => "it",
            DecayMode::Alpha => "alpha",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            "beta-" => Some(DecayMode::BetaMinus),
            "ec" => Some(DecayMode::ElectronCapture),
            "it" => Some(DecayMode::IsomericTransition),
            "alpha" => Some(DecayMode::Alpha),
            _ => None,
        }
    }

    /// (delta_z, delta_n) from parent to daughter.
    fn daughter_shift(self) -> (i64, i64) {
        match self {
            DecayMode::BetaMinus => (1, -1),
            DecayMode::ElectronCapture => (-1, 1),
            DecayMode::IsomericTransition => (0, 0),
            DecayMode::Alpha => (-2, -2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayBranch {
    pub mode: DecayMode,
    pub daughter: NuclideId,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nuclide {
    pub id: NuclideId,
    /// `None` means stable.
    pub half_life_s: Option<f64>,
    /// Nuclear spin in units of hbar (non-negative multiple of 1/2).
    pub spin: f64,
    /// Magnetic dipole moment in nuclear magnetons.
    pub moment: f64,
    /// Atomic mass in u. Defaults to the mass number when not curated.
    pub mass_u: f64,
    pub decay: Vec<DecayBranch>,
    /// Data provenance note, free text.
    pub source: String,
}

impl Nuclide {
    pub fn is_stable(&self) -> bool {
        self.half_life_s.is_none()
    }

    /// Decay constant ln(2)/t_half, or 0 for stable nuclides.
    pub fn lambda(&self) -> f64 {
        match self.half_life_s {
            Some(t) => std::f64::consts::LN_2 / t,
            None => 0.0,
        }
    }
}

/// Thermal neutron capture `target + n -> product`, cross section in barns.
#[derive(Debug, Clone, PartialEq)]
pub struct Capture {
    pub target: NuclideId,
    pub product: NuclideId,
    pub sigma_b: f64,
    pub source: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum LookupError {
    #[error("nuclide {0} not in registry")]
    NotFound(String),
    #[error("malformed nuclide name {0:?}")]
    BadName(String),
}

/// One malformed line in a data file.
#[derive(Debug, Clone, PartialEq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{} error(s) in nuclide data:\n{}", .0.len(),
            .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<LineError>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NuclideRegistry {
    nuclides: BTreeMap<NuclideId, Nuclide>,
    captures: BTreeMap<NuclideId, Capture>,
}

impl NuclideRegistry {
    /// Registry bundled with the crate.
    pub fn builtin() -> &'static NuclideRegistry {
        static BUILTIN: OnceLock<NuclideRegistry> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            NuclideRegistry::parse(include_str!("../data/nuclides.dat"))
                .expect("bundled nuclide data must parse")
        })
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let text = std::fs::read_to_string(path).map_err(|e| RegistryError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text).map_err(RegistryError::Parse)
    }

    /// Parse the data format. Collects every malformed line instead of
    /// stopping at the first.
    pub fn parse(text: &str) -> Result<Self, Vec<LineError>> {
        let mut reg = NuclideRegistry::default();
        let mut errors = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Err(msg) = reg.parse_line(line) {
                errors.push(LineError {
                    line: line_no,
                    message: msg,
                });
            }
        }
        if errors.is_empty() {
            Ok(reg)
        } else {
            Err(errors)
        }
    }

    fn parse_line(&mut self, line: &str) -> Result<(), String> {
        let tokens = tokenize(line)?;
        match tokens[0].as_str() {
            "NUCLIDE" => self.parse_nuclide(&tokens[1..]),
            "CAPTURE" => self.parse_capture(&tokens[1..]),
            other => Err(format!("unknown record type {other:?}")),
        }
    }

    fn parse_nuclide(&mut self, tokens: &[String]) -> Result<(), String> {
        let name = tokens.first().ok_or("NUCLIDE needs a name")?;
        let id = NuclideId::parse(name).map_err(|e| e.to_string())?;
        let mut z = None;
        let mut n = None;
        let mut half_life = None;
        let mut spin = None;
        let mut moment = None;
        let mut mass = None;
        let mut decay = Vec::new();
        let mut source = String::new();
        for tok in &tokens[1..] {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {tok:?}"))?;
            match key {
                "z" => z = Some(parse_num::<u32>("z", value)?),
                "n" => n = Some(parse_num::<u32>("n", value)?),
                "halflife" => {
                    half_life = Some(if value == "stable" {
                        None
                    } else {
                        Some(parse_duration_s(value)?)
                    })
                }
                "spin" => spin = Some(parse_spin(value)?),
                "moment" => moment = Some(parse_num::<f64>("moment", value)?),
                "mass" => mass = Some(parse_num::<f64>("mass", value)?),
                "decay" => decay = parse_decay_list(value)?,
                "src" => source = value.to_string(),
                other => return Err(format!("unknown key {other:?}")),
            }
        }
        let z = z.ok_or("missing z=")?;
        let n = n.ok_or("missing n=")?;
        if z != id.z || n != id.n {
            return Err(format!(
                "identity mismatch: {name} implies z={} n={}, line says z={z} n={n}",
                id.z, id.n
            ));
        }
        let half_life_s = half_life.ok_or("missing halflife=")?;
        if let Some(t) = half_life_s {
            if !(t > 0.0) || !t.is_finite() {
                return Err(format!("half-life must be positive and finite, got {t}"));
            }
        }
        let nuclide = Nuclide {
            id,
            half_life_s,
            spin: spin.ok_or("missing spin=")?,
            moment: moment.ok_or("missing moment=")?,
            mass_u: mass.unwrap_or(f64::from(id.mass_number())),
            decay,
            source,
        };
        if self.nuclides.insert(id, nuclide).is_some() {
            return Err(format!("duplicate NUCLIDE entry for {id}"));
        }
        Ok(())
    }

    fn parse_capture(&mut self, tokens: &[String]) -> Result<(), String> {
        // CAPTURE <target> -> <product> sigma=<x>b [src="..."]
        if tokens.len() < 4 || tokens[1] != "->" {
            return Err("expected CAPTURE <target> -> <product> sigma=<x>b".into());
        }
        let target = NuclideId::parse(&tokens[0]).map_err(|e| e.to_string())?;
        let product = NuclideId::parse(&tokens[2]).map_err(|e| e.to_string())?;
        let mut sigma = None;
        let mut source = String::new();
        for tok in &tokens[3..] {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {tok:?}"))?;
            match key {
                "sigma" => {
                    let bare = value
                        .strip_suffix('b')
                        .ok_or_else(|| format!("sigma needs a barn suffix, got {value:?}"))?;
                    let s = parse_num::<f64>("sigma", bare)?;
                    if s < 0.0 {
                        return Err(format!("cross section must be non-negative, got {s}"));
                    }
                    sigma = Some(s);
                }
                "src" => source = value.to_string(),
                other => return Err(format!("unknown key {other:?}")),
            }
        }
        let capture = Capture {
            target,
            product,
            sigma_b: sigma.ok_or("missing sigma=")?,
            source,
        };
        if self.captures.insert(target, capture).is_some() {
            return Err(format!("duplicate CAPTURE entry for target {target}"));
        }
        Ok(())
    }

    pub fn get(&self, id: NuclideId) -> Result<&Nuclide, LookupError> {
        self.nuclides
            .get(&id)
            .ok_or_else(|| LookupError::NotFound(id.to_string()))
    }

    pub fn by_name(&self, name: &str) -> Result<&Nuclide, LookupError> {
        let id = NuclideId::parse(name)?;
        self.get(id)
    }

    /// Capture reaction on `target`, if the registry has one.
    pub fn capture_on(&self, target: NuclideId) -> Option<&Capture> {
        self.captures.get(&target)
    }

    pub fn nuclides(&self) -> impl Iterator<Item = &Nuclide> {
        self.nuclides.values()
    }

    pub fn captures(&self) -> impl Iterator<Item = &Capture> {
        self.captures.values()
    }

    /// Cross-entry consistency checks. Returns human-readable findings;
    /// empty means the registry is internally consistent.
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        for nuc in self.nuclides.values() {
            let id = nuc.id;
            if nuc.is_stable() != nuc.decay.is_empty() {
                findings.push(format!(
                    "{id}: stability flag and decay branch list disagree"
                ));
            }
            if !nuc.decay.is_empty() {
                let total: f64 = nuc.decay.iter().map(|b| b.fraction).sum();
                if (total - 1.0).abs() > 1e-9 {
                    findings.push(format!("{id}: branching fractions sum to {total}, not 1"));
                }
            }
            for branch in &nuc.decay {
                if !(branch.fraction > 0.0 && branch.fraction <= 1.0) {
                    findings.push(format!(
                        "{id}: branch fraction {} outside (0, 1]",
                        branch.fraction
                    ));
                }
                if self.nuclides.get(&branch.daughter).is_none() {
                    findings.push(format!(
                        "{id}: decay daughter {} not in registry",
                        branch.daughter
                    ));
                }
                let (dz, dn) = branch.mode.daughter_shift();
                let ok_z = i64::from(branch.daughter.z) == i64::from(id.z) + dz;
                let ok_n = i64::from(branch.daughter.n) == i64::from(id.n) + dn;
                if !ok_z || !ok_n {
                    findings.push(format!(
                        "{id}: {} daughter should differ by (dz,dn)=({dz},{dn}), got {}",
                        branch.mode.token(),
                        branch.daughter
                    ));
                }
            }
            if id.z % 2 == 0 && id.n % 2 == 0 && !id.isomer {
                if nuc.spin != 0.0 || nuc.moment != 0.0 {
                    findings.push(format!(
                        "{id}: even-even ground state must have spin 0 and moment 0"
                    ));
                }
            }
            if nuc.spin < 0.0 || (nuc.spin * 2.0).fract() != 0.0 {
                findings.push(format!(
                    "{id}: spin {} is not a non-negative multiple of 1/2",
                    nuc.spin
                ));
            }
            if !(nuc.mass_u > 0.0) {
                findings.push(format!("{id}: non-positive mass"));
            }
        }
        for cap in self.captures.values() {
            if self.nuclides.get(&cap.target).is_none() {
                findings.push(format!("capture target {} not in registry", cap.target));
            }
            if self.nuclides.get(&cap.product).is_none() {
                findings.push(format!("capture product {} not in registry", cap.product));
            }
            if cap.product.z != cap.target.z || cap.product.n != cap.target.n + 1 {
                findings.push(format!(
                    "capture {} -> {} does not add exactly one neutron",
                    cap.target, cap.product
                ));
            }
        }
        findings
    }

    /// Canonical text form; `parse(serialize(r))` reproduces `r` exactly
    /// because floats print with shortest round-trip formatting.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for nuc in self.nuclides.values() {
            out.push_str(&format!("NUCLIDE {} z={} n={}", nuc.id, nuc.id.z, nuc.id.n));
            match nuc.half_life_s {
                Some(t) => out.push_str(&format!(" halflife={t}s")),
                None => out.push_str(" halflife=stable"),
            }
            out.push_str(&format!(" spin={}", format_spin(nuc.spin)));
            out.push_str(&format!(" moment={}", nuc.moment));
            out.push_str(&format!(" mass={}", nuc.mass_u));
            if !nuc.decay.is_empty() {
                let branches: Vec<String> = nuc
                    .decay
                    .iter()
                    .map(|b| format!("{}:{}:{}", b.mode.token(), b.daughter, b.fraction))
                    .collect();
                out.push_str(&format!(" decay={}", branches.join(",")));
            }
            if !nuc.source.is_empty() {
                out.push_str(&format!(" src=\"{}\"", nuc.source));
            }
            out.push('\n');
        }
        for cap in self.captures.values() {
            out.push_str(&format!(
                "CAPTURE {} -> {} sigma={}b",
                cap.target, cap.product, cap.sigma_b
            ));
            if !cap.source.is_empty() {
                out.push_str(&format!(" src=\"{}\"", cap.source));
            }
            out.push('\n');
        }
        out
    }
}

/// Split a line into whitespace-separated tokens, keeping quoted values
/// (e.g. `src="Atlas-6 thermal"`) intact and stripping their quotes.
fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for c in line.chars() {
        match c {
            '"' => in_quotes = !in_quotes,
            c if c.is_whitespace() && !in_quotes => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if in_quotes {
        return Err("unterminated quote".into());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if tokens.is_empty() {
        return Err("empty record".into());
    }
    Ok(tokens)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad {key} value {value:?}"))
}

/// `"9/2"`, `"1/2"`, `"0"`, `"7"` -> spin in units of hbar.
fn parse_spin(value: &str) -> Result<f64, String> {
    let bad = || format!("bad spin value {value:?}");
    let spin = match value.split_once('/') {
        Some((num, den)) => {
            if den != "2" {
                return Err(bad());
            }
            let num: u32 = num.parse().map_err(|_| bad())?;
            f64::from(num) / 2.0
        }
        None => f64::from(value.parse::<u32>().map_err(|_| bad())?),
    };
    Ok(spin)
}

fn format_spin(spin: f64) -> String {
    if spin.fract() == 0.0 {
        format!("{}", spin as u64)
    } else {
        format!("{}/2", (spin * 2.0) as u64)
    }
}

fn parse_decay_list(value: &str) -> Result<Vec<DecayBranch>, String> {
    let mut branches = Vec::new();
    for part in value.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(format!("decay branch {part:?} is not mode:daughter:fraction"));
        }
        let mode = DecayMode::from_token(fields[0])
            .ok_or_else(|| format!("unknown decay mode {:?}", fields[0]))?;
        let daughter = NuclideId::parse(fields[1]).map_err(|e| e.to_string())?;
        let fraction = parse_num::<f64>("fraction", fields[2])?;
        branches.push(DecayBranch {
            mode,
            daughter,
            fraction,
        });
    }
    Ok(branches)
}

/// `"2.8h"` -> 10080 s. Units: s, m (minutes), h, d, y (Julian year).
pub fn parse_duration_s(value: &str) -> Result<f64, String> {
    let (number, scale) = match value.char_indices().last() {
        Some((pos, 's')) => (&value[..pos], 1.0),
        Some((pos, 'm')) => (&value[..pos], 60.0),
        Some((pos, 'h')) => (&value[..pos], 3600.0),
        Some((pos, 'd')) => (&value[..pos], 86_400.0),
        Some((pos, 'y')) => (&value[..pos], SECONDS_PER_YEAR),
        _ => return Err(format!("duration {value:?} needs a unit (s, m, h, d, y)")),
    };
    let x: f64 = number
        .parse()
        .map_err(|_| format!("bad duration value {value:?}"))?;
    if !x.is_finite() || x < 0.0 {
        return Err(format!("duration must be non-negative and finite, got {value:?}"));
    }
    Ok(x * scale)
}
