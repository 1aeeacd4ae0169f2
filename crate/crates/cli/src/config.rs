//! Flat `key = value` experiment configuration with `#` comments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use specprod_core::experiments::Family;

/// A configuration problem, located by field and line when known.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}", render(.field, *.line, .message))]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

fn render(field: &str, line: Option<usize>, message: &str) -> String {
    match line {
        Some(n) => format!("config error in `{field}` at line {n}: {message}"),
        None => format!("config error in `{field}`: {message}"),
    }
}

impl ConfigError {
    pub fn new(field: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Self { field: field.to_owned(), line, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    BilinearSharpnessS2,
    FrequencyDisappearance,
    ZonalSharpness,
    TrilinearS2,
    CriticalExponent,
    WindowedProjector,
    BestConstant,
    RatioGrid,
}

impl Study {
    pub const ALL: [Study; 8] = [
        Study::BilinearSharpnessS2,
        Study::FrequencyDisappearance,
        Study::ZonalSharpness,
        Study::TrilinearS2,
        Study::CriticalExponent,
        Study::WindowedProjector,
        Study::BestConstant,
        Study::RatioGrid,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Study::BilinearSharpnessS2 => "bilinear-sharpness-s2",
            Study::FrequencyDisappearance => "frequency-disappearance",
            Study::ZonalSharpness => "zonal-sharpness",
            Study::TrilinearS2 => "trilinear-s2",
            Study::CriticalExponent => "critical-exponent",
            Study::WindowedProjector => "windowed-projector",
            Study::BestConstant => "best-constant",
            Study::RatioGrid => "ratio-grid",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Study::BilinearSharpnessS2 => "highest-weight pairs (n, s·n) on S^2; growth in n",
            Study::FrequencyDisappearance => "highest-weight pairs (n, m) with n fixed and m large",
            Study::ZonalSharpness => "co-axial zonal pairs (p, p) on S^d, d ≥ 3",
            Study::TrilinearS2 => "highest-weight triples (n, m, s·(n+m)) on S^2",
            Study::CriticalExponent => "highest-weight pairs (n, m) in L^r for several r",
            Study::WindowedProjector => "random windowed functions around several centers",
            Study::BestConstant => "extremal bilinear constant against sampled pairs",
            Study::RatioGrid => "any pair or triple of families on any degree grid",
        }
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Study {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Study::ALL.into_iter().find(|st| st.tag() == s).ok_or_else(|| {
            let known: Vec<&str> = Study::ALL.iter().map(|s| s.tag()).collect();
            ConfigError::new("study", None, format!("unknown study {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

/// Degree grid: an explicit list, `dyadic(from, to)` or `range(from, to, step)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeSpec {
    List(Vec<u32>),
    Dyadic { from: u32, to: u32 },
    Range { from: u32, to: u32, step: u32 },
}

impl DegreeSpec {
    pub fn expand(&self) -> Vec<u32> {
        match *self {
            DegreeSpec::List(ref v) => v.clone(),
            DegreeSpec::Dyadic { from, to } => {
                std::iter::successors(Some(from), |&p| p.checked_mul(2)).take_while(|&p| p <= to).collect()
            }
            DegreeSpec::Range { from, to, step } => (from..=to).step_by(step.max(1) as usize).collect(),
        }
    }
}

impl fmt::Display for DegreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeSpec::List(v) => {
                let items: Vec<String> = v.iter().map(u32::to_string).collect();
                f.write_str(&items.join(", "))
            }
            DegreeSpec::Dyadic { from, to } => write!(f, "dyadic({from}, {to})"),
            DegreeSpec::Range { from, to, step } => write!(f, "range({from}, {to}, {step})"),
        }
    }
}

impl FromStr for DegreeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let call = |name: &str| -> Option<Result<Vec<u32>, String>> {
            let inner = s.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')?;
            Some(parse_list(inner))
        };
        if let Some(args) = call("dyadic") {
            return match *args?.as_slice() {
                [from, to] if from >= 1 => Ok(DegreeSpec::Dyadic { from, to }),
                [0, _] => Err("dyadic grid must start at a degree ≥ 1".into()),
                _ => Err("expected dyadic(from, to)".into()),
            };
        }
        if let Some(args) = call("range") {
            return match *args?.as_slice() {
                [from, to, step] if step >= 1 => Ok(DegreeSpec::Range { from, to, step }),
                [_, _, 0] => Err("range step must be ≥ 1".into()),
                _ => Err("expected range(from, to, step)".into()),
            };
        }
        parse_list(s).map(DegreeSpec::List)
    }
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| item.trim().parse::<T>().map_err(|_| format!("cannot parse {:?}", item.trim())))
        .collect()
}

/// How degrees from the grid become tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// `(p, p)` or `(p, p, p)`.
    Diagonal,
    /// `(fixed, p)` or `(p, fixed, fixed)`.
    Fixed,
    /// `(p, s·p)` or `(p, fixed, s·(p + fixed))`.
    Scaled,
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diagonal" => Ok(Pairing::Diagonal),
            "fixed" => Ok(Pairing::Fixed),
            "scaled" => Ok(Pairing::Scaled),
            _ => Err(format!("unknown pairing {s:?}; expected diagonal, fixed or scaled")),
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::Diagonal => "diagonal",
            Pairing::Fixed => "fixed",
            Pairing::Scaled => "scaled",
        })
    }
}

/// A Lebesgue exponent; `inf` is written as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "infinity" => Ok(Exponent(f64::INFINITY)),
            _ => s.parse::<f64>().map(Exponent).map_err(|_| format!("cannot parse exponent {s:?}")),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(Exponent(x)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Every setting of one run. Fields a study does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub study: Study,
    pub dimension: usize,
    pub family_f: Family,
    pub family_g: Family,
    pub family_h: Option<Family>,
    pub degrees: DegreeSpec,
    pub pairing: Pairing,
    pub fixed_degree: u32,
    pub scale_factor: u32,
    pub lebesgue: Vec<Exponent>,
    pub centers: Vec<f64>,
    pub draws: u32,
    pub starts: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub margin: u32,
    pub node_budget: usize,
    pub out_dir: String,
    pub format: OutputFormat,
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format {s:?}; expected csv or json")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

const KEYS: [&str; 21] = [
    "study",
    "dimension",
    "family_f",
    "family_g",
    "family_h",
    "degrees",
    "pairing",
    "fixed_degree",
    "scale_factor",
    "lebesgue",
    "centers",
    "draws",
    "starts",
    "tol",
    "max_iters",
    "seed",
    "margin",
    "node_budget",
    "out_dir",
    "format",
    "plot",
];

/// Largest quadrature margin accepted.
pub const MAX_MARGIN: u32 = 64;

impl ExperimentConfig {
    /// Settings that reproduce the study's reference run.
    pub fn defaults(study: Study) -> Self {
        let hw = Family::HighestWeight;
        let mut c = Self {
            study,
            dimension: 2,
            family_f: hw,
            family_g: hw,
            family_h: None,
            degrees: DegreeSpec::Dyadic { from: 8, to: 512 },
            pairing: Pairing::Scaled,
            fixed_degree: 16,
            scale_factor: 8,
            lebesgue: vec![Exponent(2.0)],
            centers: vec![32.0, 64.0, 128.0],
            draws: 64,
            starts: 8,
            tol: 1e-10,
            max_iters: 500,
            seed: 0,
            margin: specprod_core::quadrature::DEFAULT_MARGIN,
            node_budget: specprod_core::quadrature::DEFAULT_NODE_BUDGET,
            out_dir: "results".into(),
            format: OutputFormat::Csv,
            plot: false,
        };
        match study {
            Study::BilinearSharpnessS2 => {}
            Study::FrequencyDisappearance => {
                c.degrees = DegreeSpec::List(vec![256, 512, 1024]);
                c.pairing = Pairing::Fixed;
            }
            Study::ZonalSharpness => {
                c.dimension = 4;
                c.family_f = Family::Zonal;
                c.family_g = Family::Zonal;
                c.degrees = DegreeSpec::Dyadic { from: 8, to: 256 };
                c.pairing = Pairing::Diagonal;
            }
            Study::TrilinearS2 => {
                c.family_h = Some(hw);
                c.degrees = DegreeSpec::Dyadic { from: 8, to: 256 };
            }
            Study::CriticalExponent => {
                c.degrees = DegreeSpec::Dyadic { from: 32, to: 256 };
                c.pairing = Pairing::Fixed;
                c.fixed_degree = 2;
                c.lebesgue = vec![Exponent(2.0), Exponent(4.0)];
            }
            Study::WindowedProjector => {
                c.family_f = Family::Band;
                c.family_g = Family::Band;
                c.degrees = DegreeSpec::List(vec![]);
            }
            Study::BestConstant => {
                c.degrees = DegreeSpec::List(vec![4, 8, 16, 32]);
                c.pairing = Pairing::Diagonal;
            }
            Study::RatioGrid => {
                c.family_f = Family::Zonal;
                c.family_g = Family::Zonal;
                c.degrees = DegreeSpec::Dyadic { from: 8, to: 64 };
                c.pairing = Pairing::Diagonal;
                c.draws = 1;
            }
        }
        c
    }

    /// Parses configuration text. The study comes from the `study` key or
    /// from `study`; when both are present they must agree. Keys not present
    /// keep the study's defaults.
    pub fn parse(text: &str, study: Option<Study>) -> Result<Self, ConfigError> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::new(content, Some(line), "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::new(key, Some(line), format!("unknown key; allowed keys: {}", KEYS.join(", "))));
            }
            if let Some(&(first, _, _)) = entries.iter().find(|e| e.1 == key) {
                return Err(ConfigError::new(key, Some(line), format!("duplicate key, first set at line {first}")));
            }
            entries.push((line, key, value));
        }

        let from_file = match entries.iter().find(|e| e.1 == "study") {
            Some(&(line, _, value)) => {
                Some(value.parse::<Study>().map_err(|e| ConfigError { line: Some(line), ..e })?)
            }
            None => None,
        };
        let study = match (study, from_file) {
            (Some(a), Some(b)) if a != b => {
                let line = entries.iter().find(|e| e.1 == "study").map(|e| e.0);
                return Err(ConfigError::new("study", line, format!("file says {b}, command line says {a}")));
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(ConfigError::new("study", None, "no study given")),
        };

        let mut c = Self::defaults(study);
        for &(line, key, value) in &entries {
            let err = |m: String| ConfigError::new(key, Some(line), m);
            fn one<T: FromStr>(v: &str) -> Result<T, String> {
                v.parse::<T>().map_err(|_| format!("cannot parse {v:?}"))
            }
            match key {
                "study" => {}
                "dimension" => c.dimension = one(value).map_err(err)?,
                "family_f" => c.family_f = value.parse().map_err(|e: specprod_core::Error| err(e.to_string()))?,
                "family_g" => c.family_g = value.parse().map_err(|e: specprod_core::Error| err(e.to_string()))?,
                "family_h" => {
                    c.family_h = match value {
                        "" | "none" => None,
                        v => Some(v.parse().map_err(|e: specprod_core::Error| err(e.to_string()))?),
                    }
                }
                "degrees" => {
                    c.degrees = value.parse().map_err(|m: String| err(format!("invalid degree grid spec: {m}")))?
                }
                "pairing" => c.pairing = value.parse().map_err(err)?,
                "fixed_degree" => c.fixed_degree = one(value).map_err(err)?,
                "scale_factor" => c.scale_factor = one(value).map_err(err)?,
                "lebesgue" => c.lebesgue = parse_list(value).map_err(err)?,
                "centers" => c.centers = parse_list(value).map_err(err)?,
                "draws" => c.draws = one(value).map_err(err)?,
                "starts" => c.starts = one(value).map_err(err)?,
                "tol" => c.tol = one(value).map_err(err)?,
                "max_iters" => c.max_iters = one(value).map_err(err)?,
                "seed" => c.seed = one(value).map_err(err)?,
                "margin" => c.margin = one(value).map_err(err)?,
                "node_budget" => c.node_budget = one(value).map_err(err)?,
                "out_dir" => c.out_dir = value.to_owned(),
                "format" => c.format = value.parse().map_err(err)?,
                "plot" => c.plot = one(value).map_err(err)?,
                _ => unreachable!("keys are checked above"),
            }
        }
        c.validate().map_err(|mut e| {
            if e.line.is_none() {
                e.line = entries.iter().find(|x| x.1 == e.field).map(|x| x.0);
            }
            e
        })?;
        Ok(c)
    }

    /// Checks every field against the study's requirements.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |field: &str, m: String| Err(ConfigError::new(field, None, m));
        let study = self.study;
        if !(2..=5).contains(&self.dimension) {
            return fail("dimension", format!("dimension {} outside 2..=5", self.dimension));
        }
        let s2_only = matches!(
            study,
            Study::BilinearSharpnessS2
                | Study::FrequencyDisappearance
                | Study::TrilinearS2
                | Study::CriticalExponent
                | Study::WindowedProjector
                | Study::BestConstant
        );
        if s2_only && self.dimension != 2 {
            return fail("dimension", format!("study {study} runs on S^2 only, got dimension {}", self.dimension));
        }
        if study == Study::ZonalSharpness && self.dimension < 3 {
            return fail("dimension", "zonal-sharpness needs dimension ≥ 3".into());
        }
        let degrees = self.degrees.expand();
        if study != Study::WindowedProjector {
            if degrees.is_empty() {
                return fail("degrees", "degree grid spec is empty".into());
            }
            if let DegreeSpec::Range { from, to, .. } | DegreeSpec::Dyadic { from, to } = self.degrees {
                if from > to {
                    return fail("degrees", format!("degree grid spec runs backwards: {from} > {to}"));
                }
            }
        }
        if study == Study::BestConstant {
            let limit = specprod_core::coupling::MAX_EXTREMAL_DEGREE;
            if let Some(&p) = degrees.iter().find(|&&p| p > limit) {
                return fail("degrees", format!("degree {p} in the degree grid spec exceeds the extremal limit {limit}"));
            }
            if self.starts == 0 {
                return fail("starts", "need at least one start".into());
            }
            if !(self.tol > 0.0) {
                return fail("tol", format!("tolerance {} must be positive", self.tol));
            }
            if self.max_iters == 0 {
                return fail("max_iters", "need at least one iteration".into());
            }
        }
        let fixed_families: &[(Study, Family)] = &[
            (Study::BilinearSharpnessS2, Family::HighestWeight),
            (Study::FrequencyDisappearance, Family::HighestWeight),
            (Study::TrilinearS2, Family::HighestWeight),
            (Study::CriticalExponent, Family::HighestWeight),
            (Study::ZonalSharpness, Family::Zonal),
        ];
        if let Some(&(_, want)) = fixed_families.iter().find(|(s, _)| *s == study) {
            for (field, got) in [("family_f", Some(self.family_f)), ("family_g", Some(self.family_g))] {
                if got != Some(want) {
                    return fail(field, format!("study {study} uses the {want} family"));
                }
            }
        }
        if study == Study::RatioGrid {
            let mut fams = vec![("family_f", self.family_f), ("family_g", self.family_g)];
            if let Some(h) = self.family_h {
                fams.push(("family_h", h));
            }
            for (field, fam) in fams {
                if let Err(e) = fam.spec(self.dimension, 0, 0) {
                    return fail(field, e.to_string());
                }
            }
        }
        if self.lebesgue.is_empty() {
            return fail("lebesgue", "no Lebesgue exponents".into());
        }
        let floor = if study == Study::CriticalExponent { 2.0 } else { 1.0 };
        if let Some(r) = self.lebesgue.iter().find(|r| r.0.is_nan() || r.0 < floor) {
            return fail("lebesgue", format!("exponent {r} below {floor}"));
        }
        if matches!(study, Study::BilinearSharpnessS2 | Study::FrequencyDisappearance | Study::ZonalSharpness | Study::TrilinearS2 | Study::WindowedProjector | Study::BestConstant)
            && self.lebesgue.iter().any(|r| r.0 != 2.0)
        {
            return fail("lebesgue", format!("study {study} is an L^2 study"));
        }
        if study == Study::WindowedProjector {
            if self.centers.is_empty() {
                return fail("centers", "no window centers".into());
            }
            if let Some(c) = self.centers.iter().find(|c| !(**c >= 1.0) || !c.is_finite()) {
                return fail("centers", format!("window center {c} must be a finite value ≥ 1"));
            }
        }
        if matches!(study, Study::WindowedProjector | Study::BestConstant) && self.draws == 0 {
            return fail("draws", "need at least one draw".into());
        }
        if self.pairing == Pairing::Scaled && self.scale_factor == 0 {
            return fail("scale_factor", "scale factor must be ≥ 1".into());
        }
        if self.margin > MAX_MARGIN {
            return fail("margin", format!("margin {} above {MAX_MARGIN}", self.margin));
        }
        if self.node_budget == 0 {
            return fail("node_budget", "node budget must be positive".into());
        }
        if self.out_dir.is_empty() {
            return fail("out_dir", "empty output directory".into());
        }
        Ok(())
    }

    /// The configuration as text that [`ExperimentConfig::parse`] reads back
    /// to an equal value.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let exps: Vec<String> = self.lebesgue.iter().map(|r| if r.0.is_infinite() { "inf".into() } else { format!("{:?}", r.0) }).collect();
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("study", self.study.to_string());
        put("dimension", self.dimension.to_string());
        put("family_f", self.family_f.to_string());
        put("family_g", self.family_g.to_string());
        put("family_h", self.family_h.map_or("none".into(), |f| f.to_string()));
        put("degrees", self.degrees.to_string());
        put("pairing", self.pairing.to_string());
        put("fixed_degree", self.fixed_degree.to_string());
        put("scale_factor", self.scale_factor.to_string());
        put("lebesgue", exps.join(", "));
        put("centers", list(&self.centers));
        put("draws", self.draws.to_string());
        put("starts", self.starts.to_string());
        put("tol", format!("{:?}", self.tol));
        put("max_iters", self.max_iters.to_string());
        put("seed", self.seed.to_string());
        put("margin", self.margin.to_string());
        put("node_budget", self.node_budget.to_string());
        put("out_dir", self.out_dir.clone());
        put("format", self.format.to_string());
        put("plot", self.plot.to_string());
        out
    }
}
