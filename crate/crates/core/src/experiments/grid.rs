//! Product-norm ratios `‖∏ f_i‖_{L^r} / ∏ ‖f_i‖_2` over degree grids.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{lambda_bound, trilinear_bound};
use crate::error::{Error, Result};
use crate::harmonics::{HarmonicFamily, HarmonicSpec, SpherePoint};
use crate::quadrature::{
    empirical_sup_rule, highest_weight_lp, lp_norm, zonal_line_norm_with_margin, S2Transform, SphereRule,
    DEFAULT_MARGIN, DEFAULT_NODE_BUDGET,
};
use crate::rng::derive_seed;

/// Eigenfunction family of one factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Zonal about the north pole `(0, …, 0, 1)`.
    Zonal,
    /// Zonal about `(1, 0, …, 0)`, orthogonal to the north pole.
    ZonalOrthogonal,
    HighestWeight,
    /// Random unit element of the eigenspace (`S^2` only).
    Random,
    /// Windowed random function spread over several degrees.
    Band,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Zonal, Family::ZonalOrthogonal, Family::HighestWeight, Family::Random, Family::Band];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Zonal => "zonal",
            Family::ZonalOrthogonal => "zonal-orthogonal",
            Family::HighestWeight => "highest-weight",
            Family::Random => "random",
            Family::Band => "band",
        }
    }

    fn is_zonal(self) -> bool {
        matches!(self, Family::Zonal | Family::ZonalOrthogonal)
    }

    /// The unit eigenfunction this family selects in `H_degree` of `S^d`.
    /// `seed` only matters for [`Family::Random`].
    pub fn spec(self, d: usize, degree: u32, seed: u64) -> Result<HarmonicSpec> {
        match self {
            Family::Zonal => Ok(HarmonicSpec::zonal(d, degree)),
            Family::ZonalOrthogonal => {
                let mut axis = vec![0.0; d + 1];
                axis[0] = 1.0;
                HarmonicSpec::new(d, degree, HarmonicFamily::Zonal { pole: SpherePoint::new(axis)? })
            }
            Family::HighestWeight => Ok(HarmonicSpec::highest_weight(d, degree)),
            Family::Random => {
                if d != 2 {
                    return Err(Error::InvalidFamily(format!("random family needs d = 2, got d = {d}")));
                }
                HarmonicSpec::new(d, degree, HarmonicFamily::RandomS2 { seed })
            }
            Family::Band => Err(Error::InvalidFamily("band functions come only from the windowed experiment".into())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::InvalidFamily(format!("unknown family {s:?}")))
    }
}

/// How a ratio was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Beta-function closed form for highest-weight products.
    ClosedForm,
    /// One-dimensional Gauss rule for co-axial zonal products.
    ZonalLine,
    /// Ring transform on `S^2` from `Y_l^m` coefficients.
    S2Transform,
    /// Product Gauss rule on `S^d`.
    SphereQuadrature,
    /// Maximum over a dense node set (`r = ∞`).
    SupSampling,
}

/// One measured ratio together with its growth factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub d: usize,
    pub families: Vec<Family>,
    pub degrees: Vec<u32>,
    #[serde(with = "lebesgue_serde")]
    pub lebesgue_r: f64,
    pub ratio: f64,
    pub bound: f64,
    /// Polynomial degree of `|∏ f_i|^r` when `r` is an even integer.
    pub integrand_degree: Option<u32>,
    /// Polynomial exactness of the rule used; `None` for closed forms and sup sampling.
    pub exactness: Option<u32>,
    pub method: Method,
    /// Window centers, for windowed samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<f64>>,
    /// Draw index for randomised samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draw: Option<u32>,
}

impl RatioSample {
    pub fn min_degree(&self) -> u32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Empirical constant `ratio / bound`.
    pub fn constant(&self) -> f64 {
        self.ratio / self.bound
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degrees
            .cmp(&other.degrees)
            .then_with(|| self.families.cmp(&other.families))
            .then_with(|| self.lebesgue_r.total_cmp(&other.lebesgue_r))
            .then_with(|| self.draw.cmp(&other.draw))
    }
}

/// Samples in canonical order plus reproducibility metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub samples: Vec<RatioSample>,
    pub seed: u64,
    pub quadrature_margin: u32,
    /// Seconds since the Unix epoch; filled in by runners, never by the library.
    pub timestamp: Option<u64>,
}

impl ExperimentGrid {
    pub fn new(mut samples: Vec<RatioSample>, seed: u64, quadrature_margin: u32) -> Self {
        samples.sort_by(RatioSample::canonical_cmp);
        Self { samples, seed, quadrature_margin, timestamp: None }
    }

    /// Appends the samples of `other`, keeping canonical order.
    pub fn merge(&mut self, other: ExperimentGrid) {
        self.samples.extend(other.samples);
        self.samples.sort_by(RatioSample::canonical_cmp);
    }

    /// `max ratio / bound` over all samples.
    pub fn empirical_constant(&self) -> Option<f64> {
        self.samples.iter().map(RatioSample::constant).reduce(f64::max)
    }

    /// Largest rule exactness used by any sample.
    pub fn max_exactness(&self) -> Option<u32> {
        self.samples.iter().filter_map(|s| s.exactness).max()
    }

    /// Checks every sample: finite nonnegative ratio, positive bound, and a
    /// rule exact through the integrand degree.
    pub fn validate(&self) -> Result<()> {
        for s in &self.samples {
            let label = format!("{:?} {:?} r={}", s.families, s.degrees, s.lebesgue_r);
            if !(s.ratio >= 0.0) || !s.ratio.is_finite() {
                return Err(Error::InvariantViolation(format!("ratio {} for {label}", s.ratio)));
            }
            if !(s.bound > 0.0) || !s.bound.is_finite() {
                return Err(Error::InvariantViolation(format!("bound {} for {label}", s.bound)));
            }
            if let (Some(need), Some(have)) = (s.integrand_degree, s.exactness) {
                if have < need {
                    return Err(Error::InvariantViolation(format!(
                        "rule exact through {have} for an integrand of degree {need} ({label})"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub seed: u64,
    pub margin: u32,
    pub node_budget: usize,
    /// Independent draws per degree tuple when a factor is random.
    pub draws: u32,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { seed: 0, margin: DEFAULT_MARGIN, node_budget: DEFAULT_NODE_BUDGET, draws: 1 }
    }
}

/// One sample per degree pair, with `bound = Λ(d, min(p, q))`.
pub fn ratio_grid(
    d: usize,
    family_f: Family,
    family_g: Family,
    pairs: &[(u32, u32)],
    lebesgue_r: f64,
    opts: &GridOptions,
) -> Result<ExperimentGrid> {
    let tuples: Vec<Vec<u32>> = pairs.iter().map(|&(p, q)| vec![p, q]).collect();
    product_grid(d, &[family_f, family_g], &tuples, lebesgue_r, opts, |deg| {
        lambda_bound(d, f64::from(deg[0].min(deg[1]).max(1)))
    })
}

/// One sample per degree triple, with the trilinear growth factor as bound.
pub fn trilinear_ratio_grid(
    d: usize,
    families: [Family; 3],
    triples: &[(u32, u32, u32)],
    lebesgue_r: f64,
    opts: &GridOptions,
) -> Result<ExperimentGrid> {
    let tuples: Vec<Vec<u32>> = triples.iter().map(|&(a, b, c)| vec![a, b, c]).collect();
    product_grid(d, &families, &tuples, lebesgue_r, opts, |deg| {
        let f = |p: u32| f64::from(p.max(1));
        Ok(trilinear_bound(d, f(deg[0]), f(deg[1]), f(deg[2])))
    })
}

fn product_grid(
    d: usize,
    families: &[Family],
    tuples: &[Vec<u32>],
    lebesgue_r: f64,
    opts: &GridOptions,
    bound: impl Fn(&[u32]) -> Result<f64> + Sync,
) -> Result<ExperimentGrid> {
    if !(2..=5).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if lebesgue_r.is_nan() || lebesgue_r < 1.0 {
        return Err(Error::InvalidExponent(lebesgue_r));
    }
    for f in families {
        f.spec(d, 0, 0)?;
    }
    let random = families.contains(&Family::Random);
    let draws = if random { opts.draws.max(1) } else { 1 };
    let jobs: Vec<(&Vec<u32>, u32)> = tuples.iter().flat_map(|t| (0..draws).map(move |i| (t, i))).collect();
    let samples = jobs
        .par_iter()
        .map(|&(degrees, draw)| {
            let mut factors = families
                .iter()
                .zip(degrees)
                .enumerate()
                .map(|(pos, (&f, &p))| {
                    Ok((f, p, f.spec(d, p, derive_seed(opts.seed, &[u64::from(draw), pos as u64, u64::from(p)]))?))
                })
                .collect::<Result<Vec<_>>>()?;
            // the product is commutative; a canonical factor order makes
            // permuted tuples give bit-identical ratios
            factors.sort_by_key(|&(f, p, _)| (f, p));
            let sorted_families: Vec<Family> = factors.iter().map(|t| t.0).collect();
            let specs: Vec<HarmonicSpec> = factors.into_iter().map(|t| t.2).collect();
            let measured =
                measure(d, &sorted_families, &specs, lebesgue_r, opts).map_err(|e| name_tuple(e, families, degrees))?;
            Ok(RatioSample {
                d,
                families: families.to_vec(),
                degrees: degrees.clone(),
                lebesgue_r,
                ratio: measured.ratio,
                bound: bound(degrees)?,
                integrand_degree: measured.integrand_degree,
                exactness: measured.exactness,
                method: measured.method,
                centers: None,
                draw: random.then_some(draw),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentGrid::new(samples, opts.seed, opts.margin))
}

fn name_tuple(e: Error, families: &[Family], degrees: &[u32]) -> Error {
    match e {
        Error::InfeasibleQuadrature { what, nodes, budget } => Error::InfeasibleQuadrature {
            what: format!("{what} (families {families:?}, degrees {degrees:?})"),
            nodes,
            budget,
        },
        other => other,
    }
}

struct Measured {
    ratio: f64,
    integrand_degree: Option<u32>,
    exactness: Option<u32>,
    method: Method,
}

fn even_exponent(r: f64) -> Option<u32> {
    (r.is_finite() && r.fract() == 0.0 && r % 2.0 == 0.0 && r <= 64.0).then_some(r as u32)
}

fn measure(d: usize, families: &[Family], specs: &[HarmonicSpec], r: f64, opts: &GridOptions) -> Result<Measured> {
    let total: u32 = specs.iter().map(HarmonicSpec::degree).sum();
    let even = even_exponent(r);
    let integrand_degree = even.map(|k| k * total);

    if families.iter().all(|&f| f == Family::HighestWeight) {
        // e_{n_1} ⋯ e_{n_k} = e_{Σ n_i}
        let mut ratio = highest_weight_lp(d, total, r)?;
        for s in specs {
            ratio /= highest_weight_lp(d, s.degree(), 2.0)?;
        }
        return Ok(Measured { ratio, integrand_degree, exactness: None, method: Method::ClosedForm });
    }

    if let Some(k) = even {
        let coaxial = families.iter().all(|&f| f == Family::Zonal) || families.iter().all(|&f| f == Family::ZonalOrthogonal);
        if coaxial && families[0].is_zonal() {
            let degrees: Vec<u32> = specs.iter().map(HarmonicSpec::degree).collect();
            let ratio = zonal_line_norm_with_margin(d, &degrees, k, opts.margin)?;
            return Ok(Measured { ratio, integrand_degree, exactness: integrand_degree, method: Method::ZonalLine });
        }
    }

    if r.is_infinite() {
        let rule = empirical_sup_rule(d, total, opts.node_budget)?;
        let ratio = product_norm_on_rule(specs, &rule, r, None)?;
        return Ok(Measured { ratio, integrand_degree: None, exactness: None, method: Method::SupSampling });
    }

    // even r: exact; otherwise the rule of the next even exponent
    let target = integrand_degree.unwrap_or_else(|| (2.0 * (r / 2.0).ceil()) as u32 * total);
    let rule = SphereRule::build(d, target, opts.margin, opts.node_budget)?;
    let exactness = Some(rule.exact_degree());
    if d == 2 {
        let ratio = product_norm_s2(specs, rule, r)?;
        return Ok(Measured { ratio, integrand_degree, exactness, method: Method::S2Transform });
    }
    let ratio = product_norm_on_rule(specs, &rule, r, integrand_degree)?;
    Ok(Measured { ratio, integrand_degree, exactness, method: Method::SphereQuadrature })
}

/// `‖∏ f_i‖_{L^r}` by pointwise evaluation on `rule`.
pub fn product_norm_on_rule(
    factors: &[HarmonicSpec],
    rule: &SphereRule,
    r: f64,
    integrand_degree: Option<u32>,
) -> Result<f64> {
    for f in factors {
        if f.dimension() != rule.dimension() {
            return Err(Error::DimensionMismatch { expected: rule.dimension(), found: f.dimension() });
        }
    }
    let evaluators: Vec<_> = factors.iter().map(HarmonicSpec::evaluator).collect();
    lp_norm(
        |x| evaluators.iter().fold(Complex64::new(1.0, 0.0), |acc, e| acc * e(x)),
        rule,
        r,
        integrand_degree,
    )
}

/// `‖∏ f_i‖_{L^r}` on `S^2` through coefficient synthesis.
fn product_norm_s2(factors: &[HarmonicSpec], rule: SphereRule, r: f64) -> Result<f64> {
    let coefficients = factors.iter().map(HarmonicSpec::coefficients).collect::<Result<Vec<_>>>()?;
    let degrees: Vec<u32> = factors.iter().map(HarmonicSpec::degree).collect();
    let transform = S2Transform::new(rule, &degrees)?;
    let mut product = vec![Complex64::new(1.0, 0.0); transform.grid_len()];
    for c in &coefficients {
        for (acc, v) in product.iter_mut().zip(transform.synthesize(c)?) {
            *acc *= v;
        }
    }
    let values: Vec<f64> = product.iter().map(|z| if r == 2.0 { z.norm_sqr() } else { z.norm().powf(r) }).collect();
    Ok(transform.integrate(&values).powf(r.recip()))
}

/// Writes `r = ∞` as the string `"inf"` so that reports stay valid JSON.
pub(crate) mod lebesgue_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(r: &f64, s: S) -> Result<S::Ok, S::Error> {
        if r.is_infinite() && *r > 0.0 {
            Repr::Named("inf".into()).serialize(s)
        } else {
            Repr::Finite(*r).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(r) => Ok(r),
            Repr::Named(name) if name == "inf" => Ok(f64::INFINITY),
            Repr::Named(name) => Err(serde::de::Error::custom(format!("invalid exponent {name:?}"))),
        }
    }
}
