//! I.i.d. scenery fields `ξ_y`, sampled lazily and keyed by site.
//!
//! The value at a site is a deterministic function of the field key and the
//! packed site code, so a field realises identically whatever order its
//! sites are queried in, and nothing needs to be stored for unvisited sites.

use std::f64::consts::{FRAC_2_PI, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rng::{open01, SiteStream};
use crate::stable_law::{StableParams, StableSampler};
use crate::statistics::SiteMap;
use crate::walk::{Dim, Point};

/// Support of a lattice law: `offset + d0·Z`, with `d0` maximal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpan {
    pub d0: u64,
    pub offset: i64,
}

impl LatticeSpan {
    /// Residue modulo `d0` that `Z_n` must occupy.
    pub fn residue(&self, n: u64) -> i64 {
        let d0 = self.d0 as i128;
        ((n as i128 * self.offset as i128).rem_euclid(d0)) as i64
    }

    pub fn admits(&self, n: u64, z: i64) -> bool {
        (z as i128 - self.residue(n) as i128).rem_euclid(self.d0 as i128) == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneryKind {
    Lattice(LatticeSpan),
    /// `limsup |φ_ξ(u)| < 1` as `|u| → ∞`.
    NonLattice,
}

/// Finite law on the integers, sampled by inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLaw {
    atoms: Vec<i64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl FiniteLaw {
    pub fn new(mut entries: Vec<(i64, f64)>) -> Result<Self> {
        entries.retain(|&(_, p)| p > 0.0);
        entries.sort_by_key(|&(a, _)| a);
        entries.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        if entries.len() < 2 {
            return Err(Error::Domain("scenery law needs at least two atoms".into()));
        }
        if entries.iter().any(|(_, p)| !p.is_finite()) {
            return Err(Error::Domain("scenery probabilities must be finite".into()));
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "scenery probabilities sum to {total}"
            )));
        }
        let mut acc = 0.0;
        let cumulative = entries
            .iter()
            .map(|e| {
                acc += e.1;
                acc
            })
            .collect::<Vec<_>>();
        let (atoms, probs) = entries.into_iter().unzip();
        let mut law = FiniteLaw {
            atoms,
            probs,
            cumulative,
        };
        *law.cumulative.last_mut().unwrap() = 1.0;
        Ok(law)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.entries().map(|(a, p)| a as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.entries()
            .map(|(a, p)| p * (a as f64 - m).powi(2))
            .sum()
    }

    pub fn span(&self) -> LatticeSpan {
        let base = self.atoms[0];
        let d0 = self.atoms[1..]
            .iter()
            .fold(0u64, |g, &a| gcd(g, (a - base).unsigned_abs()));
        LatticeSpan { d0, offset: base }
    }

    pub fn tail(&self, t: f64) -> f64 {
        self.entries()
            .filter(|&(a, _)| (a as f64).abs() >= t)
            .map(|(_, p)| p)
            .sum()
    }

    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u = open01(rng.next_u64());
        let i = self.cumulative.partition_point(|&c| c < u);
        self.atoms[i.min(self.atoms.len() - 1)]
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Symmetric integer law with `P(|ξ| = k) ∝ k^{-1-β}`, `k ≥ 1`.
///
/// `|ξ|` is drawn by inversion on tabulated partial sums up to `HEAD`; beyond
/// it a Pareto variable rounded to the nearest integer is accepted with
/// probability `k^{-1-β} / ∫_{k-1/2}^{k+1/2} y^{-1-β} dy ≤ 1` (convexity),
/// which is exact for the conditional tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaLaw {
    beta: f64,
    zeta: f64,
    /// `P(|ξ| ≤ k)` for `k = 1..=HEAD`.
    cumulative: Vec<f64>,
}

impl ZetaLaw {
    const HEAD: usize = 4096;
    /// Values beyond 2^53 are not exactly representable and are redrawn.
    const MAX_ABS: f64 = 9_007_199_254_740_992.0;

    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 2.0) {
            return Err(Error::Domain(format!(
                "zeta-lattice needs β in (0, 2), got {beta}"
            )));
        }
        let zeta = zeta_one_plus(beta, Self::HEAD);
        let a = 1.0 + beta;
        let mut acc = 0.0;
        let cumulative = (1..=Self::HEAD)
            .map(|k| {
                acc += (k as f64).powf(-a) / zeta;
                acc
            })
            .collect();
        Ok(ZetaLaw {
            beta,
            zeta,
            cumulative,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ζ(1 + β)`.
    pub fn normalizer(&self) -> f64 {
        self.zeta
    }

    /// `P(|ξ| ≥ t)`.
    pub fn tail(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return 1.0;
        }
        let k = t.ceil();
        if k <= Self::HEAD as f64 {
            1.0 - self.cumulative[k as usize - 2]
        } else {
            // Σ_{j ≥ k} j^{-a} = k^{-a} + Σ_{j > k} j^{-a}
            let a = 1.0 + self.beta;
            (k.powf(-a) + zeta_tail(self.beta, k)) / self.zeta
        }
    }

    /// `sup_t t^β P(|ξ| ≥ t)`; the supremum over `(k-1, k]` sits at `t = k`.
    pub fn tail_constant(&self) -> f64 {
        let limit = 1.0 / (self.beta * self.zeta);
        (1..=Self::HEAD)
            .map(|k| (k as f64).powf(self.beta) * self.tail(k as f64))
            .fold(limit, f64::max)
    }

    /// Stable law attracting `n^{-1/β} Σ ξ`: symmetric, with
    /// `A1 = Γ(1-β) cos(πβ/2) / (β ζ(1+β))` (`π/(2ζ(2))` at `β = 1`).
    pub fn attraction(&self) -> StableParams {
        let b = self.beta;
        let a1 = if b == 1.0 {
            0.5 * PI / self.zeta
        } else {
            gamma(1.0 - b) * (0.5 * PI * b).cos() / (b * self.zeta)
        };
        StableParams {
            beta: b,
            a1,
            a2: 0.0,
        }
    }

    #[inline]
    fn sample_abs<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = open01(rng.next_u64());
        let head_mass = self.cumulative[Self::HEAD - 1];
        if u <= head_mass {
            let i = self.cumulative.partition_point(|&c| c < u);
            return (i.min(Self::HEAD - 1) + 1) as f64;
        }
        let b = self.beta;
        let start = Self::HEAD as f64 + 0.5;
        loop {
            let y = start * open01(rng.next_u64()).powf(-1.0 / b);
            if y > Self::MAX_ABS {
                continue;
            }
            let k = y.round();
            let h = 0.5 / k;
            // ∫_{k-h·k}^{k+h·k} y^{-1-β} dy · k^{1+β}, computed without cancellation.
            let mass = k * (1.0 + h).powf(-b) * (b * (h.ln_1p() - (-h).ln_1p())).exp_m1() / b;
            if open01(rng.next_u64()) * mass <= 1.0 {
                return k;
            }
        }
    }
}

/// `Σ_{k > m} k^{-1-β}` by Euler–Maclaurin at `m`.
fn zeta_tail(beta: f64, m: f64) -> f64 {
    let a = 1.0 + beta;
    m.powf(-beta) / beta - 0.5 * m.powf(-a) + a * m.powf(-a - 1.0) / 12.0
        - a * (a + 1.0) * (a + 2.0) * m.powf(-a - 3.0) / 720.0
}

fn zeta_one_plus(beta: f64, head: usize) -> f64 {
    let a = 1.0 + beta;
    let partial: f64 = (1..=head).rev().map(|k| (k as f64).powf(-a)).sum();
    partial + zeta_tail(beta, head as f64)
}

/// Distribution of the scenery values.
#[derive(Debug, Clone)]
pub enum SceneryLaw {
    Rademacher,
    Finite(FiniteLaw),
    Gaussian,
    Cauchy,
    Zeta(ZetaLaw),
    Stable(StableSampler),
}

impl SceneryLaw {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            SceneryLaw::Rademacher => Rademacher.draw(rng),
            SceneryLaw::Finite(l) => l.draw(rng),
            SceneryLaw::Gaussian => Gaussian.draw(rng),
            SceneryLaw::Cauchy => Cauchy.draw(rng),
            SceneryLaw::Zeta(l) => l.draw(rng),
            SceneryLaw::Stable(s) => s.draw(rng),
        }
    }
}

/// Site-keyed value source, monomorphised into the simulation kernels.
pub trait SiteLaw {
    /// Integer-valued law.
    const LATTICE: bool;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    #[inline(always)]
    fn value(&self, key: u64, code: u64) -> f64 {
        self.draw(&mut SiteStream::new(key, code))
    }

    #[inline(always)]
    fn int_value(&self, key: u64, code: u64) -> i64 {
        self.value(key, code) as i64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Rademacher;

impl SiteLaw for Rademacher {
    const LATTICE: bool = true;

    #[inline(always)]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    #[inline(always)]
    fn int_value(&self, key: u64, code: u64) -> i64 {
        // Same bit the generic path reads: the stream's first word.
        let first = crate::rng::mix64(code ^ key);
        1 - 2 * (first >> 63) as i64
    }
}

impl SiteLaw for FiniteLaw {
    const LATTICE: bool = true;

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample(rng) as f64
    }

    #[inline]
    fn int_value(&self, key: u64, code: u64) -> i64 {
        self.sample(&mut SiteStream::new(key, code))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Gaussian;

impl SiteLaw for Gaussian {
    const LATTICE: bool = false;

    #[inline(always)]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Cauchy;

impl SiteLaw for Cauchy {
    const LATTICE: bool = false;

    /// Ratio of two independent standard normals.
    #[inline(always)]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let num: f64 = rng.sample(StandardNormal);
        let den: f64 = rng.sample(StandardNormal);
        num / den
    }
}

impl SiteLaw for ZetaLaw {
    const LATTICE: bool = true;

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let negative = rng.next_u64() >> 63 == 1;
        let k = self.sample_abs(rng);
        if negative {
            -k
        } else {
            k
        }
    }
}

impl SiteLaw for StableSampler {
    const LATTICE: bool = false;

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample(rng)
    }
}

/// Callback receiving a monomorphised scenery law.
pub trait WithLaw {
    type Output;
    fn run<L: SiteLaw>(self, law: &L) -> Self::Output;
}

/// A scenery model: its law, the stable law it is attracted to, its lattice
/// structure and the tail constant `C_ξ` with `P(|ξ| ≥ t) ≤ C_ξ t^{-β}`.
#[derive(Debug, Clone)]
pub struct SceneryModel {
    pub name: String,
    pub law: SceneryLaw,
    pub attraction: StableParams,
    pub kind: SceneryKind,
    pub tail_constant: f64,
}

/// Names accepted by [`builtin_scenery`]; the last two take parameters, as in
/// `zeta-lattice(1.5)` and `stable(1.5,1,0.3)`.
pub const BUILTIN_SCENERIES: [&str; 5] = [
    "rademacher",
    "gaussian",
    "cauchy-cont",
    "zeta-lattice(β)",
    "stable(β,A1,A2)",
];

fn parse_args(name: &str, prefix: &str) -> Option<Result<Vec<f64>>> {
    let rest = name
        .strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?;
    Some(
        rest.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownScenery(name.to_string()))
            })
            .collect(),
    )
}

pub fn builtin_scenery(name: &str) -> Result<SceneryModel> {
    let name = name.trim();
    match name {
        "rademacher" => {
            let law = FiniteLaw::new(vec![(-1, 0.5), (1, 0.5)])?;
            Ok(SceneryModel {
                name: name.into(),
                kind: SceneryKind::Lattice(law.span()),
                law: SceneryLaw::Rademacher,
                attraction: StableParams::standard_normal(),
                tail_constant: 1.0,
            })
        }
        "gaussian" => Ok(SceneryModel {
            name: name.into(),
            law: SceneryLaw::Gaussian,
            attraction: StableParams::standard_normal(),
            kind: SceneryKind::NonLattice,
            tail_constant: gaussian_tail_constant(),
        }),
        "cauchy-cont" => Ok(SceneryModel {
            name: name.into(),
            law: SceneryLaw::Cauchy,
            attraction: StableParams::standard_cauchy(),
            kind: SceneryKind::NonLattice,
            // t·P(|ξ| ≥ t) = (2t/π) atan(1/t) increases to 2/π.
            tail_constant: FRAC_2_PI,
        }),
        _ => {
            if let Some(args) = parse_args(name, "zeta-lattice") {
                let args = args?;
                let [beta] = args[..] else {
                    return Err(Error::UnknownScenery(name.into()));
                };
                let law = ZetaLaw::new(beta)?;
                return Ok(SceneryModel {
                    name: name.into(),
                    attraction: law.attraction(),
                    // ±1 and ±2 are in the support, so the span is 1.
                    kind: SceneryKind::Lattice(LatticeSpan { d0: 1, offset: 0 }),
                    tail_constant: law.tail_constant(),
                    law: SceneryLaw::Zeta(law),
                });
            }
            if let Some(args) = parse_args(name, "stable") {
                let args = args?;
                let [beta, a1, a2] = args[..] else {
                    return Err(Error::UnknownScenery(name.into()));
                };
                let params = StableParams::new(beta, a1, a2)?;
                return Ok(SceneryModel {
                    name: name.into(),
                    law: SceneryLaw::Stable(params.sampler()),
                    attraction: params,
                    kind: SceneryKind::NonLattice,
                    tail_constant: stable_tail_constant(params)?,
                });
            }
            Err(Error::UnknownScenery(name.into()))
        }
    }
}

/// `sup_t t² P(|N| ≥ t)` for a standard normal, by golden-section search.
fn gaussian_tail_constant() -> f64 {
    let f = |t: f64| t * t * erfc(t / std::f64::consts::SQRT_2);
    let (mut lo, mut hi) = (0.5, 3.0);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    f(0.5 * (lo + hi))
}

/// Numerical `sup_t t^β P(|ξ| ≥ t)` for a stable scenery: a log grid of
/// inverted tail probabilities together with the Pareto asymptote.
fn stable_tail_constant(p: StableParams) -> Result<f64> {
    if p.beta == 2.0 {
        // X = sqrt(2 A1) N, so the constant scales like A1.
        return Ok(2.0 * p.a1 * gaussian_tail_constant());
    }
    let sigma = p.sigma();
    let asymptote = 2.0 / PI * gamma(p.beta) * (0.5 * PI * p.beta).sin() * p.a1;
    let mut best = asymptote;
    for i in 0..=40 {
        let t = sigma * 10f64.powf(-1.0 + 0.1 * i as f64);
        let tail = 1.0 - p.cdf(t, 1e-9)? + p.cdf(-t, 1e-9)?;
        best = best.max(t.powf(p.beta) * tail);
    }
    Ok(best)
}

impl SceneryModel {
    /// Scenery with a finite integer law, attracted to a Gaussian.
    pub fn finite(name: &str, entries: Vec<(i64, f64)>) -> Result<Self> {
        let law = FiniteLaw::new(entries)?;
        if law.mean().abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "finite scenery must be centred, mean is {}",
                law.mean()
            )));
        }
        let tail_constant = law
            .entries()
            .map(|(a, _)| {
                let t = (a as f64).abs();
                t * t * law.tail(t)
            })
            .fold(0.0, f64::max);
        Ok(SceneryModel {
            name: name.into(),
            attraction: StableParams::new(2.0, 0.5 * law.variance(), 0.0)?,
            kind: SceneryKind::Lattice(law.span()),
            tail_constant,
            law: SceneryLaw::Finite(law),
        })
    }

    pub fn beta(&self) -> f64 {
        self.attraction.beta
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.kind, SceneryKind::Lattice(_))
    }

    pub fn span(&self) -> Option<LatticeSpan> {
        match self.kind {
            SceneryKind::Lattice(s) => Some(s),
            SceneryKind::NonLattice => None,
        }
    }

    /// Integer atoms with probabilities, for finite lattice laws.
    pub fn finite_atoms(&self) -> Option<Vec<(i64, f64)>> {
        match &self.law {
            SceneryLaw::Rademacher => Some(vec![(-1, 0.5), (1, 0.5)]),
            SceneryLaw::Finite(l) => Some(l.entries().collect()),
            _ => None,
        }
    }

    /// Exact `P(|ξ_0| ≥ t)`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        Ok(match &self.law {
            SceneryLaw::Rademacher => {
                if t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SceneryLaw::Finite(l) => l.tail(t),
            SceneryLaw::Gaussian => erfc(t.max(0.0) / std::f64::consts::SQRT_2),
            SceneryLaw::Cauchy => 1.0 - 2.0 * t.max(0.0).atan() / PI,
            SceneryLaw::Zeta(l) => l.tail(t),
            SceneryLaw::Stable(s) => {
                let p = s.params();
                if t <= 0.0 {
                    1.0
                } else {
                    (1.0 - p.cdf(t, 1e-10)? + p.cdf(-t, 1e-10)?).clamp(0.0, 1.0)
                }
            }
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.law.sample(rng)
    }

    /// Value of the field with key `key` at site code `code`.
    pub fn value_at(&self, key: u64, code: u64) -> f64 {
        struct At(u64, u64);
        impl WithLaw for At {
            type Output = f64;
            fn run<L: SiteLaw>(self, law: &L) -> f64 {
                if L::LATTICE {
                    law.int_value(self.0, self.1) as f64
                } else {
                    law.value(self.0, self.1)
                }
            }
        }
        self.with_law(At(key, code))
    }

    pub fn with_law<V: WithLaw>(&self, visitor: V) -> V::Output {
        match &self.law {
            SceneryLaw::Rademacher => visitor.run(&Rademacher),
            SceneryLaw::Finite(l) => visitor.run(l),
            SceneryLaw::Gaussian => visitor.run(&Gaussian),
            SceneryLaw::Cauchy => visitor.run(&Cauchy),
            SceneryLaw::Zeta(l) => visitor.run(l),
            SceneryLaw::Stable(s) => visitor.run(s),
        }
    }
}

/// One realisation of the scenery, memoised per visited site.
#[derive(Debug, Clone)]
pub struct SceneryField<'m> {
    model: &'m SceneryModel,
    dim: Dim,
    key: u64,
    scale: f64,
    memo: SiteMap<f64>,
}

impl<'m> SceneryField<'m> {
    pub fn new(model: &'m SceneryModel, dim: Dim, key: u64) -> Self {
        SceneryField {
            model,
            dim,
            key,
            scale: 1.0,
            memo: SiteMap::default(),
        }
    }

    /// The same realisation multiplied by `lambda`.
    pub fn scaled(mut self, lambda: f64) -> Self {
        self.scale *= lambda;
        self.memo.clear();
        self
    }

    pub fn model(&self) -> &'m SceneryModel {
        self.model
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn xi_at(&mut self, site: Point) -> f64 {
        self.xi_at_code(site.code(self.dim))
    }

    pub fn xi_at_code(&mut self, code: u64) -> f64 {
        let (model, key, scale) = (self.model, self.key, self.scale);
        *self
            .memo
            .entry(code)
            .or_insert_with(|| scale * model.value_at(key, code))
    }

    /// Fixes the value at `site`, overriding the sampled one.
    pub fn set(&mut self, site: Point, value: f64) {
        self.memo.insert(site.code(self.dim), value);
    }

    pub fn memoized_sites(&self) -> usize {
        self.memo.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub t: f64,
    pub frequency: f64,
    pub bound: f64,
    pub stderr: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub samples: usize,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    pub fn flagged(&self) -> bool {
        self.rows.iter().any(|r| r.exceeds)
    }
}

/// Empirical `P(|ξ| ≥ t)` against `C_ξ t^{-β}`; a row is flagged when the
/// frequency exceeds the bound by more than three binomial standard errors.
pub fn tail_check<R: Rng + ?Sized>(
    model: &SceneryModel,
    sample_count: usize,
    t_grid: &[f64],
    rng: &mut R,
) -> Result<TailReport> {
    if sample_count < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "tail check needs at least 10^4 samples, got {sample_count}"
        )));
    }
    let mut abs: Vec<f64> = (0..sample_count).map(|_| model.sample(rng).abs()).collect();
    abs.sort_by(f64::total_cmp);
    let m = sample_count as f64;
    let beta = model.beta();
    let rows = t_grid
        .iter()
        .map(|&t| {
            let below = abs.partition_point(|&a| a < t);
            let frequency = (sample_count - below) as f64 / m;
            let bound = model.tail_constant * t.powf(-beta);
            let p = bound.min(1.0);
            let stderr = (p * (1.0 - p) / m).sqrt();
            TailRow {
                t,
                frequency,
                bound,
                stderr,
                exceeds: bound < 1.0 && frequency > bound + 3.0 * stderr,
            }
        })
        .collect();
    Ok(TailReport {
        samples: sample_count,
        rows,
    })
}
