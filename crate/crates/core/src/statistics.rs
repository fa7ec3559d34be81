//! Local-time functionals, Monte Carlo estimators and the exact small-instance
//! oracle.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::hash::{BuildHasherDefault, Hasher};

use num_complex::Complex64;
use statrs::function::gamma::gamma as gamma_fn;

use crate::error::{Error, Result};
use crate::process::bn;
use crate::rng::mix64;
use crate::scenery::{LatticeSpan, SceneryModel};
use crate::walk::{Point, WalkModel};

/// Hasher for packed site codes: one `mix64` round.
#[derive(Debug, Default, Clone, Copy)]
pub struct SiteHasher(u64);

impl Hasher for SiteHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = mix64(self.0 ^ b as u64);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = mix64(self.0 ^ v);
    }
}

pub type SiteMap<V> = HashMap<u64, V, BuildHasherDefault<SiteHasher>>;

/// Local times `N_n(y)` of a path, with per-checkpoint increments.
///
/// Increment `i` holds `N_{c_i}(y) - N_{c_{i-1}}(y)` (with `c_{-1} = 0`) for
/// the checkpoint indices `c_i` the field was built with.
#[derive(Debug, Clone, Default)]
pub struct LocalTimeField {
    n: usize,
    counts: SiteMap<u32>,
    max_count: u32,
    checkpoints: Vec<usize>,
    increments: Vec<SiteMap<u32>>,
}

pub struct LocalTimeBuilder {
    field: LocalTimeField,
    interval: usize,
}

impl LocalTimeBuilder {
    /// Records the visit at time `k` (visits arrive in increasing `k`).
    #[inline]
    pub fn visit(&mut self, k: usize, code: u64) {
        let f = &mut self.field;
        let c = f.counts.entry(code).or_insert(0);
        *c += 1;
        f.max_count = f.max_count.max(*c);
        while self.interval < f.checkpoints.len() && k >= f.checkpoints[self.interval] {
            self.interval += 1;
        }
        if self.interval < f.checkpoints.len() {
            *f.increments[self.interval].entry(code).or_insert(0) += 1;
        }
    }

    pub fn finish(mut self) -> LocalTimeField {
        self.field.n = self.field.counts.values().map(|&c| c as usize).sum();
        self.field
    }
}

impl LocalTimeField {
    pub fn builder(n: usize, checkpoints: &[usize]) -> LocalTimeBuilder {
        let mut counts = SiteMap::default();
        counts.reserve(n.min(1 << 20));
        LocalTimeBuilder {
            field: LocalTimeField {
                n,
                counts,
                max_count: 0,
                checkpoints: checkpoints.to_vec(),
                increments: vec![SiteMap::default(); checkpoints.len()],
            },
            interval: 0,
        }
    }

    /// Field from explicit counts, with no checkpoints.
    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut b = Self::builder(0, &[]);
        for (code, c) in counts {
            for _ in 0..c {
                b.visit(0, code);
            }
        }
        b.finish()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    /// `R_n`, the number of occupied sites.
    pub fn range(&self) -> usize {
        self.counts.len()
    }

    /// `N*_n`.
    pub fn max_count(&self) -> u32 {
        self.max_count
    }

    pub fn count(&self, code: u64) -> u32 {
        self.counts.get(&code).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    pub fn increment(&self, i: usize) -> &SiteMap<u32> {
        &self.increments[i]
    }

    /// `N_{c_i}(y)` for every site visited before checkpoint `i`.
    pub fn counts_at(&self, i: usize) -> SiteMap<u32> {
        let mut out = SiteMap::default();
        for inc in &self.increments[..=i] {
            for (&k, &v) in inc {
                *out.entry(k).or_insert(0) += v;
            }
        }
        out
    }
}

/// `V_n(β) = Σ_y N_n(y)^β`.
pub fn v_beta(field: &LocalTimeField, beta: f64) -> f64 {
    field.counts.values().map(|&c| (c as f64).powf(beta)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalReport {
    pub gamma: f64,
    pub thetas: Vec<f64>,
    pub times: Vec<f64>,
    pub l_value: f64,
    pub l_signed_value: f64,
    /// `Σ_y N_{c_m}(y)^γ` at the last checkpoint.
    pub v_value: f64,
}

/// `L_n(γ)` and its signed variant for the checkpoint increments of `field`:
/// `(n (ln n)^{γ-1})^{-1} Σ_x |Σ_i θ_i b_i(x)|^γ`, the signed one carrying
/// `sgn(Σ_i θ_i b_i(x))`.
pub fn l_stat(field: &LocalTimeField, thetas: &[f64], gamma: f64) -> Result<FunctionalReport> {
    let m = field.checkpoints.len();
    if thetas.len() != m || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "{} thetas for {m} checkpoint intervals",
            thetas.len()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "γ must be positive, got {gamma}"
        )));
    }
    if field.n < 2 {
        return Err(Error::Degenerate(format!(
            "l_stat needs n ≥ 2, got {}",
            field.n
        )));
    }
    let n = field.n as f64;
    let norm = n * n.ln().powf(gamma - 1.0);
    let (mut l, mut signed, mut v) = (0.0, 0.0, 0.0);
    for &code in field.counts.keys() {
        let (mut s, mut mag) = (0.0, 0.0);
        let mut occupancy = 0u32;
        for (inc, &theta) in field.increments.iter().zip(thetas) {
            if let Some(&b) = inc.get(&code) {
                s += theta * b as f64;
                mag += (theta * b as f64).abs();
                occupancy += b;
            }
        }
        // an exact cancellation leaves only rounding noise, which |s|^γ
        // would amplify for γ < 1
        if s.abs() <= 4.0 * f64::EPSILON * mag {
            s = 0.0;
        }
        let p = s.abs().powf(gamma);
        l += p;
        signed += p * s.signum() * (s != 0.0) as u8 as f64;
        v += (occupancy as f64).powf(gamma);
    }
    Ok(FunctionalReport {
        gamma,
        thetas: thetas.to_vec(),
        times: field.checkpoints.iter().map(|&c| c as f64 / n).collect(),
        l_value: l / norm,
        l_signed_value: signed / norm,
        v_value: v,
    })
}

/// Almost-sure limits of `L_n(γ)` and `L'_n(γ)` for a critical walk with
/// constant `A`: `Γ(γ+1)/(πA)^{γ-1} Σ_i |θ_i|^γ (t_i - t_{i-1})`, with
/// `sgn θ_i` inserted for the signed one.
pub fn l_stat_limit(gamma: f64, a: f64, thetas: &[f64], times: &[f64]) -> (f64, f64) {
    let k = gamma_fn(gamma + 1.0) / (PI * a).powf(gamma - 1.0);
    let mut prev = 0.0;
    let (mut l, mut s) = (0.0, 0.0);
    for (&theta, &t) in thetas.iter().zip(times) {
        let w = theta.abs().powf(gamma) * (t - prev);
        l += w;
        s += w * theta.signum();
        prev = t;
    }
    (k * l, k * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaWitness {
    pub holds: bool,
    /// `R_n (lnln n)^{1/4} / n`; at most 1 on `Ω_n`.
    pub range_ratio: f64,
    /// `N*_n / n^γ`; at most 1 on `Ω_n`.
    pub max_ratio: f64,
    /// `N*_n ≥ (lnln n)^{1/4}`, checked when `holds`.
    pub max_lower_ok: Option<bool>,
    /// `V_n(β) ≥ n^{1-γ(1-β)₊}`, checked when `holds`.
    pub v_lower_ok: Option<bool>,
}

/// Indicator of `Ω_n = {R_n ≤ n/(lnln n)^{1/4}, N*_n ≤ n^γ}` with the
/// lower bounds it implies.
pub fn omega_indicator(field: &LocalTimeField, gamma: f64, beta: f64) -> Result<OmegaWitness> {
    if field.n < 16 {
        return Err(Error::InvalidArgument(format!(
            "Ω_n needs n ≥ 16, got {}",
            field.n
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "γ must lie in (0, 1), got {gamma}"
        )));
    }
    let n = field.n as f64;
    let loglog4 = n.ln().ln().powf(0.25);
    let range_ratio = field.range() as f64 * loglog4 / n;
    let max_ratio = field.max_count as f64 / n.powf(gamma);
    let holds = range_ratio <= 1.0 && max_ratio <= 1.0;
    let (max_lower_ok, v_lower_ok) = if holds {
        let exponent = 1.0 - gamma * (1.0 - beta).max(0.0);
        (
            Some(field.max_count as f64 >= loglog4),
            Some(v_beta(field, beta) >= n.powf(exponent)),
        )
    } else {
        (None, None)
    };
    Ok(OmegaWitness {
        holds,
        range_ratio,
        max_ratio,
        max_lower_ok,
        v_lower_ok,
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Mean and standard error of the mean.
    pub fn mean_of(xs: &[f64]) -> Estimate {
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            stderr: (var / m).sqrt(),
        }
    }
}

/// `(1/M) Σ_j e^{i u Z_j}` for each `u`.
pub fn empirical_cf(samples: &[f64], u_grid: &[f64]) -> Vec<Complex64> {
    let m = samples.len() as f64;
    u_grid
        .iter()
        .map(|&u| {
            let (re, im) = samples.iter().fold((0.0, 0.0), |(re, im), &z| {
                let (s, c) = (u * z).sin_cos();
                (re + c, im + s)
            });
            Complex64::new(re / m, im / m)
        })
        .collect()
}

/// `sup_x |F_M(x) - F(x)|` between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LltCase {
    /// `⌊b_n x⌋` lies in the residue class `Z_n` occupies.
    Positive,
    /// `P(Z_n = ⌊b_n x⌋) = 0`; the estimate uses the nearest admissible point.
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMassEstimate {
    pub case: LltCase,
    pub floor_point: i64,
    /// Frequency of `Z_n = ⌊b_n x⌋`.
    pub floor_frequency: f64,
    /// Admissible lattice point nearest `b_n x`; equals `floor_point` in the
    /// positive case.
    pub target_point: i64,
    /// `(b_n/d0)·P̂(Z_n = target_point)`, an estimate of the limit density at `x`.
    pub estimate: Estimate,
}

/// Lattice local-limit estimator of the limit density at `x`.
pub fn lattice_point_mass(
    z_samples: &[i64],
    n: u64,
    beta: f64,
    x: f64,
    span: LatticeSpan,
) -> Result<PointMassEstimate> {
    if z_samples.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    if n < 2 {
        return Err(Error::Degenerate(format!("b_n needs n ≥ 2, got {n}")));
    }
    if span.d0 == 0 {
        return Err(Error::InvalidArgument(
            "lattice span must be positive".into(),
        ));
    }
    let b = bn(n, beta);
    let centre = b * x;
    let floor_point = centre.floor() as i64;
    let d0 = span.d0 as i128;
    let offset = (floor_point as i128 - span.residue(n) as i128).rem_euclid(d0);
    let (case, target_point) = if offset == 0 {
        (LltCase::Positive, floor_point)
    } else {
        let lower = (floor_point as i128 - offset) as i64;
        let upper = lower + span.d0 as i64;
        let pick = if (upper as f64 - centre).abs() < (centre - lower as f64).abs() {
            upper
        } else {
            lower
        };
        (LltCase::Vanishing, pick)
    };
    let m = z_samples.len() as f64;
    let freq = |p: i64| z_samples.iter().filter(|&&z| z == p).count() as f64 / m;
    let p = freq(target_point);
    let scale = b / span.d0 as f64;
    Ok(PointMassEstimate {
        case,
        floor_point,
        floor_frequency: freq(floor_point),
        target_point,
        estimate: Estimate {
            value: scale * p,
            stderr: scale * (p * (1.0 - p) / m).sqrt(),
        },
    })
}

/// Fraction of samples in the residue class admissible at time `n`.
pub fn admissible_fraction(z_samples: &[i64], n: u64, span: LatticeSpan) -> f64 {
    let hits = z_samples.iter().filter(|&&z| span.admits(n, z)).count();
    hits as f64 / z_samples.len() as f64
}

/// Nonlattice local-limit estimator `b_n P̂(Z_n ∈ [b_n x + a, b_n x + b]) / (b - a)`.
pub fn interval_mass(
    z_samples: &[f64],
    n: u64,
    beta: f64,
    x: f64,
    a: f64,
    b: f64,
) -> Result<Estimate> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "need a < b, got [{a}, {b}]"
        )));
    }
    if z_samples.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    if n < 2 {
        return Err(Error::Degenerate(format!("b_n needs n ≥ 2, got {n}")));
    }
    let scale = bn(n, beta);
    let (lo, hi) = (scale * x + a, scale * x + b);
    let m = z_samples.len() as f64;
    let p = z_samples.iter().filter(|&&z| lo <= z && z <= hi).count() as f64 / m;
    let k = scale / (b - a);
    Ok(Estimate {
        value: k * p,
        stderr: k * (p * (1.0 - p) / m).sqrt(),
    })
}

/// Largest enumeration the exact oracle accepts.
pub const ORACLE_GUARD: f64 = 1e8;

/// Exact law of `Z_n` for a walk with finite step support and a finite
/// scenery, by enumerating step sequences and the scenery values on the
/// visited sites.
pub fn exact_small_oracle(
    walk: &WalkModel,
    scenery: &SceneryModel,
    n: usize,
) -> Result<BTreeMap<i64, f64>> {
    let steps = walk.finite_support().ok_or_else(|| {
        Error::InvalidArgument(format!("walk {} has infinite support", walk.label))
    })?;
    let atoms = scenery.finite_atoms().ok_or_else(|| {
        Error::InvalidArgument(format!("scenery {} has infinite support", scenery.name))
    })?;
    if n == 0 || n > 12 {
        return Err(Error::InvalidArgument(format!(
            "oracle needs 1 ≤ n ≤ 12, got {n}"
        )));
    }
    let terms = (steps.len() as f64).powi(n as i32 - 1) * (atoms.len() as f64).powi(n as i32);
    if terms > ORACLE_GUARD {
        return Err(Error::Explosion {
            terms,
            guard: ORACLE_GUARD,
        });
    }

    struct Enum<'a> {
        steps: &'a [(Point, f64)],
        atoms: &'a [(i64, f64)],
        n: usize,
        path: Vec<Point>,
        pmf: BTreeMap<i64, f64>,
    }

    impl Enum<'_> {
        fn walk(&mut self, weight: f64) {
            if self.path.len() == self.n {
                self.scenery(weight);
                return;
            }
            let last = *self.path.last().unwrap();
            for i in 0..self.steps.len() {
                let (step, p) = self.steps[i];
                self.path.push(last.add(step));
                self.walk(weight * p);
                self.path.pop();
            }
        }

        fn scenery(&mut self, weight: f64) {
            let mut sites: Vec<(Point, i64)> = Vec::new();
            for &s in &self.path {
                match sites.iter_mut().find(|e| e.0 == s) {
                    Some(e) => e.1 += 1,
                    None => sites.push((s, 1)),
                }
            }
            let mut digits = vec![0usize; sites.len()];
            loop {
                let mut w = weight;
                let mut z = 0i64;
                for (d, &(_, count)) in digits.iter().zip(&sites) {
                    let (v, p) = self.atoms[*d];
                    w *= p;
                    z += v * count;
                }
                *self.pmf.entry(z).or_insert(0.0) += w;
                let mut j = 0;
                loop {
                    if j == digits.len() {
                        return;
                    }
                    digits[j] += 1;
                    if digits[j] < self.atoms.len() {
                        break;
                    }
                    digits[j] = 0;
                    j += 1;
                }
            }
        }
    }

    let mut e = Enum {
        steps: &steps,
        atoms: &atoms,
        n,
        path: vec![Point::ORIGIN],
        pmf: BTreeMap::new(),
    };
    e.walk(1.0);
    Ok(e.pmf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_stream, StreamRole};
    use crate::scenery::builtin_scenery;
    use crate::walk::{builtin_model, simulate, Dim};
    use rand_distr::{Distribution, StandardNormal};
    use statrs::distribution::{ContinuousCDF, Normal};

    fn frozen(n: usize, checkpoints: &[usize]) -> LocalTimeField {
        let mut b = LocalTimeField::builder(n, checkpoints);
        for k in 0..n {
            b.visit(k, 0);
        }
        b.finish()
    }

    #[test]
    fn v_beta_examples() {
        assert_eq!(v_beta(&frozen(9, &[]), 2.0), 81.0);
        let f = LocalTimeField::from_counts([(1, 2), (2, 1)]);
        assert!((v_beta(&f, 0.5) - (2f64.sqrt() + 1.0)).abs() < 1e-15);
        assert_eq!(v_beta(&f, 1.0), 3.0);
        assert_eq!(f.n(), 3);
    }

    #[test]
    fn l_stat_trivial_cases() {
        let model = builtin_model("srw2d").unwrap();
        let mut rng = trial_stream(1, 0, StreamRole::Walk);
        let n = 1000;
        let path = simulate(&model, n, &[n], &mut rng).unwrap();
        let r = l_stat(&path.local_time, &[1.0], 1.0).unwrap();
        assert_eq!(r.l_value, 1.0);
        assert_eq!(r.l_signed_value, 1.0);
        assert_eq!(r.times, vec![1.0]);
        let r = l_stat(&path.local_time, &[-2.0], 1.0).unwrap();
        assert_eq!(r.l_value, 2.0);
        assert_eq!(r.l_signed_value, -2.0);
    }

    #[test]
    fn l_stat_rejects_bad_input() {
        let f = frozen(10, &[5, 10]);
        assert!(l_stat(&f, &[1.0], 1.0).is_err());
        assert!(l_stat(&f, &[1.0, 1.0], 0.0).is_err());
        assert!(matches!(
            l_stat(&frozen(1, &[1]), &[1.0], 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn l_stat_frozen_increments() {
        // One site, increments 4 and 6: |θ1·4 + θ2·6|^γ.
        let f = frozen(10, &[4, 10]);
        let r = l_stat(&f, &[1.0, -1.0], 2.0).unwrap();
        let norm = 10.0 * 10f64.ln();
        assert!((r.l_value - 4.0 / norm).abs() < 1e-15);
        assert!((r.l_signed_value + 4.0 / norm).abs() < 1e-15);
        assert_eq!(r.v_value, 100.0);
    }

    #[test]
    fn l_stat_exact_cancellation_is_zero() {
        // increments 2, 2, 3: 0.7·2 − 1.3·2 + 0.4·3 = 0, which rounds to ~1e-16
        let f = frozen(7, &[2, 4, 7]);
        for gamma in [0.25, 0.5, 1.0] {
            let r = l_stat(&f, &[0.7, -1.3, 0.4], gamma).unwrap();
            assert_eq!(r.l_value, 0.0);
            assert_eq!(r.l_signed_value, 0.0);
        }
    }

    #[test]
    fn limit_formula() {
        let (l, s) = l_stat_limit(2.0, 1.0, &[1.0], &[1.0]);
        assert!((l - 2.0 / PI).abs() < 1e-13 && (s - l).abs() < 1e-15);
        let (l, s) = l_stat_limit(1.0, 0.5, &[2.0, -1.0], &[0.5, 1.0]);
        assert!((l - 1.5).abs() < 1e-13 && (s - 0.5).abs() < 1e-13);
    }

    #[test]
    fn omega_examples() {
        let w = omega_indicator(&frozen(100, &[]), 0.5, 2.0).unwrap();
        assert!(!w.holds);
        assert_eq!(w.max_ratio, 10.0);
        assert!(omega_indicator(&frozen(10, &[]), 0.5, 2.0).is_err());
        assert!(omega_indicator(&frozen(100, &[]), 1.0, 2.0).is_err());

        let model = builtin_model("srw2d").unwrap();
        let mut rng = trial_stream(4, 0, StreamRole::Walk);
        let path = simulate(&model, 100_000, &[], &mut rng).unwrap();
        let w = omega_indicator(&path.local_time, 0.5, 1.0).unwrap();
        if w.holds {
            assert_eq!(w.v_lower_ok, Some(true));
        }
    }

    #[test]
    fn empirical_cf_examples() {
        let z = empirical_cf(&[0.0; 5], &[0.3, 2.0]);
        assert!(z.iter().all(|c| *c == Complex64::new(1.0, 0.0)));
        let z = empirical_cf(&[1.0, -1.0], &[0.7]);
        assert!((z[0].re - 0.7f64.cos()).abs() < 1e-15 && z[0].im.abs() < 1e-15);

        let mut rng = trial_stream(3, 0, StreamRole::Sampler);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let z = empirical_cf(&xs, &[1.0]);
        assert!((z[0] - Complex64::new((-0.5f64).exp(), 0.0)).norm() < 0.004);
    }

    #[test]
    fn ks_examples() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let m = 200;
        let xs: Vec<f64> = (1..=m)
            .map(|i| normal.inverse_cdf(i as f64 / (m + 1) as f64))
            .collect();
        assert!(ks_distance(&xs, |x| normal.cdf(x)) <= 1.0 / (m + 1) as f64 + 1e-12);
        assert_eq!(ks_distance(&[0.0], |x| normal.cdf(x)), 0.5);

        let mut rng = trial_stream(5, 0, StreamRole::Sampler);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        assert!(ks_distance(&xs, |x| normal.cdf(x)) < 0.006);
    }

    #[test]
    fn point_mass_cases() {
        let span = builtin_scenery("rademacher").unwrap().span().unwrap();
        // n = 101 is odd, so Z_n is odd; x = 0 targets the even point 0.
        let samples = [1i64, -1, 3, 1];
        let r = lattice_point_mass(&samples, 101, 2.0, 0.0, span).unwrap();
        assert_eq!(r.case, LltCase::Vanishing);
        assert_eq!(r.floor_frequency, 0.0);
        assert_eq!(r.target_point.abs(), 1);

        // Exact law at n = 3 fed as proportions: P(Z_3 = 3) = 3/16.
        let mut samples = vec![3i64; 3];
        samples.extend(std::iter::repeat_n(1, 13));
        let b3 = bn(3, 2.0);
        let r = lattice_point_mass(&samples, 3, 2.0, 3.0 / b3 + 1e-9, span).unwrap();
        assert_eq!(r.case, LltCase::Positive);
        assert_eq!(r.target_point, 3);
        assert!((r.estimate.value - b3 / 2.0 * 3.0 / 16.0).abs() < 1e-15);
        assert_eq!(admissible_fraction(&samples, 3, span), 1.0);
        assert!(lattice_point_mass(&[], 3, 2.0, 0.0, span).is_err());
    }

    #[test]
    fn interval_mass_rejects_empty_interval() {
        assert!(interval_mass(&[0.0], 100, 2.0, 0.0, 1.0, 1.0).is_err());
        let e = interval_mass(&[0.0, 100.0], 100, 2.0, 0.0, -1.0, 1.0).unwrap();
        assert!((e.value - bn(100, 2.0) / 4.0).abs() < 1e-12);
    }

    fn srw1d_rademacher(n: usize) -> BTreeMap<i64, f64> {
        exact_small_oracle(
            &builtin_model("srw1d").unwrap(),
            &builtin_scenery("rademacher").unwrap(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(srw1d_rademacher(1), BTreeMap::from([(-1, 0.5), (1, 0.5)]));
        assert_eq!(
            srw1d_rademacher(2),
            BTreeMap::from([(-2, 0.25), (0, 0.5), (2, 0.25)])
        );
        assert!((srw1d_rademacher(3)[&3] - 3.0 / 16.0).abs() < 1e-15);
        for n in 1..=10 {
            let total: f64 = srw1d_rademacher(n).values().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_guard() {
        let walk = builtin_model("lazy2d").unwrap();
        let sc = builtin_scenery("rademacher").unwrap();
        assert!(matches!(
            exact_small_oracle(&walk, &sc, 12),
            Err(Error::Explosion { .. })
        ));
        assert!(exact_small_oracle(&builtin_model("cauchy1d").unwrap(), &sc, 3).is_err());
        assert!(exact_small_oracle(&walk, &builtin_scenery("gaussian").unwrap(), 3).is_err());
    }

    #[test]
    fn frozen_oracle_concentrates() {
        let sc = SceneryModel::finite("pm3", vec![(-3, 0.5), (3, 0.5)]).unwrap();
        let pmf = exact_small_oracle(&crate::walk::WalkModel::frozen(Dim::Two), &sc, 4).unwrap();
        assert_eq!(pmf, BTreeMap::from([(-12, 0.5), (12, 0.5)]));
    }
}
