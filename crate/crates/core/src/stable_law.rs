//! Strictly stable laws with characteristic function
//! `φ(u) = exp(-|u|^β (A1 + i A2 sgn u))`, and the limit law of the
//! normalized process.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng::open01;

/// Relative slack on the skewness constraint, absorbing rounding in `tan`.
const SKEW_SLACK: f64 = 1e-12;
const MAX_PIECES: usize = 400_000;
const TABLE_PIECES: usize = 20_000;

/// Parameters `(β, A1, A2)` of a strictly stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub beta: f64,
    pub a1: f64,
    pub a2: f64,
}

impl StableParams {
    pub fn new(beta: f64, a1: f64, a2: f64) -> Result<Self> {
        let p = StableParams { beta, a1, a2 };
        p.validate()?;
        Ok(p)
    }

    /// Standard Gaussian: `β = 2`, `A1 = 1/2`.
    pub fn standard_normal() -> Self {
        StableParams {
            beta: 2.0,
            a1: 0.5,
            a2: 0.0,
        }
    }

    /// Standard Cauchy: `β = 1`, `A1 = 1`.
    pub fn standard_cauchy() -> Self {
        StableParams {
            beta: 1.0,
            a1: 1.0,
            a2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let StableParams { beta, a1, a2 } = *self;
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::Domain(format!(
                "stability index β = {beta} not in (0, 2]"
            )));
        }
        if !(a1 > 0.0 && a1.is_finite()) {
            return Err(Error::Domain(format!(
                "scale A1 = {a1} must be positive and finite"
            )));
        }
        if !a2.is_finite() {
            return Err(Error::Domain(format!(
                "skew coefficient A2 = {a2} is not finite"
            )));
        }
        if beta == 2.0 {
            if a2 != 0.0 {
                return Err(Error::Domain(format!("A2 = {a2} must vanish when β = 2")));
            }
        } else if beta != 1.0 {
            let bound = (FRAC_PI_2 * beta).tan().abs();
            if (a2 / a1).abs() > bound * (1.0 + SKEW_SLACK) {
                return Err(Error::Domain(format!(
                    "|A2/A1| = {} exceeds |tan(πβ/2)| = {bound}",
                    (a2 / a1).abs()
                )));
            }
        }
        Ok(())
    }

    /// Characteristic function at `u`.
    pub fn cf(&self, u: f64) -> Complex64 {
        if u == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let m = u.abs().powf(self.beta);
        let s = u.signum();
        Complex64::new(-m * self.a1, -m * self.a2 * s).exp()
    }

    pub fn sampler(&self) -> StableSampler {
        StableSampler::new(*self)
    }

    /// One draw. Prefer [`StableParams::sampler`] in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    /// Scale parameter `σ = A1^{1/β}`.
    pub fn sigma(&self) -> f64 {
        self.a1.powf(1.0 / self.beta)
    }

    /// Variance when it exists (`β = 2`).
    pub fn variance(&self) -> Option<f64> {
        (self.beta == 2.0).then(|| 2.0 * self.a1)
    }

    /// Upper bound on `∫_U^∞ exp(-A1 u^β) du`.
    fn cf_tail_bound(&self, cutoff: f64) -> f64 {
        let s = 1.0 / self.beta;
        let v = self.a1 * cutoff.powf(self.beta);
        let gamma_tail = if s <= 1.0 {
            v.powf(s - 1.0) * (-v).exp()
        } else if v > s - 1.0 {
            v.powf(s - 1.0) * (-v).exp() / (1.0 - (s - 1.0) / v)
        } else {
            f64::INFINITY
        };
        s * self.a1.powf(-s) * gamma_tail
    }

    /// Truncation point for the inversion integrals, starting from
    /// `(ln(1/tol)/A1)^{1/β}` and widened until the discarded tail is below
    /// `tail_budget`. `divide_by_cutoff` accounts for a `1/u` factor.
    fn cutoff(&self, tol: f64, tail_budget: f64, divide_by_cutoff: bool) -> Result<f64> {
        let mut cutoff = ((1.0 / tol).ln().max(1.0) / self.a1).powf(1.0 / self.beta);
        for _ in 0..200 {
            let mut bound = self.cf_tail_bound(cutoff) / PI;
            if divide_by_cutoff {
                bound /= cutoff;
            }
            if bound <= tail_budget {
                return Ok(cutoff);
            }
            cutoff *= 1.25;
        }
        Err(Error::Quadrature {
            tol,
            estimate: f64::INFINITY,
        })
    }

    fn pieces(&self, cutoff: f64, x: f64) -> Result<usize> {
        let phase_rate =
            x.abs() + self.a2.abs() * self.beta * cutoff.powf(self.beta - 1.0).max(1.0);
        let half_periods = (cutoff * (phase_rate + 1.0) / PI).ceil() + 4.0;
        if half_periods > MAX_PIECES as f64 {
            return Err(Error::Quadrature {
                tol: 0.0,
                estimate: f64::INFINITY,
            });
        }
        Ok(half_periods as usize)
    }

    /// Density by Fourier inversion,
    /// `f(x) = (1/π) ∫_0^∞ exp(-A1 u^β) cos(ux + A2 u^β) du`,
    /// with absolute error at most `tol`. The raw quadrature value is
    /// returned, so it may dip below zero by up to `tol`.
    pub fn density(&self, x: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {tol} must be positive"
            )));
        }
        let cutoff = self.cutoff(tol, tol / 4.0, false)?;
        let pieces = self.pieces(cutoff, x).map_err(|_| Error::Quadrature {
            tol,
            estimate: f64::INFINITY,
        })?;
        let StableParams { beta, a1, a2 } = *self;
        let integral = quadrature::integrate(
            |u| {
                let p = u.powf(beta);
                (-a1 * p).exp() * (u * x + a2 * p).cos()
            },
            0.0,
            cutoff,
            0.5 * PI * tol,
            pieces,
            pieces * 16 + 4096,
        )
        .map_err(|e| match e {
            Error::Quadrature { estimate, .. } => Error::Quadrature {
                tol,
                estimate: estimate / PI,
            },
            other => other,
        })?;
        Ok(integral.value / PI)
    }

    /// Distribution function by Gil-Pelaez inversion,
    /// `F(x) = 1/2 + (1/π) ∫_0^∞ exp(-A1 u^β) sin(ux + A2 u^β) / u du`.
    pub fn cdf(&self, x: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {tol} must be positive"
            )));
        }
        let cutoff = self.cutoff(tol, tol / 4.0, true)?;
        let pieces = self.pieces(cutoff, x).map_err(|_| Error::Quadrature {
            tol,
            estimate: f64::INFINITY,
        })?;
        let StableParams { beta, a1, a2 } = *self;
        let integral = quadrature::integrate(
            |u| {
                let p = u.powf(beta);
                (-a1 * p).exp() * (u * x + a2 * p).sin() / u
            },
            0.0,
            cutoff,
            0.5 * PI * tol,
            pieces,
            pieces * 16 + 8192,
        )?;
        Ok((0.5 + integral.value / PI).clamp(0.0, 1.0))
    }
}

/// Chambers–Mallows–Stuck sampler with the constants precomputed.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    params: StableParams,
    kind: SamplerKind,
}

#[derive(Debug, Clone, Copy)]
enum SamplerKind {
    Gaussian {
        sd: f64,
    },
    /// `A1 tan(π(U - 1/2)) - A2`
    Cauchy,
    General {
        sigma: f64,
        shift: f64,
        scale: f64,
    },
}

impl StableSampler {
    pub fn new(params: StableParams) -> Self {
        let StableParams { beta, a1, a2 } = params;
        let kind = if beta == 2.0 {
            SamplerKind::Gaussian {
                sd: (2.0 * a1).sqrt(),
            }
        } else if beta == 1.0 {
            SamplerKind::Cauchy
        } else {
            // exp(-σ^β|u|^β (1 - iκ sgn(u) tan(πβ/2))) with σ^β = A1 and
            // κ = -A2 / (A1 tan(πβ/2)).
            let t = (FRAC_PI_2 * beta).tan();
            let kappa = (-a2 / (a1 * t)).clamp(-1.0, 1.0);
            let kt = kappa * t;
            SamplerKind::General {
                sigma: a1.powf(1.0 / beta),
                shift: kt.atan() / beta,
                scale: (1.0 + kt * kt).powf(0.5 / beta),
            }
        };
        StableSampler { params, kind }
    }

    pub fn params(&self) -> StableParams {
        self.params
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            SamplerKind::Gaussian { sd } => {
                let z: f64 = rng.sample(StandardNormal);
                sd * z
            }
            SamplerKind::Cauchy => {
                let u = open01(rng.next_u64());
                self.params.a1 * (PI * (u - 0.5)).tan() - self.params.a2
            }
            SamplerKind::General {
                sigma,
                shift,
                scale,
            } => {
                let beta = self.params.beta;
                let v = PI * (open01(rng.next_u64()) - 0.5);
                let w = -open01(rng.next_u64()).ln();
                let bv = beta * (v + shift);
                let x = scale * bv.sin() / v.cos().powf(1.0 / beta)
                    * ((v - bv).cos() / w).powf((1.0 - beta) / beta);
                sigma * x
            }
        }
    }
}

/// `(Γ(β+1) / (πA)^{β-1})^{1/β}`, the constant multiplying `Y(t)` in the
/// limit process.
pub fn limit_constant(beta: f64, a: f64) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    let g = statrs::function::gamma::gamma(beta + 1.0);
    (g / (PI * a).powf(beta - 1.0)).powf(1.0 / beta)
}

/// Law of `c·Y(1)` where `Y(1)` has the base stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLaw {
    pub base: StableParams,
    pub scale_c: f64,
}

impl LimitLaw {
    /// Limit law for a walk with normalization constant `a`.
    pub fn for_walk(base: StableParams, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!(
                "walk constant A = {a} must be positive"
            )));
        }
        Self::with_scale(base, limit_constant(base.beta, a))
    }

    pub fn with_scale(base: StableParams, scale_c: f64) -> Result<Self> {
        base.validate()?;
        if !(scale_c > 0.0 && scale_c.is_finite()) {
            return Err(Error::Domain(format!(
                "scale c = {scale_c} must be positive"
            )));
        }
        Ok(LimitLaw { base, scale_c })
    }

    pub fn cf(&self, u: f64) -> Complex64 {
        self.base.cf(self.scale_c * u)
    }

    /// The limit density `C(x) = f(x/c)/c`, absolute error at most `tol`.
    pub fn density(&self, x: f64, tol: f64) -> Result<f64> {
        let c = self.scale_c;
        Ok(self.base.density(x / c, tol * c)? / c)
    }

    pub fn cdf(&self, x: f64, tol: f64) -> Result<f64> {
        self.base.cdf(x / self.scale_c, tol)
    }

    pub fn variance(&self) -> Option<f64> {
        self.base
            .variance()
            .map(|v| v * self.scale_c * self.scale_c)
    }

    /// Limit of `E exp(i Σ θ_i (Z_{[nt_i]} - Z_{[nt_{i-1}]}) / b_n)` with
    /// `t_0 = 0`: the product `Π φ(θ_i (t_i - t_{i-1})^{1/β} c)`.
    pub fn fdd_cf(&self, thetas: &[f64], times: &[f64]) -> Complex64 {
        let inv_beta = 1.0 / self.base.beta;
        let mut prev = 0.0;
        let mut out = Complex64::new(1.0, 0.0);
        for (&theta, &t) in thetas.iter().zip(times) {
            out *= self
                .base
                .cf(theta * (t - prev).powf(inv_beta) * self.scale_c);
            prev = t;
        }
        out
    }

    /// The same law with the time horizon scaled: `c·Y(t)`.
    pub fn at_time(&self, t: f64) -> Result<LimitLaw> {
        LimitLaw::with_scale(self.base, self.scale_c * t.powf(1.0 / self.base.beta))
    }
}

/// Distribution function tabulated on a `sinh`-spaced grid and linearly
/// interpolated; beyond the grid the tail is extrapolated as a Pareto tail of
/// index β.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    unit: f64,
    s_max: f64,
    ds: f64,
    values: Vec<f64>,
    beta: f64,
}

impl TabulatedCdf {
    pub fn new(law: LimitLaw, points: usize, tol: f64) -> Result<Self> {
        let points = points.max(3) | 1;
        let beta = law.base.beta;
        let unit = law.base.sigma() * law.scale_c;
        let half_width = if beta == 2.0 {
            9.0
        } else {
            // Keep each inversion within TABLE_PIECES half-oscillations;
            // the Pareto extrapolation covers the rest of the tail.
            let sigma = law.base.sigma();
            let reach = TABLE_PIECES as f64 * PI / (law.base.cutoff(tol, tol / 4.0, true)? * sigma);
            400f64.powf(1.0 / beta).min(1e4).min(reach)
        };
        let s_max = half_width.asinh();
        let ds = 2.0 * s_max / (points - 1) as f64;
        let values = (0..points)
            .map(|i| {
                let s = -s_max + ds * i as f64;
                law.cdf(unit * s.sinh(), tol)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = values;
        // Quadrature noise can break monotonicity at the 1e-9 level.
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        Ok(TabulatedCdf {
            unit,
            s_max,
            ds,
            values,
            beta,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = (x / self.unit).asinh();
        let last = self.values.len() - 1;
        if s <= -self.s_max {
            let edge = self.unit * (-self.s_max).sinh();
            return self.values[0] * (edge / x).abs().powf(self.beta);
        }
        if s >= self.s_max {
            let edge = self.unit * self.s_max.sinh();
            return 1.0 - (1.0 - self.values[last]) * (edge / x).abs().powf(self.beta);
        }
        let pos = (s + self.s_max) / self.ds;
        let i = (pos.floor() as usize).min(last - 1);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}
