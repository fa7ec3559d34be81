//! Lattice random walks in the critical regime `α = d`.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::open01;
use crate::statistics::LocalTimeField;

/// A point of `Z^d`; `y` is always 0 in dimension one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    #[inline(always)]
    pub fn add(self, other: Point) -> Point {
        Point {
            x: self.x + other.x,
            y: self.y + other.y,
        }
    }

    /// Packed 64-bit site code: `x` in dimension one, `x·2^32 + y` in
    /// dimension two (wrapping). The packing is additive, so the code of
    /// `S_{k+1}` is the code of `S_k` plus the code of the step; it is
    /// injective while `|y| < 2^31`.
    #[inline(always)]
    pub fn code(self, dim: Dim) -> u64 {
        match dim {
            Dim::One => self.x as u64,
            Dim::Two => (self.x.wrapping_shl(32)).wrapping_add(self.y) as u64,
        }
    }

    pub fn from_code(code: u64, dim: Dim) -> Point {
        match dim {
            Dim::One => Point::new(code as i64, 0),
            Dim::Two => {
                let y = code as u32 as i32 as i64;
                Point::new((code as i64).wrapping_sub(y) >> 32, y)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn get(self) -> u32 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Finite step table sampled by inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTable {
    steps: Vec<Point>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepTable {
    pub fn new(entries: Vec<(Point, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty step table".into()));
        }
        if entries.iter().any(|(_, p)| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument(
                "step probabilities must be non-negative".into(),
            ));
        }
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "step probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(entries.len());
        for (_, p) in &entries {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let (steps, probs) = entries.into_iter().unzip();
        Ok(StepTable {
            steps,
            probs,
            cumulative,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.steps.iter().copied().zip(self.probs.iter().copied())
    }

    #[inline]
    fn invert(&self, u: f64) -> Point {
        let i = self.cumulative.partition_point(|&c| c < u);
        self.steps[i.min(self.steps.len() - 1)]
    }
}

/// The step distribution of a walk.
#[derive(Debug, Clone, PartialEq)]
pub enum StepLaw {
    /// Uniform on `{±e1, ±e2}`.
    Srw2d,
    /// Stay with probability 1/2, otherwise uniform on `{±e1, ±e2}`.
    Lazy2d,
    /// Uniform on `{±1}`.
    Srw1d,
    /// `P(X = k) ∝ 1/(1 + k²)` on `Z`.
    DiscreteCauchy,
    Table(StepTable),
}

/// A walk model: its step law and, in the critical regime, the constant `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkModel {
    pub label: String,
    pub dim: Dim,
    pub law: StepLaw,
    constant: Option<f64>,
}

/// Names accepted by [`builtin_model`].
pub const BUILTIN_WALKS: [&str; 4] = ["srw2d", "lazy2d", "cauchy1d", "srw1d"];

/// Built-in walks. `srw1d` is not critical (it has no constant `A`) and
/// exists for exact small-instance checks.
pub fn builtin_model(name: &str) -> Result<WalkModel> {
    let model = match name {
        "srw2d" => WalkModel {
            label: name.into(),
            dim: Dim::Two,
            law: StepLaw::Srw2d,
            // Σ = diag(1/2, 1/2), A = 2 sqrt(det Σ)
            constant: Some(1.0),
        },
        "lazy2d" => WalkModel {
            label: name.into(),
            dim: Dim::Two,
            law: StepLaw::Lazy2d,
            constant: Some(0.5),
        },
        "cauchy1d" => WalkModel {
            label: name.into(),
            dim: Dim::One,
            law: StepLaw::DiscreteCauchy,
            constant: Some(PI.tanh()),
        },
        "srw1d" => WalkModel {
            label: name.into(),
            dim: Dim::One,
            law: StepLaw::Srw1d,
            constant: None,
        },
        other => return Err(Error::UnknownWalk(other.into())),
    };
    Ok(model)
}

impl WalkModel {
    /// Walk with a finite step table. In dimension two a centred table with
    /// invertible covariance gets `A = 2 sqrt(det Σ)`; finite tables in
    /// dimension one have finite variance and are not critical.
    pub fn from_table(label: &str, dim: Dim, entries: Vec<(Point, f64)>) -> Result<Self> {
        if dim == Dim::One && entries.iter().any(|(p, _)| p.y != 0) {
            return Err(Error::InvalidArgument(
                "one-dimensional step with y ≠ 0".into(),
            ));
        }
        let table = StepTable::new(entries)?;
        let constant = match dim {
            Dim::One => None,
            Dim::Two => {
                let (mut mx, mut my) = (0.0, 0.0);
                for (p, w) in table.entries() {
                    mx += w * p.x as f64;
                    my += w * p.y as f64;
                }
                let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
                for (p, w) in table.entries() {
                    let (dx, dy) = (p.x as f64 - mx, p.y as f64 - my);
                    sxx += w * dx * dx;
                    syy += w * dy * dy;
                    sxy += w * dx * dy;
                }
                let det = sxx * syy - sxy * sxy;
                let centred = mx.abs() < 1e-12 && my.abs() < 1e-12;
                (centred && det > 1e-12).then(|| 2.0 * det.sqrt())
            }
        };
        Ok(WalkModel {
            label: label.into(),
            dim,
            law: StepLaw::Table(table),
            constant,
        })
    }

    /// The walk that never moves. Useful for exact checks.
    pub fn frozen(dim: Dim) -> Self {
        WalkModel::from_table("frozen", dim, vec![(Point::ORIGIN, 1.0)])
            .expect("single-entry table is valid")
    }

    /// Normalization constant `A` of the critical regime.
    pub fn a(&self) -> Result<f64> {
        self.constant
            .ok_or_else(|| Error::NotCritical(self.label.clone()))
    }

    pub fn is_critical(&self) -> bool {
        self.constant.is_some()
    }

    /// Finite step support with probabilities, if the law has one.
    pub fn finite_support(&self) -> Option<Vec<(Point, f64)>> {
        let axes = [
            Point::new(1, 0),
            Point::new(-1, 0),
            Point::new(0, 1),
            Point::new(0, -1),
        ];
        match &self.law {
            StepLaw::Srw2d => Some(axes.iter().map(|&p| (p, 0.25)).collect()),
            StepLaw::Lazy2d => {
                let mut v: Vec<_> = axes.iter().map(|&p| (p, 0.125)).collect();
                v.push((Point::ORIGIN, 0.5));
                Some(v)
            }
            StepLaw::Srw1d => Some(vec![(Point::new(1, 0), 0.5), (Point::new(-1, 0), 0.5)]),
            StepLaw::DiscreteCauchy => None,
            StepLaw::Table(t) => Some(t.entries().collect()),
        }
    }

    /// One step drawn from the model (convenience; loops should use
    /// [`WalkModel::with_steps`]).
    pub fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        struct One<'r, R: ?Sized>(&'r mut R);
        impl<R: Rng + ?Sized> WithSteps for One<'_, R> {
            type Output = Point;
            fn run<S: StepDraw>(self, mut steps: S) -> Point {
                steps.draw(self.0)
            }
        }
        self.with_steps(One(rng))
    }

    /// Runs `visitor` with a step sampler specialised to this model's law.
    pub fn with_steps<V: WithSteps>(&self, visitor: V) -> V::Output {
        match &self.law {
            StepLaw::Srw2d => visitor.run(Srw2dSteps::default()),
            StepLaw::Lazy2d => visitor.run(Lazy2dSteps::default()),
            StepLaw::Srw1d => visitor.run(Srw1dSteps::default()),
            StepLaw::DiscreteCauchy => visitor.run(DiscreteCauchySteps),
            StepLaw::Table(t) => visitor.run(TableSteps(t)),
        }
    }
}

/// Source of i.i.d. steps.
pub trait StepDraw {
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point;
}

/// Callback receiving a monomorphised step sampler.
pub trait WithSteps {
    type Output;
    fn run<S: StepDraw>(self, steps: S) -> Self::Output;
}

#[derive(Debug, Default)]
pub struct Srw2dSteps {
    bits: u64,
    left: u32,
}

impl StepDraw for Srw2dSteps {
    #[inline(always)]
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point {
        if self.left == 0 {
            self.bits = rng.next_u64();
            self.left = 32;
        }
        let b = self.bits & 3;
        self.bits >>= 2;
        self.left -= 1;
        match b {
            0 => Point::new(1, 0),
            1 => Point::new(-1, 0),
            2 => Point::new(0, 1),
            _ => Point::new(0, -1),
        }
    }
}

#[derive(Debug, Default)]
pub struct Lazy2dSteps {
    bits: u64,
    left: u32,
}

impl StepDraw for Lazy2dSteps {
    #[inline(always)]
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point {
        if self.left == 0 {
            self.bits = rng.next_u64();
            self.left = 21;
        }
        let b = self.bits & 7;
        self.bits >>= 3;
        self.left -= 1;
        match b {
            0 => Point::new(1, 0),
            1 => Point::new(-1, 0),
            2 => Point::new(0, 1),
            3 => Point::new(0, -1),
            _ => Point::ORIGIN,
        }
    }
}

#[derive(Debug, Default)]
pub struct Srw1dSteps {
    bits: u64,
    left: u32,
}

impl StepDraw for Srw1dSteps {
    #[inline(always)]
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point {
        if self.left == 0 {
            self.bits = rng.next_u64();
            self.left = 64;
        }
        let b = self.bits & 1;
        self.bits >>= 1;
        self.left -= 1;
        Point::new(if b == 0 { 1 } else { -1 }, 0)
    }
}

/// Exact sampler for `P(X = k) ∝ 1/(1 + k²)`.
///
/// Proposal: a standard Cauchy variable rounded to the nearest integer, whose
/// mass at `k` is `atan(k + 1/2) - atan(k - 1/2) = atan(1/(k² + 3/4))` over π.
/// The target/proposal ratio `1/((1 + k²) atan(1/(k² + 3/4)))` peaks at
/// `k = 0`, so accepting with probability `ratio(k)/ratio(0)` is exact over
/// the whole support.
#[derive(Debug, Default, Clone, Copy)]
pub struct DiscreteCauchySteps;

impl DiscreteCauchySteps {
    fn ratio(k: f64) -> f64 {
        let k2 = k * k;
        1.0 / ((1.0 + k2) * (1.0 / (k2 + 0.75)).atan())
    }
}

impl StepDraw for DiscreteCauchySteps {
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point {
        let peak = Self::ratio(0.0);
        loop {
            let y = (PI * (open01(rng.next_u64()) - 0.5)).tan();
            let k = y.round();
            // Beyond ±2^62 the step would not fit the coordinate type.
            if k.abs() > 4.6e18 {
                continue;
            }
            if open01(rng.next_u64()) * peak <= Self::ratio(k) {
                return Point::new(k as i64, 0);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TableSteps<'a>(&'a StepTable);

impl StepDraw for TableSteps<'_> {
    #[inline]
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Point {
        self.0.invert(open01(rng.next_u64()))
    }
}

/// Numerical estimate of the Cauchy scale of `S_n/n` for the `1/(1 + k²)`
/// walk, from the series for its characteristic function:
/// `n (1 - Re φ_X(t/n)) / |t|` at `n = 1000`, `t ∈ {1/2, 1}`, combined by
/// Richardson extrapolation to remove the `O(t/n)` bias.
pub fn discrete_cauchy_scale_oracle() -> f64 {
    const TERMS: u64 = 1_000_000;
    let k_max = TERMS as f64;
    // Σ_{k>K} 1/(1 + k²) by Euler–Maclaurin.
    let tail = (1.0 / k_max).atan() - 0.5 / (1.0 + k_max * k_max)
        + (2.0 * k_max) / (12.0 * (1.0 + k_max * k_max).powi(2));
    let mut norm = 0.0;
    for k in (1..=TERMS).rev() {
        norm += 1.0 / (1.0 + (k * k) as f64);
    }
    let norm = 1.0 + 2.0 * (norm + tail);
    let one_minus_phi = |s: f64| {
        let mut acc = 0.0;
        for k in (1..=TERMS).rev() {
            let half = 0.5 * s * k as f64;
            acc += 2.0 * half.sin().powi(2) / (1.0 + (k * k) as f64);
        }
        // The oscillating part of the tail is O(1/(K² s)).
        2.0 * (acc + tail) / norm
    };
    let n = 1000.0;
    let g = |t: f64| n * one_minus_phi(t / n) / t;
    2.0 * g(0.5) - g(1.0)
}

/// A simulated path: local times of `S_0, …, S_{n-1}` (the endpoint `S_n`
/// is not counted), the visit sequence, and positions at checkpoints.
#[derive(Debug, Clone)]
pub struct Path {
    pub n: usize,
    pub dim: Dim,
    pub checkpoints: Vec<usize>,
    /// `S_k` for each checkpoint index `k`.
    pub checkpoint_positions: Vec<Point>,
    /// Packed codes of `S_0, …, S_{n-1}`.
    pub visits: Vec<u64>,
    pub local_time: LocalTimeField,
}

/// Simulates `n` steps of `model`, recording local-time increments between
/// consecutive checkpoint indices (sorted, each at most `n`).
pub fn simulate<R: Rng + ?Sized>(
    model: &WalkModel,
    n: usize,
    checkpoints: &[usize],
    rng: &mut R,
) -> Result<Path> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "path length must be at least 1".into(),
        ));
    }
    if checkpoints.windows(2).any(|w| w[0] > w[1]) || checkpoints.iter().any(|&c| c > n) {
        return Err(Error::InvalidArgument(format!(
            "checkpoints {checkpoints:?} must be sorted and within [0, {n}]"
        )));
    }

    struct Sim<'a, R: ?Sized> {
        dim: Dim,
        n: usize,
        checkpoints: &'a [usize],
        rng: &'a mut R,
    }

    impl<R: Rng + ?Sized> WithSteps for Sim<'_, R> {
        type Output = Path;
        fn run<S: StepDraw>(self, mut steps: S) -> Path {
            let Sim {
                dim,
                n,
                checkpoints,
                rng,
            } = self;
            let mut builder = LocalTimeField::builder(n, checkpoints);
            let mut visits = Vec::with_capacity(n);
            let mut checkpoint_positions = Vec::with_capacity(checkpoints.len());
            let mut pending = checkpoints.iter().peekable();
            let mut pos = Point::ORIGIN;
            for k in 0..n {
                while pending.peek().is_some_and(|&&c| c == k) {
                    checkpoint_positions.push(pos);
                    pending.next();
                }
                let code = pos.code(dim);
                visits.push(code);
                builder.visit(k, code);
                if k + 1 < n || pending.peek().is_some() {
                    pos = pos.add(steps.draw(rng));
                }
            }
            while pending.next().is_some() {
                checkpoint_positions.push(pos);
            }
            Path {
                n,
                dim,
                checkpoints: checkpoints.to_vec(),
                checkpoint_positions,
                visits,
                local_time: builder.finish(),
            }
        }
    }

    Ok(model.with_steps(Sim {
        dim: model.dim,
        n,
        checkpoints,
        rng,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_stream, StreamRole};

    #[test]
    fn builtin_constants() {
        assert_eq!(builtin_model("srw2d").unwrap().a().unwrap(), 1.0);
        assert_eq!(builtin_model("lazy2d").unwrap().a().unwrap(), 0.5);
        let c = builtin_model("cauchy1d").unwrap().a().unwrap();
        assert!((c - 0.996_272_076_220_75).abs() < 1e-12);
        assert!(matches!(
            builtin_model("levy3d"),
            Err(Error::UnknownWalk(_))
        ));
        assert!(matches!(
            builtin_model("srw1d").unwrap().a(),
            Err(Error::NotCritical(_))
        ));
    }

    #[test]
    fn table_constants_match_builtins() {
        for name in ["srw2d", "lazy2d"] {
            let m = builtin_model(name).unwrap();
            let t = WalkModel::from_table(name, Dim::Two, m.finite_support().unwrap()).unwrap();
            assert!((t.a().unwrap() - m.a().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn cauchy_constant_agrees_with_series_oracle() {
        let oracle = discrete_cauchy_scale_oracle();
        let stored = builtin_model("cauchy1d").unwrap().a().unwrap();
        assert!(
            (oracle - stored).abs() < 1e-3,
            "oracle {oracle} vs {stored}"
        );
        assert!(
            (oracle - stored).abs() < 1e-5,
            "oracle {oracle} vs {stored}"
        );
    }

    #[test]
    fn site_codes_round_trip() {
        for p in [
            Point::new(-3, 7),
            Point::new(123_456, -99),
            Point::ORIGIN,
            Point::new(-5, -1),
        ] {
            assert_eq!(Point::from_code(p.code(Dim::Two), Dim::Two), p);
            let q = Point::new(1, -1);
            assert_eq!(
                p.code(Dim::Two).wrapping_add(q.code(Dim::Two)),
                p.add(q).code(Dim::Two)
            );
        }
        let p = Point::new(-(1 << 40), 0);
        assert_eq!(Point::from_code(p.code(Dim::One), Dim::One), p);
    }

    fn frequency(model: &WalkModel, target: Point, draws: usize) -> f64 {
        struct Count {
            target: Point,
            draws: usize,
            rng: rand_chacha::ChaCha8Rng,
        }
        impl WithSteps for Count {
            type Output = usize;
            fn run<S: StepDraw>(mut self, mut steps: S) -> usize {
                (0..self.draws)
                    .filter(|_| steps.draw(&mut self.rng) == self.target)
                    .count()
            }
        }
        let hits = model.with_steps(Count {
            target,
            draws,
            rng: trial_stream(5, 0, StreamRole::Walk),
        });
        hits as f64 / draws as f64
    }

    #[test]
    fn step_frequencies() {
        let m = 1_000_000;
        let f = frequency(&builtin_model("srw2d").unwrap(), Point::new(1, 0), m);
        assert!((0.248..=0.252).contains(&f), "{f}");
        let f = frequency(&builtin_model("lazy2d").unwrap(), Point::ORIGIN, m);
        assert!((0.497..=0.503).contains(&f), "{f}");
        // P(X = 0) = 1/(π coth π) = tanh(π)/π
        let f = frequency(&builtin_model("cauchy1d").unwrap(), Point::ORIGIN, m);
        assert!((f - PI.tanh() / PI).abs() < 0.002, "{f}");
    }

    #[test]
    fn discrete_cauchy_small_atoms() {
        let m = 1_000_000;
        let norm = PI / PI.tanh();
        for k in [1i64, -2, 5] {
            let f = frequency(&builtin_model("cauchy1d").unwrap(), Point::new(k, 0), m);
            let p = 1.0 / ((1 + k * k) as f64 * norm);
            let se = (p * (1.0 - p) / m as f64).sqrt();
            assert!((f - p).abs() < 5.0 * se, "k = {k}: {f} vs {p}");
        }
    }

    #[test]
    fn frozen_walk_stays_home() {
        let mut rng = trial_stream(1, 0, StreamRole::Walk);
        let path = simulate(&WalkModel::frozen(Dim::Two), 5, &[5], &mut rng).unwrap();
        assert_eq!(path.local_time.count(Point::ORIGIN.code(Dim::Two)), 5);
        assert_eq!(path.local_time.range(), 1);
        assert_eq!(path.checkpoint_positions, vec![Point::ORIGIN]);
    }

    #[test]
    fn single_step_counts_only_origin() {
        for name in BUILTIN_WALKS {
            let model = builtin_model(name).unwrap();
            let mut rng = trial_stream(2, 0, StreamRole::Walk);
            let path = simulate(&model, 1, &[], &mut rng).unwrap();
            assert_eq!(path.local_time.total(), 1);
            assert_eq!(path.local_time.range(), 1);
            assert_eq!(path.local_time.count(Point::ORIGIN.code(model.dim)), 1);
        }
    }

    #[test]
    fn simulate_rejects_bad_checkpoints() {
        let model = builtin_model("srw2d").unwrap();
        let mut rng = trial_stream(2, 0, StreamRole::Walk);
        assert!(simulate(&model, 10, &[5, 3], &mut rng).is_err());
        assert!(simulate(&model, 10, &[11], &mut rng).is_err());
        assert!(simulate(&model, 0, &[], &mut rng).is_err());
    }

    #[test]
    fn million_step_conservation() {
        let model = builtin_model("srw2d").unwrap();
        let mut rng = trial_stream(3, 0, StreamRole::Walk);
        let n = 1_000_000;
        let path = simulate(&model, n, &[n / 2, n], &mut rng).unwrap();
        let lt = &path.local_time;
        assert_eq!(lt.total(), n as u64);
        assert!(lt.range() <= n && lt.max_count() >= 1 && lt.max_count() as usize <= n);
        assert_eq!(path.visits.len(), n);
        assert_eq!(path.visits[0], Point::ORIGIN.code(Dim::Two));
    }
}
