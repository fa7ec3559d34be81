//! The RWRS process `Z_n = Σ_{k<n} ξ_{S_k}`, its scaling and the
//! path-maximum statistic.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scenery::{SceneryField, SceneryModel, SiteLaw, WithLaw};
use crate::walk::{Dim, Path, StepDraw, WalkModel, WithSteps};

/// `b_n = n^{1/β} (ln n)^{(β-1)/β}`.
pub fn bn(n: u64, beta: f64) -> f64 {
    let n = n as f64;
    n.powf(1.0 / beta) * n.ln().powf((beta - 1.0) / beta)
}

/// Compensated sum: plain sums over blocks of 64 terms, merged with
/// Neumaier's correction.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    block: f64,
    len: u32,
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    const BLOCK: u32 = 64;

    #[inline(always)]
    pub fn add(&mut self, v: f64) {
        self.block += v;
        self.len += 1;
        if self.len == Self::BLOCK {
            self.flush();
        }
    }

    #[inline]
    fn flush(&mut self) {
        let v = self.block;
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
        self.block = 0.0;
        self.len = 0;
    }

    pub fn value(&self) -> f64 {
        let mut c = *self;
        c.flush();
        c.sum + c.comp
    }
}

/// Values of `Z` at the checkpoint indices of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub n: usize,
    pub checkpoint_times: Vec<f64>,
    /// `[n t_i]`.
    pub checkpoint_indices: Vec<usize>,
    pub z_values: Vec<f64>,
    /// Exact values for integer sceneries.
    pub z_lattice: Option<Vec<i64>>,
    /// `max_{k<n} |ξ_{S_k}|`.
    pub max_abs_scenery: f64,
}

/// `[n t_i]` for sorted `t_i ∈ [0, 1]`.
pub fn checkpoint_indices(n: usize, times: &[f64]) -> Result<Vec<usize>> {
    if times.windows(2).any(|w| !(w[0] <= w[1])) || times.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidArgument(format!(
            "checkpoint times {times:?} must be sorted within [0, 1]"
        )));
    }
    Ok(times
        .iter()
        .map(|&t| ((n as f64 * t).floor() as usize).min(n))
        .collect())
}

fn saturate(z: i128) -> i64 {
    z.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// Streams `Z` along a stored path, reading scenery values from `field`.
pub fn accumulate(
    path: &Path,
    field: &mut SceneryField,
    times: &[f64],
) -> Result<TrajectorySample> {
    let idx = checkpoint_indices(path.n, times)?;
    let lattice = field.model().is_lattice();
    let mut real = CompensatedSum::default();
    let mut int = 0i128;
    let mut max_abs = 0.0f64;
    let mut z_values = Vec::with_capacity(idx.len());
    let mut z_lattice = Vec::with_capacity(idx.len());
    let mut next = 0;
    for (k, &code) in path.visits.iter().enumerate() {
        while next < idx.len() && idx[next] == k {
            z_values.push(if lattice { int as f64 } else { real.value() });
            z_lattice.push(saturate(int));
            next += 1;
        }
        let v = field.xi_at_code(code);
        if lattice {
            int += v as i64 as i128;
        } else {
            real.add(v);
        }
        max_abs = max_abs.max(v.abs());
    }
    while next < idx.len() {
        z_values.push(if lattice { int as f64 } else { real.value() });
        z_lattice.push(saturate(int));
        next += 1;
    }
    Ok(TrajectorySample {
        n: path.n,
        checkpoint_times: times.to_vec(),
        checkpoint_indices: idx,
        z_values,
        z_lattice: lattice.then_some(z_lattice),
        max_abs_scenery: max_abs,
    })
}

/// `Σ_y ξ_y N(y)` over the given local times.
pub fn site_sum(counts: impl IntoIterator<Item = (u64, u32)>, field: &mut SceneryField) -> f64 {
    let mut s = CompensatedSum::default();
    for (code, c) in counts {
        s.add(field.xi_at_code(code) * c as f64);
    }
    s.value()
}

/// Exact `Σ_y ξ_y N(y)` for an integer scenery.
pub fn site_sum_exact(
    counts: impl IntoIterator<Item = (u64, u32)>,
    field: &mut SceneryField,
) -> i128 {
    counts
        .into_iter()
        .map(|(code, c)| field.xi_at_code(code) as i64 as i128 * c as i128)
        .sum()
}

/// `Z_{[n t_i]} / b_n`.
pub fn normalize(sample: &TrajectorySample, beta: f64) -> Result<Vec<f64>> {
    let b = scale_for(sample.n, beta)?;
    Ok(sample.z_values.iter().map(|z| z / b).collect())
}

/// `max_{k<n} |ξ_{S_k}| / b_n`.
pub fn max_jump_stat(sample: &TrajectorySample, beta: f64) -> Result<f64> {
    Ok(sample.max_abs_scenery / scale_for(sample.n, beta)?)
}

fn scale_for(n: usize, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Degenerate(format!("b_n needs n ≥ 2, got {n}")));
    }
    Ok(bn(n as u64, beta))
}

/// One trial without storing the path: the walk and the scenery are both
/// monomorphised into a single loop. The result equals
/// `accumulate(simulate(walk, n, ..., rng), SceneryField::new(scenery, dim, key), ...)`
/// for the same generator state.
pub fn stream_trial<R: Rng + ?Sized>(
    walk: &WalkModel,
    scenery: &SceneryModel,
    n: usize,
    times: &[f64],
    rng: &mut R,
    key: u64,
) -> Result<TrajectorySample> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "path length must be at least 1".into(),
        ));
    }
    let idx = checkpoint_indices(n, times)?;

    struct Outer<'a, R: ?Sized> {
        scenery: &'a SceneryModel,
        job: Job<'a>,
        rng: &'a mut R,
    }

    #[derive(Clone, Copy)]
    struct Job<'a> {
        dim: Dim,
        n: usize,
        idx: &'a [usize],
        key: u64,
    }

    struct Inner<'a, S, R: ?Sized> {
        steps: S,
        job: Job<'a>,
        rng: &'a mut R,
    }

    type Raw = (Vec<f64>, Option<Vec<i64>>, f64);

    impl<R: Rng + ?Sized> WithSteps for Outer<'_, R> {
        type Output = Raw;
        fn run<S: StepDraw>(self, steps: S) -> Raw {
            self.scenery.with_law(Inner {
                steps,
                job: self.job,
                rng: self.rng,
            })
        }
    }

    impl<S: StepDraw, R: Rng + ?Sized> WithLaw for Inner<'_, S, R> {
        type Output = Raw;
        fn run<L: SiteLaw>(self, law: &L) -> Raw {
            if L::LATTICE {
                lattice_kernel(self.steps, law, self.job, self.rng)
            } else {
                real_kernel(self.steps, law, self.job, self.rng)
            }
        }
    }

    fn lattice_kernel<S: StepDraw, L: SiteLaw, R: Rng + ?Sized>(
        mut steps: S,
        law: &L,
        job: Job,
        rng: &mut R,
    ) -> Raw {
        let mut code = 0u64;
        let mut z = 0i128;
        let mut max_abs = 0i64;
        let mut zs = Vec::with_capacity(job.idx.len());
        let mut start = 0;
        for end in job.idx.iter().copied().chain(std::iter::once(job.n)) {
            for _ in start..end {
                let v = law.int_value(job.key, code);
                z += v as i128;
                max_abs = max_abs.max(v.abs());
                code = code.wrapping_add(steps.draw(rng).code(job.dim));
            }
            zs.push(z);
            start = end;
        }
        zs.pop();
        let z_values = zs.iter().map(|&z| z as f64).collect();
        (
            z_values,
            Some(zs.into_iter().map(saturate).collect()),
            max_abs as f64,
        )
    }

    fn real_kernel<S: StepDraw, L: SiteLaw, R: Rng + ?Sized>(
        mut steps: S,
        law: &L,
        job: Job,
        rng: &mut R,
    ) -> Raw {
        let mut code = 0u64;
        let mut z = CompensatedSum::default();
        let mut max_abs = 0.0f64;
        let mut zs = Vec::with_capacity(job.idx.len());
        let mut start = 0;
        for end in job.idx.iter().copied().chain(std::iter::once(job.n)) {
            for _ in start..end {
                let v = law.value(job.key, code);
                z.add(v);
                max_abs = max_abs.max(v.abs());
                code = code.wrapping_add(steps.draw(rng).code(job.dim));
            }
            zs.push(z.value());
            start = end;
        }
        zs.pop();
        (zs, None, max_abs)
    }

    let (z_values, z_lattice, max_abs_scenery) = walk.with_steps(Outer {
        scenery,
        job: Job {
            dim: walk.dim,
            n,
            idx: &idx,
            key,
        },
        rng,
    });
    Ok(TrajectorySample {
        n,
        checkpoint_times: times.to_vec(),
        checkpoint_indices: idx,
        z_values,
        z_lattice,
        max_abs_scenery,
    })
}
