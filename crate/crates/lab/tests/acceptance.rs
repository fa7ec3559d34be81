//! Acceptance suite: one PASS/FAIL line per criterion at full size.
//!
//! Run with `cargo test -p rwrs-lab --test acceptance`; the whole suite takes
//! about half an hour on one core. Criteria listed as underpowered have a
//! pass probability well below one even for a correct implementation; their
//! line is printed as measured but does not set the exit status.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rwrs_core::process::stream_trial;
use rwrs_core::rng::{scenery_key, trial_stream, StreamRole};
use rwrs_core::statistics::l_stat;
use rwrs_core::{builtin_model, builtin_scenery, simulate, StableParams};
use rwrs_lab::report::csv_body;
use rwrs_lab::{run, Experiment, ExperimentReport, ExperimentSpec, Preset};

/// Fixed before any criterion was run.
const SUITE_SEED: u64 = 20_240_601;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    gating: bool,
    detail: String,
    secs: f64,
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn spec(
    experiment: Experiment,
    walk: &str,
    scenery: &str,
    n_grid: &[u64],
    trials: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        walk: walk.into(),
        scenery: scenery.into(),
        n_grid: n_grid.to_vec(),
        trials,
        seed: SUITE_SEED,
        workers: workers(),
        ..ExperimentSpec::preset(experiment, Preset::Standard)
    }
}

fn exec(spec: &ExperimentSpec) -> ExperimentReport {
    run(spec).unwrap_or_else(|e| panic!("{} failed to run: {e}", spec.experiment.name()))
}

fn in_range(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

fn c1() -> (bool, String) {
    let mut pass = true;
    let mut detail = vec![];
    for scenery in ["stable(2,0.5,0)", "stable(1,1,0)", "stable(1.5,1,0.3)"] {
        let r = exec(&spec(
            Experiment::StableSelftest,
            "srw2d",
            scenery,
            &[1],
            1_000_000,
        ));
        let row = &r.rows[0];
        let ks = row.diagnostics["ks"];
        pass &= row.estimate < 0.004 && ks < 0.01;
        detail.push(format!("{scenery}: cf err {:.4}, KS {ks:.4}", row.estimate));
    }
    let f0 = StableParams::new(2.0, 0.5, 0.0)
        .unwrap()
        .density(0.0, 1e-10)
        .unwrap();
    pass &= (f0 - 0.398942).abs() <= 1e-4;
    detail.push(format!("f(0) = {f0:.6}"));
    (pass, detail.join("; "))
}

fn c2() -> (bool, String) {
    let r = exec(&spec(
        Experiment::OracleCheck,
        "srw1d",
        "rademacher",
        &[1, 2, 3, 5, 8],
        1_000_000,
    ));
    let p20 = r.rows[1].diagnostics["p[0]"];
    let p33 = r.rows[2].diagnostics["p[3]"];
    let worst = r.rows.iter().map(|row| row.estimate).fold(0.0, f64::max);
    let pass = worst < 4.0 && p20 == 0.5 && p33 == 3.0 / 16.0;
    (
        pass,
        format!("max atom deviation {worst:.2} s.e.; P(Z_2=0) = {p20}, P(Z_3=3) = {p33}"),
    )
}

fn c3() -> (bool, String) {
    let mut s = spec(Experiment::Fdd, "srw2d", "gaussian", &[1_000_000], 10_000);
    s.checkpoint_times = vec![0.5, 1.0];
    let r = exec(&s);
    let row = &r.rows[0];
    let (ks, cf) = (row.diagnostics["ks"], row.diagnostics["cf_max_error"]);
    let pass = in_range(row.estimate, 0.51, 0.76) && ks < 0.05 && cf < 0.05;
    (
        pass,
        format!(
            "variance {:.4} (target {:.4}), KS {ks:.4}, max fdd cf error over 3×3 θ grid {cf:.4}",
            row.estimate, row.target
        ),
    )
}

fn c4(lattice_reports: &ExperimentReport) -> (bool, String) {
    let sc = builtin_scenery("rademacher").unwrap();
    let trials = 1_000_000u64;
    let mut detail = vec![];
    let mut pass = true;
    for row in &lattice_reports.rows {
        let f = row.diagnostics["admissible_fraction"];
        pass &= f == 1.0;
        detail.push(format!("srw2d n={}: {f}", row.n));
    }
    for (walk, n) in [("lazy2d", 1_001usize), ("srw1d", 1_001), ("cauchy1d", 101)] {
        let model = builtin_model(walk).unwrap();
        let bad = (0..trials)
            .filter(|&t| {
                let mut rng = trial_stream(SUITE_SEED, t, StreamRole::Walk);
                let key = scenery_key(SUITE_SEED, t);
                let z = stream_trial(&model, &sc, n, &[1.0], &mut rng, key)
                    .unwrap()
                    .z_lattice
                    .unwrap()[0];
                (z - n as i64).rem_euclid(2) != 0
            })
            .count();
        pass &= bad == 0;
        detail.push(format!("{walk} n={n}: {bad} violations"));
    }
    (
        pass,
        format!(
            "Z_n ≡ n (mod 2) over 10^6 trials each; {}",
            detail.join(", ")
        ),
    )
}

fn c5(r: &ExperimentReport) -> (bool, bool, String) {
    let (small, large) = (&r.rows[0], &r.rows[1]);
    let closer = (large.estimate - 0.5).abs() < (small.estimate - 0.5).abs();
    (
        in_range(large.estimate, 0.35, 0.65),
        closer,
        format!(
            "n=10^5: {:.4} ± {:.4}; n=10^3: {:.4} ± {:.4}; target {:.4}",
            large.estimate, large.stderr, small.estimate, small.stderr, large.target
        ),
    )
}

fn c6a() -> (bool, String) {
    let r = exec(&spec(
        Experiment::LltNonlattice,
        "srw2d",
        "gaussian",
        &[100_000],
        1_000_000,
    ));
    let row = &r.rows[0];
    (
        in_range(row.estimate, 0.35, 0.65),
        format!(
            "gaussian: {:.4} ± {:.4}, target {:.4}",
            row.estimate, row.stderr, row.target
        ),
    )
}

fn c6b() -> (bool, String) {
    let r = exec(&spec(
        Experiment::LltNonlattice,
        "srw2d",
        "cauchy-cont",
        &[100_000],
        1_000_000,
    ));
    let row = &r.rows[0];
    (
        in_range(row.estimate, 0.22, 0.42),
        format!(
            "cauchy-cont: {:.4} ± {:.4}, target {:.4} (about 6.4 expected interval hits)",
            row.estimate, row.stderr, row.target
        ),
    )
}

/// Exact identities of `L_n` on random fields.
fn c7a() -> (bool, String) {
    let walk = builtin_model("srw2d").unwrap();
    let mut worst = 0.0f64;
    for t in 0..20 {
        let mut rng = trial_stream(SUITE_SEED, t, StreamRole::Walk);
        let n = 20_000;
        let path = simulate(&walk, n, &[5_000, 12_000, n], &mut rng).unwrap();
        let lt = &path.local_time;
        let one = l_stat(lt, &[1.0, 1.0, 1.0], 1.0).unwrap();
        worst = worst
            .max((one.l_value - 1.0).abs())
            .max((one.l_signed_value - 1.0).abs());
        let th = [0.7, -1.3, 0.4];
        for gamma in [0.5, 1.0, 2.0] {
            let base = l_stat(lt, &th, gamma).unwrap();
            let scaled = l_stat(lt, &th.map(|x| 2.5 * x), gamma).unwrap();
            let flipped = l_stat(lt, &th.map(|x| -x), gamma).unwrap();
            // the signed sum cancels, so its rounding scale is the unsigned one
            let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale;
            let scale = base.l_value;
            worst = worst
                .max(rel(
                    scaled.l_value,
                    2.5f64.powf(gamma) * base.l_value,
                    2.5f64.powf(gamma) * scale,
                ))
                .max(rel(
                    scaled.l_signed_value,
                    2.5f64.powf(gamma) * base.l_signed_value,
                    2.5f64.powf(gamma) * scale,
                ))
                .max(rel(flipped.l_signed_value, -base.l_signed_value, scale))
                .max(rel(flipped.l_value, base.l_value, scale));
        }
    }
    (
        worst < 1e-12,
        format!("largest relative deviation {worst:.2e}"),
    )
}

fn c7b() -> (bool, bool, String) {
    let r = exec(&spec(
        Experiment::Tech1,
        "srw2d",
        "gaussian",
        &[10_000, 100_000, 1_000_000],
        50,
    ));
    let target = 2.0 / PI;
    let dist: Vec<f64> = r
        .rows
        .iter()
        .map(|row| (row.estimate - target).abs())
        .collect();
    let last = r.rows.last().unwrap().estimate;
    let bracket = in_range(last, 0.4, 1.0);
    let monotone = dist.windows(2).all(|w| w[1] < w[0]);
    let means: Vec<String> = r
        .rows
        .iter()
        .map(|row| format!("{:.4}±{:.4}", row.estimate, row.stderr))
        .collect();
    (
        bracket,
        monotone,
        format!(
            "means {} at n=10^4,10^5,10^6; distances to 2/π {:.4?}",
            means.join(", "),
            dist
        ),
    )
}

fn c8() -> (bool, String) {
    let r = exec(&spec(
        Experiment::Omega,
        "srw2d",
        "gaussian",
        &[100_000],
        1_000,
    ));
    let row = &r.rows[0];
    let violations = row.diagnostics["minvn_violations"];
    (
        row.estimate >= 0.99 && violations == 0.0,
        format!(
            "Ω_n held in {:.3} of trials; {violations} lower-bound violations",
            row.estimate
        ),
    )
}

fn c9() -> (bool, String) {
    let r = exec(&spec(
        Experiment::Range,
        "srw2d",
        "gaussian",
        &[10_000, 100_000, 1_000_000],
        100,
    ));
    let means: Vec<f64> = r.rows.iter().map(|row| row.estimate).collect();
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let pass = increasing && in_range(*means.last().unwrap(), 2.0, PI);
    (pass, format!("mean R_n ln n / n = {means:.4?}"))
}

fn c10() -> (bool, String) {
    let mut mismatches = vec![];
    for e in Experiment::ALL {
        let mut base = ExperimentSpec::preset(e, Preset::Quick);
        base.seed = SUITE_SEED;
        base.trials = base.trials.min(2_000);
        base.n_grid = base.n_grid.iter().map(|&n| n.min(5_000)).collect();
        base.n_grid.dedup();
        let mut bodies = vec![];
        for workers in [1, 4, 16, 1] {
            let csv = exec(&ExperimentSpec {
                workers,
                ..base.clone()
            })
            .to_csv()
            .unwrap();
            bodies.push(csv_body(&csv).to_string());
        }
        if bodies.iter().any(|b| *b != bodies[0]) {
            mismatches.push(e.name());
        }
    }
    (
        mismatches.is_empty(),
        format!("9 experiments, workers 1/4/16 plus a repeat run; mismatches: {mismatches:?}"),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    let mut outcomes = Vec::new();
    let mut record = |id, title, pass, gating, detail: String, secs| {
        let o = Outcome {
            id,
            title,
            pass,
            gating,
            detail,
            secs,
        };
        println!(
            "[{}] {} {}: {} ({:.0} s){}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail,
            o.secs,
            if o.gating {
                ""
            } else {
                " [underpowered, not gating]"
            }
        );
        outcomes.push(o);
    };

    let ((p, d), s) = timed(c1);
    let p = p && s < 30.0;
    record("1", "stable self-test", p, true, d, s);

    let ((p, d), s) = timed(c2);
    record("2", "oracle equivalence", p && s < 120.0, true, d, s);

    let ((p, d), s) = timed(c3);
    record("3", "fdd convergence, β=2, d=2", p, true, d, s);

    let (lattice, s5) = timed(|| {
        exec(&spec(
            Experiment::LltLattice,
            "srw2d",
            "rademacher",
            &[1_000, 100_000],
            1_000_000,
        ))
    });
    let ((p, d), s) = timed(|| c4(&lattice));
    record("4", "lattice parity", p, true, d, s);
    let (bracket, closer, d) = c5(&lattice);
    record(
        "5a",
        "lattice local limit at n=10^5",
        bracket,
        true,
        d.clone(),
        s5,
    );
    record(
        "5b",
        "lattice local limit closer at n=10^5 than at n=10^3",
        closer,
        false,
        d,
        s5,
    );

    let ((pa, da), sa) = timed(c6a);
    record(
        "6a",
        "interval local limit, gaussian scenery",
        pa,
        true,
        da,
        sa,
    );
    let ((pb, db), sb) = timed(c6b);
    record(
        "6b",
        "interval local limit, cauchy scenery",
        pb,
        false,
        db,
        sb,
    );

    let ((pa, da), sa) = timed(c7a);
    record("7a", "L_n exact identities", pa, true, da, sa);
    let ((bracket, monotone, d), s) = timed(c7b);
    record(
        "7b",
        "L_n(2) bracket at n=10^6",
        bracket,
        true,
        d.clone(),
        s,
    );
    record(
        "7c",
        "L_n(2) distance to 2/π decreasing",
        monotone,
        false,
        d,
        s,
    );

    let ((p, d), s) = timed(c8);
    record("8", "Ω_n events", p, true, d, s);

    let ((p, d), s) = timed(c9);
    record("9", "range asymptotics", p, true, d, s);

    let ((p, d), s) = timed(c10);
    record("10", "determinism", p, true, d, s);

    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    let gating_failures = failed.iter().filter(|o| o.gating).count();
    println!(
        "acceptance: {} of {} checks passed; {} gating failure(s)",
        outcomes.len() - failed.len(),
        outcomes.len(),
        gating_failures
    );
    if gating_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
