//! End-to-end checks of the reference solution, equilibrium angles, the
//! three experiments and the invariant suites. Each criterion prints one
//! `criterion N: PASS|FAIL` line. Set `TRICAP_ACCEPTANCE=1,2,6` to run a
//! subset.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use tricap::diagnostics::eoc;
use tricap::experiments::{
    angle_deviation, run_hexagon, run_lens, run_marangoni, HexagonSetup, LensSetup, MarangoniSetup, RunControl,
};
use tricap::sharp::{solve_junction_1d, young_angles, Junction1DConfig};

// Writes past the harness's output capture.
macro_rules! emit {
    ($($t:tt)*) => {{
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, $($t)*);
        let _ = out.flush();
    }};
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn selected(n: usize) -> bool {
    match std::env::var("TRICAP_ACCEPTANCE") {
        Ok(list) => list.split(',').any(|s| s.trim().parse() == Ok(n)),
        Err(_) => true,
    }
}

fn reference_far_end() -> Outcome {
    let cfg = Junction1DConfig::hexagon();
    let sol = solve_junction_1d(&cfg, 0.01).expect("reference solve");
    let q = sol.q_end();
    let target = 0.122052;
    Outcome { pass: (q - target).abs() <= 1e-3, detail: format!("q(L) = {q:.6}, expected {target} +- 1e-3") }
}

fn young() -> Outcome {
    let tol = 1e-10;
    let equal = young_angles(4.0, 4.0, 4.0).expect("equal tensions");
    let mixed = young_angles(1.0, 3f64.sqrt(), 2.0).expect("mixed tensions");
    let want = [PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0];
    let e1 = angle_deviation(&equal, &[2.0 * PI / 3.0; 3]);
    let e2 = angle_deviation(&mixed, &want);
    let deg = mixed.map(f64::to_degrees);
    Outcome {
        pass: e1 <= tol && e2 <= tol,
        detail: format!(
            "(4,4,4) max error {e1:.1e} rad; (1,sqrt3,2) -> ({:.6}, {:.6}, {:.6}) deg, max error {e2:.1e} rad",
            deg[0], deg[1], deg[2]
        ),
    }
}

fn hexagon() -> Outcome {
    let eps = [0.08, 0.04, 0.02];
    let expected = [0.127939, 0.125184, 0.123699];
    let reference = solve_junction_1d(&HexagonSetup::new(eps[0]).reference_config(), 0.01).expect("reference solve");
    let mut rows = Vec::new();
    let mut q_ok = true;
    for (e, want) in eps.iter().zip(expected) {
        let t = Instant::now();
        let r = run_hexagon(&HexagonSetup::new(*e), Some(&reference), &RunControl::default(), &mut ()).expect("hexagon run");
        let rel = (r.q_far - want).abs() / want;
        q_ok &= rel <= 0.05;
        emit!(
            "  hexagon eps {e}: q(L) {:.6} (published {want}, rel {rel:.3}), linf {:.6}, l2 {:.6}, relax {} steps, {:.0} s",
            r.q_far,
            r.linf,
            r.l2,
            r.relax_steps,
            t.elapsed().as_secs_f64()
        );
        rows.push((*e, r.linf, r.l2));
    }
    let rate_inf = eoc(&rows.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>()).expect("rates");
    let rate_2 = eoc(&rows.iter().map(|r| (r.0, r.2)).collect::<Vec<_>>()).expect("rates");
    let in_band = |v: &[f64]| v.iter().all(|r| (0.7..=1.1).contains(r));
    Outcome {
        pass: q_ok && in_band(&rate_inf) && in_band(&rate_2),
        detail: format!(
            "q(L) within 5%: {q_ok}; linf rates {:?}; l2 rates {:?}; band [0.7, 1.1]",
            rate_inf.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
            rate_2.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
        ),
    }
}

fn lens() -> Outcome {
    let eps = [0.2, 0.1 * 2f64.sqrt(), 0.1];
    let target = [PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0];
    let published = [1.7446, 2.14421, 2.39438];
    let mut devs = Vec::new();
    let mut last = None;
    for e in eps {
        let t = Instant::now();
        let r = run_lens(&LensSetup::new(e), &RunControl::default(), &mut ()).expect("lens run");
        let m = r.final_angles.expect("junction located");
        let a = m.psi_anchored;
        let dev = angle_deviation(&a, &target);
        emit!(
            "  lens eps {e:.4}: anchored ({:.5}, {:.5}, {:.5}), unanchored ({:.5}, {:.5}, {:.5}), deviation {dev:.4}, {:.0} s",
            a[0],
            a[1],
            a[2],
            m.psi_unanchored[0],
            m.psi_unanchored[1],
            m.psi_unanchored[2],
            t.elapsed().as_secs_f64()
        );
        devs.push(dev);
        last = Some(a);
    }
    let a = last.unwrap();
    let published_err = angle_deviation(&a, &published);
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: published_err <= 0.1 && monotone,
        detail: format!(
            "eps 0.1 max distance to published angles {published_err:.4} rad (bound 0.1); deviations {:?} decreasing: {monotone}",
            devs.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>()
        ),
    }
}

fn marangoni() -> Outcome {
    let setup = MarangoniSetup::new(0.2);
    let t = Instant::now();
    let r = run_marangoni(&setup, &RunControl::default(), &mut ()).expect("marangoni run");
    let recs = &r.records;
    let before = recs.iter().filter(|x| x.time < setup.t0 - 1e-9).last().expect("records before t0");
    let peak = recs.iter().filter(|x| x.time > setup.t0).map(|x| x.velocity_l2).fold(0.0, f64::max);
    let quiet = before.velocity_l2 < 0.1 * peak;
    let xs: Vec<(f64, Option<f64>)> = recs
        .iter()
        .filter(|x| x.time > setup.t0 + setup.tq && x.time <= setup.t_end)
        .map(|x| (x.time, x.junction.map(|p| p[0])))
        .collect();
    let mut increasing = xs.iter().all(|x| x.1.is_some());
    let mut first_drop = None;
    for w in xs.windows(2) {
        if let (Some(a), Some(b)) = (w[0].1, w[1].1) {
            if b <= a {
                increasing = false;
                first_drop.get_or_insert(w[1].0);
            }
        }
    }
    let (c0, c1) = (recs.first().unwrap().centroid_x, recs.last().unwrap().centroid_x);
    let drop = first_drop.map_or(String::new(), |t| format!(" (first non-increase at t = {t:.2})"));
    Outcome {
        pass: quiet && increasing && c1 > c0,
        detail: format!(
            "|v| before t0 {:.3e} vs post-t0 peak {peak:.3e} (ratio {:.3}); left junction x increasing: {increasing}{drop}; centroid x {c0:.4} -> {c1:.4}; {:.0} s",
            before.velocity_l2,
            before.velocity_l2 / peak,
            t.elapsed().as_secs_f64()
        ),
    }
}

fn properties() -> Outcome {
    let mut checks = Vec::new();
    checks.extend(common::cahn_hilliard_invariants(200));
    checks.push(common::surfactant_conservation(40));
    checks.push(common::weighted_potential_sum());
    checks.extend(common::tanh_identities());
    checks.push(common::potential_derivatives(100, 7));
    checks.push(common::projection_divergence(20));
    checks.push(common::absent_third_phase(100));
    for c in &checks {
        emit!("  {} {}", if c.pass() { "ok  " } else { "FAIL" }, c.line());
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    Outcome { pass: failed == 0, detail: format!("{} of {} checks within bounds", checks.len() - failed, checks.len()) }
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 6] =
        [(1, reference_far_end), (2, young), (3, hexagon), (4, lens), (5, marangoni), (6, properties)];
    let mut lines = Vec::new();
    let mut hard_failure = false;
    for (n, run) in criteria {
        if !selected(n) {
            continue;
        }
        let o = run();
        let line = format!("criterion {n}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        emit!("{line}");
        lines.push(line);
        hard_failure |= !o.pass && (n == 2 || n == 6);
    }
    emit!("--- summary");
    for l in &lines {
        emit!("{l}");
    }
    assert!(!hard_failure, "exact identities or invariant suites failed");
}
