//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! PASS/FAIL lines are always printed; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use itertools::Itertools;
use pinning_core::balls::{
    lift_pattern, project_to_pattern, realize_screens, screen_of, screens_of, shrink_toward_touchpoint, validate,
    Ball, BallConfig,
};
use pinning_core::engine::{
    construct_stable, demo_main_theorem, empirical_sweep, extract_minimal, verify_pin, DemoOptions, PinCertificate,
    VerifyOptions,
};
use pinning_core::geometry::{line_point_distance, LineChart, TOL};
use pinning_core::linespace::{
    check_feasibility, dependent_normals, genericize, strict_transversal, FeasibilityVerdict, LinespaceError, Screen,
    ScreenFamily,
};
use pinning_core::pattern2d::{
    counterexample_along, is_pinning_pattern, sample_counterexample, signed_normal_order, sigma5, spanning_triples,
    HalfplanePattern, PatternWitness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// pinned tolerances
const DUAL_RESIDUAL: f64 = 1e-9;
const ROUND_TRIP_NORMAL: f64 = 1e-12;
const SCREEN_NORMAL: f64 = 1e-14;
const ARC_ENDPOINT_DEG: f64 = 0.1;
const AMBIGUOUS_RATE: f64 = 0.01;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn timed(budget: Duration, f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let t = Instant::now();
    let mut v = f();
    let dt = t.elapsed();
    if dt > budget {
        v.pass = false;
        v.detail = format!("{} [over budget {:?}]", v.detail, budget);
    }
    (v, dt)
}

/// Independent deficit: plain point-line distances, no shared code path.
fn deficit(balls: &[Ball], g: &LineChart) -> f64 {
    balls.iter().map(|b| line_point_distance(g, &b.center) - b.radius).fold(f64::NEG_INFINITY, f64::max)
}

// Arc of a spanning triple sampled on a 0.01° grid, independent of the exact code.
fn sampled_arc(n_first: [f64; 2], n_last: [f64; 2]) -> (f64, f64) {
    let inside = |deg: f64| {
        let t = deg.to_radians();
        let u = [t.cos(), t.sin()];
        u[0] * n_first[0] + u[1] * n_first[1] < 0.0 && u[0] * n_last[0] + u[1] * n_last[1] > 0.0
    };
    let steps = 36_000;
    let at = |k: usize| k as f64 * 360.0 / steps as f64;
    let mut start = None;
    let mut end = None;
    for k in 0..steps {
        let (a, b) = (inside(at(k)), inside(at((k + 1) % steps)));
        if !a && b {
            start = Some(at(k + 1) % 360.0);
        }
        if a && !b {
            end = Some(at(k + 1) % 360.0);
        }
    }
    (start.unwrap(), end.unwrap())
}

fn close_deg(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d) <= ARC_ENDPOINT_DEG
}

fn criterion_1() -> Verdict {
    let p = sigma5(None).unwrap();
    let triples: Vec<[usize; 3]> = spanning_triples(&p).iter().map(|t| t.one_based()).collect();
    let expected = vec![[1, 2, 3], [1, 3, 5], [2, 3, 4], [3, 4, 5]];
    let v = is_pinning_pattern(&p);
    let PatternWitness::Cover { arcs } = &v.witness else {
        return verdict(false, "no covering arcs");
    };
    let n = p.unit_normals();
    let arcs_match = arcs.iter().all(|(t, a)| {
        let [i, _, k] = t.0;
        let (s, e) = sampled_arc(n[i], n[k]);
        close_deg(s, a.start_deg()) && close_deg(e, a.end_deg())
    });
    let arcs_txt = arcs.iter().map(|(_, a)| format!("({:.0},{:.0})", a.start_deg(), a.end_deg())).join(" ");
    verdict(
        triples == expected && v.is_pinning && arcs.len() == 4 && arcs_match,
        format!("triples {triples:?}, arcs {arcs_txt}, sampled arcs agree {arcs_match}, pins {}", v.is_pinning),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut tested, mut pinning, mut disagreements) = (0, 0, 0);
    while tested < 1000 {
        let k = rng.gen_range(3..=6);
        let angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..360.0)).collect();
        let Ok(p) = HalfplanePattern::from_angles_deg(&angles) else { continue };
        let v = is_pinning_pattern(&p);
        let seed = tested as u64;
        let agree = match &v.witness {
            PatternWitness::Cover { .. } => {
                pinning += 1;
                sample_counterexample(&p, 100_000, seed).is_none()
            }
            PatternWitness::Uncovered { direction } => counterexample_along(&p, direction, 10_000, seed).is_some(),
        };
        if !agree {
            disagreements += 1;
        }
        tested += 1;
    }
    verdict(disagreements == 0, format!("{tested} patterns ({pinning} pinning), {disagreements} disagreements"))
}

fn criterion_3() -> Verdict {
    let c = lift_pattern(&sigma5(None).unwrap(), 1.0, 3.0, None).unwrap();
    let valid = validate(&c).all_pass;
    let opts = VerifyOptions::default();
    let cert = verify_pin(&c, &opts).unwrap();
    let screens = screens_of(&c).unwrap();
    let fo = strict_transversal(&screens).unwrap();
    // independent residual: Φ rebuilt from the centers
    let residual = match &fo {
        FeasibilityVerdict::NoStrictTransversal { coefficients, .. } => {
            let mut acc = [0.0f64; 4];
            for (b, w) in c.balls.iter().zip(coefficients) {
                let (px, py, lam) = (b.center[0], b.center[1], b.center[2]);
                let r = px.hypot(py);
                let n = [-px / r, -py / r];
                let phi = [(1.0 - lam) * n[0], (1.0 - lam) * n[1], lam * n[0], lam * n[1]];
                for j in 0..4 {
                    acc[j] += w * phi[j];
                }
            }
            let sum: f64 = coefficients.iter().sum();
            let nonneg = coefficients.iter().all(|w| *w >= 0.0);
            if nonneg && (sum - 1.0).abs() <= DUAL_RESIDUAL {
                acc.iter().map(|x| x * x).sum::<f64>().sqrt()
            } else {
                f64::INFINITY
            }
        }
        _ => f64::INFINITY,
    };
    let sweep = empirical_sweep(&c, &opts).unwrap();
    verdict(
        valid && cert.level() == "PATTERN" && residual <= DUAL_RESIDUAL && sweep.violation.is_none() && sweep.min_deficit > 0.0,
        format!(
            "valid {valid}, certificate {}, dual residual {residual:.2e}, min deficit per rho {:?}",
            cert.level(),
            sweep.min_deficit_per_rho.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
        ),
    )
}

fn random_tangent_config(d: usize, rng: &mut ChaCha8Rng) -> BallConfig {
    let k = rng.gen_range(1..=2 * d - 2);
    let mut h = rng.gen_range(-3.0..3.0);
    let mut balls = Vec::with_capacity(k);
    for _ in 0..k {
        let r: f64 = rng.gen_range(0.3..1.5);
        let mut n: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = n.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        n.iter_mut().for_each(|x| *x /= len);
        let mut center: Vec<f64> = n.iter().map(|x| -r * x).collect();
        center.push(h);
        balls.push(Ball::new(center, r).unwrap());
        h += 3.01 + rng.gen_range(0.0..2.0);
    }
    BallConfig::new(d, balls).unwrap()
}

// Φ vectors confined to a plane, with the origin inside their convex hull.
fn planted_dependent(d: usize) -> BallConfig {
    let signs = [1.0, -1.0, 1.0, -1.0];
    let balls = signs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut center = vec![0.0; d];
            center[0] = -0.45 * s;
            center[d - 1] = (i + 1) as f64;
            Ball::new(center, 0.45).unwrap()
        })
        .collect();
    BallConfig::new(d, balls).unwrap()
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = Vec::new();
    let (mut configs, mut no_strict, mut subsets) = (0, 0, 0);
    for d in [2usize, 3, 4] {
        let mut cases: Vec<BallConfig> = (0..500).map(|_| random_tangent_config(d, &mut rng)).collect();
        if d >= 3 {
            cases.push(planted_dependent(d));
        }
        for (ci, c) in cases.iter().enumerate() {
            configs += 1;
            if !validate(c).all_pass {
                violations.push(format!("d={d} case {ci}: invalid input"));
                continue;
            }
            let f = screens_of(c).unwrap();
            match strict_transversal(&f) {
                Ok(FeasibilityVerdict::NoStrictTransversal { .. }) => {
                    no_strict += 1;
                    let (_, rank) = dependent_normals(&f);
                    if rank >= f.len() {
                        violations.push(format!("d={d} case {ci}: no strict transversal with full rank"));
                    }
                }
                Ok(_) => {}
                Err(e) => violations.push(format!("d={d} case {ci}: {e}")),
            }
            let g = genericize(&f, 1e-6, ci as u64).unwrap();
            let radii: Vec<f64> = c.balls.iter().map(|b| b.radius).collect();
            let moved = realize_screens(&g, &radii).unwrap();
            for size in 1..=g.len() {
                for idx in (0..g.len()).combinations(size) {
                    subsets += 1;
                    if !matches!(strict_transversal(&g.subfamily(&idx)), Ok(FeasibilityVerdict::StrictTransversal { .. })) {
                        violations.push(format!("d={d} case {ci} subset {idx:?}: not strict"));
                    }
                }
            }
            match verify_pin(&moved, &VerifyOptions::default()) {
                Ok(PinCertificate::NotPinned { witness, .. }) => {
                    let f = deficit(&moved.balls, &witness);
                    if !(f <= 0.0 && witness.chart_norm() > TOL) {
                        violations.push(format!("d={d} case {ci}: witness deficit {f:e}"));
                    }
                }
                Ok(other) => violations.push(format!("d={d} case {ci}: {}", other.level())),
                Err(e) => violations.push(format!("d={d} case {ci}: {e}")),
            }
        }
    }
    verdict(
        violations.is_empty(),
        format!(
            "{configs} configs, {no_strict} without strict transversal before perturbation, {subsets} subsets strict after, {} violations{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut strict, mut none, mut ambiguous, mut bad) = (0, 0, 0, 0);
    for _ in 0..1000 {
        let d = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=3 * d);
        let screens: Vec<Screen> = (0..k)
            .map(|_| {
                let n: Vec<f64> = (0..d - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Screen::new(rng.gen_range(-5.0..5.0), &n).unwrap()
            })
            .collect();
        let f = ScreenFamily::new(d, screens).unwrap();
        match strict_transversal(&f) {
            Ok(v) => {
                if v.is_strict() {
                    strict += 1;
                } else {
                    none += 1;
                }
                // each certificate refutes the other alternative by itself
                if !check_feasibility(&f, &v, DUAL_RESIDUAL) {
                    bad += 1;
                }
            }
            Err(LinespaceError::ToleranceAmbiguous { .. }) => ambiguous += 1,
            Err(_) => bad += 1,
        }
    }
    let rate = ambiguous as f64 / 1000.0;
    verdict(
        bad == 0 && rate < AMBIGUOUS_RATE,
        format!("{strict} strict, {none} with dual certificate, {ambiguous} ambiguous ({rate:.3}), {bad} failed re-validation"),
    )
}

fn criterion_6() -> Verdict {
    let r = match demo_main_theorem(3, 1e-4, &DemoOptions::default()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("pipeline error: {e}")),
    };
    let balls = &r.balls.balls;
    let r0 = balls[0].radius;
    let congruent = balls.iter().all(|b| b.radius == r0);
    let disjoint = validate(&r.balls).disjointness_ok();
    let mut witnessed = 0;
    for idx in (0..balls.len()).combinations(4) {
        let sub: Vec<Ball> = idx.iter().map(|&i| balls[i].clone()).collect();
        let found = r.subsets.iter().find(|t| {
            t.indices.iter().map(|i| r.minimal.indices.iter().position(|j| j == i).unwrap()).collect::<Vec<_>>() == idx
        });
        if let Some(g) = found.and_then(|t| t.transversal.as_ref()) {
            if deficit(&sub, g) <= 0.0 {
                witnessed += 1;
            }
        }
    }
    let none_global = r.global.found.is_none();
    verdict(
        balls.len() == 5 && congruent && disjoint && witnessed == 5 && none_global && r.global.starts == 10_000,
        format!(
            "{} balls, congruent {congruent}, disjoint {disjoint}, {witnessed}/5 four-subsets with a transversal, global search over {} starts found {} (best deficit {:.3e})",
            balls.len(),
            r.global.starts,
            if none_global { "none" } else { "one" },
            r.global.best_deficit
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut notes = Vec::new();
    for resolution in [2usize, 3, 4, 6] {
        let c = match construct_stable(4, resolution, 1.0, 3.0) {
            Ok(c) => c,
            Err(e) => {
                notes.push(format!("res {resolution}: {e}"));
                continue;
            }
        };
        match extract_minimal(&c, 1e-6, &VerifyOptions::default()) {
            Ok(m) => {
                let empirical = m.certificate.level() == "EMPIRICAL";
                let witnesses_ok = m.audit.len() == 7
                    && m.audit.iter().all(|a| {
                        let pos: Vec<usize> =
                            a.indices.iter().map(|i| m.indices.iter().position(|j| j == i).unwrap()).collect();
                        let sub: Vec<Ball> = pos.iter().map(|&q| m.config.balls[q].clone()).collect();
                        match &a.certificate {
                            PinCertificate::NotPinned { witness, .. } => {
                                deficit(&sub, witness) <= 0.0 && witness.chart_norm() > TOL
                            }
                            _ => false,
                        }
                    });
                if m.config.len() == 7 && empirical && witnesses_ok {
                    return verdict(
                        true,
                        format!(
                            "{} flats, {} balls -> 7 balls {:?}, certificate EMPIRICAL, 7/7 six-subsets NOT_PINNED",
                            resolution,
                            c.len(),
                            m.indices
                        ),
                    );
                }
                notes.push(format!("res {resolution}: {} balls, {}", m.config.len(), m.certificate.level()));
            }
            Err(e) => notes.push(format!("res {resolution}: {e}")),
        }
    }
    verdict(false, format!("no resolution succeeded: {}", notes.join("; ")))
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut trips, mut commutes, mut failures) = (0, 0, Vec::new());
    while trips < 10_000 {
        let k = rng.gen_range(3..=6);
        let angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..360.0)).collect();
        let Ok(p) = HalfplanePattern::from_angles_deg(&angles) else { continue };
        let r = rng.gen_range(0.1..5.0);
        let gap = 2.0 * r + rng.gen_range(0.01..3.0);
        let c = lift_pattern(&p, r, gap, None).unwrap();
        let q = project_to_pattern(&c).unwrap();
        let same_order = signed_normal_order(&p) == signed_normal_order(&q);
        let same_verdict = is_pinning_pattern(&p).is_pinning == is_pinning_pattern(&q).is_pinning;
        let close = p
            .unit_normals()
            .iter()
            .zip(q.unit_normals())
            .all(|(a, b)| (a[0] - b[0]).abs() <= ROUND_TRIP_NORMAL && (a[1] - b[1]).abs() <= ROUND_TRIP_NORMAL);
        if !(same_order && same_verdict && close) {
            failures.push(format!("round trip {angles:?}"));
        }
        trips += 1;

        let b = &c.balls[rng.gen_range(0..c.len())];
        let s = rng.gen_range(0.0..1.0);
        let before = screen_of(b);
        let after = screen_of(&shrink_toward_touchpoint(b, s).unwrap());
        let same = before.lambda == after.lambda
            && before.n.iter().zip(&after.n).all(|(x, y)| (x - y).abs() <= SCREEN_NORMAL);
        if !same {
            failures.push(format!("commutation s={s}"));
        }
        commutes += 1;
    }
    verdict(
        failures.is_empty(),
        format!("{trips} round trips, {commutes} shrink commutations, {} failures", failures.len()),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Verdict); 8] = [
        ("sigma5 certification", Duration::from_secs(1), criterion_1),
        ("exact checker vs sampling oracle", Duration::from_secs(120), criterion_2),
        ("d=3 pinning pipeline", Duration::from_secs(10), criterion_3),
        ("generic small families never pin", Duration::from_secs(300), criterion_4),
        ("strict transversal alternatives", Duration::MAX, criterion_5),
        ("d=3 main theorem demo", Duration::from_secs(120), criterion_6),
        ("d=4 construction and extraction", Duration::from_secs(1800), criterion_7),
        ("round trip and commutation", Duration::MAX, criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let (v, dt) = timed(*budget, f);
        if !v.pass {
            failed += 1;
        }
        println!(
            "acceptance {} {:<34} {} ({:.2}s) {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
