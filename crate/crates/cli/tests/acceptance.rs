//! Acceptance gate: one test per shipping criterion, each printing a
//! `criterion N: pass` line (visible with `--nocapture`; the test name
//! carries the same information in the default listing). Tolerances are
//! pinned here on purpose — loosening them is a contract change, not a fix.

use std::process::Command;
use std::time::Instant;

use fhutch_core::harness::{
    box_dimension, random_point_set, run_lemma14_suite, run_lemma15_suite,
};
use fhutch_core::hutchinson::{CorollaryForm, StopReason};
use fhutch_core::metric::{check_b_triangle, check_f_axioms_with, FGridSpec, TauGridSpec};
use fhutch_core::sample::SampleSpec;
use fhutch_core::{
    hausdorff, hausdorff_accelerated, AffineMap, BMetric, FGenerator, FKind, IfsSystem,
    IterateParams, Point, PointSet, SuiteSpec, TauGenerator,
};

/// The half-scale three-map system whose attractor is the gasket on
/// (0,0), (1,0), (0.5,1).
fn gasket_system(tau: TauGenerator) -> IfsSystem {
    let maps = vec![
        AffineMap::scale_translate(0.5, vec![0.0, 0.0]).unwrap(),
        AffineMap::scale_translate(0.5, vec![0.5, 0.0]).unwrap(),
        AffineMap::scale_translate(0.5, vec![0.25, 0.5]).unwrap(),
    ];
    IfsSystem::new(
        BMetric::Euclidean,
        maps,
        FGenerator::with_default_h(FKind::Log),
        tau,
    )
    .unwrap()
}

fn singleton(coords: &[f64]) -> PointSet {
    PointSet::from_rows(&[coords]).unwrap()
}

#[test]
fn criterion_1_snowflake_triangle_constant_is_exactly_two_to_p_minus_one() {
    let t0 = Instant::now();
    for p in [1.5, 2.0, 3.0] {
        let metric = BMetric::snowflake(BMetric::Euclidean, p).unwrap();
        let report =
            check_b_triangle(&metric, 2, &SampleSpec { count: 10_000, ..Default::default() })
                .unwrap();
        assert_eq!(report.b, 2f64.powf(p - 1.0), "claimed constant for p={p}");
        assert!(
            report.passed(),
            "p={p}: {} of {} triples broke the relaxed triangle inequality (worst ratio {})",
            report.violations.len(),
            report.triples,
            report.worst_ratio
        );
        assert!(report.worst_ratio <= report.b * (1.0 + 1e-12), "p={p} ratio slack");
    }

    // p = 2 on the scalars 0, 1, 3: the plain (b = 1) triangle inequality
    // fails, so the relaxation is genuinely needed.
    let metric = BMetric::snowflake(BMetric::Euclidean, 2.0).unwrap();
    let x = Point::new(vec![0.0]).unwrap();
    let z = Point::new(vec![1.0]).unwrap();
    let y = Point::new(vec![3.0]).unwrap();
    let dxy = metric.eval(&x, &y).unwrap();
    let via_z = metric.eval(&x, &z).unwrap() + metric.eval(&z, &y).unwrap();
    assert_eq!(dxy, 9.0);
    assert_eq!(via_z, 5.0);
    assert!(dxy > via_z, "b = 1 must fail on (0, 1, 3)");
    assert!(dxy <= 2.0 * via_z, "b = 2 must absorb (0, 1, 3)");

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "criterion 1 took {elapsed:.2}s, budget 1s");
    println!("criterion 1: pass — snowflake p in {{1.5, 2, 3}} honest on 10^4 triples each; (0,1,3) breaks b=1 ({elapsed:.2}s)");
}

#[test]
fn criterion_2_accelerated_hausdorff_matches_brute_force() {
    let t0 = Instant::now();
    let snowflake = BMetric::snowflake(BMetric::Euclidean, 2.0).unwrap();
    let metrics = [BMetric::Euclidean, snowflake];
    let mut rng = SampleSpec::default().rng();
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for pair in 0..100 {
        let dim = 1 + pair % 3;
        let metric = &metrics[(pair / 3) % 2];
        let a = random_point_set(&mut rng, dim, 500, -10.0, 10.0);
        let b = random_point_set(&mut rng, dim, 500, -10.0, 10.0);
        let brute = hausdorff(&a, &b, metric).unwrap();
        let accel = hausdorff_accelerated(&a, &b, metric).unwrap();
        let gap = (brute.value - accel.value).abs();
        worst = worst.max(gap);
        assert!(
            gap <= 1e-12,
            "pair {pair} (dim {dim}): brute {} vs accelerated {} differ by {gap:e}",
            brute.value,
            accel.value
        );
        checked += 1;
    }
    assert_eq!(checked, 100);

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion 2 took {elapsed:.2}s, budget 5s");
    println!("criterion 2: pass — 100 random pairs, dims 1–3, euclidean + snowflake p=2, worst gap {worst:e} ({elapsed:.2}s)");
}

#[test]
fn criterion_3_lemma_suites_run_clean_for_both_relaxation_constants() {
    let t0 = Instant::now();
    let snowflake = BMetric::snowflake(BMetric::Euclidean, 2.0).unwrap();
    for (label, metric) in [("euclidean b=1", BMetric::Euclidean), ("snowflake p=2 b=2", snowflake)]
    {
        let spec = SuiteSpec::default();
        assert_eq!(spec.cases, 1000, "the default suite size is the contract size");
        let l14 = run_lemma14_suite(&metric, 2, &spec).unwrap();
        assert!(
            l14.passed(),
            "{label}: union/monotonicity suite failed {} of {} cases; first: {:?}",
            l14.failures.len(),
            l14.cases,
            l14.failures.first()
        );
        let l15 = run_lemma15_suite(&metric, 2, &spec).unwrap();
        assert!(
            l15.passed(),
            "{label}: point-to-set suite failed {} of {} cases; first: {:?}",
            l15.failures.len(),
            l15.cases,
            l15.failures.first()
        );
    }

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 3 took {elapsed:.2}s, budget 10s");
    println!("criterion 3: pass — lemma suites clean, 10^3 cases each, b=1 and b=2 ({elapsed:.2}s)");
}

#[test]
fn criterion_4_halving_map_trace_is_exactly_the_dyadic_ladder() {
    let t0 = Instant::now();
    let system = IfsSystem::new(
        BMetric::AbsDiff,
        vec![AffineMap::scale_translate(0.5, vec![0.0]).unwrap()],
        FGenerator::with_default_h(FKind::Log),
        TauGenerator::constant(0.5).unwrap(),
    )
    .unwrap();
    let params =
        IterateParams { tol: 2f64.powi(-32), max_iter: 100, cell: None };
    let (result, trace) = system.iterate(&singleton(&[1.0]), &params).unwrap();
    assert_eq!(result.stop, StopReason::Converged);

    let steps = trace.step_distances();
    assert!(steps.len() > 31, "need rows through m = 30, got {}", steps.len());
    for (m, &h) in steps.iter().enumerate().take(31) {
        let expected = 2f64.powi(-(m as i32 + 1));
        assert!(
            (h - expected).abs() <= 1e-12,
            "step m={m}: H = {h:e}, expected 2^-(m+1) = {expected:e}"
        );
    }
    for w in steps.windows(2) {
        assert!(w[1] < w[0], "step distances must decrease: {} then {}", w[0], w[1]);
    }

    let elapsed = t0.elapsed().as_secs_f64();
    println!("criterion 4: pass — H(A_m, A_m+1) = 2^-(m+1) exactly for m ≤ 30, strictly decreasing ({elapsed:.2}s)");
}

#[test]
fn criterion_5_gasket_attractor_is_seed_independent_within_the_stated_bound() {
    let t0 = Instant::now();
    let system = gasket_system(TauGenerator::constant(0.05).unwrap());
    let cell = 2f64.powi(-10) * 2f64.sqrt();
    let tol = 2.0 * cell;
    let params = IterateParams { tol, max_iter: 30, cell: Some(cell) };
    let bound = system.metric().b() * (2.0 * tol + 2.0 * cell * 2f64.sqrt());

    let corners = PointSet::from_rows(&[
        &[0.0, 0.0],
        &[1.0, 0.0],
        &[0.0, 1.0],
        &[1.0, 1.0],
    ])
    .unwrap();
    let mut attractors = Vec::new();
    for (label, seed) in [("origin", singleton(&[0.0, 0.0])), ("corners", corners)] {
        let (result, trace) = system.iterate(&seed, &params).unwrap();
        assert_eq!(
            result.stop,
            StopReason::Converged,
            "{label}: stopped {} after {} steps",
            result.stop,
            trace.steps.len()
        );
        assert!(trace.steps.len() <= 30, "{label}: {} steps", trace.steps.len());
        assert!(
            result.residual <= bound,
            "{label}: residual {} exceeds {bound}",
            result.residual
        );
        attractors.push(result.attractor);
    }

    let gap = hausdorff(&attractors[0], &attractors[1], system.metric()).unwrap().value;
    assert!(gap <= bound, "attractors from different seeds differ by {gap} > {bound}");

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "criterion 5 took {elapsed:.2}s, budget 30s");
    println!("criterion 5: pass — both seeds converge ≤ 30 steps; pairwise gap {gap:.2e} ≤ {bound:.2e} ({elapsed:.2}s)");
}

#[test]
fn criterion_6_certificates_pass_clean_and_catch_a_doubled_map() {
    let t0 = Instant::now();
    let tau = TauGenerator::constant(2f64.ln() - 1e-3).unwrap();
    let system = gasket_system(tau.clone());
    let pairs = SampleSpec { count: 10_000, ..Default::default() };

    // Pointwise contraction: every map, zero violations.
    for idx in 0..3 {
        let report = system.certify_pointwise(idx, &pairs).unwrap();
        assert!(
            report.passed(),
            "map {idx}: {} violations, min slack {:e}",
            report.violations.len(),
            report.min_slack
        );
        assert_eq!(report.samples + report.skipped, 10_000, "map {idx} sample count");
    }

    // Set-level contraction along the first ten iterates of the orbit.
    let orbit = system.trajectory(&singleton(&[0.0, 0.0]), 10, None).unwrap();
    let orbit_pairs: Vec<(PointSet, PointSet)> =
        orbit.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    assert_eq!(orbit_pairs.len(), 10);
    let set_level = system.certify_set_level(&orbit_pairs).unwrap();
    assert!(
        set_level.passed(),
        "set-level: {} violations, min slack {:e}",
        set_level.violations.len(),
        set_level.min_slack
    );

    // Closed corollary forms agree with the direct inequality pair for pair,
    // under each form's own generator.
    for form in CorollaryForm::ALL {
        let report = system.certify_corollary(form, &pairs).unwrap();
        assert!(
            report.consistent(),
            "{}: {} verdict disagreements between the closed form and the direct inequality",
            form.id(),
            report.disagreements.len()
        );
    }

    // Fault injection: double the first map's linear part. The doubled map
    // is an isometry, so every certificate must notice.
    let faulted = IfsSystem::new(
        BMetric::Euclidean,
        vec![
            AffineMap::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0], None).unwrap(),
            AffineMap::scale_translate(0.5, vec![0.5, 0.0]).unwrap(),
            AffineMap::scale_translate(0.5, vec![0.25, 0.5]).unwrap(),
        ],
        FGenerator::with_default_h(FKind::Log),
        tau,
    )
    .unwrap();

    let bad_pointwise = faulted.certify_pointwise(0, &pairs).unwrap();
    assert!(
        !bad_pointwise.violations.is_empty(),
        "doubled map slipped through the pointwise certificate"
    );

    // Probe pairs that straddle the doubled map's fixed point, plus random
    // clouds for good measure.
    let mut rng = SampleSpec::default().rng();
    let mut probe_pairs = vec![(singleton(&[-5.0, 0.0]), singleton(&[5.0, 0.0]))];
    for _ in 0..4 {
        probe_pairs.push((
            random_point_set(&mut rng, 2, 60, -10.0, 10.0),
            random_point_set(&mut rng, 2, 60, -10.0, 10.0),
        ));
    }
    let bad_set_level = faulted.certify_set_level(&probe_pairs).unwrap();
    assert!(
        !bad_set_level.violations.is_empty(),
        "doubled map slipped through the set-level certificate (min slack {:e})",
        bad_set_level.min_slack
    );

    for form in CorollaryForm::ALL {
        let report = faulted.certify_corollary(form, &pairs).unwrap();
        assert!(
            !report.violations.is_empty(),
            "doubled map slipped through {}",
            form.id()
        );
    }

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "criterion 6 took {elapsed:.2}s, budget 10s");
    println!("criterion 6: pass — clean certificates at τ = ln2 − 1e-3; doubled map caught by all five ({elapsed:.2}s)");
}

#[test]
fn criterion_7_every_builtin_generator_passes_and_the_identity_gap_fails() {
    let t0 = Instant::now();
    for kind in FKind::ALL {
        let f = FGenerator::with_default_h(kind);
        let report = check_f_axioms_with(
            |alpha| f.eval(alpha).expect("probes are positive"),
            f.h(),
            &FGridSpec::default(),
        );
        assert!(
            report.all_pass(),
            "{kind:?}: monotone={} divergent={} tame={} (divergence {:e}, tameness {:e})",
            report.monotone,
            report.divergent_at_zero,
            report.tame_near_zero,
            report.divergence_value,
            report.tameness_value
        );
    }

    let identity = TauGenerator::from_expr("t", None).unwrap();
    let report = identity.check_liminf(&TauGridSpec::default());
    assert!(!report.passed(), "τ(t) = t vanishes at 0 and must be rejected");

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "criterion 7 took {elapsed:.2}s, budget 1s");
    println!("criterion 7: pass — 4 generators satisfy the axioms; τ(t)=t rejected ({elapsed:.2}s)");
}

#[test]
fn criterion_8_box_dimension_sanity_on_gasket_and_filled_square() {
    let t0 = Instant::now();
    let scales: Vec<f64> = (2..=6).map(|k| 2f64.powi(-k)).collect();

    let system = gasket_system(TauGenerator::constant(0.05).unwrap());
    let cell = 2f64.powi(-10) * 2f64.sqrt();
    let params = IterateParams { tol: 2.0 * cell, max_iter: 30, cell: Some(cell) };
    let (result, _) = system.iterate(&singleton(&[0.0, 0.0]), &params).unwrap();
    let gasket = box_dimension(&result.attractor, &scales).unwrap();
    let want = 3f64.ln() / 2f64.ln();
    assert!(
        (gasket.dimension - 1.585).abs() <= 0.08,
        "gasket dimension {} not within 1.585 ± 0.08 (ln3/ln2 = {want})",
        gasket.dimension
    );

    let mut coords = Vec::with_capacity(2 * 200 * 200);
    for i in 0..200 {
        for j in 0..200 {
            coords.push(i as f64 / 200.0);
            coords.push(j as f64 / 200.0);
        }
    }
    let square = PointSet::from_flat(2, coords).unwrap();
    let filled = box_dimension(&square, &scales).unwrap();
    assert!(
        (filled.dimension - 2.0).abs() <= 0.1,
        "filled square dimension {} not within 2 ± 0.1",
        filled.dimension
    );

    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion 8 took {elapsed:.2}s, budget 5s");
    println!(
        "criterion 8: pass — gasket {:.3} (target 1.585 ± 0.08), filled square {:.3} (target 2 ± 0.1) ({elapsed:.2}s)",
        gasket.dimension, filled.dimension
    );
}

#[test]
fn criterion_9_binary_verifies_all_presets_and_renders_reproducibly() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_fhutch");

    for preset in ["sierpinski", "cantor", "square"] {
        let out = Command::new(bin)
            .args(["verify", "-c", &format!("preset:{preset}"), "--suites", "all"])
            .output()
            .expect("binary should spawn");
        assert!(
            out.status.success(),
            "verify --suites all failed on preset {preset}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let dir = tempfile::tempdir().unwrap();
    let run = Command::new(bin)
        .args(["iterate", "-c", "preset:sierpinski", "-o", dir.path().to_str().unwrap()])
        .output()
        .expect("binary should spawn");
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let cloud = dir.path().join("attractor.csv");
    let mut images = Vec::new();
    for name in ["first.pgm", "second.pgm"] {
        let pgm = dir.path().join(name);
        let out = Command::new(bin)
            .args([
                "render",
                cloud.to_str().unwrap(),
                "-o",
                pgm.to_str().unwrap(),
                "--size",
                "512x512",
            ])
            .output()
            .expect("binary should spawn");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        images.push(std::fs::read(&pgm).unwrap());
    }
    assert_eq!(images[0].len(), "P5\n512 512\n255\n".len() + 512 * 512);
    assert_eq!(images[0], images[1], "512x512 render must be byte-stable across runs");

    let elapsed = t0.elapsed().as_secs_f64();
    println!("criterion 9: pass — verify exits 0 on all presets; 512x512 render byte-stable ({elapsed:.2}s)");
}
