//! Acceptance suite: every release-gating property of the crate, one
//! criterion per block, each printing a pass/fail line with its measured
//! figure. Tolerances are pinned here and nowhere else.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;

use isoradial::graph::{check_rhombic_embeddable, Color, EmbeddabilityDefect, QuadGraph};
use isoradial::integrability::{
    backlund, check_3d_consistency, check_zero_curvature, verify_isomonodromy, IsomonodromyKind,
    SystemKind,
};
use isoradial::labeling::{
    labeling_from_realization, lift_to_zd, weights_from_labeling, Realization, SlopeData,
};
use isoradial::linear::{
    discrete_exponential, extend_to_hull, integral_reconstruct, laplacian_apply, BrickFunction,
    QuadratureSpec, VertexFunction,
};
use isoradial::linearization::tangent_check;
use isoradial::num::{lambda_samples, SplitMix64};
use isoradial::special::{
    log_axis_even, log_axis_even_by_recursion, power_axis_even, power_axis_even_by_recursion,
    CoveringPoint, DiscreteLog, DiscretePower, PowerParameters,
};
use isoradial::{tiling, C64};

type Rational = Ratio<BigInt>;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, criterion: &str, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {criterion}: {detail}");
        if !pass {
            self.failures.push(format!("{criterion}: {detail}"));
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "acceptance criteria failed:\n{}",
            self.failures.join("\n")
        );
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn square_slopes() -> SlopeData {
    SlopeData::from_representatives(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap()
}

fn kagome_slopes() -> SlopeData {
    SlopeData::from_representatives(
        (0..3)
            .map(|k| C64::from_polar(1.0, (2 * k + 1) as f64 * std::f64::consts::PI / 6.0))
            .collect(),
    )
    .unwrap()
}

/// Laplacian defects of the normalized Green's function (times 2 pi).
fn green_defects(patch: &QuadGraph) -> (f64, f64) {
    let p = Realization::from_graph(patch).unwrap();
    let labeling = labeling_from_realization(patch, &p).unwrap();
    let slopes = SlopeData::from_labeling(&labeling).unwrap();
    let weights = weights_from_labeling(patch, &labeling).unwrap();
    let x0 = tiling::base_vertex(patch).unwrap();
    let green = isoradial::special::greens_function(patch, &labeling, &slopes, x0).unwrap();
    let mut f: VertexFunction = green
        .iter()
        .map(|(&v, z)| (v, z * std::f64::consts::TAU))
        .collect();
    for v in 0..patch.vertex_count() {
        f.entry(v).or_insert(C64::new(0.0, 0.0));
    }
    let lap = laplacian_apply(patch, &weights, &f, Color::Black).unwrap();
    let mut at_base = f64::INFINITY;
    let mut elsewhere = 0.0f64;
    for (v, val) in &lap {
        if *v == x0 {
            at_base = (val - std::f64::consts::TAU).norm();
        } else {
            elsewhere = elsewhere.max(val.norm());
        }
    }
    (at_base, elsewhere)
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();

    // ------------------------------------------------------------------
    // 1. Green's function normalization on the square lattice (radius 30)
    //    and on a quasiperiodic five-slope patch (radius 8).
    // ------------------------------------------------------------------
    {
        let t = Instant::now();
        let patch = tiling::square_patch_radius(30).unwrap();
        let (at_base, elsewhere) = green_defects(&patch);
        let elapsed = t.elapsed();
        gate.check(
            "1a green normalization, square radius 30",
            at_base <= 1e-9 && elsewhere <= 1e-10 && elapsed < Duration::from_secs(1),
            format!("delta defect {at_base:.2e}, harmonicity {elsewhere:.2e}, {elapsed:?}"),
        );

        let t = Instant::now();
        let (patch, _) = tiling::penrose_patch(8, 42).unwrap();
        let (at_base, elsewhere) = green_defects(&patch);
        let elapsed = t.elapsed();
        gate.check(
            "1b green normalization, five-slope radius 8",
            at_base <= 1e-9 && elsewhere <= 1e-10 && elapsed < Duration::from_secs(1),
            format!("delta defect {at_base:.2e}, harmonicity {elsewhere:.2e}, {elapsed:?}"),
        );
    }

    // ------------------------------------------------------------------
    // 2. Axis closed forms in exact rational arithmetic, n <= 50.
    // ------------------------------------------------------------------
    {
        let rec = log_axis_even_by_recursion::<Rational>(50);
        let mut ok = rec[1] == rat(2, 1) && rec[2] == rat(8, 3);
        for (n, v) in rec.iter().enumerate() {
            ok &= *v == log_axis_even::<Rational>(n);
        }
        gate.check(
            "2a log axis closed form (exact rational, n <= 50)",
            ok,
            format!("f_2 = {}, f_4 = {}", rec[1], rec[2]),
        );

        let mut ok = true;
        for gamma in [rat(1, 3), rat(1, 2), rat(2, 3)] {
            let rec = power_axis_even_by_recursion(&gamma, 50);
            for (n, v) in rec.iter().enumerate() {
                ok &= *v == power_axis_even(&gamma, n);
            }
        }
        let half_trivial = (0..=25).all(|n| power_axis_even(&rat(1, 2), n) == rat(1, 1));
        gate.check(
            "2b power axis closed form (gamma in {1/3, 1/2, 2/3}, n <= 50)",
            ok && half_trivial,
            format!("gamma = 1/2 trivial: {half_trivial}"),
        );
    }

    // ------------------------------------------------------------------
    // 3. Asymptotic constant of the even log axis at n = 1e5.
    // ------------------------------------------------------------------
    {
        let t = Instant::now();
        let n = 100_000usize;
        let mut sum = 0.0f64;
        for l in 1..=n {
            sum += 2.0 / (2.0 * l as f64 - 1.0);
        }
        let deviation = (sum - (2.0 * n as f64).ln() - 1.2703628454614782).abs();
        let elapsed = t.elapsed();
        gate.check(
            "3 asymptotic constant log 2 + Euler gamma",
            deviation <= 1e-4 && elapsed < Duration::from_secs(1),
            format!("deviation {deviation:.2e}, {elapsed:?}"),
        );
    }

    // ------------------------------------------------------------------
    // 4. 3D consistency fuzz: 1000 cubes per system, random unit labels.
    // ------------------------------------------------------------------
    {
        let t = Instant::now();
        let mut worst = [0.0f64; 3];
        let systems = [
            SystemKind::CauchyRiemann,
            SystemKind::CrossRatio,
            SystemKind::Hirota,
        ];
        let mut rng = SplitMix64::new(4);
        for _ in 0..1000 {
            let vals: Vec<C64> = (0..4)
                .map(|_| rng.complex_box() + C64::new(2.0, 2.0))
                .collect();
            let a0 = rng.unit();
            let mut a1 = rng.unit();
            while (a1 - a0).norm() < 0.1 || (a1 + a0).norm() < 0.1 {
                a1 = rng.unit();
            }
            let l = rng.complex_box() * 3.0 + C64::new(4.0, 0.0);
            for (i, kind) in systems.iter().enumerate() {
                let vertical = if matches!(kind, SystemKind::CrossRatio) {
                    l * l
                } else {
                    l
                };
                let r = check_3d_consistency(
                    *kind, vals[0], vals[1], vals[2], vals[3], a0, a1, vertical,
                )
                .unwrap();
                worst[i] = worst[i].max(r.deviation);
            }
        }
        let elapsed = t.elapsed();
        gate.check(
            "4 3D consistency fuzz (1000 cubes per system)",
            worst.iter().all(|&w| w <= 1e-10) && elapsed < Duration::from_secs(5),
            format!(
                "CR {:.2e}, cross-ratio {:.2e}, Hirota {:.2e}, {elapsed:?}",
                worst[0], worst[1], worst[2]
            ),
        );
    }

    // ------------------------------------------------------------------
    // 5. Zero curvature on every face of radius-10 patches, 16 sampled
    //    spectral values.
    // ------------------------------------------------------------------
    {
        let lambdas = lambda_samples(16, 3.0, 5);
        let patch = tiling::square_patch_radius(10).unwrap();
        let p = Realization::from_graph(&patch).unwrap();
        let labeling = labeling_from_realization(&patch, &p).unwrap();
        let slopes = SlopeData::from_labeling(&labeling).unwrap();
        let x0 = tiling::vertex_at(&patch, C64::new(0.0, 0.0)).unwrap();
        let lift = lift_to_zd(&patch, &labeling, &slopes, x0).unwrap();

        // CR with the discrete exponential.
        let z0 = C64::new(0.37, 2.11);
        let exp_f: VertexFunction = lift
            .iter()
            .map(|(&v, n)| (v, discrete_exponential(n, z0, slopes.labels()).unwrap()))
            .collect();
        // Cross-ratio with the identity solution.
        let id_z: VertexFunction = (0..patch.vertex_count())
            .map(|v| (v, p.position(v)))
            .collect();
        let mut worst_cr = 0.0f64;
        let mut worst_q = 0.0f64;
        for fi in 0..patch.faces().len() {
            let f = &patch.faces()[fi];
            let (a0, a1) = labeling.face_labels(&patch, fi).unwrap();
            let dev = check_zero_curvature(
                SystemKind::CauchyRiemann,
                [exp_f[&f.x0], exp_f[&f.y0], exp_f[&f.x1], exp_f[&f.y1]],
                a0,
                a1,
                &lambdas,
            )
            .unwrap();
            worst_cr = worst_cr.max(dev);
            let dev = check_zero_curvature(
                SystemKind::CrossRatio,
                [id_z[&f.x0], id_z[&f.y0], id_z[&f.x1], id_z[&f.y1]],
                a0,
                a1,
                &lambdas,
            )
            .unwrap();
            worst_q = worst_q.max(dev);
        }

        // Hirota with the gamma = 1/3 power function on the sector window.
        let gamma = 1.0 / 3.0;
        let window = tiling::square_window(0, 10, 0, 10, true).unwrap();
        let wp = Realization::from_graph(&window).unwrap();
        let wl = labeling_from_realization(&window, &wp).unwrap();
        let mut power =
            DiscretePower::new(square_slopes(), PowerParameters::new(gamma).unwrap());
        let w: VertexFunction = (0..window.vertex_count())
            .map(|v| {
                let pos = wp.position(v);
                let n = vec![pos.re.round() as i64, pos.im.round() as i64];
                (v, power.value_w(&CoveringPoint::new(1, n)).unwrap())
            })
            .collect();
        let mut worst_h = 0.0f64;
        for fi in 0..window.faces().len() {
            let f = &window.faces()[fi];
            let (a0, a1) = wl.face_labels(&window, fi).unwrap();
            let dev = check_zero_curvature(
                SystemKind::Hirota,
                [w[&f.x0], w[&f.y0], w[&f.x1], w[&f.y1]],
                a0,
                a1,
                &lambdas,
            )
            .unwrap();
            worst_h = worst_h.max(dev);
        }
        gate.check(
            "5 zero curvature (exp | identity | power) at 16 samples",
            worst_cr <= 1e-10 && worst_q <= 1e-10 && worst_h <= 1e-10,
            format!("CR {worst_cr:.2e}, cross-ratio {worst_q:.2e}, Hirota {worst_h:.2e}"),
        );
    }

    // ------------------------------------------------------------------
    // 6. Isomonodromic pole structure of the logarithm on [0,6]^3 and the
    //    power function on [0,6]^2.
    // ------------------------------------------------------------------
    {
        let slopes = kagome_slopes();
        let mut log = DiscreteLog::new(slopes.clone());
        let window = log.octant_window(1, 7).unwrap();
        let lambdas = lambda_samples(2 * 3 + 8, 3.0, 6);
        let rep = verify_isomonodromy(
            IsomonodromyKind::CauchyRiemann,
            &window,
            slopes.labels(),
            &lambdas,
        )
        .unwrap();
        gate.check(
            "6a isomonodromy of the discrete logarithm on [0,6]^3",
            rep.max_deviation <= 1e-8 && rep.constraint_residual <= 1e-10,
            format!(
                "deviation {:.2e}, constraint {:.2e}",
                rep.max_deviation, rep.constraint_residual
            ),
        );

        let gamma = 1.0 / 3.0;
        let slopes = square_slopes();
        let mut power = DiscretePower::new(slopes.clone(), PowerParameters::new(gamma).unwrap());
        let window = power.octant_window_w(1, 7).unwrap();
        let lambdas = lambda_samples(2 * 2 + 8, 3.0, 7);
        let rep = verify_isomonodromy(
            IsomonodromyKind::Hirota { gamma },
            &window,
            slopes.labels(),
            &lambdas,
        )
        .unwrap();
        gate.check(
            "6b isomonodromy of the power function on [0,6]^2",
            rep.max_deviation <= 1e-8 && rep.constraint_residual <= 1e-10,
            format!(
                "deviation {:.2e}, constraint {:.2e}, structure {:.2e}",
                rep.max_deviation, rep.constraint_residual, rep.structure_defect
            ),
        );
    }

    // ------------------------------------------------------------------
    // 7. Contour reconstruction of 20 random exponentially bounded
    //    discrete holomorphic functions on [0,4]^3.
    // ------------------------------------------------------------------
    {
        let t = Instant::now();
        let slopes = kagome_slopes();
        let mut rng = SplitMix64::new(77);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let mut known = std::collections::BTreeMap::new();
            known.insert(vec![0i64, 0, 0], rng.complex_box());
            for k in 0..3usize {
                for m in 1..=4i64 {
                    let mut n = vec![0i64; 3];
                    n[k] = m;
                    known.insert(n, rng.complex_box() * 2.0);
                }
            }
            let ext = extend_to_hull(&known, slopes.labels(), 1e-8).unwrap();
            let rep = integral_reconstruct(&ext, &slopes, &QuadratureSpec::default()).unwrap();
            worst = worst.max(rep.max_error);
        }
        let elapsed = t.elapsed();
        gate.check(
            "7 contour reconstruction of 20 random bounded functions",
            worst <= 1e-6 && elapsed < Duration::from_secs(10),
            format!("max error {worst:.2e}, {elapsed:?}"),
        );
    }

    // ------------------------------------------------------------------
    // 8. Tangent of the power family at gamma = 1/2 is the logarithm, with
    //    quadratic decay in the step.
    // ------------------------------------------------------------------
    {
        let slopes = square_slopes();
        let window = 8i64;
        let err_at = |h: f64| -> f64 {
            let mut plus =
                DiscretePower::new(slopes.clone(), PowerParameters::new(0.5 + h).unwrap());
            let mut minus =
                DiscretePower::new(slopes.clone(), PowerParameters::new(0.5 - h).unwrap());
            let mut log = DiscreteLog::new(slopes.clone());
            let mut worst = 0.0f64;
            let brick = isoradial::labeling::Brick {
                lo: vec![0, 0],
                hi: vec![window, window],
            };
            for n in brick.points() {
                let pt = CoveringPoint::new(1, n.clone());
                let wp = plus.value_w(&pt).unwrap();
                let wm = minus.value_w(&pt).unwrap();
                let diff = (wp / wm).ln() / (4.0 * h);
                worst = worst.max((diff - log.value(&pt).unwrap()).norm());
            }
            worst
        };
        let coarse = err_at(1e-3);
        let fine = err_at(1e-4);
        let ratio = coarse / fine.max(1e-300);
        gate.check(
            "8 power-family tangent matches the logarithm",
            fine <= 1e-6 && ratio > 25.0 && ratio < 400.0,
            format!("error(1e-4) {fine:.2e}, decay ratio {ratio:.1}"),
        );
    }

    // ------------------------------------------------------------------
    // 9. Bäcklund transformations: zero solution to the exponential, and
    //    the dual circle pattern of the power pattern.
    // ------------------------------------------------------------------
    {
        let patch = tiling::square_patch_radius(10).unwrap();
        let p = Realization::from_graph(&patch).unwrap();
        let labeling = labeling_from_realization(&patch, &p).unwrap();
        let slopes = SlopeData::from_labeling(&labeling).unwrap();
        let x0 = tiling::vertex_at(&patch, C64::new(0.0, 0.0)).unwrap();
        let lift = lift_to_zd(&patch, &labeling, &slopes, x0).unwrap();
        let zero: VertexFunction = (0..patch.vertex_count())
            .map(|v| (v, C64::new(0.0, 0.0)))
            .collect();
        let z0 = C64::new(3.0, 0.5);
        let hat = backlund(
            SystemKind::CauchyRiemann,
            &patch,
            &labeling,
            &zero,
            z0,
            x0,
            1.0.into(),
            1e-9,
        )
        .unwrap();
        let mut worst_exp = 0.0f64;
        for (v, n) in &lift {
            let expect = discrete_exponential(n, z0, slopes.labels()).unwrap();
            worst_exp = worst_exp.max((hat[v] - expect).norm() / expect.norm().max(1.0));
        }

        let gamma = 1.0 / 3.0;
        let window = tiling::square_window(0, 10, 0, 10, true).unwrap();
        let wp = Realization::from_graph(&window).unwrap();
        let wl = labeling_from_realization(&window, &wp).unwrap();
        let mut power =
            DiscretePower::new(square_slopes(), PowerParameters::new(gamma).unwrap());
        let w: VertexFunction = (0..window.vertex_count())
            .map(|v| {
                let pos = wp.position(v);
                let n = vec![pos.re.round() as i64, pos.im.round() as i64];
                (v, power.value_w(&CoveringPoint::new(1, n)).unwrap())
            })
            .collect();
        let seed = tiling::vertex_at(&window, C64::new(0.0, 0.0)).unwrap();
        let hat = backlund(
            SystemKind::Hirota,
            &window,
            &wl,
            &w,
            -C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            seed,
            1.0.into(),
            1e-8,
        )
        .unwrap();
        let mut dual_defect = 0.0f64;
        let mut positive = true;
        for (v, val) in &hat {
            let pos = wp.position(*v);
            let even = (pos.re.round() as i64 + pos.im.round() as i64) % 2 == 0;
            if even {
                dual_defect = dual_defect.max((val.norm() - 1.0).abs());
            } else {
                dual_defect = dual_defect.max(val.im.abs());
                positive &= val.re > 0.0;
            }
        }
        gate.check(
            "9 Bäcklund: exponential from zero; dual circle pattern",
            worst_exp <= 1e-10 && dual_defect <= 1e-10 && positive,
            format!("exponential {worst_exp:.2e}, dual reduction {dual_defect:.2e}, radii positive {positive}"),
        );
    }

    // ------------------------------------------------------------------
    // 10. Embeddability gate: generators pass, the doubled-square sphere
    //     fails with a double-crossing certificate.
    // ------------------------------------------------------------------
    {
        let mut ok = true;
        let mut detail = String::new();
        for (name, patch) in [
            ("square", tiling::square_patch_radius(6).unwrap()),
            ("dual-kagome", tiling::dual_kagome_patch(4).unwrap()),
            ("five-slope", tiling::penrose_patch(5, 42).unwrap().0),
        ] {
            let report = check_rhombic_embeddable(&patch);
            ok &= report.embeddable;
            detail.push_str(&format!("{name} ok; "));
        }
        let colors = vec![Color::Black, Color::White, Color::Black, Color::White];
        let faces = vec![[0, 1, 2, 3], [2, 1, 0, 3]];
        let sphere = QuadGraph::new(colors, faces, None, None).unwrap();
        let report = check_rhombic_embeddable(&sphere);
        let crossing = report.defects.iter().find_map(|d| match d {
            EmbeddabilityDefect::DoubleCrossing { faces, .. } => Some(faces.clone()),
            _ => None,
        });
        ok &= !report.embeddable && crossing == Some(vec![0, 1]);
        detail.push_str(&format!(
            "counterexample rejected with crossing faces {crossing:?}"
        ));
        gate.check("10 embeddability gate", ok, detail);
    }

    gate.finish();
}
