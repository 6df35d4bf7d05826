//! Cross-module properties on an exactly representable fixture and on generated instances.

use icpkit::oracle::N_MAX;
use icpkit::{
    certify, delta_residual, enumerate_solutions, generate_planted, inf_norm, natural_residual, projection_iterate,
    residual_norms, s_map, solve_with_restarts, DeltaFunction, DiagonalScaling, GeneratorSpec, IcpInstance,
    ImplicitMap, MapFamily, Matrix, MatrixFamily, SeededStream, SolveStatus, SolverConfig, ToleranceConfig, Vector,
};

fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

/// f(r) = r/2, A = [[2, 1], [1, 2]], b = (-4, 1), so H = r/2.
///
/// Cases by which H_i vanish:
/// both: r = 0, F = (-4, 1), rejected. H0 only: r = (0, -1/2), H1 < 0, rejected.
/// neither: F = 0 gives r = (3, -2), H1 < 0, rejected.
/// H1 only: F0 = 2r0 - 4 = 0, r = (2, 0), H = (1, 0), F = (0, 3). Unique solution.
fn fixture() -> IcpInstance {
    let c = Matrix::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
    let f = ImplicitMap::affine(c, Vector::zeros(2)).unwrap();
    IcpInstance::new(
        Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap(),
        v(&[-4.0, 1.0]),
        f,
    )
    .unwrap()
}

#[test]
fn fixture_solution_is_exact_everywhere() {
    let inst = fixture();
    let star = v(&[2.0, 0.0]);
    let res = enumerate_solutions(&inst, N_MAX).unwrap();
    assert_eq!(res.solutions, vec![star.clone()]);
    assert!(certify(&inst, &star).unwrap());

    assert!(inst
        .is_solution(&star, &ToleranceConfig::exact())
        .unwrap()
        .is_solution());
    assert_eq!(natural_residual(&inst, &star).unwrap(), Vector::zeros(2));
    assert_eq!(s_map(&inst, &star).unwrap(), inst.evaluate_h(&star).unwrap());
    for delta in DeltaFunction::catalog() {
        assert_eq!(
            delta_residual(&inst, &star, &delta).unwrap(),
            Vector::zeros(2),
            "{}",
            delta.name()
        );
    }
    let w = DiagonalScaling::new(vec![1e-3, 1e3]).unwrap();
    assert_eq!(
        residual_norms(&inst, &star, &w, &w.clone(), &DeltaFunction::tanh())
            .unwrap()
            .max(),
        0.0
    );
}

#[test]
fn fixture_perturbations_are_detected_by_every_residual() {
    let inst = fixture();
    for k in [1, 10, 26] {
        let eps = 0.5f64.powi(k);
        for (j, sign) in [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)] {
            let mut r = vec![2.0, 0.0];
            r[j] += sign * eps;
            let r = v(&r);
            assert!(!inst.is_solution(&r, &ToleranceConfig::exact()).unwrap().is_solution());
            assert!(inf_norm(&natural_residual(&inst, &r).unwrap()) > 0.0);
            assert_ne!(s_map(&inst, &r).unwrap(), inst.evaluate_h(&r).unwrap());
            for delta in DeltaFunction::catalog() {
                assert!(
                    inf_norm(&delta_residual(&inst, &r, &delta).unwrap()) > 0.0,
                    "{} at {r:?}",
                    delta.name()
                );
            }
            assert!(!certify(&inst, &r).unwrap() || eps <= 1e-8);
        }
    }
}

#[test]
fn solver_reaches_fixture_and_stays_there() {
    let inst = fixture();
    let cfg = SolverConfig::for_instance(&inst);
    let rep = projection_iterate(&inst, &Vector::zeros(2), &cfg).unwrap();
    assert_eq!(rep.status, SolveStatus::Converged);
    assert!(rep.final_point.distance_inf(&v(&[2.0, 0.0])).unwrap() <= 1e-9);
    assert!(certify(&inst, &rep.final_point).unwrap());

    let at_star = projection_iterate(&inst, &v(&[2.0, 0.0]), &cfg).unwrap();
    assert_eq!(at_star.iterations, 0);
    assert_eq!(at_star.final_point, v(&[2.0, 0.0]));
}

#[test]
fn restarts_prefer_the_converged_start() {
    let inst = fixture();
    let cfg = SolverConfig::for_instance(&inst).with_max_iters(3).unwrap();
    let starts = [v(&[1e6, -1e6]), v(&[2.0, 0.0]), Vector::zeros(2)];
    let best = solve_with_restarts(&inst, &cfg, &starts).unwrap();
    assert_eq!(best.status, SolveStatus::Converged);
    assert_eq!(best.iterations, 0);
}

fn planted(seed: u64, map_family: MapFamily) -> icpkit::PlantedInstance {
    generate_planted(&GeneratorSpec {
        n: 1 + (seed % 8) as usize,
        seed,
        matrix_family: MatrixFamily::ALL[(seed % 3) as usize],
        map_family,
        active_fraction: [0.0, 0.5, 1.0][(seed / 3 % 3) as usize],
    })
    .unwrap()
}

#[test]
fn s_equals_h_exactly_on_lcp_plants() {
    for seed in 0..200 {
        let p = planted(seed, MapFamily::Zero);
        let h = p.instance.evaluate_h(&p.planted).unwrap();
        assert_eq!(s_map(&p.instance, &p.planted).unwrap(), h, "seed {seed}");
    }
}

#[test]
fn s_matches_h_at_every_enumerated_solution() {
    for seed in 0..200 {
        let p = planted(seed, MapFamily::ContractiveAffine { gamma: 0.5 });
        for s in enumerate_solutions(&p.instance, N_MAX).unwrap().solutions {
            let h = p.instance.evaluate_h(&s).unwrap();
            let gap = inf_norm(&s_map(&p.instance, &s).unwrap().sub(&h).unwrap());
            assert!(gap <= 1e-10, "seed {seed}: ‖S - H‖ = {gap:e}");
        }
    }
}

#[test]
fn zero_sets_agree_across_formulations() {
    let mut stream = SeededStream::new(2024);
    for seed in 0..200 {
        let p = planted(seed, MapFamily::Zero);
        let n = p.instance.dim();
        let mut points = vec![p.planted.clone(), stream.point(n, 1.0)];
        let mut nudged = p.planted.to_vec();
        nudged[0] += 0.25;
        points.push(v(&nudged));
        for r in &points {
            let zero_r = inf_norm(&natural_residual(&p.instance, r).unwrap()) == 0.0;
            for delta in DeltaFunction::catalog() {
                let zero_g = inf_norm(&delta_residual(&p.instance, r, &delta).unwrap()) == 0.0;
                assert_eq!(zero_r, zero_g, "seed {seed} {}", delta.name());
            }
        }
    }
}

#[test]
fn converged_points_pass_the_loosened_predicate() {
    for seed in 0..100 {
        let p = generate_planted(&GeneratorSpec {
            n: 2 + (seed % 12) as usize,
            seed,
            matrix_family: MatrixFamily::DiagDominant,
            map_family: [MapFamily::Zero, MapFamily::ContractiveAffine { gamma: 0.5 }][(seed % 2) as usize],
            active_fraction: 0.5,
        })
        .unwrap();
        let cfg = SolverConfig::for_instance(&p.instance);
        let rep = projection_iterate(&p.instance, &Vector::zeros(p.instance.dim()), &cfg).unwrap();
        assert!(rep.converged(), "seed {seed}: {:?}", rep.status);
        let loose = 10.0 * cfg.resid_tol();
        let tol = ToleranceConfig::new(loose, loose, cfg.resid_tol()).unwrap();
        let check = p.instance.is_solution(&rep.final_point, &tol).unwrap();
        assert!(check.is_solution(), "seed {seed}: {check:?}");
    }
}
