#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::PI;

use common::*;
use kicktop_core::classical::{
    classical_step, jacobian, lyapunov_exponent, map_matrix, ClassicalState, LyapunovOptions,
    MapParams,
};
use kicktop_core::coeff_stats::{
    chisq_cdf, chisq_pdf, chisq_sample, distance_report, RescaledCoefficients, RmseForm,
};
use kicktop_core::floquet::{
    build_floquet, diagonalize_by_sector, eigensystem, evolve_state, parity_operator,
    wigner_d_matrix, EigenMethod, KickedTopParams, Parity,
};
use kicktop_core::multifractal::{
    averaged_dq, expand_in_basis, fractal_dimensions, renyi_entropy, ExpansionBasis,
    ExpansionCoefficients,
};
use kicktop_core::sampling::task_rng;
use kicktop_core::spectral::{
    brody_cdf, brody_pdf, brody_sample, fit_brody, ratio_stats, spacings_from_quasienergies,
};
use kicktop_core::spin::{coherent_state, SpinBasis};
use kicktop_core::c64;
use proptest::prelude::*;
use rand::Rng;

const Q_GRID: [f64; 8] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, f64::INFINITY];

fn mat3_mul_t(a: &[[f64; 3]; 3]) -> f64 {
    // max |A^T A - I|
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let s: f64 = (0..3).map(|k| a[k][i] * a[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

fn reference_step(x: [f64; 3], kappa: f64, alpha: f64) -> [f64; 3] {
    let (sa, ca) = alpha.sin_cos();
    let u = [x[0], ca * x[1] - sa * x[2], sa * x[1] + ca * x[2]];
    let (sx, cx) = (kappa * u[2]).sin_cos();
    [cx * u[0] - sx * u[1], sx * u[0] + cx * u[1], u[2]]
}

// ---------------------------------------------------------------- spin

#[test]
fn coherent_states_are_normalized_on_the_angle_grid() {
    for twice_j in [1u32, 10, 100] {
        let basis = SpinBasis::from_twice_j(twice_j).unwrap();
        for a in 0..20 {
            for b in 0..20 {
                let theta = PI * a as f64 / 19.0;
                let phi = 2.0 * PI * b as f64 / 20.0;
                let cs = coherent_state(basis, theta, phi).unwrap();
                assert!(
                    (cs.norm_sqr() - 1.0).abs() < 1e-12,
                    "2j={twice_j} theta={theta} phi={phi}: {}",
                    cs.norm_sqr()
                );
            }
        }
    }
}

#[test]
fn coherent_probabilities_match_binomial_law() {
    for j in [1u32, 4, 12] {
        let basis = SpinBasis::integer(j).unwrap();
        for theta in [0.3, 1.1, 2.0, 2.9] {
            let cs = coherent_state(basis, theta, 0.7).unwrap();
            let expect = coherent_probabilities(j, theta);
            for (a, p) in cs.amplitudes.iter().zip(&expect) {
                assert!((a.norm_sqr() - p).abs() < 1e-13);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherent_state_norm_and_mean_spin(twice_j in 1u32..800, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let basis = SpinBasis::from_twice_j(twice_j).unwrap();
        let cs = coherent_state(basis, theta, phi).unwrap();
        prop_assert!((cs.norm_sqr() - 1.0).abs() < 1e-12);
        let m = cs.mean_spin(basis);
        let target = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        for k in 0..3 {
            prop_assert!((m[k] - target[k]).abs() < 1e-10, "{m:?} vs {target:?}");
        }
    }
}

// ---------------------------------------------------------------- floquet

#[test]
fn wigner_rotation_matches_matrix_exponential() {
    for twice_j in [1u32, 2, 3, 4, 10, 20] {
        let basis = SpinBasis::from_twice_j(twice_j).unwrap();
        for alpha in [0.3, 4.0 * PI / 7.0, 2.5, 5.9] {
            let d = wigner_d_matrix(basis, alpha).unwrap();
            let r = rotation_x(twice_j, alpha);
            let n = twice_j as usize + 1;
            for a in 0..n {
                for b in 0..n {
                    assert!(
                        (d.get(a, b) - r[a][b]).norm() < 1e-12,
                        "2j={twice_j} alpha={alpha} ({a},{b})"
                    );
                }
            }
        }
    }
}

#[test]
fn small_spin_eigenphases_match_characteristic_polynomial_roots() {
    for j in 1u32..=3 {
        for kappa in [0.3, 1.7, 5.0, 12.0] {
            for alpha in [0.5, 4.0 * PI / 7.0, 2.9, 4.4] {
                let oracle = brute_force_eigenphases(&floquet_matrix(j, kappa, alpha));
                let min_gap = oracle
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::INFINITY, f64::min);
                // the root finder is only 1e-10 accurate for separated roots
                assert!(min_gap > 1e-5, "j={j} kappa={kappa} alpha={alpha} gap {min_gap}");
                let params = KickedTopParams::new(j, kappa, alpha).unwrap();
                for method in [EigenMethod::Full, EigenMethod::Sector] {
                    let eig = eigensystem(&params, method).unwrap();
                    for nu in eig.quasienergies() {
                        let d = oracle
                            .iter()
                            .map(|o| circular_distance(*o, *nu))
                            .fold(f64::INFINITY, f64::min);
                        assert!(d < 1e-10, "j={j} kappa={kappa} alpha={alpha} {method:?}: {d}");
                    }
                }
            }
        }
    }
}

#[test]
fn floquet_determinant_has_unit_modulus() {
    for (j, kappa, alpha) in [(2u32, 3.0, 1.0), (3, 7.0, 4.0 * PI / 7.0)] {
        let c = characteristic_polynomial(&floquet_matrix(j, kappa, alpha));
        assert!((c[0].norm() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn free_evolution_weights_have_closed_form() {
    // kappa = alpha = 0: F is the identity and the resolved eigenbasis is
    // (|m> +- |-m>)/sqrt 2 together with |0>.
    let j = 6u32;
    let params = KickedTopParams::new(j, 0.0, 0.0).unwrap();
    let eig = eigensystem(&params, EigenMethod::Full).unwrap();
    let basis = params.basis();
    let cs = coherent_state(basis, 1.1, 0.4).unwrap();
    let w = expand_in_basis(&cs, &eig, ExpansionBasis::Full).unwrap();
    let c = &cs.amplitudes;
    let n = c.len();
    let mid = j as usize;
    let mut expect = vec![c[mid].norm_sqr()];
    for k in 1..=mid {
        let (a, b) = (c[mid + k], c[mid - k]);
        expect.push((a + b).norm_sqr() / 2.0);
        expect.push((a - b).norm_sqr() / 2.0);
    }
    let mut got = w.weights().to_vec();
    expect.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    assert_eq!(got.len(), n);
    for (g, e) in got.iter().zip(&expect) {
        assert!((g - e).abs() < 1e-12, "{g} vs {e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn floquet_is_unitary_and_parity_symmetric(j in 1u32..40, kappa in 0.0..20.0f64, alpha in 0.0..(2.0 * PI)) {
        let params = KickedTopParams::new(j, kappa, alpha).unwrap();
        let f = build_floquet(&params).unwrap();
        prop_assert!(f.unitarity_defect() < 1e-10);
        let p = parity_operator(params.basis()).unwrap();
        prop_assert!(f.parity_defect(&p) < 1e-10);
    }

    #[test]
    fn eigensystem_is_orthonormal_with_sharp_sectors(j in 1u32..30, kappa in 0.0..15.0f64, alpha in 0.0..(2.0 * PI)) {
        let params = KickedTopParams::new(j, kappa, alpha).unwrap();
        let f = build_floquet(&params).unwrap();
        let eig = eigensystem(&params, EigenMethod::Full).unwrap();
        prop_assert_eq!(eig.sector_count(Parity::Even), j as usize + 1);
        prop_assert_eq!(eig.sector_count(Parity::Odd), j as usize);
        let n = eig.len();
        let v = eig.eigenvectors();
        for a in 0..n {
            let va = eig.eigenvector(a);
            let fv = f.matrix().apply(&va);
            let ph = c64::from_polar(1.0, eig.quasienergies()[a]);
            let res: f64 = fv.iter().zip(&va).map(|(x, y)| (x - ph * y).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res < 1e-8, "residual {res}");
            for b in 0..n {
                let g: c64 = (0..n).map(|r| v[(r, a)].conj() * v[(r, b)]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                prop_assert!((g - c64::new(target, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn both_diagonalization_routes_agree(j in 1u32..40, kappa in 0.0..15.0f64, alpha in 0.0..(2.0 * PI)) {
        let params = KickedTopParams::new(j, kappa, alpha).unwrap();
        let full = eigensystem(&params, EigenMethod::Full).unwrap();
        let sector = diagonalize_by_sector(&params).unwrap();
        for p in [Parity::Even, Parity::Odd] {
            let (a, b) = (full.sector(p), sector.sector(p));
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(circular_distance(*x, *y) < 1e-8, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn evolution_composes(a in 0usize..20, b in 0usize..20, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let params = KickedTopParams::new(20, 7.0, 4.0 * PI / 7.0).unwrap();
        let f = build_floquet(&params).unwrap();
        let psi = coherent_state(params.basis(), theta, phi).unwrap().amplitudes;
        let direct = evolve_state(&f, &psi, a + b).unwrap();
        let staged = evolve_state(&f, &evolve_state(&f, &psi, a).unwrap(), b).unwrap();
        let d = direct.iter().zip(&staged).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12);
        let norm: f64 = direct.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }
}

// ---------------------------------------------------------------- classical

#[test]
fn classical_norm_survives_long_orbits() {
    for (kappa, alpha) in [(0.4, 4.0 * PI / 7.0), (7.0, 4.0 * PI / 7.0), (50.0, PI / 2.0)] {
        let params = MapParams { kappa, alpha };
        let mut s = ClassicalState::from_angles(1.0, 0.3);
        for _ in 0..100_000 {
            s = classical_step(&s, &params);
        }
        assert!((s.norm() - 1.0).abs() < 1e-11, "kappa={kappa}: {}", s.norm());
    }
}

#[test]
fn shifted_precession_is_a_fixed_reflection_of_the_orbit() {
    // F_{alpha+pi} = P F_alpha with P = diag(1, -1, -1) commuting with F_alpha
    let alpha = 4.0 * PI / 7.0;
    let (a, b) = (MapParams { kappa: 3.0, alpha }, MapParams { kappa: 3.0, alpha: alpha + PI });
    let mut s = ClassicalState::from_angles(0.9, 2.0);
    let mut t = s;
    for n in 1..=12 {
        s = classical_step(&s, &a);
        t = classical_step(&t, &b);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (u, v) = (s.vector(), t.vector());
        let d = (u[0] - v[0]).abs().max((sign * u[1] - v[1]).abs()).max((sign * u[2] - v[2]).abs());
        assert!(d < 1e-9, "kick {n}: {d}");
    }
}

#[test]
fn shifted_precession_preserves_lyapunov_statistics() {
    // matched Haar sets: S_i under alpha and -S_i under alpha + pi
    let alpha = 4.0 * PI / 7.0;
    let opts = LyapunovOptions::with_kicks(1000);
    let n = 300;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let (t, p) = kicktop_core::sampling::haar_point(&mut task_rng(11, i));
        let s = ClassicalState::from_angles(t, p);
        let v = s.vector();
        let neg = ClassicalState::new([-v[0], -v[1], -v[2]]).unwrap();
        a.push(lyapunov_exponent(&s, &MapParams { kappa: 3.0, alpha }, &opts).unwrap().lambda);
        b.push(lyapunov_exponent(&neg, &MapParams { kappa: 3.0, alpha: alpha + PI }, &opts).unwrap().lambda);
    }
    let stats = |x: &[f64]| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let v = x.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
        (m, (v / x.len() as f64).sqrt())
    };
    let ((ma, sa), (mb, sb)) = (stats(&a), stats(&b));
    assert!((ma - mb).abs() < 3.0 * (sa * sa + sb * sb).sqrt(), "{ma} vs {mb}");
}

#[test]
fn lyapunov_estimate_is_stable_under_doubled_kicks() {
    let params = MapParams { kappa: 7.0, alpha: 4.0 * PI / 7.0 };
    for (t, p) in [(0.4, 0.1), (1.3, 2.0), (2.2, -1.0), (2.8, 3.0)] {
        let s = ClassicalState::from_angles(t, p);
        let short = lyapunov_exponent(&s, &params, &LyapunovOptions::with_kicks(5000)).unwrap();
        let long = lyapunov_exponent(&s, &params, &LyapunovOptions::with_kicks(10_000)).unwrap();
        let tol = 2.0 * (short.stderr.powi(2) + long.stderr.powi(2)).sqrt();
        assert!((short.lambda - long.lambda).abs() < tol, "{short:?} {long:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kick_matrix_is_orthogonal(theta in 0.0..PI, phi in -PI..PI, kappa in 0.0..60.0f64, alpha in 0.0..(2.0 * PI)) {
        let m = map_matrix(&ClassicalState::from_angles(theta, phi), &MapParams { kappa, alpha });
        prop_assert!(mat3_mul_t(&m) < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences(theta in 0.0..PI, phi in -PI..PI, kappa in 0.0..20.0f64, alpha in 0.0..(2.0 * PI)) {
        let s = ClassicalState::from_angles(theta, phi);
        let analytic = jacobian(&s, &MapParams { kappa, alpha });
        let numeric = fd_jacobian(&|x| reference_step(x, kappa, alpha), s.vector(), 1e-6);
        for r in 0..3 {
            for c in 0..3 {
                prop_assert!((analytic[r][c] - numeric[r][c]).abs() < 1e-6,
                    "({r},{c}) {} vs {}", analytic[r][c], numeric[r][c]);
            }
        }
    }
}

// ---------------------------------------------------------------- spectral

#[test]
fn brody_density_has_unit_mass_and_mean() {
    for beta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mass = integrate_half_line(&|s| brody_pdf(s, beta), 1e-12);
        let mean = integrate_half_line(&|s| s * brody_pdf(s, beta), 1e-12);
        assert!((mass - 1.0).abs() < 1e-8, "beta={beta} mass {mass}");
        assert!((mean - 1.0).abs() < 1e-8, "beta={beta} mean {mean}");
        let s0 = 1.3;
        let cdf = integrate(&|s| brody_pdf(s, beta), 0.0, s0, 1e-13);
        assert!((cdf - brody_cdf(s0, beta)).abs() < 1e-8);
    }
}

#[test]
fn brody_fit_recovers_synthetic_exponent() {
    for (k, beta) in [0.0, 0.3, 0.7, 1.0].into_iter().enumerate() {
        let mut rng = task_rng(2024, k as u64);
        let mut level = 0.0;
        let levels: Vec<f64> = (0..100_001)
            .map(|_| {
                level += brody_sample(beta, &mut rng);
                level
            })
            .collect();
        let ens = spacings_from_quasienergies(&levels, false).unwrap();
        let fit = fit_brody(&ens).unwrap();
        assert!((fit.beta - beta).abs() < 0.03, "beta* = {beta}, fit {}", fit.beta);
    }
}

#[test]
fn parity_sectors_give_consistent_brody_exponents() {
    for kappa in [0.4, 7.0] {
        let params = KickedTopParams::new(300, kappa, 4.0 * PI / 7.0).unwrap();
        let eig = diagonalize_by_sector(&params).unwrap();
        let fits: Vec<f64> = [Parity::Even, Parity::Odd]
            .iter()
            .map(|&p| fit_brody(&spacings_from_quasienergies(&eig.sector(p), true).unwrap()).unwrap().beta)
            .collect();
        assert!((fits[0] - fits[1]).abs() < 0.2, "kappa={kappa}: {fits:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_statistic_is_scale_free(gaps in prop::collection::vec(1e-3..10.0f64, 3..200), scale in 1e-6..1e6f64) {
        let a = ratio_stats(&gaps).unwrap();
        let scaled: Vec<f64> = gaps.iter().map(|g| g * scale).collect();
        let b = ratio_stats(&scaled).unwrap();
        prop_assert!((a.mean_r - b.mean_r).abs() < 1e-12);
        prop_assert!(a.mean_r > 0.0 && a.mean_r <= 1.0);
    }

    #[test]
    fn spacings_have_unit_mean(mut nu in prop::collection::vec(-PI..PI, 3..300), periodic in any::<bool>()) {
        nu.sort_by(f64::total_cmp);
        if let Ok(ens) = spacings_from_quasienergies(&nu, periodic) {
            let m = ens.spacings.iter().sum::<f64>() / ens.len() as f64;
            prop_assert!((m - 1.0).abs() < 1e-10);
            prop_assert!(ens.spacings.iter().all(|&s| s >= 0.0));
        }
    }
}

// ---------------------------------------------------------------- multifractal

fn random_weights<R: Rng>(rng: &mut R, n: usize) -> ExpansionCoefficients {
    // squared moduli of a Gaussian complex vector, with some sparse states
    let sparse = rng.random_bool(0.2);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.random_bool(0.7) {
                0.0
            } else {
                let (a, b): (f64, f64) = (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                (a * a + b * b) * rng.random::<f64>().powi(3)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    ExpansionCoefficients::new(w).unwrap()
}

#[test]
fn dimensions_are_bounded_and_monotone_on_random_states() {
    let mut rng = task_rng(7, 0);
    for _ in 0..10_000 {
        let n = rng.random_range(2..300);
        let w = random_weights(&mut rng, n);
        let d = fractal_dimensions(&w, &Q_GRID).unwrap().dimensions;
        for k in 0..d.len() {
            assert!(d[k] >= -1e-12 && d[k] <= 1.0 + 1e-12, "{d:?}");
            if k > 0 {
                assert!(d[k] <= d[k - 1] + 1e-12, "{d:?}");
            }
        }
        if w.weights().iter().all(|&x| x > 0.0) {
            assert!((d[0] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn dimensions_are_bounded_and_monotone_on_coherent_states() {
    let params = KickedTopParams::new(60, 3.0, 4.0 * PI / 7.0).unwrap();
    let eig = eigensystem(&params, EigenMethod::Sector).unwrap();
    let pts = kicktop_core::sampling::haar_points(5, 400);
    for (t, p) in pts {
        let cs = coherent_state(params.basis(), t, p).unwrap();
        for basis in [ExpansionBasis::Full, ExpansionBasis::Sector(Parity::Even)] {
            let w = expand_in_basis(&cs, &eig, basis).unwrap();
            let d = fractal_dimensions(&w, &Q_GRID).unwrap().dimensions;
            for k in 1..d.len() {
                assert!(d[k] <= d[k - 1] + 1e-12 && d[k] >= -1e-12 && d[k - 1] <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn expansion_reconstructs_the_state() {
    let params = KickedTopParams::new(40, 7.0, 4.0 * PI / 7.0).unwrap();
    let eig = eigensystem(&params, EigenMethod::Full).unwrap();
    let v = eig.eigenvectors();
    let n = eig.len();
    let cs = coherent_state(params.basis(), 1.2, -0.5).unwrap();
    let w: Vec<c64> = (0..n)
        .map(|i| (0..n).map(|r| v[(r, i)].conj() * cs.amplitudes[r]).sum())
        .collect();
    for r in 0..n {
        let back: c64 = (0..n).map(|i| v[(r, i)] * w[i]).sum();
        assert!((back - cs.amplitudes[r]).norm() < 1e-8);
    }
    let weights = expand_in_basis(&cs, &eig, ExpansionBasis::Full).unwrap();
    for i in 0..n {
        assert!((weights.weights()[i] - w[i].norm_sqr()).abs() < 1e-12);
    }
}

#[test]
fn averaged_dimensions_do_not_depend_on_thread_count() {
    let params = KickedTopParams::new(50, 7.0, 4.0 * PI / 7.0).unwrap();
    let eig = eigensystem(&params, EigenMethod::Sector).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| averaged_dq(&eig, 300, &[1.0, 2.0], 3, ExpansionBasis::Full).unwrap())
    };
    let (a, b, c) = (run(1), run(1), run(3));
    assert_eq!(a, b);
    for k in 0..2 {
        assert!((a.mean[k] - c.mean[k]).abs() <= 2.0 * a.stderr[k]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shannon_limit_is_bracketed(seed in any::<u64>(), n in 2usize..200) {
        let w = random_weights(&mut task_rng(seed, 0), n);
        let s1 = renyi_entropy(w.weights(), 1.0);
        let lo = renyi_entropy(w.weights(), 1.0 + 1e-4);
        let hi = renyi_entropy(w.weights(), 1.0 - 1e-4);
        prop_assert!(lo <= s1 + 1e-12 && s1 <= hi + 1e-12);
        prop_assert!((hi - s1).abs() < 1e-3 && (s1 - lo).abs() < 1e-3);
    }
}

// ---------------------------------------------------------------- coeff_stats

#[test]
fn chi_squared_density_has_unit_mass_and_requested_mean() {
    for nu in [1.0, 2.0, 4.0] {
        for mean_x in [0.5, 1.0, 2.0] {
            // x = t^2 removes the integrable singularity at zero for nu = 1
            let f = |t: f64, k: i32| {
                let t = t.max(1e-100);
                2.0 * t.powi(k) * chisq_pdf(t * t, nu, mean_x)
            };
            let mass = integrate_half_line(&|t| f(t, 1), 1e-13);
            let mean = integrate_half_line(&|t| f(t, 3), 1e-13);
            assert!((mass - 1.0).abs() < 1e-8, "nu={nu} mean_x={mean_x}: mass {mass}");
            assert!((mean - mean_x).abs() < 1e-8, "nu={nu} mean_x={mean_x}: mean {mean}");
        }
    }
}

#[test]
fn chi_squared_cdf_differentiates_to_the_density() {
    for nu in [1.0, 2.0, 4.0] {
        let mut worst = 0.0f64;
        for k in 0..=120 {
            let x = 10f64.powf(-4.0 + 5.5 * k as f64 / 120.0);
            let h = 1e-5 * x;
            let d = (chisq_cdf(x + h, nu, 1.3) - chisq_cdf(x - h, nu, 1.3)) / (2.0 * h);
            worst = worst.max((d - chisq_pdf(x, nu, 1.3)).abs());
        }
        assert!(worst < 1e-6, "nu={nu}: {worst}");
    }
}

#[test]
fn self_distance_is_small_on_matching_samples() {
    let mut rng = task_rng(99, 0);
    let x: Vec<f64> = (0..200_000).map(|_| chisq_sample(2, 1.0, &mut rng)).collect();
    let pool = RescaledCoefficients::from_values(x).unwrap();
    let near = distance_report(&pool, 2.0, RmseForm::Squared).unwrap();
    let far = distance_report(&pool, 1.0, RmseForm::Squared).unwrap();
    assert!(near.skld < 0.05 && near.rmse < 0.01, "{near:?}");
    assert!(far.skld > 5.0 * near.skld && far.rmse > 5.0 * near.rmse);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn distances_are_scale_free(seed in any::<u64>(), c in 0.01..100.0f64, nu in prop::sample::select(vec![1u32, 2, 4])) {
        let mut rng = task_rng(seed, 0);
        let x: Vec<f64> = (0..5000).map(|_| chisq_sample(nu, 1.0, &mut rng)).collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        for form in [RmseForm::Squared, RmseForm::LiteralAbs] {
            let a = distance_report(&RescaledCoefficients::from_values(x.clone()).unwrap(), 2.0, form).unwrap();
            let b = distance_report(&RescaledCoefficients::from_values(scaled.clone()).unwrap(), 2.0, form).unwrap();
            prop_assert!(a.skld >= 0.0 && a.rmse >= 0.0);
            prop_assert!((a.skld - b.skld).abs() < 1e-9 * (1.0 + a.skld), "{} vs {}", a.skld, b.skld);
            prop_assert!((a.rmse - b.rmse).abs() < 1e-9 * (1.0 + a.rmse), "{} vs {}", a.rmse, b.rmse);
        }
    }
}
