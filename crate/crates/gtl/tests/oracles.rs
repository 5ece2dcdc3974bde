//! Reference values computed outside this crate (30-digit theta functions
//! and direct sums) and closed forms checked against the library.

// reference values are pasted at the precision they were computed in
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use approx::assert_relative_eq;
use gtl::graphon::{
    builtin_graphon, deterministic_graph, estimate_regularity, local_average, GraphonSpec,
};
use gtl::kernels::precise::measured_l2_error;
use gtl::kernels::{
    error_bound_tilde, eval_sn, exact_l2_error, plan_params, reconstruct_exact, AliasEngine,
    AliasingCoefficients, PeriodicGaussian, RegularizerParams, Route, SamplingKernel,
    DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_SERIES_TOL,
};
use gtl::quadrature::QuadOptions;
use gtl::signal::{coeffs_from_samples, l2_error, random_signal, BandlimitedSignal, IndexBand};
use gtl::wnn::WnnKernel;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn periodic_gaussian_matches_theta_quotient() {
    // theta_3(pi x, q) / theta_3(0, q) with q = exp(-1 / (2 sigma^2))
    let cases = [
        (0.5, 0.1, 0.958974740279115871232854847512),
        (0.5, 0.25, 0.786042976889136964994275647016),
        (0.5, 0.4, 0.614492828976085339164884863772),
        (2.0, 0.1, 0.454040738727245045699815329733),
        (2.0, 0.25, 0.00719188335582636565927486824133),
        (2.0, 0.4, 0.00000326224974506229262069317992),
        (5.0, 0.1, 0.00719188335582636560780136639638),
        (5.0, 0.25, 4.02964204129033756117003419179e-14),
    ];
    for (sigma, x, want) in cases {
        let g = PeriodicGaussian::new(sigma, DEFAULT_SERIES_TOL).unwrap();
        for route in [Route::Fourier, Route::Poisson] {
            let got = g.eval_route(x, route);
            assert!(
                (got - want).abs() < 1e-15 + 1e-12 * want,
                "sigma={sigma} x={x} {route:?}: {got} vs {want}"
            );
        }
        // evenness mod 1
        assert_relative_eq!(
            g.eval(x),
            g.eval(1.0 - x),
            max_relative = 1e-12,
            epsilon = 1e-16
        );
    }
}

#[test]
fn gaussian_second_derivative_by_differences() {
    let g = PeriodicGaussian::new(2.0, DEFAULT_SERIES_TOL).unwrap();
    let (x, h) = (0.01, 1e-5);
    let fd = (g.eval(x + h) - 2.0 * g.eval(x) + g.eval(x - h)) / (h * h);
    for route in [Route::Fourier, Route::Poisson] {
        assert_relative_eq!(g.deriv(x, 2, route), fd, max_relative = 1e-6);
    }
    assert!(g.deriv(0.0, 1, Route::Fourier).abs() < 1e-12);
    assert_relative_eq!(g.deriv(0.0, 0, Route::Poisson), 1.0, epsilon = 1e-15);
}

#[test]
fn sampling_function_reference_value() {
    // (1/8) sum_{k=-4}^{3} e^{i 2 pi k 0.1}
    let s = eval_sn(0.1, 4);
    assert!((s - c(0.226127124296868428, -0.0734731565365591411)).norm() < 1e-14);
    assert!((s - c(0.22612, -0.07347)).norm() < 1e-5);
    assert!((eval_sn(0.0, 9) - 1.0).norm() < 1e-15);
    for j in 1..18 {
        assert!(eval_sn(j as f64 / 18.0, 9).norm() < 1e-14);
    }
}

#[test]
fn kernel_matches_product_of_factors() {
    let p = RegularizerParams::standard(2, 32).unwrap();
    assert_relative_eq!(p.r, 0.35994382121924231434, max_relative = 1e-15);
    assert_relative_eq!(p.sigma, 3.64211229282228090333, max_relative = 1e-15);
    let k = SamplingKernel::new(p).unwrap();
    // s_N(x) G_sigma(x) at 30 digits
    let want = [
        (
            0.05,
            c(
                -0.0301326106020709861052956848452,
                0.00477253666572620174302139160492,
            ),
        ),
        (
            0.2,
            c(
                0.000000357393514624422959816155427423,
                -0.000000259661587607949173617753340844,
            ),
        ),
    ];
    for (x, v) in want {
        assert!(
            (k.value(x) - v).norm() < 1e-15,
            "x={x}: {} vs {v}",
            k.value(x)
        );
    }
    assert_eq!(k.value(p.r + 1e-9), c(0.0, 0.0));
    assert_eq!(k.eval(0.5, 2), c(0.0, 0.0));
    assert!((k.value(0.0) - 1.0).norm() < 1e-15);
    // second derivative against central differences at r/2
    let (x, h) = (p.r / 2.0, 1e-5);
    let fd = (k.value(x + h) - 2.0 * k.value(x) + k.value(x - h)) / (h * h);
    assert!((k.second(x) - fd).norm() < 1e-5 * fd.norm());
}

#[test]
fn tilde_bound_reference_values() {
    // 30-digit evaluation of the closed form at N - m = 30, 62, 126
    for (n, want) in [
        (32, 1.40564465564806942715158510382e-12),
        (64, 2.07843458788390631449440057667e-12),
        (128, 2.98584436045568118737399608675e-12),
    ] {
        let b = error_bound_tilde(&RegularizerParams::standard(2, n).unwrap()).unwrap();
        assert_relative_eq!(b.total, want, max_relative = 1e-12);
    }
}

#[test]
fn planner_reference_case() {
    let r = plan_params(0.1, 1, DEFAULT_ALPHA, DEFAULT_BETA, None, None).unwrap();
    assert_eq!((r.n, r.weights, r.n_min), (13, 26, 21545));
    assert!(!r.valid);
    assert_relative_eq!(r.r, 3.0 * PI / 12f64.powf(0.96), max_relative = 1e-15);
    assert!((r.r - 0.868).abs() < 1e-3);
}

#[test]
fn evaluation_against_direct_sum() {
    let f = random_signal(4, 2, 9, false).unwrap();
    let x = 0.1;
    let got = f.evaluate(x).unwrap();
    for (ch, v) in got.iter().enumerate() {
        let want: Complex64 = (-4..4)
            .map(|k| f.coeff(ch, k) * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x))
            .sum();
        assert!((v - want).norm() < 1e-12);
    }
    let g = random_signal(3, 1, 2, false).unwrap();
    let s = g.sample_uniform(8);
    for j in 0..16 {
        assert!((s.value(0, j) - g.evaluate(j as f64 / 16.0).unwrap()[0]).norm() < 1e-14);
    }
}

#[test]
fn dft_and_energy_oracles() {
    let band = IndexBand::new(4).unwrap();
    let one = BandlimitedSignal::from_modes(band, &[(1, c(1.0, 0.0))]).unwrap();
    let back = coeffs_from_samples(&one.sample_uniform(4), band).unwrap();
    for k in band.iter() {
        let want = if k == 1 { 1.0 } else { 0.0 };
        assert!((back.coeff(0, k) - want).norm() < 1e-14);
    }
    let f = random_signal(4, 1, 4, false).unwrap();
    for n in [4, 16] {
        let s = f.sample_uniform(n);
        let direct: f64 = s.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / (2 * n) as f64;
        assert!((direct - f.energy()).abs() < 1e-10);
        assert!((s.energy() - f.energy()).abs() < 1e-10);
    }
    assert_ne!(
        random_signal(4, 1, 1, false).unwrap().coeffs(),
        random_signal(4, 1, 2, false).unwrap().coeffs()
    );
}

#[test]
fn parseval_through_quadrature() {
    let band = IndexBand::new(2).unwrap();
    let f = BandlimitedSignal::from_modes(band, &[(1, c(1.0, 0.0))]).unwrap();
    let e = l2_error(
        1,
        |x, o| f.eval_into(x, o),
        |_, o| o[0] = c(0.0, 0.0),
        0.0,
        1.0,
        &[],
        &QuadOptions::default(),
    )
    .unwrap();
    assert!((e - 1.0).abs() < 1e-9);
}

#[test]
fn sub_nyquist_sampling_aliases() {
    let f = random_signal(8, 1, 3, false).unwrap();
    let s = f.sample_uniform(4);
    let worst = (0..200)
        .map(|i| i as f64 / 200.0 + 0.0025)
        .map(|x| (reconstruct_exact(&s, x)[0] - f.evaluate(x).unwrap()[0]).norm())
        .fold(0.0, f64::max);
    assert!(worst > 0.01);
}

#[test]
fn single_mode_spectral_identity() {
    let p = RegularizerParams::standard(2, 32).unwrap();
    let band = IndexBand::new(2).unwrap();
    let f = BandlimitedSignal::from_modes(band, &[(0, c(1.0, 0.0))]).unwrap();
    let coeffs = AliasingCoefficients::new(p).unwrap();
    let e = AliasEngine::new(p).unwrap();
    let n2 = 64;
    let mut want = e.nu(0).powi(2);
    for l in 1..=40i64 {
        want += e.mu(l * n2).powi(2) + e.mu(-l * n2).powi(2);
    }
    assert_relative_eq!(
        exact_l2_error(&f, &coeffs).unwrap(),
        want.sqrt(),
        max_relative = 1e-6
    );
    let zero = BandlimitedSignal::zero(band, 1);
    assert_eq!(exact_l2_error(&zero, &coeffs).unwrap(), 0.0);
}

#[test]
fn pointwise_error_below_bound_at_n64() {
    let p = RegularizerParams::standard(2, 64).unwrap();
    let f = random_signal(2, 1, 12, true).unwrap();
    let k = SamplingKernel::new(p).unwrap();
    let err = (k.reconstruct(&f.sample_uniform(64), 0.5).unwrap()[0] - f.evaluate(0.5).unwrap()[0])
        .norm();
    assert!(err < error_bound_tilde(&p).unwrap().total);
    let measured = measured_l2_error(&f, &p, &QuadOptions::default()).unwrap();
    assert!(measured > 0.0 && measured < 1e-15);
}

#[test]
fn graphon_closed_forms() {
    let ring = builtin_graphon(GraphonSpec::Ring, 0.1).unwrap();
    // 1/2 + sin(0.2 pi) / (0.4 pi)
    assert_relative_eq!(
        local_average(&ring.graphon, 0.5, 0.1).unwrap(),
        0.967744641894319513,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        ring.certificate.unwrap().eta,
        0.5 * (1.0 + (0.2 * PI).cos()),
        max_relative = 1e-15
    );
    assert!((ring.certificate.unwrap().eta - 0.9045).abs() < 1e-4);
    assert_eq!(ring.graphon.eval(0.3, 0.3), 1.0);

    // clipped window [0, 0.15]: (1/0.15) int_0^0.15 W(0.05, y) dy
    let want = (0.075 + ((0.2 * PI).sin() + (0.1 * PI).sin()) / (4.0 * PI)) / 0.15;
    assert_relative_eq!(
        local_average(&ring.graphon, 0.05, 0.1).unwrap(),
        want,
        max_relative = 1e-13
    );

    let adj = deterministic_graph(&ring.graphon, 8).unwrap();
    assert!(adj.get(0, 4).abs() < 1e-15);

    let konst = builtin_graphon(GraphonSpec::Constant { p: 0.7 }, 0.1).unwrap();
    assert_eq!(konst.graphon.eval(0.2, 0.9), 0.7);
    let est = estimate_regularity(&konst.graphon, 0.1, 256).unwrap();
    assert_eq!((est.eta, est.lipschitz_k), (0.7, 0.0));
    let tent = builtin_graphon(GraphonSpec::Tent { eta0: 0.5 }, 0.1).unwrap();
    let est = estimate_regularity(&tent.graphon, 0.1, 512).unwrap();
    assert!(
        est.lipschitz_k >= 0.99 && est.lipschitz_k <= 1.0,
        "K = {}",
        est.lipschitz_k
    );
}

#[test]
fn sbm_regularity_diverges_under_refinement() {
    let sbm = builtin_graphon("sbm".parse().unwrap(), 0.1).unwrap();
    assert!(sbm.certificate.is_none());
    let coarse = estimate_regularity(&sbm.graphon, 0.1, 128)
        .unwrap()
        .lipschitz_k;
    let fine = estimate_regularity(&sbm.graphon, 0.1, 1024)
        .unwrap()
        .lipschitz_k;
    assert!(fine > 4.0 * coarse);
}

#[test]
fn wnn_kernel_is_product_of_factors() {
    let p = RegularizerParams::standard(2, 32).unwrap();
    let ring = builtin_graphon(GraphonSpec::Ring, 0.45).unwrap();
    let k = WnnKernel::from_params(p, ring.graphon.clone(), ring.certificate).unwrap();
    let (x, y) = (0.5, 0.5 + p.r / 2.0);
    let sk = SamplingKernel::new(p).unwrap();
    let want =
        sk.second(x - y) * ring.graphon.eval(x, y) / local_average(&ring.graphon, x, p.r).unwrap();
    assert!((k.kernel_eval(x, y).unwrap() - want).norm() < 1e-12 * want.norm());
    assert_eq!(k.kernel_eval(0.5, 0.5 + 1.01 * p.r).unwrap(), c(0.0, 0.0));
}
