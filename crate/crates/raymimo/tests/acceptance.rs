//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantities and its wall-clock time.
//!
//! Every tolerance is pinned in code. Criteria 9 and 10 are asserted exactly
//! as stated even though their pinned configurations make one clause each
//! unattainable (see the assertion messages for the measured evidence).

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use raymimo::angular::{charfn_exact_vm, AngularModel};
use raymimo::array::{
    equal_powers, generate_channel, ArrayGeometry, ChannelRealization, CoefficientModel,
    RayChannelSpec,
};
use raymimo::asymptotics::{
    charfn_asymptotic, expected_eta, fit_log_slope, m_slope, mu_ula, mu_ula_monte_carlo,
    mu_ula_sweep, mu_upa, mu_upa_monte_carlo, mu_upa_uniform_closed, upa_polar_envelope, MuMethod,
};
use raymimo::error::Result;
use raymimo::metrics::{ch_samples, eta_i, eta_point, rayleigh_baseline, DropConfig};
use raymimo::rng::RngStream;
use raymimo::scheduler::{
    eta_bound_ula, gamma_quad_sum, greedy_schedule, GeometryKind, ProtectionPolicy,
};
use raymimo::specialfn::bessel_j0;

const D: f64 = 0.5;

fn report(id: u32, pass: bool, started: Instant, detail: &str) {
    println!(
        "acceptance {id:02} [{}] ({:.1}s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
}

fn uniform_circle() -> AngularModel {
    AngularModel::uniform(0.0, TAU).unwrap()
}

fn clustered_3gpp() -> AngularModel {
    AngularModel::clustered(
        AngularModel::wrapped_gaussian(0.0, 76.5f64.to_radians()).unwrap(),
        AngularModel::laplacian(0.0, 15f64.to_radians() / 2f64.sqrt()).unwrap(),
        20,
        20,
    )
    .unwrap()
}

// 1. Uniform-angle exactness: kernel series via J0 matches Monte Carlo within
//    3 standard errors at N in {16, 64, 256}, 1e5 sampled pairs.
#[test]
fn criterion_01_uniform_kernel_exactness() {
    let t = Instant::now();
    let model = uniform_circle();
    let mut rng = RngStream::new(101, 0).rng();
    let mut detail = String::new();
    let mut pass = true;
    for n in [16usize, 64, 256] {
        let exact = mu_ula(&model, D, n, MuMethod::ExactSeries).unwrap();
        let (mc, se) = mu_ula_monte_carlo(&model, D, n, 100_000, &mut rng);
        let dev = (exact - mc).abs() / se;
        pass &= dev <= 3.0;
        detail.push_str(&format!("N={n}: |dev|={dev:.2}se "));
    }
    report(1, pass, t, &detail);
    assert!(pass, "{detail}");
}

// 2. Von Mises exactness: closed form vs quadrature oracle, relative error
//    <= 1e-6 for kappa in {0.5, 1.49, 4.23, 10}, q <= 200.
#[test]
fn criterion_02_von_mises_exactness() {
    let t = Instant::now();
    let mut worst = (0.0f64, 0.0f64, 0u32);
    for &kappa in &[0.5, 1.49, 4.23, 10.0] {
        let model = AngularModel::von_mises(0.0, kappa).unwrap();
        for q in 1..=200u32 {
            let exact = charfn_exact_vm(0.0, kappa, q, D).unwrap();
            let oracle = raymimo::angular::charfn_oracle(&model, q, D).unwrap();
            let rel = (exact - oracle).norm() / exact.norm();
            if rel > worst.0 {
                worst = (rel, kappa, q);
            }
        }
    }
    let pass = worst.0 <= 1e-6;
    report(
        2,
        pass,
        t,
        &format!("worst rel err {:.3e} (kappa={}, q={})", worst.0, worst.1, worst.2),
    );
    assert!(pass, "worst {worst:?}");
}

// 3. Endfire-expansion envelope: RMS error of the two-term expansion against
//    the exact characteristic values over q in [100, 200] is at most 5% of
//    the exact RMS, for uniform and von Mises (kappa = 4.23).
#[test]
fn criterion_03_endfire_expansion_envelope() {
    let t = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    let cases: Vec<(&str, AngularModel, Box<dyn Fn(u32) -> Complex64>)> = vec![
        (
            "uniform",
            uniform_circle(),
            Box::new(|q| Complex64::new(bessel_j0(TAU * D * q as f64).unwrap(), 0.0)),
        ),
        (
            "von-mises",
            AngularModel::von_mises(0.0, 4.23).unwrap(),
            Box::new(|q| charfn_exact_vm(0.0, 4.23, q, D).unwrap()),
        ),
    ];
    for (label, model, exact) in cases {
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for q in 100..=200u32 {
            let e = exact(q);
            let a = charfn_asymptotic(&model, D, q).unwrap();
            num += (e - a).norm_sqr();
            den += e.norm_sqr();
        }
        let ratio = (num / den).sqrt();
        pass &= ratio <= 0.05;
        detail.push_str(&format!("{label}: rms ratio {ratio:.4} "));
    }
    report(3, pass, t, &detail);
    assert!(pass, "{detail}");
}

// 4. Slope law: least-squares slope of the exact kernel series against ln N
//    over N in [1e3, 1e5] within 10% of 2(f(pi/2)^2 + f(-pi/2)^2)/d; the
//    uniform case equals 1/(pi^2 d).
#[test]
fn criterion_04_log_slope_law() {
    let t = Instant::now();
    let sizes: Vec<usize> = (0..=16)
        .map(|i| (1000.0 * 100f64.powf(i as f64 / 16.0)).round() as usize)
        .collect();
    let mut detail = String::new();
    let mut pass = true;
    for (label, model) in [
        ("uniform", uniform_circle()),
        ("von-mises", AngularModel::von_mises(0.0, 4.23).unwrap()),
    ] {
        let mus = mu_ula_sweep(&model, D, &sizes, MuMethod::ExactSeries).unwrap();
        let rows: Vec<(usize, f64)> = sizes.iter().copied().zip(mus).collect();
        let fit = fit_log_slope(&rows, 1000, 100_000).unwrap();
        let predicted = m_slope(&model, D).unwrap();
        let rel = (fit.slope / predicted - 1.0).abs();
        pass &= rel <= 0.10;
        detail.push_str(&format!(
            "{label}: slope {:.4e} vs {:.4e} ({:.2}%) ",
            fit.slope,
            predicted,
            100.0 * rel
        ));
        if label == "uniform" {
            let uniform_pred = 1.0 / (std::f64::consts::PI.powi(2) * D);
            pass &= (fit.slope / uniform_pred - 1.0).abs() <= 0.10;
        }
    }
    report(4, pass, t, &detail);
    assert!(pass, "{detail}");
}

// 5. Planar-kernel route agreement: the axis-lag double sum with quadrature
//    characteristic values equals the closed form within 1e-6 for square
//    arrays up to side 8, and matches Monte Carlo within 3 standard errors at
//    side 16.
#[test]
fn criterion_05_planar_route_agreement() {
    let t = Instant::now();
    let az = uniform_circle();
    let el = AngularModel::uniform(-FRAC_PI_2, FRAC_PI_2).unwrap();
    let mut worst = 0.0f64;
    for side in 2..=8usize {
        let quad = mu_upa(&az, &el, side, side, D, D).unwrap();
        let closed = mu_upa_uniform_closed(side, side, D, D).unwrap();
        worst = worst.max((quad - closed).abs());
    }
    let quad16 = mu_upa(&az, &el, 16, 16, D, D).unwrap();
    let mut rng = RngStream::new(105, 0).rng();
    let (mc, se) = mu_upa_monte_carlo(&az, &el, 16, 16, D, D, 200_000, &mut rng);
    let dev = (quad16 - mc).abs() / se;
    let pass = worst <= 1e-6 && dev <= 3.0;
    report(
        5,
        pass,
        t,
        &format!("max |quad - closed| {worst:.2e} (side<=8), 16x16 |dev| {dev:.2}se"),
    );
    assert!(pass, "worst {worst:.3e}, dev {dev:.2}");
}

// 6. Planar log growth: fitted ln-N slope of the uniform closed form is
//    positive and stable (relative change < 20% between the decades
//    [1e2, 1e3] and [1e3, 1e4]); values stay below the polar upper envelope
//    plus a constant fitted on the first decade.
#[test]
fn criterion_06_planar_log_growth() {
    let t = Instant::now();
    let sides: Vec<usize> = (0..=20)
        .map(|i| (10.0 * 10f64.powf(i as f64 / 20.0)).round() as usize)
        .collect();
    let mut rows = Vec::new();
    let mut excess = Vec::new();
    for &s in &sides {
        let mu = mu_upa_uniform_closed(s, s, D, D).unwrap();
        rows.push((s * s, mu));
        excess.push((s * s, mu - upa_polar_envelope(s, s, D, D)));
    }
    let lo = fit_log_slope(&rows, 100, 1000).unwrap();
    let hi = fit_log_slope(&rows, 1000, 10_000).unwrap();
    let change = (hi.slope / lo.slope - 1.0).abs();
    let fitted_const = excess
        .iter()
        .filter(|(n, _)| *n <= 1000)
        .map(|(_, e)| *e)
        .fold(f64::NEG_INFINITY, f64::max);
    let envelope_ok = excess
        .iter()
        .filter(|(n, _)| *n > 1000)
        .all(|(_, e)| *e <= fitted_const + 1e-9);
    let pass = lo.slope > 0.0 && hi.slope > 0.0 && change < 0.20 && envelope_ok;
    report(
        6,
        pass,
        t,
        &format!(
            "slopes {:.4}/{:.4} (change {:.1}%), envelope excess <= {fitted_const:.3}: {envelope_ok}",
            lo.slope,
            hi.slope,
            100.0 * change
        ),
    );
    assert!(pass);
}

// 7. Statistical baseline: mean total interference for i.i.d. channels within
//    2% of 1/alpha at N = 4096, alpha = 2, 500 drops.
#[test]
fn criterion_07_iid_baseline() {
    let t = Instant::now();
    let row = rayleigh_baseline(4096, 2048, 500, RngStream::new(107, 0));
    let rel = (row.mean / 0.5 - 1.0).abs();
    let pass = rel <= 0.02;
    report(
        7,
        pass,
        t,
        &format!("mean {:.5} vs 0.5 ({:.3}% off, se {:.1e})", row.mean, 100.0 * rel, row.stderr),
    );
    assert!(pass);
}

// 8. Mean-interference factorization: Monte Carlo E[eta] matches
//    beta_i * beta_bar * mu(N) / alpha within 3 standard errors for the
//    uniform linear-array ensemble at N in {128, 512}, alpha = 2.
#[test]
fn criterion_08_eta_factorization() {
    let t = Instant::now();
    let model = uniform_circle();
    let mut detail = String::new();
    let mut pass = true;
    for (n, drops) in [(128usize, 1500usize), (512, 600)] {
        let k = n / 2;
        let spec = RayChannelSpec::new(
            equal_powers(20, 1.0),
            CoefficientModel::RandomPhase,
            model.clone(),
            None,
        )
        .unwrap();
        let cfg = DropConfig::new(
            ArrayGeometry::ula(n, D).unwrap(),
            spec,
            vec![1.0; k],
            drops,
            RngStream::new(108, (n as u64) << 32),
        )
        .unwrap();
        let row = eta_point(&cfg).unwrap();
        let mu = mu_ula(&model, D, n, MuMethod::ExactSeries).unwrap();
        let predicted = expected_eta(1.0, 1.0, 2.0, mu);
        let dev = (row.mean - predicted).abs() / row.stderr;
        pass &= dev <= 3.0;
        detail.push_str(&format!(
            "N={n}: mc {:.4} vs {:.4} (|dev| {dev:.2}se) ",
            row.mean, predicted
        ));
    }
    report(8, pass, t, &detail);
    assert!(pass, "{detail}");
}

// 9. Hardening dichotomy: at matched drop counts >= 2000 for the clustered
//    ensemble (20 clusters x 20 subrays, equal powers), the sample variance
//    of h^H h / N shrinks by >= 4x from N = 64 to N = 1024 with random-phase
//    gains and does not shrink by 4x with complex-Gaussian gains.
//
//    The second clause cannot hold for this pinned configuration: with 400
//    rays the non-vanishing gain-power variance floor is 1/400 = 2.5e-3,
//    an order of magnitude below the angle-driven variance at N = 64, so
//    both models shrink by more than 4x over this window (the floor only
//    becomes dominant beyond N ~ 1e3). Asserted as stated; measured numbers
//    are in the printed line.
#[test]
fn criterion_09_hardening_dichotomy() {
    let t = Instant::now();
    let drops = 2000;
    let mut ratios = Vec::new();
    for (mi, model) in [
        CoefficientModel::RandomPhase,
        CoefficientModel::ComplexGaussian,
    ]
    .into_iter()
    .enumerate()
    {
        let mut vars = Vec::new();
        for (i, n) in [64usize, 1024].into_iter().enumerate() {
            let spec =
                RayChannelSpec::new(equal_powers(400, 1.0), model, clustered_3gpp(), None)
                    .unwrap();
            let cfg = DropConfig::new(
                ArrayGeometry::ula(n, D).unwrap(),
                spec,
                vec![1.0],
                drops,
                RngStream::new(109, ((mi * 2 + i) as u64) << 32),
            )
            .unwrap();
            let xs = ch_samples(&cfg).unwrap();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var =
                xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
            vars.push(var);
        }
        ratios.push(vars[0] / vars[1]);
    }
    let rp_ok = ratios[0] >= 4.0;
    let cg_ok = ratios[1] < 4.0;
    report(
        9,
        rp_ok && cg_ok,
        t,
        &format!(
            "random-phase shrink {:.1}x (need >= 4) | complex-Gaussian shrink {:.1}x (need < 4)",
            ratios[0], ratios[1]
        ),
    );
    assert!(rp_ok, "random-phase variance shrink {:.2}x < 4x", ratios[0]);
    assert!(
        cg_ok,
        "complex-Gaussian variance shrink is {:.2}x, not below 4x: with 400 equal-power rays \
         the non-hardening floor 1/400 is still dominated by the angle-driven variance over \
         the 64 -> 1024 window, so this clause cannot hold for the pinned configuration",
        ratios[1]
    );
}

// 10. Protected scheduling (20 uniform rays per user, d = 0.5, alpha = 10,
//     epsilon = 0.1): every scheduled drop satisfies the closed-form bound
//     exactly; the 99th percentile of scheduled interference at N = 2000 is
//     below its N = 200 value; the unscheduled maximum at N = 2000 exceeds
//     the scheduled maximum by at least 10x.
//
//     With 20 uniform rays per user, an epsilon = 0.1 separation over all
//     20 x 20 cross ray pairs is met with probability ~e^-50, so no
//     interferer is ever admitted: scheduled interference is identically
//     zero at both sizes and the strict percentile decrease cannot hold.
//     Asserted as stated; measured numbers are in the printed line.
#[test]
fn criterion_10_protected_scheduling() {
    let t = Instant::now();
    let (alpha, eps, drops) = (10.0f64, 0.1f64, 500usize);
    let policy = ProtectionPolicy::new(eps, GeometryKind::Ula);
    let spec = RayChannelSpec::new(
        equal_powers(20, 20.0), // unit-power rays
        CoefficientModel::RandomPhase,
        uniform_circle(),
        None,
    )
    .unwrap();
    let mut bound_ok = true;
    let mut p99 = Vec::new();
    let mut sched_max = 0.0f64;
    let mut unsched_max = 0.0f64;
    let mut admitted = 0usize;
    for (i, n) in [200usize, 2000].into_iter().enumerate() {
        use rayon::prelude::*;
        let k = (n as f64 / alpha).round() as usize;
        let geom = ArrayGeometry::ula(n, D).unwrap();
        // per drop: (protected eta, bound held, unprotected eta, admitted)
        let per_drop: Vec<(f64, bool, f64, usize)> = (0..drops)
            .into_par_iter()
            .map(|drop| {
                let mut rng = RngStream::new(110, ((i as u64) << 32) + drop as u64).rng();
                let pool: Vec<ChannelRealization> = (0..k)
                    .map(|_| generate_channel(&spec, &geom, &mut rng))
                    .collect::<Result<_>>()
                    .unwrap();
                // unprotected: the K arrivals are served together
                let eta_all = eta_i(&pool[0], &pool[1..]).unwrap();
                // protected
                let s = greedy_schedule(&pool, &policy, k);
                let target = &pool[s.selected[0]];
                let others: Vec<ChannelRealization> =
                    s.selected[1..].iter().map(|&j| pool[j].clone()).collect();
                let eta = eta_i(target, &others).unwrap();
                let bound = eta_bound_ula(gamma_quad_sum(target, &others), n, D, eps);
                (eta, eta <= bound, eta_all, s.selected.len() - 1)
            })
            .collect();
        let mut etas = Vec::with_capacity(drops);
        for (eta, ok, eta_all, adm) in per_drop {
            bound_ok &= ok;
            unsched_max = unsched_max.max(eta_all);
            sched_max = sched_max.max(eta);
            admitted += adm;
            etas.push(eta);
        }
        etas.sort_by(f64::total_cmp);
        p99.push(etas[(0.99 * drops as f64) as usize]);
    }
    let decay_ok = p99[1] < p99[0];
    let gap_ok = unsched_max >= 10.0 * sched_max;
    report(
        10,
        bound_ok && decay_ok && gap_ok,
        t,
        &format!(
            "bound exact: {bound_ok} | p99 {:.3e} -> {:.3e} (need strict decrease) | \
             unsched max {unsched_max:.2e} vs 10x sched max {:.2e} | interferers admitted: {admitted}",
            p99[0],
            p99[1],
            10.0 * sched_max
        ),
    );
    assert!(bound_ok, "a scheduled drop exceeded the closed-form bound");
    assert!(gap_ok, "unscheduled max did not exceed 10x the scheduled max");
    assert!(
        decay_ok,
        "99th-percentile scheduled interference did not strictly decrease \
         ({:.3e} at N=200 vs {:.3e} at N=2000): the all-ray-pairs separation at \
         epsilon = 0.1 admits no interferer for 20-uniform-ray users ({admitted} \
         admissions over {} drops), so scheduled interference is identically zero \
         at both sizes and a strict decrease is unattainable for this configuration",
        p99[0],
        p99[1],
        2 * drops
    );
}

// 11. Determinism: rerunning any preset experiment with the same seed yields
//     byte-identical CSV outputs.
#[test]
fn criterion_11_determinism() {
    use raymimo::experiments::config::{parse_toml, resolve};
    use raymimo::experiments::run_experiment;

    let t = Instant::now();
    let overrides = [
        ("fig1", "[sweep]\nn = [16, 64]\ndrops = 20"),
        ("fig2", "[sweep]\nn = [16, 64]\ndrops = 50"),
        ("fig3", "[sweep]\nn = [16, 64]\ndrops = 1"),
        ("fig4", "[sweep]\nn = [100, 250, 630, 1600, 4000, 10000]\ndrops = 1"),
        ("fig5", "[sweep]\nn = [16, 32]\ndrops = 30"),
        ("fig6", "[sweep]\nn = [16, 64]\ndrops = 20"),
        ("fig7", "[sweep]\nn = [16, 64]\ndrops = 1"),
        ("fig8", "[sweep]\nn = [100, 196, 400, 784, 1600]\ndrops = 1"),
        ("fig9", "[sweep]\nn = [16, 64]\ndrops = 30"),
        ("fig10", "[sweep]\nn = [200, 400]\ndrops = 30"),
    ];
    let mut checked = 0usize;
    for (name, extra) in overrides {
        let raw = parse_toml(&format!("experiment = \"{name}\"\nseed = 7\n{extra}")).unwrap();
        let exp = resolve(&raw).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let man_a = run_experiment(&exp, dir_a.path()).unwrap();
        let man_b = run_experiment(&exp, dir_b.path()).unwrap();
        assert_eq!(man_a.outputs, man_b.outputs, "{name}: output sets differ");
        for f in man_a.outputs.iter().filter(|f| f.ends_with(".csv")) {
            let a = std::fs::read(dir_a.path().join(f)).unwrap();
            let b = std::fs::read(dir_b.path().join(f)).unwrap();
            assert_eq!(a, b, "{name}/{f}: bytes differ between reruns");
            checked += 1;
        }
    }
    report(11, true, t, &format!("{checked} CSV files byte-identical across reruns"));
}
