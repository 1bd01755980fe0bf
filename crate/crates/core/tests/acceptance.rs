//! Acceptance suite. Every test prints one `criterion N ... PASS|FAIL` line to stderr.

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

use padic_path::gauss::{coset_constant_resolution, gauss_stabilization_radius, DEFAULT_COSET_CAP};
use padic_path::propagators::{
    action_form_desitter, k_general_quadratic_real, oscillator_action_form,
    oscillator_action_form_real, overlap_vanishing_threshold, SqrtBranch,
};
use padic_path::verify::place_cmp;
use padic_path::*;

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn place(s: &str) -> Place {
    s.parse().unwrap()
}

fn prime(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn report(n: u32, name: &str, failures: &[String], elapsed: Duration) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(
        err,
        "criterion {n} {name}: {verdict} ({} failures, {:.2?})",
        failures.len(),
        elapsed
    )
    .unwrap();
    for f in failures.iter().take(5) {
        writeln!(err, "    {f}").unwrap();
    }
    assert!(
        failures.is_empty(),
        "criterion {n} failed: {}",
        failures.len()
    );
}

/// Units of `Z_p` covering every square class.
fn square_class_units(p: u64) -> Vec<Rational> {
    if p == 2 {
        return ["1", "3", "5", "7"].map(q).to_vec();
    }
    let non_residue = (2..p).find(|t| (1..p).all(|x| x * x % p != *t)).unwrap();
    vec![Rational::one(), Rational::from_integer(non_residue.into())]
}

#[test]
fn criterion_1_gauss_integral() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // radius N0 + 1 is an extra stability probe, run only when it fits under the cap
    let mut skipped = 0;
    for p in [2u64, 3, 5, 7] {
        let pr = prime(p);
        let v = Place::Prime(pr);
        let mut grid = Vec::new();
        for k in -2..=2 {
            for u in square_class_units(p) {
                let a = &u * pr.rational_pow(k);
                grid.push((a.clone(), Rational::zero()));
                for j in -2..=2 {
                    grid.push((a.clone(), q("-1") * pr.rational_pow(j)));
                }
            }
        }
        for (a, b) in grid {
            let full = gauss_full(v, &a, &b).unwrap();
            let n0 = gauss_stabilization_radius(pr, &a, &b).unwrap();
            for n in [n0, n0 + 1] {
                let cosets = BallSpec::new(pr, n, coset_constant_resolution(pr, &a, &b, n))
                    .unwrap()
                    .coset_count();
                if n > n0 && cosets > DEFAULT_COSET_CAP as u128 {
                    skipped += 1;
                    continue;
                }
                match quad_char_integral_ball(pr, &a, &b, n) {
                    Ok(ball) if ball == full => {}
                    Ok(ball) => failures.push(format!("p={p} a={a} b={b} N={n}: {ball} != {full}")),
                    Err(e) => failures.push(format!("p={p} a={a} b={b} N={n}: {e}")),
                }
            }
            for n in [n0 - 1, n0] {
                let ball = quad_char_integral_ball(pr, &a, &b, n).unwrap();
                let m = coset_constant_resolution(pr, &a, &b, n);
                let spec = BallSpec::new(pr, n, m).unwrap();
                let oracle: Complex<f64> = haar_oracle(
                    &spec,
                    |x| Amplitude::unit(chi(v, &(&a * x * x + &b * x))).render(),
                    DEFAULT_COSET_CAP,
                )
                .unwrap();
                let err = (oracle - ball.render::<f64>()).norm();
                if err > 1e-10 {
                    failures.push(format!(
                        "p={p} a={a} b={b} N={n}: Haar oracle off by {err:e}"
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        failures.push(format!("runtime {elapsed:?} exceeds 60 s"));
    }
    writeln!(
        std::io::stderr(),
        "criterion 1: {skipped} probes at N0 + 1 exceed the coset cap and were not run"
    )
    .unwrap();
    report(
        1,
        "Gauss integral stabilization and Haar oracle",
        &failures,
        elapsed,
    );
}

#[test]
fn criterion_2_lambda_identities() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, v) in ["inf", "2", "3", "5", "7", "13"]
        .map(place)
        .into_iter()
        .enumerate()
    {
        let mut s = Sampler::new(1000 + i as u64);
        for _ in 0..1000 {
            let (a, b) = (s.nonzero(v), s.nonzero(v));
            if lambda(v, &(&a * &a * &b)).unwrap() != lambda(v, &b).unwrap() {
                failures.push(format!("v={v}: lambda(a^2 b) != lambda(b) at a={a} b={b}"));
            }
            let sum = &a + &b;
            if !sum.is_zero() {
                let lhs = lambda(v, &a).unwrap() + lambda(v, &b).unwrap();
                let rhs = lambda(v, &sum).unwrap() + lambda(v, &(a.recip() + b.recip())).unwrap();
                if lhs != rhs {
                    failures.push(format!("v={v}: product rule fails at a={a} b={b}"));
                }
            }
        }
    }
    report(2, "lambda identities", &failures, start.elapsed());
}

#[test]
fn criterion_3_finite_n_propagator() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, v) in ["inf", "2", "3", "5", "7"]
        .map(place)
        .into_iter()
        .enumerate()
    {
        let mut s = Sampler::new(3000 + i as u64);
        for n in 2..=16usize {
            for _ in 0..20 {
                let a = s.rational(v);
                let points = s.times(v, n + 1);
                let (q1, q2) = (s.rational(v), s.rational(v));
                let partition = PartitionSpec::new(v, points).unwrap();
                let system = System::ConstantField { a: a.clone() };
                let folded = finite_n_propagator(&system, &partition, &q1, &q2).unwrap();
                let direct = k_constant_field(v, &a, &partition.total_time(), &q1, &q2).unwrap();
                if folded != direct {
                    failures.push(format!(
                        "v={v} N={n} a={a} q'={q1} q''={q2}: {folded} != {direct}"
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        failures.push(format!("runtime {elapsed:?} exceeds 10 s"));
    }
    report(
        3,
        "finite-N propagator equals closed form",
        &failures,
        elapsed,
    );
}

#[test]
fn criterion_4_semigroup() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, v) in ["inf", "2", "3", "5", "7"]
        .map(place)
        .into_iter()
        .enumerate()
    {
        let mut s = Sampler::new(4000 + i as u64);
        for trial in 0..100 {
            let system = match trial % 3 {
                0 => System::Free,
                1 => System::ConstantField { a: s.rational(v) },
                _ => System::DeSitter { lam: s.rational(v) },
            };
            let t = s.times(v, 3);
            let (q1, q2) = (s.rational(v), s.rational(v));
            let r = semigroup_residual(v, &system, (&t[0], &t[1], &t[2]), &q1, &q2).unwrap();
            if r.amplitude() != Ok(Amplitude::zero()) {
                failures.push(format!("v={v} {system}: {} != {}", r.composed, r.direct));
            }
        }
    }
    report(4, "semigroup residual vanishes", &failures, start.elapsed());
}

#[test]
fn criterion_5_delta_conditions() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for p in [3u64, 5] {
        let pr = prime(p);
        let v = Place::Prime(pr);
        let mut s = Sampler::new(5000 + p);
        for _ in 0..50 {
            let t = s.times(v, 2);
            let times = (&t[0], &t[1]);
            let elapsed = &t[1] - &t[0];
            let x1 = s.rational(v);
            let mut x2 = s.rational(v);
            while x2 == x1 {
                x2 = s.rational(v);
            }
            // |x'' - x'|_p |T|_p^-1 p^N > 1 kills the linear character
            let analytic = valuation(&(&x2 - &x1), pr).finite().unwrap()
                - valuation(&elapsed, pr).finite().unwrap()
                + 1;
            let n0 = overlap_vanishing_threshold(pr, &System::Free, times, &x1, &x2).unwrap();
            if n0 != Some(analytic) {
                failures.push(format!("p={p}: threshold {n0:?} != analytic {analytic}"));
            }
            for n in analytic..analytic + 4 {
                let value = overlap_ball_integral(pr, &System::Free, times, &x1, &x2, n).unwrap();
                if !value.is_zero() {
                    failures.push(format!(
                        "p={p} x'={x1} x''={x2} T={elapsed} N={n}: {value} != 0"
                    ));
                }
            }
            if overlap_ball_integral(pr, &System::Free, times, &x1, &x2, analytic - 1)
                .unwrap()
                .is_zero()
            {
                failures.push(format!(
                    "p={p} x'={x1} x''={x2} T={elapsed}: zero below the threshold"
                ));
            }
            for n in analytic - 2..analytic + 4 {
                let mass = pr.rational_pow(n) / norm(&elapsed, v);
                let expected = Amplitude::new(&mass * &mass, Phase::zero()).unwrap();
                let value = overlap_ball_integral(pr, &System::Free, times, &x1, &x1, n).unwrap();
                if value != expected {
                    failures.push(format!(
                        "p={p} x={x1} T={elapsed} N={n}: {value} != p^N/|T|"
                    ));
                }
            }
        }
    }
    report(
        5,
        "delta conditions against ball indicators",
        &failures,
        start.elapsed(),
    );
}

#[test]
fn criterion_6_general_quadratic_formula() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, v) in ["inf", "2", "3", "5", "7"]
        .map(place)
        .into_iter()
        .enumerate()
    {
        let mut s = Sampler::new(6000 + i as u64);
        for _ in 0..100 {
            let (a, t, q1, q2) = (s.rational(v), s.nonzero(v), s.rational(v), s.rational(v));
            let cases = [
                (
                    "const-field",
                    action_form_constant_field(&a, &t),
                    k_constant_field(v, &a, &t, &q1, &q2),
                ),
                ("free", action_form_free(&t), k_free(v, &t, &q1, &q2)),
                (
                    "desitter",
                    action_form_desitter(&a, &t),
                    k_desitter(v, &a, &t, &q1, &q2),
                ),
            ];
            for (name, form, direct) in cases {
                let general = k_general_quadratic(v, &form.unwrap(), &q2, &q1).unwrap();
                let direct = direct.unwrap();
                if general != direct {
                    failures.push(format!("v={v} {name} a={a} T={t}: {general} != {direct}"));
                }
            }
        }
    }
    report(
        6,
        "general quadratic formula reproduces closed forms",
        &failures,
        start.elapsed(),
    );
}

#[test]
fn criterion_7_real_spot_values() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let g = gauss_full(Place::Real, &q("1"), &q("0"))
        .unwrap()
        .render::<f64>();
    if (g - Complex::new(0.5, -0.5)).norm() > 1e-12 {
        failures.push(format!("gauss_full(inf, 1, 0) renders to {g}"));
    }
    let fresnel = fresnel_oracle(&q("1"), &q("0")).unwrap();
    if (fresnel - g).norm() > 1e-6 {
        failures.push(format!("Fresnel quadrature {fresnel} vs {g}"));
    }
    for t in ["1/10", "1/3", "1", "2", "7/2", "10", "-1/4", "-1", "-5"] {
        let t = q(t);
        let k = k_free(Place::Real, &t, &q("0"), &q("0"))
            .unwrap()
            .render::<f64>();
        let expected = Complex::new(0.0, t.to_f64().unwrap()).powf(-0.5);
        if (k - expected).norm() > 1e-12 {
            failures.push(format!("T={t}: {k} vs (iT)^-1/2 = {expected}"));
        }
    }
    report(7, "real place spot values", &failures, start.elapsed());
}

#[test]
fn criterion_8_padic_analytic_layer() {
    let start = Instant::now();
    let mut failures = Vec::new();
    const P: i64 = 20;
    for p in [3u64, 5, 7] {
        let pr = prime(p);
        let v = Place::Prime(pr);
        let mut s = Sampler::new(8000 + p);
        let one = PadicTruncation::from_rational(&Rational::one(), pr, P);
        for _ in 0..200 {
            let x = s.small_unit(pr) * pr.rational_pow(s.integer(1, 4));
            let (sin, cos) = (sin_p(&x, pr, P).unwrap(), cos_p(&x, pr, P).unwrap());
            if !sin.mul(&sin).add(&cos.mul(&cos)).congruent(&one, P) {
                failures.push(format!("p={p} x={x}: sin^2 + cos^2 != 1 mod p^{P}"));
            }
            let c = s.nonzero(v);
            let square = &c * &c;
            let root = sqrt_p(&square, pr, P).unwrap();
            let target = PadicTruncation::from_rational(&square, pr, P);
            if !root.mul(&root).congruent(&target, P) {
                failures.push(format!("p={p} c={c}: sqrt(c^2)^2 != c^2 mod p^{P}"));
            }
        }

        // Oscillator samples with gamma-dot'' gamma-dot' = 1, whose canonical root is 1.
        for _ in 0..20 {
            let gd2 = s.nonzero(v);
            let data = OscillatorBoundaryData {
                x1: s.rational(v),
                x2: s.rational(v),
                gamma1: s.rational(v),
                gamma2: Rational::zero(),
                gamma_dot1: gd2.recip(),
                gamma_dot2: gd2.clone(),
                s1: s.nonzero(v),
                s2: s.nonzero(v),
                s_dot1: s.rational(v),
                s_dot2: s.rational(v),
                check_wronskian: false,
            };
            let data = OscillatorBoundaryData {
                gamma2: &data.gamma1 + s.small_unit(pr) * pr.rational_pow(s.integer(1, 3)),
                ..data
            };
            let precision = 60;
            let value = match k_oscillator_td(v, &data, precision) {
                Ok(OscillatorValue::Exact { amplitude, branch }) => {
                    let unit_root = SqrtBranch::Canonical(PadicTruncation::from_rational(
                        &Rational::one(),
                        pr,
                        precision,
                    ));
                    if branch != unit_root {
                        failures.push(format!("p={p}: unexpected root branch {branch:?}"));
                    }
                    amplitude
                }
                other => {
                    failures.push(format!(
                        "p={p} {data:?}: oscillator evaluation gave {other:?}"
                    ));
                    continue;
                }
            };
            let form = oscillator_action_form(pr, &data, precision).unwrap();
            let general = k_general_quadratic(v, &form, &data.x2, &data.x1).unwrap();
            if value != general {
                failures.push(format!("p={p} {data:?}: {value} != {general}"));
            }
        }
    }

    // Real place: float evaluation of the oscillator against the general formula.
    let mut s = Sampler::new(8001);
    for _ in 0..50 {
        let gd2 = Rational::new(s.integer(1, 50).into(), s.integer(1, 50).into());
        let gd1 = Rational::new(s.integer(1, 50).into(), s.integer(1, 50).into());
        let small =
            |s: &mut Sampler| Rational::new(s.integer(-30, 30).into(), s.integer(1, 20).into());
        let data = OscillatorBoundaryData {
            x1: small(&mut s),
            x2: small(&mut s),
            gamma1: small(&mut s),
            gamma2: Rational::zero(),
            gamma_dot1: gd1,
            gamma_dot2: gd2,
            s1: Rational::new(s.integer(1, 9).into(), 4.into()),
            s2: Rational::new(s.integer(1, 9).into(), 4.into()),
            s_dot1: small(&mut s),
            s_dot2: small(&mut s),
            check_wronskian: false,
        };
        let data = OscillatorBoundaryData {
            gamma2: &data.gamma1 + Rational::new(s.integer(1, 25).into(), 10.into()),
            ..data
        };
        let z = k_oscillator_td(Place::Real, &data, 0).unwrap().render();
        let form = oscillator_action_form_real(&data).unwrap();
        let w =
            k_general_quadratic_real(&form, data.x2.to_f64().unwrap(), data.x1.to_f64().unwrap())
                .unwrap();
        if (z - w).norm() > 1e-9 * w.norm().max(1.0) {
            failures.push(format!("real oscillator {z} vs general formula {w}"));
        }
    }
    report(
        8,
        "p-adic analytic layer and oscillator kernel",
        &failures,
        start.elapsed(),
    );
}

#[test]
fn sampled_partitions_respect_the_place_order() {
    let mut s = Sampler::new(9);
    for v in ["inf", "2", "3"].map(place) {
        let t = s.times(v, 10);
        assert!(t.windows(2).all(|w| place_cmp(v, &w[0], &w[1]).is_lt()));
    }
}
