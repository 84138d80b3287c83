//! Acceptance suite: one pass/fail line per criterion, with runtime budgets.
//! Runs without the libtest harness so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixr::diagram::{conditions_for, enumerate, known_diagram, known_diagrams, validate, FarKind};
use sixr::families::{builtin_instance, generic_sample, sample, Builtin, Family};
use sixr::mobility::{find_seed, trace, verify_curve, DEFAULT_STEP, DEFAULT_STEPS, RANK_GAP};
use sixr::quadpoly::{coefficient_distance, gcd_degree, quad_minus, quad_plus, resultant, sylvester_resultant};
use sixr::tpoly::bricard_curve;
use sixr::{rigidity_certificate, ConfigurationPoint, Cplx, DualQuaternion, LinkageParams, QuadPoly, Surd, F256};

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Surd {
    Surd::from_ratio(n, d)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn printed_transfer_elements() -> Outcome {
    let p = builtin_instance(Builtin::BricardExample);
    // printed coefficients in the order 1, i, j, k, e, ei, ej, ek
    let printed = [
        [q(1, 3), q(0, 1), q(0, 1), q(-1, 1), q(-3, 10), q(-2, 3), q(-2, 1), q(-1, 10)],
        [q(2, 3), q(0, 1), q(0, 1), q(-1, 1), q(-12, 13), q(-5, 3), q(-5, 2), q(-8, 13)],
        [q(3, 4), q(0, 1), q(0, 1), q(-1, 1), q(-36, 25), q(-3, 8), q(-1, 2), q(-27, 25)],
    ];
    for (k, coeffs) in printed.into_iter().enumerate() {
        let g = p.build_g(k + 1).g;
        ensure(g == DualQuaternion::new(coeffs), || format!("g_{} = {g}", k + 1))?;
    }
    Ok("g_1, g_2, g_3 exact".into())
}

fn printed_curve_consistency() -> Outcome {
    let p = builtin_instance(Builtin::BricardExample).to_field::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut points, mut worst) = (0, 0.0f64);
    while points < 200 {
        let t1: f64 = rng.gen_range(-5.0..5.0);
        // first polynomial is quadratic in t2, third is linear in t3
        let a = 171.0 * t1 * t1 + 40.0 * t1 - 5.0;
        let b = -134.0 * t1 * t1 - 160.0 * t1 + 90.0;
        let c = 49.0 * t1 * t1 - 24.0 * t1 - 255.0;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 || a.abs() < 1e-6 {
            continue;
        }
        for t2 in [(-b + disc.sqrt()) / (2.0 * a), (-b - disc.sqrt()) / (2.0 * a)] {
            let den = -133.0 * t1 + 19.0 * t2 - 222.0;
            if den.abs() < 1e-6 || points == 200 {
                continue;
            }
            let t3 = -(171.0 * t1 * t2 - 134.0 * t1 + 40.0 * t2 - 323.0) / den;
            let cfg = ConfigurationPoint::from_t([t1, t2, t3, t1, t2, t3]);
            worst = worst.max(p.closure_residual(&cfg).amax());
            points += 1;
        }
    }
    ensure(worst < 1e-8, || format!("max residual {worst:e}"))?;
    Ok(format!("200 points, max residual {worst:.2e}"))
}

/// The printed `Q_1^-`: `(x + (b3 c3 - b1 c1)/2 - s1/2 i)^2
/// + i/2 (b1 s2 - b3 s3 - s2 b3 c2 + s3 b1 c2) - (-b1 b3 c2 - s2 s3 c2)/2
/// + (s2^2 + s3^2 - b1^2 + b2^2 - b3^2 - b2^2 c2^2)/4`.
fn printed_q1_minus(p: &LinkageParams<Surd>) -> QuadPoly<Surd> {
    let (b1, b2, b3) = (p.b(1).clone(), p.b(2).clone(), p.b(3).clone());
    let (c1, c2, c3) = (p.c(1).clone(), p.c(2).clone(), p.c(3).clone());
    let (s1, s2, s3) = (p.s(1).clone(), p.s(2).clone(), p.s(3).clone());
    let half = q(1, 2);
    let quarter = q(1, 4);
    let shift = Cplx::new((b3.clone() * c3 - b1.clone() * c1) * half.clone(), -(s1 * half.clone()));
    let imag = (b1.clone() * s2.clone() - b3.clone() * s3.clone() - s2.clone() * b3.clone() * c2.clone()
        + s3.clone() * b1.clone() * c2.clone())
        * half.clone();
    let real = -((-(b1.clone() * b3.clone() * c2.clone()) - s2.clone() * s3.clone() * c2.clone()) * half)
        + (s2.clone() * s2 + s3.clone() * s3 - b1.clone() * b1 + b2.clone() * b2.clone() - b3.clone() * b3
            - b2.clone() * b2 * c2.clone() * c2)
            * quarter;
    let constant = Cplx::new(real, imag);
    // (x + shift)^2 + constant
    QuadPoly::new(shift.clone() + shift.clone(), shift.square() + constant)
}

fn quad_minus_convention() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut value = || q(rng.gen_range(-30..=30), rng.gen_range(1..=30));
    for n in 0..100 {
        let d = std::array::from_fn(|_| value());
        let s = std::array::from_fn(|_| value());
        let w = std::array::from_fn(|_| loop {
            let v = value();
            if !v.is_zero() {
                break v;
            }
        });
        let p = LinkageParams::from_dsw(d, s, w).expect("nonzero w");
        let got = quad_minus(&p, 1);
        let want = printed_q1_minus(&p);
        ensure(got == want, || format!("set {n}: {got} vs printed {want}"))?;
    }
    let hp = builtin_instance(Builtin::NewExample).to_field::<F256>();
    let d25 = coefficient_distance(&quad_minus(&hp, 2), &quad_minus(&hp, 5));
    let d36 = coefficient_distance(&quad_minus(&hp, 3), &quad_minus(&hp, 6));
    ensure(d25 < 1e-20 && d36 < 1e-20, || format!("256-bit distances {d25:e}, {d36:e}"))?;
    Ok(format!("100 exact matches; Q2-/Q5- {d25:.1e}, Q3-/Q6- {d36:.1e} at 256 bits"))
}

fn family_quad_equalities() -> Outcome {
    for seed in 0..100 {
        let ls = sample(Family::LineSymmetric, seed).map_err(|e| e.to_string())?;
        for i in 1..=3 {
            ensure(quad_plus(&ls, i) == quad_plus(&ls, i + 3), || format!("line_symmetric seed {seed} pair {i}"))?;
        }
        let orth = sample(Family::Orthogonal, seed).map_err(|e| e.to_string())?;
        for i in 1..=3 {
            ensure(
                quad_plus(&orth, i) == quad_plus(&orth, i + 3) && quad_minus(&orth, i) == quad_minus(&orth, i + 3),
                || format!("orthogonal seed {seed} pair {i}"),
            )?;
        }
        let hooke = sample(Family::Hooke, seed).map_err(|e| e.to_string())?;
        for (sign, (a, b)) in [
            ("+", (quad_plus(&hooke, 1), quad_plus(&hooke, 4))),
            ("-", (quad_minus(&hooke, 1), quad_minus(&hooke, 4))),
        ] {
            ensure(gcd_degree(&a, &b, 0.0) == 2, || format!("hooke seed {seed} sign {sign}"))?;
        }
        let mut s = hooke.s_all().clone();
        s[5] = s[5].clone() + q(1, 7);
        let broken = LinkageParams::from_bsw(hooke.b_all().clone(), s, hooke.w_all().clone()).expect("same w");
        let rp = resultant(&quad_plus(&broken, 1), &quad_plus(&broken, 4));
        let rm = resultant(&quad_minus(&broken, 1), &quad_minus(&broken, 4));
        ensure(!rp.is_zero() && !rm.is_zero(), || format!("perturbed hooke seed {seed} kept a common root"))?;
        for family in [Family::Dietmaier, Family::DietmaierSecond] {
            let p = sample(family, seed).map_err(|e| e.to_string())?;
            ensure(
                quad_plus(&p, 1) == quad_plus(&p, 4) && quad_minus(&p, 1) == quad_minus(&p, 4),
                || format!("{family} seed {seed}"),
            )?;
        }
    }
    Ok("100 seeds each: line_symmetric, orthogonal, hooke (+ perturbed), dietmaier, dietmaier_second".into())
}

fn trace_summary(p: &LinkageParams<f64>) -> Result<sixr::mobility::ConfigCurve, String> {
    let start = find_seed(p, 200, 1).ok_or("find_seed failed")?;
    let curve = trace(p, &start, DEFAULT_STEPS, DEFAULT_STEP).map_err(|e| e.to_string())?;
    ensure(curve.len() >= 100, || format!("only {} points ({:?})", curve.len(), curve.termination))?;
    ensure(curve.max_residual() < 1e-9, || format!("max residual {:e}", curve.max_residual()))?;
    ensure(curve.min_rank_gap() > RANK_GAP, || format!("min rank gap {:e}", curve.min_rank_gap()))?;
    Ok(curve)
}

fn new_family_mobility() -> Outcome {
    let p = builtin_instance(Builtin::NewExample).to_field::<f64>();
    let curve = trace_summary(&p)?;
    let d14 = curve.max_angle_difference(1, 4);
    ensure(d14 < 1e-9, || format!("max |theta1 - theta4| {d14:e}"))?;
    Ok(format!(
        "{} points, closed {}, residual {:.1e}, min gap {:.1e}, |theta1-theta4| {d14:.1e}",
        curve.len(),
        curve.closed,
        curve.max_residual(),
        curve.min_rank_gap()
    ))
}

fn bricard_mobility() -> Outcome {
    let p = builtin_instance(Builtin::BricardExample).to_field::<f64>();
    let curve = trace_summary(&p)?;
    let report = verify_curve(&p, &curve, &bricard_curve());
    let worst_poly = report.polynomials.iter().map(|m| m.max_abs).fold(0.0, f64::max);
    ensure(worst_poly < 1e-7, || format!("printed polynomials reach {worst_poly:e}"))?;
    let sym = (1..=3).map(|i| curve.max_angle_difference(i, i + 3)).fold(0.0, f64::max);
    ensure(sym < 1e-9, || format!("t_i vs t_(i+3) angle difference {sym:e}"))?;
    Ok(format!(
        "{} points, closed {}, residual {:.1e}, min gap {:.1e}, polynomials {worst_poly:.1e}, symmetry {sym:.1e}",
        curve.len(),
        curve.closed,
        curve.max_residual(),
        curve.min_rank_gap()
    ))
}

fn rigidity_certificates() -> Outcome {
    let certified = (0..100).filter(|&seed| rigidity_certificate(&generic_sample(seed, 50), 0.0).is_some()).count();
    ensure(certified >= 99, || format!("only {certified}/100 generic sets certified"))?;
    for family in Family::ALL {
        for seed in 0..100 {
            let p = sample(family, seed).map_err(|e| e.to_string())?;
            ensure(rigidity_certificate(&p, 0.0).is_none(), || format!("{family} seed {seed} was certified rigid"))?;
        }
    }
    Ok(format!("{certified}/100 generic certified; 0 of 700 family samples"))
}

fn resultant_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut z = || Cplx::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let mut worst = 0.0f64;
    for n in 0..1000 {
        let (r1, r2, u1, u2) = (z(), z(), z(), z());
        let oracle = (r1 - u1) * (r1 - u2) * (r2 - u1) * (r2 - u2);
        let p = QuadPoly::from_roots(r1, r2);
        let g = QuadPoly::from_roots(u1, u2);
        for got in [sylvester_resultant(&p, &g), resultant(&p, &g)] {
            let rel = (got - oracle).magnitude() / oracle.magnitude();
            worst = worst.max(rel);
            ensure(rel <= 1e-10, || format!("quadratic pair {n}: relative error {rel:e}"))?;
        }
    }
    Ok(format!("1000 pairs, worst relative error {worst:.1e}"))
}

fn diagram_logic() -> Outcome {
    let valid: Vec<_> = enumerate().collect();
    ensure(valid.iter().all(validate), || "enumerate emitted an invalid hypothesis".into())?;
    for (name, h) in known_diagrams() {
        ensure(valid.contains(&h), || format!("{name} diagram missing"))?;
    }
    let sys = conditions_for(&known_diagram("new_family").expect("known")).map_err(|e| e.to_string())?;
    let blocks: Vec<String> = sys
        .far_conditions
        .iter()
        .map(|f| format!("Q{}{}=Q{}{}", f.pair, f.sign.symbol(), f.pair + 3, f.sign.symbol()))
        .collect();
    let expected = ["Q1+=Q4+", "Q2+=Q5+", "Q3+=Q6+", "Q2-=Q5-", "Q3-=Q6-"];
    ensure(
        sys.bennett_conditions.is_empty()
            && sys.far_conditions.iter().all(|f| f.kind == FarKind::Equality)
            && blocks == expected,
        || format!("got {blocks:?}"),
    )?;
    Ok(format!("{} valid hypotheses; 8 known diagrams present; blocks {}", valid.len(), blocks.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("printed transfer elements", 1, printed_transfer_elements),
        ("printed curve consistency", 10, printed_curve_consistency),
        ("quad-minus convention", 5, quad_minus_convention),
        ("family implies quad equalities", 30, family_quad_equalities),
        ("new-family mobility", 60, new_family_mobility),
        ("bricard mobility", 60, bricard_mobility),
        ("rigidity certificates", 30, rigidity_certificates),
        ("resultant oracle", 5, resultant_oracle),
        ("diagram logic", 10, diagram_logic),
    ];
    let mut failures = 0;
    for (n, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget} s"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({elapsed:.2?}): {detail}", n + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {name} ({elapsed:.2?}): {detail}", n + 1);
            }
        }
    }
    if failures == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
