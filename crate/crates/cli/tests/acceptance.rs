//! Acceptance criteria. Each prints one PASS or FAIL line; the test fails if any does.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::process::Command;
use std::result::Result;
use std::time::{Duration, Instant};

use qpe_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Verdict = Result<String, String>;

fn qpe_with(args: &[&str], threads: Option<&str>) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpe"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("QPE_THREADS", t),
        None => cmd.env_remove("QPE_THREADS"),
    };
    let o = cmd.output().expect("spawn qpe");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn qpe_json(args: &[&str]) -> Result<Value, String> {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--format", "json", "--precision", "17"]);
    let (code, out) = qpe_with(&full, None);
    if code != 0 {
        return Err(format!("`qpe {}` exited {code}", args.join(" ")));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("{key} missing or null"))
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(20_240_601)
}

fn random_state(r: &mut ChaCha8Rng) -> State {
    let t: f64 = r.gen_range(0.0..PI);
    let p: f64 = r.gen_range(-PI..PI);
    State::from_bloch(t, p).unwrap()
}

fn dice() -> Verdict {
    let start = Instant::now();
    let v = qpe_json(&["scenario", "dice"])?;
    let elapsed = start.elapsed();
    let r5 = 5f64.sqrt();
    let expect = [
        ("p_f", 5.0 / 6.0),
        ("shift_E0_f", r5 / 6.0),
        ("shift_M_f", -1.0 / (3.0 * r5)),
        ("shift_M_perp", -r5 / 3.0),
        ("balance_residual", 0.0),
    ];
    let mut worst = 0.0f64;
    for (k, e) in expect {
        worst = worst.max((num(&v, k)? - e).abs());
    }
    check(
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("worst deviation {worst:e}, runtime {:.3} s", elapsed.as_secs_f64()),
    )
}

fn subshifts_vs_brute_force() -> Verdict {
    let start = Instant::now();
    let w = Window::new(1e6, 1, 10.0, AmplitudeMode::PoissonExact).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for kind in SubShiftKind::ALL {
        for theta in [0.5, 1.0, 2.0] {
            let a = jc_subshift_analytic(kind, theta).map_err(|e| e.to_string())?;
            let n = jc_subshift_numeric(kind, theta, &w).map_err(|e| e.to_string())?;
            worst = worst.max((a - n).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 5e-3 && elapsed < Duration::from_secs(60),
        format!("max |numeric - analytic| = {worst:e} quanta, runtime {:.2} s", elapsed.as_secs_f64()),
    )
}

fn convergence() -> Verdict {
    let start = Instant::now();
    let theta = (PI * (1.5 - 1.0 / 400.0)).to_string();
    let v = qpe_json(&[
        "jc",
        "converge",
        "--theta",
        &theta,
        "--i-theta",
        &FRAC_PI_2.to_string(),
        "--i-phi",
        "0",
        "--m",
        "1",
        "--amp-mode",
        "gaussian",
        "--n0-list",
        "1e4,1e5,1e6,1e7",
    ])?;
    let elapsed = start.elapsed();
    let errs: Vec<f64> =
        v["rows"].as_array().ok_or("no rows")?.iter().map(|r| num(r, "abs_error")).collect::<Result<_, _>>()?;
    let strictly = errs.len() == 4 && errs.windows(2).all(|p| p[1] < p[0]);
    let text: Vec<String> = errs.iter().map(|e| format!("{e:.4}")).collect();
    check(
        strictly && elapsed < Duration::from_secs(300),
        format!("abs errors [{}], runtime {:.2} s", text.join(", "), elapsed.as_secs_f64()),
    )
}

fn conservation() -> Verdict {
    let mut r = rng();
    let h = Hamiltonian::unit();
    let mut eq10 = 0.0f64;
    let mut eq6 = 0.0f64;
    let mut exact = true;
    let mut drawn = 0;
    while drawn < 1000 {
        let theta: f64 = r.gen_range(-4.0 * PI..4.0 * PI);
        // sub-shift poles sit at multiples of pi
        if ((theta / PI).round() * PI - theta).abs() < 1e-3 {
            continue;
        }
        drawn += 1;
        let (u, d) = jc_conservation_residual(theta);
        eq10 = eq10.max(u.abs()).max(d.abs());
        for prep in [Level::Up, Level::Down] {
            let total: f64 = [Level::Up, Level::Down]
                .map(|found| {
                    let k = SubShiftKind::new(prep, found);
                    jc_subshift_probability(k, theta) * (deg_subshift_analytic::<f64>(k) + jc_qubit_subshift::<f64>(k))
                })
                .iter()
                .sum();
            exact &= total == 0.0;
        }
    }
    for _ in 0..1000 {
        let i = random_state(&mut r);
        let b = basis_from_angle(r.gen_range(-4.0 * PI..4.0 * PI)).unwrap();
        eq6 = eq6.max(clock_energy_balance(&i, &b, &h).map_err(|e| e.to_string())?.abs());
    }
    check(
        eq10 <= 1e-12 && eq6 <= 1e-12 && exact,
        format!("sub-shift residual {eq10:e}, clock balance residual {eq6:e}, clock values exact: {exact}"),
    )
}

fn degenerate_equals_clock() -> Verdict {
    let mut r = rng();
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let i = random_state(&mut r);
        let theta = r.gen_range(-4.0 * PI..4.0 * PI);
        let o = if k % 2 == 0 { Outcome::F } else { Outcome::Perp };
        worst = worst.max(common_form_equivalence_residual(&i, theta, o).map_err(|e| e.to_string())?);
    }
    let w = Window::new(1e4, 1, 10.0, AmplitudeMode::PoissonExact).map_err(|e| e.to_string())?;
    let mut sub = 0.0f64;
    for kind in SubShiftKind::ALL {
        for theta in [0.5, 1.0, 2.0, FRAC_PI_3, FRAC_PI_2] {
            let n = deg_subshift_numeric(kind, theta, &w).map_err(|e| e.to_string())?;
            sub = sub.max((n - deg_subshift_analytic::<f64>(kind)).abs());
        }
    }
    check(worst <= 1e-12 && sub <= 2e-3, format!("equivalence residual {worst:e}, sub-shift deviation {sub:e}"))
}

fn clock_numerics() -> Verdict {
    let dice_theta = (2.0f64 / 3.0).asin().to_string();
    let eps = 0.1f64;
    let eps_theta = (2.0 * (-((1.0 + eps) / 2.0).sqrt()).atan2(((1.0 - eps) / 2.0).sqrt())).to_string();
    let mut norm_err = 0.0f64;
    let mut rel = [0.0f64; 2];
    for (k, (theta, sigma, target)) in
        [(dice_theta.as_str(), "0.01", None), (eps_theta.as_str(), "1e-3", Some(-9.924))].into_iter().enumerate()
    {
        for outcome in ["f", "perp"] {
            let v = qpe_json(&["clock", "numeric", "--theta", theta, "--sigma-q", sigma, "--outcome", outcome])?;
            norm_err = norm_err.max(num(&v, "norm_error")?);
            if outcome == "f" {
                let numeric = num(&v, "shift_numeric")?;
                let reference = target.map_or(num(&v, "shift_analytic"), Ok)?;
                rel[k] = ((numeric - reference) / reference).abs();
            }
        }
    }
    check(
        rel[0] <= 0.01 && rel[1] <= 0.02 && norm_err <= 1e-3,
        format!("dice relative {:e}, eps=0.1 relative {:e}, norm vs Born {norm_err:e}", rel[0], rel[1]),
    )
}

fn special_cases() -> Verdict {
    let mut r = rng();
    let h = Hamiltonian::unit();
    let mut eigen = 0.0f64;
    let mut flat = true;
    let mut up_y = true;
    for _ in 0..1000 {
        let theta: f64 = r.gen_range(-4.0 * PI..4.0 * PI);
        let b = basis_from_angle(theta).unwrap();
        for o in [Outcome::F, Outcome::Perp] {
            for i in [State::up_z(), State::down_z()] {
                if let Ok(s) = clock_shift_analytic(&i, &b, o, &h) {
                    let dq = energy_expectation(b.state(o), &h) - energy_expectation(&i, &h);
                    eigen = eigen.max((s.shift + dq).abs());
                }
            }
            let c = clock_shift_analytic(&State::up_y(), &b, o, &h).map(|s| s.shift);
            let j = jc_full_shift(&State::up_y(), theta, o, Method::Analytic, None).map(|s| s.shift);
            up_y &= c == Ok(0.0) && j == Ok(0.0);
        }
        let zero = basis_from_angle(0.0).unwrap();
        if let Ok(s) = clock_shift_analytic(&random_state(&mut r), &zero, Outcome::F, &h) {
            flat &= s.shift == 0.0;
        }
    }

    let v = qpe_json(&["scenario", "sweep", "--i-theta", &FRAC_PI_2.to_string(), "--i-phi", "0"])?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    let mut marks = true;
    let mut marked = 0;
    for row in rows {
        let theta = num(row, "theta")?;
        let n = (theta - 1.5 * PI) / (2.0 * PI);
        let divergent = (n - n.round()).abs() < 1e-9;
        for key in ["clock_shift", "jc_shift", "deg_shift"] {
            marks &= row[key].is_null() == divergent;
        }
        marked += divergent as usize;
    }
    marks &= marked == 2;
    check(
        eigen == 0.0 && flat && up_y && marks,
        format!(
            "eigenstate |shift + dE0| max {eigen:e}, theta = 0 zero: {flat}, up_y zero: {up_y}, absent exactly at 3pi/2 + 2n pi: {marks}"
        ),
    )
}

fn way_illustrations() -> Verdict {
    let mut decay = 0.0f64;
    for ratio in [1e-3, 0.1, 0.5, 1.0, 2.0, 5.0] {
        for theta in ["0.3", "1.5707963267948966", "2.5"] {
            let v = qpe_json(&["clock", "decoherence", "--theta", theta, "--sigma-q", &ratio.to_string()])?;
            decay = decay.max(num(&v, "discrepancy")?);
        }
    }
    let mut purity = 0.0f64;
    for n in 0..50u64 {
        let p = fock_drive_purity(&State::up_z(), n, FRAC_PI_2 / ((n + 1) as f64).sqrt());
        purity = purity.max((p - 0.5).abs());
    }
    let v = qpe_json(&["jc", "fidelity", "--theta", &FRAC_PI_2.to_string(), "--i-theta", "0", "--n0-list", "1e2,1e4"])?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    let (lo, hi) = (num(&rows[0], "fidelity")?, num(&rows[1], "fidelity")?);
    check(
        decay <= 1e-8 && purity <= 1e-10 && hi > lo,
        format!("decay discrepancy {decay:e}, purity deviation {purity:e}, fidelity {lo:.9} -> {hi:.9}"),
    )
}

const EVERY_COMMAND: [&[&str]; 15] = [
    &["clock", "shift", "--theta", "1.1"],
    &["clock", "numeric", "--theta", "1.1"],
    &["clock", "balance", "--theta", "1.1"],
    &["clock", "decoherence", "--theta", "1.1"],
    &["jc", "subshifts", "--theta", "1.1", "--n0", "1e4"],
    &["jc", "shift", "--theta", "1.1", "--n0", "1e4"],
    &["jc", "converge", "--theta", "1.1", "--n0-list", "1e4,1e5,1e6"],
    &["jc", "fidelity", "--theta", "1.1", "--fock-n", "7"],
    &["jc", "conserve", "--theta", "1.1"],
    &["deg", "subshifts", "--theta", "1.1", "--n0", "1e4"],
    &["deg", "shift", "--theta", "1.1", "--n0", "1e4"],
    &["deg", "equiv", "--theta", "1.1"],
    &["scenario", "dice"],
    &["scenario", "sweep", "--n0", "1e4", "--steps", "41"],
    &["scenario", "stevens", "--envelope", "0.5"],
];

fn determinism() -> Verdict {
    let mut differing = Vec::new();
    for args in EVERY_COMMAND {
        for format in ["csv", "json"] {
            let mut full = args.to_vec();
            full.extend(["--format", format]);
            let base = qpe_with(&full, None);
            if base.0 != 0 {
                return Err(format!("`qpe {}` exited {}", full.join(" "), base.0));
            }
            let same = [None, Some("1"), Some("3"), Some("8")].iter().all(|t| qpe_with(&full, *t) == base);
            if !same {
                differing.push(full.join(" "));
            }
        }
    }
    check(
        differing.is_empty(),
        if differing.is_empty() {
            "15 subcommands x 2 formats, byte-identical across repeats and QPE_THREADS = 1, 3, 8".into()
        } else {
            format!("differing: {}", differing.join("; "))
        },
    )
}

fn stevens_curves() -> Verdict {
    let v = qpe_json(&["scenario", "stevens"])?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    let mut worst = 0.0f64;
    let mut points = 0;
    let mut poles_ok = true;
    for row in rows {
        let theta = num(row, "theta")?;
        let x = theta.abs() / 2.0;
        let ground = -x * x.tan();
        let excited = if x == 0.0 { 0.0 } else { -1.0 + x / x.tan() };
        let near_pole = |p: f64| (p - p.round()).abs() < 1e-9;
        let ground_pole = near_pole(theta / PI - 1.0) && near_pole((theta / PI - 1.0) / 2.0);
        let excited_pole = theta != 0.0 && near_pole(theta / (2.0 * PI));
        for (key, pole, expect) in [("ground_postselected", ground_pole, ground), ("excited_postselected", excited_pole, excited)] {
            match row[key].as_f64() {
                Some(got) if !pole => {
                    worst = worst.max((got - expect).abs());
                    points += 1;
                }
                None if pole => {}
                _ => poles_ok = false,
            }
        }
    }
    check(
        worst <= 1e-12 && poles_ok && points > 0,
        format!("{points} non-pole values, max deviation {worst:e}, absent exactly at poles: {poles_ok}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1 dice example", dice),
        ("2 sub-shift closed forms vs brute force", subshifts_vs_brute_force),
        ("3 convergence study", convergence),
        ("4 conservation identities", conservation),
        ("5 degenerate equals clock", degenerate_equals_clock),
        ("6 clock numerics vs closed form", clock_numerics),
        ("7 special cases", special_cases),
        ("8 WAY illustrations", way_illustrations),
        ("9 determinism", determinism),
        ("stevens theory-curve emission", stevens_curves),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL criterion {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
