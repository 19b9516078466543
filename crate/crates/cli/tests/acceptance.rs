//! Acceptance suite: ten criteria at pinned tolerances, one line each.
//!
//! Canonical problem unless stated: α = 0.75, f(ξ) = ξ₊³ (θ = 4, p₀ = 3.5),
//! V ≡ 1, L = 20, N = 1024, grad_tol = 1e-6.
//!
//! Criteria listed in `KNOWN_FAILURES` are still run at their pinned
//! tolerances and print FAIL; they do not fail the target. Anything else
//! failing, or a known failure starting to pass, exits nonzero.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lwnls::energy::{evaluate_i, gradient_i};
use lwnls::nehari::{continuity_sweep, nehari_project, FiberingMap, LEVEL_TOL};
use lwnls::rearrange::{polya_szego_check, rearrangement_report, LP_EXPONENTS};
use lwnls::sampling::{random_band_limited, random_bumps};
use lwnls::solver::{
    compare_c_to_c_infinity, descend, ground_state, nonneg_violation, start_field, symmetry_defect, SolverConfig, Start,
};
use lwnls::spaces::seminorm_alpha_sq;
use lwnls::spectral::{composed_operator, l2_dot, left_lw_derivative};
use lwnls::{Field, FractionalOrder, Grid, Nonlinearity, Potential, PotentialFlags, Problem};

/// Domain truncation: the ground state decays like |x|^{-(1+2α)}, and at
/// L = 20 the level still moves by ~4e-4 relative when L doubles.
const KNOWN_FAILURES: &[u32] = &[4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn alpha(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn cubic() -> Nonlinearity {
    Nonlinearity::power(3.0, 3.5).unwrap()
}

fn problem(l: f64, n: usize, pot: Potential) -> Problem {
    Problem::new(alpha(0.75), Grid::new(l, n).unwrap(), cubic(), pot)
}

fn canonical() -> Problem {
    problem(20.0, 1024, Potential::constant(1.0))
}

fn well() -> Potential {
    Potential::from_expr(
        "2 - 1/(1+t^2)",
        1.0,
        2.0,
        PotentialFlags {
            radial_increasing: true,
            below_v_inf: true,
        },
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let g = Grid::new(20.0, 1024).unwrap();
    let l = g.half_length();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // explicit trigonometric sums: u'' is known in closed form
    let mut classical = 0.0_f64;
    for _ in 0..20 {
        let terms: Vec<(f64, f64, f64)> = (0..=60)
            .map(|k| {
                (
                    PI * k as f64 / l,
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..2.0 * PI),
                )
            })
            .collect();
        let u = Field::from_fn(&g, |x| terms.iter().map(|&(w, a, p)| a * (w * x + p).cos()).sum());
        let d2 = Field::from_fn(&g, |x| {
            terms.iter().map(|&(w, a, p)| -w * w * a * (w * x + p).cos()).sum()
        });
        let a = composed_operator(&u, alpha(1.0));
        let err = a.add_scaled(1.0, &d2).unwrap();
        classical = classical.max(l2_dot(&err, &err).sqrt() / l2_dot(&d2, &d2).sqrt());
    }

    // frequency-side seminorm against ∫ |D^α u|² on the physical side
    let mut equiv = 0.0_f64;
    for i in 0..100 {
        let a = alpha([0.6, 0.75, 0.9][i % 3]);
        let u = random_band_limited(&g, 80, &mut rng);
        let freq = seminorm_alpha_sq(&u, a);
        let d = left_lw_derivative(&u, a);
        let phys = l2_dot(&d.re, &d.re) + l2_dot(&d.im, &d.im);
        equiv = equiv.max(rel(phys, freq));
    }
    let t = t0.elapsed();
    outcome(
        classical <= 1e-8 && equiv <= 1e-9 && t < Duration::from_secs(5),
        format!("classical-limit error {classical:.2e} (≤ 1e-8), seminorm equivalence {equiv:.2e} (≤ 1e-9), {t:.2?} (< 5 s)"),
    )
}

fn criterion_2() -> Outcome {
    let p = problem(20.0, 1024, well());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut orders = Vec::new();
    for _ in 0..20 {
        let u = random_bumps(p.grid(), 3, &mut rng);
        let phi = random_band_limited(p.grid(), 20, &mut rng);
        let exact = l2_dot(&gradient_i(&u, &p), &phi);
        let fd = |h: f64| {
            (evaluate_i(&u.add_scaled(h, &phi).unwrap(), &p).total
                - evaluate_i(&u.add_scaled(-h, &phi).unwrap(), &p).total)
                / (2.0 * h)
        };
        let (e1, e2) = ((fd(1e-2) - exact).abs(), (fd(5e-3) - exact).abs());
        orders.push((e1 / e2).log2());
    }
    let (lo, hi) = orders
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &o| (a.min(o), b.max(o)));
    outcome(
        orders.iter().all(|o| (o - 2.0).abs() <= 0.2),
        format!("observed orders in [{lo:.3}, {hi:.3}] over 20 pairs (2.0 ± 0.2)"),
    )
}

fn criterion_3() -> Outcome {
    let p = canonical();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0_f64;
    let mut single = 0;
    for _ in 0..100 {
        // random band-limited field with a nonzero positive part
        let u = loop {
            let u = random_band_limited(p.grid(), 15, &mut rng);
            if u.values().iter().any(|&x| x > 0.0) {
                break u;
            }
        };
        let r = nehari_project(&u, &p).unwrap();
        let q4 = p.grid().dx() * u.values().iter().map(|x| x.max(0.0).powi(4)).sum::<f64>();
        worst = worst.max(rel(r.sigma_u, (r.norm_x_sq / q4).sqrt()));

        let map = FiberingMap::new(&u, &p);
        let signs: Vec<bool> = (0..200)
            .map(|k| map.mismatch(r.sigma_u * 10f64.powf(-3.0 + 6.0 * k as f64 / 199.0)) > 0.0)
            .collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        if changes == 1 && signs[0] {
            single += 1;
        }
    }
    outcome(
        worst <= 1e-10 && single == 100,
        format!("closed-form σ error {worst:.2e} (≤ 1e-10), single sign change in {single}/100"),
    )
}

fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let cfg = SolverConfig::default();
    let base = ground_state(&canonical(), &cfg).unwrap();
    let fine = ground_state(&problem(20.0, 2048, Potential::constant(1.0)), &cfg).unwrap();
    let wide = ground_state(&problem(40.0, 2048, Potential::constant(1.0)), &cfg).unwrap();
    let t = t0.elapsed();
    let (dn, dl) = (rel(fine.c, base.c), rel(wide.c, base.c));
    let pass = base.converged
        && base.residual <= 1e-6
        && base.iterations <= 5000
        && dn <= 1e-4
        && dl <= 1e-4
        && t < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "c = {:.10}, residual {:.2e} after {} iterations; drift N=2048 {dn:.2e}, L=40 {dl:.2e} (≤ 1e-4); {t:.2?} (< 60 s)",
            base.c, base.residual, base.iterations
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = canonical();
    let mut worst = nonneg_violation(&ground_state(&p, &SolverConfig::default()).unwrap().u);
    let mut converged = true;
    for seed in 1..=5 {
        let cfg = SolverConfig {
            seed,
            start: Start::Random,
            ..Default::default()
        };
        let d = descend(&p, &start_field(&p, &cfg).unwrap(), &cfg).unwrap();
        converged &= d.converged;
        worst = worst.max(nonneg_violation(&d.u));
    }
    outcome(
        worst <= 1e-6 && converged,
        format!("worst violation {worst:.2e} (≤ 1e-6) over canonical + 5 seeded starts, all converged: {converged}"),
    )
}

fn criterion_6() -> Outcome {
    let p = canonical();
    let eps = [0.05, 0.1, 0.2, 0.4];
    let s = continuity_sweep(&Potential::constant(1.0), &eps, &p, &SolverConfig::default(), false).unwrap();
    let margins: Vec<f64> = s.rows.windows(2).map(|w| w[1].c - w[0].c).collect();
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let gaps: Vec<f64> = s.rows.iter().map(|r| (r.c - s.c_base).abs()).collect();
    let shrinking = gaps.windows(2).all(|w| w[0] < w[1]);
    let converged = s.rows.iter().all(|r| r.converged);
    outcome(
        min_margin > 1e-6 && shrinking && converged,
        format!(
            "min increment {min_margin:.3e} (> 1e-6); |c_ε - c_V| = {} shrinking as ε ↓ 0: {shrinking}",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let v = compare_c_to_c_infinity(&problem(20.0, 1024, well()), &SolverConfig::default()).unwrap();
    outcome(
        v.c < v.c_inf && v.gap >= 10.0 * LEVEL_TOL && v.converged,
        format!(
            "c = {:.8}, c_inf = {:.8}, gap {:.3e} (≥ {:.0e}), converged: {}",
            v.c,
            v.c_inf,
            v.gap,
            10.0 * LEVEL_TOL,
            v.converged
        ),
    )
}

fn criterion_8() -> Outcome {
    let t0 = Instant::now();
    let g = Grid::new(20.0, 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut drift = 0.0_f64;
    for a in [0.6, 0.75, 0.9] {
        for i in 0..500 {
            let u = if i % 2 == 0 {
                random_band_limited(&g, 60, &mut rng)
            } else {
                random_bumps(&g, 4, &mut rng)
            };
            if !polya_szego_check(&u, alpha(a)).unwrap().holds {
                violations += 1;
            }
            if a == 0.6 {
                let r = rearrangement_report(&u, None);
                for q in LP_EXPONENTS {
                    drift = drift.max(r.lp_drift[&q]);
                }
            }
        }
    }
    let t = t0.elapsed();
    outcome(
        violations == 0 && drift <= 1e-12 && t < Duration::from_secs(30),
        format!("{violations} violations in 1500 checks, worst L^q drift {drift:.2e} (≤ 1e-12), {t:.2?} (< 30 s)"),
    )
}

fn criterion_9() -> Outcome {
    // off-centre start, so symmetry is not inherited from the initial profile
    let cfg = SolverConfig {
        start: Start::GaussianBump {
            center: 1.3,
            width: 1.0,
        },
        ..Default::default()
    };
    let run = |n: usize| {
        let p = problem(20.0, n, well());
        let d = descend(&p, &start_field(&p, &cfg).unwrap(), &cfg).unwrap();
        (symmetry_defect(&d.u), d.converged)
    };
    let (d2, ok2) = run(2048);
    let (d4, ok4) = run(4096);
    outcome(
        ok2 && ok4 && d2 <= 1e-3 && d4 < d2,
        format!(
            "defect N=2048 {d2:.10e} (≤ 1e-3), N=4096 {d4:.10e} (decreasing: {})",
            d4 < d2
        ),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    fs::write(
        &config,
        r#"
tag = "determinism"
alpha = 0.75
L = 20.0
N = 1024

[nonlinearity]
kind = "power"
p = 3.0
p0 = 3.5

[potential]
expr = "1"
V0 = 1.0
Vinf = 1.0
flags = { radial_increasing = true }

[sweep]
parameter = "alpha"
values = [0.6, 0.75, 0.9]
"#,
    )
    .unwrap();
    let run = |out: &str, jobs: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_lwnls"))
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(dir.path().join(out))
            .args(["--jobs", jobs])
            .output()
            .unwrap();
        let csv = fs::read(dir.path().join(out).join("determinism_0.75_1024_sweep_alpha.csv")).unwrap_or_default();
        (status.status.code(), csv)
    };
    let (code_a, a) = run("a", "3");
    let (code_b, b) = run("b", "1");
    outcome(
        code_a == Some(0) && code_b == Some(0) && !a.is_empty() && a == b,
        format!(
            "exit codes {code_a:?}/{code_b:?}, {} CSV bytes, byte-identical: {}",
            a.len(),
            a == b
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "spectral correctness", criterion_1),
        (2, "gradient consistency", criterion_2),
        (3, "Nehari projection", criterion_3),
        (4, "ground-state convergence", criterion_4),
        (5, "nonnegativity", criterion_5),
        (6, "level monotonicity and continuity", criterion_6),
        (7, "attainment signature", criterion_7),
        (8, "Polya-Szego and L^q preservation", criterion_8),
        (9, "symmetry", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let mut unexpected = 0;
    let mut known = 0;
    for (id, name, f) in criteria {
        let t0 = Instant::now();
        let o = f();
        let expected_fail = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, expected_fail) {
            (true, false) => "PASS",
            (false, true) => {
                known += 1;
                "FAIL (known)"
            }
            (true, true) => {
                unexpected += 1;
                "PASS (unexpected; remove from KNOWN_FAILURES)"
            }
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2} {name}: {tag} — {} [{:.2?}]", o.detail, t0.elapsed());
    }
    println!("acceptance: {} unexpected, {known} known failure(s)", unexpected);
    if unexpected > 0 {
        std::process::exit(1);
    }
}
