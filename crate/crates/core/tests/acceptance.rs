//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the process exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::f64::consts::E;
use std::time::{Duration, Instant};

use lambert_tsallis::domain::{boundary_samples, cut_set, CutKind};
use lambert_tsallis::inverse::{w_eval, EvalOptions, MainBranch};
use lambert_tsallis::scalar_analysis::b_sign_row;
use lambert_tsallis::tsallis_map::{f_eval, implicit_f};
use lambert_tsallis::verify::{
    bijectivity_probe, default_cells, default_grid, lemma_audit, run_grid, sample_upper_domain, DEFAULT_PROBES,
};
use lambert_tsallis::{Error, Kappa, Params};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn fin(k: f64, g: f64) -> Params {
    Params::finite(k, g).unwrap()
}

fn inf(g: f64) -> Params {
    Params::infinite(g).unwrap()
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let r = run_grid(&default_grid());
    let el = t.elapsed();
    let bad: Vec<String> = r
        .cells
        .iter()
        .filter(|c| !c.consistent)
        .take(5)
        .map(|c| format!("({}, {}) {}", c.params.kappa, c.params.gamma, c.class))
        .collect();
    let ok = r.inconsistent == 0 && el <= Duration::from_secs(300);
    (ok, format!("{} cells probed, {} inconsistent {:?}, {:.1}s", r.probed, r.inconsistent, bad, el.as_secs_f64()))
}

fn ac2() -> Outcome {
    let t = Instant::now();
    let sets = [
        fin(2.0, -0.5),
        fin(0.5, -1.0),
        fin(2.0, 0.0),
        fin(0.5, 0.0),
        fin(2.0, 0.1),
        fin(2.0, 0.5),
        fin(3.0, 0.4),
        fin(1.0, -1.0),
        fin(1.0, 0.0),
        fin(1.0, 0.5),
        inf(0.0),
        inf(0.2),
        inf(-0.5),
        fin(-0.5, -3.0),
        fin(-2.0, -1.0),
    ];
    let opts = EvalOptions::default();
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut failures = 0;
    for (i, p) in sets.iter().enumerate() {
        let mb = MainBranch::new(p).unwrap();
        let mut check = |err: f64, what: String| {
            if !(err <= 1e-9) {
                failures += 1;
            }
            if !(err <= worst) {
                worst = err;
                worst_at = what;
            }
        };
        for z in sample_upper_domain(p, 200, 100 + i as u64).unwrap() {
            let w = f_eval(p, z).unwrap();
            match mb.eval(w, &opts) {
                Ok(r) => {
                    check((r.z - z).norm() / z.norm().max(1.0), format!("W(f(z)) {p:?} z={z}"));
                    let back = f_eval(p, r.z).unwrap();
                    check((back - w).norm() / w.norm().max(1.0), format!("f(W(w)) {p:?} w={w}"));
                }
                Err(e) => check(f64::INFINITY, format!("{p:?} z={z}: {e}")),
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(200 + i as u64);
        let mut n = 0;
        while n < 200 {
            let w = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            if mb.cut().distance(w) < 1e-6 {
                continue;
            }
            n += 1;
            match mb.eval(w, &opts) {
                Ok(r) => {
                    let back = f_eval(p, r.z).unwrap();
                    check((back - w).norm() / w.norm().max(1.0), format!("f(W(w)) {p:?} w={w}"));
                }
                Err(e) => check(f64::INFINITY, format!("{p:?} w={w}: {e}")),
            }
        }
    }
    let el = t.elapsed();
    let ok = failures == 0 && el <= Duration::from_secs(120);
    (ok, format!("{} cases, worst {worst:.2e} ({worst_at}), {failures} above 1e-9, {:.1}s", sets.len(), el.as_secs_f64()))
}

/// Real `W_0(w)` by bisection of `x e^x = w` on `[-1, hi]`.
fn lambert_oracle(w: f64) -> f64 {
    let mut lo = -1.0f64;
    let mut hi = 1.0f64.max(w.ln_1p() + 1.0);
    while hi * hi.exp() < w {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if m * m.exp() < w {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

fn ac3() -> Outcome {
    let p = inf(0.0);
    let ws = [-1.0 / E + 1e-6, -0.1, 0.0, 0.5, 1.0, E, 10.0, 1e6];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for &w in &ws {
        let x = lambert_oracle(w);
        match w_eval(&p, c(w, 0.0), &EvalOptions::default()) {
            Ok(r) => {
                let err = if w == 0.0 { r.z.norm() } else { (r.z - x).norm() / x.abs() };
                worst = worst.max(err);
                ok &= err <= 1e-12;
            }
            Err(_) => ok = false,
        }
    }
    (ok, format!("{} points, worst relative error {worst:.2e}", ws.len()))
}

/// Root of `z^2 + (1 - gamma w) z - w = 0` inside the circle boundary of `Omega`.
fn k1_oracle(g: f64, w: Complex64) -> Option<Complex64> {
    let b = 1.0 - g * w;
    let s = (b * b + 4.0 * w).sqrt();
    let q = if (b.conj() * s).re >= 0.0 { -0.5 * (b + s) } else { -0.5 * (b - s) };
    let roots = [q, -w / q];
    let center = -1.0 / g;
    let radius = (1.0 - g).sqrt() / g.abs();
    let inside = |z: Complex64| {
        let d = (z - center).norm();
        if g < 0.0 {
            d < radius
        } else {
            d > radius
        }
    };
    let sel: Vec<Complex64> = roots.into_iter().filter(|z| inside(*z)).collect();
    (sel.len() == 1).then(|| sel[0])
}

fn ac4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut skipped = 0;
    for (i, &g) in [-1.0, 0.25, 0.5, 0.9].iter().enumerate() {
        let p = fin(1.0, g);
        let mb = MainBranch::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(300 + i as u64);
        let mut n = 0;
        while n < 500 {
            let w = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            if mb.cut().distance(w) < 1e-6 {
                continue;
            }
            n += 1;
            let Some(z0) = k1_oracle(g, w) else {
                skipped += 1;
                continue;
            };
            match mb.eval(w, &EvalOptions::default()) {
                Ok(r) => {
                    let err = (r.z - z0).norm() / z0.norm().max(1.0);
                    worst = worst.max(err);
                    if err > 1e-11 {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    (failures == 0 && skipped == 0, format!("2000 points, worst {worst:.2e}, {failures} failures, {skipped} ambiguous oracle picks"))
}

fn ac5() -> Outcome {
    let cases = [
        fin(2.0, -0.5),
        fin(0.5, -1.0),
        fin(2.0, 0.0),
        fin(0.5, 0.0),
        fin(2.0, 0.1),
        fin(2.0, 0.5),
        fin(3.0, 0.4),
        fin(2.0, 0.7),
        fin(0.5, 0.5),
        fin(4.0, 0.3),
        fin(1.5, 0.3),
        fin(0.25, 0.0),
        fin(0.75, -2.0),
        fin(1.0, -1.0),
        fin(1.0, 0.0),
        fin(1.0, 0.5),
        inf(0.0),
        inf(0.2),
        inf(0.5),
        inf(-0.5),
    ];
    let mut worst_f: f64 = 0.0;
    let mut mono_fail = Vec::new();
    let mut asym_cases = 0;
    for p in &cases {
        let e = boundary_samples(p, 512).unwrap();
        for s in &e.samples {
            for (x, y) in [(s.x_minus, s.y_minus), (s.x_plus, s.y_plus)] {
                if let (Some(x), Some(y)) = (x, y) {
                    let f = implicit_f(p, x, y).map(f64::abs).unwrap_or(f64::INFINITY);
                    worst_f = worst_f.max(f);
                }
            }
        }
        if let (Some(asym), Kappa::Finite(k)) = (e.asymptotes.first(), p.kappa) {
            asym_cases += 1;
            let end = asym.slope_angle;
            let last = e.samples.last().unwrap().theta;
            let gap = end - last;
            // (distance, rounding floor of the distance at that point)
            let tail: Vec<(f64, f64)> = e
                .samples
                .iter()
                .filter(|s| end - s.theta <= 10.0 * gap)
                .map(|s| {
                    let (x, y) = (s.x_plus.unwrap(), s.y_plus.unwrap());
                    (asym.distance(x, y), 8.0 * f64::EPSILON * x.hypot(y).max(1.0))
                })
                .collect();
            let mono = tail.len() >= 2 && tail.windows(2).all(|w| w[1].0 <= w[0].0 + w[1].1);
            if !mono {
                mono_fail.push(format!("kappa={k} gamma={}", p.gamma));
            }
        }
    }
    let ok = worst_f <= 1e-9 && mono_fail.is_empty() && asym_cases > 0;
    (ok, format!("{} cases, max |F| {worst_f:.2e}, {asym_cases} asymptotes, non-monotone {mono_fail:?}", cases.len()))
}

fn f_oracle(k: Option<f64>, g: f64, x: f64) -> f64 {
    let e = match k {
        Some(k) => (1.0 + x / k).powf(k),
        None => x.exp(),
    };
    x / (1.0 + g * x) * e
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    for i in 0..50 {
        let k = if i % 5 == 4 { None } else { Some(rng.gen_range(0.2..5.0)) };
        let g = -rng.gen_range(0.01..3.0);
        let p = match k {
            Some(k) => fin(k, g),
            None => inf(g),
        };
        // critical points from gamma x^2 + (1 + 1/kappa) x + 1 = 0
        let bq = 1.0 + k.map_or(0.0, |k| 1.0 / k);
        let disc = (bq * bq - 4.0 * g).sqrt();
        let (r1, r2) = ((-bq + disc) / (2.0 * g), (-bq - disc) / (2.0 * g));
        let (a1, a2) = (r1.min(r2), r1.max(r2));
        let (f1, f2) = (f_oracle(k, g, a1), f_oracle(k, g, a2));
        let cut = cut_set(&p).unwrap();
        let ok = f2 < f1
            && f1 < 0.0
            && cut.kind == CutKind::Interval
            && (cut.lo - f2).abs() <= 1e-10 * f2.abs()
            && (cut.hi - f1).abs() <= 1e-10 * f1.abs();
        if !ok {
            bad.push(format!("{p:?}"));
        }
    }
    // the gamma >= 0 side of the case split
    let split = [
        (fin(2.0, 0.0), CutKind::HalfLine),
        (fin(2.0, 0.3), CutKind::HalfLine),
        (fin(0.5, 0.0), CutKind::HalfLine),
        (inf(0.0), CutKind::HalfLine),
        (inf(0.25), CutKind::HalfLine),
        (fin(1.0, 0.5), CutKind::Interval),
        (fin(1.0, 0.0), CutKind::HalfLine),
        (fin(-2.0, -1.0), CutKind::Interval),
        (fin(-0.5, -3.0), CutKind::Interval),
    ];
    for (p, kind) in split {
        if cut_set(&p).ok().map(|c| c.kind) != Some(kind) {
            bad.push(format!("{p:?} kind"));
        }
    }
    (bad.is_empty(), format!("50 random gamma<0 cases and {} split checks, failures {bad:?}", split.len()))
}

fn ac7() -> Outcome {
    let cells = default_cells();
    let failures = lemma_audit(&cells);
    let rows: BTreeSet<u8> = cells
        .iter()
        .filter_map(|&(k, a)| b_sign_row(&fin(k, a / k)).ok().map(|r| r.row))
        .collect();
    let ok = failures.is_empty() && rows.len() == 12;
    (ok, format!("{} cells, rows covered {:?}, {} failures {:?}", cells.len(), rows, failures.len(), failures.first()))
}

fn ac8() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for &k in &[1.5, 2.0, 4.0] {
        let crit = 0.25 * (1.0 + 1.0 / k) * (1.0 + 1.0 / k);
        let g = crit + 0.2;
        let p = fin(k, g);
        ok &= p.disc0() < 0.0;
        let probe = bijectivity_probe(&p, &DEFAULT_PROBES).unwrap();
        let twos = probe.windings.iter().all(|w| w.value == Some(2));
        let refuses = [c(1.0, 1.0), c(-2.0, 0.5), c(0.1, 0.0)]
            .iter()
            .all(|&w| matches!(w_eval(&p, w, &EvalOptions::default()), Err(Error::NoBranch(_))));
        ok &= twos && refuses;
        notes.push(format!("kappa={k}: windings {:?} refuses {refuses}", probe.windings.iter().map(|w| w.value).collect::<Vec<_>>()));
    }
    (ok, notes.join("; "))
}

fn ac9() -> Outcome {
    let sets = [fin(-0.5, -3.0), fin(-2.0, -1.0), fin(-0.25, -5.0), fin(-1.5, 0.0), fin(-3.0, 0.05)];
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in &sets {
        let k = p.kappa.finite().unwrap();
        let red = Params::finite(-k, p.gamma - 1.0 / k).unwrap();
        for _ in 0..100 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(1e-3..3.0));
            let zr = z / (1.0 + z / k);
            let a = f_eval(p, z).unwrap();
            let b = f_eval(&red, zr).unwrap();
            worst = worst.max((a - b).norm() / a.norm().max(1.0));
        }
    }
    (worst <= 1e-12, format!("{} parameter sets x 100 points, worst {worst:.2e}", sets.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AC1 region map vs bijectivity probe", ac1),
        ("AC2 round-trip residuals", ac2),
        ("AC3 classical Lambert W", ac3),
        ("AC4 kappa = 1 closed form", ac4),
        ("AC5 boundary fidelity", ac5),
        ("AC6 cut-set ordering and kinds", ac6),
        ("AC7 sign-table audit", ac7),
        ("AC8 two-to-one detection", ac8),
        ("AC9 negative-kappa reduction", ac9),
    ];
    let mut all = true;
    for (name, f) in criteria {
        let (ok, detail) = f();
        all &= ok;
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    if !all {
        std::process::exit(1);
    }
}
