use std::f64::consts::FRAC_PI_2;

use crate::error::Result;
use crate::params::Params;
use crate::roots::{bisect, sign_changes, BISECT_TOL};
use crate::scalar_analysis::{
    b_prime, b_prime_sign_profile, b_sign_row, b_theta, d_theta, f_kappa, f_kappa_prime, f_kappa_table,
    g_kappa, h_alpha, h_alpha_prime, h_alpha_sign_profile, i1_upper, placement_holds, FTableCase, Sign,
    SignTable,
};
use crate::tsallis_map::{f_real, q_roots};

/// Samples per sub-interval of every sign table.
pub const PER_INTERVAL: usize = 200;
/// Tolerance for `b'` against a central difference of `b`, relative to `max(1, |b'|)`.
pub const FD_TOL: f64 = 1e-5;

/// `PER_INTERVAL` midpoints of equal slices of `(lo, hi)`.
fn midpoints(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let n = PER_INTERVAL;
    (0..n).map(move |j| lo + (hi - lo) * (j as f64 + 0.5) / n as f64)
}

/// Zeros of `g` on `(lo, hi)` from a fine scan, independent of any table.
fn scan_zeros<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> Vec<f64> {
    sign_changes(&g, lo, hi, 20_000)
        .into_iter()
        .filter_map(|(a, b)| bisect(&g, a, b, BISECT_TOL).ok())
        .collect()
}

fn check_table<F: Fn(f64) -> f64>(name: &str, tag: &str, g: F, table: &SignTable, out: &mut Vec<String>) {
    for e in &table.entries {
        for x in midpoints(e.lo, e.hi) {
            let s = Sign::of(g(x));
            if s != e.sign {
                out.push(format!("{name} {tag}: sign {} at {x}, table says {}", s.symbol(), e.sign.symbol()));
                return;
            }
        }
    }
}

fn cell_tag(k: f64, a: f64) -> String {
    format!("kappa={k} a={a}")
}

/// Audits one `(kappa, a)` cell with `kappa > 0` finite. Failures are appended to `out`.
pub fn audit_cell(k: f64, a: f64, out: &mut Vec<String>) -> Result<()> {
    let p = Params::finite(k, a / k)?;
    let tag = cell_tag(k, a);
    let hi = p.theta_upper();
    let top = hi * (1.0 - 1e-9);
    let b = |t: f64| b_theta(&p, t).unwrap_or(f64::NAN);
    let bp = |t: f64| b_prime(&p, t).unwrap_or(f64::NAN);

    if p.kappa.is_one() {
        for t in midpoints(0.0, top) {
            let exact = 2.0 * (1.0 - a) * t.cos();
            if (b(t) - exact).abs() > 1e-12 * exact.abs().max(1.0) {
                out.push(format!("b {tag}: {} differs from 2(1-a)cos at {t}", b(t)));
                break;
            }
        }
    } else {
        // b: zero count, placement, signs
        let row = b_sign_row(&p)?;
        let zeros = scan_zeros(b, 0.0, top);
        if zeros.len() + 1 != row.pattern.len() {
            out.push(format!("b {tag}: {} zeros, row {} expects {}", zeros.len(), row.row, row.pattern.len() - 1));
        } else {
            if !placement_holds(row.placement, &zeros) {
                out.push(format!("b {tag}: zeros {zeros:?} violate the placement of row {}", row.row));
            }
            let table = SignTable::from_pattern(0.0, hi, &row.pattern, &zeros);
            check_table("b", &tag, b, &table, out);
        }
        // H_kappa and F_kappa
        let h_hi = i1_upper(k);
        let h_table = h_alpha_sign_profile(k)?;
        check_table("H", &tag, |x| h_alpha(k, x), &h_table, out);
        for x in midpoints(0.0, h_hi) {
            let h = 1e-6 * h_hi;
            if x - h <= 0.0 || x + h >= h_hi {
                continue;
            }
            let fd = (h_alpha(k, x + h) - h_alpha(k, x - h)) / (2.0 * h);
            let d = h_alpha_prime(k, x);
            if (d - fd).abs() > FD_TOL * d.abs().max(1.0) {
                out.push(format!("H' {tag}: {d} vs difference {fd} at {x}"));
                break;
            }
        }
        let ft = f_kappa_table(k)?;
        let fk_hi = hi;
        let mut cuts = vec![0.0];
        if FRAC_PI_2 < fk_hi {
            cuts.push(FRAC_PI_2);
        }
        if let Some(xs) = ft.x_star {
            cuts.push(xs);
        }
        cuts.push(fk_hi);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let expect = match (ft.case, ft.x_star) {
                (FTableCase::A, _) => Sign::Positive,
                (FTableCase::B, Some(xs)) => {
                    if mid < xs {
                        Sign::Positive
                    } else {
                        Sign::Negative
                    }
                }
                (FTableCase::C, Some(xs)) => {
                    if mid < xs {
                        Sign::Negative
                    } else {
                        Sign::Positive
                    }
                }
                _ => Sign::Negative,
            };
            let span = w[1] - w[0];
            for x in midpoints(w[0] + 1e-6 * span, w[1] - 1e-6 * span) {
                let s = Sign::of(f_kappa_prime(k, x));
                if s != expect {
                    out.push(format!("F' {tag}: sign {} at {x}, table says {}", s.symbol(), expect.symbol()));
                    break;
                }
            }
        }
        if let Some(fs) = ft.f_at_x_star {
            let ok = match ft.case {
                FTableCase::B => fs < 1.0,
                FTableCase::C => fs > 1.0,
                _ => true,
            };
            if !ok {
                out.push(format!("F {tag}: F(x_*) = {fs} on the wrong side of 1"));
            }
            if (f_kappa(k, ft.x_star.unwrap()) - fs).abs() > 1e-12 {
                out.push(format!("F {tag}: stored F(x_*) inconsistent"));
            }
        }
    }

    // b' signs and its agreement with finite differences of b
    let bp_table = b_prime_sign_profile(&p)?;
    let bp_zeros = scan_zeros(bp, 1e-6 * hi, top);
    let expected_zeros = bp_table.entries.len() - 1;
    let degenerate = bp_table.entries.iter().all(|e| e.sign == Sign::Zero);
    if !degenerate && bp_zeros.len() != expected_zeros {
        out.push(format!("b' {tag}: {} zeros, table has {expected_zeros} (G = {})", bp_zeros.len(), g_kappa(k)));
    }
    if !degenerate {
        check_table("b'", &tag, bp, &bp_table, out);
    }
    let h = 1e-6 * hi;
    for t in midpoints(0.0, top) {
        if t - h <= 0.0 || t + h >= hi {
            continue;
        }
        let fd = (b(t + h) - b(t - h)) / (2.0 * h);
        let d = bp(t);
        if (d - fd).abs() > FD_TOL * d.abs().max(1.0) {
            out.push(format!("b' {tag}: {d} vs difference {fd} at {t}"));
            break;
        }
    }

    // D is monotone between consecutive zeros of b and b', with the sign of b b'
    let mut cuts = vec![0.0, top];
    cuts.extend(scan_zeros(b, 0.0, top));
    if !degenerate {
        cuts.extend(bp_zeros);
    }
    cuts.sort_by(f64::total_cmp);
    let dd = |t: f64| d_theta(&p, t).unwrap_or(f64::NAN);
    'outer: for w in cuts.windows(2) {
        let span = w[1] - w[0];
        if span <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let expect = Sign::of(b(mid) * bp(mid));
        let pts: Vec<f64> = midpoints(w[0] + 1e-6 * span, w[1] - 1e-6 * span).collect();
        for q in pts.windows(2) {
            let (d0, d1) = (dd(q[0]), dd(q[1]));
            let slack = 1e-12 * d0.abs().max(d1.abs()).max(1.0);
            let ok = match expect {
                Sign::Positive => d1 >= d0 - slack,
                Sign::Negative => d1 <= d0 + slack,
                Sign::Zero => (d1 - d0).abs() <= slack,
            };
            if !ok {
                out.push(format!("D {tag}: not {} between {} and {}", expect.symbol(), q[0], q[1]));
                break 'outer;
            }
        }
    }

    // cut-set ordering for gamma < 0
    if a < 0.0 {
        let (a1, a2) = q_roots(&p);
        let f1 = f_real(&p, a1.re)?;
        let f2 = f_real(&p, a2.re)?;
        if !(f2 < f1 && f1 < 0.0) {
            out.push(format!("cut {tag}: f(alpha2) = {f2}, f(alpha1) = {f1}"));
        }
    }
    Ok(())
}

/// Cell grid covering every row of the sign tables of `b`, `b'`, `H` and `F`.
pub fn default_cells() -> Vec<(f64, f64)> {
    let kappas = [0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0];
    let mut cells = Vec::new();
    for &k in &kappas {
        let mut thresholds: Vec<f64> = vec![0.5, 0.5 + 0.5 / k, g_kappa(k), 0.0, 1.0];
        if let Ok(t) = f_kappa_table(k) {
            if let Some(fs) = t.f_at_x_star {
                thresholds.push(0.5 * (fs + 1.0));
            }
        }
        thresholds.sort_by(f64::total_cmp);
        let mut avals: Vec<f64> = (0..=20).map(|i| -1.5 + 0.25 * i as f64).collect();
        for w in thresholds.windows(2) {
            avals.push(0.5 * (w[0] + w[1]));
        }
        avals.push(thresholds[0] - 0.1);
        avals.push(thresholds[thresholds.len() - 1] + 0.1);
        avals.retain(|a| thresholds.iter().all(|t| (a - t).abs() > 1e-3));
        avals.sort_by(f64::total_cmp);
        avals.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        cells.extend(avals.into_iter().map(|a| (k, a)));
    }
    cells
}

/// Audits all cells, returning one message per failure.
pub fn lemma_audit(cells: &[(f64, f64)]) -> Vec<String> {
    use rayon::prelude::*;
    let per: Vec<Vec<String>> = cells
        .par_iter()
        .map(|&(k, a)| {
            let mut out = Vec::new();
            if let Err(e) = audit_cell(k, a, &mut out) {
                out.push(format!("{}: {e}", cell_tag(k, a)));
            }
            out
        })
        .collect();
    per.into_iter().flatten().collect()
}

/// `f(alpha_2) < f(alpha_1) < 0` for `gamma < 0`, any kappa.
pub fn cut_order_holds(params: &Params) -> Result<bool> {
    let (a1, a2) = q_roots(params);
    let (f1, f2) = (f_real(params, a1.re)?, f_real(params, a2.re)?);
    Ok(f2 < f1 && f1 < 0.0)
}
