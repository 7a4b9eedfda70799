//! Scalar root and minimum helpers shared by the equilibrium and bifurcation
//! code.

/// Bisect a bracketed sign change until the interval is narrower than `tol`.
/// Requires `f(lo)` and `f(hi)` to have opposite signs (or be zero).
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval below floating-point resolution
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization on [a, b] down to interval width `tol`.
/// Returns (argmin, min value). Assumes a unimodal function on the bracket.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            if c <= a || c >= b {
                break;
            }
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            if d <= a || d >= b {
                break;
            }
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Locate every sign change of `f` on a uniform `n`-point grid over
/// [lo, hi], refine each bracket by bisection to width `refine_tol`, and
/// merge roots closer than `dedup_tol`.
pub(crate) fn scan_roots<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
    refine_tol: f64,
    dedup_tol: f64,
) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..n {
        let x = lo + h * i as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev * fx < 0.0 {
            roots.push(bisect(f, x_prev, x, refine_tol));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup_by(|b, a| (*b - *a).abs() < dedup_tol);
    roots
}

/// Minimize `f` over [lo, hi]: coarse `n`-point grid pass followed by a
/// golden-section refinement of the best bracket. Returns (argmin, min).
pub(crate) fn grid_min<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
    refine_tol: f64,
) -> (f64, f64) {
    let h = (hi - lo) / (n - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let x = lo + h * i as f64;
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = if best_i == 0 { lo } else { lo + h * (best_i - 1) as f64 };
    let b = if best_i == n - 1 { hi } else { lo + h * (best_i + 1) as f64 };
    let (xm, fm) = golden_min(f, a, b, refine_tol);
    if fm < best {
        (xm, fm)
    } else {
        (lo + h * best_i as f64, best)
    }
}
