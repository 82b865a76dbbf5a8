//! Bracketing helpers shared by the engines and the closed forms.

/// Bisection on a predicate that holds at `lo` and fails at `hi`
/// (either ordering of `lo`/`hi` is accepted). Stops once the bracket is
/// narrower than `tol` or after `max_iter` halvings and returns the two
/// final bracket ends `(holds, fails)`.
pub fn bisect(
    mut holds: f64,
    mut fails: f64,
    tol: f64,
    max_iter: usize,
    mut pred: impl FnMut(f64) -> bool,
) -> (f64, f64) {
    for _ in 0..max_iter {
        if (fails - holds).abs() <= tol {
            break;
        }
        let mid = 0.5 * (holds + fails);
        if mid == holds || mid == fails {
            break;
        }
        if pred(mid) {
            holds = mid;
        } else {
            fails = mid;
        }
    }
    (holds, fails)
}

/// Bisection for the sign change of `f` between `a` and `b`, returning the
/// midpoint of the final bracket. `f(a)` and `f(b)` must differ in sign
/// (zero counts as positive).
pub fn bisect_sign(a: f64, b: f64, tol: f64, max_iter: usize, f: impl Fn(f64) -> f64) -> f64 {
    let sa = f(a) >= 0.0;
    let (h, g) = bisect(a, b, tol, max_iter, |x| (f(x) >= 0.0) == sa);
    0.5 * (h + g)
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
