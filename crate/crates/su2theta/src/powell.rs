//! Derivative-free minimization: Powell's conjugate-direction method with a
//! golden-section bracketing step and Brent parabolic-interpolation line
//! search.
//!
//! The optimizer never sees gradients, so it tolerates shot noise; tolerances
//! are therefore split into a `value_tol` (relative decrease per sweep below
//! which the search stops) and a `param_tol` (parameter displacement per
//! sweep). Every objective call is counted and capped by `max_evals`; when
//! the budget runs out the best point seen so far is returned flagged as not
//! converged.

const GOLD: f64 = 1.618_034;
const GLIMIT: f64 = 100.0;
const TINY: f64 = 1e-20;
const BRENT_ITMAX: usize = 100;
const BRACKET_ITMAX: usize = 200;
/// Fractional precision of each line minimum; finer than this is wasted on
/// the quadratic region around a minimum.
const LINE_TOL: f64 = 1e-4;
const ZEPS: f64 = 1e-12;

/// Stopping rules and the evaluation budget.
#[derive(Clone, Copy, Debug)]
pub struct PowellConfig {
    /// Relative function decrease over a full direction sweep below which
    /// the minimizer declares convergence.
    pub value_tol: f64,
    /// Parameter displacement over a full sweep below which the minimizer
    /// declares convergence.
    pub param_tol: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
}

impl Default for PowellConfig {
    fn default() -> Self {
        PowellConfig { value_tol: 1e-8, param_tol: 1e-10, max_evals: 40_000 }
    }
}

/// Outcome of one minimization.
#[derive(Clone, Debug)]
pub struct PowellResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Counts objective calls, remembers the best point, and signals budget
/// exhaustion by returning `None`.
struct Budget<'a, F> {
    f: &'a mut F,
    evals: usize,
    cap: usize,
    best_x: Vec<f64>,
    best_f: f64,
}

impl<F: FnMut(&[f64]) -> f64> Budget<'_, F> {
    fn call(&mut self, x: &[f64]) -> Option<f64> {
        if self.evals >= self.cap {
            return None;
        }
        self.evals += 1;
        let v = (self.f)(x);
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        Some(v)
    }
}

/// Expands (a, b) until three abscissae bracket a minimum of `g`.
/// Returns (ax, bx, cx, fb) with fb ≤ min(g(ax), g(cx)).
fn bracket(g: &mut impl FnMut(f64) -> Option<f64>) -> Option<(f64, f64, f64, f64)> {
    let (mut ax, mut bx) = (0.0f64, 1.0f64);
    let mut fa = g(ax)?;
    let mut fb = g(bx)?;
    if fb > fa {
        std::mem::swap(&mut ax, &mut bx);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut cx = bx + GOLD * (bx - ax);
    let mut fc = g(cx)?;
    let mut iters = 0;
    while fb > fc {
        iters += 1;
        if iters > BRACKET_ITMAX {
            return None;
        }
        // Parabolic extrapolation from a, b, c; u is its turning point.
        let r = (bx - ax) * (fb - fc);
        let q = (bx - cx) * (fb - fa);
        let denom = 2.0 * (q - r).abs().max(TINY) * (q - r).signum_or_positive();
        let mut u = bx - ((bx - cx) * q - (bx - ax) * r) / denom;
        let ulim = bx + GLIMIT * (cx - bx);
        let mut fu;
        if (bx - u) * (u - cx) > 0.0 {
            fu = g(u)?;
            if fu < fc {
                return Some((bx, u, cx, fu));
            } else if fu > fb {
                return Some((ax, bx, u, fb));
            }
            u = cx + GOLD * (cx - bx);
            fu = g(u)?;
        } else if (cx - u) * (u - ulim) > 0.0 {
            fu = g(u)?;
            if fu < fc {
                bx = cx;
                cx = u;
                u = cx + GOLD * (cx - bx);
                fb = fc;
                fc = fu;
                fu = g(u)?;
            }
        } else if (u - ulim) * (ulim - cx) >= 0.0 {
            u = ulim;
            fu = g(u)?;
        } else {
            u = cx + GOLD * (cx - bx);
            fu = g(u)?;
        }
        ax = bx;
        bx = cx;
        cx = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    Some((ax, bx, cx, fb))
}

trait SignumOrPositive {
    fn signum_or_positive(self) -> f64;
}
impl SignumOrPositive for f64 {
    fn signum_or_positive(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Brent's method on a bracketed minimum; returns (t*, g(t*)).
fn brent(
    g: &mut impl FnMut(f64) -> Option<f64>,
    ax: f64,
    bx: f64,
    cx: f64,
    fbx: f64,
) -> Option<(f64, f64)> {
    const CGOLD: f64 = 0.381_966_0;
    let (mut a, mut b) = (ax.min(cx), ax.max(cx));
    let (mut x, mut w, mut v) = (bx, bx, bx);
    let (mut fx, mut fw, mut fv) = (fbx, fbx, fbx);
    let mut d = 0.0f64;
    let mut e = 0.0f64;
    for _ in 0..BRENT_ITMAX {
        let xm = 0.5 * (a + b);
        let tol1 = LINE_TOL * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Some((x, fx));
        }
        let mut take_golden = true;
        if e.abs() > tol1 {
            // Trial parabolic fit through x, v, w.
            let r = (x - w) * (fx - fv);
            let q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            let mut q2 = 2.0 * (q - r);
            if q2 > 0.0 {
                p = -p;
            }
            q2 = q2.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q2 * e_old).abs() && p > q2 * (a - x) && p < q2 * (b - x) {
                d = p / q2;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = g(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, w) = (w, x);
            (fv, fw) = (fw, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Some((x, fx))
}

/// Minimizes `g(t) = f(p + t·u)`; returns the new point and value.
fn line_minimize<F: FnMut(&[f64]) -> f64>(
    budget: &mut Budget<'_, F>,
    p: &[f64],
    u: &[f64],
) -> Option<(Vec<f64>, f64)> {
    let mut g = |t: f64| {
        let xt: Vec<f64> = p.iter().zip(u).map(|(pi, ui)| pi + t * ui).collect();
        budget.call(&xt)
    };
    let (ax, bx, cx, fbx) = bracket(&mut g)?;
    let (t, ft) = brent(&mut g, ax, bx, cx, fbx)?;
    let x: Vec<f64> = p.iter().zip(u).map(|(pi, ui)| pi + t * ui).collect();
    Some((x, ft))
}

/// Powell's method from `x0`. The direction set starts as the coordinate
/// basis; after each sweep the direction of largest decrease may be replaced
/// by the sweep's net displacement (the standard conjugacy heuristic with
/// Powell's quadratic acceptance test).
pub fn powell_minimize<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    cfg: &PowellConfig,
) -> PowellResult {
    let n = x0.len();
    assert!(n >= 1, "objective must have at least one parameter");
    assert!(cfg.max_evals >= 1, "evaluation budget must allow one call");
    let mut budget =
        Budget { f, evals: 0, cap: cfg.max_evals, best_x: x0.to_vec(), best_f: f64::INFINITY };

    let exhausted = |budget: Budget<'_, F>| PowellResult {
        x: budget.best_x,
        value: budget.best_f,
        evals: budget.evals,
        converged: false,
    };

    let mut p = x0.to_vec();
    let mut fp = match budget.call(&p) {
        Some(v) => v,
        None => return exhausted(budget),
    };
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    loop {
        let f_start = fp;
        let p_start = p.clone();
        let mut biggest_drop = 0.0;
        let mut biggest_idx = 0;
        for (i, dir) in dirs.iter().enumerate() {
            let f_before = fp;
            match line_minimize(&mut budget, &p, dir) {
                Some((np, nf)) => {
                    p = np;
                    fp = nf;
                }
                None => return exhausted(budget),
            }
            if f_before - fp > biggest_drop {
                biggest_drop = f_before - fp;
                biggest_idx = i;
            }
        }

        let displacement: f64 =
            p.iter().zip(&p_start).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if 2.0 * (f_start - fp) <= cfg.value_tol * (f_start.abs() + fp.abs()) + 1e-25
            || displacement <= cfg.param_tol
        {
            return PowellResult { x: p, value: fp, evals: budget.evals, converged: true };
        }

        // Powell's test for replacing a direction with the net displacement.
        let ext: Vec<f64> = p.iter().zip(&p_start).map(|(a, b)| 2.0 * a - b).collect();
        let f_ext = match budget.call(&ext) {
            Some(v) => v,
            None => return exhausted(budget),
        };
        if f_ext < f_start {
            let sq = |v: f64| v * v;
            let t = 2.0 * (f_start - 2.0 * fp + f_ext) * sq(f_start - fp - biggest_drop)
                - biggest_drop * sq(f_start - f_ext);
            if t < 0.0 {
                let new_dir: Vec<f64> = p.iter().zip(&p_start).map(|(a, b)| a - b).collect();
                if new_dir.iter().map(|v| v * v).sum::<f64>() > 0.0 {
                    match line_minimize(&mut budget, &p, &new_dir) {
                        Some((np, nf)) => {
                            p = np;
                            fp = nf;
                        }
                        None => return exhausted(budget),
                    }
                    dirs[biggest_idx] = dirs[n - 1].clone();
                    dirs[n - 1] = new_dir;
                }
            }
        }
    }
}
