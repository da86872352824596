//! Derivative-free optimizers: golden-section search in one dimension and a
//! restarting Nelder-Mead simplex for the multi-parameter problems.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc >= fd {
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
    let x = 0.5 * (a + b);
    let fx = f(x);
    // endpoints and interior probes may beat the midpoint on flat tops
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Or when the simplex diameter falls below this.
    pub x_tol: f64,
    pub max_evals: usize,
    /// Rebuild the simplex around the best point after convergence, until a
    /// restart no longer improves the value by more than `f_tol`.
    pub max_restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.3,
            f_tol: 1e-14,
            x_tol: 1e-10,
            max_evals: 40_000,
            max_restarts: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let mut best = x0.to_vec();
    let mut best_f = f(&best);
    let mut evals = 1;
    let mut converged = false;
    let mut step = opts.initial_step;
    for _ in 0..=opts.max_restarts {
        let remaining = opts.max_evals.saturating_sub(evals);
        if remaining == 0 {
            break;
        }
        let run = simplex_run(&f, &best, step, opts, remaining);
        evals += run.evals;
        let improved = best_f - run.f;
        if run.f < best_f {
            best = run.x;
            best_f = run.f;
        }
        converged = run.converged;
        if improved.abs() <= opts.f_tol || !run.converged {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }
    NelderMeadResult {
        x: best,
        f: best_f,
        evals,
        converged,
    }
}

fn simplex_run(
    f: &impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    opts: &NelderMeadOptions,
    budget: usize,
) -> NelderMeadResult {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    let mut order: Vec<usize> = (0..=n).collect();
    while evals < budget {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (lo, hi, second) = (order[0], order[n], order[n - 1]);

        let spread = vals[hi] - vals[lo];
        let diameter = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[lo])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol || diameter <= opts.x_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[hi])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[lo] {
            let xe = along(2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[hi] = xe;
                vals[hi] = fe;
            } else {
                pts[hi] = xr;
                vals[hi] = fr;
            }
        } else if fr < vals[second] {
            pts[hi] = xr;
            vals[hi] = fr;
        } else {
            let (xc, fc) = if fr < vals[hi] {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[hi].min(fr) {
                pts[hi] = xc;
                vals[hi] = fc;
            } else {
                let anchor = pts[lo].clone();
                for &i in &order[1..] {
                    for (p, a) in pts[i].iter_mut().zip(&anchor) {
                        *p = a + 0.5 * (*p - a);
                    }
                    vals[i] = f(&pts[i]);
                }
                evals += n;
            }
        }
    }
    let lo = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("non-empty simplex");
    NelderMeadResult {
        x: pts[lo].clone(),
        f: vals[lo],
        evals,
        converged,
    }
}
