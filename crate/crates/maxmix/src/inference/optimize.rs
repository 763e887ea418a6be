//! Derivative-free Nelder–Mead simplex minimizer.
//!
//! Standard reflection/expansion/contraction/shrink coefficients
//! (1, 2, 1/2, 1/2). Convergence is declared when the simplex diameter
//! max_i ‖x_i − x_best‖∞ drops below `tol`. An automatic restart rebuilds
//! the simplex around the incumbent with a tenth of the initial step and
//! re-runs once, which dislodges premature collapses cheaply.

/// Options for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    /// Simplex-diameter tolerance.
    pub tol: f64,
    /// Iteration cap per run.
    pub max_iters: usize,
    /// Initial simplex step added to each coordinate.
    pub initial_step: f64,
    /// Automatic restarts from the incumbent.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { tol: 1e-6, max_iters: 2000, initial_step: 0.1, restarts: 1 }
    }
}

/// Outcome of a minimization.
#[derive(Clone, Debug)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evals: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0`. Non-finite objective values are treated as +∞ so
/// the simplex retreats from bad regions.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> OptimOutcome {
    let mut evals = 0usize;
    let mut iterations = 0usize;
    let mut guarded = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = guarded(&best_x, &mut evals);
    let mut converged = false;
    let mut step = opts.initial_step;

    for _run in 0..=opts.restarts {
        let (x, fx, iters, ev, ok) =
            single_run(&mut guarded, &best_x, best_f, step, opts, &mut evals);
        iterations += iters;
        let _ = ev;
        if fx <= best_f {
            best_x = x;
            best_f = fx;
        }
        converged = ok;
        step /= 10.0;
    }
    OptimOutcome { x: best_x, f: best_f, iterations, evals, converged }
}

fn single_run(
    f: &mut impl FnMut(&[f64], &mut usize) -> f64,
    x0: &[f64],
    f0: f64,
    step: f64,
    opts: &NelderMeadOptions,
    evals: &mut usize,
) -> (Vec<f64>, f64, usize, usize, bool) {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut fvals: Vec<f64> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    fvals.push(f0);
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        fvals.push(f(&v, evals));
        simplex.push(v);
    }

    let mut iters = 0usize;
    let mut converged = false;
    while iters < opts.max_iters {
        iters += 1;
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap());
        let reorder_x: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_f: Vec<f64> = order.iter().map(|&i| fvals[i]).collect();
        simplex = reorder_x;
        fvals = reorder_f;

        let diam = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if diam < opts.tol {
            converged = true;
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; d];
        for v in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let worst = fvals[d];
        let second_worst = fvals[d - 1];
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[d])
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflect = f(&reflect, evals);

        if f_reflect < fvals[0] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[d])
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expand = f(&expand, evals);
            if f_expand < f_reflect {
                simplex[d] = expand;
                fvals[d] = f_expand;
            } else {
                simplex[d] = reflect;
                fvals[d] = f_reflect;
            }
        } else if f_reflect < second_worst {
            simplex[d] = reflect;
            fvals[d] = f_reflect;
        } else {
            let (contract, towards_reflect) = if f_reflect < worst {
                (
                    centroid
                        .iter()
                        .zip(&reflect)
                        .map(|(c, r)| c + 0.5 * (r - c))
                        .collect::<Vec<f64>>(),
                    true,
                )
            } else {
                (
                    centroid
                        .iter()
                        .zip(&simplex[d])
                        .map(|(c, w)| c + 0.5 * (w - c))
                        .collect::<Vec<f64>>(),
                    false,
                )
            };
            let f_contract = f(&contract, evals);
            let accept = if towards_reflect { f_contract <= f_reflect } else { f_contract < worst };
            if accept {
                simplex[d] = contract;
                fvals[d] = f_contract;
            } else {
                // shrink towards the best vertex
                for i in 1..=d {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, v)| b + 0.5 * (v - b))
                        .collect();
                    fvals[i] = f(&shrunk, evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if fvals[i] < fvals[best] {
            best = i;
        }
    }
    (simplex.swap_remove(best), fvals[best], iters, *evals, converged)
}
