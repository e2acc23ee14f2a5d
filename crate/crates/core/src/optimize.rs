//! Derivative-free minimization used by the brute-force oracles.

use std::cell::Cell;

/// Settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop when the spread of simplex values drops below this.
    pub f_tol: f64,
    /// ... and the simplex diameter drops below this.
    pub x_tol: f64,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

/// Nelder–Mead with dimension-adaptive coefficients. `step[i]` sets the
/// initial simplex edge along coordinate `i`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: &[f64], opts: NelderMead) -> Minimum {
    let n = x0.len();
    assert_eq!(step.len(), n);
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let evals = Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    while evals.get() < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&k| simplex[k].clone()).collect();
        values = order.iter().map(|&k| values[k]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let along = |coef: f64, out: &mut Vec<f64>, worst: &[f64]| {
            for i in 0..n {
                out[i] = centroid[i] + coef * (centroid[i] - worst[i]);
            }
        };

        along(alpha, &mut trial, &simplex[n]);
        let fr = eval(&trial);
        if fr < values[0] {
            along(alpha * beta, &mut trial2, &simplex[n]);
            let fe = eval(&trial2);
            if fe < fr {
                simplex[n].copy_from_slice(&trial2);
                values[n] = fe;
            } else {
                simplex[n].copy_from_slice(&trial);
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n].copy_from_slice(&trial);
            values[n] = fr;
            continue;
        }
        let outside = fr < values[n];
        let coef = if outside { alpha * gamma } else { -gamma };
        along(coef, &mut trial2, &simplex[n]);
        let fc = eval(&trial2);
        if (outside && fc <= fr) || (!outside && fc < values[n]) {
            simplex[n].copy_from_slice(&trial2);
            values[n] = fc;
            continue;
        }
        let (head, rest) = simplex.split_at_mut(1);
        for (vertex, value) in rest.iter_mut().zip(values[1..].iter_mut()) {
            for (x, &b) in vertex.iter_mut().zip(head[0].iter()) {
                *x = b + delta * (*x - b);
            }
            *value = eval(vertex);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    Minimum { x: simplex[best].clone(), f: values[best], evals: evals.get() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMead { max_evals: 5000, f_tol: 1e-20, x_tol: 1e-12 };
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], opts);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m);
    }

    #[test]
    fn nonsmooth_bowl() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).abs()).sum::<f64>();
        let opts = NelderMead { max_evals: 20_000, f_tol: 1e-14, x_tol: 1e-12 };
        let m = nelder_mead(f, &[0.0; 7], &[0.2; 7], opts);
        assert!(m.f < 1e-8, "{}", m.f);
    }
}
