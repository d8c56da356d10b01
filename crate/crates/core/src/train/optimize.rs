use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Outcome of a bounded derivative-free maximization in two variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OptimizeResult<T> {
    pub point: [T; 2],
    pub value: T,
    pub evaluations: usize,
    /// Best value seen after each evaluation.
    pub history: Vec<T>,
}

/// Nelder–Mead maximization of `f` from `start` with unit initial step.
pub fn local_optimize<T, F>(f: F, start: [T; 2], budget: usize, seed: u64) -> OptimizeResult<T>
where
    T: Scalar,
    F: FnMut([T; 2]) -> T,
{
    local_optimize_scaled(f, start, [T::lit(0.1); 2], budget, seed)
}

/// Nelder–Mead maximization with per-coordinate initial simplex size
/// `step`. The seed fixes the simplex orientation and the directions used
/// when a collapsed simplex is restarted around the incumbent.
pub fn local_optimize_scaled<T, F>(mut f: F, start: [T; 2], step: [T; 2], budget: usize, seed: u64) -> OptimizeResult<T>
where
    T: Scalar,
    F: FnMut([T; 2]) -> T,
{
    let budget = budget.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = Evaluator {
        f: &mut f,
        budget,
        history: Vec::with_capacity(budget),
        best: (start, T::neg_infinity()),
    };
    evals.eval(start);
    let mut scale = T::one();
    'restart: while evals.remaining() > 0 {
        let angle = T::lit(rng.gen::<f64>() * std::f64::consts::TAU);
        let (s, c) = angle.sin_cos();
        let (best_x, best_v) = evals.best;
        let dirs = [[c, s], [-s, c]];
        let mut simplex = vec![(best_x, best_v)];
        for d in dirs {
            let x = [best_x[0] + scale * step[0] * d[0], best_x[1] + scale * step[1] * d[1]];
            match evals.eval(x) {
                Some(v) => simplex.push((x, v)),
                None => break 'restart,
            }
        }
        loop {
            simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
            if converged(&simplex, step) {
                scale *= T::lit(0.5);
                continue 'restart;
            }
            let worst = simplex[2];
            let centroid = [
                (simplex[0].0[0] + simplex[1].0[0]) / T::lit(2.0),
                (simplex[0].0[1] + simplex[1].0[1]) / T::lit(2.0),
            ];
            let toward = |t: T| {
                [
                    centroid[0] + t * (worst.0[0] - centroid[0]),
                    centroid[1] + t * (worst.0[1] - centroid[1]),
                ]
            };
            let xr = toward(-T::one());
            let Some(vr) = evals.eval(xr) else { break 'restart };
            if vr > simplex[0].1 {
                let xe = toward(T::lit(-2.0));
                let Some(ve) = evals.eval(xe) else { break 'restart };
                simplex[2] = if ve > vr { (xe, ve) } else { (xr, vr) };
            } else if vr > simplex[1].1 {
                simplex[2] = (xr, vr);
            } else {
                let (xc, inside) = if vr > worst.1 { (toward(T::lit(-0.5)), false) } else { (toward(T::lit(0.5)), true) };
                let Some(vc) = evals.eval(xc) else { break 'restart };
                if (inside && vc > worst.1) || (!inside && vc >= vr) {
                    simplex[2] = (xc, vc);
                } else {
                    let b = simplex[0].0;
                    for vertex in simplex.iter_mut().skip(1) {
                        let x = [
                            b[0] + T::lit(0.5) * (vertex.0[0] - b[0]),
                            b[1] + T::lit(0.5) * (vertex.0[1] - b[1]),
                        ];
                        let Some(v) = evals.eval(x) else { break 'restart };
                        *vertex = (x, v);
                    }
                }
            }
        }
    }
    let (point, value) = evals.best;
    OptimizeResult {
        point,
        value,
        evaluations: evals.history.len(),
        history: evals.history,
    }
}

fn converged<T: Scalar>(simplex: &[([T; 2], T)], step: [T; 2]) -> bool {
    let tol = T::lit(1e-9);
    let spread = (simplex[0].1 - simplex[2].1).abs();
    let size = simplex[1..].iter().fold(T::zero(), |m, (x, _)| {
        m.max(((x[0] - simplex[0].0[0]) / step[0]).abs())
            .max(((x[1] - simplex[0].0[1]) / step[1]).abs())
    });
    size < tol || (spread <= tol * (T::one() + simplex[0].1.abs()) && size < T::lit(1e-6))
}

struct Evaluator<'f, T, F> {
    f: &'f mut F,
    budget: usize,
    history: Vec<T>,
    best: ([T; 2], T),
}

impl<T: Scalar, F: FnMut([T; 2]) -> T> Evaluator<'_, T, F> {
    fn remaining(&self) -> usize {
        self.budget - self.history.len()
    }

    fn eval(&mut self, x: [T; 2]) -> Option<T> {
        if self.remaining() == 0 {
            return None;
        }
        let raw = (self.f)(x);
        let v = if raw.is_nan() { T::neg_infinity() } else { raw };
        if v > self.best.1 || self.history.is_empty() {
            self.best = (x, v);
        }
        self.history.push(self.best.1);
        Some(v)
    }
}
