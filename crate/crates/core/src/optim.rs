//! Bounded derivative-free minimization.
//!
//! The default backend draws a Latin-hypercube batch of starting points and
//! then refines with Nelder–Mead, keeping every trial point inside the box and
//! restarting from the next-best starting point once a simplex collapses. The
//! proposal sequence never depends on the budget, so a larger budget only
//! extends the evaluation trace.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::rng::stream_rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimError {
    #[error("loss is not finite ({loss}) at {point:?}")]
    NonFiniteLoss { point: Vec<f64>, loss: f64 },
    #[error("invalid bounds for dimension {dim}: [{lower}, {upper}]")]
    InvalidBounds { dim: usize, lower: f64, upper: f64 },
    #[error("n_init must be at least 1 and no larger than n_iter (got n_init={n_init}, n_iter={n_iter})")]
    InvalidBudget { n_init: usize, n_iter: usize },
}

/// A box in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self, OptimError> {
        for (dim, &(lower, upper)) in pairs.iter().enumerate() {
            if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                return Err(OptimError::InvalidBounds { dim, lower, upper });
            }
        }
        Ok(Bounds {
            lower: pairs.iter().map(|p| p.0).collect(),
            upper: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn width(&self, dim: usize) -> f64 {
        self.upper[dim] - self.lower[dim]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptRecord {
    pub best_point: Vec<f64>,
    pub best_loss: f64,
    /// Every distinct point evaluated, in order.
    pub evaluations: Vec<(Vec<f64>, f64)>,
    pub seed: u64,
}

impl OptRecord {
    /// Best loss after each evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.evaluations
            .iter()
            .map(|(_, l)| {
                best = best.min(*l);
                best
            })
            .collect()
    }
}

/// A bounded minimization backend.
pub trait Minimizer {
    fn minimize(
        &self,
        loss: &(dyn Fn(&[f64]) -> f64 + Sync),
        bounds: &Bounds,
        n_init: usize,
        n_iter: usize,
        seed: u64,
    ) -> Result<OptRecord, OptimError>;
}

/// Latin-hypercube starts followed by bounded Nelder–Mead with restarts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhsNelderMead {
    /// Initial simplex edge as a fraction of each dimension's width.
    pub initial_step: f64,
    /// A simplex whose loss spread and relative diameter both fall below this
    /// is considered converged.
    pub tolerance: f64,
}

impl Default for LhsNelderMead {
    fn default() -> Self {
        LhsNelderMead {
            initial_step: 0.1,
            tolerance: 1e-9,
        }
    }
}

/// Minimizes `loss` over `bounds` with the default backend.
pub fn minimize(
    loss: &(dyn Fn(&[f64]) -> f64 + Sync),
    bounds: &Bounds,
    n_init: usize,
    n_iter: usize,
    seed: u64,
) -> Result<OptRecord, OptimError> {
    LhsNelderMead::default().minimize(loss, bounds, n_init, n_iter, seed)
}

/// Latin-hypercube sample of `n` points in `bounds`.
pub fn latin_hypercube<R: Rng + ?Sized>(bounds: &Bounds, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; bounds.dim()]; n];
    for d in 0..bounds.dim() {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (point, s) in points.iter_mut().zip(strata) {
            let u: f64 = rng.random();
            point[d] = bounds.lower[d] + bounds.width(d) * (s as f64 + u) / n as f64;
        }
    }
    points
}

enum Stop {
    Budget,
    Failed(OptimError),
}

type CacheKey = Vec<i64>;

fn cache_key(x: &[f64]) -> CacheKey {
    x.iter().map(|v| (v * 1e9).round() as i64).collect()
}

struct Evaluator<'a> {
    loss: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    budget: usize,
    cache: HashMap<CacheKey, f64>,
    evaluations: Vec<(Vec<f64>, f64)>,
    proposals: usize,
}

impl Evaluator<'_> {
    fn record(&mut self, x: Vec<f64>, value: f64) -> Result<f64, Stop> {
        if !value.is_finite() {
            return Err(Stop::Failed(OptimError::NonFiniteLoss {
                point: x,
                loss: value,
            }));
        }
        self.cache.insert(cache_key(&x), value);
        self.evaluations.push((x, value));
        Ok(value)
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64, Stop> {
        self.proposals += 1;
        // Cache hits are free, but a search stuck on known points must still end.
        if self.proposals > 50 * self.budget.max(1) {
            return Err(Stop::Budget);
        }
        if let Some(&v) = self.cache.get(&cache_key(x)) {
            return Ok(v);
        }
        if self.evaluations.len() >= self.budget {
            return Err(Stop::Budget);
        }
        let value = (self.loss)(x);
        self.record(x.to_vec(), value)
    }

    fn best(&self) -> Option<&(Vec<f64>, f64)> {
        // First occurrence wins ties.
        self.evaluations
            .iter()
            .fold(None, |acc: Option<&(Vec<f64>, f64)>, e| match acc {
                Some(a) if a.1 <= e.1 => Some(a),
                _ => Some(e),
            })
    }
}

impl LhsNelderMead {
    fn nelder_mead(
        &self,
        ev: &mut Evaluator<'_>,
        bounds: &Bounds,
        start: &[f64],
        start_loss: f64,
    ) -> Result<(), Stop> {
        let n = bounds.dim();
        let mut simplex = vec![(start.to_vec(), start_loss)];
        for d in 0..n {
            let mut x = start.to_vec();
            let step = self.initial_step * bounds.width(d);
            x[d] = if x[d] + step <= bounds.upper[d] {
                x[d] + step
            } else {
                x[d] - step
            };
            let f = ev.eval(&x)?;
            simplex.push((x, f));
        }
        let trial = |centroid: &[f64], worst: &[f64], coef: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            bounds.clamp(&mut x);
            x
        };
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| {
                    x.iter()
                        .enumerate()
                        .map(|(d, v)| (v - simplex[0].0[d]).abs() / bounds.width(d))
                })
                .fold(0.0, f64::max);
            if spread.abs() <= self.tolerance && diameter <= self.tolerance.sqrt() {
                return Ok(());
            }
            if diameter <= 1e-12 {
                return Ok(());
            }
            let centroid: Vec<f64> = (0..n)
                .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
                .collect();
            let worst = simplex[n].0.clone();
            let reflected = trial(&centroid, &worst, 1.0);
            let fr = ev.eval(&reflected)?;
            if fr < simplex[0].1 {
                let expanded = trial(&centroid, &worst, 2.0);
                let fe = ev.eval(&expanded)?;
                simplex[n] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < simplex[n].1 {
                let x = trial(&centroid, &worst, 0.5);
                let f = ev.eval(&x)?;
                (x, f)
            } else {
                let x = trial(&centroid, &worst, -0.5);
                let f = ev.eval(&x)?;
                (x, f)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (contracted, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, v)| b + 0.5 * (v - b))
                    .collect();
                let f = ev.eval(&x)?;
                *vertex = (x, f);
            }
        }
    }

    fn search(
        &self,
        ev: &mut Evaluator<'_>,
        bounds: &Bounds,
        starts: &[(Vec<f64>, f64)],
        seed: u64,
    ) -> Result<(), Stop> {
        let mut order: Vec<usize> = (0..starts.len()).collect();
        order.sort_by(|&a, &b| starts[a].1.total_cmp(&starts[b].1));
        let mut restart = 0usize;
        let mut rng = stream_rng(seed, 1);
        loop {
            // First the overall best point, then the remaining starts best
            // first, then random points once those run out.
            let (x, f) = if restart == 0 {
                ev.best().cloned().expect("at least one evaluation")
            } else if restart < order.len() {
                starts[order[restart]].clone()
            } else {
                let x = latin_hypercube(bounds, 1, &mut rng).remove(0);
                let f = ev.eval(&x)?;
                (x, f)
            };
            self.nelder_mead(ev, bounds, &x, f)?;
            restart += 1;
        }
    }
}

impl Minimizer for LhsNelderMead {
    fn minimize(
        &self,
        loss: &(dyn Fn(&[f64]) -> f64 + Sync),
        bounds: &Bounds,
        n_init: usize,
        n_iter: usize,
        seed: u64,
    ) -> Result<OptRecord, OptimError> {
        if n_init == 0 || n_iter < n_init {
            return Err(OptimError::InvalidBudget { n_init, n_iter });
        }
        let mut rng = stream_rng(seed, 0);
        let init = latin_hypercube(bounds, n_init, &mut rng);
        let values: Vec<f64> = init.par_iter().map(|x| loss(x)).collect();

        let mut ev = Evaluator {
            loss,
            budget: n_iter,
            cache: HashMap::new(),
            evaluations: Vec::with_capacity(n_iter),
            proposals: 0,
        };
        let mut starts = Vec::with_capacity(n_init);
        for (x, v) in init.into_iter().zip(values) {
            if ev.cache.contains_key(&cache_key(&x)) {
                continue;
            }
            match ev.record(x.clone(), v) {
                Ok(v) => starts.push((x, v)),
                Err(Stop::Failed(e)) => return Err(e),
                Err(Stop::Budget) => unreachable!("recording never exhausts the budget"),
            }
        }
        match self.search(&mut ev, bounds, &starts, seed) {
            Ok(()) | Err(Stop::Budget) => {}
            Err(Stop::Failed(e)) => return Err(e),
        }
        let (best_point, best_loss) = ev.best().cloned().expect("at least one evaluation");
        Ok(OptRecord {
            best_point,
            best_loss,
            evaluations: ev.evaluations,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quadratic(x: &[f64]) -> f64 {
        (x[0] - 12.0).powi(2) + (x[1] - 5.0).powi(2)
    }

    fn cost_box() -> Bounds {
        Bounds::new(&[(0.0, 40.0), (0.0, 40.0)]).unwrap()
    }

    #[test]
    fn quadratic_minimum_is_found() {
        let rec = minimize(&quadratic, &cost_box(), 40, 200, 1).unwrap();
        assert!(
            (rec.best_point[0] - 12.0).abs() < 0.5,
            "{:?}",
            rec.best_point
        );
        assert!(
            (rec.best_point[1] - 5.0).abs() < 0.5,
            "{:?}",
            rec.best_point
        );
        assert!(rec.evaluations.len() <= 200);
    }

    #[test]
    fn random_search_only() {
        let rec = minimize(&quadratic, &cost_box(), 30, 30, 9).unwrap();
        assert_eq!(rec.evaluations.len(), 30);
        assert!(rec.evaluations.iter().all(|(_, l)| rec.best_loss <= *l));
    }

    #[test]
    fn minimum_on_the_boundary() {
        let f = |x: &[f64]| (x[0] + 3.0).powi(2) + (x[1] - 50.0).powi(2);
        let rec = minimize(&f, &cost_box(), 10, 200, 2).unwrap();
        assert!(
            rec.best_point[0] < 0.05 && rec.best_point[1] > 39.95,
            "{:?}",
            rec.best_point
        );
    }

    #[test]
    fn non_finite_loss() {
        let f = |x: &[f64]| if x[0] > 20.0 { f64::NAN } else { x[0] };
        let err = minimize(&f, &cost_box(), 10, 50, 3).unwrap_err();
        assert!(matches!(err, OptimError::NonFiniteLoss { .. }));
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            Bounds::new(&[(1.0, 1.0)]),
            Err(OptimError::InvalidBounds { dim: 0, .. })
        ));
        assert!(matches!(
            Bounds::new(&[(0.0, 1.0), (2.0, f64::NAN)]),
            Err(OptimError::InvalidBounds { dim: 1, .. })
        ));
        assert_eq!(
            minimize(&quadratic, &cost_box(), 0, 10, 0),
            Err(OptimError::InvalidBudget {
                n_init: 0,
                n_iter: 10
            })
        );
        assert_eq!(
            minimize(&quadratic, &cost_box(), 10, 5, 0),
            Err(OptimError::InvalidBudget {
                n_init: 10,
                n_iter: 5
            })
        );
    }

    #[test]
    fn constant_loss_terminates() {
        let rec = minimize(&|_: &[f64]| 1.0, &cost_box(), 5, 100, 4).unwrap();
        assert_eq!(rec.best_loss, 1.0);
        assert!(rec.evaluations.len() <= 100);
    }

    #[test]
    fn latin_hypercube_strata() {
        let b = Bounds::new(&[(0.0, 1.0), (10.0, 20.0)]).unwrap();
        let pts = latin_hypercube(&b, 8, &mut stream_rng(0, 0));
        for d in 0..2 {
            let mut strata: Vec<usize> = pts
                .iter()
                .map(|p| ((p[d] - b.lower()[d]) / b.width(d) * 8.0).floor() as usize)
                .collect();
            strata.sort();
            assert_eq!(strata, (0..8).collect::<Vec<_>>());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn trace_properties(seed in any::<u64>(), a in 0.0f64..40.0, b in 0.0f64..40.0, n_iter in 10usize..120) {
            let f = move |x: &[f64]| (x[0] - a).abs().powf(1.5) + (x[1] - b).powi(2) + (x[0] * 0.3).sin();
            let bounds = cost_box();
            let rec = minimize(&f, &bounds, 10, n_iter, seed).unwrap();
            prop_assert!(rec.evaluations.iter().all(|(x, _)| bounds.contains(x)));
            let trace = rec.best_so_far();
            prop_assert!(trace.windows(2).all(|w| w[1] <= w[0]));
            prop_assert_eq!(*trace.last().unwrap(), rec.best_loss);

            let longer = minimize(&f, &bounds, 10, 2 * n_iter, seed).unwrap();
            prop_assert!(longer.best_loss <= rec.best_loss);
            prop_assert_eq!(&longer.evaluations[..rec.evaluations.len()], &rec.evaluations[..]);
        }
    }
}
