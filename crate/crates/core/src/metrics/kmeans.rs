//! Lloyd's k-means over dense vectors with squared Euclidean distance.
//!
//! Initialization is k-means++ (centers drawn with probability proportional to
//! the squared distance to the nearest chosen center). A point only changes
//! cluster on a strict improvement, and a cluster that ends up empty takes the
//! point farthest from its own centroid (among clusters with more than one
//! member). Both rules keep the objective non-increasing.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    /// Cluster index of every input point.
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squared distances after initialization and after
    /// every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

impl KMeansOutcome {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().unwrap_or(&0.0)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn means(points: &[Vec<f64>], assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            s.iter_mut().for_each(|v| *v /= n as f64);
        }
    }
    sums
}

/// Objective of an assignment with centroids at the cluster means.
pub fn objective(points: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let centroids = means(points, assignment, k);
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

fn init_centers(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Vec<usize> {
    let n = points.len();
    let mut centers = vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[centers[0]])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // Every remaining point coincides with a center.
            let free: Vec<usize> = (0..n).filter(|i| !centers.contains(i)).collect();
            free[rng.gen_range(0..free.len())]
        };
        centers.push(next);
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    centers
}

fn repair_empty(points: &[Vec<f64>], assignment: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        assignment.iter().for_each(|&c| counts[c] += 1);
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let donor = (0..points.len())
            .filter(|&i| counts[assignment[i]] > 1)
            .map(|i| (i, sq_dist(&points[i], &centroids[assignment[i]])))
            .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            })
            .map(|(i, _)| i)
            .expect("n >= k guarantees a cluster with two members");
        assignment[donor] = empty;
        centroids[empty] = points[donor].clone();
    }
}

pub fn kmeans(points: &[Vec<f64>], k: usize, max_iters: usize, rng: &mut Rng) -> Result<KMeansOutcome> {
    let n = points.len();
    if k == 0 {
        return Err(Error::input("k-means needs k >= 1"));
    }
    if k > n {
        return Err(Error::input(format!("k-means asked for {k} clusters over {n} points")));
    }

    let mut centroids: Vec<Vec<f64>> = init_centers(points, k, rng)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();
    let mut assignment: Vec<usize> = points
        .iter()
        .map(|p| {
            let mut best = 0;
            for c in 1..k {
                if sq_dist(p, &centroids[c]) < sq_dist(p, &centroids[best]) {
                    best = c;
                }
            }
            best
        })
        .collect();
    repair_empty(points, &mut assignment, &mut centroids);
    let mut trace = vec![objective(points, &assignment, k)];

    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        centroids = means(points, &assignment, k);
        let previous = assignment.clone();
        for (p, slot) in points.iter().zip(assignment.iter_mut()) {
            let mut best = *slot;
            let mut best_d = sq_dist(p, &centroids[best]);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            *slot = best;
        }
        repair_empty(points, &mut assignment, &mut centroids);
        trace.push(objective(points, &assignment, k));
        if assignment == previous {
            break;
        }
    }

    Ok(KMeansOutcome {
        assignment,
        objective_trace: trace,
        iterations,
    })
}
