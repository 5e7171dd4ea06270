//! Bounded Nelder-Mead simplex minimizer.
//!
//! Standard coefficients (reflection 1, expansion 2, contraction 0.5,
//! shrink 0.5); box constraints handled by projecting trial points onto the
//! bounds. Converges when the simplex diameter drops below 1e-9 or the
//! objective spread below 1e-12.

use alloc::vec::Vec;

pub const DIAMETER_TOL: f64 = 1e-9;
pub const SPREAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Minimizes `f` from `x0` with per-dimension initial steps, spending at
/// most `max_evals` objective evaluations.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    bounds: &[(f64, f64)],
    max_evals: usize,
) -> NmResult {
    let dim = x0.len();
    assert!(dim >= 1 && steps.len() == dim && bounds.len() == dim);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };

    // vertices[i] = (point, value), kept sorted ascending by value
    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut base = x0.to_vec();
    project(&mut base, bounds);
    let fb = eval(&base, &mut evals);
    vertices.push((base.clone(), fb));
    for i in 0..dim {
        let mut p = base.clone();
        p[i] += steps[i];
        if p[i] > bounds[i].1 {
            p[i] = base[i] - steps[i];
        }
        project(&mut p, bounds);
        let fp = eval(&p, &mut evals);
        vertices.push((p, fp));
    }
    vertices.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut converged = false;
    while evals < max_evals {
        let spread = vertices[dim].1 - vertices[0].1;
        let diameter = vertices[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&vertices[0].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max);
        if spread.abs() < SPREAD_TOL || diameter < DIAMETER_TOL * DIAMETER_TOL {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| vertices[..dim].iter().map(|(p, _)| p[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = vertices[dim].clone();

        let make = |coef: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            project(&mut p, bounds);
            p
        };

        let reflected = make(1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < vertices[0].1 {
            let expanded = make(2.0);
            let fe = eval(&expanded, &mut evals);
            vertices[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < vertices[dim - 1].1 {
            vertices[dim] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 { make(0.5) } else { make(-0.5) };
            let fc = eval(&contracted, &mut evals);
            if fc < worst.1.min(fr) {
                vertices[dim] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = vertices[0].0.clone();
                for v in vertices[1..].iter_mut() {
                    for (x, b) in v.0.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    v.1 = eval(&v.0, &mut evals);
                }
            }
        }
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    }

    let (x, fx) = vertices.swap_remove(0);
    NmResult { x, fx, evals, converged }
}
