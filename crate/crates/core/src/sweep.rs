//! Adaptive composite Simpson sweeps used to lay out density profiles.
//!
//! Each piece is parametrised by `τ ∈ [0, 1]`. The caller evaluates a
//! sample at `τ` together with the integrand value `g(τ)`; cells are halved
//! until the Simpson estimates on a cell and on its two halves agree.

use rayon::prelude::*;

use crate::Result;

/// An evaluated node with its Simpson weight in `τ`.
pub(crate) struct SweepNode<S> {
    pub tau: f64,
    pub sample: S,
    pub weight: f64,
}

#[derive(Clone, Copy)]
struct Leaf {
    piece: usize,
    a: f64,
    b: f64,
    ia: usize,
    im: usize,
    ib: usize,
}

/// Sweeps `leaves.len()` pieces, piece `i` starting from `leaves[i]`
/// uniform Simpson cells. Refinement stops once every cell meets
/// `|S₂ - S₁| ≤ 15·tol·width` or the node count would exceed `max_nodes`.
pub(crate) fn adaptive_sweep<S, F>(
    leaves: &[usize],
    tol: f64,
    max_nodes: usize,
    eval: F,
) -> Result<Vec<SweepNode<S>>>
where
    S: Send,
    F: Fn(usize, f64) -> Result<(S, f64)> + Sync,
{
    let mut taus: Vec<(usize, f64)> = Vec::new();
    let mut active: Vec<Leaf> = Vec::new();
    for (piece, &count) in leaves.iter().enumerate() {
        let base = taus.len();
        let m = 2 * count.max(1);
        taus.extend((0..=m).map(|j| (piece, j as f64 / m as f64)));
        active.extend((0..m / 2).map(|k| Leaf {
            piece,
            a: taus[base + 2 * k].1,
            b: taus[base + 2 * k + 2].1,
            ia: base + 2 * k,
            im: base + 2 * k + 1,
            ib: base + 2 * k + 2,
        }));
    }
    let mut values: Vec<(S, f64)> = taus
        .par_iter()
        .map(|&(p, tau)| eval(p, tau))
        .collect::<Result<_>>()?;

    let mut done: Vec<Leaf> = Vec::new();
    while !active.is_empty() {
        if taus.len() + 2 * active.len() > max_nodes {
            done.append(&mut active);
            break;
        }
        let fresh: Vec<(usize, f64)> = active
            .iter()
            .flat_map(|l| {
                let m = 0.5 * (l.a + l.b);
                [(l.piece, 0.5 * (l.a + m)), (l.piece, 0.5 * (m + l.b))]
            })
            .collect();
        let start = taus.len();
        let new_values: Vec<(S, f64)> = fresh
            .par_iter()
            .map(|&(p, tau)| eval(p, tau))
            .collect::<Result<_>>()?;
        taus.extend(fresh);
        values.extend(new_values);

        let mut next = Vec::new();
        for (k, l) in active.iter().enumerate() {
            let (i1, i2) = (start + 2 * k, start + 2 * k + 1);
            let g = |i: usize| values[i].1;
            let h = l.b - l.a;
            let s1 = h / 6.0 * (g(l.ia) + 4.0 * g(l.im) + g(l.ib));
            let s2 = h / 12.0 * (g(l.ia) + 4.0 * g(i1) + 2.0 * g(l.im) + 4.0 * g(i2) + g(l.ib));
            let m = taus[l.im].1;
            let left = Leaf {
                piece: l.piece,
                a: l.a,
                b: m,
                ia: l.ia,
                im: i1,
                ib: l.im,
            };
            let right = Leaf {
                piece: l.piece,
                a: m,
                b: l.b,
                ia: l.im,
                im: i2,
                ib: l.ib,
            };
            let target = if (s2 - s1).abs() <= 15.0 * tol * h || h < 1e-12 {
                &mut done
            } else {
                &mut next
            };
            target.push(left);
            target.push(right);
        }
        active = next;
    }

    let mut weights = vec![0.0; taus.len()];
    for l in &done {
        let h = (l.b - l.a) / 6.0;
        weights[l.ia] += h;
        weights[l.im] += 4.0 * h;
        weights[l.ib] += h;
    }
    Ok(values
        .into_iter()
        .zip(taus)
        .zip(weights)
        .map(|(((sample, _), (_, tau)), weight)| SweepNode {
            tau,
            sample,
            weight,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(leaves: &[usize], f: impl Fn(usize, f64) -> f64 + Sync) -> (f64, usize) {
        let nodes = adaptive_sweep(leaves, 1e-12, 100_000, |p, t| Ok((p, f(p, t)))).unwrap();
        let total = nodes.iter().map(|n| n.weight * f(n.sample, n.tau)).sum();
        (total, nodes.len())
    }

    #[test]
    fn smooth_integrand_stays_coarse() {
        let (v, n) = integrate(&[8], |_, t| t * t * t);
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(n, 33);
    }

    #[test]
    fn refines_near_a_kink() {
        let (v, _) = integrate(
            &[4, 4],
            |p, t| if p == 0 { (t - 0.3).abs() } else { t.sqrt() },
        );
        assert!((v - (0.045 + 0.245 + 2.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn budget_is_respected() {
        let nodes = adaptive_sweep(&[4], 0.0, 40, |_, t| Ok(((), t.sqrt()))).unwrap();
        assert!(nodes.len() <= 40);
        let w: f64 = nodes.iter().map(|n| n.weight).sum();
        assert!((w - 1.0).abs() < 1e-14);
    }
}
