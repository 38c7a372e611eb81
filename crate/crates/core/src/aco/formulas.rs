//! Transition probabilities and trail updates on plain matrices. Trail
//! matrices are row-major `n × n` with 0-based storage; vertices are
//! 1-based at the interface.

use crate::algebra::EvalError;
use crate::scalar::Scalar;
use crate::semantics::sample_index;
use crate::tsp::TspInstance;

use super::params::SharingFunction;

/// `[x]_b^a`: `a` above, `b` below, `x` in between.
pub fn clamp<F: Scalar>(x: F, b: F, a: F) -> F {
    if x > a {
        a
    } else if x < b {
        b
    } else {
        x
    }
}

/// Edge code of `e_{i,j}`: `(i - 1) · n + (j - 1)`.
pub fn edge_code(n: usize, i: usize, j: usize) -> usize {
    (i - 1) * n + (j - 1)
}

pub fn decode_edge(n: usize, code: usize) -> (usize, usize) {
    (code / n + 1, code % n + 1)
}

/// Vertices not yet on `path`, ascending.
pub fn allowed(n: usize, path: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; n + 1];
    for &v in path {
        if v <= n {
            seen[v] = true;
        }
    }
    (1..=n).filter(|&j| !seen[j]).collect()
}

/// The random proportional rule from the last vertex of `path`: for every
/// allowed `j`, ascending, `τ_ij^α η_ij^β / Σ_r τ_ir^α η_ir^β`.
pub fn transition_probabilities<F: Scalar>(
    inst: &TspInstance<F>,
    alpha: F,
    beta: F,
    path: &[usize],
    tau: impl Fn(usize, usize) -> Result<F, EvalError>,
    ant: usize,
) -> Result<Vec<(usize, F)>, EvalError> {
    let i = *path.last().ok_or_else(|| EvalError::Invalid(format!("ant {ant} has an empty path")))?;
    let allowed = allowed(inst.n(), path);
    if allowed.is_empty() {
        return Err(EvalError::NoAllowedVertex { ant });
    }
    let mut nums = Vec::with_capacity(allowed.len());
    let mut den = F::zero();
    for &j in &allowed {
        let v = tau(i, j)?.powf(alpha) * inst.eta(i, j).powf(beta);
        den = den + v;
        nums.push(v);
    }
    if !(den > F::zero()) || !den.is_finite() {
        return Err(EvalError::ZeroDenominator { ant });
    }
    Ok(allowed.into_iter().zip(nums).map(|(j, v)| (j, v / den)).collect())
}

/// Allowed vertex maximizing `τ_ij · η_ij^β`, smallest on ties.
pub fn greedy_vertex<F: Scalar>(
    inst: &TspInstance<F>,
    beta: F,
    path: &[usize],
    tau: impl Fn(usize, usize) -> Result<F, EvalError>,
    ant: usize,
) -> Result<usize, EvalError> {
    let i = *path.last().ok_or_else(|| EvalError::Invalid(format!("ant {ant} has an empty path")))?;
    let mut best: Option<(usize, F)> = None;
    for j in allowed(inst.n(), path) {
        let v = tau(i, j)? * inst.eta(i, j).powf(beta);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((j, v));
        }
    }
    best.map(|(j, _)| j).ok_or(EvalError::NoAllowedVertex { ant })
}

/// The pseudo-random proportional rule as one distribution: the greedy
/// vertex with probability `q0`, the proportional rule otherwise.
pub fn acs_mixture<F: Scalar>(probabilities: &[(usize, F)], greedy: usize, q0: F) -> Vec<(usize, F)> {
    let rest = F::one() - q0;
    probabilities
        .iter()
        .map(|&(j, p)| {
            let g = if j == greedy { q0 } else { F::zero() };
            (j, g + rest * p)
        })
        .collect()
}

/// The pseudo-random proportional rule with an explicit draw `q`: greedy
/// when `q ≤ q0`, otherwise sampled from `probabilities` with the draw `u`.
pub fn acs_choice<F: Scalar>(probabilities: &[(usize, F)], greedy: usize, q0: F, q: f64, u: f64) -> usize {
    if q <= q0.as_f64() {
        greedy
    } else {
        let ws: Vec<F> = probabilities.iter().map(|&(_, p)| p).collect();
        probabilities[sample_index(&ws, u)].0
    }
}

/// One ant's contribution to a trail update: its edge codes and length.
#[derive(Clone, Copy, Debug)]
pub struct Tour<'a, F> {
    pub edges: &'a [usize],
    pub length: F,
}

fn check_length<F: Scalar>(t: &Tour<'_, F>, index: usize) -> Result<(), EvalError> {
    if !t.edges.is_empty() && !(t.length > F::zero()) {
        return Err(EvalError::ZeroLength { path: index });
    }
    Ok(())
}

/// AS update: `τ ← (1 − ρ) τ + Σ_k Δτ^k` with `Δτ^k = Q / L_k` on the edges
/// of tour `k`, summed in tour order.
pub fn as_update<F: Scalar>(tau: &mut [F], rho: F, q: F, tours: &[Tour<'_, F>]) -> Result<(), EvalError> {
    for (k, t) in tours.iter().enumerate() {
        check_length(t, k + 1)?;
    }
    let keep = F::one() - rho;
    for v in tau.iter_mut() {
        *v = keep * *v;
    }
    for t in tours {
        if t.edges.is_empty() {
            continue;
        }
        let d = q / t.length;
        for &e in t.edges {
            tau[e] = tau[e] + d;
        }
    }
    Ok(())
}

/// Index of the shortest tour, smallest on ties.
pub fn best_index<F: Scalar>(lengths: impl IntoIterator<Item = F>) -> Option<usize> {
    let mut best: Option<(usize, F)> = None;
    for (k, l) in lengths.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| l < b) {
            best = Some((k, l));
        }
    }
    best.map(|(k, _)| k)
}

/// MMAS update: `τ ← [(1 − ρ) τ + Δτ^best]_{τmin}^{τmax}` with
/// `Δτ^best = 1 / L_best` on the best tour's edges.
pub fn mmas_update<F: Scalar>(
    tau: &mut [F],
    rho: F,
    best: Option<Tour<'_, F>>,
    tau_min: F,
    tau_max: F,
) -> Result<(), EvalError> {
    if let Some(t) = &best {
        check_length(t, 1)?;
    }
    let keep = F::one() - rho;
    let mut deposit = vec![F::zero(); tau.len()];
    if let Some(t) = best {
        if !t.edges.is_empty() {
            let d = F::one() / t.length;
            for &e in t.edges {
                deposit[e] = d;
            }
        }
    }
    for (v, d) in tau.iter_mut().zip(deposit) {
        *v = clamp(keep * *v + d, tau_min, tau_max);
    }
    Ok(())
}

/// ACS local update of one entry: `(1 − φ) τ + φ τ0`.
pub fn local_update<F: Scalar>(tau: F, phi: F, tau0: F) -> F {
    (F::one() - phi) * tau + phi * tau0
}

/// `f*(s, v_1, ..., v_p)` for one edge; `s` is 0-based, `best` is the
/// 0-based index of the copy with the best solution.
pub fn share<F: Scalar>(f: SharingFunction, s: usize, values: &[F], best: usize) -> F {
    let mean = || {
        let sum = values.iter().fold(F::zero(), |a, &v| a + v);
        sum / F::of_usize(values.len())
    };
    match f {
        SharingFunction::BestCopy => values[best],
        SharingFunction::Average => mean(),
        SharingFunction::Weighted(l) => {
            let l = F::of(l);
            l * values[s] + (F::one() - l) * mean()
        }
    }
}
