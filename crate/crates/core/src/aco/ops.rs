//! Transformations, conditions and weight functions of the ACO systems.

use std::sync::Arc;

use crate::algebra::{Condition, DataValue, EvalError, Name, State, Transformation, Weights};
use crate::scalar::{as_index, Scalar};
use crate::tsp::TspInstance;

use super::formulas::{
    acs_mixture, as_update, best_index, decode_edge, edge_code, greedy_vertex, local_update,
    mmas_update, share, transition_probabilities, Tour,
};
use super::params::{AcoParams, Algorithm};
use super::vars::Vars;

/// Everything the closures of one graph or copy read.
#[derive(Debug)]
pub struct Ctx<F: Scalar> {
    pub inst: Arc<TspInstance<F>>,
    pub params: AcoParams<F>,
    pub vars: Arc<Vars>,
}

pub type SharedCtx<F> = Arc<Ctx<F>>;

fn indices<F: Scalar>(var: &str, xs: &[F]) -> Result<Vec<usize>, EvalError> {
    xs.iter()
        .map(|&x| {
            as_index(x).ok_or(EvalError::NonIntegralIndex {
                var: var.to_string(),
                value: x.as_f64(),
            })
        })
        .collect()
}

fn floats<F: Scalar>(xs: &[usize]) -> Vec<F> {
    xs.iter().map(|&x| F::of_usize(x)).collect()
}

fn scalar_of<F: Scalar>(s: &State<F>, var: &Name) -> Result<F, EvalError> {
    s.scalar(var)
}

fn count_is<F: Scalar>(s: &State<F>, var: &Name, expected: usize) -> Result<bool, EvalError> {
    Ok(s.scalar(var)?.as_f64() == expected as f64)
}

/// The trail matrix held in `s`, row-major with a zero diagonal.
pub fn read_trails<F: Scalar>(s: &State<F>, vars: &Vars) -> Result<Vec<F>, EvalError> {
    let mut tau = vec![F::zero(); vars.n * vars.n];
    for (e, name) in vars.tau_entries() {
        tau[e] = s.scalar(name)?;
    }
    Ok(tau)
}

pub fn write_trails<F: Scalar>(s: &mut State<F>, vars: &Vars, tau: &[F]) {
    for (e, name) in vars.tau_entries() {
        s.set_named(name, tau[e]);
    }
}

fn tau_reader<'a, F: Scalar>(s: &'a State<F>, vars: &'a Vars) -> impl Fn(usize, usize) -> Result<F, EvalError> + 'a {
    move |i, j| s.scalar(vars.tau(i, j))
}

/// Position of the pair `(i, j)`, `i ≠ j`, in the ordering `i` ascending
/// then `j` ascending.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    (i - 1) * (n - 1) + if j < i { j - 1 } else { j - 2 }
}

/// All pairs `(i, j)`, `i ≠ j`, in [`pair_index`] order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1));
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                out.push((i, j));
            }
        }
    }
    out
}

/// Weights of ant `k` over every pair: the random proportional rule (or the
/// pseudo-random proportional rule for ACS) on pairs leaving the ant's last
/// vertex, zero elsewhere.
pub fn ant_weights<F: Scalar>(ctx: &SharedCtx<F>, k: usize, acs: bool) -> Weights<F> {
    let c = Arc::clone(ctx);
    let n = ctx.inst.n();
    let label = format!("p[{k}]{}", ctx.vars.suffix);
    Weights::new(&label, n * (n - 1), move |s: &State<F>| {
        let v = &c.vars;
        let path = s.index_list(v.path(k))?;
        let tau = tau_reader(s, v);
        let mut probs = transition_probabilities(&c.inst, c.params.alpha, c.params.beta, &path, &tau, k)?;
        if acs {
            let g = greedy_vertex(&c.inst, c.params.beta, &path, &tau, k)?;
            probs = acs_mixture(&probs, g, c.params.q0);
        }
        let i = *path.last().expect("checked by the probability rule");
        let mut w = vec![F::zero(); n * (n - 1)];
        for (j, p) in probs {
            w[pair_index(n, i, j)] = p;
        }
        Ok(w)
    })
}

/// `move^k_{i,j}`: appends `j` to the path and `e_ij` to the edges, adds
/// `d_ij` to the length. With closed tours the last move also adds the edge
/// back to the first vertex.
pub fn move_to<F: Scalar>(ctx: &SharedCtx<F>, k: usize, i: usize, j: usize) -> Transformation<F> {
    let c = Arc::clone(ctx);
    let label = format!("move[{k}]({i},{j})");
    let descriptor = format!("{label}{}", ctx.vars.suffix);
    Transformation::described(&label, &descriptor, move |s: &State<F>| {
        let v = &c.vars;
        let n = c.inst.n();
        let mut path = s.list(v.path(k))?.to_vec();
        let mut edges = s.list(v.edges(k))?.to_vec();
        let mut length = s.scalar(v.length(k))?;
        path.push(F::of_usize(j));
        edges.push(F::of_usize(edge_code(n, i, j)));
        length = length + c.inst.d(i, j);
        if c.params.closed_tour && path.len() == n {
            let first = as_index(path[0]).unwrap_or(0);
            if (1..=n).contains(&first) {
                edges.push(F::of_usize(edge_code(n, j, first)));
                length = length + c.inst.d(j, first);
            }
        }
        let mut out = s.clone();
        out.set_named(v.path(k), DataValue::list(path));
        out.set_named(v.edges(k), DataValue::list(edges));
        out.set_named(v.length(k), length);
        Ok(out)
    })
}

fn transform<F: Scalar>(
    ctx: &SharedCtx<F>,
    label: &str,
    f: impl Fn(&Ctx<F>, &State<F>) -> Result<State<F>, EvalError> + Send + Sync + 'static,
) -> Transformation<F> {
    let c = Arc::clone(ctx);
    let descriptor = format!("{label}{}", ctx.vars.suffix);
    Transformation::described(label, &descriptor, move |s: &State<F>| f(&c, s))
}

fn condition<F: Scalar>(
    ctx: &SharedCtx<F>,
    label: &str,
    f: impl Fn(&Ctx<F>, &State<F>) -> Result<bool, EvalError> + Send + Sync + 'static,
) -> Condition<F> {
    let c = Arc::clone(ctx);
    Condition::new(&format!("{label}{}", ctx.vars.suffix), move |s: &State<F>| f(&c, s))
}

pub fn new_it<F: Scalar>(ctx: &SharedCtx<F>) -> Transformation<F> {
    transform(ctx, "newIt", |c, s| {
        let v = scalar_of(s, &c.vars.num_it)?;
        Ok(s.apply_single(&c.vars.num_it, v + F::one()))
    })
}

/// Where a trail update finds the tours of the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TourSource {
    /// `path[k]`, `edges[k]`, `L[k]` for every ant.
    Ants,
    /// The accumulated `paths`, `edges`, `costs` lists.
    Accumulated,
}

fn collect_tours<F: Scalar>(
    c: &Ctx<F>,
    s: &State<F>,
    source: TourSource,
) -> Result<(Vec<Vec<F>>, Vec<Vec<usize>>, Vec<F>), EvalError> {
    let v = &c.vars;
    match source {
        TourSource::Ants => {
            let mut paths = Vec::with_capacity(v.m);
            let mut edges = Vec::with_capacity(v.m);
            let mut lengths = Vec::with_capacity(v.m);
            for k in 1..=v.m {
                paths.push(s.list(v.path(k))?.to_vec());
                edges.push(s.index_list(v.edges(k))?);
                lengths.push(s.scalar(v.length(k))?);
            }
            Ok((paths, edges, lengths))
        }
        TourSource::Accumulated => Ok((
            s.lists(&v.paths)?.to_vec(),
            s.lists(&v.all_edges)?
                .iter()
                .map(|e| indices(&v.all_edges, e))
                .collect::<Result<_, _>>()?,
            s.list(&v.costs)?.to_vec(),
        )),
    }
}

/// `trailUpd` with the update rule of `algorithm`. Also records the best
/// tour seen so far in `bestL`, `bestPath`, `bestEdges`.
pub fn trail_update<F: Scalar>(
    ctx: &SharedCtx<F>,
    label: &str,
    algorithm: Algorithm,
    source: TourSource,
) -> Transformation<F> {
    transform(ctx, label, move |c, s| {
        let v = &c.vars;
        let p = &c.params;
        let (paths, edges, lengths) = collect_tours(c, s, source)?;
        let mut tau = read_trails(s, v)?;
        let iteration_best = best_index(lengths.iter().copied());
        let previous = match s.get(&v.best_l) {
            Some(DataValue::Scalar(l)) => Some(*l),
            _ => None,
        };
        let improved = match (iteration_best, previous) {
            (Some(b), Some(prev)) => lengths[b] < prev,
            (Some(_), None) => true,
            (None, _) => false,
        };
        let (global_edges, global_l) = if improved {
            let b = iteration_best.expect("improved implies a tour");
            (edges[b].clone(), lengths[b])
        } else {
            (
                s.index_list(&v.best_edges).unwrap_or_default(),
                previous.unwrap_or(F::zero()),
            )
        };
        match algorithm {
            Algorithm::As => {
                let tours: Vec<Tour<'_, F>> = edges
                    .iter()
                    .zip(&lengths)
                    .map(|(e, &l)| Tour { edges: e, length: l })
                    .collect();
                as_update(&mut tau, p.rho, p.q, &tours)?;
            }
            Algorithm::Mmas => {
                let best = iteration_best.map(|b| Tour {
                    edges: &edges[b],
                    length: lengths[b],
                });
                mmas_update(&mut tau, p.rho, best, p.tau_min, p.tau_max)?;
            }
            Algorithm::Acs => {
                let best = if p.acs_global_best {
                    Some(Tour {
                        edges: &global_edges,
                        length: global_l,
                    })
                } else {
                    iteration_best.map(|b| Tour {
                        edges: &edges[b],
                        length: lengths[b],
                    })
                };
                mmas_update(&mut tau, p.rho, best, p.tau_min, p.tau_max)?;
            }
        }
        let mut out = s.clone();
        write_trails(&mut out, v, &tau);
        if improved {
            let b = iteration_best.expect("improved implies a tour");
            out.set_named(&v.best_l, lengths[b]);
            out.set_named(&v.best_path, DataValue::list(paths[b].clone()));
            out.set_named(&v.best_edges, DataValue::list(floats(&edges[b])));
        }
        Ok(out)
    })
}

fn reset_ant<F: Scalar>(v: &Vars, s: &State<F>, out: &mut State<F>, k: usize) -> Result<(), EvalError> {
    let path = s.list(v.path(k))?;
    let last = *path.last().ok_or_else(|| EvalError::EmptyList {
        var: v.path(k).to_string(),
    })?;
    out.set_named(v.path(k), DataValue::list(vec![last]));
    out.set_named(v.edges(k), DataValue::empty_list());
    out.set_named(v.length(k), F::zero());
    Ok(())
}

/// `reset`: every ant restarts from the last vertex it reached.
pub fn reset_all<F: Scalar>(ctx: &SharedCtx<F>) -> Transformation<F> {
    transform(ctx, "reset", |c, s| {
        let mut out = s.clone();
        for k in 1..=c.vars.m {
            reset_ant(&c.vars, s, &mut out, k)?;
        }
        Ok(out)
    })
}

/// `reset_k`.
pub fn reset_one<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("reset[{k}]"), move |c, s| {
        let mut out = s.clone();
        reset_ant(&c.vars, s, &mut out, k)?;
        Ok(out)
    })
}

fn list_push<F: Scalar>(s: &State<F>, var: &Name, x: F) -> Result<State<F>, EvalError> {
    let mut xs = s.list(var)?.to_vec();
    xs.push(x);
    Ok(s.apply_single(var, DataValue::list(xs)))
}

fn list_contains<F: Scalar>(s: &State<F>, var: &Name, x: usize) -> Result<bool, EvalError> {
    Ok(s.list(var)?.iter().any(|&y| y.as_f64() == x as f64))
}

fn list_len<F: Scalar>(s: &State<F>, var: &Name) -> Result<usize, EvalError> {
    Ok(match s.get(var) {
        Some(DataValue::Lists(xs)) => xs.len(),
        _ => s.list(var)?.len(),
    })
}

pub fn unblock<F: Scalar>(ctx: &SharedCtx<F>) -> Transformation<F> {
    transform(ctx, "unblock", |c, s| Ok(s.apply_single(&c.vars.waiting, DataValue::empty_list())))
}

pub fn block<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("block[{k}]"), move |c, s| list_push(s, &c.vars.waiting, F::of_usize(k)))
}

pub fn finish<F: Scalar>(ctx: &SharedCtx<F>) -> Transformation<F> {
    transform(ctx, "finish", |c, s| Ok(s.apply_single(&c.vars.final_, F::one())))
}

pub fn notify<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("notify[{k}]"), move |c, s| list_push(s, &c.vars.notified, F::of_usize(k)))
}

/// `localUpd_k`: decays the trail of the last edge of ant `k` toward `τ0`.
pub fn local_upd<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("localUpd[{k}]"), move |c, s| {
        let v = &c.vars;
        let edges = s.list(v.edges(k))?;
        let last = *edges.last().ok_or(EvalError::EmptyEdgeList { ant: k })?;
        let code = as_index(last).ok_or(EvalError::NonIntegralIndex {
            var: v.edges(k).to_string(),
            value: last.as_f64(),
        })?;
        if code >= v.n * v.n {
            return Err(EvalError::IndexOutOfRange {
                var: v.edges(k).to_string(),
                index: code,
            });
        }
        let (i, j) = decode_edge(v.n, code);
        let name = v.tau(i, j);
        let t = s.scalar(name)?;
        Ok(s.apply_single(name, local_update(t, c.params.phi(), c.params.tau0)))
    })
}

pub fn info_added<F: Scalar>(ctx: &SharedCtx<F>) -> Transformation<F> {
    transform(ctx, "infoAdded", |c, s| {
        let x = s.scalar(&c.vars.info_sent)?;
        Ok(s.apply_single(&c.vars.info_sent, x + F::one()))
    })
}

/// `resetLoop`; `with_search` also empties the search list.
pub fn reset_loop<F: Scalar>(ctx: &SharedCtx<F>, with_search: bool) -> Transformation<F> {
    transform(ctx, "resetLoop", move |c, s| {
        let v = &c.vars;
        let mut out = s.clone();
        out.set_named(&v.paths, DataValue::lists(Vec::new()));
        out.set_named(&v.all_edges, DataValue::lists(Vec::new()));
        out.set_named(&v.costs, DataValue::empty_list());
        out.set_named(&v.info_sent, F::zero());
        if with_search {
            out.set_named(&v.search, DataValue::empty_list());
        }
        Ok(out)
    })
}

/// `addPath_k`: appends ant `k`'s path, edges and length to the iteration
/// accumulators.
pub fn add_path<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("addPath[{k}]"), move |c, s| {
        let v = &c.vars;
        let mut paths = s.lists(&v.paths)?.to_vec();
        let mut edges = s.lists(&v.all_edges)?.to_vec();
        let mut costs = s.list(&v.costs)?.to_vec();
        paths.push(s.list(v.path(k))?.to_vec());
        edges.push(s.list(v.edges(k))?.to_vec());
        costs.push(s.scalar(v.length(k))?);
        let mut out = s.clone();
        out.set_named(&v.paths, DataValue::lists(paths));
        out.set_named(&v.all_edges, DataValue::lists(edges));
        out.set_named(&v.costs, DataValue::list(costs));
        Ok(out)
    })
}

pub fn add_search<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("addSearch[{k}]"), move |c, s| list_push(s, &c.vars.search, F::of_usize(k)))
}

pub fn erase_search<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Transformation<F> {
    transform(ctx, &format!("eraseSearch[{k}]"), move |c, s| {
        let xs: Vec<F> = s
            .list(&c.vars.search)?
            .iter()
            .copied()
            .filter(|x| x.as_f64() != k as f64)
            .collect();
        Ok(s.apply_single(&c.vars.search, DataValue::list(xs)))
    })
}

/// `selBest_s`: `solution_s = [L_k*] ++ path_k*` for the shortest tour.
pub fn sel_best<F: Scalar>(ctx: &SharedCtx<F>, s_index: usize) -> Transformation<F> {
    transform(ctx, &format!("selBest[{s_index}]"), |c, s| {
        let v = &c.vars;
        let lengths = (1..=v.m).map(|k| s.scalar(v.length(k))).collect::<Result<Vec<_>, _>>()?;
        let k = best_index(lengths.iter().copied()).expect("m >= 1") + 1;
        let mut solution = vec![lengths[k - 1]];
        solution.extend_from_slice(s.list(v.path(k))?);
        Ok(s.apply_single(&v.solution, DataValue::list(solution)))
    })
}

/// `addSol_s` of the collector: appends `solution@s` to `solutions`.
pub fn add_sol<F: Scalar>(ctx: &SharedCtx<F>, s_index: usize, solution: Name) -> Transformation<F> {
    let solutions = crate::algebra::name("solutions");
    transform(ctx, &format!("addSol[{s_index}]"), move |_, s| {
        let mut xs = s.lists(&solutions)?.to_vec();
        xs.push(s.list(&solution)?.to_vec());
        Ok(s.apply_single(&solutions, DataValue::lists(xs)))
    })
}

/// `calculateBest`: `result` is the solution with the smallest first entry.
pub fn calculate_best<F: Scalar>(ctx: &SharedCtx<F>) -> Transformation<F> {
    transform(ctx, "calculateBest", |_, s| {
        let xs = s.lists("solutions")?;
        let best = best_index(xs.iter().map(|x| x.first().copied().unwrap_or(F::infinity())))
            .ok_or_else(|| EvalError::EmptyList {
                var: "solutions".into(),
            })?;
        Ok(s.apply_single("result", DataValue::list(xs[best].clone())))
    })
}

/// `trailUpd*`: every copy's trails become `f*` of all copies' trails.
pub fn share_trails<F: Scalar>(ctx: &SharedCtx<F>, copies: Vec<Arc<Vars>>) -> Transformation<F> {
    transform(ctx, "trailUpd*", move |c, s| {
        let matrices = copies
            .iter()
            .map(|v| read_trails(s, v))
            .collect::<Result<Vec<_>, _>>()?;
        let best_ls = copies
            .iter()
            .map(|v| s.scalar(&v.best_l).unwrap_or(F::infinity()))
            .collect::<Vec<_>>();
        let best = best_index(best_ls).unwrap_or(0);
        let mut out = s.clone();
        let mut values = vec![F::zero(); copies.len()];
        for (sc, v) in copies.iter().enumerate() {
            for (e, name) in v.tau_entries() {
                for (t, m) in values.iter_mut().zip(&matrices) {
                    *t = m[e];
                }
                out.set_named(name, share(c.params.sharing, sc, &values, best));
            }
        }
        Ok(out)
    })
}

pub fn end_a<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "endA", |c, s| Ok(s.scalar(&c.vars.final_)? == F::one()))
}

pub fn complete_k<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Condition<F> {
    condition(ctx, &format!("complete[{k}]"), move |c, s| Ok(s.list(c.vars.path(k))?.len() == c.vars.n))
}

/// Coarse `complete`: ant 1 has a full path.
pub fn complete<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "complete", |c, s| Ok(s.list(c.vars.path(1))?.len() == c.vars.n))
}

pub fn wait<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Condition<F> {
    condition(ctx, &format!("wait[{k}]"), move |c, s| list_contains(s, &c.vars.waiting, k))
}

pub fn notified<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Condition<F> {
    condition(ctx, &format!("notified[{k}]"), move |c, s| list_contains(s, &c.vars.notified, k))
}

pub fn searching<F: Scalar>(ctx: &SharedCtx<F>, k: usize) -> Condition<F> {
    condition(ctx, &format!("searching[{k}]"), move |c, s| list_contains(s, &c.vars.search, k))
}

/// `len(var) = count`.
pub fn length_is<F: Scalar>(ctx: &SharedCtx<F>, label: &str, var: Name, count: usize) -> Condition<F> {
    condition(ctx, label, move |_, s| Ok(list_len(s, &var)? == count))
}

/// At least `m` laps handed out this iteration.
pub fn max_info<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "maxInfo", |c, s| Ok(s.scalar(&c.vars.info_sent)?.as_f64() >= c.vars.m as f64))
}

fn all_equal<T: PartialEq>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// `end` of the m-ants graphs: the iteration cap is reached, or every ant
/// is waiting and all paths coincide.
pub fn end_ants<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "end", |c, s| {
        let v = &c.vars;
        if count_is(s, &v.num_it, c.params.max_it)? {
            return Ok(true);
        }
        if list_len(s, &v.waiting)? != v.m {
            return Ok(false);
        }
        let paths = (1..=v.m).map(|k| s.list(v.path(k))).collect::<Result<Vec<_>, _>>()?;
        Ok(all_equal(&paths))
    })
}

/// `end` of the free-ants graphs: the iteration cap is reached, or all `m`
/// accumulated paths coincide.
pub fn end_free<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "end", |c, s| {
        let v = &c.vars;
        if count_is(s, &v.num_it, c.params.max_it)? {
            return Ok(true);
        }
        let paths = s.lists(&v.paths)?;
        Ok(paths.len() == v.m && all_equal(paths))
    })
}

/// `end` of the coarse systems: the iteration cap is reached.
pub fn end_iterations<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "end", |c, s| count_is(s, &c.vars.num_it, c.params.max_it))
}

/// `shareIt`: the iteration cap is reached or the iteration count is a
/// multiple of `u`.
pub fn share_it<F: Scalar>(ctx: &SharedCtx<F>) -> Condition<F> {
    condition(ctx, "shareIt", |c, s| {
        let it = s.index(&c.vars.num_it)?;
        Ok(it == c.params.max_it || it % c.params.u == 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_matches_pairs() {
        for n in 3..7 {
            for (idx, (i, j)) in pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, i, j), idx);
            }
        }
    }
}
