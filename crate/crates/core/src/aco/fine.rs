//! Fine-grained systems: one component per ant plus the graph.

use std::sync::Arc;

use crate::algebra::{Action, DataValue, Process, State, VarSet};
use crate::scalar::Scalar;

use super::ops::{self, SharedCtx, TourSource};
use super::params::Algorithm;
use super::system::{LeafRole, Parts};
use super::vars::Vars;

/// `c!` restricted to `vars`, or the whole state with full-state sends.
pub(crate) fn send<F: Scalar>(ctx: &SharedCtx<F>, channel: &str, vars: &Arc<VarSet>, then: Process<F>) -> Process<F> {
    if ctx.params.full_state_sends {
        Process::send(channel, then)
    } else {
        Process::prefix(Action::send_restricted(channel, vars.clone()), then)
    }
}

pub(crate) fn seq<F: Scalar>(steps: &[crate::algebra::Transformation<F>], then: Process<F>) -> Process<F> {
    steps
        .iter()
        .rev()
        .fold(then, |p, t| Process::transform(t, p))
}

/// `⊕_{(i,j)} p_ij · move^k_{i,j}; then` with all branches sharing `then`.
pub(crate) fn move_choice<F: Scalar>(ctx: &SharedCtx<F>, k: usize, acs: bool, then: Process<F>) -> Process<F> {
    let branches = ops::pairs(ctx.inst.n())
        .into_iter()
        .map(|(i, j)| Process::transform(&ops::move_to(ctx, k, i, j), then.clone()))
        .collect();
    Process::prob(ops::ant_weights(ctx, k, acs), branches)
}

fn channel(k: usize) -> String {
    format!("grA[{k}]")
}

pub(crate) fn trail_state<F: Scalar>(vars: &Vars, tau0: F, state: &mut State<F>) {
    for (_, name) in vars.tau_entries() {
        state.set_named(name, tau0);
    }
}

pub(crate) fn ant_state<F: Scalar>(ctx: &SharedCtx<F>, vars: &Vars, k: usize, state: &mut State<F>) {
    let start = ctx.params.start(k, ctx.inst.n());
    state.set_named(vars.path(k), DataValue::list(vec![F::of_usize(start)]));
    state.set_named(vars.edges(k), DataValue::empty_list());
    state.set_named(vars.length(k), F::zero());
}

/// Ant of AS and MMAS: waits for the trails, builds a whole tour, reports.
fn tour_ant<F: Scalar>(ctx: &SharedCtx<F>, k: usize, report: &Arc<VarSet>) -> Process<F> {
    let ch = channel(k);
    let done = Process::sum(vec![
        Process::guard(ops::complete_k(ctx, k), send(ctx, &ch, report, Process::var("X"))),
        Process::guard(ops::complete_k(ctx, k).negate(), Process::var("Y")),
    ]);
    let info = Process::rec("Y", move_choice(ctx, k, false, done));
    Process::rec(
        "X",
        Process::receive(
            &ch,
            Process::sum(vec![
                Process::guard(ops::end_a(ctx), Process::stop()),
                Process::guard(ops::end_a(ctx).negate(), info),
            ]),
        ),
    )
}

/// Ant of ACS: one move per hand-off.
fn step_ant<F: Scalar>(ctx: &SharedCtx<F>, k: usize, report: &Arc<VarSet>) -> Process<F> {
    let ch = channel(k);
    let step = move_choice(ctx, k, true, send(ctx, &ch, report, Process::var("X")));
    Process::rec(
        "X",
        Process::receive(
            &ch,
            Process::sum(vec![
                Process::guard(ops::end_a(ctx), Process::stop()),
                Process::guard(ops::end_a(ctx).negate(), step),
            ]),
        ),
    )
}

/// `G_F`: hands the final state to every ant once, then stops.
fn final_loop<F: Scalar>(ctx: &SharedCtx<F>, info: &[Arc<VarSet>]) -> Process<F> {
    let m = ctx.params.m;
    let mut gs: Vec<Process<F>> = (1..=m)
        .map(|k| {
            Process::guard(
                ops::notified(ctx, k).negate(),
                send(ctx, &channel(k), &info[k - 1], Process::transform(&ops::notify(ctx, k), Process::var("Y"))),
            )
        })
        .collect();
    gs.push(Process::guard(
        ops::length_is(ctx, "allNotif", ctx.vars.notified.clone(), m),
        Process::stop(),
    ));
    Process::rec("Y", Process::sum(gs))
}

fn graph_state<F: Scalar>(ctx: &SharedCtx<F>, free: bool) -> State<F> {
    let v = &ctx.vars;
    let mut s = State::new();
    s.set_named(&v.num_it, F::zero());
    s.set_named(&v.final_, F::zero());
    s.set_named(&v.notified, DataValue::empty_list());
    s.set_named(&v.waiting, DataValue::empty_list());
    trail_state(v, ctx.params.tau0, &mut s);
    for k in 1..=v.m {
        ant_state(ctx, v, k, &mut s);
    }
    if free {
        s.set_named(&v.paths, DataValue::lists(Vec::new()));
        s.set_named(&v.all_edges, DataValue::lists(Vec::new()));
        s.set_named(&v.costs, DataValue::empty_list());
        s.set_named(&v.info_sent, F::zero());
        s.set_named(&v.search, DataValue::empty_list());
    }
    s
}

fn send_vars(ctx: &SharedCtx<impl Scalar>) -> (Vec<Arc<VarSet>>, Vec<Arc<VarSet>>) {
    let v = &ctx.vars;
    let report = (1..=v.m).map(|k| Arc::new(v.ant_set(k))).collect();
    let info = (1..=v.m)
        .map(|k| {
            let mut set = v.tau_set();
            set.insert(v.final_.clone());
            set.extend(v.ant_set(k));
            Arc::new(set)
        })
        .collect();
    (report, info)
}

/// Builds the components of a fine-grained system: ants `1..=m` then the
/// graph.
pub(crate) fn build<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, free: bool) -> Parts<F> {
    let m = ctx.params.m;
    let acs = algorithm == Algorithm::Acs;
    let (report, info) = send_vars(ctx);
    let mut leaves = Vec::with_capacity(m + 1);
    let mut roles = Vec::with_capacity(m + 1);
    for k in 1..=m {
        let p = if acs {
            step_ant(ctx, k, &report[k - 1])
        } else {
            tour_ant(ctx, k, &report[k - 1])
        };
        let mut s = State::new();
        ant_state(ctx, &ctx.vars, k, &mut s);
        leaves.push((p, s));
        roles.push(LeafRole::Ant(k));
    }
    let graph = match (acs, free) {
        (false, false) => graph_tours(ctx, algorithm, &info),
        (false, true) => graph_tours_free(ctx, algorithm, &info),
        (true, false) => graph_steps(ctx, &info),
        (true, true) => graph_steps_free(ctx, &info),
    };
    leaves.push((graph, graph_state(ctx, free)));
    roles.push(LeafRole::Graph);
    Parts { leaves, roles }
}

fn hand_out<F: Scalar>(ctx: &SharedCtx<F>, info: &[Arc<VarSet>]) -> Vec<Process<F>> {
    (1..=ctx.params.m)
        .map(|k| Process::guard(ops::wait(ctx, k).negate(), send(ctx, &channel(k), &info[k - 1], Process::var("X"))))
        .collect()
}

fn completion<F: Scalar>(ctx: &SharedCtx<F>, then: Process<F>) -> Process<F> {
    Process::guard(
        ops::length_is(ctx, "completeIt", ctx.vars.waiting.clone(), ctx.params.m),
        then,
    )
}

fn accumulated_completion<F: Scalar>(ctx: &SharedCtx<F>, then: Process<F>) -> Process<F> {
    Process::guard(
        ops::length_is(ctx, "completeIt", ctx.vars.paths.clone(), ctx.params.m),
        then,
    )
}

fn graph_tours<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, info: &[Arc<VarSet>]) -> Process<F> {
    let end = ops::end_ants(ctx);
    let g_c = seq(
        &[ops::trail_update(ctx, "trailUpd", algorithm, TourSource::Ants), ops::new_it(ctx)],
        Process::sum(vec![
            Process::guard(end.clone(), Process::transform(&ops::finish(ctx), final_loop(ctx, info))),
            Process::guard(
                end.negate(),
                seq(&[ops::unblock(ctx), ops::reset_all(ctx)], Process::var("X")),
            ),
        ]),
    );
    let mut gs = hand_out(ctx, info);
    for k in 1..=ctx.params.m {
        gs.push(Process::receive(
            &channel(k),
            Process::transform(&ops::block(ctx, k), Process::var("X")),
        ));
    }
    gs.push(completion(ctx, g_c));
    Process::rec("X", Process::sum(gs))
}

fn free_completion<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, info: &[Arc<VarSet>], with_search: bool) -> Process<F> {
    let end = ops::end_free(ctx);
    let g_c = seq(
        &[ops::trail_update(ctx, "trailUpd", algorithm, TourSource::Accumulated), ops::new_it(ctx)],
        Process::sum(vec![
            Process::guard(end.clone(), Process::transform(&ops::finish(ctx), final_loop(ctx, info))),
            Process::guard(
                end.negate(),
                Process::transform(&ops::reset_loop(ctx, with_search), Process::var("X")),
            ),
        ]),
    );
    accumulated_completion(ctx, g_c)
}

fn graph_tours_free<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, info: &[Arc<VarSet>]) -> Process<F> {
    let m = ctx.params.m;
    let mut gs: Vec<Process<F>> = (1..=m)
        .map(|k| {
            Process::guard(
                ops::max_info(ctx).negate(),
                send(ctx, &channel(k), &info[k - 1], Process::transform(&ops::info_added(ctx), Process::var("X"))),
            )
        })
        .collect();
    for k in 1..=m {
        gs.push(Process::receive(
            &channel(k),
            seq(&[ops::add_path(ctx, k), ops::reset_one(ctx, k)], Process::var("X")),
        ));
    }
    gs.push(free_completion(ctx, algorithm, info, false));
    Process::rec("X", Process::sum(gs))
}

fn graph_steps<F: Scalar>(ctx: &SharedCtx<F>, info: &[Arc<VarSet>]) -> Process<F> {
    let end = ops::end_ants(ctx);
    let g_c = seq(
        &[
            ops::trail_update(ctx, "trailUpd", Algorithm::Acs, TourSource::Ants),
            ops::new_it(ctx),
            ops::unblock(ctx),
        ],
        Process::sum(vec![
            Process::guard(end.clone(), Process::transform(&ops::finish(ctx), final_loop(ctx, info))),
            Process::guard(end.negate(), Process::transform(&ops::reset_all(ctx), Process::var("X"))),
        ]),
    );
    let mut gs = hand_out(ctx, info);
    for k in 1..=ctx.params.m {
        let after = Process::sum(vec![
            Process::guard(
                ops::complete_k(ctx, k),
                Process::transform(&ops::block(ctx, k), Process::var("X")),
            ),
            Process::guard(ops::complete_k(ctx, k).negate(), Process::var("X")),
        ]);
        gs.push(Process::receive(
            &channel(k),
            Process::transform(&ops::local_upd(ctx, k), after),
        ));
    }
    gs.push(completion(ctx, g_c));
    Process::rec("X", Process::sum(gs))
}

fn graph_steps_free<F: Scalar>(ctx: &SharedCtx<F>, info: &[Arc<VarSet>]) -> Process<F> {
    let m = ctx.params.m;
    let mut gs = Vec::with_capacity(2 * m + 1);
    for k in 1..=m {
        let ch = channel(k);
        let start = Process::sum(vec![
            Process::guard(ops::max_info(ctx), Process::var("X")),
            Process::guard(
                ops::max_info(ctx).negate(),
                send(
                    ctx,
                    &ch,
                    &info[k - 1],
                    seq(&[ops::add_search(ctx, k), ops::info_added(ctx)], Process::var("X")),
                ),
            ),
        ]);
        gs.push(Process::sum(vec![
            Process::guard(ops::searching(ctx, k), send(ctx, &ch, &info[k - 1], Process::var("X"))),
            Process::guard(ops::searching(ctx, k).negate(), start),
        ]));
    }
    for k in 1..=m {
        let after = Process::sum(vec![
            Process::guard(
                ops::complete_k(ctx, k),
                seq(
                    &[ops::add_path(ctx, k), ops::reset_one(ctx, k), ops::erase_search(ctx, k)],
                    Process::var("X"),
                ),
            ),
            Process::guard(ops::complete_k(ctx, k).negate(), Process::var("X")),
        ]);
        gs.push(Process::receive(
            &channel(k),
            Process::transform(&ops::local_upd(ctx, k), after),
        ));
    }
    gs.push(free_completion(ctx, Algorithm::Acs, info, true));
    Process::rec("X", Process::sum(gs))
}
