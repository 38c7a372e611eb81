//! Coarse-grained systems: `p` independent colony copies, each holding all
//! of its ants, plus a collector or a sharing coordinator.

use std::sync::Arc;

use crate::algebra::{name, DataValue, Process, State, VarSet};
use crate::scalar::Scalar;

use super::fine::{ant_state, move_choice, send, seq, trail_state};
use super::ops::{self, Ctx, SharedCtx, TourSource};
use super::params::{AcoParams, Algorithm};
use super::system::{LeafRole, Parts};
use super::vars::Vars;

fn sols(s: usize) -> String {
    format!("sols[{s}]")
}

fn channel(s: usize) -> String {
    format!("channel[{s}]")
}

/// `⊕ move^1; …; ⊕ move^m; [localUpd_1; …; localUpd_m;] then`.
fn round<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, then: Process<F>) -> Process<F> {
    let m = ctx.params.m;
    let acs = algorithm == Algorithm::Acs;
    let mut p = if acs {
        let ups: Vec<_> = (1..=m).map(|k| ops::local_upd(ctx, k)).collect();
        seq(&ups, then)
    } else {
        then
    };
    for k in (1..=m).rev() {
        p = move_choice(ctx, k, acs, p);
    }
    p
}

fn copy_state<F: Scalar>(ctx: &SharedCtx<F>) -> State<F> {
    let v = &ctx.vars;
    let mut s = State::new();
    s.set_named(&v.num_it, F::zero());
    trail_state(v, ctx.params.tau0, &mut s);
    for k in 1..=v.m {
        ant_state(ctx, v, k, &mut s);
    }
    s
}

/// Copy `s` of the independent-runs system.
fn copy<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, s: usize, solution: &Arc<VarSet>) -> Process<F> {
    let end = ops::end_iterations(ctx);
    let c_c = seq(
        &[ops::trail_update(ctx, "trailUpd", algorithm, TourSource::Ants), ops::new_it(ctx)],
        Process::sum(vec![
            Process::guard(
                end.clone(),
                Process::transform(&ops::sel_best(ctx, s), send(ctx, &sols(s), solution, Process::stop())),
            ),
            Process::guard(end.negate(), Process::transform(&ops::reset_all(ctx), Process::var("X"))),
        ]),
    );
    let after = Process::sum(vec![
        Process::guard(ops::complete(ctx), c_c),
        Process::guard(ops::complete(ctx).negate(), Process::var("X")),
    ]);
    Process::rec("X", round(ctx, algorithm, after))
}

fn collector<F: Scalar>(ctx: &SharedCtx<F>, copies: &[Arc<Vars>]) -> Process<F> {
    let p = copies.len();
    let mut gs: Vec<Process<F>> = copies
        .iter()
        .enumerate()
        .map(|(i, v)| {
            Process::receive(
                &sols(i + 1),
                Process::transform(&ops::add_sol(ctx, i + 1, v.solution.clone()), Process::var("X")),
            )
        })
        .collect();
    gs.push(Process::guard(
        ops::length_is(ctx, "allSolutions", name("solutions"), p),
        Process::transform(&ops::calculate_best(ctx), Process::stop()),
    ));
    Process::rec("X", Process::sum(gs))
}

fn copy_ctx<F: Scalar>(ctx: &SharedCtx<F>, params: &AcoParams<F>, s: usize) -> SharedCtx<F> {
    Arc::new(Ctx {
        inst: ctx.inst.clone(),
        params: params.clone(),
        vars: Vars::new(ctx.inst.n(), ctx.params.m, &format!("@{s}")),
    })
}

/// Independent runs: copies `1..=p` then the collector `B`.
pub(crate) fn build_independent<F: Scalar>(
    ctx: &SharedCtx<F>,
    copies: &[AcoParams<F>],
    algorithm: Algorithm,
) -> (Parts<F>, Vec<Arc<Vars>>) {
    let p = copies.len();
    let ctxs: Vec<_> = copies.iter().enumerate().map(|(i, c)| copy_ctx(ctx, c, i + 1)).collect();
    let mut leaves = Vec::with_capacity(p + 1);
    let mut roles = Vec::with_capacity(p + 1);
    for (i, c) in ctxs.iter().enumerate() {
        let solution = Arc::new(VarSet::from([c.vars.solution.clone()]));
        leaves.push((copy(c, algorithm, i + 1, &solution), copy_state(c)));
        roles.push(LeafRole::Copy(i + 1));
    }
    let vars: Vec<_> = ctxs.iter().map(|c| c.vars.clone()).collect();
    let mut b = State::new();
    b.set("solutions", DataValue::lists(Vec::new()));
    b.set("result", DataValue::empty_list());
    leaves.push((collector(ctx, &vars), b));
    roles.push(LeafRole::Collector);
    (Parts { leaves, roles }, vars)
}

/// Copy `s` of the occasional-sharing system.
fn sharing_copy<F: Scalar>(ctx: &SharedCtx<F>, algorithm: Algorithm, s: usize, report: &Arc<VarSet>) -> Process<F> {
    let ch = channel(s);
    let c_send = seq(
        &[
            ops::trail_update(ctx, &format!("trailUpd[{s}]"), algorithm, TourSource::Ants),
            ops::new_it(ctx),
            ops::reset_all(ctx),
        ],
        Process::sum(vec![
            Process::guard(ops::share_it(ctx), send(ctx, &ch, report, Process::var("X"))),
            Process::guard(ops::share_it(ctx).negate(), Process::var("Y")),
        ]),
    );
    let after = Process::sum(vec![
        Process::guard(ops::complete(ctx), c_send),
        Process::guard(ops::complete(ctx).negate(), Process::var("Y")),
    ]);
    let info = Process::rec("Y", round(ctx, algorithm, after));
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

fn coordinator<F: Scalar>(ctx: &SharedCtx<F>, copies: &[Arc<Vars>], info: &[Arc<VarSet>]) -> Process<F> {
    let p = copies.len();
    let mut notify: Vec<Process<F>> = (1..=p)
        .map(|s| {
            Process::guard(
                ops::notified(ctx, s).negate(),
                send(ctx, &channel(s), &info[s - 1], Process::transform(&ops::notify(ctx, s), Process::var("Y"))),
            )
        })
        .collect();
    notify.push(Process::guard(
        ops::length_is(ctx, "allNotif", ctx.vars.notified.clone(), p),
        Process::stop(),
    ));
    let g_f = Process::rec("Y", Process::sum(notify));
    let end = ops::end_iterations(ctx);
    let g_c = Process::sum(vec![
        Process::guard(end.clone(), Process::transform(&ops::finish(ctx), g_f)),
        Process::guard(
            end.negate(),
            seq(
                &[ops::share_trails(ctx, copies.to_vec()), ops::unblock(ctx)],
                Process::var("X"),
            ),
        ),
    ]);
    let mut gs: Vec<Process<F>> = (1..=p)
        .map(|s| Process::guard(ops::wait(ctx, s).negate(), send(ctx, &channel(s), &info[s - 1], Process::var("X"))))
        .collect();
    for s in 1..=p {
        gs.push(Process::receive(
            &channel(s),
            Process::transform(&ops::block(ctx, s), Process::var("X")),
        ));
    }
    gs.push(Process::guard(
        ops::length_is(ctx, "completeIt", ctx.vars.waiting.clone(), p),
        g_c,
    ));
    Process::rec("X", Process::sum(gs))
}

/// Occasional sharing: copies `1..=p` then the coordinator `G*`.
pub(crate) fn build_occasional<F: Scalar>(
    ctx: &SharedCtx<F>,
    copies: &[AcoParams<F>],
    algorithm: Algorithm,
) -> (Parts<F>, Vec<Arc<Vars>>) {
    let p = copies.len();
    let ctxs: Vec<_> = copies.iter().enumerate().map(|(i, c)| copy_ctx(ctx, c, i + 1)).collect();
    let vars: Vec<_> = ctxs.iter().map(|c| c.vars.clone()).collect();
    let mut leaves = Vec::with_capacity(p + 1);
    let mut roles = Vec::with_capacity(p + 1);
    let mut info = Vec::with_capacity(p);
    for (i, c) in ctxs.iter().enumerate() {
        let v = &c.vars;
        let mut report = v.tau_set();
        report.insert(v.num_it.clone());
        report.insert(v.best_l.clone());
        let mut down = v.tau_set();
        down.insert(v.final_.clone());
        info.push(Arc::new(down));
        let mut state = copy_state(c);
        state.set_named(&v.final_, F::zero());
        leaves.push((sharing_copy(c, algorithm, i + 1, &Arc::new(report)), state));
        roles.push(LeafRole::Copy(i + 1));
    }
    let mut g = State::new();
    g.set_named(&ctx.vars.waiting, DataValue::empty_list());
    g.set_named(&ctx.vars.notified, DataValue::empty_list());
    g.set_named(&ctx.vars.final_, F::zero());
    leaves.push((coordinator(ctx, &vars, &info), g));
    roles.push(LeafRole::Coordinator);
    (Parts { leaves, roles }, vars)
}
