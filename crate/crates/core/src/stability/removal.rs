use crate::cost::agent_cost;
use crate::host::Instance;
use crate::network::{Edge, Network};
use crate::scalar::Delta;

/// The incident edge whose removal leaves `u` cheapest, with the exact change
/// in `u`'s cost. Ties go to the smaller edge. `None` when `u` is isolated.
///
/// If removing any set of `u`'s edges improves `u`, then so does removing the
/// single edge returned here.
pub fn best_single_removal(inst: &Instance, g: &Network, u: usize) -> Option<(Edge, Delta)> {
    let before = agent_cost(inst, g, u);
    g.incident(u)
        .into_iter()
        .map(|e| {
            let after = agent_cost(inst, &g.with_changes(&[e], &[]), u);
            (e, after.delta_from(&before))
        })
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
}
