//! Move enumeration shared by the checkers, generic over the cost oracle.

use crate::kernel::{Adj, CostOracle, CostValue};
use crate::network::{all_pairs, Edge, Network};

use super::{Budget, Concept, Move, Selection};

pub(crate) struct Found<T> {
    pub mv: Move,
    pub gain: T,
}

pub(crate) struct Outcome<T> {
    pub found: Option<Found<T>>,
    /// The whole move space was enumerated.
    pub complete: bool,
    pub evaluated: u64,
    pub frontier: String,
}

struct Selector<T> {
    mode: Selection,
    best: Option<Found<T>>,
}

impl<T: CostValue> Selector<T> {
    fn new(mode: Selection) -> Self {
        Selector { mode, best: None }
    }

    /// Returns true once no later candidate can replace the current one.
    fn offer(&mut self, c: Found<T>) -> bool {
        let replace = match &self.best {
            None => true,
            Some(b) => match self.mode {
                Selection::FirstFound => false,
                Selection::Canonical => c.mv.key() < b.mv.key(),
                Selection::BestResponse => {
                    c.gain > b.gain || (c.gain == b.gain && c.mv.key() < b.mv.key())
                }
            },
        };
        if replace {
            self.best = Some(c);
        }
        self.mode == Selection::FirstFound
    }

    /// Cheap pre-filter: could a move with this coalition size win?
    fn wants_size(&self, size: usize) -> bool {
        match (&self.best, self.mode) {
            (Some(b), Selection::Canonical) => size <= b.mv.coalition.len(),
            _ => true,
        }
    }
}

struct Counter {
    evaluated: u64,
    limit: u64,
}

impl Counter {
    fn tick(&mut self) -> bool {
        if self.evaluated >= self.limit {
            return false;
        }
        self.evaluated += 1;
        true
    }
}

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn ordered(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

pub(crate) fn search<T: CostValue, O: CostOracle<T>>(
    oracle: &O,
    g: &Network,
    concept: Concept,
    mode: Selection,
    budget: &Budget,
) -> Outcome<T> {
    let adj = Adj::from_network(g);
    match concept {
        Concept::Ps => search_ps(oracle, &adj, mode, budget),
        Concept::Bne => search_bne(oracle, &adj, mode, budget),
        Concept::Bse => search_bse(oracle, &adj, mode, budget),
    }
}

fn current_costs<T: CostValue, O: CostOracle<T>>(oracle: &O, adj: &Adj) -> Vec<T> {
    (0..adj.n()).map(|u| oracle.cost(adj, u)).collect()
}

pub(crate) fn search_ps<T: CostValue, O: CostOracle<T>>(
    oracle: &O,
    adj: &Adj,
    mode: Selection,
    budget: &Budget,
) -> Outcome<T> {
    let n = adj.n();
    let model = oracle.model();
    let old = current_costs(oracle, adj);
    let mut sel = Selector::new(mode);
    let mut ctr = Counter { evaluated: 0, limit: budget.max_evaluations };
    let mut complete = true;
    let mut frontier = String::new();
    let max_coal = budget.max_coalition.unwrap_or(usize::MAX);
    let no_changes = budget.max_changes == Some(0);

    'outer: {
        if no_changes || max_coal == 0 {
            complete = n < 2;
            frontier = "change or coalition cap excludes every move".into();
            break 'outer;
        }
        for u in 0..n {
            for v in bits(adj.row(u)) {
                if !ctr.tick() {
                    complete = false;
                    frontier = format!("removal by {u} of {u}-{v}");
                    break 'outer;
                }
                let mut a = *adj;
                a.set(u, v, false);
                let c = oracle.cost(&a, u);
                if model.improves(c, old[u]) {
                    let mv = Move::new(Concept::Ps, [u], [ordered(u, v)], []);
                    if sel.offer(Found { mv, gain: T::gain(old[u], c) }) || mode == Selection::Canonical {
                        break 'outer;
                    }
                }
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                if adj.has(u, v) {
                    continue;
                }
                if max_coal < 2 {
                    complete = false;
                    frontier = "coalition cap excludes additions".into();
                    break 'outer;
                }
                if !ctr.tick() {
                    complete = false;
                    frontier = format!("addition {u}-{v}");
                    break 'outer;
                }
                let mut a = *adj;
                a.set(u, v, true);
                let cu = oracle.cost(&a, u);
                if !model.improves(cu, old[u]) {
                    continue;
                }
                let cv = oracle.cost(&a, v);
                if model.improves(cv, old[v]) {
                    let gain = T::gain(old[u], cu).saturating_plus(T::gain(old[v], cv));
                    let mv = Move::new(Concept::Ps, [u, v], [], [(u, v)]);
                    // additions are enumerated in canonical order, after all removals
                    if sel.offer(Found { mv, gain }) || mode == Selection::Canonical {
                        break 'outer;
                    }
                }
            }
        }
    }
    Outcome { found: sel.best, complete, evaluated: ctr.evaluated, frontier }
}

pub(crate) fn search_bne<T: CostValue, O: CostOracle<T>>(
    oracle: &O,
    adj: &Adj,
    mode: Selection,
    budget: &Budget,
) -> Outcome<T> {
    let n = adj.n();
    let model = oracle.model();
    let old = current_costs(oracle, adj);
    let mut sel = Selector::new(mode);
    let mut ctr = Counter { evaluated: 0, limit: budget.max_evaluations };
    let mut complete = true;
    let mut frontier = String::new();
    let max_coal = budget.max_coalition.unwrap_or(usize::MAX);
    let max_changes = budget.max_changes.unwrap_or(usize::MAX);

    'outer: for u in 0..n {
        let nbrs: Vec<usize> = bits(adj.row(u)).collect();
        let non: Vec<usize> = bits(adj.all_nodes() & !adj.row(u) & !(1u64 << u)).collect();
        if nbrs.len() + non.len() >= 64 {
            complete = false;
            frontier = format!("agent {u} has too many options to enumerate");
            break;
        }
        for am in 0u64..(1u64 << non.len()) {
            let partners = am.count_ones() as usize;
            if partners + 1 > max_coal {
                complete = false;
                if frontier.is_empty() {
                    frontier = format!("coalition cap at agent {u}");
                }
                continue;
            }
            if !sel.wants_size(partners + 1) {
                continue;
            }
            for rm in 0u64..(1u64 << nbrs.len()) {
                if rm == 0 && am == 0 {
                    continue;
                }
                if rm.count_ones() as usize + partners > max_changes {
                    complete = false;
                    if frontier.is_empty() {
                        frontier = format!("change cap at agent {u}");
                    }
                    continue;
                }
                if !ctr.tick() {
                    complete = false;
                    frontier = format!("agent {u}, additions mask {am:#b}, removals mask {rm:#b}");
                    break 'outer;
                }
                let mut a = *adj;
                for i in bits(rm) {
                    a.set(u, nbrs[i], false);
                }
                for i in bits(am) {
                    a.set(u, non[i], true);
                }
                let cu = oracle.cost(&a, u);
                if !model.improves(cu, old[u]) {
                    continue;
                }
                let mut gain = T::gain(old[u], cu);
                let mut ok = true;
                for i in bits(am) {
                    let v = non[i];
                    let cv = oracle.cost(&a, v);
                    if !model.improves(cv, old[v]) {
                        ok = false;
                        break;
                    }
                    gain = gain.saturating_plus(T::gain(old[v], cv));
                }
                if !ok {
                    continue;
                }
                let coalition = std::iter::once(u).chain(bits(am).map(|i| non[i]));
                let mv = Move::new(
                    Concept::Bne,
                    coalition,
                    bits(rm).map(|i| ordered(u, nbrs[i])),
                    bits(am).map(|i| ordered(u, non[i])),
                );
                if sel.offer(Found { mv, gain }) {
                    break 'outer;
                }
            }
        }
    }
    Outcome { found: sel.best, complete, evaluated: ctr.evaluated, frontier }
}

/// Lazily evaluated improvement status of each agent in one target network.
struct Memo<T> {
    known: u64,
    improving: u64,
    cost: [T; 64],
}

impl<T: CostValue> Memo<T> {
    fn new() -> Self {
        Memo { known: 0, improving: 0, cost: [T::ZERO; 64] }
    }

    #[inline]
    fn improves<O: CostOracle<T>>(&mut self, oracle: &O, a: &Adj, old: &[T], u: usize) -> bool {
        let bit = 1u64 << u;
        if self.known & bit == 0 {
            let c = oracle.cost(a, u);
            self.cost[u] = c;
            self.known |= bit;
            if oracle.model().improves(c, old[u]) {
                self.improving |= bit;
            }
        }
        self.improving & bit != 0
    }
}

/// Smallest, then lexicographically first, set of nodes from `allowed` that
/// touches every edge in `edges`.
fn min_cover(edges: &[Edge], allowed: u64) -> Option<u64> {
    let cand: Vec<usize> = bits(allowed).collect();
    let covers = |s: u64| edges.iter().all(|&(a, b)| (s >> a | s >> b) & 1 == 1);
    for k in 0..=cand.len() {
        // combinations of size k in lexicographic order
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let s = idx.iter().fold(0u64, |m, &i| m | 1 << cand[i]);
            if covers(s) {
                return Some(s);
            }
            let mut i = k;
            while i > 0 && idx[i - 1] == cand.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

/// Enumerates target networks `G' != G` by increasing number of changed pairs.
/// `G'` is reachable by a coalition of improving agents iff both endpoints of
/// every added pair improve and every removed edge has an improving endpoint;
/// the reported coalition is the smallest such set.
pub(crate) fn search_bse<T: CostValue, O: CostOracle<T>>(
    oracle: &O,
    adj: &Adj,
    mode: Selection,
    budget: &Budget,
) -> Outcome<T> {
    let n = adj.n();
    let pairs = all_pairs(n);
    let m = pairs.len();
    assert!(m <= 64, "coalition search needs at most 64 node pairs");
    let old = current_costs(oracle, adj);
    let gmask = adj.mask();
    let mut sel = Selector::new(mode);
    let mut ctr = Counter { evaluated: 0, limit: budget.max_evaluations };
    let max_coal = budget.max_coalition.unwrap_or(usize::MAX);
    let max_k = budget.max_changes.unwrap_or(m).min(m);
    let mut complete = max_k == m;
    let mut frontier = if complete { String::new() } else { format!("targets beyond {max_k} changes") };

    'outer: for k in 1..=max_k {
        let limit: u128 = 1u128 << m;
        let mut d: u128 = (1u128 << k) - 1;
        while d < limit {
            let diff = d as u64;
            {
                // next combination with the same popcount
                let c = d & d.wrapping_neg();
                let r = d + c;
                d = (((r ^ d) >> 2) / c) | r;
            }
            if !ctr.tick() {
                complete = false;
                frontier = format!("{k} changes, pair mask {diff:#x}");
                break 'outer;
            }
            let removed = diff & gmask;
            let added = diff & !gmask;
            let mut a = *adj;
            for i in bits(diff) {
                let (u, v) = pairs[i];
                a.toggle(u, v);
            }
            if !a.is_connected() {
                continue;
            }
            let mut req = 0u64;
            for i in bits(added) {
                let (u, v) = pairs[i];
                req |= 1 << u | 1 << v;
            }
            if !sel.wants_size(req.count_ones() as usize) {
                continue;
            }
            let mut memo = Memo::new();
            if !bits(req).all(|u| memo.improves(oracle, &a, &old, u)) {
                continue;
            }
            let mut uncovered = Vec::new();
            let mut ok = true;
            for i in bits(removed) {
                let (u, v) = pairs[i];
                if (req >> u | req >> v) & 1 == 1 {
                    continue;
                }
                if !memo.improves(oracle, &a, &old, u) && !memo.improves(oracle, &a, &old, v) {
                    ok = false;
                    break;
                }
                uncovered.push((u, v));
            }
            if !ok {
                continue;
            }
            // forced members, then the cheapest cover of what remains
            let mut coal = req;
            let mut allowed = 0u64;
            for &(u, v) in &uncovered {
                let iu = memo.improves(oracle, &a, &old, u);
                let iv = memo.improves(oracle, &a, &old, v);
                match (iu, iv) {
                    (true, false) => coal |= 1 << u,
                    (false, true) => coal |= 1 << v,
                    _ => allowed |= 1 << u | 1 << v,
                }
            }
            let rest: Vec<Edge> = uncovered
                .iter()
                .copied()
                .filter(|&(u, v)| (coal >> u | coal >> v) & 1 == 0)
                .collect();
            coal |= min_cover(&rest, allowed & !coal).expect("both endpoints improve");
            let size = coal.count_ones() as usize;
            if size > max_coal {
                complete = false;
                if frontier.is_empty() {
                    frontier = format!("coalition cap excludes a {size}-agent move");
                }
                continue;
            }
            if !sel.wants_size(size) {
                continue;
            }
            let gain = bits(coal).fold(T::ZERO, |g, u| g.saturating_plus(T::gain(old[u], memo.cost[u])));
            let mv = Move::new(
                Concept::Bse,
                bits(coal),
                bits(removed).map(|i| pairs[i]),
                bits(added).map(|i| pairs[i]),
            );
            if sel.offer(Found { mv, gain }) {
                break 'outer;
            }
        }
    }
    Outcome { found: sel.best, complete, evaluated: ctr.evaluated, frontier }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_prefers_small_then_lex() {
        let edges = [(0, 3), (1, 3), (2, 3)];
        assert_eq!(min_cover(&edges, 0b1111), Some(1 << 3));
        let edges = [(0, 1), (2, 3)];
        assert_eq!(min_cover(&edges, 0b1111), Some(0b0101));
        assert_eq!(min_cover(&[], 0b11), Some(0));
    }
}
