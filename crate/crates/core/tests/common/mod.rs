//! Independent exact oracles: Floyd-Warshall over rationals on explicit edge
//! lists, with no use of the library's distance or cost code.

#![allow(dead_code)]

use netform::Instance;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// All-pairs distances; `None` means unreachable.
pub fn apsp(n: usize, w: impl Fn(usize, usize) -> BigRational, edges: &[(usize, usize)]) -> Vec<Vec<Option<BigRational>>> {
    let mut d: Vec<Vec<Option<BigRational>>> = vec![vec![None; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = Some(BigRational::zero());
    }
    for &(u, v) in edges {
        let x = w(u, v);
        if d[u][v].as_ref().is_none_or(|c| x < *c) {
            d[u][v] = Some(x.clone());
            d[v][u] = Some(x);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (&d[i][k], &d[k][j]) {
                    let c = a + b;
                    if d[i][j].as_ref().is_none_or(|x| c < *x) {
                        d[i][j] = Some(c);
                    }
                }
            }
        }
    }
    d
}

pub fn host_apsp(inst: &Instance, edges: &[(usize, usize)]) -> Vec<Vec<Option<BigRational>>> {
    apsp(inst.n(), |u, v| inst.host.weight(u, v).clone(), edges)
}

/// `Σ_u d(u,V)`, `None` when disconnected.
pub fn distance_total(inst: &Instance, edges: &[(usize, usize)]) -> Option<BigRational> {
    let d = host_apsp(inst, edges);
    let mut s = BigRational::zero();
    for row in d {
        for x in row {
            s += x?;
        }
    }
    Some(s)
}

pub fn weight_total(inst: &Instance, edges: &[(usize, usize)]) -> BigRational {
    edges.iter().fold(BigRational::zero(), |a, &(u, v)| a + inst.host.weight(u, v))
}

/// `2α·w(E) + Σd`
pub fn social(inst: &Instance, edges: &[(usize, usize)]) -> Option<BigRational> {
    Some(int(2) * &inst.alpha * weight_total(inst, edges) + distance_total(inst, edges)?)
}

/// `max d_G/d_H` over pairs with positive host distance, `None` for infinite.
pub fn stretch(inst: &Instance, edges: &[(usize, usize)]) -> Option<BigRational> {
    let n = inst.n();
    let all: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    let dh = host_apsp(inst, &all);
    let dg = host_apsp(inst, edges);
    let mut worst = int(1);
    for u in 0..n {
        for v in (u + 1)..n {
            let h = dh[u][v].clone().unwrap();
            let g = dg[u][v].clone()?;
            if h.is_zero() {
                if !g.is_zero() {
                    return None;
                }
                continue;
            }
            let r = g / h;
            if r > worst {
                worst = r;
            }
        }
    }
    Some(worst)
}

/// Exhaustive optimum cost over all connected subgraphs.
pub fn brute_opt_cost(inst: &Instance) -> BigRational {
    let n = inst.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len())
        .filter_map(|m| {
            let edges: Vec<_> = (0..pairs.len()).filter(|i| m >> i & 1 == 1).map(|i| pairs[i]).collect();
            social(inst, &edges)
        })
        .min()
        .unwrap()
}
