//! Brute-force oracles shared by the integration tests. None of these call
//! into the library's own search or residuation code.
#![allow(dead_code)]

use std::sync::Arc;

use qf_core::quantales::{cyclic_group, powerset_monoid_quantale};
use qf_core::{Caps, Lattice, Quantale};

/// All maps `0..m → 0..n`, as tables.
pub fn all_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..n).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Join preservation checked on the order matrices only.
pub fn preserves_joins(src: &Lattice, dst: &Lattice, t: &[usize]) -> bool {
    let sup = |l: &Lattice, a: usize, b: usize| {
        // least upper bound from the order relation
        l.elements()
            .filter(|&u| l.leq(a, u) && l.leq(b, u))
            .find(|&u| l.elements().all(|v| !(l.leq(a, v) && l.leq(b, v)) || l.leq(u, v)))
            .unwrap()
    };
    let bot = |l: &Lattice| l.elements().find(|&u| l.elements().all(|v| l.leq(u, v))).unwrap();
    t[bot(src)] == bot(dst) && src.elements().all(|a| src.elements().all(|b| t[sup(src, a, b)] == sup(dst, t[a], t[b])))
}

/// Number of isomorphism classes of lattices with `n` elements, by
/// enumerating partial orders on `0..n` with `0` least and `n-1` greatest.
pub fn count_lattices(n: usize) -> usize {
    if n <= 2 {
        return 1;
    }
    let inner: Vec<(usize, usize)> =
        (1..n - 1).flat_map(|i| (1..n - 1).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut classes: Vec<Vec<Vec<bool>>> = Vec::new();
    let perms = permutations(n);
    for bits in 0u32..(1 << inner.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
            row[n - 1] = true;
        }
        leq[0] = vec![true; n];
        for (k, &(i, j)) in inner.iter().enumerate() {
            if bits >> k & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let antisym = (0..n).all(|i| (0..n).all(|j| i == j || !(leq[i][j] && leq[j][i])));
        let trans = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(leq[i][j] && leq[j][k]) || leq[i][k])));
        if !antisym || !trans {
            continue;
        }
        let has_joins = (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).any(|u| leq[a][u] && leq[b][u] && (0..n).all(|v| !(leq[a][v] && leq[b][v]) || leq[u][v]))
            })
        });
        if !has_joins {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = vec![vec![false; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        m[p[i]][p[j]] = leq[i][j];
                    }
                }
                m
            })
            .min()
            .unwrap();
        if !classes.contains(&canon) {
            classes.push(canon);
        }
    }
    classes.len()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `2`, the 3-chain under `min`, and `P(Z/2)`.
pub fn module_quantales() -> Vec<(&'static str, Arc<Quantale>)> {
    vec![
        ("two", Arc::new(Quantale::two())),
        ("min3", Arc::new(Quantale::min_quantale(3))),
        ("pz2", Arc::new(powerset_monoid_quantale(&cyclic_group(2), &Caps::default()).unwrap())),
    ]
}

pub fn small_lattices(max_n: usize) -> Vec<Arc<Lattice>> {
    (1..=max_n)
        .flat_map(|n| qf_core::lattice::enumerate_sup_lattices(n, &Caps::default()).unwrap())
        .map(Arc::new)
        .collect()
}
