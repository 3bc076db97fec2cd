//! Generators and by-definition checkers for the acceptance suite. Nothing
//! here calls into the library's own verifier or wing counter.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hypembed::{Color, Coloring, EdgeCopy, MultiEdge, MultiHypergraph, Vertex};
use rand::Rng;
use rand::seq::SliceRandom;

pub fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// All h-subsets of `1..=n`, lexicographic.
pub fn h_sets(n: u32, h: usize) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, h, &mut Vec::new(), &mut out);
    out
}

fn edge(ids: &[u32]) -> MultiEdge {
    MultiEdge::from_ids(ids)
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.0[x] = root;
        root
    }
    fn join(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Checks copy by copy that `c` is an `r`-factorization of `λK_n^h` carried
/// by `g`, with the classes in `connected` connected.
pub fn check_factorization(
    g: &MultiHypergraph,
    c: &Coloring,
    n: u32,
    h: usize,
    lambda: u64,
    r: &[u64],
    connected: &BTreeSet<u32>,
) -> Result<(), String> {
    let k = r.len();
    let want: BTreeSet<Vertex> = (1..=n).map(Vertex).collect();
    if *g.vertices() != want {
        return Err(format!("vertex set is not 1..={n}"));
    }
    let sets = h_sets(n, h);
    if g.edges().count() != sets.len() || sets.len() as u64 != choose(n as u64, h as u64) {
        return Err("wrong number of distinct edges".into());
    }
    if c.iter().count() as u64 != lambda * sets.len() as u64 {
        return Err("coloured copies do not match λC(n,h)".into());
    }
    let mut deg = vec![vec![0u64; n as usize + 1]; k + 1];
    let mut dsu: Vec<Dsu> = (0..=k).map(|_| Dsu::new(n as usize + 1)).collect();
    for s in &sets {
        let e = edge(s);
        if g.multiplicity(&e) != lambda {
            return Err(format!("edge {s:?} has multiplicity {}", g.multiplicity(&e)));
        }
        for i in 0..lambda as u32 {
            let col = c
                .color_of(&EdgeCopy::new(e.clone(), i))
                .ok_or_else(|| format!("copy {i} of {s:?} is uncoloured"))?;
            let j = col.0 as usize;
            if j == 0 || j > k {
                return Err(format!("colour {j} out of range"));
            }
            for &v in s {
                deg[j][v as usize] += 1;
                dsu[j].join(s[0] as usize, v as usize);
            }
        }
    }
    for j in 1..=k {
        if let Some(v) = (1..=n as usize).find(|&v| deg[j][v] != r[j - 1]) {
            return Err(format!("class {j}: vertex {v} has degree {} != {}", deg[j][v], r[j - 1]));
        }
        if connected.contains(&(j as u32)) {
            let root = dsu[j].find(1);
            if (2..=n as usize).any(|v| dsu[j].find(v) != root) {
                return Err(format!("class {j} is disconnected"));
            }
        }
    }
    Ok(())
}

/// Every coloured input copy keeps its colour.
pub fn preserved(input: &Coloring, output: &Coloring) -> bool {
    input.iter().all(|(cp, col)| output.color_of(cp) == Some(col))
}

/// Random partial colouring of `λK_m^h` in which class `j` has degree at most
/// `caps[j-1]`. Colours are drawn from `1..=palette`; each copy is skipped
/// with probability `skip`.
pub fn greedy_partial<R: Rng>(
    m: u32,
    h: usize,
    lambda: u64,
    k: usize,
    palette: usize,
    caps: &[u64],
    skip: f64,
    rng: &mut R,
) -> Coloring {
    let mut c = Coloring::new(k);
    let mut copies = Vec::new();
    for s in h_sets(m, h) {
        for i in 0..lambda as u32 {
            copies.push((s.clone(), i));
        }
    }
    copies.shuffle(rng);
    let mut deg = vec![vec![0u64; m as usize + 1]; palette + 1];
    let mut order: Vec<usize> = (1..=palette).collect();
    for (s, i) in copies {
        if rng.gen_bool(skip) {
            continue;
        }
        order.shuffle(rng);
        if let Some(&j) = order.iter().find(|&&j| s.iter().all(|&v| deg[j][v as usize] < caps[j - 1])) {
            for &v in &s {
                deg[j][v as usize] += 1;
            }
            c.assign(EdgeCopy::new(edge(&s), i), Color(j as u32)).unwrap();
        }
    }
    c
}

/// Components of class `j` of a colouring of a hypergraph on `1..=m`, as
/// lists of coloured copies; isolated vertices are left out.
pub fn class_components(c: &Coloring, m: u32, j: Color) -> Vec<Vec<EdgeCopy>> {
    let copies: Vec<EdgeCopy> = c.class(j).cloned().collect();
    let mut dsu = Dsu::new(m as usize + 1);
    for cp in &copies {
        let vs = cp.edge.vertices();
        for v in vs {
            dsu.join(vs[0].0 as usize, v.0 as usize);
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeCopy>> = BTreeMap::new();
    for cp in copies {
        let root = dsu.find(cp.edge.vertices()[0].0 as usize);
        groups.entry(root).or_default().push(cp);
    }
    groups.into_values().collect()
}

/// True iff some component of the class is `r`-regular.
pub fn has_regular_component(c: &Coloring, m: u32, j: Color, r: u64) -> bool {
    class_components(c, m, j).iter().any(|comp| {
        let mut deg: BTreeMap<u32, u64> = BTreeMap::new();
        for cp in comp {
            for v in cp.edge.vertices() {
                *deg.entry(v.0).or_default() += 1;
            }
        }
        deg.values().all(|&d| d == r)
    })
}

/// Uncolours one copy of every `r`-regular component until none is left.
pub fn break_regular_components(c: &mut Coloring, m: u32, k: usize, r: &[u64]) {
    for j in 1..=k as u32 {
        let col = Color(j);
        loop {
            let regular = class_components(c, m, col).into_iter().find(|comp| {
                let mut deg: BTreeMap<u32, u64> = BTreeMap::new();
                for cp in comp {
                    for v in cp.edge.vertices() {
                        *deg.entry(v.0).or_default() += 1;
                    }
                }
                deg.values().all(|&d| d == r[j as usize - 1])
            });
            match regular {
                Some(comp) => {
                    c.unassign(&comp[0]);
                }
                None => break,
            }
        }
    }
}

/// Wings of an edge list at `alpha` found by trying every edge subset against
/// the definition: connected; alpha is not a cut vertex; no outside edge
/// touches a non-alpha vertex of the subset. Returns the wing subsets.
pub fn brute_force_wings(edges: &[Vec<u32>], alpha: u32) -> Vec<u32> {
    let e = edges.len();
    assert!(e <= 16);
    let verts = |mask: u32| -> BTreeSet<u32> {
        (0..e)
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| edges[i].iter().copied())
            .collect()
    };
    let connected = |mask: u32| -> bool {
        let idx: Vec<usize> = (0..e).filter(|i| mask >> i & 1 == 1).collect();
        let mut reached = vec![idx[0]];
        let mut seen: BTreeSet<u32> = edges[idx[0]].iter().copied().collect();
        let mut grew = true;
        while grew {
            grew = false;
            for &i in &idx {
                if !reached.contains(&i) && edges[i].iter().any(|v| seen.contains(v)) {
                    reached.push(i);
                    seen.extend(edges[i].iter().copied());
                    grew = true;
                }
            }
        }
        reached.len() == idx.len()
    };
    let alpha_cuts = |mask: u32| -> bool {
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            let rest = mask & !sub;
            let a = verts(sub);
            let b = verts(rest);
            let meet: BTreeSet<u32> = a.intersection(&b).copied().collect();
            if meet.len() == 1 && meet.contains(&alpha) {
                return true;
            }
            sub = (sub - 1) & mask;
        }
        false
    };
    let mut wings = Vec::new();
    for mask in 1u32..(1 << e) {
        if !connected(mask) {
            continue;
        }
        let vs = verts(mask);
        if vs.contains(&alpha) && alpha_cuts(mask) {
            continue;
        }
        let leaks = (0..e)
            .filter(|i| mask >> i & 1 == 0)
            .any(|i| edges[i].iter().any(|v| *v != alpha && vs.contains(v)));
        if !leaks {
            wings.push(mask);
        }
    }
    wings
}

/// Expands a hypergraph into one vertex list per copy.
pub fn copy_list(g: &MultiHypergraph) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for (e, mult) in g.edges() {
        for _ in 0..mult {
            out.push(e.vertices().iter().map(|v| v.0).collect());
        }
    }
    out
}
