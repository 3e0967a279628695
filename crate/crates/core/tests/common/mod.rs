#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use qmonad::linalg::{rational, GaussRat, Matrix};
use qmonad::monad::{ProjDist, QDistribution};
use qmonad::structures::{Homomorphism, Signature, Structure};
use qmonad::translations::{Bcs, BoolConstraint, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut impl Rng) -> GaussRat {
    let d1 = rng.random_range(1..=3);
    let d2 = rng.random_range(1..=3);
    GaussRat::new(rational(rng.random_range(-4..=4), d1), rational(rng.random_range(-4..=4), d2))
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_exact(rows, cols, (0..rows * cols).map(|_| gauss(rng)).collect()).unwrap()
}

pub fn nonzero_vector(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let v = matrix(rng, n, 1);
        if !v.is_zero(0.0) {
            return v;
        }
    }
}

/// `vv^*/(v^*v)` for a random Gaussian-rational `v`.
pub fn rank_one_projector(rng: &mut impl Rng, n: usize) -> Matrix {
    let v = nonzero_vector(rng, n);
    let norm = v.adjoint().matmul(&v).unwrap();
    let qmonad::linalg::Scalar::Exact(g) = norm.get(0, 0) else { unreachable!() };
    v.matmul(&v.adjoint()).unwrap().scale_rational(&(rational(1, 1) / g.re))
}

/// A random exact PVM of dimension `d` in {1, 2} over `k` outcomes, as (outcome, effect).
pub fn pvm(rng: &mut impl Rng, d: usize, k: usize) -> Vec<(usize, Matrix)> {
    let first = rng.random_range(0..k);
    if d == 1 || k == 1 || rng.random_bool(0.25) {
        return vec![(first, Matrix::identity(d, qmonad::linalg::Backend::Exact))];
    }
    let mut second = rng.random_range(0..k - 1);
    if second >= first {
        second += 1;
    }
    let p = rank_one_projector(rng, d);
    let q = Matrix::identity(d, qmonad::linalg::Backend::Exact).checked_sub(&p).unwrap();
    vec![(first, p), (second, q)]
}

pub fn dist(rng: &mut impl Rng, d: usize, n: usize) -> QDistribution {
    ProjDist::new(d, pvm(rng, d, n)).unwrap()
}

/// A random distribution over `keys`, which must be pairwise distinct.
pub fn dist_over<K: PartialEq + Clone>(rng: &mut impl Rng, d: usize, keys: &[K]) -> ProjDist<K> {
    ProjDist::new(d, pvm(rng, d, keys.len()).into_iter().map(|(i, m)| (keys[i].clone(), m))).unwrap()
}

/// `n` pairwise distinct random distributions of dimension `d` over `base` elements.
pub fn distinct_dists(rng: &mut impl Rng, d: usize, base: usize, n: usize) -> Vec<QDistribution> {
    let mut out: Vec<QDistribution> = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 100 {
        tries += 1;
        let p = dist(rng, d, base);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

pub fn binary_signature() -> Signature {
    Signature::new([("R", 2), ("U", 1)]).unwrap()
}

pub fn random_structure(rng: &mut impl Rng, n: usize, density: f64) -> Structure {
    let mut r = BTreeSet::new();
    let mut u = BTreeSet::new();
    for i in 0..n {
        if rng.random_bool(density) {
            u.insert(vec![i]);
        }
        for j in 0..n {
            if rng.random_bool(density) {
                r.insert(vec![i, j]);
            }
        }
    }
    let names = (0..n).map(|i| format!("e{i}")).collect();
    Structure::from_indices(binary_signature(), names, vec![r, u]).unwrap()
}

/// A random map `f` from an `n`-element structure plus a target that `f` is a homomorphism into.
pub fn random_hom_into(rng: &mut impl Rng, a: &Structure, m: usize) -> (Homomorphism, Structure) {
    let f = Homomorphism::new((0..a.size()).map(|_| rng.random_range(0..m)).collect());
    let noise = random_structure(rng, m, 0.3);
    let mut rels = vec![BTreeSet::new(), BTreeSet::new()];
    for (rel, t) in a.tuples() {
        rels[rel].insert(f.apply_tuple(t));
    }
    for (rel, t) in noise.tuples() {
        rels[rel].insert(t.clone());
    }
    let names = (0..m).map(|i| format!("e{i}")).collect();
    (f, Structure::from_indices(binary_signature(), names, rels).unwrap())
}

/// Every map `a -> b`, homomorphism or not.
pub fn all_maps(n: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..m.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let v = code % m;
                code /= m;
                v
            })
            .collect()
    })
}

pub fn brute_homs(a: &Structure, b: &Structure) -> Vec<Homomorphism> {
    all_maps(a.size(), b.size())
        .map(Homomorphism::new)
        .filter(|f| a.tuples().all(|(rel, t)| b.contains(rel, &f.apply_tuple(t))))
        .collect()
}

/// Every labelled simple graph on `1..=max` vertices.
pub fn all_graphs(max: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=max {
        let vs: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0..1u32 << pairs.len() {
            let es: Vec<(String, String)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &(i, j))| (vs[i].clone(), vs[j].clone()))
                .collect();
            out.push(Graph::new(&vs, &es).unwrap());
        }
    }
    out
}

/// Exhaustive search over boolean assignments, pruning on constraints whose scope is complete.
pub fn bcs_satisfiable(bcs: &Bcs) -> bool {
    let pos: BTreeMap<&str, usize> = bcs.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let scopes: Vec<Vec<usize>> = bcs.constraints.iter().map(|c| c.scope.iter().map(|v| pos[v.as_str()]).collect()).collect();
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); bcs.variables.len()];
    for (k, s) in scopes.iter().enumerate() {
        if let Some(&last) = s.iter().max() {
            ready[last].push(k);
        }
    }
    let mut values = vec![false; bcs.variables.len()];
    fn go(i: usize, values: &mut Vec<bool>, bcs: &Bcs, scopes: &[Vec<usize>], ready: &[Vec<usize>]) -> bool {
        if i == values.len() {
            return true;
        }
        for v in [false, true] {
            values[i] = v;
            let ok = ready[i].iter().all(|&k| {
                let args: Vec<bool> = scopes[k].iter().map(|&j| values[j]).collect();
                bcs.constraints[k].eval(&args)
            });
            if ok && go(i + 1, values, bcs, scopes, ready) {
                return true;
            }
        }
        false
    }
    go(0, &mut values, bcs, &scopes, &ready)
}

/// A random boolean constraint system on `n` variables.
pub fn random_bcs(rng: &mut impl Rng, n: usize, constraints: usize) -> Bcs {
    let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let cs = (0..constraints)
        .map(|_| {
            let k = rng.random_range(1..=n.min(3));
            let mut scope: Vec<String> = Vec::new();
            while scope.len() < k {
                let v = vars[rng.random_range(0..n)].clone();
                if !scope.contains(&v) {
                    scope.push(v);
                }
            }
            let table = (0..1usize << k).map(|_| rng.random_bool(0.6)).collect();
            BoolConstraint { scope, table }
        })
        .collect();
    Bcs::new(vars, cs).unwrap()
}
