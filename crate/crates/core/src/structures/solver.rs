//! Backtracking homomorphism search with forward checking.
//!
//! Variables are the source elements in universe order and values are tried in target
//! universe order, so the first witness found is the lexicographically least one.

use super::{Homomorphism, Structure, StructureError};

struct Search<'a> {
    a: &'a Structure,
    b: &'a Structure,
    /// `(relation, tuple)` pairs of the source.
    tuples: Vec<(usize, &'a [usize])>,
    /// For each source element, indices into `tuples` that mention it.
    touching: Vec<Vec<usize>>,
    assignment: Vec<Option<usize>>,
}

/// Finds the lexicographically least homomorphism `a → b`, or `None` if there is none.
pub fn find_homomorphism(a: &Structure, b: &Structure) -> Result<Option<Homomorphism>, StructureError> {
    a.check_same_signature(b)?;
    let tuples: Vec<(usize, &[usize])> = a.tuples().map(|(r, t)| (r, t.as_slice())).collect();
    let mut touching = vec![Vec::new(); a.size()];
    for (i, (_, t)) in tuples.iter().enumerate() {
        let mut seen: Vec<usize> = t.to_vec();
        seen.sort_unstable();
        seen.dedup();
        for x in seen {
            touching[x].push(i);
        }
    }
    let mut search = Search { a, b, tuples, touching, assignment: vec![None; a.size()] };
    let mut domains = vec![vec![true; b.size()]; a.size()];
    // Tuples over a single distinct element act as unary filters.
    for &(rel, t) in &search.tuples {
        if t.iter().all(|&x| x == t[0]) {
            for (v, ok) in domains[t[0]].iter_mut().enumerate() {
                if *ok && !b.contains(rel, &vec![v; t.len()]) {
                    *ok = false;
                }
            }
        }
    }
    Ok(search.extend(0, &mut domains).then(|| {
        Homomorphism::new(search.assignment.iter().map(|v| v.expect("complete")).collect())
    }))
}

impl Search<'_> {
    fn extend(&mut self, var: usize, domains: &mut Vec<Vec<bool>>) -> bool {
        if var == self.a.size() {
            return true;
        }
        for value in 0..self.b.size() {
            if !domains[var][value] {
                continue;
            }
            self.assignment[var] = Some(value);
            let saved = domains.clone();
            if self.propagate(var, domains) && self.extend(var + 1, domains) {
                return true;
            }
            *domains = saved;
            self.assignment[var] = None;
        }
        false
    }

    /// Checks tuples made complete by assigning `var` and prunes the single free
    /// variable of tuples that have exactly one left.
    fn propagate(&self, var: usize, domains: &mut [Vec<bool>]) -> bool {
        for &ti in &self.touching[var] {
            let (rel, t) = self.tuples[ti];
            let mut free: Option<usize> = None;
            let mut many_free = false;
            for &x in t {
                if self.assignment[x].is_none() {
                    match free {
                        None => free = Some(x),
                        Some(f) if f != x => many_free = true,
                        _ => {}
                    }
                }
            }
            if many_free {
                continue;
            }
            let mut image: Vec<usize> = t.iter().map(|&x| self.assignment[x].unwrap_or(0)).collect();
            match free {
                None => {
                    if !self.b.contains(rel, &image) {
                        return false;
                    }
                }
                Some(u) => {
                    let mut any = false;
                    #[allow(clippy::needless_range_loop)]
                    for w in 0..self.b.size() {
                        if !domains[u][w] {
                            continue;
                        }
                        for (slot, &x) in image.iter_mut().zip(t) {
                            if x == u {
                                *slot = w;
                            }
                        }
                        if self.b.contains(rel, &image) {
                            any = true;
                        } else {
                            domains[u][w] = false;
                        }
                    }
                    if !any {
                        return false;
                    }
                }
            }
        }
        true
    }
}
