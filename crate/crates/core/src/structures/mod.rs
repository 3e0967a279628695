//! Finite relational structures and classical homomorphisms between them.

mod solver;

pub use solver::find_homomorphism;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("relation {0:?} declared twice")]
    DuplicateRelation(String),
    #[error("relation {0:?} has arity 0")]
    ZeroArity(String),
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("element {0:?} declared twice")]
    DuplicateElement(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("universe must be non-empty")]
    EmptyUniverse,
    #[error("tuple of length {found} in relation {relation:?} of arity {arity}")]
    ArityMismatch { relation: String, arity: usize, found: usize },
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("map covers {found} elements but the source has {expected}")]
    NotTotal { expected: usize, found: usize },
    #[error("map sends an element to index {0}, outside the target universe")]
    OutOfRange(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// Ordered list of relation symbols with unique names and positive arities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self, StructureError> {
        let mut out: Vec<RelationSymbol> = Vec::new();
        for (name, arity) in relations {
            let name = name.into();
            if arity == 0 {
                return Err(StructureError::ZeroArity(name));
            }
            if out.iter().any(|r| r.name == name) {
                return Err(StructureError::DuplicateRelation(name));
            }
            out.push(RelationSymbol { name, arity });
        }
        Ok(Self { relations: out })
    }

    /// A single binary relation `E`, used for graphs.
    pub fn graph() -> Self {
        Self::new([("E", 2)]).expect("valid")
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].arity
    }
}

/// A finite σ-structure. Elements are identified by string ids and indexed in
/// declaration order; relation tuples are stored as index vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    signature: Signature,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl Structure {
    /// Builds a structure from element ids and named relations given as id tuples.
    /// Relations missing from `relations` are interpreted as empty.
    pub fn new<S: AsRef<str>>(
        signature: Signature,
        universe: impl IntoIterator<Item = S>,
        relations: impl IntoIterator<Item = (S, Vec<Vec<S>>)>,
    ) -> Result<Self, StructureError> {
        let universe: Vec<String> = universe.into_iter().map(|s| s.as_ref().to_string()).collect();
        let mut s = Self::from_indices(signature, universe, Vec::new())?;
        for (name, tuples) in relations {
            let rel = s
                .signature
                .index_of(name.as_ref())
                .ok_or_else(|| StructureError::UnknownRelation(name.as_ref().to_string()))?;
            for t in tuples {
                let idx = t
                    .iter()
                    .map(|e| s.element(e.as_ref()))
                    .collect::<Result<Vec<_>, _>>()?;
                s.insert_tuple(rel, idx)?;
            }
        }
        Ok(s)
    }

    /// Builds a structure from index tuples; missing trailing relations are empty.
    pub fn from_indices(
        signature: Signature,
        universe: Vec<String>,
        mut relations: Vec<BTreeSet<Vec<usize>>>,
    ) -> Result<Self, StructureError> {
        if universe.is_empty() {
            return Err(StructureError::EmptyUniverse);
        }
        let mut index = HashMap::with_capacity(universe.len());
        for (i, e) in universe.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        if relations.len() > signature.len() {
            return Err(StructureError::SignatureMismatch);
        }
        relations.resize(signature.len(), BTreeSet::new());
        for (rel, tuples) in relations.iter().enumerate() {
            let sym = &signature.relations[rel];
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(StructureError::ArityMismatch {
                        relation: sym.name.clone(),
                        arity: sym.arity,
                        found: t.len(),
                    });
                }
                if let Some(&bad) = t.iter().find(|&&e| e >= universe.len()) {
                    return Err(StructureError::OutOfRange(bad));
                }
            }
        }
        Ok(Self { signature, universe, index, relations })
    }

    /// A simple graph as a structure over one symmetric binary relation `E`.
    pub fn graph<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self, StructureError> {
        let tuples = edges
            .iter()
            .flat_map(|(a, b)| [vec![a.as_ref(), b.as_ref()], vec![b.as_ref(), a.as_ref()]])
            .collect();
        Self::new(Signature::graph(), vertices.iter().map(|v| v.as_ref()), [("E", tuples)])
    }

    fn insert_tuple(&mut self, rel: usize, tuple: Vec<usize>) -> Result<(), StructureError> {
        let sym = &self.signature.relations[rel];
        if tuple.len() != sym.arity {
            return Err(StructureError::ArityMismatch {
                relation: sym.name.clone(),
                arity: sym.arity,
                found: tuple.len(),
            });
        }
        self.relations[rel].insert(tuple);
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn element(&self, id: &str) -> Result<usize, StructureError> {
        self.index.get(id).copied().ok_or_else(|| StructureError::UnknownElement(id.to_string()))
    }

    pub fn name(&self, e: usize) -> &str {
        &self.universe[e]
    }

    pub fn relation(&self, rel: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[rel]
    }

    pub fn relation_by_name(&self, name: &str) -> Result<(usize, &BTreeSet<Vec<usize>>), StructureError> {
        let rel = self
            .signature
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownRelation(name.to_string()))?;
        Ok((rel, &self.relations[rel]))
    }

    pub fn contains(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    /// Every `(relation, tuple)` pair, relations in signature order.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.relations.iter().enumerate().flat_map(|(r, ts)| ts.iter().map(move |t| (r, t)))
    }

    pub fn format_tuple(&self, tuple: &[usize]) -> String {
        let names: Vec<&str> = tuple.iter().map(|&e| self.name(e)).collect();
        format!("({})", names.join(","))
    }

    fn check_same_signature(&self, other: &Structure) -> Result<(), StructureError> {
        if self.signature != other.signature {
            return Err(StructureError::SignatureMismatch);
        }
        Ok(())
    }
}

/// A total map between universes, by element index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Builds a map from `(source id, target id)` pairs; every source element must be covered.
    pub fn from_names<S: AsRef<str>>(a: &Structure, b: &Structure, pairs: &[(S, S)]) -> Result<Self, StructureError> {
        let mut map = vec![None; a.size()];
        for (x, y) in pairs {
            map[a.element(x.as_ref())?] = Some(b.element(y.as_ref())?);
        }
        let found = map.iter().filter(|m| m.is_some()).count();
        if found != a.size() {
            return Err(StructureError::NotTotal { expected: a.size(), found });
        }
        Ok(Self { map: map.into_iter().map(Option::unwrap).collect() })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_tuple(&self, t: &[usize]) -> Vec<usize> {
        t.iter().map(|&x| self.map[x]).collect()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Homomorphism) -> Homomorphism {
        Homomorphism { map: self.map.iter().map(|&y| next.map[y]).collect() }
    }

    /// Checks totality and range against a source/target pair.
    pub fn check_shape(&self, a: &Structure, b: &Structure) -> Result<(), StructureError> {
        if self.map.len() != a.size() {
            return Err(StructureError::NotTotal { expected: a.size(), found: self.map.len() });
        }
        if let Some(&bad) = self.map.iter().find(|&&y| y >= b.size()) {
            return Err(StructureError::OutOfRange(bad));
        }
        Ok(())
    }
}

/// True iff every tuple of `a` maps into the corresponding relation of `b`.
pub fn is_homomorphism(a: &Structure, b: &Structure, f: &Homomorphism) -> Result<bool, StructureError> {
    a.check_same_signature(b)?;
    f.check_shape(a, b)?;
    Ok(a.tuples().all(|(rel, t)| b.contains(rel, &f.apply_tuple(t))))
}

/// Co-occurrence graph of a structure. An element is self-adjacent when it repeats
/// inside some tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaifmanGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl GaifmanGraph {
    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.adjacency[x].contains(&y)
    }

    pub fn neighbours(&self, x: usize) -> &BTreeSet<usize> {
        &self.adjacency[x]
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Adjacent pairs `(x, y)` with `x <= y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, ns)| ns.iter().filter(move |&&y| y >= x).map(move |&y| (x, y)))
    }
}

pub fn gaifman(a: &Structure) -> GaifmanGraph {
    let mut adjacency = vec![BTreeSet::new(); a.size()];
    for (_, t) in a.tuples() {
        for (i, &x) in t.iter().enumerate() {
            for (j, &y) in t.iter().enumerate() {
                if i != j {
                    adjacency[x].insert(y);
                }
            }
        }
    }
    GaifmanGraph { adjacency }
}

/// Cartesian product; element `(x, y)` has index `x * |B| + y` and id `"(x,y)"`.
pub fn product(a: &Structure, b: &Structure) -> Result<Structure, StructureError> {
    a.check_same_signature(b)?;
    let nb = b.size();
    let universe = a
        .universe
        .iter()
        .flat_map(|x| b.universe.iter().map(move |y| format!("({x},{y})")))
        .collect();
    let relations = (0..a.signature.len())
        .map(|rel| {
            let mut out = BTreeSet::new();
            for ta in a.relation(rel) {
                for tb in b.relation(rel) {
                    out.insert(ta.iter().zip(tb).map(|(&x, &y)| x * nb + y).collect());
                }
            }
            out
        })
        .collect();
    Structure::from_indices(a.signature.clone(), universe, relations)
}

/// The one-element structure with every relation universal.
pub fn terminal(signature: &Signature) -> Structure {
    let relations = signature
        .relations()
        .iter()
        .map(|r| BTreeSet::from([vec![0; r.arity]]))
        .collect();
    Structure::from_indices(signature.clone(), vec!["*".to_string()], relations).expect("valid terminal")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn complete(n: usize) -> Structure {
        let vs: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
        let mut es = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                es.push((vs[i].clone(), vs[j].clone()));
            }
        }
        Structure::graph(&vs, &es).unwrap()
    }

    fn all_maps(n: usize, m: usize) -> Vec<Homomorphism> {
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut k| {
                let mut map = vec![0; n];
                for slot in map.iter_mut() {
                    *slot = k % m;
                    k /= m;
                }
                Homomorphism::new(map)
            })
            .collect()
    }

    #[test]
    fn signature_validation() {
        assert_eq!(Signature::new([("R", 0)]), Err(StructureError::ZeroArity("R".into())));
        assert!(Signature::new([("R", 2), ("R", 1)]).is_err());
    }

    #[test]
    fn structure_validation() {
        let sig = Signature::new([("R", 2)]).unwrap();
        let none: [&str; 0] = [];
        assert_eq!(
            Structure::new(sig.clone(), none, Vec::<(&str, Vec<Vec<&str>>)>::new()),
            Err(StructureError::EmptyUniverse)
        );
        assert!(Structure::new(sig.clone(), ["a"], [("R", vec![vec!["a", "b"]])]).is_err());
        assert!(Structure::new(sig.clone(), ["a"], [("R", vec![vec!["a"]])]).is_err());
        assert!(Structure::new(sig.clone(), ["a", "a"], []).is_err());
        assert!(Structure::new(sig, ["a"], [("S", vec![vec!["a"]])]).is_err());
    }

    #[test]
    fn k3_homomorphisms() {
        let k3 = complete(3);
        assert!(is_homomorphism(&k3, &k3, &Homomorphism::identity(3)).unwrap());
        assert!(!is_homomorphism(&k3, &k3, &Homomorphism::new(vec![0, 0, 0])).unwrap());
        let count = all_maps(3, 3).iter().filter(|f| is_homomorphism(&k3, &k3, f).unwrap()).count();
        assert_eq!(count, 6);
    }

    #[test]
    fn homomorphism_errors() {
        let k3 = complete(3);
        let sig = Signature::new([("R", 1)]).unwrap();
        let other = Structure::new(sig, ["a"], []).unwrap();
        assert_eq!(
            is_homomorphism(&k3, &other, &Homomorphism::new(vec![0, 0, 0])),
            Err(StructureError::SignatureMismatch)
        );
        assert!(is_homomorphism(&k3, &k3, &Homomorphism::new(vec![0, 1])).is_err());
        assert!(is_homomorphism(&k3, &k3, &Homomorphism::new(vec![0, 1, 7])).is_err());
    }

    #[test]
    fn gaifman_examples() {
        let sig = Signature::new([("R", 3)]).unwrap();
        let empty = Structure::new(sig.clone(), ["x", "y", "z"], []).unwrap();
        assert_eq!(gaifman(&empty).edges().count(), 0);
        let tri = Structure::new(sig, ["x", "y", "z"], [("R", vec![vec!["x", "y", "z"]])]).unwrap();
        let g = gaifman(&tri);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let sig2 = Signature::new([("R", 2)]).unwrap();
        let looped = Structure::new(sig2, ["x", "y"], [("R", vec![vec!["x", "x"]])]).unwrap();
        assert!(gaifman(&looped).adjacent(0, 0));
        assert!(!gaifman(&looped).adjacent(1, 1));
    }

    #[test]
    fn products_and_terminal() {
        let sig = Signature::graph();
        let top = terminal(&sig);
        assert_eq!(top.size(), 1);
        assert_eq!(top.relation(0).len(), 1);
        assert!(top.contains(0, &[0, 0]));

        let k2 = complete(2);
        let p = product(&k2, &k2).unwrap();
        assert_eq!(p.size(), 4);
        // (0,0)-(1,1), (0,1)-(1,0) and their reverses.
        let expected: BTreeSet<Vec<usize>> =
            [vec![0, 3], vec![3, 0], vec![1, 2], vec![2, 1]].into_iter().collect();
        assert_eq!(p.relation(0), &expected);

        let k3 = complete(3);
        let pt = product(&k3, &top).unwrap();
        assert_eq!(pt.size(), 3);
        assert_eq!(pt.relation(0), k3.relation(0));
        assert!(product(&k3, &terminal(&Signature::new([("R", 1)]).unwrap())).is_err());
    }
}
