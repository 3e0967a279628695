use std::fmt;

use crate::linalg::{Backend, Matrix};

use super::MonadError;

/// A finitely supported map from keys to `d × d` matrices; absent keys mean `0`.
///
/// Keys are compared structurally, so a distribution can itself be a key, which is how
/// nested distributions `Q_d Q_d' A` are represented. Zero matrices are never stored,
/// so two distributions are equal iff they agree at every key.
#[derive(Clone, Debug)]
pub struct ProjDist<K> {
    dim: usize,
    backend: Backend,
    support: Vec<(K, Matrix)>,
}

impl<K: PartialEq> ProjDist<K> {
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (K, Matrix)>) -> Result<Self, MonadError> {
        let mut support: Vec<(K, Matrix)> = Vec::new();
        let mut backend = None;
        for (k, m) in entries {
            if m.shape() != (dim, dim) {
                return Err(MonadError::DimensionMismatch { expected: dim, found: m.shape() });
            }
            if *backend.get_or_insert(m.backend()) != m.backend() {
                return Err(MonadError::Linalg(crate::linalg::LinalgError::BackendMismatch));
            }
            if support.iter().any(|(j, _)| *j == k) {
                return Err(MonadError::DuplicateKey);
            }
            if !m.is_zero(0.0) {
                support.push((k, m));
            }
        }
        Ok(Self { dim, backend: backend.unwrap_or(Backend::Exact), support })
    }

    /// The delta distribution at `key`, in dimension one.
    pub fn delta(key: K) -> Self {
        Self { dim: 1, backend: Backend::Exact, support: vec![(key, Matrix::identity(1, Backend::Exact))] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn support(&self) -> &[(K, Matrix)] {
        &self.support
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.support.iter().map(|(k, _)| k)
    }

    pub fn get(&self, key: &K) -> Option<&Matrix> {
        self.support.iter().find(|(k, _)| k == key).map(|(_, m)| m)
    }

    /// The value at `key`, or the zero matrix.
    pub fn value(&self, key: &K) -> Matrix {
        self.get(key).cloned().unwrap_or_else(|| Matrix::zeros(self.dim, self.dim, self.backend))
    }

    /// Sum of all values.
    pub fn total(&self) -> Result<Matrix, MonadError> {
        Ok(Matrix::sum(self.support.iter().map(|(_, m)| m), self.dim, self.dim, self.backend)?)
    }

    /// Pushforward along `f`: `f_*(p)(y) = Σ_{f(x) = y} p(x)`.
    pub fn map<L: PartialEq>(&self, f: impl Fn(&K) -> L) -> Result<ProjDist<L>, MonadError> {
        let mut out: Vec<(L, Matrix)> = Vec::new();
        for (k, m) in &self.support {
            let l = f(k);
            match out.iter_mut().find(|(j, _)| *j == l) {
                Some((_, acc)) => *acc = acc.checked_add(m)?,
                None => out.push((l, m.clone())),
            }
        }
        out.retain(|(_, m)| !m.is_zero(0.0));
        Ok(ProjDist { dim: self.dim, backend: self.backend, support: out })
    }

    /// Fallible pushforward.
    pub fn try_map<L: PartialEq>(&self, f: impl Fn(&K) -> Result<L, MonadError>) -> Result<ProjDist<L>, MonadError> {
        let keys = self.support.iter().map(|(k, _)| f(k)).collect::<Result<Vec<L>, _>>()?;
        let mut out: Vec<(L, Matrix)> = Vec::new();
        for (l, (_, m)) in keys.into_iter().zip(&self.support) {
            match out.iter_mut().find(|(j, _)| *j == l) {
                Some((_, acc)) => *acc = acc.checked_add(m)?,
                None => out.push((l, m.clone())),
            }
        }
        out.retain(|(_, m)| !m.is_zero(0.0));
        Ok(ProjDist { dim: self.dim, backend: self.backend, support: out })
    }

    /// Entrywise comparison with a tolerance (exact on the exact backend).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.support.iter().all(|(k, m)| m.approx_eq(&other.value(k), tol))
            && other.support.iter().all(|(k, m)| m.approx_eq(&self.value(k), tol))
    }
}

impl<K: PartialEq + Clone> ProjDist<ProjDist<K>> {
    /// Graded multiplication `μ(P)(x) = Σ_p P(p) ⊗ p(x)`, from grade `(d, d')` to `d·d'`.
    pub fn flatten(&self) -> Result<ProjDist<K>, MonadError> {
        let inner_dim = match self.support.first() {
            Some((p, _)) => p.dim,
            None => return Err(MonadError::EmptySupport),
        };
        let dim = self.dim * inner_dim;
        let mut out: Vec<(K, Matrix)> = Vec::new();
        for (p, outer) in &self.support {
            if p.dim != inner_dim {
                return Err(MonadError::DimensionMismatch { expected: inner_dim, found: (p.dim, p.dim) });
            }
            for (x, inner) in &p.support {
                let term = outer.kron(inner)?;
                match out.iter_mut().find(|(k, _)| k == x) {
                    Some((_, acc)) => *acc = acc.checked_add(&term)?,
                    None => out.push((x.clone(), term)),
                }
            }
        }
        out.retain(|(_, m)| !m.is_zero(0.0));
        let backend = out.first().map(|(_, m)| m.backend()).unwrap_or(self.backend);
        Ok(ProjDist { dim, backend, support: out })
    }
}

impl<K: PartialEq> PartialEq for ProjDist<K> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.support.len() == other.support.len()
            && self.support.iter().all(|(k, m)| other.get(k) == Some(m))
    }
}

impl<K: fmt::Debug> fmt::Display for ProjDist<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for (k, m) in &self.support {
            writeln!(f, "{k:?} ↦")?;
            write!(f, "{m}")?;
        }
        Ok(())
    }
}
