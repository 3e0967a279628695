//! JSON file formats and the `catalog:` reference scheme.
//!
//! Every [`Document`] has a canonical pretty-printed form; parsing it and writing it back
//! reproduces the same bytes.

mod formats;

pub use formats::{cert_to_json, hom_map_to_json, parse_cert, parse_hom_map, parse_pvms, pvms_to_json, CertFile, StructureRef};

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{catalog_get, CatalogError, Payload};
use crate::games::GameError;
use crate::linalg::LinalgError;
use crate::monad::MonadError;
use crate::structures::{Homomorphism, Structure, StructureError};
use crate::translations::{Pvms, TranslationError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("at {field} (line {line}, column {column}): {message}")]
    Schema { field: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Monad(#[from] MonadError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

pub(crate) fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        IoError::Schema { field, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })?;
    de.end().map_err(|e| IoError::Schema { field: ".".into(), line: e.line(), column: e.column(), message: e.to_string() })?;
    Ok(value)
}

pub(crate) fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// A type with a JSON file format.
pub trait Document: Sized {
    fn from_json(text: &str) -> Result<Self, IoError>;
    fn to_json(&self) -> String;

    /// Extracts the value from a catalog entry of the matching kind.
    fn from_payload(_payload: Payload) -> Option<Self> {
        None
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })
}

fn resolve_path(reference: &str, base: &Path) -> PathBuf {
    let p = Path::new(reference);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Loads `catalog:<id>` or a file path (relative to `base`).
pub fn load<T: Document>(reference: &str, base: &Path) -> Result<T, IoError> {
    if let Some(id) = reference.strip_prefix("catalog:") {
        let entry = catalog_get(id)?;
        let kind = entry.kind;
        return T::from_payload(entry.payload)
            .ok_or_else(|| IoError::Invalid(format!("catalog entry {id} is a {kind}, not the expected kind")));
    }
    T::from_json(&read_text(&resolve_path(reference, base))?)
}

/// Loads a structure; graph files and graph entries are read as `{E}`-structures.
pub fn load_structure(reference: &str, base: &Path) -> Result<Structure, IoError> {
    if let Some(id) = reference.strip_prefix("catalog:") {
        return Ok(crate::catalog::catalog_structure(id)?);
    }
    let text = read_text(&resolve_path(reference, base))?;
    structure_or_graph(&text)
}

pub(crate) fn structure_or_graph(text: &str) -> Result<Structure, IoError> {
    let probe: serde_json::Value = from_json(text)?;
    if probe.get("vertices").is_some() {
        Ok(crate::translations::Graph::from_json(text)?.to_structure())
    } else {
        Structure::from_json(text)
    }
}

/// Loads a certificate, resolving its structure references relative to its own file.
pub fn load_cert(reference: &str, base: &Path) -> Result<CertFile, IoError> {
    if let Some(id) = reference.strip_prefix("catalog:") {
        return match catalog_get(id)?.payload {
            Payload::Certificate { cert, source, target } => Ok(CertFile {
                cert,
                source: StructureRef::Named(format!("catalog:{source}")),
                target: StructureRef::Named(format!("catalog:{target}")),
            }),
            _ => Err(IoError::Invalid(format!("catalog entry {id} is not a certificate"))),
        };
    }
    let path = resolve_path(reference, base);
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_cert(&read_text(&path)?, &|r| load_structure(r, &dir))
}

pub fn load_pvms(reference: &str, base: &Path, outcomes: &[String]) -> Result<Pvms, IoError> {
    if let Some(id) = reference.strip_prefix("catalog:") {
        return match catalog_get(id)?.payload {
            Payload::Pvms { pvms, .. } => Ok(pvms),
            _ => Err(IoError::Invalid(format!("catalog entry {id} is not a set of measurements"))),
        };
    }
    parse_pvms(&read_text(&resolve_path(reference, base))?, outcomes)
}

pub fn load_hom_map(reference: &str, base: &Path, a: &Structure, b: &Structure) -> Result<Homomorphism, IoError> {
    parse_hom_map(&read_text(&resolve_path(reference, base))?, a, b)
}

/// Canonical JSON of a catalog payload.
pub fn payload_to_json(payload: &Payload) -> String {
    match payload {
        Payload::Structure(s) => s.to_json(),
        Payload::Bcs(b) => b.to_json(),
        Payload::Empirical(e) => e.to_json(),
        Payload::Certificate { cert, source, target } => cert_to_json(&CertFile {
            cert: cert.clone(),
            source: StructureRef::Named(format!("catalog:{source}")),
            target: StructureRef::Named(format!("catalog:{target}")),
        }),
        Payload::Strategy(s) => s.to_json(),
        Payload::Graph(g) => g.to_json(),
        Payload::OperatorSolution(o) => o.to_json(),
        Payload::Pvms { pvms, outcomes } => pvms_to_json(pvms, outcomes),
        Payload::State(m) => m.to_json(),
    }
}
