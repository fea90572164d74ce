//! Loading corpora from disk.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use centering_core::Document;

use crate::conll::{parse_conll, ConllError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ConllError },
}

pub fn load_file(path: &Path) -> Result<Vec<Document>, LoadError> {
    let file = File::open(path).map_err(|source| LoadError::Open { path: path.to_owned(), source })?;
    parse_conll(BufReader::new(file)).map_err(|source| LoadError::Parse { path: path.to_owned(), source })
}

/// Every document of every file, sorted by `doc_id:part`. The sort is
/// stable, so repeated keys keep file order.
pub fn load_corpus(paths: &[PathBuf]) -> Result<Vec<Document>, LoadError> {
    let mut docs = Vec::new();
    for p in paths {
        let found = load_file(p)?;
        log::info!("{}: {} documents", p.display(), found.len());
        docs.extend(found);
    }
    docs.sort_by_key(Document::key);
    Ok(docs)
}
