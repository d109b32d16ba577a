use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rolegauss::graph::load_edge_list;
use rolegauss::{Error, Graph};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads an input file, naming it in the error if it cannot be opened.
pub fn read_input(path: &Path) -> rolegauss::Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn open_input(path: &Path) -> rolegauss::Result<BufReader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Ok(BufReader::new(file))
}

/// Loads an edge list and returns it with the digest of its bytes.
pub fn load_graph(path: &Path) -> rolegauss::Result<(Graph, String)> {
    let bytes = read_input(path)?;
    let graph = load_edge_list(bytes.as_slice())?;
    Ok((graph, sha256_hex(&bytes)))
}

/// Renders `body` in memory, writes it beside `path` and renames it into
/// place, so a crash never leaves a half-written artifact under the final
/// name. Returns the digest of the bytes.
pub fn write_atomic<F>(path: &Path, body: F) -> rolegauss::Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> rolegauss::Result<()>,
{
    let mut buf = Vec::new();
    body(&mut buf)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, &buf)?;
    fs::rename(&tmp, path)?;
    Ok(sha256_hex(&buf))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> rolegauss::Result<String> {
    write_atomic(path, |buf| {
        serde_json::to_writer_pretty(&mut *buf, value).map_err(|e| Error::Input(e.to_string()))?;
        buf.push(b'\n');
        Ok(())
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> rolegauss::Result<T> {
    let bytes = read_input(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Parse { line: e.line(), msg: format!("{}: {e}", path.display()) })
}

pub fn pool(threads: usize) -> rolegauss::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(e.to_string()))
}

pub fn file_digest(path: &Path) -> rolegauss::Result<String> {
    Ok(sha256_hex(&read_input(path)?))
}
