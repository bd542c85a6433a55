//! File access. Writes go to a temporary file in the target directory and
//! are renamed into place, so a failed run never leaves a partial file.

use std::io::Write;
use std::path::Path;

use crate::error::Error;

pub fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn stage(path: &Path, contents: &[u8]) -> Result<tempfile::NamedTempFile, Error> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    Ok(tmp)
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    write_all_atomic(&[(path, contents)])
}

/// Stages every file before renaming any of them into place.
pub fn write_all_atomic(files: &[(&Path, &[u8])]) -> Result<(), Error> {
    let staged = files
        .iter()
        .map(|(p, c)| stage(p, c))
        .collect::<Result<Vec<_>, _>>()?;
    for (tmp, (path, _)) in staged.into_iter().zip(files) {
        tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    }
    Ok(())
}
