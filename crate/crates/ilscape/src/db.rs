//! Descriptor databases: a directory of `.ild` files listed in a manifest.

use std::path::{Path, PathBuf};

use ilscape_core::analysis::{DbEntry, DescriptorDb};
use serde::{Deserialize, Serialize};

use crate::error::{read, write, Context, Error, Result};
use crate::ild::load_ild;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Relative to the manifest.
    pub path: PathBuf,
    /// Number of stored time-window descriptors (0 if none).
    pub segments: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, rename = "entry")]
    pub entries: Vec<ManifestEntry>,
}

/// Every `.ild` file directly inside `dir`, by file name. Ids are file stems.
pub fn scan(dir: &Path) -> Result<(Manifest, DescriptorDb)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "ild"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Invalid(format!("no .ild files in {}", dir.display())));
    }
    let mut manifest = Manifest::default();
    let mut entries = Vec::new();
    for f in files {
        let doc = load_ild(&f)?;
        let id = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        manifest.entries.push(ManifestEntry {
            id: id.clone(),
            label: doc.descriptor.meta.label.clone(),
            path: f.file_name().map(PathBuf::from).unwrap_or_default(),
            segments: doc.segments.as_ref().map_or(0, |s| s.n_seg),
        });
        entries.push(DbEntry {
            segments: doc.segments,
            ..DbEntry::new(id, doc.descriptor)
        });
    }
    let db = DescriptorDb::new(entries).context(|| format!("database {}", dir.display()))?;
    Ok((manifest, db))
}

pub fn manifest_string(m: &Manifest) -> String {
    toml::to_string(m).expect("manifest serializes")
}

pub fn save_manifest(path: &Path, m: &Manifest) -> Result<()> {
    write(path, manifest_string(m))
}

/// Loads the manifest and every descriptor it lists. Labels in the manifest
/// override those stored in the files.
pub fn load_db(manifest: &Path) -> Result<DescriptorDb> {
    let text = read(manifest)?;
    let m: Manifest = toml::from_str(&text).map_err(|e| {
        let at = e.span().map_or_else(|| "byte ?".to_string(), |s| format!("byte {}", s.start));
        Error::parse(manifest, at, e.message().trim().to_string())
    })?;
    let base = manifest.parent().unwrap_or(Path::new(""));
    let mut entries = Vec::with_capacity(m.entries.len());
    for e in m.entries {
        let doc = load_ild(&base.join(&e.path))?;
        let mut entry = DbEntry {
            segments: doc.segments,
            ..DbEntry::new(e.id, doc.descriptor)
        };
        if e.label.is_some() {
            entry.label = e.label;
        }
        entries.push(entry);
    }
    DescriptorDb::new(entries).context(|| format!("database {}", manifest.display()))
}
