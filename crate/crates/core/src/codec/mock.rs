use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use super::{ImageRaster, SemanticCodec, TextKnowledge};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FixtureEntry {
    pub name: String,
    pub image_path: PathBuf,
    pub caption: String,
    pub hash: String,
    pub image: ImageRaster,
}

/// Fixture-backed codec. Encoding looks the image up by content hash;
/// decoding returns the corpus image whose caption has the highest token F1
/// against the received text, ties going to the smallest entry name.
#[derive(Debug, Clone)]
pub struct MockCodec {
    // sorted by name
    entries: Vec<FixtureEntry>,
    by_hash: HashMap<String, usize>,
}

impl MockCodec {
    /// Loads every `<name>.png` with a sibling `<name>.txt` caption.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let listing = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut pngs = BTreeMap::new();
        for item in listing {
            let path = item.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("png") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    pngs.insert(stem.to_string(), path);
                }
            }
        }
        let mut entries = Vec::with_capacity(pngs.len());
        for (name, image_path) in pngs {
            let txt = image_path.with_extension("txt");
            let raw = std::fs::read_to_string(&txt).map_err(|e| Error::io(&txt, e))?;
            let caption = raw.strip_suffix('\n').unwrap_or(&raw);
            let caption = caption.strip_suffix('\r').unwrap_or(caption).to_string();
            let image = ImageRaster::load_png(&image_path)?;
            entries.push(FixtureEntry {
                name,
                image_path,
                caption,
                hash: image.content_hash(),
                image,
            });
        }
        MockCodec::from_entries(entries)
    }

    pub fn from_entries(mut entries: Vec<FixtureEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("fixture corpus is empty".into()));
        }
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        let mut by_hash = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.caption.trim().is_empty() {
                return Err(Error::InvalidInput(format!(
                    "fixture `{}` has an empty caption",
                    e.name
                )));
            }
            if by_hash.insert(e.hash.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!(
                    "fixture `{}` duplicates the image of another entry",
                    e.name
                )));
            }
        }
        Ok(MockCodec { entries, by_hash })
    }

    pub fn entries(&self) -> &[FixtureEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Option<&FixtureEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Index of the best-matching entry for `text`.
    pub fn best_match(&self, text: &str) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        // entries are name-sorted, so strict `>` keeps the smallest name on ties
        for (i, e) in self.entries.iter().enumerate() {
            let s = token_f1(text, &e.caption);
            if s > best_score {
                best = i;
                best_score = s;
            }
        }
        best
    }
}

fn tokens(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_lowercase).collect()
}

/// Token-level F1 between two strings after lowercasing and whitespace
/// tokenization, with multiset (clipped) overlap counts.
pub fn token_f1(a: &str, b: &str) -> f64 {
    let ta = tokens(a);
    let tb = tokens(b);
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &tb {
        *counts.entry(t).or_default() += 1;
    }
    let mut overlap = 0usize;
    for t in &ta {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    2.0 * overlap as f64 / (ta.len() + tb.len()) as f64
}

impl SemanticCodec for MockCodec {
    fn semantic_encode(&self, image: &ImageRaster, _prompt: Option<&str>) -> Result<TextKnowledge> {
        let hash = image.content_hash();
        let i = self.by_hash.get(&hash).ok_or(Error::UnknownFixture(hash))?;
        Ok(TextKnowledge::new(self.entries[*i].caption.clone()))
    }

    fn semantic_decode(&self, text: &TextKnowledge, _seed: u64) -> Result<ImageRaster> {
        if text.text.is_empty() {
            return Err(Error::InvalidInput("cannot decode empty text".into()));
        }
        Ok(self.entries[self.best_match(&text.text)].image.clone())
    }
}
