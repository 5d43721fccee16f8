//! Name corpora, token inventories and count features.
//!
//! Two CSV files describe a corpus:
//!
//! * corpus: `id,language,name,transcription,attack,defend,height,weight`,
//!   where `transcription` is a space-separated token string and an empty
//!   attribute cell means the value is missing;
//! * inventory: `language,token,is_tone` with `is_tone` in `{0,1}`. The row
//!   order within a language fixes the feature-vector layout.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CORPUS_HEADER: [&str; 8] = [
    "id",
    "language",
    "name",
    "transcription",
    "attack",
    "defend",
    "height",
    "weight",
];
pub const INVENTORY_HEADER: [&str; 3] = ["language", "token", "is_tone"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Csv {
        file: &'static str,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: bad header {found:?}, expected {expected:?}")]
    Header {
        file: &'static str,
        found: Vec<String>,
        expected: Vec<&'static str>,
    },
    #[error("{file} row {row}: {message}")]
    Row {
        file: &'static str,
        row: u64,
        message: String,
    },
    #[error("corpus row {row}: token {token:?} is not in the {language} inventory")]
    UnknownToken {
        row: u64,
        token: String,
        language: String,
    },
    #[error("corpus row {row}: duplicate id {id:?}")]
    DuplicateId { row: u64, id: String },
    #[error("inventory for {language}: {message}")]
    Inventory { language: String, message: String },
    #[error("entry {id:?} is {entry_language}, inventory is {inventory_language}")]
    LanguageMismatch {
        id: String,
        entry_language: String,
        inventory_language: String,
    },
    #[error("entry {id:?}: token {token:?} is not in the {language} inventory")]
    UnknownEntryToken {
        id: String,
        token: String,
        language: String,
    },
}

/// One of the four continuous attributes carried by each name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variable {
    #[serde(alias = "attack")]
    Attack,
    #[serde(alias = "defend")]
    Defend,
    #[serde(alias = "height")]
    Height,
    #[serde(alias = "weight")]
    Weight,
}

impl Variable {
    pub const ALL: [Variable; 4] = [
        Variable::Attack,
        Variable::Defend,
        Variable::Height,
        Variable::Weight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variable::Attack => "Attack",
            Variable::Defend => "Defend",
            Variable::Height => "Height",
            Variable::Weight => "Weight",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variable::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown variable {s:?}"))
    }
}

/// Ordered token set of one language. Token order defines feature order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenInventory {
    language: String,
    tokens: Vec<String>,
    is_tone: Vec<bool>,
    index: HashMap<String, usize>,
}

impl TokenInventory {
    pub fn new(
        language: impl Into<String>,
        tokens: impl IntoIterator<Item = (String, bool)>,
    ) -> Result<Self, CorpusError> {
        let language = language.into();
        let mut inv = TokenInventory {
            language,
            tokens: Vec::new(),
            is_tone: Vec::new(),
            index: HashMap::new(),
        };
        for (token, tone) in tokens {
            inv.push(token, tone)?;
        }
        inv.check_segments()?;
        Ok(inv)
    }

    fn push(&mut self, token: String, tone: bool) -> Result<(), CorpusError> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(CorpusError::Inventory {
                language: self.language.clone(),
                message: format!("invalid token {token:?}"),
            });
        }
        if self.index.contains_key(&token) {
            return Err(CorpusError::Inventory {
                language: self.language.clone(),
                message: format!("duplicate token {token:?}"),
            });
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.is_tone.push(tone);
        Ok(())
    }

    fn check_segments(&self) -> Result<(), CorpusError> {
        if self.is_tone.iter().all(|&t| t) {
            return Err(CorpusError::Inventory {
                language: self.language.clone(),
                message: "needs at least one non-tone token".into(),
            });
        }
        Ok(())
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn is_tone(&self, index: usize) -> bool {
        self.is_tone[index]
    }
}

/// One named sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NameEntry {
    pub id: String,
    pub language: String,
    pub name: String,
    pub transcription: Vec<String>,
    /// Present attributes only; a missing cell has no key.
    pub attributes: BTreeMap<Variable, f64>,
}

impl NameEntry {
    pub fn attribute(&self, variable: Variable) -> Option<f64> {
        self.attributes.get(&variable).copied()
    }
}

/// Per-token occurrence counts, aligned to a [`TokenInventory`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector {
    pub counts: Vec<u32>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

/// A validated corpus together with the inventories of its languages.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub entries: Vec<NameEntry>,
    pub inventories: BTreeMap<String, TokenInventory>,
}

impl Corpus {
    pub fn inventory(&self, language: &str) -> Option<&TokenInventory> {
        self.inventories.get(language)
    }

    pub fn entries_for<'a>(&'a self, language: &'a str) -> impl Iterator<Item = &'a NameEntry> {
        self.entries.iter().filter(move |e| e.language == language)
    }

    /// Entry counts per language, including inventory languages with no entries.
    pub fn counts_by_language(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> =
            self.inventories.keys().map(|l| (l.clone(), 0)).collect();
        for e in &self.entries {
            *counts.entry(e.language.clone()).or_default() += 1;
        }
        counts
    }
}

fn open(path: &Path) -> Result<File, CorpusError> {
    File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_corpus(corpus_path: &Path, inventory_path: &Path) -> Result<Corpus, CorpusError> {
    let inventories = read_inventories(open(inventory_path)?)?;
    let entries = read_entries(open(corpus_path)?, &inventories)?;
    Ok(Corpus {
        entries,
        inventories,
    })
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader)
}

fn check_header<R: Read>(
    rdr: &mut csv::Reader<R>,
    file: &'static str,
    expected: &[&'static str],
) -> Result<(), CorpusError> {
    let found = rdr
        .headers()
        .map_err(|source| CorpusError::Csv { file, source })?;
    if found.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(CorpusError::Header {
            file,
            found: found.iter().map(String::from).collect(),
            expected: expected.to_vec(),
        });
    }
    Ok(())
}

fn row_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn read_inventories<R: Read>(
    reader: R,
) -> Result<BTreeMap<String, TokenInventory>, CorpusError> {
    const FILE: &str = "inventory";
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, FILE, &INVENTORY_HEADER)?;

    let mut grouped: BTreeMap<String, TokenInventory> = BTreeMap::new();
    for result in rdr.records() {
        let record = result.map_err(|source| CorpusError::Csv { file: FILE, source })?;
        let row = row_of(&record);
        let bad = |message: String| CorpusError::Row {
            file: FILE,
            row,
            message,
        };
        if record.len() != INVENTORY_HEADER.len() {
            return Err(bad(format!(
                "expected {} columns, found {}",
                INVENTORY_HEADER.len(),
                record.len()
            )));
        }
        let language = record[0].trim();
        let token = record[1].trim();
        if language.is_empty() {
            return Err(bad("empty language".into()));
        }
        let tone = match record[2].trim() {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("is_tone must be 0 or 1, found {other:?}"))),
        };
        let inv = grouped
            .entry(language.to_string())
            .or_insert_with(|| TokenInventory {
                language: language.to_string(),
                tokens: Vec::new(),
                is_tone: Vec::new(),
                index: HashMap::new(),
            });
        inv.push(token.to_string(), tone)
            .map_err(|e| bad(e.to_string()))?;
    }
    for inv in grouped.values() {
        inv.check_segments()?;
    }
    Ok(grouped)
}

pub fn read_entries<R: Read>(
    reader: R,
    inventories: &BTreeMap<String, TokenInventory>,
) -> Result<Vec<NameEntry>, CorpusError> {
    const FILE: &str = "corpus";
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, FILE, &CORPUS_HEADER)?;

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|source| CorpusError::Csv { file: FILE, source })?;
        let row = row_of(&record);
        let bad = |message: String| CorpusError::Row {
            file: FILE,
            row,
            message,
        };
        if record.len() != CORPUS_HEADER.len() {
            return Err(bad(format!(
                "expected {} columns, found {}",
                CORPUS_HEADER.len(),
                record.len()
            )));
        }
        let id = record[0].trim().to_string();
        if id.is_empty() {
            return Err(bad("empty id".into()));
        }
        let language = record[1].trim().to_string();
        let inventory = inventories
            .get(&language)
            .ok_or_else(|| bad(format!("no inventory for language {language:?}")))?;
        let transcription: Vec<String> = record[3].split_whitespace().map(String::from).collect();
        if transcription.is_empty() {
            return Err(bad("empty transcription".into()));
        }
        if let Some(token) = transcription
            .iter()
            .find(|t| inventory.index_of(t).is_none())
        {
            return Err(CorpusError::UnknownToken {
                row,
                token: token.clone(),
                language,
            });
        }

        let mut attributes = BTreeMap::new();
        for (variable, cell) in Variable::ALL.into_iter().zip(record.iter().skip(4)) {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell
                .parse()
                .map_err(|_| bad(format!("{variable} is not a number: {cell:?}")))?;
            if !value.is_finite() || value < 0.0 {
                return Err(bad(format!(
                    "{variable} must be finite and non-negative, found {cell}"
                )));
            }
            attributes.insert(variable, value);
        }

        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { row, id });
        }
        entries.push(NameEntry {
            id,
            language,
            name: record[2].to_string(),
            transcription,
            attributes,
        });
    }
    Ok(entries)
}

fn check_language(entry: &NameEntry, inventory: &TokenInventory) -> Result<(), CorpusError> {
    if entry.language != inventory.language {
        return Err(CorpusError::LanguageMismatch {
            id: entry.id.clone(),
            entry_language: entry.language.clone(),
            inventory_language: inventory.language.clone(),
        });
    }
    Ok(())
}

fn token_indices<'a>(
    entry: &'a NameEntry,
    inventory: &'a TokenInventory,
) -> impl Iterator<Item = Result<usize, CorpusError>> + 'a {
    entry.transcription.iter().map(move |t| {
        inventory
            .index_of(t)
            .ok_or_else(|| CorpusError::UnknownEntryToken {
                id: entry.id.clone(),
                token: t.clone(),
                language: inventory.language.clone(),
            })
    })
}

/// Occurrence count of every inventory token in the entry's transcription.
pub fn featurize(
    entry: &NameEntry,
    inventory: &TokenInventory,
) -> Result<FeatureVector, CorpusError> {
    check_language(entry, inventory)?;
    let mut counts = vec![0u32; inventory.len()];
    for idx in token_indices(entry, inventory) {
        counts[idx?] += 1;
    }
    Ok(FeatureVector { counts })
}

/// Number of transcription tokens that are not tones.
pub fn name_length(entry: &NameEntry, inventory: &TokenInventory) -> Result<usize, CorpusError> {
    check_language(entry, inventory)?;
    let mut n = 0;
    for idx in token_indices(entry, inventory) {
        if !inventory.is_tone(idx?) {
            n += 1;
        }
    }
    Ok(n)
}
