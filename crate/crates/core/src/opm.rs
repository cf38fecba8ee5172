//! Symbolic orthogonal product matrices (OPMs).
//!
//! An OPM is a tabular shorthand for an orthogonal product basis (OPB): each
//! row is a product state, each column a party. Entries are the computational
//! kets `0` and `1`, vector variables such as `b`/`b'` standing for an
//! arbitrary qubit orthonormal basis, or the star `*`, which abbreviates a
//! fresh 2×1 variable column: one display row with a star stands for two rows
//! holding a fresh basis pair. A display matrix with `r` rows and `s` stars
//! therefore describes an OPB of `r + s` product states.
//!
//! The module also carries the built-in catalog of all two-, three- and
//! four-qubit OPB families, keyed `M2`, `M31`–`M33` and `M41`–`M433`; every
//! multiqubit OPB on up to four qubits is equivalent to exactly one of these
//! up to party permutations and local unitaries.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from parsing, validating, or expanding OPMs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpmError {
    #[error("empty OPM text")]
    EmptyInput,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} contains more than one star")]
    MultipleStars { row: usize },
    #[error("invalid token {token:?}")]
    InvalidToken { token: String },
    #[error("an OPM needs at least 2 parties, got {found}")]
    TooFewParties { found: usize },
    #[error("expansion produced {found} rows, expected 2^{parties} = {expected}")]
    ExpansionMismatch {
        parties: usize,
        expected: usize,
        found: usize,
    },
    #[error("star entry left in expanded OPM at row {row}")]
    ResidualStar { row: usize },
    #[error("malformed OPM JSON: {0}")]
    Json(String),
}

/// One cell of an OPM.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpmEntry {
    /// Computational |0⟩.
    Zero,
    /// Computational |1⟩.
    One,
    /// One member of a named qubit basis pair; `primed` selects the
    /// orthogonal partner.
    Var { family: String, primed: bool },
    /// Shorthand for a fresh 2×1 variable column.
    Star,
}

impl OpmEntry {
    pub fn var(family: &str, primed: bool) -> Self {
        OpmEntry::Var {
            family: family.to_owned(),
            primed,
        }
    }

    fn parse_token(token: &str) -> Result<Self, OpmError> {
        match token {
            "0" => return Ok(OpmEntry::Zero),
            "1" => return Ok(OpmEntry::One),
            "*" => return Ok(OpmEntry::Star),
            _ => {}
        }
        let (name, primed) = match token.strip_suffix('\'') {
            Some(base) => (base, true),
            None => (token, false),
        };
        let mut chars = name.chars();
        let valid = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric()),
            _ => false,
        };
        if !valid {
            return Err(OpmError::InvalidToken {
                token: token.to_owned(),
            });
        }
        Ok(OpmEntry::var(name, primed))
    }
}

impl fmt::Display for OpmEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpmEntry::Zero => write!(f, "0"),
            OpmEntry::One => write!(f, "1"),
            OpmEntry::Var { family, primed } => {
                write!(f, "{family}{}", if *primed { "'" } else { "" })
            }
            OpmEntry::Star => write!(f, "*"),
        }
    }
}

/// One display row of an OPM, one entry per party.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpmRow {
    pub entries: Vec<OpmEntry>,
}

impl OpmRow {
    pub fn star_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, OpmEntry::Star))
            .count()
    }
}

/// A named symbolic OPM in display (unexpanded) form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Opm {
    pub name: String,
    pub parties: usize,
    pub rows: Vec<OpmRow>,
}

/// An OPM with all stars expanded into fresh variable pairs; describes
/// exactly `2^parties` product states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedOpm {
    pub name: String,
    pub parties: usize,
    pub rows: Vec<OpmRow>,
    /// Families auto-generated during expansion, in row order.
    pub fresh_families: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct OpmJson {
    name: String,
    parties: usize,
    rows: Vec<Vec<String>>,
}

impl Opm {
    /// Validate row widths and the one-star-per-row rule.
    pub fn new(name: &str, rows: Vec<OpmRow>) -> Result<Self, OpmError> {
        if rows.is_empty() {
            return Err(OpmError::EmptyInput);
        }
        let parties = rows[0].entries.len();
        if parties < 2 {
            return Err(OpmError::TooFewParties { found: parties });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.entries.len() != parties {
                return Err(OpmError::RaggedRow {
                    row: i,
                    expected: parties,
                    found: row.entries.len(),
                });
            }
            if row.star_count() > 1 {
                return Err(OpmError::MultipleStars { row: i });
            }
        }
        Ok(Opm {
            name: name.to_owned(),
            parties,
            rows,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_owned();
        self
    }

    /// Family names appearing explicitly in the display matrix, in first
    /// appearance order (row-major).
    pub fn families(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for row in &self.rows {
            for entry in &row.entries {
                if let OpmEntry::Var { family, .. } = entry {
                    if seen.insert(family.clone()) {
                        out.push(family.clone());
                    }
                }
            }
        }
        out
    }

    /// Number of product states this OPM describes once stars are expanded.
    pub fn expanded_len(&self) -> usize {
        self.rows.len() + self.rows.iter().map(OpmRow::star_count).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        let j = OpmJson {
            name: self.name.clone(),
            parties: self.parties,
            rows: self
                .rows
                .iter()
                .map(|r| r.entries.iter().map(|e| e.to_string()).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("OPM JSON serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, OpmError> {
        let j: OpmJson = serde_json::from_str(text).map_err(|e| OpmError::Json(e.to_string()))?;
        let mut rows = Vec::with_capacity(j.rows.len());
        for tokens in &j.rows {
            let entries = tokens
                .iter()
                .map(|t| OpmEntry::parse_token(t))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(OpmRow { entries });
        }
        let opm = Opm::new(&j.name, rows)?;
        if opm.parties != j.parties {
            return Err(OpmError::Json(format!(
                "declared {} parties but rows have {}",
                j.parties, opm.parties
            )));
        }
        Ok(opm)
    }
}

/// Parse the plain text OPM format: one row per line, whitespace-separated
/// tokens from `0`, `1`, `<name>`, `<name>'`, `*`. Blank lines are ignored.
pub fn parse_opm(text: &str) -> Result<Opm, OpmError> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let entries = tokens
            .iter()
            .map(|t| OpmEntry::parse_token(t))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(OpmRow { entries });
    }
    Opm::new("", rows)
}

/// Render to the text format accepted by [`parse_opm`]; the parse/render pair
/// round-trips on structure.
pub fn render_opm(opm: &Opm) -> String {
    opm.rows
        .iter()
        .map(|row| {
            row.entries
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Expand every star into a fresh basis pair.
///
/// A row with a star becomes two rows, first the unprimed then the primed
/// fresh variable, all other entries copied; rows without stars are copied
/// through. Fresh families are named `s1`, `s2`, ... in row order, skipping
/// any name already used by the display matrix. The result must have exactly
/// `2^parties` rows — anything else signals a malformed OPM.
pub fn expand_stars(opm: &Opm) -> Result<ExpandedOpm, OpmError> {
    let taken: BTreeSet<String> = opm.families().into_iter().collect();
    let mut next_id = 1usize;
    let mut fresh = Vec::new();
    let mut rows = Vec::new();
    for (i, row) in opm.rows.iter().enumerate() {
        if row.star_count() > 1 {
            return Err(OpmError::MultipleStars { row: i });
        }
        match row
            .entries
            .iter()
            .position(|e| matches!(e, OpmEntry::Star))
        {
            None => rows.push(row.clone()),
            Some(col) => {
                let mut name = format!("s{next_id}");
                while taken.contains(&name) {
                    next_id += 1;
                    name = format!("s{next_id}");
                }
                next_id += 1;
                for primed in [false, true] {
                    let mut entries = row.entries.clone();
                    entries[col] = OpmEntry::var(&name, primed);
                    rows.push(OpmRow { entries });
                }
                fresh.push(name);
            }
        }
    }
    let expected = 1usize << opm.parties;
    if rows.len() != expected {
        return Err(OpmError::ExpansionMismatch {
            parties: opm.parties,
            expected,
            found: rows.len(),
        });
    }
    Ok(ExpandedOpm {
        name: opm.name.clone(),
        parties: opm.parties,
        rows,
        fresh_families: fresh,
    })
}

impl ExpandedOpm {
    /// All family names (display plus fresh), first appearance order.
    pub fn families(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for row in &self.rows {
            for entry in &row.entries {
                if let OpmEntry::Var { family, .. } = entry {
                    if seen.insert(family.clone()) {
                        out.push(family.clone());
                    }
                }
            }
        }
        out
    }
}

/// Display matrices for the whole catalog, verbatim in the text format.
const CATALOG_TEXT: &[(&str, &str)] = &[
    ("M2", "0 *\n1 *"),
    ("M31", "0 0 0\n* 1 0\n0 * 1\n1 0 *\n1 1 1"),
    ("M32", "0 0 *\n0 1 *\n1 e *\n1 e' *"),
    ("M33", "0 0 *\n0 1 *\n1 * e\n1 * e'"),
    (
        "M41",
        "0 0 0 *\n0 0 1 *\n0 1 c *\n0 1 c' *\n1 b x *\n1 b x' *\n1 b' y *\n1 b' y' *",
    ),
    (
        "M42",
        "0 0 * 0\n0 0 * 1\n0 1 0 *\n0 1 1 *\n1 b c *\n1 b c' *\n1 b' x *\n1 b' x' *",
    ),
    (
        "M43",
        "0 0 0 *\n0 0 1 *\n0 1 * 0\n0 1 * 1\n1 b * d\n1 b * d'\n1 b' c *\n1 b' c' *",
    ),
    (
        "M44",
        "0 0 0 *\n0 0 1 *\n0 1 c *\n0 1 c' *\n1 b * 0\n1 b * 1\n1 b' * d\n1 b' * d'",
    ),
    (
        "M45",
        "0 0 * 0\n0 0 * 1\n0 1 c *\n0 1 c' *\n1 b 0 *\n1 b' 0 *\n1 x 1 *\n1 x' 1 *",
    ),
    (
        "M46",
        "0 0 * 0\n0 0 * 1\n0 1 * d\n0 1 * d'\n1 b 0 *\n1 b' 0 *\n1 x 1 *\n1 x' 1 *",
    ),
    (
        "M47",
        "0 0 c *\n0 0 c' *\n0 1 x *\n0 1 x' *\n1 b 0 0\n1 * 1 0\n1 b * 1\n1 b' 0 *\n1 b' 1 1",
    ),
    (
        "M48",
        "0 0 * d\n0 0 * d'\n0 1 c *\n0 1 c' *\n1 * 1 0\n1 b 0 0\n1 b * 1\n1 b' 0 *\n1 b' 1 1",
    ),
    (
        "M49",
        "0 0 0 *\n0 b 1 *\n0 b' 1 *\n1 0 c *\n1 0 c' *\n1 1 1 *\na 1 0 *\na' 1 0 *",
    ),
    (
        "M410",
        "0 0 0 *\n0 b 1 *\n0 b' 1 *\n1 0 * 0\n1 0 * 1\n1 1 1 *\na 1 0 *\na' 1 0 *",
    ),
    (
        "M411",
        "0 0 0 *\n0 * 1 0\n0 * 1 1\n1 0 * d\n1 0 * d'\n1 1 1 *\na 1 0 *\na' 1 0 *",
    ),
    (
        "M412",
        "0 0 0 *\n0 * 1 0\n0 * 1 1\n1 0 * d\n1 0 * d'\n1 1 1 *\n* 1 0 x\n* 1 0 x'",
    ),
    (
        "M413",
        "0 0 0 *\n0 1 0 1\n0 b 1 *\n0 b' 1 *\n1 1 1 0\n1 1 * 1\n1 0 c *\n1 0 c' *\n* 1 0 0",
    ),
    (
        "M414",
        "0 0 0 *\n0 1 0 1\n0 b 1 *\n0 b' 1 *\n1 1 1 0\n1 1 * 1\n1 0 * d\n1 0 * d'\n* 1 0 0",
    ),
    (
        "M415",
        "0 0 0 *\n0 1 0 1\n0 * 1 d\n0 * 1 d'\n1 1 1 0\n1 1 * 1\n1 0 c *\n1 0 c' *\n* 1 0 0",
    ),
    (
        "M416",
        "0 0 0 *\n0 1 0 1\n0 * 1 d\n0 * 1 d'\n1 1 1 0\n1 1 * 1\n1 0 * x\n1 0 * x'\n* 1 0 0",
    ),
    (
        "M417",
        "0 0 0 0\n0 * 0 1\n0 b 1 *\n0 b' 1 *\n1 1 1 0\n1 1 * 1\n1 0 c *\n1 0 c' *\n* 1 0 0",
    ),
    (
        "M418",
        "0 0 0 0\n0 0 * 1\n0 1 * d\n0 1 * d'\n1 1 1 0\n1 * 1 1\n1 b 0 *\n1 b' 0 *\n* 0 1 0",
    ),
    (
        "M419",
        "0 0 0 0\n0 * 0 1\n0 * 1 d\n0 * 1 d'\n1 1 1 0\n1 1 * 1\n1 0 * x\n1 0 * x'\n* 1 0 0",
    ),
    (
        "M420",
        "0 0 0 0\n0 0 1 *\n0 1 c *\n0 1 c' *\n1 1 1 0\n1 1 0 *\n1 0 * 0\n1 * 1 1\n* 0 0 1",
    ),
    (
        "M421",
        "0 0 0 0\n0 0 1 *\n0 1 * d\n0 1 * d'\n1 1 1 0\n1 1 0 *\n1 0 * 0\n1 * 1 1\n* 0 0 1",
    ),
    (
        "M422",
        "0 0 0 0\n0 1 0 d\n0 * 1 d\n0 1 * d'\n0 0 1 d'\n1 1 c *\n1 1 c' *\n1 0 1 1\n1 0 * 0\n* 0 0 1",
    ),
    (
        "M423",
        "0 0 0 0\n0 1 0 d\n0 * 1 d\n0 1 * d'\n0 0 1 d'\n1 1 * x\n1 1 * x'\n1 0 1 1\n1 0 * 0\n* 0 0 1",
    ),
    (
        "M424",
        "0 0 0 0\n0 b 0 1\n0 b 1 *\n0 b' 1 0\n0 b' * 1\n1 1 0 1\n1 1 1 *\n1 0 d *\n1 0 d' *\n* 1 0 0",
    ),
    (
        "M425",
        "0 0 0 0\n0 b 0 1\n0 b 1 *\n0 b' 1 0\n0 b' * 1\n1 1 0 1\n1 1 1 *\n1 0 * d\n1 0 * d'\n* 1 0 0",
    ),
    (
        "M426",
        "0 0 0 0\n0 1 1 1\n0 * 1 0\n0 0 * 1\n1 1 1 d\n1 0 0 d'\n1 * 1 d'\n1 0 * d\na 1 0 *\na' 1 0 *",
    ),
    (
        "M427",
        "0 0 0 0\n0 1 1 1\n0 * 1 0\n0 0 * 1\n1 1 1 d\n1 0 0 d'\n1 * 1 d'\n1 0 * d\n* 1 0 x\n* 1 0 x'",
    ),
    (
        "M428",
        "0 0 0 0\n0 * 1 0\n0 0 * 1\n0 1 0 *\n0 1 1 1\n1 b c d\n1 * c' d\n1 b * d'\n1 b' c *\n1 b' c' d'",
    ),
    (
        "M429",
        "0 * 1 0\n0 0 * 1\n0 1 0 *\n1 * 0 1\n1 1 * 0\n1 0 1 *\n* 0 0 0\n* 1 1 1",
    ),
    (
        "M430",
        "0 0 0 0\n0 * 1 0\n0 0 * 1\n0 1 0 *\n1 1 1 0\n1 0 1 d\n1 * 0 d\n1 0 * d'\n1 1 0 d'\n* 1 1 1",
    ),
    (
        "M431",
        "0 0 0 0\n0 1 0 d\n0 * 1 d\n0 1 * d'\n0 0 1 d'\n1 0 1 1\n1 0 c 0\n1 1 c *\n1 * c' 0\n1 1 c' 1\n* 0 0 1",
    ),
    (
        "M432",
        "0 0 0 0\n0 1 1 d\n0 0 * 1\n0 1 * d'\n1 1 1 0\n1 0 0 d\n1 * 0 d'\n1 * 1 1\n* 0 1 0\n* 1 0 d",
    ),
    (
        "M433",
        "0 0 0 0\n0 0 c 1\n0 1 0 d\n0 * 1 0\n0 1 1 1\n1 0 c' 0\n1 0 c d'\n1 1 c' d\n1 * c d\n1 1 1 d'\n* 0 c' 1\n* 1 0 d'",
    ),
];

/// The full built-in catalog: `M2`, `M31`–`M33`, `M41`–`M433` (37 entries).
pub fn catalog() -> &'static [Opm] {
    static CATALOG: OnceLock<Vec<Opm>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        CATALOG_TEXT
            .iter()
            .map(|(name, text)| {
                parse_opm(text)
                    .unwrap_or_else(|e| panic!("catalog entry {name}: {e}"))
                    .with_name(name)
            })
            .collect()
    })
}

/// Look up a catalog entry by name.
pub fn catalog_entry(name: &str) -> Option<&'static Opm> {
    catalog().iter().find(|o| o.name == name)
}
