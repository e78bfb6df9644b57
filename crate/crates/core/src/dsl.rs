//! JSON loop description format.
//!
//! ```json
//! {
//!   "angles": [0.0, 3.141592653589793, 6.283185307179586],
//!   "arcs": [
//!     { "id": "a1", "sector": 1, "samples": [1.0, 1.0] },
//!     { "id": "a2", "sector": 2, "samples": [1.0, 1.0] }
//!   ],
//!   "loops": [{ "name": "circle", "word": ["+a1", "+a2"] }]
//! }
//! ```
//!
//! A letter is an arc id prefixed by `+` (increasing angle) or `-`; a bare id
//! means `+`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::loop_geometry::{Arc, GeometryError, Grid, Letter, LoopWord, Sign};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{field}: {source}")]
    InvalidLoop {
        field: String,
        source: GeometryError,
    },
    #[error("unknown loop `{0}`")]
    UnknownLoop(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<serde_json::Error> for DslError {
    fn from(e: serde_json::Error) -> Self {
        // serde_json appends " at line L column C" to its own message
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        DslError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    angles: Vec<f64>,
    arcs: Vec<Arc>,
    #[serde(default)]
    loops: Vec<LoopEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopEntry {
    name: String,
    word: Vec<String>,
}

/// A validated grid with named loops, each checked to be a closed path on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub grid: Grid,
    pub loops: Vec<(String, LoopWord)>,
}

impl Model {
    pub fn new(grid: Grid, loops: Vec<(String, LoopWord)>) -> Result<Self, DslError> {
        for (i, (name, word)) in loops.iter().enumerate() {
            if loops[..i].iter().any(|(other, _)| other == name) {
                return Err(DslError::Field {
                    field: format!("loops[{i}].name"),
                    message: format!("duplicate loop name `{name}`"),
                });
            }
            word.check_on(&grid).map_err(|source| DslError::InvalidLoop {
                field: format!("loops[{i}] `{name}`"),
                source,
            })?;
        }
        Ok(Self { grid, loops })
    }

    pub fn loop_word(&self, name: &str) -> Result<&LoopWord, DslError> {
        self.loops
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| w)
            .ok_or_else(|| DslError::UnknownLoop(name.to_string()))
    }

    pub fn loop_names(&self) -> impl Iterator<Item = &str> {
        self.loops.iter().map(|(n, _)| n.as_str())
    }

    /// Pretty-printed JSON; arcs come out sorted by sector and level.
    pub fn to_json(&self) -> String {
        let doc = Document {
            angles: self.grid.angles().to_vec(),
            arcs: self.grid.arcs().cloned().collect(),
            loops: self
                .loops
                .iter()
                .map(|(name, word)| LoopEntry {
                    name: name.clone(),
                    word: word.letters().iter().map(Letter::to_string).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }
}

pub fn parse(text: &str) -> Result<Model, DslError> {
    let doc: Document = serde_json::from_str(text)?;
    let grid = Grid::new(doc.angles, doc.arcs)?;
    let mut loops = Vec::with_capacity(doc.loops.len());
    for (i, entry) in doc.loops.into_iter().enumerate() {
        let letters = entry
            .word
            .iter()
            .enumerate()
            .map(|(j, s)| {
                parse_letter(s).ok_or_else(|| DslError::Field {
                    field: format!("loops[{i}].word[{j}]"),
                    message: format!("bad letter {s:?}"),
                })
            })
            .collect::<Result<LoopWord, _>>()?;
        loops.push((entry.name, letters));
    }
    Model::new(grid, loops)
}

pub fn parse_letter(s: &str) -> Option<Letter> {
    let (sign, id) = match s.as_bytes().first()? {
        b'+' => (Sign::Plus, &s[1..]),
        b'-' => (Sign::Minus, &s[1..]),
        _ => (Sign::Plus, s),
    };
    if id.is_empty() || id.starts_with(['+', '-']) || id.chars().any(char::is_whitespace) {
        return None;
    }
    Some(Letter::new(id, sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"{
  "angles": [0.0, 3.141592653589793, 6.283185307179586],
  "arcs": [
    {"id": "a1", "sector": 1, "samples": [1.0, 1.0]},
    {"id": "a2", "sector": 2, "samples": [1.0, 1.0]}
  ],
  "loops": [
    {"name": "circle", "word": ["+a1", "a2"]},
    {"name": "back", "word": ["+a1", "-a1"]}
  ]
}"#;

    #[test]
    fn parses_circle() {
        let model = parse(CIRCLE).unwrap();
        assert_eq!(model.grid.sector_count(), 2);
        let w = model.loop_word("circle").unwrap();
        assert_eq!(w.to_string(), "[+a1 +a2]");
        assert_eq!(model.loop_names().collect::<Vec<_>>(), ["circle", "back"]);
        assert_eq!(
            model.loop_word("nope"),
            Err(DslError::UnknownLoop("nope".into()))
        );
    }

    #[test]
    fn round_trip() {
        let model = parse(CIRCLE).unwrap();
        let again = parse(&model.to_json()).unwrap();
        assert_eq!(model, again);
        assert_eq!(model.to_json(), again.to_json());
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "{\n  \"angles\": [0.0, 1.0,\n  \"arcs\": []\n}";
        match parse(text) {
            Err(DslError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let text = r#"{"angles": [0.0, 6.283185307179586],
            "arcs": [{"id": "a", "samples": [1.0, 1.0]}]}"#;
        let err = parse(text).unwrap_err();
        assert!(err.to_string().contains("sector"), "{err}");
        assert!(matches!(err, DslError::Syntax { line: 2, .. }));
    }

    #[test]
    fn unknown_field_rejected() {
        let text = r#"{"angles": [0.0, 6.283185307179586], "arcs": [], "extra": 1}"#;
        assert!(parse(text).unwrap_err().to_string().contains("extra"));
    }

    #[test]
    fn bad_letter_and_bad_loop() {
        let bad = CIRCLE.replace("\"a2\"]", "\"+\"]");
        let err = parse(&bad).unwrap_err();
        assert_eq!(
            err,
            DslError::Field {
                field: "loops[0].word[1]".into(),
                message: "bad letter \"+\"".into()
            }
        );
        let open = CIRCLE.replace("\"a2\"]", "\"-a2\"]");
        match parse(&open).unwrap_err() {
            DslError::InvalidLoop { field, source } => {
                assert_eq!(field, "loops[0] `circle`");
                assert!(matches!(source, GeometryError::NotConnectable { position: 1 }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn geometry_errors_pass_through() {
        let crossing = CIRCLE.replace("[1.0, 1.0]}\n", "[1.0, -1.0]}\n");
        assert!(matches!(
            parse(&crossing),
            Err(DslError::Geometry(GeometryError::NegativeRadius { .. }))
        ));
    }

    #[test]
    fn letters() {
        assert_eq!(parse_letter("+x"), Some(Letter::plus("x")));
        assert_eq!(parse_letter("-x"), Some(Letter::minus("x")));
        assert_eq!(parse_letter("x"), Some(Letter::plus("x")));
        assert_eq!(parse_letter(""), None);
        assert_eq!(parse_letter("--x"), None);
        assert_eq!(parse_letter("+a b"), None);
    }
}
