//! Text formats shared by the command line and the C interface. Words use
//! 1-based letters; degree vectors are plain integers.

use std::path::Path;

use thiserror::Error;

use crate::dynkin::{finite_cartan, parse_type, builtin, CartanData, FiniteTypeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse {what} from {input:?}")]
    Syntax { what: &'static str, input: String },
    #[error("letter {letter} out of range 1..={rank}")]
    LetterOutOfRange { letter: usize, rank: usize },
    #[error("{0}")]
    Cartan(#[from] FiniteTypeError),
    #[error("cannot read {path}: {reason}")]
    File { path: String, reason: String },
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .map(str::trim)
        .filter(|t| !t.is_empty())
}

/// Parses `"1,2,1"` into 0-based letters, checking them against `rank`.
pub fn parse_word(s: &str, rank: usize) -> Result<Vec<usize>, ParseError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    split_list(s)
        .map(|t| {
            let letter: usize = t.parse().map_err(|_| ParseError::Syntax {
                what: "word",
                input: s.to_string(),
            })?;
            if letter == 0 || letter > rank {
                return Err(ParseError::LetterOutOfRange { letter, rank });
            }
            Ok(letter - 1)
        })
        .collect()
}

pub fn format_word(word: &[usize]) -> String {
    word.iter().map(|l| (l + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn word_to_json(word: &[usize]) -> Vec<usize> {
    word.iter().map(|l| l + 1).collect()
}

pub fn parse_degrees(s: &str) -> Result<Vec<i64>, ParseError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    split_list(s)
        .map(|t| {
            t.parse().map_err(|_| ParseError::Syntax {
                what: "degrees",
                input: s.to_string(),
            })
        })
        .collect()
}

/// Parses a Cartan matrix given as JSON `[[2,-1],[-1,2]]` or as rows
/// separated by `;` or newlines.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>, ParseError> {
    if let Ok(m) = serde_json::from_str::<Vec<Vec<i64>>>(s) {
        return Ok(m);
    }
    s.split([';', '\n'])
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(parse_degrees)
        .collect()
}

pub fn cartan_from_type(s: &str) -> Result<CartanData, ParseError> {
    let (label, rank) = parse_type(s).map_err(FiniteTypeError::from)?;
    Ok(builtin(label, rank).map_err(FiniteTypeError::from)?)
}

/// Reads a matrix file and checks it is of finite type.
pub fn cartan_from_file(path: &Path) -> Result<CartanData, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let m = parse_matrix(&text)?;
    Ok(finite_cartan(m)?.0)
}
