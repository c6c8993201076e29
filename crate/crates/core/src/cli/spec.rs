//! Space and element descriptors read from JSON files.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::orlicz::{OrliczFunction, Tolerance};
use crate::rearrange::{Element, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Function,
    Sequence,
}

/// An Orlicz-Lorentz space: `phi`, `w` and whether it lives on functions or
/// sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub phi: OrliczFunction,
    pub weight: Weight,
    pub setting: Setting,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerance>,
}

/// A descriptor that failed to load, with where it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path)?;
        // serde buffers tagged enums, so value errors inside them carry no position
        if self.line > 0 {
            write!(f, ":{}:{}", self.line, self.column)?;
        }
        if !self.field.is_empty() && self.field != "." {
            write!(f, ": field `{}`", self.field)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl SpaceSpec {
    /// `phi` with the tolerance override applied.
    pub fn phi(&self) -> Result<OrliczFunction, String> {
        match self.tolerances {
            Some(t) => self.phi.clone().with_tol(t).map_err(|e| e.to_string()),
            None => Ok(self.phi.clone()),
        }
    }

    /// Cross-field checks serde cannot express.
    pub fn validate(&self) -> Result<(), String> {
        let seq = self.weight.is_sequence();
        match (self.setting, seq) {
            (Setting::Sequence, false) => Err("setting `sequence` needs a sequence weight (seq_*)".into()),
            (Setting::Function, true) => Err("setting `function` needs a function weight (step or power)".into()),
            _ => self.phi().map(|_| ()),
        }
    }
}

/// Parses `text` as `T`, reporting line, column and field path on failure.
pub fn parse<T: DeserializeOwned>(path: &str, text: &str) -> Result<T, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        SpecError {
            path: path.to_string(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: strip_position(&inner.to_string()),
        }
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Reads and parses a descriptor file.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, SpecError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        path: name.clone(),
        line: 0,
        column: 0,
        field: String::new(),
        message: e.to_string(),
    })?;
    parse(&name, &text)
}

pub fn load_space(path: &Path) -> Result<SpaceSpec, SpecError> {
    let s: SpaceSpec = load(path)?;
    s.validate().map_err(|message| SpecError {
        path: path.display().to_string(),
        line: 0,
        column: 0,
        field: String::new(),
        message,
    })?;
    Ok(s)
}

pub fn load_element(path: &Path) -> Result<Element, SpecError> {
    load(path)
}
