//! The canonical chain-data file format: a versioned, self-describing
//! JSON document with integer coefficients as decimal strings.

use hfech_core::hf::HfData;
use serde::{Deserialize, Serialize};

pub const INPUT_FORMAT: &str = "hfech-input/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorEntry {
    pub name: String,
    pub grading: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermEntry {
    pub from: String,
    pub to: String,
    pub t_power: i64,
    /// Decimal string so arbitrary precision survives serialization.
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq, Eq)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InputDocument {
    pub format: String,
    pub p: u32,
    pub generators: Vec<GeneratorEntry>,
    pub differential: Vec<TermEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h1_actions: Vec<Vec<TermEntry>>,
    #[serde(default, skip_serializing_if = "is_default_metadata")]
    pub metadata: Metadata,
}

fn is_default_metadata(m: &Metadata) -> bool {
    m.description.is_none() && m.provenance.is_none()
}

#[derive(Debug)]
pub enum InputError {
    Io(std::io::Error),
    Parse(serde_json::Error),
    Format(String),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Io(e) => write!(f, "io error: {e}"),
            InputError::Parse(e) => {
                write!(
                    f,
                    "parse error at line {}, column {}: {e}",
                    e.line(),
                    e.column()
                )
            }
            InputError::Format(m) => write!(f, "invalid document: {m}"),
        }
    }
}

impl std::error::Error for InputError {}

impl InputDocument {
    pub fn load(path: &std::path::Path) -> Result<InputDocument, InputError> {
        let text = std::fs::read_to_string(path).map_err(InputError::Io)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<InputDocument, InputError> {
        let doc: InputDocument = serde_json::from_str(text).map_err(InputError::Parse)?;
        if doc.format != INPUT_FORMAT {
            return Err(InputError::Format(format!(
                "format is {:?}, expected {:?}",
                doc.format, INPUT_FORMAT
            )));
        }
        Ok(doc)
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Converts into the engine model, rejecting unknown names, negative
    /// translation powers, and oversized coefficients.
    pub fn to_hf(&self) -> Result<HfData, InputError> {
        let names: Vec<String> = self.generators.iter().map(|g| g.name.clone()).collect();
        let grading: Vec<i64> = self.generators.iter().map(|g| g.grading).collect();
        let mut hf =
            HfData::new(names, self.p, grading).map_err(|e| InputError::Format(e.to_string()))?;
        type Sink<'a> = &'a mut dyn FnMut(&str, &str, u32, i64) -> Result<(), String>;
        let add = |terms: &[TermEntry], sink: Sink| -> Result<(), InputError> {
            for t in terms {
                if t.t_power < 0 {
                    return Err(InputError::Format(format!(
                        "edge {} -> {} has negative t_power {}",
                        t.from, t.to, t.t_power
                    )));
                }
                let coeff: i64 = t.coeff.parse().map_err(|_| {
                    InputError::Format(format!(
                        "edge {} -> {}: coefficient {:?} is not a decimal integer in range",
                        t.from, t.to, t.coeff
                    ))
                })?;
                sink(&t.from, &t.to, t.t_power as u32, coeff).map_err(InputError::Format)?;
            }
            Ok(())
        };
        add(&self.differential, &mut |f, t, k, c| {
            hf.add_term(f, t, k, c).map_err(|e| e.to_string())
        })?;
        for (idx, action) in self.h1_actions.iter().enumerate() {
            let a = hf.add_h1_action();
            debug_assert_eq!(a, idx);
            add(action, &mut |f, t, k, c| {
                hf.add_h1_term(a, f, t, k, c).map_err(|e| e.to_string())
            })?;
        }
        Ok(hf)
    }

    /// The canonical document of an engine-side instance.
    pub fn from_hf(hf: &HfData, description: Option<&str>) -> InputDocument {
        let generators = hf
            .names()
            .iter()
            .zip(hf.grading())
            .map(|(n, g)| GeneratorEntry {
                name: n.clone(),
                grading: *g,
            })
            .collect();
        let term = |(from, to, k, c): (String, String, u32, num_bigint::BigInt)| TermEntry {
            from,
            to,
            t_power: k as i64,
            coeff: c.to_string(),
        };
        let differential = hf.diff_terms().into_iter().map(term).collect();
        let h1_actions = (0..hf.h1_count())
            .map(|a| hf.h1_terms(a).into_iter().map(term).collect())
            .collect();
        InputDocument {
            format: INPUT_FORMAT.to_string(),
            p: hf.p(),
            generators,
            differential,
            h1_actions,
            metadata: Metadata {
                description: description.map(|s| s.to_string()),
                provenance: None,
            },
        }
    }
}
