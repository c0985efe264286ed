//! Message corpus files: one tab-separated record per line,
//! `message_id, sender, recipient, text, label`, no header.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FIELDS: [&str; 5] = ["message_id", "sender", "recipient", "text", "label"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub message_id: String,
    pub sender: String,
    pub recipient: String,
    pub text: String,
    /// `true` = bullying.
    pub label: bool,
}

pub fn load_messages(path: &Path) -> Result<Vec<MessageRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_messages(&text)
}

pub fn parse_messages(text: &str) -> Result<Vec<MessageRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() > FIELDS.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", FIELDS.len(), parts.len()),
            });
        }
        if let Some(missing) = FIELDS.get(parts.len()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("missing field '{missing}'"),
            });
        }
        if parts == FIELDS {
            return Err(Error::Parse {
                line: line_no,
                message: "header lines are not allowed".into(),
            });
        }
        for (name, value) in FIELDS.iter().zip(&parts).take(3) {
            if value.trim().is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("empty field '{name}'"),
                });
            }
        }
        let id = parts[0].to_owned();
        let label = match parts[4].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::InvalidRecord {
                    id,
                    message: format!("label must be 0 or 1, got '{other}'"),
                })
            }
        };
        if parts[1] == parts[2] {
            return Err(Error::InvalidRecord {
                id,
                message: "sender and recipient are the same node".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::InvalidRecord {
                id,
                message: format!("duplicate message_id (line {line_no})"),
            });
        }
        records.push(MessageRecord {
            message_id: id,
            sender: parts[1].to_owned(),
            recipient: parts[2].to_owned(),
            text: parts[3].to_owned(),
            label,
        });
    }
    Ok(records)
}

/// Serializes records in the corpus format. Tabs and line breaks inside
/// text are replaced by spaces.
pub fn format_messages(records: &[MessageRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let text: String = r
            .text
            .chars()
            .map(|c| {
                if matches!(c, '\t' | '\n' | '\r') {
                    ' '
                } else {
                    c
                }
            })
            .collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.message_id,
            r.sender,
            r.recipient,
            text,
            u8::from(r.label)
        );
    }
    out
}

pub fn write_messages(path: &Path, records: &[MessageRecord]) -> Result<()> {
    fs::write(path, format_messages(records)).map_err(|e| Error::io(path, e))
}
