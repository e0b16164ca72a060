//! Schema validation of raw model responses.
//!
//! A payload is accepted when it is (or contains, in the chat-completion
//! envelope case) a JSON object with a `captions` array. Entries that are
//! not non-empty strings are rejected individually; anything else yields a
//! failure record. Never panics: malformed payloads count against the
//! success rate instead.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Per-response accept/reject accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub accepted: Vec<String>,
    /// Entries present in the captions array but dropped by the schema
    /// filter (non-string or empty).
    pub rejected_entries: usize,
    /// Set when the payload as a whole could not be interpreted.
    pub failure: Option<String>,
}

impl ParseOutcome {
    fn failed(msg: impl Into<String>) -> ParseOutcome {
        ParseOutcome { accepted: Vec::new(), rejected_entries: 0, failure: Some(msg.into()) }
    }
}

/// Validates one raw response payload against the `{captions: [string]}`
/// schema. Chat-completion envelopes are unwrapped first: the function-call
/// arguments of the first tool call are parsed as the payload.
pub fn parse_response(raw: &str) -> ParseOutcome {
    let value: Value = match serde_json::from_str(raw) {
        Ok(v) => v,
        Err(e) => return ParseOutcome::failed(format!("invalid JSON: {e}")),
    };
    let payload = match unwrap_envelope(&value) {
        Ok(Some(inner)) => match serde_json::from_str::<Value>(&inner) {
            Ok(v) => v,
            Err(e) => return ParseOutcome::failed(format!("invalid function arguments: {e}")),
        },
        Ok(None) => value,
        Err(msg) => return ParseOutcome::failed(msg),
    };

    let Value::Object(object) = &payload else {
        return ParseOutcome::failed("payload is not a JSON object");
    };
    let Some(captions) = object.get("captions") else {
        return ParseOutcome::failed("payload has no captions field");
    };
    let Value::Array(entries) = captions else {
        return ParseOutcome::failed("captions field is not an array");
    };

    let mut accepted = Vec::new();
    let mut rejected_entries = 0;
    for entry in entries {
        match entry {
            Value::String(s) if !s.trim().is_empty() => accepted.push(s.clone()),
            _ => rejected_entries += 1,
        }
    }
    ParseOutcome { accepted, rejected_entries, failure: None }
}

/// Extracts the tool-call arguments string from a chat-completion envelope;
/// `Ok(None)` when the value is not an envelope at all.
fn unwrap_envelope(value: &Value) -> Result<Option<String>, String> {
    let Some(choices) = value.get("choices") else { return Ok(None) };
    let first = choices.get(0).ok_or_else(|| "envelope has no choices".to_string())?;
    let message = first.get("message").ok_or_else(|| "choice has no message".to_string())?;
    let arguments = message
        .get("tool_calls")
        .and_then(|t| t.get(0))
        .and_then(|c| c.get("function"))
        .and_then(|f| f.get("arguments"))
        .or_else(|| message.get("function_call").and_then(|f| f.get("arguments")))
        .ok_or_else(|| "message carries no function-call arguments".to_string())?;
    match arguments {
        Value::String(s) => Ok(Some(s.clone())),
        _ => Err("function-call arguments are not a string".to_string()),
    }
}
