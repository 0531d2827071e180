//! Tokenizer for the `key=value` text literals used for sequences and signals.

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Field<'a> {
    pub key: &'a str,
    pub value: &'a str,
    /// Byte offset of the value inside the literal.
    pub position: usize,
}

/// Splits `a=(x y) b=[z] c=3` into fields. Bracketed values may contain spaces.
pub(crate) fn fields(text: &str) -> Result<Vec<Field<'_>>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let key_start = i;
        while i < bytes.len() && bytes[i] != b'=' && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() || bytes[i] != b'=' {
            return Err(Error::parse(key_start, "expected `key=value`"));
        }
        let key = &text[key_start..i];
        if key.is_empty() {
            return Err(Error::parse(key_start, "empty key"));
        }
        i += 1;
        let value_start = i;
        let close = match bytes.get(i) {
            Some(b'(') => Some(b')'),
            Some(b'[') => Some(b']'),
            _ => None,
        };
        match close {
            Some(c) => {
                while i < bytes.len() && bytes[i] != c {
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(Error::parse(value_start, "unterminated bracket"));
                }
                i += 1;
            }
            None => {
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
            }
        }
        if value_start == i {
            return Err(Error::parse(value_start, format!("missing value for `{key}`")));
        }
        if out.iter().any(|f: &Field| f.key == key) {
            return Err(Error::parse(key_start, format!("duplicate key `{key}`")));
        }
        out.push(Field {
            key,
            value: &text[value_start..i],
            position: value_start,
        });
    }
    Ok(out)
}

/// Strips one pair of the given brackets, returning the inner text and its offset.
pub(crate) fn unbracket<'a>(field: &Field<'a>, open: char, close: char) -> Result<(&'a str, usize)> {
    let v = field.value;
    if v.starts_with(open) && v.ends_with(close) && v.len() >= 2 {
        Ok((&v[1..v.len() - 1], field.position + 1))
    } else {
        Err(Error::parse(
            field.position,
            format!("`{}` must be written as {open}...{close}", field.key),
        ))
    }
}

/// Parses a vertex word. Tokens are separated by whitespace or commas and may
/// be labels or indices; a single token that is not a known label is read
/// character by character when every label of the graph is one character.
pub(crate) fn word(g: &DirectedGraph, text: &str, position: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut offset = 0;
    let single_char_labels = g.labels().iter().all(|l| l.chars().count() == 1);
    let tokens: Vec<(usize, &str)> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .map(|t| {
            let at = offset;
            offset += t.len() + 1;
            (at, t)
        })
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let lone = tokens.len() == 1;
    for (at, tok) in tokens {
        if let Some(v) = g.vertex_by_label(tok) {
            out.push(v);
        } else if let Ok(v) = tok.parse::<usize>() {
            g.check_vertex(v).map_err(|e| Error::parse(position + at, e.to_string()))?;
            out.push(v);
        } else if lone && single_char_labels {
            for (k, ch) in tok.char_indices() {
                let v = g
                    .vertex_by_label(&ch.to_string())
                    .ok_or_else(|| Error::parse(position + at + k, format!("unknown vertex `{ch}`")))?;
                out.push(v);
            }
        } else {
            return Err(Error::parse(position + at, format!("unknown vertex `{tok}`")));
        }
    }
    Ok(out)
}

pub(crate) fn format_word(g: &DirectedGraph, word: &[usize]) -> String {
    let labels: Vec<&str> = word.iter().map(|&v| g.label(v)).collect();
    if g.labels().iter().all(|l| l.chars().count() == 1) {
        labels.concat()
    } else {
        labels.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_fields() {
        let f = fields("left=(A B) core=[] shift=-2").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0].key, "left");
        assert_eq!(f[0].value, "(A B)");
        assert_eq!(f[0].position, 5);
        assert_eq!(f[1].value, "[]");
        assert_eq!(f[2].value, "-2");
    }

    #[test]
    fn reports_positions() {
        assert_eq!(
            fields("left=(AB").unwrap_err(),
            Error::parse(5, "unterminated bracket")
        );
        assert!(matches!(fields("left"), Err(Error::Parse { position: 0, .. })));
    }

    #[test]
    fn words_from_labels_and_indices() {
        let g = DirectedGraph::complete(3).unwrap();
        assert_eq!(word(&g, "ABC", 0).unwrap(), vec![0, 1, 2]);
        assert_eq!(word(&g, "A, C", 0).unwrap(), vec![0, 2]);
        assert_eq!(word(&g, "2 0", 0).unwrap(), vec![2, 0]);
        assert!(matches!(word(&g, "AXB", 10), Err(Error::Parse { position: 11, .. })));
        assert_eq!(format_word(&g, &[2, 1]), "CB");
    }
}
