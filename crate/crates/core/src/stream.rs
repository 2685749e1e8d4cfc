//! Text format for update streams.
//!
//! One event per line; `#` starts a comment; blank lines are ignored.
//!
//! ```text
//! node                 # next node id in arrival order
//! edge <u> <v> <param>
//! del <u> <v>
//! query
//! ```

use std::fmt;

use crate::error::ParseError;
use crate::graph::{EdgeParam, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateEvent {
    Node,
    Edge(NodeId, NodeId, EdgeParam),
    Del(NodeId, NodeId),
    Query,
}

impl UpdateEvent {
    /// Everything except queries counts as an update.
    pub fn is_update(&self) -> bool {
        !matches!(self, UpdateEvent::Query)
    }
}

impl fmt::Display for UpdateEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateEvent::Node => f.write_str("node"),
            UpdateEvent::Edge(u, v, p) => write!(f, "edge {u} {v} {}", p.value()),
            UpdateEvent::Del(u, v) => write!(f, "del {u} {v}"),
            UpdateEvent::Query => f.write_str("query"),
        }
    }
}

fn node_token(tok: &str, line: usize) -> Result<NodeId, ParseError> {
    tok.parse::<u32>().map(NodeId).map_err(|_| ParseError {
        line,
        reason: format!("`{tok}` is not a node id"),
    })
}

/// Parses one line; `Ok(None)` for blank and comment lines.
pub fn parse_line(text: &str, line: usize) -> Result<Option<UpdateEvent>, ParseError> {
    let body = text.split('#').next().unwrap_or("");
    let toks: Vec<&str> = body.split_whitespace().collect();
    let err = |reason: String| Err(ParseError { line, reason });
    let Some((&kind, args)) = toks.split_first() else {
        return Ok(None);
    };
    let event = match (kind, args) {
        ("node", []) => UpdateEvent::Node,
        ("node", _) => return err("`node` takes no arguments; ids are implicit".into()),
        ("query", []) => UpdateEvent::Query,
        ("edge", [u, v, p]) => {
            let value: f64 = p.parse().map_err(|_| ParseError {
                line,
                reason: format!("`{p}` is not a number"),
            })?;
            let param = EdgeParam::new(value).map_err(|e| ParseError {
                line,
                reason: e.to_string(),
            })?;
            UpdateEvent::Edge(node_token(u, line)?, node_token(v, line)?, param)
        }
        ("del", [u, v]) => UpdateEvent::Del(node_token(u, line)?, node_token(v, line)?),
        ("edge" | "del" | "query", _) => {
            return err(format!("wrong number of arguments for `{kind}`"))
        }
        _ => return err(format!("unknown event `{kind}`")),
    };
    Ok(Some(event))
}

/// Parses a whole stream; line numbers in errors are 1-based.
pub fn parse_stream(text: &str) -> Result<Vec<UpdateEvent>, ParseError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(e) = parse_line(line, i + 1)? {
            events.push(e);
        }
    }
    Ok(events)
}

/// Renders events one per line, parseable by [`parse_stream`].
pub fn render_stream(events: &[UpdateEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_grammar() {
        let s = "# header\nnode\nnode  \nedge 0 1 0.5 # trailing\n\ndel 0 1\nquery\n";
        let ev = parse_stream(s).unwrap();
        assert_eq!(
            ev,
            vec![
                UpdateEvent::Node,
                UpdateEvent::Node,
                UpdateEvent::Edge(NodeId(0), NodeId(1), EdgeParam::new(0.5).unwrap()),
                UpdateEvent::Del(NodeId(0), NodeId(1)),
                UpdateEvent::Query,
            ]
        );
        assert!(parse_stream("").unwrap().is_empty());
    }

    #[test]
    fn reports_line_numbers() {
        let cases = [
            ("node\nnode 3\n", 2),
            ("edge 0 1\n", 1),
            ("node\n\nedge 0 x 1\n", 3),
            ("edge 0 1 1.5\n", 1),
            ("edge 0 1 abc\n", 1),
            ("jump\n", 1),
            ("query now\n", 1),
            ("del -1 2\n", 1),
        ];
        for (text, line) in cases {
            let e = parse_stream(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    fn event() -> impl Strategy<Value = UpdateEvent> {
        prop_oneof![
            Just(UpdateEvent::Node),
            Just(UpdateEvent::Query),
            (0u32..50, 0u32..50, 1u32..=1000)
                .prop_map(|(u, v, p)| UpdateEvent::Edge(
                    NodeId(u),
                    NodeId(v),
                    EdgeParam::new(p as f64 / 1000.0).unwrap()
                )),
            (0u32..50, 0u32..50).prop_map(|(u, v)| UpdateEvent::Del(NodeId(u), NodeId(v))),
        ]
    }

    proptest! {
        #[test]
        fn render_parse_roundtrip(events in proptest::collection::vec(event(), 0..40)) {
            prop_assert_eq!(parse_stream(&render_stream(&events)).unwrap(), events);
        }
    }
}
