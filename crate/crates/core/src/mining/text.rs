//! Plain-text session logs: one session per line, space-separated service ids.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::ServiceId;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: '{token}' is not a service id")]
pub struct ParseError {
    pub line: usize,
    pub token: String,
}

pub fn parse_sessions(input: &str) -> Result<Vec<Vec<ServiceId>>, ParseError> {
    let mut sessions = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let session = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>().map(ServiceId).map_err(|_| ParseError {
                    line: i + 1,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        sessions.push(session);
    }
    Ok(sessions)
}

pub fn format_sessions(sessions: &[Vec<ServiceId>]) -> String {
    let mut out = String::new();
    for s in sessions {
        let mut first = true;
        for id in s {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", id.0);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_skips_comments() {
        let s = parse_sessions("# header\n1 2 3\n\n 4  5\n").unwrap();
        assert_eq!(
            s,
            vec![
                vec![ServiceId(1), ServiceId(2), ServiceId(3)],
                vec![ServiceId(4), ServiceId(5)]
            ]
        );
    }

    #[test]
    fn reports_bad_token_with_line() {
        let err = parse_sessions("1 2\n3 x\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.token, "x");
    }

    proptest! {
        #[test]
        fn format_parse_identity(sessions in proptest::collection::vec(
            proptest::collection::vec(0u32..1000, 1..6), 0..10)) {
            let sessions: Vec<Vec<ServiceId>> = sessions
                .into_iter()
                .map(|s| s.into_iter().map(ServiceId).collect())
                .collect();
            prop_assert_eq!(parse_sessions(&format_sessions(&sessions)).unwrap(), sessions);
        }
    }
}
