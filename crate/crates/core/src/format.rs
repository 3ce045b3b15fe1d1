//! Line-oriented text formats for instances and transcripts.
//!
//! Instance:
//!
//! ```text
//! c optional comments
//! p cnfgame <universe_size> <num_clauses> <first:T|F> <last:T|F>
//! 1 2 0
//! -1 -2 0
//! ```
//!
//! Variables are 1-indexed and signed in files. Transcript:
//!
//! ```text
//! t <winner:T|F>
//! <player:T|F> <signed literal made true>
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{Clause, CnfError, Cnf, GameInstance, Literal, Move, Player, Transcript, TranscriptError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("bad token `{0}`")]
    BadToken(String),
    #[error("clause is not terminated by 0")]
    Unterminated,
    #[error("variable {var} is outside the universe of size {universe}")]
    OutOfRange { var: i64, universe: u32 },
    #[error("variable {0} occurs more than once in the clause")]
    DuplicateVariable(i64),
    #[error("universe size {universe} has the wrong parity for pattern {first}{last}")]
    Parity { universe: u32, first: Player, last: Player },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("malformed move: {0}")]
    MalformedMove(String),
    #[error("invalid transcript: {0}")]
    Transcript(TranscriptError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

struct Header {
    line: usize,
    universe: u32,
    clauses: usize,
    first: Player,
    last: Player,
}

fn parse_header(line_no: usize, rest: &str) -> Result<Header, ParseError> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let bad = |msg: &str| err(line_no, ParseErrorKind::MalformedHeader(msg.to_string()));
    if toks.len() != 5 || toks[0] != "cnfgame" {
        return Err(bad("expected `p cnfgame <universe> <clauses> <first> <last>`"));
    }
    let universe = toks[1].parse().map_err(|_| bad("universe size is not a number"))?;
    let clauses = toks[2].parse().map_err(|_| bad("clause count is not a number"))?;
    let first = toks[3].parse().map_err(|_| bad("first player must be T or F"))?;
    let last = toks[4].parse().map_err(|_| bad("last player must be T or F"))?;
    Ok(Header {
        line: line_no,
        universe,
        clauses,
        first,
        last,
    })
}

pub fn parse_instance(text: &str) -> Result<GameInstance, ParseError> {
    let mut header: Option<Header> = None;
    let mut clauses = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(err(line_no, ParseErrorKind::DuplicateHeader));
            }
            header = Some(parse_header(line_no, rest)?);
            continue;
        }
        let Some(h) = header.as_ref() else {
            return Err(err(line_no, ParseErrorKind::MissingHeader));
        };
        let mut codes = Vec::new();
        for tok in line.split_whitespace() {
            let code: i64 = tok
                .parse()
                .map_err(|_| err(line_no, ParseErrorKind::BadToken(tok.to_string())))?;
            codes.push(code);
        }
        if codes.last() != Some(&0) || codes[..codes.len() - 1].contains(&0) {
            return Err(err(line_no, ParseErrorKind::Unterminated));
        }
        codes.pop();
        let mut lits = Vec::with_capacity(codes.len());
        for &code in &codes {
            let lit = Literal::from_dimacs(code)
                .filter(|l| l.var() < h.universe)
                .ok_or(err(
                    line_no,
                    ParseErrorKind::OutOfRange {
                        var: code.abs(),
                        universe: h.universe,
                    },
                ))?;
            lits.push(lit);
        }
        let clause = Clause::new(lits).map_err(|e| match e {
            CnfError::DuplicateVariable(v) => err(line_no, ParseErrorKind::DuplicateVariable(i64::from(v) + 1)),
            other => err(line_no, ParseErrorKind::MalformedMove(other.to_string())),
        })?;
        clauses.push(clause);
    }
    let h = header.ok_or(err(last_line.max(1), ParseErrorKind::MissingHeader))?;
    if clauses.len() != h.clauses {
        return Err(err(
            last_line.max(h.line),
            ParseErrorKind::ClauseCount {
                declared: h.clauses,
                found: clauses.len(),
            },
        ));
    }
    GameInstance::new(Cnf::new(clauses), h.universe, h.first, h.last).map_err(|e| match e {
        CnfError::ParityMismatch { universe, first, last } => {
            err(h.line, ParseErrorKind::Parity { universe, first, last })
        }
        other => err(h.line, ParseErrorKind::MalformedHeader(other.to_string())),
    })
}

pub fn serialize_instance(g: &GameInstance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p cnfgame {} {} {} {}",
        g.universe_size(),
        g.cnf().len(),
        g.first(),
        g.last()
    )
    .unwrap();
    for clause in g.cnf() {
        out.push_str(&clause_line(clause));
        out.push('\n');
    }
    out
}

fn clause_line(clause: &Clause) -> String {
    let mut s = String::new();
    for lit in clause.literals() {
        write!(s, "{} ", lit.to_dimacs()).unwrap();
    }
    s.push('0');
    s
}

pub fn serialize_transcript(t: &Transcript) -> String {
    let mut out = format!("t {}\n", t.winner);
    for mv in &t.moves {
        writeln!(out, "{} {}", mv.player, mv.literal().to_dimacs()).unwrap();
    }
    out
}

/// Parses a transcript for `instance` and checks it against the game rules.
pub fn parse_transcript(text: &str, instance: &GameInstance) -> Result<Transcript, ParseError> {
    let mut winner = None;
    let mut moves = Vec::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() == Some(&"t") {
            if winner.is_some() {
                return Err(err(line_no, ParseErrorKind::DuplicateHeader));
            }
            let w = toks
                .get(1)
                .filter(|_| toks.len() == 2)
                .and_then(|w| w.parse::<Player>().ok())
                .ok_or(err(line_no, ParseErrorKind::MalformedHeader("expected `t <T|F>`".into())))?;
            winner = Some(w);
            continue;
        }
        if winner.is_none() {
            return Err(err(line_no, ParseErrorKind::MissingHeader));
        }
        let bad = || err(line_no, ParseErrorKind::MalformedMove(line.to_string()));
        if toks.len() != 2 {
            return Err(bad());
        }
        let player: Player = toks[0].parse().map_err(|_| bad())?;
        let code: i64 = toks[1].parse().map_err(|_| bad())?;
        let lit = Literal::from_dimacs(code).ok_or_else(bad)?;
        moves.push(Move::making_true(player, lit));
    }
    let winner = winner.ok_or(err(last_line, ParseErrorKind::MissingHeader))?;
    let t = Transcript {
        instance: instance.clone(),
        moves,
        winner,
    };
    t.check().map_err(|e| err(last_line, ParseErrorKind::Transcript(e)))?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIRS: &str = "p cnfgame 4 2 T F\n1 2 0\n-1 -2 0\n";

    #[test]
    fn parses_padded_xor_pair() {
        let g = parse_instance(PAIRS).unwrap();
        assert_eq!(g.universe_size(), 4);
        assert_eq!(g.cnf(), &Cnf::from_dimacs(&[&[1, 2], &[-1, -2]]).unwrap());
        assert_eq!((g.first(), g.last()), (Player::T, Player::F));
        assert_eq!(g.padding_variables(), vec![2, 3]);
    }

    #[test]
    fn roundtrip_canonical_text() {
        assert_eq!(serialize_instance(&parse_instance(PAIRS).unwrap()), PAIRS);
        let with_dup_and_empty = "p cnfgame 3 3 T T\n0\n-3 0\n-3 0\n";
        assert_eq!(
            serialize_instance(&parse_instance(with_dup_and_empty).unwrap()),
            with_dup_and_empty
        );
    }

    #[test]
    fn comments_and_literal_order() {
        let g = parse_instance("c hello\np cnfgame 3 1 T T\nc mid\n3 -1 0\n").unwrap();
        assert_eq!(serialize_instance(&g), "p cnfgame 3 1 T T\n-1 3 0\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("p cnfgame 3 1 T F\n1 0\n", 1),
            ("p cnfgame 2 1 T\n1 0\n", 1),
            ("p cnfgame 2 1 T F\n1 3 0\n", 2),
            ("p cnfgame 2 1 T F\n1 -1 0\n", 2),
            ("p cnfgame 2 1 T F\n1 2\n", 2),
            ("c x\n1 2 0\n", 2),
            ("p cnfgame 2 2 T F\n1 2 0\n", 2),
            ("p cnfgame 2 1 T F\n1 x 0\n", 2),
        ];
        for (text, line) in cases {
            let e = parse_instance(text).unwrap_err();
            assert_eq!(e.line, *line, "{text:?} -> {e}");
        }
        assert!(matches!(
            parse_instance("p cnfgame 3 1 T F\n1 0\n").unwrap_err().kind,
            ParseErrorKind::Parity { .. }
        ));
        assert!(matches!(
            parse_instance("p cnfgame 2 1 T F\n1 -1 0\n").unwrap_err().kind,
            ParseErrorKind::DuplicateVariable(1)
        ));
    }

    #[test]
    fn transcript_roundtrip() {
        let g = parse_instance(PAIRS).unwrap();
        let text = "t T\nT 1\nF -3\nT -4\nF -2\n";
        let t = parse_transcript(text, &g).unwrap();
        assert_eq!(t.moves.len(), 4);
        assert_eq!(t.moves[1], Move::new(Player::F, 2, false));
        assert_eq!(serialize_transcript(&t), text);
    }

    #[test]
    fn transcript_rejects_wrong_winner() {
        let g = parse_instance(PAIRS).unwrap();
        let e = parse_transcript("t F\nT 1\nF -3\nT -4\nF -2\n", &g).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Transcript(TranscriptError::WrongWinner { .. })));
    }
}
