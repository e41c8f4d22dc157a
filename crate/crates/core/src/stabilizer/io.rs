//! Text format for stabilizer states.
//!
//! ```text
//! n <qubits>
//! extent torus|patch <rows> <cols>     (optional)
//! <sign><one of X Y Z _ per qubit>     (n generator lines)
//! map <qubit> <q> <r>                  (one line per qubit)
//! ```
//!
//! Blank lines and `#` comments are ignored.

use super::StabilizerState;
use crate::error::{Error, Result};
use crate::lattice::{Extent, FaceCoord};
use crate::pauli::{Pauli, PauliString};
use std::fmt::Write as _;

/// Largest qubit count accepted by the parser.
pub const MAX_TEXT_QUBITS: usize = 1 << 16;

pub fn write_stabilizer_state(state: &StabilizerState) -> String {
    let n = state.num_qubits();
    let mut out = String::new();
    let _ = writeln!(out, "n {n}");
    if let Some(e) = state.extent() {
        let _ = writeln!(out, "extent {} {} {}", if e.periodic { "torus" } else { "patch" }, e.rows, e.cols);
    }
    for g in state.generators() {
        out.push(if g.is_negative() { '-' } else { '+' });
        for q in 0..n {
            out.push(match g.factor(q) {
                Pauli::I => '_',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            });
        }
        out.push('\n');
    }
    for (q, f) in state.qubit_faces().iter().enumerate() {
        let _ = writeln!(out, "map {q} {} {}", f.q, f.r);
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?.parse().map_err(|_| parse_err(line, format!("bad {what}")))
}

pub fn parse_stabilizer_state(text: &str) -> Result<StabilizerState> {
    let mut n: Option<usize> = None;
    let mut extent = None;
    let mut gens: Vec<PauliString> = vec![];
    let mut maps: Vec<(usize, FaceCoord)> = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        match head {
            "n" => {
                if n.is_some() {
                    return Err(parse_err(line_no, "repeated qubit count"));
                }
                let v: usize = number(toks.next(), line_no, "qubit count")?;
                if v == 0 || v > MAX_TEXT_QUBITS {
                    return Err(parse_err(line_no, format!("qubit count must be in 1..={MAX_TEXT_QUBITS}")));
                }
                n = Some(v);
            }
            "extent" => {
                let periodic = match toks.next() {
                    Some("torus") => true,
                    Some("patch") => false,
                    _ => return Err(parse_err(line_no, "extent kind must be torus or patch")),
                };
                let rows: i64 = number(toks.next(), line_no, "rows")?;
                let cols: i64 = number(toks.next(), line_no, "cols")?;
                if !(1..=1 << 20).contains(&rows) || !(1..=1 << 20).contains(&cols) {
                    return Err(parse_err(line_no, "extent sides out of range"));
                }
                extent = Some(Extent { rows, cols, periodic });
            }
            "map" => {
                let q: usize = number(toks.next(), line_no, "qubit")?;
                let fq: i64 = number(toks.next(), line_no, "q")?;
                let fr: i64 = number(toks.next(), line_no, "r")?;
                maps.push((q, FaceCoord::new(fq, fr)));
            }
            _ if head.starts_with('+') || head.starts_with('-') => {
                let n = n.ok_or_else(|| parse_err(line_no, "generator before qubit count"))?;
                let body = &head[1..];
                if body.len() != n || !body.is_ascii() {
                    return Err(parse_err(line_no, format!("generator must have {n} letters")));
                }
                let mut factors = vec![];
                for (q, c) in body.chars().enumerate() {
                    let p = match c {
                        '_' => continue,
                        'X' => Pauli::X,
                        'Y' => Pauli::Y,
                        'Z' => Pauli::Z,
                        _ => return Err(parse_err(line_no, format!("bad letter `{c}`"))),
                    };
                    factors.push((q, p));
                }
                gens.push(PauliString::from_factors(factors, head.starts_with('-')));
            }
            _ => return Err(parse_err(line_no, format!("unknown directive `{head}`"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(line_no, "trailing tokens"));
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing qubit count"))?;
    if gens.len() != n || maps.len() != n {
        return Err(parse_err(0, format!("need {n} generators and {n} map lines")));
    }
    let mut faces = vec![None; n];
    for (q, f) in maps {
        match faces.get_mut(q) {
            Some(slot @ None) => *slot = Some(f),
            Some(Some(_)) => return Err(parse_err(0, format!("qubit {q} mapped twice"))),
            None => return Err(parse_err(0, format!("qubit {q} out of range"))),
        }
    }
    let faces = faces.into_iter().map(|f| f.unwrap()).collect();
    StabilizerState::new(gens, faces, extent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{ghz_state, make_toric_code, make_wall_state, CoarseGrainSpec};

    #[test]
    fn round_trips() {
        for s in [
            make_toric_code(3, 3, CoarseGrainSpec::OwnedEdges).unwrap(),
            make_wall_state(5, 3, 2).unwrap(),
            ghz_state(Extent::patch(2, 3)).unwrap(),
        ] {
            let text = write_stabilizer_state(&s);
            let back = parse_stabilizer_state(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(write_stabilizer_state(&back), text);
        }
    }

    #[test]
    fn bell_pair_with_comments() {
        let text = "# Bell pair\nn 2\n+XX\n+ZZ\nmap 0 0 0\nmap 1 1 0 # second face\n";
        let s = parse_stabilizer_state(text).unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert!(s.extent().is_none());
    }

    #[test]
    fn rejects_bad_states() {
        let bad = [
            "n 2\n+XX\n+XZ\nmap 0 0 0\nmap 1 1 0\n",  // anticommuting
            "n 2\n+XX\n+XX\nmap 0 0 0\nmap 1 1 0\n",  // dependent
            "n 2\n+XX\n+ZZ\nmap 0 0 0\nmap 0 1 0\n",  // qubit mapped twice
            "n 2\n+XX\n+ZZ\nmap 0 0 0\n",             // missing map
            "n 2\n+XQ\n+ZZ\nmap 0 0 0\nmap 1 1 0\n",  // bad letter
            "+XX\nn 2\n",                            // order
            "n 99999999\n",
        ];
        for b in bad {
            assert!(parse_stabilizer_state(b).is_err(), "{b}");
        }
    }
}
