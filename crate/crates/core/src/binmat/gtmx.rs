//! GTMX v1: a line-oriented text format for binary codes.
//!
//! ```text
//! GTMX 1
//! t <int>
//! n <int>
//! meta d=<int|?> w=<int|var> mu=<int|?> desc="<string>" [prov=<p>] [sep=1]
//! c <col> <r1> <r2> ...
//! end
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.
//! `prov` records how `d` was certified and `sep=1` marks a 1-separable code;
//! both are optional and omitted when they carry no information.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{BinaryCode, CodeMeta, Provenance};
use crate::error::{Error, Result};

pub fn write_gtmx<W: Write>(code: &BinaryCode, mut out: W) -> Result<()> {
    let mut s = String::with_capacity(code.n() * (code.uniform_weight().unwrap_or(8) * 4 + 8) + 128);
    let m = code.meta();
    let opt = |v: Option<u32>, none: &str| v.map_or(none.to_string(), |x| x.to_string());
    writeln!(s, "GTMX 1\nt {}\nn {}", code.t(), code.n()).unwrap();
    write!(
        s,
        "meta d={} w={} mu={} desc=\"{}\"",
        opt(m.certified_d, "?"),
        opt(m.weight, "var"),
        opt(m.max_overlap, "?"),
        escape(&m.descriptor)
    )
    .unwrap();
    if m.provenance != Provenance::None {
        write!(s, " prov={}", m.provenance.as_str()).unwrap();
    }
    if m.separable_1 {
        s.push_str(" sep=1");
    }
    s.push('\n');
    for (j, col) in code.columns().iter().enumerate() {
        write!(s, "c {j}").unwrap();
        for r in col {
            write!(s, " {r}").unwrap();
        }
        s.push('\n');
    }
    s.push_str("end\n");
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_gtmx<R: Read>(input: R) -> Result<BinaryCode> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    // Blank lines and `#` comments are skipped anywhere.
    let mut next = |what: &str| -> Result<(usize, String)> {
        loop {
            match lines.next() {
                Some((no, Ok(l))) => {
                    let s = l.trim_start();
                    if s.is_empty() || s.starts_with('#') {
                        continue;
                    }
                    return Ok((no, l));
                }
                Some((_, Err(e))) => return Err(e.into()),
                None => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unexpected end of input, expected {what}"),
                    })
                }
            }
        }
    };
    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    let (no, header) = next("header")?;
    if header.trim() != "GTMX 1" {
        return Err(perr(no, format!("expected \"GTMX 1\", found {header:?}")));
    }
    let t = keyed_int(next("t line")?, "t")?;
    let n = keyed_int(next("n line")?, "n")?;
    let (no, meta_line) = next("meta line")?;
    let meta = parse_meta(&meta_line).map_err(|m| perr(no, m))?;

    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(n);
    loop {
        let (no, line) = next("column line or end")?;
        let line = line.trim();
        if line == "end" {
            break;
        }
        let mut toks = line.split_ascii_whitespace();
        if toks.next() != Some("c") {
            return Err(perr(no, format!("expected column line, found {line:?}")));
        }
        let idx: usize = toks
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(no, "missing column index".into()))?;
        if idx != columns.len() {
            return Err(perr(no, format!("column {idx} out of order, expected {}", columns.len())));
        }
        let mut col = Vec::new();
        for tok in toks {
            let r: u32 = tok
                .parse()
                .map_err(|_| perr(no, format!("bad row index {tok:?}")))?;
            if r as usize >= t {
                return Err(perr(no, format!("row index {r} out of range for t = {t}")));
            }
            if col.last().is_some_and(|&p| p >= r) {
                return Err(perr(no, format!("column {idx} is not strictly ascending")));
            }
            col.push(r);
        }
        columns.push(col);
    }
    if columns.len() != n {
        return Err(perr(0, format!("header declares n = {n}, found {} columns", columns.len())));
    }
    BinaryCode::new(t, columns, meta)
}

pub fn save(code: &BinaryCode) -> String {
    let mut buf = Vec::new();
    write_gtmx(code, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("GTMX is UTF-8")
}

pub fn load(text: &str) -> Result<BinaryCode> {
    read_gtmx(text.as_bytes())
}

pub fn save_path(code: &BinaryCode, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_gtmx(code, std::io::BufWriter::new(f))
}

pub fn load_path(path: impl AsRef<Path>) -> Result<BinaryCode> {
    read_gtmx(std::fs::File::open(path)?)
}

fn keyed_int((no, line): (usize, String), key: &str) -> Result<usize> {
    let mut toks = line.split_ascii_whitespace();
    match (toks.next(), toks.next().map(str::parse::<usize>), toks.next()) {
        (Some(k), Some(Ok(v)), None) if k == key => Ok(v),
        _ => Err(Error::Parse {
            line: no,
            msg: format!("expected \"{key} <int>\", found {line:?}"),
        }),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn parse_meta(line: &str) -> std::result::Result<CodeMeta, String> {
    let rest = line
        .trim()
        .strip_prefix("meta")
        .ok_or_else(|| format!("expected meta line, found {line:?}"))?;
    let mut meta = CodeMeta::default();
    let mut seen_desc = false;
    let mut chars = rest.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        let key: String = std::iter::from_fn(|| chars.next_if(|&c| c != '=' && !c.is_whitespace())).collect();
        if chars.next() != Some('=') {
            return Err(format!("meta key {key:?} has no value"));
        }
        let value: String = if chars.peek() == Some(&'"') {
            chars.next();
            let mut v = String::new();
            loop {
                match chars.next() {
                    Some('\\') => v.push(chars.next().ok_or("dangling escape in desc")?),
                    Some('"') => break,
                    Some(c) => v.push(c),
                    None => return Err("unterminated desc string".into()),
                }
            }
            v
        } else {
            std::iter::from_fn(|| chars.next_if(|c| !c.is_whitespace())).collect()
        };
        let opt_int = |v: &str, none: &str| -> std::result::Result<Option<u32>, String> {
            if v == none {
                Ok(None)
            } else {
                v.parse().map(Some).map_err(|_| format!("bad value {v:?} for {key}"))
            }
        };
        match key.as_str() {
            "d" => meta.certified_d = opt_int(&value, "?")?,
            "w" => meta.weight = opt_int(&value, "var")?,
            "mu" => meta.max_overlap = opt_int(&value, "?")?,
            "desc" => {
                meta.descriptor = value;
                seen_desc = true;
            }
            "prov" => {
                meta.provenance =
                    Provenance::parse(&value).ok_or_else(|| format!("unknown provenance {value:?}"))?
            }
            "sep" => meta.separable_1 = value == "1",
            _ => return Err(format!("unknown meta key {key:?}")),
        }
    }
    if !seen_desc {
        return Err("meta line lacks desc".into());
    }
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binmat::tests::printed_example;

    #[test]
    fn round_trip_small() {
        let a = printed_example();
        let text = save(&a);
        assert!(text.starts_with("GTMX 1\nt 3\nn 5\nmeta d=? w=var mu=? desc=\"example 3x5\"\n"));
        assert_eq!(load(&text).unwrap(), a);
        let commented = format!("# seed=4\n\n{}", text.replace("c 2 2\n", "c 2 2\n# note\n"));
        assert_eq!(load(&commented).unwrap(), a);
    }

    #[test]
    fn round_trip_meta_with_quotes() {
        let meta = CodeMeta {
            certified_d: Some(1),
            weight: Some(1),
            max_overlap: Some(0),
            descriptor: "odd \"name\" \\ here".into(),
            provenance: Provenance::Construction,
            separable_1: true,
        };
        let code = BinaryCode::new(2, vec![vec![0], vec![1]], meta).unwrap();
        assert_eq!(load(&save(&code)).unwrap(), code);
    }

    #[test]
    fn rejects_out_of_range_with_line_number() {
        let text = "GTMX 1\nt 3\nn 2\nmeta d=? w=var mu=? desc=\"\"\nc 0 0 1\nc 1 2 3\nend\n";
        match load(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(load("GTMX 2\n").is_err());
        assert!(load("GTMX 1\nt 3\nn 1\nmeta d=? w=var mu=?\nc 0 1\nend\n").is_err());
        assert!(load("GTMX 1\nt 3\nn 1\nmeta desc=\"\"\nc 0 2 1\nend\n").is_err());
        assert!(load("GTMX 1\nt 3\nn 2\nmeta desc=\"\"\nc 0 1\nend\n").is_err());
        assert!(load("GTMX 1\nt 3\nn 1\nmeta desc=\"\" zz=1\nc 0 1\nend\n").is_err());
    }
}
