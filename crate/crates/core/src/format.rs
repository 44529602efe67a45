//! JSON Lines stream files.
//!
//! Each line is one item: a JSON array of `[value, prob]` pairs, for example
//! `[[3,0.5],[7,0.25]]`. An empty array is an item that is ⊥ with
//! probability 1. The first line may instead be a header object `{"n": N}`
//! declaring the domain size. Blank lines are ignored.

use std::io::{BufRead, Write};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{ProbItem, ProbStream};

#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Header { n: u64 },
    Item(ProbItem),
}

/// Parses one line; `line_no` is 1-based and only used in error messages.
pub fn parse_line(text: &str, line_no: usize) -> Result<Line> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let value: Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    match value {
        Value::Object(map) => {
            let n = map
                .get("n")
                .and_then(Value::as_u64)
                .filter(|&n| n >= 1)
                .ok_or_else(|| err("header must be {\"n\": <positive integer>}".into()))?;
            Ok(Line::Header { n })
        }
        Value::Array(pairs) => {
            let mut raw = Vec::with_capacity(pairs.len());
            for pair in &pairs {
                let (v, p) = match pair.as_array().map(Vec::as_slice) {
                    Some([v, p]) => (v, p),
                    _ => return Err(err(format!("expected a [value, prob] pair, got {pair}"))),
                };
                let v = v
                    .as_u64()
                    .ok_or_else(|| err(format!("value {v} is not a non-negative integer")))?;
                let p = p
                    .as_f64()
                    .ok_or_else(|| err(format!("probability {p} is not a number")))?;
                raw.push((v, p));
            }
            ProbItem::new(raw)
                .map(Line::Item)
                .map_err(|e| e.at_line(line_no))
        }
        other => Err(err(format!(
            "expected an array or header object, got {other}"
        ))),
    }
}

/// Streams items from a reader, one line at a time.
pub struct ItemReader<R> {
    reader: R,
    buf: String,
    line_no: usize,
    header: Option<u64>,
    items_seen: usize,
}

impl<R: BufRead> ItemReader<R> {
    pub fn new(reader: R) -> Self {
        ItemReader {
            reader,
            buf: String::new(),
            line_no: 0,
            header: None,
            items_seen: 0,
        }
    }

    /// Domain size declared by a header line, once that line has been read.
    pub fn header_n(&self) -> Option<u64> {
        self.header
    }

    /// Reads ahead through blank lines and a leading header, if any, so that
    /// [`ItemReader::header_n`] is populated before the first item is taken.
    pub fn peek_header(&mut self) -> Result<Option<u64>> {
        if self.line_no > 0 {
            return Ok(self.header);
        }
        // Parsing the first non-blank line here would consume it, so buffer it.
        loop {
            self.buf.clear();
            if self.reader.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            if !self.buf.trim().is_empty() {
                break;
            }
        }
        match parse_line(self.buf.trim(), self.line_no)? {
            Line::Header { n } => {
                self.header = Some(n);
                self.buf.clear();
            }
            Line::Item(_) => {} // left in `buf` for `next`
        }
        Ok(self.header)
    }
}

impl<R: BufRead> Iterator for ItemReader<R> {
    type Item = Result<ProbItem>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.buf.trim().is_empty() {
                self.buf.clear();
                match self.reader.read_line(&mut self.buf) {
                    Ok(0) => return None,
                    Ok(_) => self.line_no += 1,
                    Err(e) => return Some(Err(e.into())),
                }
                if self.buf.trim().is_empty() {
                    continue;
                }
            }
            let text = std::mem::take(&mut self.buf);
            match parse_line(text.trim(), self.line_no) {
                Ok(Line::Item(item)) => {
                    self.items_seen += 1;
                    return Some(Ok(item));
                }
                Ok(Line::Header { n }) if self.items_seen == 0 && self.header.is_none() => {
                    self.header = Some(n);
                }
                Ok(Line::Header { .. }) => {
                    return Some(Err(Error::Parse {
                        line: self.line_no,
                        msg: "header is only allowed on the first line".into(),
                    }))
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Reads a whole stream. An explicit `n` takes precedence over a header; with
/// neither, the domain is inferred from the largest value.
pub fn read_stream<R: BufRead>(reader: R, n: Option<u64>) -> Result<ProbStream> {
    let mut items_reader = ItemReader::new(reader);
    let items = items_reader.by_ref().collect::<Result<Vec<_>>>()?;
    match n.or(items_reader.header_n()) {
        Some(n) => ProbStream::with_domain(items, n),
        None => ProbStream::new(items),
    }
}

/// Serializes one item as a compact JSON array of pairs.
pub fn item_to_json(item: &ProbItem) -> String {
    let pairs: Vec<(u64, f64)> = item.tuples().iter().map(|t| (t.value, t.prob)).collect();
    serde_json::to_string(&pairs).expect("pairs of numbers always serialize")
}

/// Writes a stream, with a `{"n": N}` header line when `header` is set.
pub fn write_stream<W: Write>(mut out: W, stream: &ProbStream, header: bool) -> Result<()> {
    if header {
        writeln!(out, "{{\"n\":{}}}", stream.n())?;
    }
    for item in stream.items() {
        writeln!(out, "{}", item_to_json(item))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_items_and_header() {
        let text = "{\"n\": 10}\n[[3,0.5],[7,0.25]]\n\n[]\n[[1,1]]\n";
        let s = read_stream(text.as_bytes(), None).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.explicit_n(), Some(10));
        assert_eq!(s.items()[0].p_bot(), 0.25);
        assert!(s.items()[1].is_empty());
        assert_eq!(s.items()[2].tuples()[0].prob, 1.0);
    }

    #[test]
    fn inferred_domain_without_header() {
        let s = read_stream("[[4,0.5]]\n[[9,0.5]]".as_bytes(), None).unwrap();
        assert_eq!((s.n(), s.explicit_n()), (9, None));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[[1,0.5]]\n[[2,0.6],[3,0.6]]\n";
        match read_stream(text.as_bytes(), None) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        for bad in [
            "[[1]]",
            "[[-1,0.5]]",
            "[[1,\"x\"]]",
            "7",
            "{\"m\":3}",
            "[[1,0.5]",
        ] {
            assert!(matches!(
                read_stream(bad.as_bytes(), None),
                Err(Error::Parse { line: 1, .. })
            ));
        }
        assert!(matches!(
            read_stream("[[1,0.5]]\n{\"n\":3}".as_bytes(), None),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn values_above_header_domain_rejected() {
        assert!(read_stream("{\"n\":3}\n[[4,0.5]]".as_bytes(), None).is_err());
    }

    #[test]
    fn writes_compact_lines() {
        let s = read_stream("[[3,0.5],[7,0.25]]\n[]".as_bytes(), Some(7)).unwrap();
        let mut out = Vec::new();
        write_stream(&mut out, &s, true).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "{\"n\":7}\n[[3,0.5],[7,0.25]]\n[]\n"
        );
    }

    #[test]
    fn peek_header_keeps_first_item() {
        let mut r = ItemReader::new("[[2,0.5]]\n[[3,0.5]]".as_bytes());
        assert_eq!(r.peek_header().unwrap(), None);
        assert_eq!(r.count(), 2);
        let mut r = ItemReader::new("\n{\"n\":5}\n[[2,0.5]]".as_bytes());
        assert_eq!(r.peek_header().unwrap(), Some(5));
        assert_eq!(r.count(), 1);
    }
}
