//! Line-oriented document input and output.
//!
//! Raw files hold one JSON object per line with `id`, `date` and `text`.
//! Pre-tagged files hold `id`, `date` and `mentions` (an array of
//! `[name, count]` pairs), or TSV lines `date<TAB>name<TAB>count`. TSV lines
//! have no id of their own and are given `L<line number>`.
//!
//! Malformed lines are skipped and counted. If more than 10% of the records
//! in a file are malformed the read fails with [`Error::Schema`], which
//! nearly always means the wrong schema was selected.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::{AnalysisWindow, Timestamp};

/// Fraction of malformed records above which a file is rejected.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schema {
    RawText,
    PreTagged,
}

impl std::str::FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "raw-text" => Ok(Schema::RawText),
            "pre-tagged" | "pretagged" | "tagged" => Ok(Schema::PreTagged),
            other => Err(Error::Config(format!("unknown schema {other:?}"))),
        }
    }
}

/// Either the document body or mentions extracted by an external tagger.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Content {
    Text(String),
    Mentions(Vec<(String, u64)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub timestamp: Timestamp,
    pub content: Content,
}

impl Document {
    pub fn raw(id: impl Into<String>, timestamp: Timestamp, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            timestamp,
            content: Content::Text(text.into()),
        }
    }

    pub fn tagged(
        id: impl Into<String>,
        timestamp: Timestamp,
        mentions: Vec<(String, u64)>,
    ) -> Self {
        Document {
            id: id.into(),
            timestamp,
            content: Content::Mentions(mentions),
        }
    }
}

#[derive(Deserialize)]
struct Record {
    id: String,
    date: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    mentions: Option<Vec<(String, u64)>>,
}

#[derive(Serialize)]
struct RawOut<'a> {
    id: &'a str,
    date: String,
    text: &'a str,
}

#[derive(Serialize)]
struct TaggedOut<'a> {
    id: &'a str,
    date: String,
    mentions: &'a [(String, u64)],
}

/// Parses one non-blank line; `None` if malformed for `schema`.
pub fn parse_line(line: &str, lineno: u64, schema: Schema) -> Option<Document> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.trim_start().starts_with('{') {
        let rec: Record = serde_json::from_str(line).ok()?;
        let timestamp = Timestamp::parse(&rec.date).ok()?;
        let content = match (schema, rec.text, rec.mentions) {
            (Schema::RawText, Some(text), None) => Content::Text(text),
            (Schema::PreTagged, None, Some(mentions)) => {
                if mentions
                    .iter()
                    .any(|(name, count)| *count == 0 || name.trim().is_empty())
                {
                    return None;
                }
                Content::Mentions(mentions)
            }
            _ => return None,
        };
        Some(Document {
            id: rec.id,
            timestamp,
            content,
        })
    } else if schema == Schema::PreTagged {
        let mut fields = line.split('\t');
        let (date, name, count) = (fields.next()?, fields.next()?, fields.next()?);
        if fields.next().is_some() || name.trim().is_empty() {
            return None;
        }
        let count: u64 = count.trim().parse().ok().filter(|&c| c >= 1)?;
        Some(Document::tagged(
            format!("L{lineno}"),
            Timestamp::parse(date).ok()?,
            vec![(name.trim().to_string(), count)],
        ))
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadSummary {
    /// Non-blank lines seen.
    pub records: u64,
    pub malformed: u64,
}

impl ReadSummary {
    pub fn accepted(&self) -> u64 {
        self.records - self.malformed
    }
}

/// Streaming reader; call [`DocumentReader::finish`] after draining it.
pub struct DocumentReader<R> {
    input: R,
    schema: Schema,
    path: PathBuf,
    lineno: u64,
    summary: ReadSummary,
    buf: String,
}

impl<R: BufRead> DocumentReader<R> {
    pub fn new(input: R, schema: Schema, path: impl Into<PathBuf>) -> Self {
        DocumentReader {
            input,
            schema,
            path: path.into(),
            lineno: 0,
            summary: ReadSummary::default(),
            buf: String::new(),
        }
    }

    /// Summary so far; fails if the malformed fraction exceeds the limit.
    pub fn finish(&self) -> Result<ReadSummary> {
        let s = self.summary;
        if s.records > 0 && s.malformed as f64 > MAX_MALFORMED_FRACTION * s.records as f64 {
            return Err(Error::Schema {
                path: self.path.clone(),
                malformed: s.malformed,
                records: s.records,
            });
        }
        Ok(s)
    }
}

impl<R: BufRead> Iterator for DocumentReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            }
            self.lineno += 1;
            if self.buf.trim().is_empty() {
                continue;
            }
            self.summary.records += 1;
            match parse_line(&self.buf, self.lineno, self.schema) {
                Some(doc) => return Some(Ok(doc)),
                None => self.summary.malformed += 1,
            }
        }
    }
}

pub fn read_documents(path: &Path, schema: Schema) -> Result<DocumentReader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(DocumentReader::new(BufReader::new(file), schema, path))
}

/// Reads a whole file, enforcing the malformed-line limit.
pub fn read_all(path: &Path, schema: Schema) -> Result<(Vec<Document>, ReadSummary)> {
    let mut reader = read_documents(path, schema)?;
    let docs = reader.by_ref().collect::<Result<Vec<_>>>()?;
    let summary = reader.finish()?;
    Ok((docs, summary))
}

pub fn window_filter<I>(docs: I, window: AnalysisWindow) -> impl Iterator<Item = Document>
where
    I: IntoIterator<Item = Document>,
{
    docs.into_iter()
        .filter(move |d| window.contains(d.timestamp))
}

/// Serializes one document as a JSON line (no trailing newline).
pub fn to_json_line(doc: &Document) -> String {
    let date = doc.timestamp.to_string();
    let out = match &doc.content {
        Content::Text(text) => serde_json::to_string(&RawOut {
            id: &doc.id,
            date,
            text,
        }),
        Content::Mentions(mentions) => serde_json::to_string(&TaggedOut {
            id: &doc.id,
            date,
            mentions,
        }),
    };
    out.expect("documents always serialize")
}

pub fn write_documents<'a, W, I>(mut out: W, docs: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Document>,
{
    for doc in docs {
        writeln!(out, "{}", to_json_line(doc))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn read_str(s: &str, schema: Schema) -> (Vec<Document>, Result<ReadSummary>) {
        let mut r = DocumentReader::new(s.as_bytes(), schema, "<mem>");
        let docs = r.by_ref().collect::<Result<Vec<_>>>().unwrap();
        (docs, r.finish())
    }

    #[test]
    fn raw_line() {
        let (docs, summary) = read_str(
            r#"{"id":"a","date":"1912-04-15","text":"John Jacob Astor died."}"#,
            Schema::RawText,
        );
        assert_eq!(
            summary.unwrap(),
            ReadSummary {
                records: 1,
                malformed: 0
            }
        );
        assert_eq!(
            docs,
            vec![Document::raw(
                "a",
                Timestamp::parse("1912-04-15").unwrap(),
                "John Jacob Astor died."
            )]
        );
    }

    #[test]
    fn tagged_line() {
        let (docs, _) = read_str(
            r#"{"id":"b","date":"2009-07-01","mentions":[["Michael Jackson",3]]}"#,
            Schema::PreTagged,
        );
        assert_eq!(
            docs[0].content,
            Content::Mentions(vec![("Michael Jackson".into(), 3)])
        );
    }

    #[test]
    fn tsv_line() {
        let (docs, _) = read_str("2009-07-01\tMichael Jackson\t3\n", Schema::PreTagged);
        assert_eq!(docs[0].id, "L1");
        assert_eq!(
            docs[0].content,
            Content::Mentions(vec![("Michael Jackson".into(), 3)])
        );
    }

    #[test]
    fn bad_date_is_counted_and_skipped() {
        let mut lines: Vec<String> = (0..10)
            .map(|i| format!(r#"{{"id":"{i}","date":"1912-04-15","text":"x"}}"#))
            .collect();
        lines.push(r#"{"id":"z","date":"1912-13-40","text":"x"}"#.into());
        let (docs, summary) = read_str(&lines.join("\n"), Schema::RawText);
        assert_eq!(docs.len(), 10);
        assert_eq!(summary.unwrap().malformed, 1);
    }

    #[test]
    fn wrong_schema_is_fatal() {
        let input = r#"{"id":"b","date":"2009-07-01","mentions":[["X Y",1]]}"#;
        let (docs, summary) = read_str(input, Schema::RawText);
        assert!(docs.is_empty());
        assert!(matches!(
            summary,
            Err(Error::Schema {
                malformed: 1,
                records: 1,
                ..
            })
        ));
    }

    #[test]
    fn both_or_neither_content_is_malformed() {
        let both = r#"{"id":"c","date":"2009-07-01","text":"x","mentions":[["X Y",1]]}"#;
        let neither = r#"{"id":"c","date":"2009-07-01"}"#;
        let zero = r#"{"id":"c","date":"2009-07-01","mentions":[["X Y",0]]}"#;
        for schema in [Schema::RawText, Schema::PreTagged] {
            assert!(parse_line(both, 1, schema).is_none());
            assert!(parse_line(neither, 1, schema).is_none());
        }
        assert!(parse_line(zero, 1, Schema::PreTagged).is_none());
    }

    #[test]
    fn blank_lines_are_not_records() {
        let (docs, summary) = read_str("\n\n2009-07-01\tA B\t1\n\n", Schema::PreTagged);
        assert_eq!(docs.len(), 1);
        assert_eq!(summary.unwrap().records, 1);
    }

    #[test]
    fn window_boundaries() {
        let w = AnalysisWindow::parse("1895-01..2011-01").unwrap();
        let docs = vec![
            Document::raw("old", Timestamp::parse("1894-12-31").unwrap(), ""),
            Document::raw("first", Timestamp::parse("1895-01-01").unwrap(), ""),
        ];
        let kept: Vec<_> = window_filter(docs, w).map(|d| d.id).collect();
        assert_eq!(kept, vec!["first"]);
        assert_eq!(window_filter(Vec::new(), w).count(), 0);
    }

    fn arb_doc() -> impl Strategy<Value = Document> {
        let ts = (-60_000i64..60_000, prop::bool::ANY, 0i64..86_400).prop_map(|(d, timed, s)| {
            Timestamp::from_seconds(d * 86_400 + if timed { s } else { 0 })
        });
        let content = prop_oneof![
            "[a-zA-Z .,\"\\\\é]{0,40}".prop_map(Content::Text),
            prop::collection::vec(("[A-Z][a-z]{1,6} [A-Z][a-z]{1,6}", 1u64..50), 0..4)
                .prop_map(Content::Mentions),
        ];
        ("[a-z0-9]{1,8}", ts, content).prop_map(|(id, timestamp, content)| Document {
            id,
            timestamp,
            content,
        })
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(docs in prop::collection::vec(arb_doc(), 0..20)) {
            let mut buf = Vec::new();
            write_documents(&mut buf, &docs).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let raw: Vec<_> = docs.iter().filter(|d| matches!(d.content, Content::Text(_))).cloned().collect();
            let tagged: Vec<_> = docs.iter().filter(|d| matches!(d.content, Content::Mentions(_))).cloned().collect();
            let (r, sr) = read_str(&text, Schema::RawText);
            let (t, st) = read_str(&text, Schema::PreTagged);
            prop_assert_eq!(r, raw.clone());
            prop_assert_eq!(t, tagged.clone());
            // every line is accepted by exactly one schema
            let sr = sr.map(|s| s.malformed).unwrap_or_else(|e| match e { Error::Schema { malformed, .. } => malformed, _ => unreachable!() });
            let st = st.map(|s| s.malformed).unwrap_or_else(|e| match e { Error::Schema { malformed, .. } => malformed, _ => unreachable!() });
            prop_assert_eq!(sr as usize, tagged.len());
            prop_assert_eq!(st as usize, raw.len());
        }

        #[test]
        fn window_filter_is_idempotent(docs in prop::collection::vec(arb_doc(), 0..30), a in 1900i32..2100, len in 1i64..600) {
            let start = crate::time::Month::new(a, 1).unwrap();
            let w = AnalysisWindow::new(start, crate::time::Month::from_index(start.index() + len)).unwrap();
            let once: Vec<_> = window_filter(docs.clone(), w).collect();
            let twice: Vec<_> = window_filter(once.clone(), w).collect();
            let dropped = docs.iter().filter(|d| !w.contains(d.timestamp)).count();
            prop_assert_eq!(once.len() + dropped, docs.len());
            prop_assert_eq!(once, twice);
        }
    }
}
