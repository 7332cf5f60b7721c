//! Streaming reader for the `<row .../>` layout used by every data-dump file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};

/// Attribute name to (unescaped) attribute value for one `<row>` element.
pub type AttrMap = BTreeMap<String, String>;

/// Iterator over the rows of a dump file.
///
/// Holds one event buffer that is cleared after every event, so memory use
/// is bounded by the largest single row rather than the file size.
pub struct RowStream<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    depth: usize,
    last_row_end: u64,
    done: bool,
}

impl<R: BufRead> RowStream<R> {
    pub fn new(source: R) -> Self {
        let mut reader = Reader::from_reader(source);
        reader.config_mut().check_end_names = true;
        RowStream {
            reader,
            buf: Vec::with_capacity(4096),
            depth: 0,
            last_row_end: 0,
            done: false,
        }
    }

    /// Byte offset just past the last row that was decoded successfully.
    pub fn last_row_end(&self) -> u64 {
        self.last_row_end
    }

    fn fail(&mut self, message: impl Into<String>) -> Option<Result<AttrMap>> {
        self.done = true;
        Some(Err(Error::Xml {
            offset: self.last_row_end,
            message: message.into(),
        }))
    }
}

/// Opens `path` and streams its rows.
pub fn stream_file(path: &Path) -> Result<RowStream<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(RowStream::new(BufReader::with_capacity(1 << 16, file)))
}

/// Streams rows from any buffered byte source.
pub fn stream_rows<R: BufRead>(source: R) -> RowStream<R> {
    RowStream::new(source)
}

fn attributes(start: &BytesStart<'_>) -> std::result::Result<AttrMap, String> {
    let mut map = AttrMap::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = std::str::from_utf8(attr.key.as_ref())
            .map_err(|e| e.to_string())?
            .to_string();
        let value = attr.unescape_value().map_err(|e| e.to_string())?;
        map.insert(key, value.into_owned());
    }
    Ok(map)
}

impl<R: BufRead> Iterator for RowStream<R> {
    type Item = Result<AttrMap>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event,
                Err(e) => {
                    let msg = e.to_string();
                    return self.fail(msg);
                }
            };
            match event {
                Event::Empty(start) => {
                    if start.name().as_ref() == b"row" {
                        let row = attributes(&start);
                        return match row {
                            Ok(map) => {
                                self.last_row_end = self.reader.buffer_position();
                                Some(Ok(map))
                            }
                            Err(msg) => self.fail(msg),
                        };
                    }
                }
                Event::Start(start) => {
                    self.depth += 1;
                    // A non-empty <row> still carries its data in attributes.
                    if start.name().as_ref() == b"row" {
                        let row = attributes(&start);
                        return match row {
                            Ok(map) => Some(Ok(map)),
                            Err(msg) => self.fail(msg),
                        };
                    }
                }
                Event::End(_) => {
                    self.depth = self.depth.saturating_sub(1);
                    self.last_row_end = self.reader.buffer_position();
                }
                Event::Eof => {
                    if self.depth > 0 {
                        return self.fail("unexpected end of input inside an open element");
                    }
                    self.done = true;
                    return None;
                }
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(xml: &str) -> Result<Vec<AttrMap>> {
        stream_rows(xml.as_bytes()).collect()
    }

    #[test]
    fn single_row() {
        let rows = collect(r#"<rows><row Id="1" Score="3"/></rows>"#).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0]["Id"], "1");
        assert_eq!(rows[0]["Score"], "3");
        assert_eq!(rows[0].len(), 2);
    }

    #[test]
    fn empty_root() {
        assert!(collect("<rows></rows>").unwrap().is_empty());
        assert!(collect("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts/>")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unescapes_attribute_values() {
        let rows = collect(r#"<posts><row Body="&lt;p&gt;a &amp;amp; b&lt;/p&gt;"/></posts>"#).unwrap();
        assert_eq!(rows[0]["Body"], "<p>a &amp; b</p>");
    }

    #[test]
    fn skips_other_elements() {
        let rows = collect(r#"<rows><meta x="1"/><row Id="1"/><other><row Id="2"/></other></rows>"#)
            .unwrap();
        let ids: Vec<_> = rows.iter().map(|r| r["Id"].as_str()).collect();
        assert_eq!(ids, ["1", "2"]);
    }

    #[test]
    fn truncated_mid_element_reports_last_complete_row() {
        let full = "<rows>\n  <row Id=\"1\" />\n  <row Id=\"2\" />\n</rows>\n";
        let cut = &full[..full.find("Id=\"2\"").unwrap() + 4];
        let second_row_start = full.find("<row Id=\"2\"").unwrap() as u64;
        let mut stream = stream_rows(cut.as_bytes());
        assert_eq!(stream.next().unwrap().unwrap()["Id"], "1");
        match stream.next() {
            Some(Err(Error::Xml { offset, .. })) => {
                assert!(offset <= second_row_start);
                assert!(offset >= full.find("/>").unwrap() as u64 + 2);
            }
            other => panic!("expected xml error, got {other:?}"),
        }
        assert!(stream.next().is_none());
    }

    #[test]
    fn truncated_before_root_close_is_an_error() {
        let err = collect("<rows><row Id=\"1\"/>").unwrap_err();
        assert!(matches!(err, Error::Xml { .. }));
    }

    #[test]
    fn mismatched_close_is_an_error() {
        assert!(collect("<rows><row Id=\"1\"/></posts>").is_err());
    }
}
