//! `dataset.jsonl`: one JSON object per [`QARecord`], schema version 1.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::{AnswerEntry, QARecord};
use super::rows::{PostRow, Timestamp, UserRow};
use crate::error::{Error, Result};

pub const DATASET_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct AnswerLine {
    #[serde(flatten)]
    post: PostRow,
    reputation: u64,
    user_creation_ts: Timestamp,
    accepted: bool,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    v: u64,
    question: PostRow,
    answers: Vec<AnswerLine>,
}

impl From<&QARecord> for RecordLine {
    fn from(record: &QARecord) -> Self {
        RecordLine {
            v: DATASET_VERSION,
            question: record.question.clone(),
            answers: record
                .answers
                .iter()
                .map(|a| AnswerLine {
                    post: a.post.clone(),
                    reputation: a.user.reputation,
                    user_creation_ts: a.user.creation_ts,
                    accepted: a.accepted,
                })
                .collect(),
        }
    }
}

fn into_record(line: RecordLine) -> Result<QARecord> {
    let answers = line
        .answers
        .into_iter()
        .map(|a| {
            let id = a.post.owner_user_id.ok_or_else(|| {
                Error::Data(format!("answer {} has no owner_user_id", a.post.id))
            })?;
            Ok(AnswerEntry {
                user: UserRow {
                    id,
                    reputation: a.reputation,
                    creation_ts: a.user_creation_ts,
                },
                post: a.post,
                accepted: a.accepted,
            })
        })
        .collect::<Result<_>>()?;
    Ok(QARecord {
        question: line.question,
        answers,
    })
}

pub fn encode_record(record: &QARecord) -> String {
    serde_json::to_string(&RecordLine::from(record)).expect("record serializes")
}

pub fn write_dataset(records: &[QARecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for record in records {
        out.write_all(encode_record(record).as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<QARecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let context = || format!("{}:{}", path.display(), n + 1);
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| Error::json(context(), e))?;
        let version = value.get("v").and_then(|v| v.as_u64()).unwrap_or(0);
        if version != DATASET_VERSION {
            return Err(Error::SchemaVersion {
                what: context(),
                found: version,
                expected: DATASET_VERSION,
            });
        }
        let parsed: RecordLine =
            serde_json::from_value(value).map_err(|e| Error::json(context(), e))?;
        records.push(into_record(parsed)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::rows::PostType;

    fn record() -> QARecord {
        let ts = |s: &str| s.parse::<Timestamp>().unwrap();
        let answer = |id, owner, accepted| AnswerEntry {
            post: PostRow {
                id,
                post_type: PostType::Answer,
                parent_id: Some(1),
                accepted_answer_id: None,
                creation_ts: ts("2015-02-03T04:05:06.789"),
                score: -1,
                view_count: None,
                body: "<p>try \"this\" &amp; that</p>\n<pre><code>x = 1;\n</code></pre>".into(),
                owner_user_id: Some(owner),
                tags: vec![],
                answer_count: None,
                comment_count: 2,
            },
            user: UserRow {
                id: owner,
                reputation: 42,
                creation_ts: ts("2011-01-01T00:00:00.000"),
            },
            accepted,
        };
        QARecord {
            question: PostRow {
                id: 1,
                post_type: PostType::Question,
                parent_id: None,
                accepted_answer_id: Some(2),
                creation_ts: ts("2015-02-03T00:00:00.000"),
                score: 5,
                view_count: Some(120),
                body: "<p>Why?</p>".into(),
                owner_user_id: Some(7),
                tags: vec!["java".into(), "arrays".into()],
                answer_count: Some(2),
                comment_count: 0,
            },
            answers: vec![answer(2, 8, true), answer(3, 9, false)],
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.jsonl");
        write_dataset(&[record()], &path).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), vec![record()]);
    }

    #[test]
    fn empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.jsonl");
        write_dataset(&[], &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 0);
        assert!(read_dataset(&path).unwrap().is_empty());
    }

    #[test]
    fn field_names() {
        let line: serde_json::Value = serde_json::from_str(&encode_record(&record())).unwrap();
        assert_eq!(line["v"], 1);
        let q = line["question"].as_object().unwrap();
        for key in [
            "id",
            "post_type",
            "parent_id",
            "accepted_answer_id",
            "creation_ts",
            "score",
            "view_count",
            "body",
            "owner_user_id",
            "tags",
            "answer_count",
            "comment_count",
        ] {
            assert!(q.contains_key(key), "{key}");
        }
        let a = line["answers"][0].as_object().unwrap();
        for key in ["reputation", "user_creation_ts", "accepted", "parent_id"] {
            assert!(a.contains_key(key), "{key}");
        }
        assert_eq!(a["creation_ts"], "2015-02-03T04:05:06.789Z");
        assert_eq!(line["question"]["post_type"], "question");
    }

    #[test]
    fn version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.jsonl");
        let line = encode_record(&record()).replacen("\"v\":1", "\"v\":2", 1);
        std::fs::write(&path, line + "\n").unwrap();
        assert!(matches!(
            read_dataset(&path),
            Err(Error::SchemaVersion { found: 2, .. })
        ));
    }
}
