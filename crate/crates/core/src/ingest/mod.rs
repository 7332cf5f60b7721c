//! Data-dump ingestion: streaming XML rows, decoding `Posts.xml` and
//! `Users.xml`, sampling rules, and the canonical `dataset.jsonl` store.

mod dataset;
mod rows;
mod store;
mod xml;

use std::collections::HashMap;
use std::path::Path;

pub use dataset::{build_dataset, AnswerEntry, DiscardReason, IngestFilter, IngestReport, QARecord};
pub use rows::{decode_post, decode_user, parse_tags, PostRow, PostType, Timestamp, UserRow};
pub use store::{encode_record, read_dataset, write_dataset, DATASET_VERSION};
pub use xml::{stream_file, stream_rows, AttrMap, RowStream};

use crate::error::Result;

pub fn load_posts(path: &Path) -> Result<Vec<PostRow>> {
    stream_file(path)?
        .map(|row| row.and_then(|attrs| decode_post(&attrs)))
        .collect()
}

pub fn load_users(path: &Path) -> Result<HashMap<i64, UserRow>> {
    stream_file(path)?
        .map(|row| row.and_then(|attrs| decode_user(&attrs)).map(|u| (u.id, u)))
        .collect()
}

/// Reads both dump files (on two workers) and assembles the dataset.
pub fn ingest_files(
    posts: &Path,
    users: &Path,
    filter: &IngestFilter,
) -> Result<(Vec<QARecord>, IngestReport)> {
    filter.validate()?;
    let (posts, users) = std::thread::scope(|s| {
        let users = s.spawn(|| load_users(users));
        let posts = load_posts(posts);
        (posts, users.join().expect("users worker panicked"))
    });
    Ok(build_dataset(posts?, &users?, filter))
}
