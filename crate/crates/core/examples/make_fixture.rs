//! Writes a synthetic dump: `make_fixture <out-dir> [n-questions] [seed]`.

use std::path::PathBuf;

use soaccept_core::ingest::{ingest_files, IngestFilter};
use soaccept_core::synth::dump_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().ok_or("usage: make_fixture <out-dir> [n] [seed]")?);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2016);
    dump_fixture(n, seed).write_to(&out)?;
    let (records, report) = ingest_files(
        &out.join("Posts.xml"),
        &out.join("Users.xml"),
        &IngestFilter::default(),
    )?;
    println!("{} questions kept, {} answers", records.len(), report.answers);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
