//! Synthetic data with known structure: a planted-signal numeric dataset
//! and a small data dump in the `Posts.xml` / `Users.xml` layout.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, LogNormal, StandardNormal};

use crate::error::{Error, Result};
use crate::ingest::Timestamp;
use crate::matrix::Matrix;
use crate::seed::{self, Rng};

/// `n` rows of 10 standard-normal features. The label depends on columns 0
/// and 1 only: `y = [x0 + x1 + 0.5 e > 0]` with `e` standard normal.
pub fn planted_dataset(n: usize, seed: u64) -> (Matrix, Vec<bool>) {
    let mut rng = seed::rng(seed);
    let mut x = Matrix::zeros(0, 10);
    let mut y = Vec::with_capacity(n);
    let mut row = [0.0; 10];
    for _ in 0..n {
        for v in row.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let noise: f64 = StandardNormal.sample(&mut rng);
        y.push(row[0] + row[1] + 0.5 * noise > 0.0);
        x.push_row(&row);
    }
    (x, y)
}

const PROSE_WORDS: &[&str] = &[
    "array", "list", "string", "object", "method", "function", "callback", "promise", "thread",
    "exception", "error", "value", "variable", "loop", "index", "element", "class", "instance",
    "constructor", "interface", "return", "parameter", "argument", "event", "listener", "request",
    "response", "server", "client", "browser", "page", "button", "click", "form", "input", "output",
    "file", "stream", "buffer", "memory", "performance", "library", "framework", "version", "update",
    "compile", "runtime", "type", "generic", "collection", "map", "set", "key", "iterate", "sort",
    "filter", "parse", "json", "format", "date", "time", "number", "integer", "double", "null",
    "check", "test", "debug", "console", "log", "print", "call", "async", "await", "timeout",
    "query", "database", "connection", "driver", "spring", "maven", "jquery", "node", "module",
    "import", "package", "scope", "closure", "prototype", "inheritance", "override", "static",
];

const FILLER: &[&str] = &[
    "you", "can", "the", "this", "should", "is", "a", "it", "to", "in", "of", "and", "if", "when",
    "with", "your", "because", "then", "here", "that",
];

const SENTIMENT: &[&str] = &[
    "good", "great", "simple", "easy", "better", "wrong", "bad", "slow", "useful", "elegant",
    "broken", "perfect", "clean", "weird",
];

const IDENTIFIERS: &[&str] = &[
    "list", "map", "result", "value", "items", "count", "index", "node", "data", "callback",
    "builder", "reader", "writer", "response", "request", "element", "config", "cache", "handler",
    "buffer", "parser", "user", "total", "queue", "stack", "key",
];

fn pick<'a>(rng: &mut Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).expect("non-empty word list")
}

fn sentence(rng: &mut Rng, topic: &[&str], topical: f64, sentiment: Option<&str>) -> String {
    let len = rng.gen_range(5..14);
    let mut words = Vec::with_capacity(len + 2);
    for _ in 0..len {
        let r: f64 = rng.gen();
        let w = if r < topical {
            pick(rng, topic)
        } else if r < topical + 0.35 {
            pick(rng, FILLER)
        } else {
            pick(rng, PROSE_WORDS)
        };
        words.push(w.to_string());
    }
    if let Some(s) = sentiment {
        let at = rng.gen_range(0..words.len());
        words.insert(at, s.to_string());
    }
    let mut s = words.join(" ");
    s[..1].make_ascii_uppercase();
    s.push(if rng.gen_bool(0.1) { '?' } else { '.' });
    s
}

fn code_block(rng: &mut Rng, lines: usize, javascript: bool) -> String {
    let mut out = String::new();
    for _ in 0..lines {
        let a = pick(rng, IDENTIFIERS);
        let b = pick(rng, IDENTIFIERS);
        let c = pick(rng, IDENTIFIERS);
        let line = match (javascript, rng.gen_range(0..4)) {
            (true, 0) => format!("var {a} = {b}.{c}();"),
            (true, 1) => format!("function {a}({b}) {{ return {b} + 1; }}"),
            (true, 2) => format!("{a}.forEach(function ({b}) {{ console.log({b}); }});"),
            (true, _) => format!("if ({a} < {b}.length) {{ {c}++; }}"),
            (false, 0) => format!("int {a} = {b}.size();"),
            (false, 1) => format!("List<String> {a} = new ArrayList<>({b});"),
            (false, 2) => format!("for (String {a} : {b}) {{ {c}.add({a}); }}"),
            (false, _) => format!("if ({a} != null) {{ return {b}.get({c}); }}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn xml_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 16);
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#xA;"),
            '\r' => out.push_str("&#xD;"),
            c => out.push(c),
        }
    }
    out
}

fn html_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Answer {
    id: i64,
    owner: Option<i64>,
    ts: i64,
    score: i64,
    comments: u64,
    body: String,
}

/// Dump files as strings.
pub struct DumpFixture {
    pub posts_xml: String,
    pub users_xml: String,
}

const YEAR_MS: i64 = 365 * 86_400_000;

/// Generates a dump with `n_questions` questions that survive the default
/// sampling rules, plus distractor questions that each trip one rule
/// (wrong tag, wrong year, self-accepted, too few registered answerers).
///
/// Accepted answers tend to arrive later, come from higher-reputation
/// users, carry more code and reuse more of the question's vocabulary.
pub fn dump_fixture(n_questions: usize, seed: u64) -> DumpFixture {
    let mut rng = seed::rng(seed);
    let n_users = (n_questions * 3 / 2).max(20) as i64;
    let base: i64 = "2008-08-01T00:00:00.000".parse::<Timestamp>().unwrap().millis();
    let rep_dist = LogNormal::new(5.5, 1.6).expect("valid lognormal");

    let mut users = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<users>\n");
    let mut user_created = vec![0i64; n_users as usize + 1];
    let mut reputation = vec![0u64; n_users as usize + 1];
    for id in 1..=n_users {
        let created = base + rng.gen_range(0..7 * YEAR_MS);
        let rep = (rep_dist.sample(&mut rng) as u64).max(1);
        user_created[id as usize] = created;
        reputation[id as usize] = rep;
        let _ = writeln!(
            users,
            "  <row Id=\"{id}\" Reputation=\"{rep}\" CreationDate=\"{}\" DisplayName=\"user{id}\" />",
            Timestamp(created).to_string().trim_end_matches('Z')
        );
    }
    users.push_str("</users>\n");

    // Users ranked by reputation, so accepted answers can favor the top.
    let mut by_rep: Vec<i64> = (1..=n_users).collect();
    by_rep.sort_by_key(|&id| std::cmp::Reverse(reputation[id as usize]));

    let mut posts = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n");
    let mut next_id: i64 = 1000;
    let n_distractors = (n_questions / 10).max(4);
    let mut kinds: Vec<u8> = vec![0; n_questions];
    kinds.extend((0..n_distractors).map(|i| 1 + (i % 4) as u8));
    kinds.shuffle(&mut rng);

    for kind in kinds {
        let qid = next_id;
        next_id += 1;
        let javascript = rng.gen_bool(0.5);
        let mut tags = vec![if javascript { "javascript" } else { "java" }];
        if rng.gen_bool(0.5) {
            tags.push(pick(&mut rng, &["arrays", "string", "jquery", "spring", "node.js", "json"]));
        }
        if kind == 1 {
            tags = vec!["python"];
        }
        let year = if kind == 2 { 2013 } else { rng.gen_range(2014..=2016) };
        let year_start: i64 = format!("{year}-01-01T00:00:00.000").parse::<Timestamp>().unwrap().millis();
        let q_ts = year_start + rng.gen_range(0..YEAR_MS - 30 * 86_400_000);
        let asker = rng.gen_range(1..=n_users);

        let topic: Vec<&str> = (0..6).map(|_| pick(&mut rng, PROSE_WORDS)).collect();
        let mut q_body = String::new();
        for _ in 0..rng.gen_range(2..5) {
            let _ = write!(q_body, "<p>{}</p>\n", html_text(&sentence(&mut rng, &topic, 0.4, None)));
        }
        if rng.gen_bool(0.5) {
            let lines = rng.gen_range(1..4);
            let _ = write!(
                q_body,
                "<pre><code>{}</code></pre>\n",
                html_text(&code_block(&mut rng, lines, javascript))
            );
        }

        let n_answers = rng.gen_range(2..=5usize);
        let accepted_slot = rng.gen_range(0..n_answers);
        let mut answers = Vec::with_capacity(n_answers);
        for slot in 0..n_answers {
            let accepted = slot == accepted_slot;
            let id = next_id;
            next_id += 1;
            let mut owner = if accepted && rng.gen_bool(0.7) {
                by_rep[rng.gen_range(0..(n_users as usize / 5).max(1))]
            } else {
                rng.gen_range(1..=n_users)
            };
            if owner == asker {
                owner = owner % n_users + 1;
            }
            let owner = match kind {
                3 if accepted => Some(asker),
                4 if !accepted => None,
                _ => Some(owner),
            };
            let delay_minutes: f64 = if accepted {
                LogNormal::new(5.0, 1.2).unwrap().sample(&mut rng)
            } else {
                LogNormal::new(3.2, 1.2).unwrap().sample(&mut rng)
            };
            let ts = q_ts + (delay_minutes * 60_000.0) as i64 + rng.gen_range(0..1000);

            let topical = if accepted { 0.45 } else { 0.15 };
            let mut body = String::new();
            for _ in 0..rng.gen_range(1..5) {
                let sentiment = rng.gen_bool(0.3).then(|| pick(&mut rng, SENTIMENT));
                let _ = write!(body, "<p>{}</p>\n", html_text(&sentence(&mut rng, &topic, topical, sentiment)));
            }
            let code_p = if accepted { 0.85 } else { 0.4 };
            if rng.gen_bool(code_p) {
                let lines = if accepted { rng.gen_range(3..12) } else { rng.gen_range(1..5) };
                let _ = write!(
                    body,
                    "<pre><code>{}</code></pre>\n",
                    html_text(&code_block(&mut rng, lines, javascript))
                );
            }
            if rng.gen_bool(0.25) {
                let _ = write!(
                    body,
                    "<p>See https://docs.example.org/{} for details.</p>\n",
                    pick(&mut rng, PROSE_WORDS)
                );
            }
            answers.push(Answer {
                id,
                owner,
                ts,
                score: rng.gen_range(-1..6) + i64::from(accepted) * rng.gen_range(0..4),
                comments: rng.gen_range(0..5),
                body,
            });
        }
        let accepted_id = answers[accepted_slot].id;
        let views = rng.gen_range(20..5000);
        let _ = writeln!(
            posts,
            "  <row Id=\"{qid}\" PostTypeId=\"1\" AcceptedAnswerId=\"{accepted_id}\" CreationDate=\"{}\" Score=\"{}\" ViewCount=\"{views}\" Body=\"{}\" OwnerUserId=\"{asker}\" Title=\"question {qid}\" Tags=\"{}\" AnswerCount=\"{n_answers}\" CommentCount=\"{}\" />",
            Timestamp(q_ts).to_string().trim_end_matches('Z'),
            rng.gen_range(-2..20),
            xml_attr(&q_body),
            xml_attr(&tags.iter().map(|t| format!("<{t}>")).collect::<String>()),
            rng.gen_range(0..4),
        );
        for a in answers {
            let owner = a
                .owner
                .map(|o| format!(" OwnerUserId=\"{o}\""))
                .unwrap_or_default();
            let _ = writeln!(
                posts,
                "  <row Id=\"{}\" PostTypeId=\"2\" ParentId=\"{qid}\" CreationDate=\"{}\" Score=\"{}\" Body=\"{}\"{owner} CommentCount=\"{}\" />",
                a.id,
                Timestamp(a.ts).to_string().trim_end_matches('Z'),
                a.score,
                xml_attr(&a.body),
                a.comments,
            );
        }
    }
    posts.push_str("</posts>\n");
    DumpFixture {
        posts_xml: posts,
        users_xml: users,
    }
}

impl DumpFixture {
    /// Writes `Posts.xml` and `Users.xml` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in [("Posts.xml", &self.posts_xml), ("Users.xml", &self.users_xml)] {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}
