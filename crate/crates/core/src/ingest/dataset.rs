use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::rows::{PostRow, PostType, UserRow};
use crate::error::{Error, Result};

/// One answer of a [`QARecord`] together with its author and label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerEntry {
    pub post: PostRow,
    pub user: UserRow,
    pub accepted: bool,
}

/// A question with its surviving answers; the unit of analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QARecord {
    pub question: PostRow,
    pub answers: Vec<AnswerEntry>,
}

impl QARecord {
    pub fn accepted_count(&self) -> usize {
        self.answers.iter().filter(|a| a.accepted).count()
    }

    /// Checks the record invariants. `require_accepted` selects between
    /// "exactly one" and "at most one" accepted answer.
    pub fn validate(&self, require_accepted: bool) -> Result<()> {
        let q = &self.question;
        let bad = |msg: String| Err(Error::Data(format!("question {}: {msg}", q.id)));
        if q.post_type != PostType::Question || q.parent_id.is_some() {
            return bad("not a question row".into());
        }
        if self.answers.len() < 2 {
            return bad(format!("{} answers, need at least 2", self.answers.len()));
        }
        let accepted = self.accepted_count();
        if accepted > 1 || (require_accepted && accepted != 1) {
            return bad(format!("{accepted} accepted answers"));
        }
        for a in &self.answers {
            if a.post.parent_id != Some(q.id) {
                return bad(format!("answer {} has a different parent", a.post.id));
            }
            match a.post.owner_user_id {
                None => return bad(format!("answer {} has no registered owner", a.post.id)),
                Some(owner) if Some(owner) == q.owner_user_id => {
                    return bad(format!("answer {} is self-authored", a.post.id))
                }
                Some(owner) if owner != a.user.id => {
                    return bad(format!("answer {} joined to the wrong user", a.post.id))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Sampling rules applied while assembling records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestFilter {
    /// A question is kept when it carries at least one of these tags. An
    /// empty set disables the tag rule.
    pub tags_any_of: BTreeSet<String>,
    /// Inclusive range of question creation years.
    pub year_range: (i32, i32),
    /// When false, questions without an accepted answer are kept with every
    /// answer labeled unaccepted.
    pub require_accepted: bool,
}

impl Default for IngestFilter {
    fn default() -> Self {
        IngestFilter {
            tags_any_of: ["java", "javascript"].iter().map(|s| s.to_string()).collect(),
            year_range: (2014, 2016),
            require_accepted: true,
        }
    }
}

impl IngestFilter {
    pub fn validate(&self) -> Result<()> {
        if self.year_range.0 > self.year_range.1 {
            return Err(Error::Config(format!(
                "year range start {} is after end {}",
                self.year_range.0, self.year_range.1
            )));
        }
        Ok(())
    }
}

/// Why a question or answer was left out of the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiscardReason {
    TagFilter,
    YearFilter,
    NoAcceptedAnswer,
    UnregisteredAnswerer,
    UnknownUser,
    SelfAnswer,
    AcceptedAnswerSelfAuthored,
    AcceptedAnswerMissing,
    FewerThanTwoAnswers,
    OrphanAnswer,
}

impl DiscardReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DiscardReason::TagFilter => "question_tag_filter",
            DiscardReason::YearFilter => "question_year_filter",
            DiscardReason::NoAcceptedAnswer => "question_no_accepted_answer",
            DiscardReason::UnregisteredAnswerer => "answer_unregistered_owner",
            DiscardReason::UnknownUser => "answer_owner_not_in_users",
            DiscardReason::SelfAnswer => "answer_by_question_owner",
            DiscardReason::AcceptedAnswerSelfAuthored => "question_accepted_answer_self_authored",
            DiscardReason::AcceptedAnswerMissing => "question_accepted_answer_missing",
            DiscardReason::FewerThanTwoAnswers => "question_fewer_than_two_answers",
            DiscardReason::OrphanAnswer => "answer_without_question",
        }
    }
}

/// Counters written to `ingest_report.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub questions_seen: u64,
    pub answers_seen: u64,
    pub records: u64,
    pub answers: u64,
    pub accepted_answers: u64,
    pub discards: BTreeMap<String, u64>,
}

impl IngestReport {
    fn discard(&mut self, reason: DiscardReason) {
        *self.discards.entry(reason.as_str().to_string()).or_default() += 1;
    }

    pub fn count(&self, reason: DiscardReason) -> u64 {
        self.discards.get(reason.as_str()).copied().unwrap_or(0)
    }
}

/// Assembles labeled records from decoded posts.
///
/// Input order does not matter: questions are emitted by ascending id and
/// answers within a record by ascending id.
pub fn build_dataset<I>(
    posts: I,
    users: &HashMap<i64, UserRow>,
    filter: &IngestFilter,
) -> (Vec<QARecord>, IngestReport)
where
    I: IntoIterator<Item = PostRow>,
{
    let mut report = IngestReport::default();
    let mut questions = BTreeMap::new();
    let mut answers: HashMap<i64, Vec<PostRow>> = HashMap::new();
    for post in posts {
        match post.post_type {
            PostType::Question => {
                report.questions_seen += 1;
                questions.insert(post.id, post);
            }
            PostType::Answer => {
                report.answers_seen += 1;
                if let Some(parent) = post.parent_id {
                    answers.entry(parent).or_default().push(post);
                }
            }
            PostType::Other => {}
        }
    }
    for (parent, list) in &answers {
        if !questions.contains_key(parent) {
            for _ in list {
                report.discard(DiscardReason::OrphanAnswer);
            }
        }
    }

    let mut records = Vec::new();
    for (qid, question) in questions {
        if !filter.tags_any_of.is_empty()
            && !question.tags.iter().any(|t| filter.tags_any_of.contains(t))
        {
            report.discard(DiscardReason::TagFilter);
            continue;
        }
        let year = question.creation_ts.year();
        if year < filter.year_range.0 || year > filter.year_range.1 {
            report.discard(DiscardReason::YearFilter);
            continue;
        }
        let accepted_id = question.accepted_answer_id;
        if filter.require_accepted && accepted_id.is_none() {
            report.discard(DiscardReason::NoAcceptedAnswer);
            continue;
        }

        let mut candidates = answers.remove(&qid).unwrap_or_default();
        candidates.sort_by_key(|a| a.id);
        let mut kept = Vec::with_capacity(candidates.len());
        let mut accepted_fate = None;
        for answer in candidates {
            let is_accepted = Some(answer.id) == accepted_id;
            let reason = match answer.owner_user_id {
                None => Some(DiscardReason::UnregisteredAnswerer),
                Some(owner) if Some(owner) == question.owner_user_id => {
                    Some(DiscardReason::SelfAnswer)
                }
                Some(owner) if !users.contains_key(&owner) => Some(DiscardReason::UnknownUser),
                Some(_) => None,
            };
            if let Some(reason) = reason {
                report.discard(reason);
                if is_accepted {
                    accepted_fate = Some(reason);
                }
                continue;
            }
            let user = users[&answer.owner_user_id.unwrap()].clone();
            kept.push(AnswerEntry {
                post: answer,
                user,
                accepted: is_accepted,
            });
        }

        if accepted_id.is_some() && !kept.iter().any(|a| a.accepted) {
            let reason = if accepted_fate == Some(DiscardReason::SelfAnswer) {
                DiscardReason::AcceptedAnswerSelfAuthored
            } else {
                DiscardReason::AcceptedAnswerMissing
            };
            report.discard(reason);
            continue;
        }
        if kept.len() < 2 {
            report.discard(DiscardReason::FewerThanTwoAnswers);
            continue;
        }
        report.records += 1;
        report.answers += kept.len() as u64;
        report.accepted_answers += kept.iter().filter(|a| a.accepted).count() as u64;
        records.push(QARecord {
            question,
            answers: kept,
        });
    }
    (records, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::rows::Timestamp;

    fn ts(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    fn question(id: i64, owner: i64, accepted: Option<i64>, tags: &[&str], date: &str) -> PostRow {
        PostRow {
            id,
            post_type: PostType::Question,
            parent_id: None,
            accepted_answer_id: accepted,
            creation_ts: ts(date),
            score: 1,
            view_count: Some(10),
            body: "<p>how?</p>".into(),
            owner_user_id: Some(owner),
            tags: tags.iter().map(|s| s.to_string()).collect(),
            answer_count: None,
            comment_count: 0,
        }
    }

    fn answer(id: i64, parent: i64, owner: Option<i64>) -> PostRow {
        PostRow {
            id,
            post_type: PostType::Answer,
            parent_id: Some(parent),
            accepted_answer_id: None,
            creation_ts: ts("2015-01-01T01:00:00.000"),
            score: 0,
            view_count: None,
            body: "<p>like this</p>".into(),
            owner_user_id: owner,
            tags: vec![],
            answer_count: None,
            comment_count: 0,
        }
    }

    fn users(ids: &[i64]) -> HashMap<i64, UserRow> {
        ids.iter()
            .map(|&id| {
                (
                    id,
                    UserRow {
                        id,
                        reputation: 100 * id as u64,
                        creation_ts: ts("2010-01-01T00:00:00.000"),
                    },
                )
            })
            .collect()
    }

    #[test]
    fn keeps_valid_question() {
        let posts = vec![
            question(1, 100, Some(11), &["java"], "2015-01-01T00:00:00.000"),
            answer(11, 1, Some(1)),
            answer(12, 1, Some(2)),
            answer(13, 1, Some(3)),
        ];
        let (records, report) = build_dataset(posts, &users(&[1, 2, 3, 100]), &IngestFilter::default());
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].answers.len(), 3);
        assert_eq!(records[0].accepted_count(), 1);
        assert!(records[0].answers[0].accepted);
        records[0].validate(true).unwrap();
        assert_eq!(report.records, 1);
        assert_eq!(report.accepted_answers, 1);
    }

    #[test]
    fn drops_self_accepted() {
        let posts = vec![
            question(1, 100, Some(11), &["java"], "2015-01-01T00:00:00.000"),
            answer(11, 1, Some(100)),
            answer(12, 1, Some(2)),
            answer(13, 1, Some(3)),
        ];
        let (records, report) = build_dataset(posts, &users(&[2, 3, 100]), &IngestFilter::default());
        assert!(records.is_empty());
        assert_eq!(report.count(DiscardReason::AcceptedAnswerSelfAuthored), 1);
        assert_eq!(report.count(DiscardReason::SelfAnswer), 1);
    }

    #[test]
    fn three_question_trace() {
        // q1: 2 answers, one unregistered -> falls below two answers.
        // q2: python only -> tag filter.
        // q3: 2013 -> year filter.
        let posts = vec![
            question(1, 100, Some(11), &["javascript"], "2014-06-01T00:00:00.000"),
            answer(11, 1, Some(1)),
            answer(12, 1, None),
            question(2, 100, Some(21), &["python"], "2015-06-01T00:00:00.000"),
            answer(21, 2, Some(1)),
            answer(22, 2, Some(2)),
            question(3, 100, Some(31), &["java"], "2013-06-01T00:00:00.000"),
            answer(31, 3, Some(1)),
            answer(32, 3, Some(2)),
        ];
        let (records, report) = build_dataset(posts, &users(&[1, 2, 100]), &IngestFilter::default());
        assert!(records.is_empty());
        assert_eq!(report.count(DiscardReason::FewerThanTwoAnswers), 1);
        assert_eq!(report.count(DiscardReason::UnregisteredAnswerer), 1);
        assert_eq!(report.count(DiscardReason::TagFilter), 1);
        assert_eq!(report.count(DiscardReason::YearFilter), 1);
    }

    #[test]
    fn accepted_answer_missing() {
        let posts = vec![
            question(1, 100, Some(99), &["java"], "2015-01-01T00:00:00.000"),
            answer(11, 1, Some(1)),
            answer(12, 1, Some(2)),
        ];
        let (records, report) = build_dataset(posts, &users(&[1, 2]), &IngestFilter::default());
        assert!(records.is_empty());
        assert_eq!(report.count(DiscardReason::AcceptedAnswerMissing), 1);
    }

    #[test]
    fn order_insensitive() {
        let mut posts = vec![
            question(2, 100, Some(21), &["java"], "2015-01-01T00:00:00.000"),
            answer(21, 2, Some(1)),
            answer(22, 2, Some(2)),
            question(1, 100, Some(12), &["java"], "2015-01-01T00:00:00.000"),
            answer(11, 1, Some(1)),
            answer(12, 1, Some(2)),
        ];
        let u = users(&[1, 2]);
        let (a, _) = build_dataset(posts.clone(), &u, &IngestFilter::default());
        posts.reverse();
        let (b, _) = build_dataset(posts, &u, &IngestFilter::default());
        assert_eq!(a, b);
        assert_eq!(a[0].question.id, 1);
    }

    #[test]
    fn inverted_year_range_rejected() {
        let filter = IngestFilter {
            year_range: (2016, 2014),
            ..IngestFilter::default()
        };
        assert!(matches!(filter.validate(), Err(Error::Config(_))));
    }
}
