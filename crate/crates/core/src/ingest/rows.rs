use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::xml::AttrMap;
use crate::error::{Error, Result};

/// UTC instant with millisecond precision, stored as milliseconds since the
/// Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn millis(self) -> i64 {
        self.0
    }

    pub fn year(self) -> i32 {
        use chrono::Datelike;
        self.to_datetime().year()
    }

    fn to_datetime(self) -> NaiveDateTime {
        DateTime::from_timestamp_millis(self.0)
            .expect("timestamp in chrono range")
            .naive_utc()
    }
}

impl FromStr for Timestamp {
    type Err = chrono::ParseError;

    /// Accepts the dump layout `2014-03-01T10:00:00.000`, with or without a
    /// trailing `Z` and with any number of fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_suffix('Z').unwrap_or(s);
        let naive = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")?;
        Ok(Timestamp(naive.and_utc().timestamp_millis()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_datetime().format("%Y-%m-%dT%H:%M:%S%.3fZ"))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostType {
    Question,
    Answer,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRow {
    pub id: i64,
    pub post_type: PostType,
    pub parent_id: Option<i64>,
    pub accepted_answer_id: Option<i64>,
    pub creation_ts: Timestamp,
    pub score: i64,
    pub view_count: Option<u64>,
    pub body: String,
    pub owner_user_id: Option<i64>,
    pub tags: Vec<String>,
    pub answer_count: Option<u64>,
    pub comment_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRow {
    pub id: i64,
    pub reputation: u64,
    pub creation_ts: Timestamp,
}

fn required<'a>(attrs: &'a AttrMap, name: &str) -> Result<&'a str> {
    attrs
        .get(name)
        .map(String::as_str)
        .ok_or_else(|| Error::decode(name, "missing required attribute"))
}

fn parse_num<T: FromStr>(name: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.trim()
        .parse()
        .map_err(|e: T::Err| Error::decode(name, format!("{raw:?}: {e}")))
}

fn optional<T: FromStr>(attrs: &AttrMap, name: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    attrs.get(name).map(|raw| parse_num(name, raw)).transpose()
}

fn timestamp(name: &str, raw: &str) -> Result<Timestamp> {
    raw.parse()
        .map_err(|e| Error::decode(name, format!("{raw:?}: {e}")))
}

/// Splits the `<java><arrays>` tag encoding into lowercase tag names.
/// The newer `|java|arrays|` encoding is accepted as well.
pub fn parse_tags(raw: &str) -> Vec<String> {
    raw.split(['<', '>', '|'])
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn decode_post(attrs: &AttrMap) -> Result<PostRow> {
    let id = parse_num("Id", required(attrs, "Id")?)?;
    let post_type = match parse_num::<i64>("PostTypeId", required(attrs, "PostTypeId")?)? {
        1 => PostType::Question,
        2 => PostType::Answer,
        _ => PostType::Other,
    };
    let creation_ts = timestamp("CreationDate", required(attrs, "CreationDate")?)?;
    let mut post = PostRow {
        id,
        post_type,
        parent_id: optional(attrs, "ParentId")?,
        accepted_answer_id: optional(attrs, "AcceptedAnswerId")?,
        creation_ts,
        score: optional(attrs, "Score")?.unwrap_or(0),
        view_count: optional(attrs, "ViewCount")?,
        body: attrs.get("Body").cloned().unwrap_or_default(),
        owner_user_id: optional(attrs, "OwnerUserId")?,
        tags: attrs.get("Tags").map(|t| parse_tags(t)).unwrap_or_default(),
        answer_count: optional(attrs, "AnswerCount")?,
        comment_count: optional(attrs, "CommentCount")?.unwrap_or(0),
    };
    match post.post_type {
        PostType::Question => {
            if post.parent_id.is_some() {
                return Err(Error::decode("ParentId", "questions cannot have a parent"));
            }
        }
        PostType::Answer => {
            if post.parent_id.is_none() {
                return Err(Error::decode("ParentId", "missing on an answer"));
            }
            post.tags.clear();
            post.accepted_answer_id = None;
        }
        PostType::Other => {}
    }
    Ok(post)
}

pub fn decode_user(attrs: &AttrMap) -> Result<UserRow> {
    let id = parse_num("Id", required(attrs, "Id")?)?;
    let reputation: i64 = parse_num("Reputation", required(attrs, "Reputation")?)?;
    if reputation < 0 {
        return Err(Error::decode("Reputation", format!("negative value {reputation}")));
    }
    let creation_ts = timestamp("CreationDate", required(attrs, "CreationDate")?)?;
    Ok(UserRow {
        id,
        reputation: reputation as u64,
        creation_ts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(pairs: &[(&str, &str)]) -> AttrMap {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn question_with_tags() {
        let post = decode_post(&attrs(&[
            ("Id", "5"),
            ("PostTypeId", "1"),
            ("CreationDate", "2014-03-01T10:00:00.000"),
            ("Tags", "<java>"),
        ]))
        .unwrap();
        assert_eq!(post.id, 5);
        assert_eq!(post.post_type, PostType::Question);
        assert_eq!(post.tags, ["java"]);
        assert_eq!(post.parent_id, None);
        assert_eq!(post.view_count, None);
        assert_eq!(post.comment_count, 0);
        assert_eq!(post.creation_ts.to_string(), "2014-03-01T10:00:00.000Z");
    }

    #[test]
    fn answer_with_parent() {
        let post = decode_post(&attrs(&[
            ("Id", "6"),
            ("PostTypeId", "2"),
            ("ParentId", "5"),
            ("CreationDate", "2014-03-01T11:00:00.250"),
            ("Score", "-2"),
            ("CommentCount", "4"),
            ("OwnerUserId", "9"),
        ]))
        .unwrap();
        assert_eq!(post.post_type, PostType::Answer);
        assert_eq!(post.parent_id, Some(5));
        assert_eq!(post.score, -2);
        assert_eq!(post.comment_count, 4);
        assert_eq!(post.owner_user_id, Some(9));
        assert!(post.tags.is_empty());
    }

    #[test]
    fn other_post_types() {
        let post = decode_post(&attrs(&[
            ("Id", "8"),
            ("PostTypeId", "5"),
            ("CreationDate", "2014-03-01T10:00:00.000"),
        ]))
        .unwrap();
        assert_eq!(post.post_type, PostType::Other);
    }

    #[test]
    fn missing_creation_date_names_attribute() {
        let err = decode_post(&attrs(&[("Id", "7"), ("PostTypeId", "1")])).unwrap_err();
        match err {
            Error::Decode { attr, .. } => assert_eq!(attr, "CreationDate"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_integer_names_attribute() {
        let err = decode_post(&attrs(&[
            ("Id", "7"),
            ("PostTypeId", "1"),
            ("CreationDate", "2014-03-01T10:00:00.000"),
            ("ViewCount", "lots"),
        ]))
        .unwrap_err();
        assert!(err.to_string().contains("ViewCount"));
    }

    #[test]
    fn user_rows() {
        let user = decode_user(&attrs(&[
            ("Id", "9"),
            ("Reputation", "1500"),
            ("CreationDate", "2012-01-01T00:00:00.000"),
        ]))
        .unwrap();
        assert_eq!(user.id, 9);
        assert_eq!(user.reputation, 1500);
        assert_eq!(user.creation_ts, "2012-01-01T00:00:00Z".parse().unwrap());

        let negative = decode_user(&attrs(&[
            ("Id", "9"),
            ("Reputation", "-1"),
            ("CreationDate", "2012-01-01T00:00:00.000"),
        ]));
        assert!(matches!(negative, Err(Error::Decode { ref attr, .. }) if attr == "Reputation"));

        let no_id = decode_user(&attrs(&[("Reputation", "10")]));
        assert!(matches!(no_id, Err(Error::Decode { ref attr, .. }) if attr == "Id"));
    }

    #[test]
    fn timestamp_round_trip_keeps_millis() {
        let ts: Timestamp = "2016-12-31T23:59:59.987".parse().unwrap();
        assert_eq!(ts.to_string(), "2016-12-31T23:59:59.987Z");
        assert_eq!(ts.to_string().parse::<Timestamp>().unwrap(), ts);
        assert_eq!(ts.year(), 2016);
    }

    #[test]
    fn tag_encodings() {
        assert_eq!(parse_tags("<java><arrays>"), ["java", "arrays"]);
        assert_eq!(parse_tags("|Java|arrays|"), ["java", "arrays"]);
        assert!(parse_tags("").is_empty());
    }
}
