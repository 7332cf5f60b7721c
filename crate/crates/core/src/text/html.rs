use html_escape::decode_html_entities;

/// An answer body split into plain prose and raw code blocks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerParts {
    pub prose_text: String,
    pub code_blocks: Vec<String>,
    /// Set when a `<code>` element was never closed; its span then runs to
    /// the end of the body.
    pub unclosed_code: bool,
}

struct Tag<'a> {
    name: &'a str,
    closing: bool,
    end: usize,
}

/// Parses the tag starting at `start` (which holds `<`). Returns `None` when
/// the `<` does not begin a well-formed tag.
fn tag_at(body: &str, start: usize) -> Option<Tag<'_>> {
    let rest = &body[start + 1..];
    let (closing, name_start) = match rest.strip_prefix('/') {
        Some(_) => (true, start + 2),
        None => (false, start + 1),
    };
    let name_len = body[name_start..]
        .find(|c: char| !c.is_ascii_alphanumeric())
        .unwrap_or(body.len() - name_start);
    if name_len == 0 && !rest.starts_with('!') {
        return None;
    }
    let end = start + rest.find('>')? + 2;
    Some(Tag {
        name: &body[name_start..name_start + name_len],
        closing,
        end,
    })
}

fn is_code(tag: &Tag<'_>) -> bool {
    tag.name.eq_ignore_ascii_case("code")
}

fn push_fragment(prose: &mut String, fragment: &str, separated: bool) {
    if fragment.is_empty() {
        return;
    }
    let needs_space = separated
        && prose.chars().last().is_some_and(|c| !c.is_whitespace())
        && fragment.chars().next().is_some_and(char::is_alphanumeric);
    if needs_space {
        prose.push(' ');
    }
    prose.push_str(fragment);
}

/// Drops every tag inside a code span, keeping the text between them.
fn strip_tags(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut i = 0;
    while let Some(offset) = raw[i..].find('<') {
        let at = i + offset;
        out.push_str(&raw[i..at]);
        match tag_at(raw, at) {
            Some(tag) => i = tag.end,
            None => {
                out.push('<');
                i = at + 1;
            }
        }
    }
    out.push_str(&raw[i..]);
    out
}

/// Separates `<code>` spans from the prose of an HTML body.
///
/// Each outermost `<code>...</code>` span (also inside `<pre>`) becomes one
/// code block. All other markup is removed from the prose, with a single
/// space standing in for removed markup between two words. Entities are
/// decoded in both parts.
pub fn split_code_blocks(body: &str) -> AnswerParts {
    let mut parts = AnswerParts::default();
    let mut prose = String::with_capacity(body.len());
    let mut separated = false;
    let mut i = 0;
    while let Some(offset) = body[i..].find('<') {
        let at = i + offset;
        let Some(tag) = tag_at(body, at) else {
            // A stray `<` is text.
            let text = format!("{}<", decode_html_entities(&body[i..at]));
            push_fragment(&mut prose, &text, separated);
            separated = false;
            i = at + 1;
            continue;
        };
        push_fragment(&mut prose, &decode_html_entities(&body[i..at]), separated);
        if is_code(&tag) && !tag.closing {
            let content_start = tag.end;
            let mut depth = 1;
            let mut j = content_start;
            let mut content_end = None;
            while let Some(offset) = body[j..].find('<') {
                let at = j + offset;
                match tag_at(body, at) {
                    Some(inner) if is_code(&inner) => {
                        if inner.closing {
                            depth -= 1;
                            if depth == 0 {
                                content_end = Some((at, inner.end));
                                break;
                            }
                        } else {
                            depth += 1;
                        }
                        j = inner.end;
                    }
                    Some(inner) => j = inner.end,
                    None => j = at + 1,
                }
            }
            let (content_end, resume) = content_end.unwrap_or_else(|| {
                parts.unclosed_code = true;
                (body.len(), body.len())
            });
            let raw = strip_tags(&body[content_start..content_end]);
            parts.code_blocks.push(decode_html_entities(&raw).into_owned());
            i = resume;
        } else {
            i = tag.end;
        }
        separated = true;
    }
    push_fragment(&mut prose, &decode_html_entities(&body[i..]), separated);
    parts.prose_text = prose;
    parts
}
