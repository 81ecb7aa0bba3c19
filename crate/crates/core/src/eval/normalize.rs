use crate::corpus::Passage;

const ARTICLES: [&str; 3] = ["a", "an", "the"];

/// Lowercases, strips punctuation, drops the articles "a", "an" and "the",
/// and collapses whitespace.
///
/// Punctuation is any character that is neither alphanumeric nor
/// whitespace. It is deleted rather than replaced, so "U.S." becomes "us".
pub fn normalize_answer(s: &str) -> String {
    let stripped: String = s
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    stripped
        .split_whitespace()
        .filter(|w| !ARTICLES.contains(w))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Tokens of [`normalize_answer`].
pub fn normalized_tokens(s: &str) -> Vec<String> {
    normalize_answer(s)
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// True when `needle` occurs as a contiguous run inside `haystack`. An
/// empty needle never matches.
pub fn contains_run<T: PartialEq>(haystack: &[T], needle: &[T]) -> bool {
    !needle.is_empty()
        && needle.len() <= haystack.len()
        && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Whether any answer's normalized tokens appear contiguously in the
/// normalized title and text of the passage.
pub fn passage_contains_answer<S: AsRef<str>>(passage: &Passage, answers: &[S]) -> bool {
    let tokens = normalized_tokens(&passage.full_text());
    answers
        .iter()
        .any(|a| contains_run(&tokens, &normalized_tokens(a.as_ref())))
}

/// Normalized-string equality against any reference answer.
pub fn exact_match<S: AsRef<str>>(prediction: &str, answers: &[S]) -> bool {
    let pred = normalize_answer(prediction);
    answers.iter().any(|a| normalize_answer(a.as_ref()) == pred)
}
