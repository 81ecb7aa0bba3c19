/// Splits text into lowercase alphanumeric terms.
///
/// Any character that is not alphanumeric separates terms and empty
/// fragments are dropped. There is no stemming and no stopword list.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            // Some lowercase expansions add combining marks; those are dropped.
            current.extend(c.to_lowercase().filter(|l| l.is_alphanumeric()));
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
