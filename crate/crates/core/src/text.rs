//! Tokenization shared by keyword matching and sentiment scoring.

/// Splits `text` into lowercase tokens.
///
/// A token is a maximal run of alphanumeric characters or `_`, optionally
/// carrying a single leading `#` or `@` when that sigil immediately precedes
/// the run. Everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut pending_sigil: Option<char> = None;

    let flush = |current: &mut String, out: &mut Vec<String>| {
        if !current.is_empty() {
            out.push(std::mem::take(current));
        }
    };

    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' {
            if current.is_empty() {
                if let Some(s) = pending_sigil.take() {
                    current.push(s);
                }
            }
            current.extend(ch.to_lowercase());
        } else {
            flush(&mut current, &mut out);
            pending_sigil = matches!(ch, '#' | '@').then_some(ch);
        }
    }
    flush(&mut current, &mut out);
    out
}

/// The token with any `#`/`@` sigil removed.
pub fn bare(token: &str) -> &str {
    token.trim_start_matches(['#', '@'])
}
