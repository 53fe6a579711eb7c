//! Deterministic tokenization shared by every n-gram metric and by the
//! lexical control token.

use alloc::string::String;
use alloc::vec::Vec;

/// Splits `text` into lowercase tokens.
///
/// Whitespace separates tokens. Every character that is neither
/// alphanumeric nor whitespace becomes a token of its own, so
/// `"TKA (n = 18)"` yields `["tka", "(", "n", "=", "18", ")"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in lowered.chars() {
        if ch.is_alphanumeric() {
            word.push(ch);
            continue;
        }
        if !word.is_empty() {
            tokens.push(core::mem::take(&mut word));
        }
        if !ch.is_whitespace() {
            tokens.push(String::from(ch));
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// True for tokens made only of punctuation or symbol characters.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric())
}

/// All contiguous n-grams of `tokens`, in order, as slices.
pub(crate) fn ngrams<T>(tokens: &[T], n: usize) -> impl Iterator<Item = &[T]> {
    let count = if n == 0 {
        0
    } else {
        (tokens.len() + 1).saturating_sub(n)
    };
    (0..count).map(move |i| &tokens[i..i + n])
}
