//! Length-lexicographic ordering and bounded word enumeration.

use std::cmp::Ordering;

/// Shorter strings first, equal lengths compared lexicographically.
pub fn lex_len_cmp(a: &str, b: &str) -> Ordering {
    a.chars()
        .count()
        .cmp(&b.chars().count())
        .then_with(|| a.cmp(b))
}

/// All words over `alphabet` of length at most `max_len`, in lex-len order.
pub fn words_up_to(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        if alphabet.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &c in &alphabet {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `true` iff `prefix` is a prefix of `s`.
pub fn is_prefix(prefix: &str, s: &str) -> bool {
    s.starts_with(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering() {
        let mut v = vec!["b", "aa", "", "a", "ab"];
        v.sort_by(|a, b| lex_len_cmp(a, b));
        assert_eq!(v, vec!["", "a", "b", "aa", "ab"]);
    }

    #[test]
    fn enumeration_counts() {
        let w = words_up_to(&['a', 'b'], 2);
        assert_eq!(w, vec!["", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(words_up_to(&['a', 'b'], 6).len(), 127);
        assert_eq!(words_up_to(&[], 3), vec![String::new()]);
    }
}
