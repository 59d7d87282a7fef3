/// Word tokens of a text, lowercased, with the original-case spelling of
/// each token kept alongside for case-sensitive alias matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    lower: Vec<String>,
    original: Vec<String>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Lowercased tokens.
    pub fn tokens(&self) -> &[String] {
        &self.lower
    }

    /// Tokens as they appeared in the source text.
    pub fn original(&self) -> &[String] {
        &self.original
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.lower.iter().map(String::as_str)
    }

    /// Appends the tokens of `other`, as if the two texts were adjacent.
    pub fn extend(&mut self, other: TokenStream) {
        self.lower.extend(other.lower);
        self.original.extend(other.original);
    }
}

impl<S: AsRef<str>> FromIterator<S> for TokenStream {
    /// Builds a stream from already-split words. Each word is run through
    /// [`preprocess`], so the stream invariants hold for arbitrary input.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut out = TokenStream::default();
        for word in iter {
            out.extend(preprocess(word.as_ref()));
        }
        out
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Splits `text` into word tokens.
///
/// A token is a maximal run of alphanumeric characters, where a hyphen or
/// apostrophe is kept only when it sits between two alphanumerics
/// ("state-of-the-art", "isn't"). Everything else separates tokens.
pub fn preprocess(text: &str) -> TokenStream {
    let chars: Vec<char> = text.chars().collect();
    let mut out = TokenStream::default();
    let mut current = String::new();

    let flush = |current: &mut String, out: &mut TokenStream| {
        if !current.is_empty() {
            out.lower.push(current.to_lowercase());
            out.original.push(std::mem::take(current));
        }
    };

    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
        } else if is_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push(if c == '\u{2019}' { '\'' } else { c });
        } else {
            flush(&mut current, &mut out);
        }
    }
    flush(&mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_punctuation_and_lowercases() {
        let ts = preprocess("Profits SOAR, loss shrinks.");
        assert_eq!(ts.tokens(), ["profits", "soar", "loss", "shrinks"]);
        assert_eq!(ts.original(), ["Profits", "SOAR", "loss", "shrinks"]);
    }

    #[test]
    fn empty_text() {
        assert!(preprocess("").is_empty());
        assert!(preprocess("  ... !! ").is_empty());
    }

    #[test]
    fn keeps_intra_word_joiners() {
        assert_eq!(preprocess("state-of-the-art").tokens(), ["state-of-the-art"]);
        assert_eq!(preprocess("it isn't").tokens(), ["it", "isn't"]);
        assert_eq!(preprocess("it isn\u{2019}t").tokens(), ["it", "isn't"]);
        assert_eq!(
            preprocess("-dash- 'quoted' end-").tokens(),
            ["dash", "quoted", "end"]
        );
        assert_eq!(preprocess("a -- b").tokens(), ["a", "b"]);
    }

    #[test]
    fn symbols_split_words() {
        assert_eq!(preprocess("AT&T, Inc.").original(), ["AT", "T", "Inc"]);
    }

    proptest! {
        #[test]
        fn tokens_are_clean(text in "\\PC{0,80}") {
            let ts = preprocess(&text);
            prop_assert_eq!(ts.tokens().len(), ts.original().len());
            for (lower, orig) in ts.tokens().iter().zip(ts.original()) {
                prop_assert!(!lower.is_empty());
                prop_assert_eq!(lower, &orig.to_lowercase());
                let first = orig.chars().next().unwrap();
                let last = orig.chars().last().unwrap();
                prop_assert!(first.is_alphanumeric() && last.is_alphanumeric());
                prop_assert!(orig.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '\''));
            }
        }

        #[test]
        fn preprocessing_is_idempotent(text in "\\PC{0,80}") {
            let once = preprocess(&text);
            let twice = preprocess(&once.original().join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
