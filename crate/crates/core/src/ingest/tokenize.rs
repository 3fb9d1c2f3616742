//! Identifier splitting and IR-token normalization.
//!
//! Two pipelines share the splitter: IR tokens (comments and public variable
//! identifiers) are lowercased, filtered and stemmed into a [`TokenBag`];
//! concept words (class and method names) keep their surface form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Upper,
    Lower,
    Digit,
}

fn classify(c: char) -> CharClass {
    if c.is_numeric() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else {
        CharClass::Lower
    }
}

/// Splits free text or an identifier into words.
///
/// Whitespace and punctuation (anything not alphanumeric, including `_`)
/// separate words. Inside a word, a lower-to-upper transition starts a new
/// word, an uppercase run followed by an upper-lower pair breaks before the
/// last uppercase letter (`HTTPResponse` -> `HTTP`, `Response`), and digit
/// runs stand alone.
pub fn tokenize_identifier(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in s.split(|c: char| !c.is_alphanumeric()) {
        if !chunk.is_empty() {
            split_chunk(chunk, &mut out);
        }
    }
    out
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = classify(chars[i - 1]);
        let cur = classify(chars[i]);
        let boundary = match (prev, cur) {
            (CharClass::Digit, CharClass::Digit) => false,
            (CharClass::Digit, _) | (_, CharClass::Digit) => true,
            (CharClass::Lower, CharClass::Upper) => true,
            (CharClass::Upper, CharClass::Upper) => chars.get(i + 1).is_some_and(|&n| classify(n) == CharClass::Lower),
            _ => false,
        };
        if boundary {
            out.push(chars[start..i].iter().collect());
            start = i;
        }
    }
    out.push(chars[start..].iter().collect());
}

/// Pluggable stemming function. The default is the Snowball English
/// (Porter2) algorithm; a software-specific stemmer can be dropped in.
pub trait Stemmer: Send + Sync {
    fn stem(&self, word: &str) -> String;
}

pub struct PorterStemmer(rust_stemmers::Stemmer);

impl PorterStemmer {
    pub fn new() -> Self {
        PorterStemmer(rust_stemmers::Stemmer::create(rust_stemmers::Algorithm::English))
    }
}

impl Default for PorterStemmer {
    fn default() -> Self {
        Self::new()
    }
}

impl Stemmer for PorterStemmer {
    fn stem(&self, word: &str) -> String {
        self.0.stem(word).into_owned()
    }
}

impl fmt::Debug for PorterStemmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PorterStemmer")
    }
}

/// Leaves words untouched.
#[derive(Debug, Default, Clone, Copy)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem(&self, word: &str) -> String {
        word.to_string()
    }
}

/// Multiset of normalized IR tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: impl Into<String>, n: u32) {
        if n > 0 {
            *self.counts.entry(token.into()).or_insert(0) += n;
        }
    }

    pub fn merge(&mut self, other: &TokenBag) {
        for (t, &n) in &other.counts {
            self.add(t.clone(), n);
        }
    }

    pub fn get(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sum of all frequencies.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&n| n as u64).sum()
    }

    /// Tokens expanded by multiplicity, in sorted order.
    pub fn expanded(&self) -> Vec<String> {
        self.counts
            .iter()
            .flat_map(|(t, &n)| std::iter::repeat_n(t.clone(), n as usize))
            .collect()
    }
}

impl<S: Into<String>> FromIterator<(S, u32)> for TokenBag {
    fn from_iter<I: IntoIterator<Item = (S, u32)>>(iter: I) -> Self {
        let mut bag = TokenBag::new();
        for (t, n) in iter {
            bag.add(t, n);
        }
        bag
    }
}

/// Lowercases, drops reserved words, stop words and purely numeric tokens,
/// then stems what remains and counts it.
///
/// Stemming is iterated to a fixpoint and stems that collapse onto a stop or
/// reserved word are dropped, so feeding the output back in is a no-op.
pub fn normalize_tokens<S: AsRef<str>>(
    words: &[S],
    reserved: &BTreeSet<String>,
    stop: &BTreeSet<String>,
    stemmer: &dyn Stemmer,
) -> TokenBag {
    let mut bag = TokenBag::new();
    for w in words {
        let lower = w.as_ref().to_lowercase();
        if lower.is_empty() || lower.chars().all(|c| c.is_numeric()) {
            continue;
        }
        if reserved.contains(&lower) || stop.contains(&lower) {
            continue;
        }
        let stem = stem_fixpoint(&lower, stemmer);
        if stem.is_empty() || reserved.contains(&stem) || stop.contains(&stem) {
            continue;
        }
        bag.add(stem, 1);
    }
    bag
}

fn stem_fixpoint(word: &str, stemmer: &dyn Stemmer) -> String {
    let mut cur = word.to_string();
    // Porter stems converge in a couple of rounds; the bound only guards
    // against a pathological plug-in stemmer that cycles.
    for _ in 0..8 {
        let next = stemmer.stem(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Reserved words of the Java language profile, including literals.
pub const JAVA_RESERVED: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "var",
    "record",
    "yield",
    "sealed",
    "permits",
];

/// English stop words.
pub const ENGLISH_STOP_WORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "also",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "either",
    "etc",
    "few",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "i",
    "ie",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "just",
    "may",
    "me",
    "might",
    "more",
    "most",
    "must",
    "my",
    "myself",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "only",
    "or",
    "other",
    "ought",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "same",
    "shall",
    "she",
    "should",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "through",
    "to",
    "too",
    "under",
    "until",
    "up",
    "upon",
    "us",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "why",
    "will",
    "with",
    "within",
    "without",
    "would",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

/// Reserved words, stop words and a stemmer bundled as one IR-token pipeline.
pub struct Normalizer {
    pub reserved: BTreeSet<String>,
    pub stop: BTreeSet<String>,
    pub stemmer: Box<dyn Stemmer>,
}

impl Normalizer {
    /// Java keywords, the built-in English stop list and the Porter2 stemmer.
    pub fn java_default() -> Self {
        Normalizer {
            reserved: JAVA_RESERVED.iter().map(|s| s.to_string()).collect(),
            stop: ENGLISH_STOP_WORDS.iter().map(|s| s.to_string()).collect(),
            stemmer: Box::new(PorterStemmer::new()),
        }
    }

    pub fn with_stemmer(mut self, stemmer: Box<dyn Stemmer>) -> Self {
        self.stemmer = stemmer;
        self
    }

    pub fn normalize<S: AsRef<str>>(&self, words: &[S]) -> TokenBag {
        normalize_tokens(words, &self.reserved, &self.stop, self.stemmer.as_ref())
    }

    /// Tokenizes free text and normalizes the result.
    pub fn text_to_bag(&self, text: &str) -> TokenBag {
        self.normalize(&tokenize_identifier(text))
    }
}

impl Default for Normalizer {
    fn default() -> Self {
        Self::java_default()
    }
}

impl fmt::Debug for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Normalizer")
            .field("reserved", &self.reserved.len())
            .field("stop", &self.stop.len())
            .finish_non_exhaustive()
    }
}
