//! Textual features: bad-word density, uppercase density, punctuation and
//! smiley counts, and coarse part-of-speech counts.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../../data/bad_words.txt");
const DEFAULT_SMILEYS: &str = include_str!("../../data/smileys.txt");

/// Coarse part-of-speech classes counted as features, in vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosClass {
    Noun = 0,
    Verb = 1,
    Adjective = 2,
    Pronoun = 3,
    Interjection = 4,
}

pub const POS_CLASSES: usize = 5;

/// Assigns a coarse class to a lowercase token, or `None` for tokens that
/// are not counted (determiners, prepositions, adverbs, numbers, ...).
pub trait PosTagger: Send + Sync {
    fn tag(&self, token: &str) -> Option<PosClass>;
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TextFeatures {
    pub bad_word_density: f64,
    pub uppercase_density: f64,
    pub exclaim_question_count: u32,
    pub smiley_count: u32,
    /// Noun, verb, adjective, pronoun, interjection.
    pub pos_counts: [u32; POS_CLASSES],
}

/// Set of lowercase offensive tokens.
#[derive(Debug, Clone)]
pub struct Lexicon {
    words: HashSet<String>,
}

impl Lexicon {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: HashSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::InvalidParameter("bad-word lexicon is empty".into()));
        }
        Ok(Lexicon { words })
    }

    pub fn bundled() -> Self {
        Lexicon::new(DEFAULT_LEXICON.lines()).expect("bundled lexicon is non-empty")
    }

    /// One lowercase token per line.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::new(text.lines())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Literal smiley patterns, matched longest-first without overlap.
#[derive(Debug, Clone)]
pub struct SmileyPatterns {
    patterns: Vec<String>,
}

impl SmileyPatterns {
    pub fn new<I, S>(patterns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut patterns: Vec<String> = patterns
            .into_iter()
            .map(|p| p.as_ref().trim().to_owned())
            .filter(|p| !p.is_empty())
            .collect();
        patterns.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        patterns.dedup();
        SmileyPatterns { patterns }
    }

    pub fn bundled() -> Self {
        SmileyPatterns::new(DEFAULT_SMILEYS.lines())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(SmileyPatterns::new(text.lines()))
    }

    pub fn count(&self, text: &str) -> u32 {
        let mut count = 0;
        let mut rest = text;
        while !rest.is_empty() {
            match self.patterns.iter().find(|p| rest.starts_with(p.as_str())) {
                Some(p) => {
                    count += 1;
                    rest = &rest[p.len()..];
                }
                None => {
                    let step = rest.chars().next().map_or(1, char::len_utf8);
                    rest = &rest[step..];
                }
            }
        }
        count
    }
}

/// Suffix rules plus small closed-class word lists.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleTagger;

const IGNORED: &[&str] = &[
    "the", "a", "an", "and", "or", "but", "of", "to", "in", "on", "at", "for", "with", "from",
    "by", "as", "if", "then", "than", "so", "not", "just", "very", "too", "also", "up", "down",
    "out", "off", "over", "about", "into", "there", "here", "when", "where", "why", "how", "what",
    "all", "any", "some", "more", "most", "much", "many", "each", "every", "again", "tonight",
    "today", "now", "such",
];

const PRONOUNS: &[&str] = &[
    "i",
    "me",
    "my",
    "mine",
    "myself",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
    "he",
    "him",
    "his",
    "himself",
    "she",
    "her",
    "hers",
    "herself",
    "it",
    "its",
    "itself",
    "we",
    "us",
    "our",
    "ours",
    "ourselves",
    "they",
    "them",
    "their",
    "theirs",
    "themselves",
    "u",
    "ur",
    "ya",
    "who",
    "whom",
    "whose",
    "this",
    "that",
    "these",
    "those",
    "somebody",
    "someone",
    "nobody",
    "everyone",
    "everybody",
    "anyone",
    "anybody",
    "something",
    "nothing",
    "everything",
];

const INTERJECTIONS: &[&str] = &[
    "lol", "lmao", "rofl", "omg", "wow", "oh", "ah", "ugh", "haha", "hahaha", "hehe", "hey", "hi",
    "hello", "yay", "yeah", "yes", "no", "nope", "ok", "okay", "oops", "ouch", "wtf", "hmm", "meh",
    "aww", "ew", "eww", "thanks",
];

const VERBS: &[&str] = &[
    "is", "am", "are", "was", "were", "be", "been", "have", "has", "had", "do", "does", "did",
    "go", "goes", "went", "gone", "get", "gets", "got", "make", "makes", "made", "say", "says",
    "said", "know", "knows", "knew", "think", "thinks", "thought", "see", "sees", "saw", "come",
    "comes", "came", "want", "wants", "look", "looks", "like", "likes", "need", "needs", "feel",
    "feels", "take", "takes", "give", "gives", "tell", "tells", "hate", "hates", "love", "loves",
    "shut", "kill", "die", "can", "could", "will", "would", "should", "shall", "may", "might",
    "must", "let", "stop", "leave", "suck", "sucks", "care", "cares", "talk", "play", "meet",
];

const ADJECTIVES: &[&str] = &[
    "good", "bad", "great", "ugly", "fat", "stupid", "dumb", "nice", "cool", "big", "small",
    "little", "old", "new", "pretty", "happy", "sad", "crazy", "weird", "fake", "lame", "gross",
    "dead", "sick", "best", "worst", "better", "worse", "awesome", "funny", "fun", "late",
];

impl PosTagger for RuleTagger {
    fn tag(&self, token: &str) -> Option<PosClass> {
        if token.chars().all(|c| c.is_numeric()) || IGNORED.contains(&token) {
            return None;
        }
        if PRONOUNS.contains(&token) {
            return Some(PosClass::Pronoun);
        }
        if INTERJECTIONS.contains(&token) {
            return Some(PosClass::Interjection);
        }
        if VERBS.contains(&token) {
            return Some(PosClass::Verb);
        }
        if ADJECTIVES.contains(&token) {
            return Some(PosClass::Adjective);
        }
        if token.chars().count() > 4 {
            if token.ends_with("ly") {
                return None;
            }
            if ["ing", "ed", "ize", "ise", "ify"]
                .iter()
                .any(|s| token.ends_with(s))
            {
                return Some(PosClass::Verb);
            }
            if [
                "ous", "ful", "less", "ive", "able", "ible", "ish", "ic", "al", "est",
            ]
            .iter()
            .any(|s| token.ends_with(s))
            {
                return Some(PosClass::Adjective);
            }
        }
        Some(PosClass::Noun)
    }
}

/// Splits on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
}

pub fn extract_text_features(
    text: &str,
    lexicon: &Lexicon,
    smileys: &SmileyPatterns,
) -> TextFeatures {
    extract_text_features_with(text, lexicon, smileys, &RuleTagger)
}

pub fn extract_text_features_with(
    text: &str,
    lexicon: &Lexicon,
    smileys: &SmileyPatterns,
    tagger: &dyn PosTagger,
) -> TextFeatures {
    let mut tokens = 0usize;
    let mut bad = 0usize;
    let mut pos_counts = [0u32; POS_CLASSES];
    for token in tokenize(text) {
        tokens += 1;
        let lower = token.to_lowercase();
        if lexicon.contains(&lower) {
            bad += 1;
        }
        if let Some(class) = tagger.tag(&lower) {
            pos_counts[class as usize] += 1;
        }
    }

    let (mut letters, mut upper) = (0usize, 0usize);
    let mut punct = 0u32;
    for c in text.chars() {
        if c.is_alphabetic() {
            letters += 1;
            if c.is_uppercase() {
                upper += 1;
            }
        } else if c == '!' || c == '?' {
            punct += 1;
        }
    }

    TextFeatures {
        bad_word_density: bad as f64 / tokens.max(1) as f64,
        uppercase_density: upper as f64 / letters.max(1) as f64,
        exclaim_question_count: punct,
        smiley_count: smileys.count(text),
        pos_counts,
    }
}
