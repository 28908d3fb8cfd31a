//! Porter stemming, so each word and its inflections count once in
//! vocabulary statistics and stem-level metric matching.
//!
//! Classic five-step algorithm over ASCII; words shorter than three letters
//! or containing non-ASCII-alphabetic characters are returned unchanged.
//! Input is expected lowercased (the tokenizers guarantee it).

struct Stemmer {
    /// current word; always truncated to its live length
    b: Vec<u8>,
    /// stem length left of the suffix most recently matched by [`ends`];
    /// zero means the suffix was the whole word
    stem: usize,
}

impl Stemmer {
    fn last(&self) -> usize {
        self.b.len() - 1
    }

    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in b[..len].
    fn measure(&self, len: usize) -> usize {
        let mut n = 0;
        let mut i = 0;
        while i < len && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < len && !self.is_consonant(i) {
                i += 1;
            }
            if i == len {
                return n;
            }
            n += 1;
            while i < len && self.is_consonant(i) {
                i += 1;
            }
            if i == len {
                return n;
            }
        }
    }

    fn stem_measure(&self) -> usize {
        self.measure(self.stem)
    }

    fn vowel_in_stem(&self) -> bool {
        (0..self.stem).any(|i| !self.is_consonant(i))
    }

    fn double_consonant(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.is_consonant(i)
    }

    /// consonant-vowel-consonant ending where the final consonant is not
    /// w, x or y; the restore-an-e heuristic (hop -> hoping)
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.is_consonant(i) || self.is_consonant(i - 1) || !self.is_consonant(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.b.len() || !self.b.ends_with(suffix) {
            return false;
        }
        self.stem = self.b.len() - suffix.len();
        true
    }

    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.stem);
        self.b.extend_from_slice(s);
    }

    fn replace_if_m_positive(&mut self, s: &[u8]) {
        if self.stem_measure() > 0 {
            self.set_to(s);
        }
    }

    fn step_1ab(&mut self) {
        if self.b[self.last()] == b's' {
            if self.ends(b"sses") {
                self.b.truncate(self.b.len() - 2);
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[self.last() - 1] != b's' {
                self.b.pop();
            }
        }
        if self.ends(b"eed") {
            if self.stem_measure() > 0 {
                self.b.pop();
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.b.truncate(self.stem);
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_consonant(self.last()) {
                if !matches!(self.b[self.last()], b'l' | b's' | b'z') {
                    self.b.pop();
                }
            } else if self.measure(self.b.len()) == 1 && self.cvc(self.last()) {
                self.stem = self.b.len();
                self.set_to(b"e");
            }
        }
    }

    fn step_1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            let i = self.last();
            self.b[i] = b'i';
        }
    }

    fn step_2(&mut self) {
        let rules: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"abli", b"able"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
            (b"logi", b"log"),
        ];
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_m_positive(replacement);
                return;
            }
        }
    }

    fn step_3(&mut self) {
        let rules: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ];
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_m_positive(replacement);
                return;
            }
        }
    }

    fn step_4(&mut self) {
        let suffixes: &[&[u8]] = &[
            b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment",
            b"ent", b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
        ];
        for suffix in suffixes {
            if self.ends(suffix) {
                // "ion" only drops after s or t
                if *suffix == b"ion"
                    && !(self.stem > 0 && matches!(self.b[self.stem - 1], b's' | b't'))
                {
                    return;
                }
                if self.stem_measure() > 1 {
                    self.b.truncate(self.stem);
                }
                return;
            }
        }
    }

    fn step_5(&mut self) {
        if self.b[self.last()] == b'e' {
            let a = self.measure(self.b.len());
            if a > 1 || (a == 1 && !self.cvc(self.last() - 1)) {
                self.b.pop();
            }
        }
        let last = self.last();
        if self.b[last] == b'l' && self.double_consonant(last) && self.measure(self.b.len()) > 1 {
            self.b.pop();
        }
    }
}

/// Stem one lowercase word.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        stem: 0,
    };
    s.step_1ab();
    s.step_1c();
    s.step_2();
    s.step_3();
    s.step_4();
    s.step_5();
    String::from_utf8(s.b).expect("ascii in, ascii out")
}
