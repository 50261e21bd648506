use std::ops::Range;

use crate::corpus::Corpus;

/// Positions within `±window` of `pos`, clipped to `0..len`, excluding `pos`.
#[inline]
pub fn context_window(pos: usize, len: usize, window: usize) -> impl Iterator<Item = usize> {
    let range: Range<usize> = pos.saturating_sub(window)..(pos + window + 1).min(len);
    range.filter(move |&j| j != pos)
}

/// Every `(input word, context word)` pair of the corpus, document by
/// document. Context never crosses a document boundary.
pub fn context_pairs(corpus: &Corpus, window: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for doc in &corpus.documents {
        let toks = &doc.tokens;
        for (i, &input) in toks.iter().enumerate() {
            pairs.extend(context_window(i, toks.len(), window).map(|j| (input, toks[j])));
        }
    }
    pairs
}
