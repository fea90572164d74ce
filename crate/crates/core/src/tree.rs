//! Constituency tree rebuilt from per-token CoNLL parse bits.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Node {
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub preterminal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tree {
    pub nodes: Vec<Node>,
}

/// Drops function tags and indices: `NP-SBJ-1` -> `NP`, `-NONE-` stays.
fn base_label(raw: &str) -> &str {
    if raw.starts_with('-') {
        return raw;
    }
    let cut = raw.find(['-', '=']).unwrap_or(raw.len());
    &raw[..cut]
}

impl Tree {
    /// Returns `None` for unbalanced or unreadable bits.
    pub fn from_bits<'a, I>(tokens: I) -> Option<Tree>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut nodes: Vec<Node> = Vec::new();
        let mut open: Vec<usize> = Vec::new();
        let mut n_tokens = 0usize;
        for (i, (bit, pos)) in tokens.into_iter().enumerate() {
            n_tokens = i + 1;
            let bytes = bit.as_bytes();
            let mut k = 0;
            let mut seen_leaf = false;
            while k < bytes.len() {
                match bytes[k] {
                    b'(' => {
                        if seen_leaf {
                            return None;
                        }
                        let s = k + 1;
                        let mut e = s;
                        while e < bytes.len() && !matches!(bytes[e], b'(' | b')' | b'*') {
                            e += 1;
                        }
                        let label = bit[s..e].trim();
                        if label.is_empty() || label.contains(char::is_whitespace) {
                            return None;
                        }
                        let idx = nodes.len();
                        nodes.push(Node {
                            label: String::from(base_label(label)),
                            start: i,
                            end: i,
                            parent: open.last().copied(),
                            children: Vec::new(),
                            preterminal: false,
                        });
                        if let Some(&p) = open.last() {
                            nodes[p].children.push(idx);
                        }
                        open.push(idx);
                        k = e;
                    }
                    b'*' => {
                        if seen_leaf {
                            return None;
                        }
                        seen_leaf = true;
                        let idx = nodes.len();
                        nodes.push(Node {
                            label: String::from(pos),
                            start: i,
                            end: i,
                            parent: open.last().copied(),
                            children: Vec::new(),
                            preterminal: true,
                        });
                        if let Some(&p) = open.last() {
                            nodes[p].children.push(idx);
                        }
                        k += 1;
                    }
                    b')' => {
                        if !seen_leaf {
                            return None;
                        }
                        let idx = open.pop()?;
                        nodes[idx].end = i;
                        k += 1;
                    }
                    c if c.is_ascii_whitespace() => k += 1,
                    _ => return None,
                }
            }
            if !seen_leaf {
                return None;
            }
        }
        if !open.is_empty() || n_tokens == 0 {
            return None;
        }
        Some(Tree { nodes })
    }

    /// Smallest node satisfying `accept` whose span covers `[start, end]`.
    /// Among equal spans the deepest one wins.
    pub fn smallest_covering(
        &self,
        start: usize,
        end: usize,
        accept: impl Fn(&Node) -> bool,
    ) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (idx, n) in self.nodes.iter().enumerate() {
            if n.start <= start && end <= n.end && accept(n) {
                let width = n.end - n.start;
                if best.is_none_or(|(w, _)| width <= w) {
                    best = Some((width, idx));
                }
            }
        }
        best.map(|(_, idx)| idx)
    }
}
