use std::collections::HashMap;

/// Word-level prefix trie. Each node may carry a payload marking the end of a phrase.
#[derive(Debug, Clone)]
pub struct PhraseTrie<T> {
    nodes: Vec<Node<T>>,
}

#[derive(Debug, Clone)]
struct Node<T> {
    children: HashMap<String, u32>,
    depth: u32,
    terminal: Option<T>,
}

impl<T> Node<T> {
    fn new(depth: u32) -> Self {
        Self {
            children: HashMap::new(),
            depth,
            terminal: None,
        }
    }
}

/// Opaque position inside a [`PhraseTrie`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl<T> Default for PhraseTrie<T> {
    fn default() -> Self {
        Self {
            nodes: vec![Node::new(0)],
        }
    }
}

impl<T> PhraseTrie<T> {
    pub const ROOT: NodeId = NodeId(0);

    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a phrase, replacing any payload already stored for it.
    pub fn insert<S: AsRef<str>>(&mut self, words: &[S], payload: T) {
        let mut cur = 0u32;
        for word in words {
            let word = word.as_ref();
            let next = match self.nodes[cur as usize].children.get(word) {
                Some(&id) => id,
                None => {
                    let id = self.nodes.len() as u32;
                    let depth = self.nodes[cur as usize].depth + 1;
                    self.nodes.push(Node::new(depth));
                    self.nodes[cur as usize].children.insert(word.to_owned(), id);
                    id
                }
            };
            cur = next;
        }
        self.nodes[cur as usize].terminal = Some(payload);
    }

    pub fn step(&self, from: NodeId, word: &str) -> Option<NodeId> {
        self.nodes[from.0 as usize].children.get(word).copied().map(NodeId)
    }

    pub fn terminal(&self, id: NodeId) -> Option<&T> {
        self.nodes[id.0 as usize].terminal.as_ref()
    }

    /// Number of words on the path from the root to `id`.
    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.0 as usize].depth as usize
    }

    pub fn has_children(&self, id: NodeId) -> bool {
        !self.nodes[id.0 as usize].children.is_empty()
    }

    /// True when nothing but the root exists.
    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// Calls `visit(start, end, payload)` for every stored phrase occurring in `words`.
    pub fn for_each_match<S, F>(&self, words: &[S], mut visit: F)
    where
        S: AsRef<str>,
        F: FnMut(usize, usize, &T),
    {
        for start in 0..words.len() {
            let mut cur = Self::ROOT;
            for (offset, word) in words[start..].iter().enumerate() {
                match self.step(cur, word.as_ref()) {
                    Some(next) => cur = next,
                    None => break,
                }
                if let Some(payload) = self.terminal(cur) {
                    visit(start, start + offset + 1, payload);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_overlapping_phrases() {
        let mut trie = PhraseTrie::new();
        trie.insert(&["mitral", "regurgitation"], 1);
        trie.insert(&["regurgitation"], 2);
        trie.insert(&["mitral"], 3);
        let words = ["severe", "mitral", "regurgitation"];
        let mut hits = Vec::new();
        trie.for_each_match(&words, |s, e, p| hits.push((s, e, *p)));
        assert_eq!(hits, vec![(1, 2, 3), (1, 3, 1), (2, 3, 2)]);
    }

    #[test]
    fn depth_counts_words() {
        let mut trie = PhraseTrie::new();
        trie.insert(&["altered", "mental", "status"], ());
        let a = trie.step(PhraseTrie::<()>::ROOT, "altered").unwrap();
        let m = trie.step(a, "mental").unwrap();
        let s = trie.step(m, "status").unwrap();
        assert_eq!(trie.depth(s), 3);
        assert!(trie.terminal(m).is_none());
        assert!(trie.terminal(s).is_some());
        assert!(!trie.has_children(s));
    }
}
