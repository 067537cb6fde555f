use crate::bits::BitString;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    child: [u32; 2],
    value: u32,
}

impl Node {
    const EMPTY: Node = Node {
        child: [NONE, NONE],
        value: NONE,
    };
}

/// Binary trie over bit strings, used to find which key prefixes a bit stream.
#[derive(Clone)]
pub(crate) struct PrefixTrie {
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Walk {
    /// A key of length `depth` prefixes the walked bits.
    Match { value: usize, depth: usize },
    /// The walked bits are a proper prefix of at least one key.
    Interior,
    /// No key is comparable with the walked bits.
    Dead,
}

impl PrefixTrie {
    pub fn new() -> Self {
        Self {
            nodes: vec![Node::EMPTY],
        }
    }

    pub fn from_keys<'a>(keys: impl IntoIterator<Item = (&'a BitString, usize)>) -> Self {
        let mut trie = Self::new();
        for (key, value) in keys {
            trie.insert(key, value);
        }
        trie
    }

    /// Later insertions never shadow an earlier key on the same path.
    pub fn insert(&mut self, key: &BitString, value: usize) {
        let mut node = 0usize;
        for bit in key.iter() {
            let slot = self.nodes[node].child[bit as usize];
            node = if slot == NONE {
                self.nodes.push(Node::EMPTY);
                let id = self.nodes.len() - 1;
                self.nodes[node].child[bit as usize] = id as u32;
                id
            } else {
                slot as usize
            };
        }
        if self.nodes[node].value == NONE {
            self.nodes[node].value = value as u32;
        }
    }

    /// Walk `bits` from the root and stop at the first key found.
    pub fn walk(&self, bits: impl IntoIterator<Item = bool>) -> Walk {
        let mut node = 0usize;
        let mut depth = 0usize;
        let mut bits = bits.into_iter();
        loop {
            let n = &self.nodes[node];
            if n.value != NONE {
                return Walk::Match {
                    value: n.value as usize,
                    depth,
                };
            }
            let Some(bit) = bits.next() else {
                return Walk::Interior;
            };
            let next = n.child[bit as usize];
            if next == NONE {
                return Walk::Dead;
            }
            node = next as usize;
            depth += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;

    #[test]
    fn walk_outcomes() {
        let keys = [bs("0"), bs("10"), bs("110")];
        let trie = PrefixTrie::from_keys(keys.iter().zip(0..));
        assert_eq!(trie.walk(bs("011").iter()), Walk::Match { value: 0, depth: 1 });
        assert_eq!(trie.walk(bs("1").iter()), Walk::Interior);
        assert_eq!(trie.walk(bs("11").iter()), Walk::Interior);
        assert_eq!(trie.walk(bs("111").iter()), Walk::Dead);
        assert_eq!(trie.walk(bs("1101").iter()), Walk::Match { value: 2, depth: 3 });
    }

    #[test]
    fn empty_key_matches_immediately() {
        let trie = PrefixTrie::from_keys([(&bs("-"), 7)]);
        assert_eq!(trie.walk(bs("-").iter()), Walk::Match { value: 7, depth: 0 });
        assert_eq!(trie.walk(bs("10").iter()), Walk::Match { value: 7, depth: 0 });
    }
}
