//! Hash-consed labels of the tree space.
//!
//! `L_1` is the set of leaves (positive integers) and `L_n` holds ordered
//! pairs `(b, c)` with `level(b) + level(c) = n`. A [`TreeLabel`] is a small
//! copyable handle into a process-wide interner, so structurally equal labels
//! always share one id and equality is an integer compare.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use crate::error::{invalid, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Leaf(u64),
    Pair(TreeLabel, TreeLabel),
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    node: Node,
    level: u32,
}

#[derive(Default)]
struct Interner {
    entries: Vec<Entry>,
    ids: HashMap<Node, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| RwLock::new(Interner::default()))
}

fn intern(node: Node, level: u32) -> TreeLabel {
    if let Some(&id) = interner().read().unwrap().ids.get(&node) {
        return TreeLabel(id);
    }
    let mut guard = interner().write().unwrap();
    // another writer may have won the race between the two locks
    if let Some(&id) = guard.ids.get(&node) {
        return TreeLabel(id);
    }
    let id = u32::try_from(guard.entries.len()).expect("label interner overflow");
    guard.entries.push(Entry { node, level });
    guard.ids.insert(node, id);
    TreeLabel(id)
}

fn entry(label: TreeLabel) -> Entry {
    interner().read().unwrap().entries[label.0 as usize]
}

/// An element of the label set `L`.
///
/// Ordering is structural (by level, then leaf index or children), so sorted
/// containers of labels iterate identically regardless of interning order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeLabel(u32);

/// The two shapes a label can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelKind {
    Leaf(u64),
    Pair(TreeLabel, TreeLabel),
}

impl TreeLabel {
    /// The leaf with the given positive index.
    pub fn leaf(index: u64) -> Self {
        assert!(index >= 1, "leaf indices are positive integers");
        intern(Node::Leaf(index), 1)
    }

    pub fn pair(left: TreeLabel, right: TreeLabel) -> Self {
        let level = left.level() + right.level();
        intern(Node::Pair(left, right), level)
    }

    pub fn level(self) -> u32 {
        entry(self).level
    }

    pub fn is_leaf(self) -> bool {
        matches!(entry(self).node, Node::Leaf(_))
    }

    pub fn kind(self) -> LabelKind {
        match entry(self).node {
            Node::Leaf(i) => LabelKind::Leaf(i),
            Node::Pair(b, c) => LabelKind::Pair(b, c),
        }
    }

    /// Children `(b, c)` of a pair, `None` for a leaf.
    pub fn children(self) -> Option<(TreeLabel, TreeLabel)> {
        match entry(self).node {
            Node::Leaf(_) => None,
            Node::Pair(b, c) => Some((b, c)),
        }
    }

    /// Index of a leaf, `None` for a pair.
    pub fn leaf_index(self) -> Option<u64> {
        match entry(self).node {
            Node::Leaf(i) => Some(i),
            Node::Pair(..) => None,
        }
    }
}

impl Ord for TreeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let (a, b) = (entry(*self), entry(*other));
        a.level.cmp(&b.level).then_with(|| match (a.node, b.node) {
            (Node::Leaf(i), Node::Leaf(j)) => i.cmp(&j),
            (Node::Leaf(_), Node::Pair(..)) => Ordering::Less,
            (Node::Pair(..), Node::Leaf(_)) => Ordering::Greater,
            (Node::Pair(l1, r1), Node::Pair(l2, r2)) => l1.cmp(&l2).then_with(|| r1.cmp(&r2)),
        })
    }
}

impl PartialOrd for TreeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TreeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            LabelKind::Leaf(i) => write!(f, "{i}"),
            LabelKind::Pair(b, c) => write!(f, "({b},{c})"),
        }
    }
}

impl fmt::Debug for TreeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for TreeLabel {
    type Err = Error;

    /// Parses the `Display` form, e.g. `((1,2),3)`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let label = parse_label(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(invalid(format!("trailing input in label {s:?}")));
        }
        Ok(label)
    }
}

fn parse_label(b: &[u8], pos: &mut usize) -> Result<TreeLabel, Error> {
    match b.get(*pos) {
        Some(b'(') => {
            *pos += 1;
            let left = parse_label(b, pos)?;
            expect(b, pos, b',')?;
            let right = parse_label(b, pos)?;
            expect(b, pos, b')')?;
            Ok(TreeLabel::pair(left, right))
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while b.get(*pos).is_some_and(u8::is_ascii_digit) {
                *pos += 1;
            }
            let digits = std::str::from_utf8(&b[start..*pos]).unwrap();
            let index: u64 = digits.parse().map_err(|_| invalid(format!("bad leaf index {digits}")))?;
            if index == 0 {
                return Err(invalid("leaf indices start at 1"));
            }
            Ok(TreeLabel::leaf(index))
        }
        _ => Err(invalid(format!("unexpected input at byte {pos}"))),
    }
}

fn expect(b: &[u8], pos: &mut usize, want: u8) -> Result<(), Error> {
    if b.get(*pos) == Some(&want) {
        *pos += 1;
        Ok(())
    } else {
        Err(invalid(format!("expected '{}' at byte {pos}", want as char)))
    }
}
