//! Full binary trees, ordered and unordered, together with the statistics
//! computed on them: size (number of leaves), the caterpillar predicate, the
//! biggest caterpillar subtree `gamma`, and the normalized Colless index.
//!
//! A caterpillar is a tree in which every internal node has at least one leaf
//! child. Subtrees are always the complete rooted subtree hanging below a node.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

pub const DEFAULT_ORDERED_CAP: usize = 18;
pub const DEFAULT_UNORDERED_CAP: usize = 20;

/// Shared behaviour of ordered and unordered full binary trees.
pub trait BinaryTree: Sized {
    /// The two children of an internal node, `None` for a leaf.
    fn children(&self) -> Option<(&Self, &Self)>;

    /// Number of leaves.
    fn size(&self) -> usize;

    fn is_leaf(&self) -> bool {
        self.children().is_none()
    }

    /// True iff every internal node has at least one leaf child.
    fn is_caterpillar(&self) -> bool {
        let mut node = self;
        while let Some((l, r)) = node.children() {
            node = match (l.is_leaf(), r.is_leaf()) {
                (true, _) => r,
                (false, true) => l,
                (false, false) => return false,
            };
        }
        true
    }

    /// Size of the biggest caterpillar subtree. A single leaf has gamma 1.
    fn gamma(&self) -> usize {
        profile(self).gamma
    }

    /// Sum over all nodes of |size(left) - size(right)|.
    fn colless_sum(&self) -> usize {
        profile(self).delta_sum
    }

    /// Colless index, exact: the imbalance sum divided by its maximum
    /// (n-1)(n-2)/2, which only caterpillars reach. Undefined for n <= 2.
    fn colless_index(&self) -> Result<BigRational> {
        let n = self.size();
        if n <= 2 {
            return Err(Error::SizeTooSmall { size: n, min: 2 });
        }
        let norm = BigInt::from((n - 1) * (n - 2) / 2);
        Ok(BigRational::new(BigInt::from(self.colless_sum()), norm))
    }

    /// The subtree addressed by `id`, if it exists.
    fn subtree(&self, id: &NodeId) -> Option<&Self> {
        let mut node = self;
        for step in &id.0 {
            let (l, r) = node.children()?;
            node = match step {
                Side::Left => l,
                Side::Right => r,
            };
        }
        Some(node)
    }

    /// |size(left) - size(right)| at the addressed node; 0 at a leaf.
    fn imbalance_at(&self, id: &NodeId) -> Result<usize> {
        let node = self
            .subtree(id)
            .ok_or_else(|| Error::InvalidNode(id.to_string()))?;
        Ok(match node.children() {
            Some((l, r)) => l.size().abs_diff(r.size()),
            None => 0,
        })
    }

    /// Every node address, in pre-order.
    fn node_ids(&self) -> Vec<NodeId> {
        fn walk<T: BinaryTree>(t: &T, path: &mut Vec<Side>, out: &mut Vec<NodeId>) {
            out.push(NodeId(path.clone()));
            if let Some((l, r)) = t.children() {
                path.push(Side::Left);
                walk(l, path, out);
                path.pop();
                path.push(Side::Right);
                walk(r, path, out);
                path.pop();
            }
        }
        let mut out = Vec::with_capacity(2 * self.size() - 1);
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Profile {
    size: usize,
    caterpillar: bool,
    gamma: usize,
    delta_sum: usize,
}

fn profile<T: BinaryTree>(t: &T) -> Profile {
    match t.children() {
        None => Profile {
            size: 1,
            caterpillar: true,
            gamma: 1,
            delta_sum: 0,
        },
        Some((l, r)) => {
            let pl = profile(l);
            let pr = profile(r);
            let size = pl.size + pr.size;
            let caterpillar = (pl.size == 1 && pr.caterpillar) || (pr.size == 1 && pl.caterpillar);
            let gamma = if caterpillar {
                size
            } else {
                pl.gamma.max(pr.gamma)
            };
            Profile {
                size,
                caterpillar,
                gamma,
                delta_sum: pl.delta_sum + pr.delta_sum + pl.size.abs_diff(pr.size),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Address of a node as the path of steps taken from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NodeId(pub Vec<Side>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn child(&self, side: Side) -> Self {
        let mut path = self.0.clone();
        path.push(side);
        NodeId(path)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for s in &self.0 {
            f.write_str(match s {
                Side::Left => "L",
                Side::Right => "R",
            })?;
        }
        Ok(())
    }
}

/// Full binary tree with distinguished left and right children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OrderedTree {
    Leaf,
    Node {
        left: Arc<OrderedTree>,
        right: Arc<OrderedTree>,
        size: usize,
    },
}

impl OrderedTree {
    pub fn leaf() -> Self {
        OrderedTree::Leaf
    }

    pub fn join(left: OrderedTree, right: OrderedTree) -> Self {
        Self::join_arc(Arc::new(left), Arc::new(right))
    }

    pub fn join_arc(left: Arc<OrderedTree>, right: Arc<OrderedTree>) -> Self {
        let size = left.size() + right.size();
        OrderedTree::Node { left, right, size }
    }

    pub fn cherry() -> Self {
        Self::join(Self::Leaf, Self::Leaf)
    }

    /// The caterpillar `((((x1,x2),x3),...),xn)` whose spine runs down the left.
    pub fn left_comb(n: usize) -> Self {
        assert!(n >= 1, "a tree has at least one leaf");
        let mut t = OrderedTree::Leaf;
        for _ in 1..n {
            t = OrderedTree::join(t, OrderedTree::Leaf);
        }
        t
    }

    /// The complete balanced tree with `2^depth` leaves.
    pub fn complete(depth: u32) -> Self {
        if depth == 0 {
            return OrderedTree::Leaf;
        }
        let half = Arc::new(Self::complete(depth - 1));
        Self::join_arc(half.clone(), half)
    }

    /// Swap the children of every internal node.
    pub fn mirror(&self) -> Self {
        match self {
            OrderedTree::Leaf => OrderedTree::Leaf,
            OrderedTree::Node { left, right, .. } => {
                OrderedTree::join(right.mirror(), left.mirror())
            }
        }
    }

    pub fn left(&self) -> Option<&OrderedTree> {
        self.children().map(|(l, _)| l)
    }

    pub fn right(&self) -> Option<&OrderedTree> {
        self.children().map(|(_, r)| r)
    }
}

impl BinaryTree for OrderedTree {
    fn children(&self) -> Option<(&Self, &Self)> {
        match self {
            OrderedTree::Leaf => None,
            OrderedTree::Node { left, right, .. } => Some((left, right)),
        }
    }

    fn size(&self) -> usize {
        match self {
            OrderedTree::Leaf => 1,
            OrderedTree::Node { size, .. } => *size,
        }
    }
}

/// Bracket notation, `*` for a leaf: the cherry is `(*,*)`.
impl fmt::Display for OrderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.children() {
            None => f.write_str("*"),
            Some((l, r)) => write!(f, "({l},{r})"),
        }
    }
}

/// Full binary tree up to sibling order, stored in canonical form: the first
/// child never compares greater than the second.
///
/// The canonical order compares sizes first, then the (first, second)
/// children lexicographically. Leaves are the smallest trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnorderedTree {
    Leaf,
    Node {
        first: Arc<UnorderedTree>,
        second: Arc<UnorderedTree>,
        size: usize,
    },
}

impl UnorderedTree {
    pub fn leaf() -> Self {
        UnorderedTree::Leaf
    }

    pub fn join(a: UnorderedTree, b: UnorderedTree) -> Self {
        Self::join_arc(Arc::new(a), Arc::new(b))
    }

    pub fn join_arc(a: Arc<UnorderedTree>, b: Arc<UnorderedTree>) -> Self {
        let size = a.size() + b.size();
        let (first, second) = if *a <= *b { (a, b) } else { (b, a) };
        UnorderedTree::Node {
            first,
            second,
            size,
        }
    }

    /// The unique caterpillar with `n` leaves.
    pub fn caterpillar(n: usize) -> Self {
        canonicalize(&OrderedTree::left_comb(n))
    }

    /// The ordered tree that lists children in canonical order.
    pub fn to_ordered(&self) -> OrderedTree {
        match self.children() {
            None => OrderedTree::Leaf,
            Some((a, b)) => OrderedTree::join(a.to_ordered(), b.to_ordered()),
        }
    }
}

impl BinaryTree for UnorderedTree {
    fn children(&self) -> Option<(&Self, &Self)> {
        match self {
            UnorderedTree::Leaf => None,
            UnorderedTree::Node { first, second, .. } => Some((first, second)),
        }
    }

    fn size(&self) -> usize {
        match self {
            UnorderedTree::Leaf => 1,
            UnorderedTree::Node { size, .. } => *size,
        }
    }
}

impl Ord for UnorderedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| match (self.children(), other.children()) {
                (Some((a1, b1)), Some((a2, b2))) => a1.cmp(a2).then_with(|| b1.cmp(b2)),
                // equal sizes: either both leaves or both internal
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for UnorderedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for UnorderedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.children() {
            None => f.write_str("*"),
            Some((a, b)) => write!(f, "{{{a},{b}}}"),
        }
    }
}

/// Forget sibling order.
pub fn canonicalize(t: &OrderedTree) -> UnorderedTree {
    match t.children() {
        None => UnorderedTree::Leaf,
        Some((l, r)) => UnorderedTree::join(canonicalize(l), canonicalize(r)),
    }
}

/// Lazy stream over every ordered tree with a given number of leaves.
pub struct OrderedTrees {
    inner: Box<dyn Iterator<Item = OrderedTree> + Send>,
}

impl Iterator for OrderedTrees {
    type Item = OrderedTree;

    fn next(&mut self) -> Option<OrderedTree> {
        self.inner.next()
    }
}

fn ordered_stream(n: usize) -> Box<dyn Iterator<Item = OrderedTree> + Send> {
    if n == 1 {
        return Box::new(std::iter::once(OrderedTree::Leaf));
    }
    Box::new((1..n).flat_map(move |split| {
        ordered_stream(split).flat_map(move |left| {
            let left = Arc::new(left);
            ordered_stream(n - split)
                .map(move |right| OrderedTree::join_arc(left.clone(), Arc::new(right)))
        })
    }))
}

/// All trees of size `n`, subject to [`DEFAULT_ORDERED_CAP`].
pub fn enumerate_ordered(n: usize) -> Result<OrderedTrees> {
    enumerate_ordered_capped(n, DEFAULT_ORDERED_CAP)
}

pub fn enumerate_ordered_capped(n: usize, cap: usize) -> Result<OrderedTrees> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "tree size must be at least 1".into(),
        ));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(OrderedTrees {
        inner: ordered_stream(n),
    })
}

/// All unordered trees of size `n` (one per isomorphism class), subject to
/// [`DEFAULT_UNORDERED_CAP`].
pub fn enumerate_unordered(n: usize) -> Result<std::vec::IntoIter<UnorderedTree>> {
    enumerate_unordered_capped(n, DEFAULT_UNORDERED_CAP)
}

pub fn enumerate_unordered_capped(
    n: usize,
    cap: usize,
) -> Result<std::vec::IntoIter<UnorderedTree>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "tree size must be at least 1".into(),
        ));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut layers: Vec<Vec<Arc<UnorderedTree>>> =
        vec![Vec::new(), vec![Arc::new(UnorderedTree::Leaf)]];
    for size in 2..=n {
        let mut layer = Vec::new();
        for small in 1..=size / 2 {
            let large = size - small;
            if small < large {
                for a in &layers[small] {
                    for b in &layers[large] {
                        layer.push(Arc::new(UnorderedTree::join_arc(a.clone(), b.clone())));
                    }
                }
            } else {
                let same = &layers[small];
                for (i, a) in same.iter().enumerate() {
                    for b in &same[i..] {
                        layer.push(Arc::new(UnorderedTree::join_arc(a.clone(), b.clone())));
                    }
                }
            }
        }
        layers.push(layer);
    }
    let top = layers.pop().unwrap_or_default();
    drop(layers);
    let trees: Vec<UnorderedTree> = top
        .into_iter()
        .map(|t| Arc::try_unwrap(t).unwrap_or_else(|shared| (*shared).clone()))
        .collect();
    Ok(trees.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, HashSet};

    fn cat3_right() -> OrderedTree {
        OrderedTree::join(OrderedTree::Leaf, OrderedTree::cherry())
    }

    #[test]
    fn sizes() {
        assert_eq!(OrderedTree::Leaf.size(), 1);
        assert_eq!(OrderedTree::cherry().size(), 2);
        assert_eq!(OrderedTree::complete(2).size(), 4);
        assert_eq!(UnorderedTree::caterpillar(7).size(), 7);
    }

    #[test]
    fn caterpillar_predicate() {
        assert!(OrderedTree::Leaf.is_caterpillar());
        assert!(OrderedTree::cherry().is_caterpillar());
        assert!(cat3_right().is_caterpillar());
        assert!(!OrderedTree::complete(2).is_caterpillar());
        let zigzag = OrderedTree::join(
            OrderedTree::Leaf,
            OrderedTree::join(
                OrderedTree::join(OrderedTree::Leaf, OrderedTree::cherry()),
                OrderedTree::Leaf,
            ),
        );
        assert!(zigzag.is_caterpillar());
        let count = enumerate_ordered(4)
            .unwrap()
            .filter(|t| t.is_caterpillar())
            .count();
        assert_eq!(count, 4);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(OrderedTree::Leaf.gamma(), 1);
        assert_eq!(OrderedTree::left_comb(9).gamma(), 9);
        assert_eq!(OrderedTree::complete(2).gamma(), 2);
        assert_eq!(OrderedTree::complete(4).gamma(), 2);
        let t = OrderedTree::join(OrderedTree::cherry(), OrderedTree::left_comb(3));
        assert_eq!(t.gamma(), 3);
    }

    #[test]
    fn gamma_histogram_size_five() {
        let mut hist = BTreeMap::new();
        for t in enumerate_ordered(5).unwrap() {
            *hist.entry(t.gamma()).or_insert(0) += 1;
        }
        assert_eq!(hist, BTreeMap::from([(2, 2), (3, 4), (5, 8)]));
    }

    #[test]
    fn colless() {
        let one = BigRational::from_integer(1.into());
        assert_eq!(OrderedTree::left_comb(6).colless_index().unwrap(), one);
        assert_eq!(
            OrderedTree::complete(2).colless_index().unwrap(),
            BigRational::from_integer(0.into())
        );
        // (cherry, pitchfork): root 1, cherry 0, pitchfork 1 + cherry 0 => 2 / 6
        let t = OrderedTree::join(OrderedTree::cherry(), OrderedTree::left_comb(3));
        assert_eq!(t.colless_sum(), 2);
        assert_eq!(
            t.colless_index().unwrap(),
            BigRational::new(1.into(), 3.into())
        );
        assert_eq!(
            OrderedTree::cherry().colless_index(),
            Err(Error::SizeTooSmall { size: 2, min: 2 })
        );
        assert!(OrderedTree::Leaf.colless_index().is_err());
    }

    #[test]
    fn node_addressing() {
        let t = OrderedTree::join(OrderedTree::cherry(), OrderedTree::left_comb(3));
        let ids = t.node_ids();
        assert_eq!(ids.len(), 9);
        assert_eq!(t.imbalance_at(&NodeId::root()).unwrap(), 1);
        assert_eq!(
            t.imbalance_at(&NodeId::root().child(Side::Right)).unwrap(),
            1
        );
        assert_eq!(
            t.imbalance_at(&NodeId::root().child(Side::Left)).unwrap(),
            0
        );
        let bogus = NodeId::root()
            .child(Side::Left)
            .child(Side::Left)
            .child(Side::Left);
        assert!(matches!(t.imbalance_at(&bogus), Err(Error::InvalidNode(_))));
        let total: usize = ids.iter().map(|id| t.imbalance_at(id).unwrap()).sum();
        assert_eq!(total, t.colless_sum());
    }

    #[test]
    fn ordered_enumeration_counts() {
        let counts: Vec<usize> = (1..=10)
            .map(|n| enumerate_ordered(n).unwrap().count())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]);
        assert_eq!(
            enumerate_ordered(1).unwrap().collect::<Vec<_>>(),
            vec![OrderedTree::Leaf]
        );
        let distinct: HashSet<OrderedTree> = enumerate_ordered(8).unwrap().collect();
        assert_eq!(distinct.len(), 429);
    }

    #[test]
    fn caps() {
        assert!(matches!(
            enumerate_ordered(19),
            Err(Error::CapExceeded { n: 19, cap: 18 })
        ));
        assert!(matches!(
            enumerate_unordered(21),
            Err(Error::CapExceeded { n: 21, cap: 20 })
        ));
        assert!(enumerate_ordered_capped(19, 19).is_ok());
        assert!(enumerate_ordered(0).is_err());
    }

    #[test]
    fn unordered_enumeration_counts() {
        let counts: Vec<usize> = (1..=12)
            .map(|n| enumerate_unordered(n).unwrap().count())
            .collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207, 451]);
        assert_eq!(
            enumerate_unordered(2).unwrap().collect::<Vec<_>>(),
            vec![UnorderedTree::join(
                UnorderedTree::Leaf,
                UnorderedTree::Leaf
            )]
        );
        for n in 1..=12 {
            let all: Vec<_> = enumerate_unordered(n).unwrap().collect();
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(all.len(), distinct.len());
        }
    }

    #[test]
    fn canonical_forms() {
        let a = OrderedTree::left_comb(3);
        let b = cat3_right();
        assert_ne!(a, b);
        assert_eq!(canonicalize(&a), canonicalize(&b));
        assert_eq!(canonicalize(&OrderedTree::Leaf), UnorderedTree::Leaf);
        for n in 2..=9 {
            let cats: HashSet<_> = enumerate_ordered(n)
                .unwrap()
                .filter(|t| t.is_caterpillar())
                .map(|t| canonicalize(&t))
                .collect();
            assert_eq!(cats.len(), 1);
            assert_eq!(
                cats.into_iter().next().unwrap(),
                UnorderedTree::caterpillar(n)
            );
        }
        // the ordered enumeration collapses onto exactly the unordered one
        for n in 1..=10 {
            let classes: HashSet<_> = enumerate_ordered(n)
                .unwrap()
                .map(|t| canonicalize(&t))
                .collect();
            let direct: HashSet<_> = enumerate_unordered(n).unwrap().collect();
            assert_eq!(classes, direct);
        }
    }

    #[test]
    fn canonical_order_is_stable() {
        let leaf = UnorderedTree::Leaf;
        let cherry = UnorderedTree::join(leaf.clone(), leaf.clone());
        assert!(leaf < cherry);
        let t = UnorderedTree::join(cherry.clone(), leaf.clone());
        assert_eq!(t.children().unwrap().0, &leaf);
        assert_eq!(t.to_string(), "{*,{*,*}}");
    }
}
