//! Tree model: parameters, time-functions, branch-and-cut trees and their
//! evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::svbwc;

/// How the bound improvement of successive cuts on a path evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CutDecay {
    /// Every cut improves the bound by `c`.
    #[default]
    Constant,
    /// The k-th cut on a path improves the bound by `c / k`.
    Harmonic,
}

impl fmt::Display for CutDecay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutDecay::Constant => f.write_str("constant"),
            CutDecay::Harmonic => f.write_str("harmonic"),
        }
    }
}

impl FromStr for CutDecay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" | "const" => Ok(CutDecay::Constant),
            "harmonic" | "harm" => Ok(CutDecay::Harmonic),
            other => Err(Error::Parse(format!("unknown cut decay {other:?}"))),
        }
    }
}

/// Branch improvements `(ell, r)`, cut improvement `c` and the cut decay mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SvbcParams {
    pub ell: Rational,
    pub r: Rational,
    pub c: Rational,
    pub decay: CutDecay,
}

impl SvbcParams {
    /// Validates `0 <= ell <= r` and `c >= 0`.
    pub fn new(ell: Rational, r: Rational, c: Rational, decay: CutDecay) -> Result<Self> {
        if ell.is_negative() {
            return Err(Error::Parameter(format!("ell = {ell} must be >= 0")));
        }
        if ell > r {
            return Err(Error::Parameter(format!(
                "expected ell <= r, got ell = {ell}, r = {r}"
            )));
        }
        if c.is_negative() {
            return Err(Error::Parameter(format!("c = {c} must be >= 0")));
        }
        Ok(SvbcParams { ell, r, c, decay })
    }

    pub fn constant(ell: Rational, r: Rational, c: Rational) -> Result<Self> {
        Self::new(ell, r, c, CutDecay::Constant)
    }

    pub fn harmonic(ell: Rational, r: Rational, c: Rational) -> Result<Self> {
        Self::new(ell, r, c, CutDecay::Harmonic)
    }

    pub fn equal_branching(&self) -> bool {
        self.ell == self.r
    }

    /// Bound improvement of a cut applied at a node that already has
    /// `cuts_above` cuts on its root path.
    pub fn cut_gain(&self, cuts_above: u64) -> Rational {
        match self.decay {
            CutDecay::Constant => self.c.clone(),
            CutDecay::Harmonic => &self.c / Rational::from(cuts_above + 1),
        }
    }

    /// Total improvement of `k` consecutive cuts starting from the root.
    pub fn cut_total(&self, k: u64) -> Rational {
        match self.decay {
            CutDecay::Constant => &self.c * Rational::from(k),
            CutDecay::Harmonic => &self.c * svbwc::harmonic(k),
        }
    }

    /// Whether `k` root cuts improve the bound by at least `target`. Works for
    /// cut counts where the exact harmonic sum would be too large to build.
    pub fn cut_total_at_least(&self, k: u64, target: &Rational) -> bool {
        if !target.is_positive() {
            return true;
        }
        if self.c.is_zero() {
            return false;
        }
        match self.decay {
            CutDecay::Constant => &self.c * Rational::from(k) >= *target,
            CutDecay::Harmonic => svbwc::harmonic_at_least(k, &(target / &self.c)),
        }
    }

    /// Fewest root cuts whose total improvement reaches `target`; `None` when
    /// `c = 0` and `target > 0`.
    pub fn cuts_needed(&self, target: &Rational) -> Option<u64> {
        if !target.is_positive() {
            return Some(0);
        }
        if self.c.is_zero() {
            return None;
        }
        let x = target / &self.c;
        Some(match self.decay {
            CutDecay::Constant => x.ceil_i64() as u64,
            CutDecay::Harmonic => svbwc::harmonic_inverse(&x),
        })
    }
}

impl fmt::Display for SvbcParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(l={}, r={}; c={}, {})",
            self.ell, self.r, self.c, self.decay
        )
    }
}

/// Node time as a function of the number of cuts on the node's root path.
///
/// Text grammar: `one`, `affine:a,b` (w(z) = a z + b), `poly:c0,c1,...`,
/// `table:v0,v1,...`. All coefficients are rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TimeFn {
    ConstantOne,
    Affine { a: Rational, b: Rational },
    Polynomial(Vec<Rational>),
    Table(Vec<Rational>),
}

impl TimeFn {
    /// `w(z) = a z + b`; requires `b = 1` and `a >= 0`.
    pub fn affine(a: Rational, b: Rational) -> Result<Self> {
        if b != 1 {
            return Err(Error::TimeFn(format!(
                "affine intercept must be 1, got {b}"
            )));
        }
        if a.is_negative() {
            return Err(Error::TimeFn(format!(
                "affine slope {a} makes w decreasing"
            )));
        }
        Ok(TimeFn::Affine { a, b })
    }

    /// `w(z) = c0 + c1 z + c2 z^2 + ...`; requires `c0 = 1`. Monotonicity is
    /// checked on every range the function is evaluated over.
    pub fn polynomial(coeffs: Vec<Rational>) -> Result<Self> {
        match coeffs.first() {
            Some(c0) if *c0 == 1 => Ok(TimeFn::Polynomial(coeffs)),
            Some(c0) => Err(Error::TimeFn(format!("w(0) must be 1, got {c0}"))),
            None => Err(Error::TimeFn(
                "polynomial needs at least one coefficient".into(),
            )),
        }
    }

    /// Explicit values `w(0), w(1), ...`; no extrapolation past the last one.
    pub fn table(values: Vec<Rational>) -> Result<Self> {
        match values.first() {
            Some(v0) if *v0 == 1 => {}
            Some(v0) => return Err(Error::TimeFn(format!("w(0) must be 1, got {v0}"))),
            None => return Err(Error::TimeFn("table needs at least one value".into())),
        }
        for (i, pair) in values.windows(2).enumerate() {
            if pair[1] < pair[0] {
                return Err(Error::TimeFn(format!(
                    "table decreases between z = {i} and z = {}",
                    i + 1
                )));
            }
        }
        Ok(TimeFn::Table(values))
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self, TimeFn::ConstantOne)
    }

    /// Raw evaluation; see [`eval_time_fn`].
    pub fn eval(&self, z: u64) -> Result<Rational> {
        match self {
            TimeFn::ConstantOne => Ok(Rational::one()),
            TimeFn::Affine { a, b } => Ok(a * Rational::from(z) + b),
            TimeFn::Polynomial(coeffs) => {
                let zr = Rational::from(z);
                // Horner
                Ok(coeffs
                    .iter()
                    .rev()
                    .fold(Rational::zero(), |acc, coef| acc * &zr + coef))
            }
            TimeFn::Table(values) => values.get(z as usize).cloned().ok_or(Error::TableDomain {
                z,
                last: values.len() as u64 - 1,
            }),
        }
    }

    /// Checks `w(0) = 1`, `w >= 1` and `w(z+1) >= w(z)` on `0..=max_z`.
    pub fn validate_upto(&self, max_z: u64) -> Result<()> {
        let mut cache = TimeCache::new(self);
        cache.get(max_z).map(|_| ())
    }
}

impl fmt::Display for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            TimeFn::ConstantOne => f.write_str("one"),
            TimeFn::Affine { a, b } => write!(f, "affine:{a},{b}"),
            TimeFn::Polynomial(c) => write!(f, "poly:{}", join(c)),
            TimeFn::Table(v) => write!(f, "table:{}", join(v)),
        }
    }
}

impl FromStr for TimeFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "one" || s == "1" {
            return Ok(TimeFn::ConstantOne);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad time-function {s:?}")))?;
        let values = rest
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Rational>>>()?;
        match kind {
            "affine" => match values.as_slice() {
                [a, b] => TimeFn::affine(a.clone(), b.clone()),
                _ => Err(Error::Parse(format!("affine needs exactly a,b: {s:?}"))),
            },
            "poly" => TimeFn::polynomial(values),
            "table" => TimeFn::table(values),
            other => Err(Error::Parse(format!(
                "unknown time-function kind {other:?}"
            ))),
        }
    }
}

impl From<TimeFn> for String {
    fn from(w: TimeFn) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for TimeFn {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// `w(z)`. Table lookups past the last entry are a domain error.
pub fn eval_time_fn(w: &TimeFn, z: u64) -> Result<Rational> {
    w.eval(z)
}

/// Lazily evaluated prefix of a time-function that verifies the
/// time-function axioms on every value it hands out.
#[derive(Debug, Clone)]
pub struct TimeCache<'a> {
    w: &'a TimeFn,
    values: Vec<Rational>,
}

impl<'a> TimeCache<'a> {
    pub fn new(w: &'a TimeFn) -> Self {
        TimeCache {
            w,
            values: Vec::new(),
        }
    }

    pub fn get(&mut self, z: u64) -> Result<&Rational> {
        if self.w.is_constant_one() {
            if self.values.is_empty() {
                self.values.push(Rational::one());
            }
            return Ok(&self.values[0]);
        }
        while self.values.len() as u64 <= z {
            let next = self.values.len() as u64;
            let v = self.w.eval(next)?;
            match self.values.last() {
                None if v != 1 => {
                    return Err(Error::TimeFn(format!("w(0) = {v}, expected 1")));
                }
                Some(prev) if v < *prev => {
                    return Err(Error::TimeFn(format!(
                        "w decreases: w({}) = {prev} > w({next}) = {v}",
                        next - 1
                    )));
                }
                _ => {}
            }
            self.values.push(v);
        }
        Ok(&self.values[z as usize])
    }

    /// `sum_{i < k} w(i)`.
    pub fn prefix_sum(&mut self, k: u64) -> Result<Rational> {
        if k == 0 {
            return Ok(Rational::zero());
        }
        if self.w.is_constant_one() {
            return Ok(Rational::from(k));
        }
        self.get(k - 1)?;
        Ok(self.values[..k as usize].iter().cloned().sum())
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Branch,
    Cut,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    pub gap: Rational,
    pub cuts_on_path: u64,
    pub parent: Option<NodeId>,
}

/// A branch-and-cut tree stored as an arena. Gap labels are computed from
/// the parameters when nodes are expanded, so the labels are always
/// consistent with the tree shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BcTree {
    params: SvbcParams,
    nodes: Vec<Node>,
}

impl BcTree {
    /// Single leaf with gap 0.
    pub fn new(params: SvbcParams) -> Self {
        BcTree {
            params,
            nodes: vec![Node {
                kind: NodeKind::Leaf,
                children: Vec::new(),
                gap: Rational::zero(),
                cuts_on_path: 0,
                parent: None,
            }],
        }
    }

    pub fn params(&self) -> &SvbcParams {
        &self.params
    }

    pub const fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Leaf)
    }

    fn push_child(&mut self, parent: NodeId, gap: Rational, cuts_on_path: u64) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Leaf,
            children: Vec::new(),
            gap,
            cuts_on_path,
            parent: Some(parent),
        });
        self.nodes[parent].children.push(id);
        id
    }

    fn expect_leaf(&self, id: NodeId) -> Result<()> {
        match self.nodes.get(id) {
            Some(n) if n.kind == NodeKind::Leaf => Ok(()),
            Some(_) => Err(Error::Tree(format!("node {id} is already expanded"))),
            None => Err(Error::Tree(format!("no node {id}"))),
        }
    }

    /// Turns leaf `id` into a cut node and returns its child.
    pub fn cut(&mut self, id: NodeId) -> Result<NodeId> {
        self.expect_leaf(id)?;
        let z = self.nodes[id].cuts_on_path;
        let gap = &self.nodes[id].gap + self.params.cut_gain(z);
        self.nodes[id].kind = NodeKind::Cut;
        Ok(self.push_child(id, gap, z + 1))
    }

    /// Turns leaf `id` into a branch node and returns `(left, right)`.
    pub fn branch(&mut self, id: NodeId) -> Result<(NodeId, NodeId)> {
        self.expect_leaf(id)?;
        let z = self.nodes[id].cuts_on_path;
        let left = &self.nodes[id].gap + &self.params.ell;
        let right = &self.nodes[id].gap + &self.params.r;
        self.nodes[id].kind = NodeKind::Branch;
        let l = self.push_child(id, left, z);
        let r = self.push_child(id, right, z);
        Ok((l, r))
    }

    /// Checks every structural and labelling invariant.
    pub fn validate(&self) -> Result<()> {
        let root = &self.nodes[0];
        if !root.gap.is_zero() || root.cuts_on_path != 0 || root.parent.is_some() {
            return Err(Error::Tree("root must have gap 0 and no parent".into()));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            let expected = match node.kind {
                NodeKind::Leaf => 0,
                NodeKind::Cut => 1,
                NodeKind::Branch => 2,
            };
            if node.children.len() != expected {
                return Err(Error::Tree(format!(
                    "node {id} is {:?} with {} children",
                    node.kind,
                    node.children.len()
                )));
            }
            for (slot, &child) in node.children.iter().enumerate() {
                let ch = &self.nodes[child];
                if ch.parent != Some(id) {
                    return Err(Error::Tree(format!("node {child} has wrong parent")));
                }
                let (gain, z) = match node.kind {
                    NodeKind::Cut => (
                        self.params.cut_gain(node.cuts_on_path),
                        node.cuts_on_path + 1,
                    ),
                    NodeKind::Branch if slot == 0 => (self.params.ell.clone(), node.cuts_on_path),
                    NodeKind::Branch => (self.params.r.clone(), node.cuts_on_path),
                    NodeKind::Leaf => unreachable!(),
                };
                if ch.gap != &node.gap + &gain {
                    return Err(Error::Tree(format!(
                        "node {child}: gap {} != {} + {gain}",
                        ch.gap, node.gap
                    )));
                }
                if ch.cuts_on_path != z {
                    return Err(Error::Tree(format!("node {child}: wrong cut count")));
                }
            }
        }
        Ok(())
    }

    pub fn proves_bound(&self, z: &Rational) -> bool {
        self.leaves().all(|leaf| leaf.gap >= *z)
    }

    /// Number of cut nodes in the whole tree.
    pub fn num_cuts(&self) -> u64 {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Cut)
            .count() as u64
    }

    pub fn max_cuts_on_path(&self) -> u64 {
        self.nodes.iter().map(|n| n.cuts_on_path).max().unwrap_or(0)
    }

    /// Largest number of branch nodes on any root-to-leaf path.
    pub fn branch_depth(&self) -> u64 {
        let mut depth = vec![0u64; self.nodes.len()];
        let mut best = 0;
        // children always have larger ids than their parents
        for id in 0..self.nodes.len() {
            if let Some(p) = self.nodes[id].parent {
                let inc = u64::from(self.nodes[p].kind == NodeKind::Branch);
                depth[id] = depth[p] + inc;
            }
            best = best.max(depth[id]);
        }
        best
    }

    /// All cut nodes lie on a single path starting at the root.
    pub fn is_cut_and_branch(&self) -> bool {
        let mut id = self.root();
        while self.nodes[id].kind == NodeKind::Cut {
            id = self.nodes[id].children[0];
        }
        let root_cuts = self.nodes[id].cuts_on_path;
        self.nodes
            .iter()
            .all(|n| n.kind != NodeKind::Cut || n.cuts_on_path < root_cuts)
    }

    /// Every leaf sits below the same number of cuts.
    pub fn is_cut_symmetric(&self) -> bool {
        let mut counts = self.leaves().map(|l| l.cuts_on_path);
        match counts.next() {
            Some(first) => counts.all(|z| z == first),
            None => true,
        }
    }

    /// Graphviz rendering: boxes for cut nodes, circles for branch nodes,
    /// ellipses for leaves; labels read `g=p/q z=k`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph bctree {\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let shape = match node.kind {
                NodeKind::Cut => "box",
                NodeKind::Branch => "circle",
                NodeKind::Leaf => "ellipse",
            };
            out.push_str(&format!(
                "  n{id} [label=\"g={} z={}\", shape={shape}];\n",
                node.gap, node.cuts_on_path
            ));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for &child in &node.children {
                out.push_str(&format!("  n{id} -> n{child};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// True iff every leaf of `t` has gap at least `z`.
pub fn proves_bound(t: &BcTree, z: &Rational) -> bool {
    t.proves_bound(z)
}

/// Sum of `w(cuts_on_path(v))` over all nodes.
pub fn tree_time(t: &BcTree, w: &TimeFn) -> Result<Rational> {
    if w.is_constant_one() {
        return Ok(Rational::from(t.len() as u64));
    }
    let mut per_level: BTreeMap<u64, u64> = BTreeMap::new();
    for node in t.nodes() {
        *per_level.entry(node.cuts_on_path).or_default() += 1;
    }
    let mut cache = TimeCache::new(w);
    let mut total = Rational::zero();
    for (z, count) in per_level {
        total = total + cache.get(z)? * Rational::from(count);
    }
    Ok(total)
}

/// `k` cuts from the root followed by a complete branching component of the
/// given depth.
pub fn build_cut_and_branch(params: &SvbcParams, k: u64, depth: u64) -> BcTree {
    let mut tree = BcTree::new(params.clone());
    let mut at = tree.root();
    for _ in 0..k {
        at = tree.cut(at).expect("fresh leaf");
    }
    let mut frontier = vec![at];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for id in frontier {
            let (l, r) = tree.branch(id).expect("fresh leaf");
            next.push(l);
            next.push(r);
        }
        frontier = next;
    }
    tree
}

/// `k` root cuts, then branching at every node whose gap is still below `z`.
/// With `ell = 0` the left side never progresses, so such residuals are
/// rejected.
pub fn build_cuts_then_branching(params: &SvbcParams, k: u64, z: &Rational) -> Result<BcTree> {
    let mut tree = BcTree::new(params.clone());
    let mut at = tree.root();
    for _ in 0..k {
        at = tree.cut(at)?;
    }
    if tree.node(at).gap < *z && !params.ell.is_positive() {
        return Err(Error::Unprovable(format!(
            "pure branching with ell = 0 never reaches {z}"
        )));
    }
    let mut stack = vec![at];
    while let Some(id) = stack.pop() {
        if tree.node(id).gap < *z {
            let (l, r) = tree.branch(id)?;
            stack.push(l);
            stack.push(r);
        }
    }
    Ok(tree)
}

/// The tree that only branches.
pub fn pure_branching_tree(params: &SvbcParams, z: &Rational) -> Result<BcTree> {
    build_cuts_then_branching(params, 0, z)
}

/// The tree that only cuts: a path of cuts until the bound is reached.
pub fn pure_cutting_tree(params: &SvbcParams, z: &Rational) -> Result<BcTree> {
    let k = params
        .cuts_needed(z)
        .ok_or_else(|| Error::Unprovable(format!("pure cutting with c = 0 cannot prove {z}")))?;
    Ok(build_cut_and_branch(params, k, 0))
}

/// Answer record shared by the DP, the closed forms and the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptResult {
    pub tau: Rational,
    pub size: u64,
    pub num_cuts: u64,
    pub branch_depth: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BcTree>,
}

impl OptResult {
    pub fn from_tree(tree: BcTree, w: &TimeFn) -> Result<Self> {
        Ok(OptResult {
            tau: tree_time(&tree, w)?,
            size: tree.len() as u64,
            num_cuts: tree.num_cuts(),
            branch_depth: tree.branch_depth(),
            witness: Some(tree),
        })
    }
}
