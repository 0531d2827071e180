//! Eventually periodic bi-infinite admissible vertex sequences, their metric,
//! the discrete shift, and the transitive-point and chaos constructions.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::literal;

/// A bi-infinite admissible path represented as
/// `... left left core right right ...`.
///
/// In raw coordinates the core occupies `[0, core.len())`, the left period is
/// repeated over negative indices (its last symbol sits at `-1`) and the right
/// period is repeated from `core.len()` onward. The external index `i` maps to
/// raw index `i + index_shift`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicSequence {
    left: Vec<usize>,
    core: Vec<usize>,
    right: Vec<usize>,
    index_shift: i64,
}

/// Smallest `N >= 0` with `2 * 4^-N / 3 <= tol`: the weight of all indices
/// `|i| > N` is at most `tol`.
pub fn truncation_horizon(tol: f64) -> Result<usize> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    let mut n = 0usize;
    while tail_weight(n) > tol {
        n += 1;
    }
    Ok(n)
}

/// `sum_{|i| > n} 4^-|i| = 2 * 4^-n / 3`.
pub fn tail_weight(n: usize) -> f64 {
    2.0 * 0.25f64.powi(n as i32) / 3.0
}

/// Weight `4^-|i|` of index `i`.
pub fn index_weight(i: i64) -> f64 {
    0.25f64.powi(i.unsigned_abs().min(i32::MAX as u64) as i32)
}

impl SymbolicSequence {
    pub fn new(g: &DirectedGraph, left: Vec<usize>, core: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        g.ensure_valid()?;
        let seq = Self {
            left,
            core,
            right,
            index_shift: 0,
        };
        seq.check_admissible(g)?;
        Ok(seq)
    }

    /// Constant sequence on a vertex with a self-loop.
    pub fn constant(g: &DirectedGraph, v: usize) -> Result<Self> {
        Self::new(g, vec![v], vec![], vec![v])
    }

    /// Purely periodic sequence `... w w w ...` with `w[0]` at index 0.
    pub fn periodic(g: &DirectedGraph, word: &[usize]) -> Result<Self> {
        Self::new(g, word.to_vec(), vec![], word.to_vec())
    }

    pub fn with_index_shift(mut self, shift: i64) -> Self {
        self.index_shift = shift;
        self
    }

    pub fn left_period(&self) -> &[usize] {
        &self.left
    }

    pub fn core(&self) -> &[usize] {
        &self.core
    }

    pub fn right_period(&self) -> &[usize] {
        &self.right
    }

    pub fn index_shift(&self) -> i64 {
        self.index_shift
    }

    /// External index of the first core symbol.
    pub fn core_start(&self) -> i64 {
        -self.index_shift
    }

    /// External index one past the last core symbol.
    pub fn core_end(&self) -> i64 {
        self.core_start() + self.core.len() as i64
    }

    fn raw(&self, j: i64) -> usize {
        let c = self.core.len() as i64;
        if j < 0 {
            self.left[j.rem_euclid(self.left.len() as i64) as usize]
        } else if j < c {
            self.core[j as usize]
        } else {
            self.right[(j - c).rem_euclid(self.right.len() as i64) as usize]
        }
    }

    /// Symbol at index `i`.
    pub fn at(&self, i: i64) -> usize {
        self.raw(i + self.index_shift)
    }

    /// Symbols at indices `lo..hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..hi).map(|i| self.at(i)).collect()
    }

    /// Left shift by `k`: `result.at(i) == self.at(i + k)`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.index_shift += k;
        out
    }

    /// Every symbol appearing anywhere in the sequence.
    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.left.iter().chain(&self.core).chain(&self.right).copied()
    }

    /// Checks every adjacent pair, including junctions and period wrap-arounds.
    pub fn check_admissible(&self, g: &DirectedGraph) -> Result<()> {
        if self.left.is_empty() || self.right.is_empty() {
            return Err(Error::arg("periods must be nonempty"));
        }
        let mut chain = Vec::with_capacity(self.left.len() * 2 + self.core.len() + self.right.len() * 2);
        chain.extend_from_slice(&self.left);
        chain.extend_from_slice(&self.left);
        chain.extend_from_slice(&self.core);
        chain.extend_from_slice(&self.right);
        chain.extend_from_slice(&self.right);
        g.check_walk(&chain)
    }

    /// Whether both sequences take the same value at every index.
    pub fn same_values(&self, other: &Self) -> bool {
        let lcm_left = lcm(self.left.len(), other.left.len()) as i64;
        let lcm_right = lcm(self.right.len(), other.right.len()) as i64;
        let lo = self.core_start().min(other.core_start()) - lcm_left;
        let hi = self.core_end().max(other.core_end()) + lcm_right;
        (lo..hi).all(|i| self.at(i) == other.at(i))
    }

    /// Sequence equal to `self` below index `from`, then `middle`, then `tail`
    /// read from index `tail_from` onward.
    pub fn splice(
        &self,
        g: &DirectedGraph,
        from: i64,
        middle: &[usize],
        tail: &SymbolicSequence,
        tail_from: i64,
    ) -> Result<Self> {
        let lo = from.min(self.core_start());
        let l = self.left.len() as i64;
        let left = (0..l).map(|k| self.at(lo - l + k)).collect();
        let b = tail_from.max(tail.core_end());
        let mut core: Vec<usize> = (lo..from).map(|i| self.at(i)).collect();
        core.extend_from_slice(middle);
        core.extend((tail_from..b).map(|i| tail.at(i)));
        let right = (0..tail.right.len() as i64).map(|k| tail.at(b + k)).collect();
        let out = Self {
            left,
            core,
            right,
            index_shift: -lo,
        };
        out.check_admissible(g)?;
        Ok(out)
    }

    /// Truncated metric `sum_{|i| <= N} [x_i != y_i] 4^-|i|`, with `N` chosen
    /// so that the neglected tail is at most `tol`.
    pub fn distance(&self, other: &Self, tol: f64) -> Result<f64> {
        let n = truncation_horizon(tol)? as i64;
        Ok((-n..=n)
            .filter(|&i| self.at(i) != other.at(i))
            .map(index_weight)
            .sum())
    }

    pub fn to_literal(&self, g: &DirectedGraph) -> String {
        format!(
            "left=({}) core=[{}] right=({}) shift={}",
            literal::format_word(g, &self.left),
            literal::format_word(g, &self.core),
            literal::format_word(g, &self.right),
            self.index_shift
        )
    }

    /// Parses `left=(word) core=[word] right=(word) shift=k`. `core` and `shift`
    /// are optional.
    pub fn parse(g: &DirectedGraph, text: &str) -> Result<Self> {
        let fields = literal::fields(text)?;
        Self::from_fields(g, &fields, &[])
    }

    pub(crate) fn from_fields(
        g: &DirectedGraph,
        fields: &[literal::Field<'_>],
        extra_keys: &[&str],
    ) -> Result<Self> {
        let mut left = None;
        let mut right = None;
        let mut core = Vec::new();
        let mut shift = 0i64;
        for f in fields {
            match f.key {
                "left" => {
                    let (inner, pos) = literal::unbracket(f, '(', ')')?;
                    left = Some((literal::word(g, inner, pos)?, f.position));
                }
                "right" => {
                    let (inner, pos) = literal::unbracket(f, '(', ')')?;
                    right = Some((literal::word(g, inner, pos)?, f.position));
                }
                "core" => {
                    let (inner, pos) = literal::unbracket(f, '[', ']')?;
                    core = literal::word(g, inner, pos)?;
                }
                "shift" => {
                    shift = f
                        .value
                        .parse()
                        .map_err(|_| Error::parse(f.position, "shift must be an integer"))?;
                }
                k if extra_keys.contains(&k) => {}
                k => return Err(Error::parse(f.position, format!("unknown key `{k}`"))),
            }
        }
        let (left, lpos) = left.ok_or_else(|| Error::parse(0, "missing `left=(...)`"))?;
        let (right, rpos) = right.ok_or_else(|| Error::parse(0, "missing `right=(...)`"))?;
        if left.is_empty() {
            return Err(Error::parse(lpos, "left period is empty"));
        }
        if right.is_empty() {
            return Err(Error::parse(rpos, "right period is empty"));
        }
        Ok(Self::new(g, left, core, right)?.with_index_shift(shift))
    }
}

impl fmt::Display for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        write!(
            f,
            "left=({}) core=[{}] right=({}) shift={}",
            w(&self.left),
            w(&self.core),
            w(&self.right),
            self.index_shift
        )
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Checks that `component` is exactly one strongly connected component of
/// `g` and returns it sorted.
pub fn check_component(g: &DirectedGraph, component: &[usize]) -> Result<Vec<usize>> {
    let mut c = component.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.is_empty() {
        return Err(Error::arg("component is empty"));
    }
    for &v in &c {
        g.check_vertex(v)?;
    }
    let scc = g.scc();
    let id = scc.component_of[c[0]];
    if scc.components[id] != c {
        return Err(Error::arg(format!(
            "{c:?} is not a strongly connected component (the component of {} is {:?})",
            c[0], scc.components[id]
        )));
    }
    Ok(c)
}

/// All walks with `len` symbols staying inside `component`, in lexicographic
/// order.
pub fn enumerate_admissible_words(g: &DirectedGraph, component: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut inside = vec![false; g.vertex_count()];
    for &v in component {
        if v < inside.len() {
            inside[v] = true;
        }
    }
    let mut starts: Vec<usize> = component.iter().copied().filter(|&v| v < inside.len()).collect();
    starts.sort_unstable();
    starts.dedup();
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    let mut word = Vec::with_capacity(len);
    fn extend(
        g: &DirectedGraph,
        inside: &[bool],
        len: usize,
        word: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        let last = *word.last().expect("word is nonempty");
        for &s in g.successors(last) {
            if inside[s] {
                word.push(s);
                extend(g, inside, len, word, out);
                word.pop();
            }
        }
    }
    for s in starts {
        word.push(s);
        extend(g, &inside, len, &mut word, &mut out);
        word.pop();
    }
    out
}

/// Appends `next` to `walk`, inserting the interior of a shortest connecting
/// path when the junction is not an edge.
fn join(g: &DirectedGraph, walk: &mut Vec<usize>, next: &[usize]) -> Result<()> {
    if let (Some(&a), Some(&b)) = (walk.last(), next.first()) {
        if !g.has_edge(a, b) {
            let path = g.admissible_path(a, b).ok_or(Error::Inadmissible { from: a, to: b })?;
            if path.len() == 1 {
                // a == b without a self-loop: go around a cycle
                let cycle = g.cycle_through(a).ok_or(Error::Inadmissible { from: a, to: a })?;
                walk.extend_from_slice(&cycle[1..]);
            } else {
                walk.extend_from_slice(&path[1..path.len() - 1]);
            }
        }
    }
    walk.extend_from_slice(next);
    Ok(())
}

/// A sequence inside `component` whose right tail contains every admissible
/// word of length at most `max_len` over the component as a factor.
pub fn transitive_sequence(g: &DirectedGraph, component: &[usize], max_len: usize) -> Result<SymbolicSequence> {
    g.ensure_valid()?;
    let c = check_component(g, component)?;
    if max_len == 0 {
        return Err(Error::arg("word length must be positive"));
    }
    let words = enumerate_admissible_words(g, &c, max_len);
    if words.is_empty() {
        return Err(Error::arg(format!("component {c:?} carries no cycle")));
    }
    // Inside a nontrivial component every shorter word extends to one of
    // length `max_len`, so covering those covers all shorter words too.
    let mut walk: Vec<usize> = Vec::new();
    for w in &words {
        join(g, &mut walk, w)?;
    }
    let first = walk[0];
    let last = *walk.last().expect("nonempty");
    if !g.has_edge(last, first) {
        let path = g.admissible_path(last, first).ok_or(Error::Inadmissible { from: last, to: first })?;
        if path.len() == 1 {
            let cycle = g.cycle_through(last).ok_or(Error::Inadmissible { from: last, to: last })?;
            walk.extend_from_slice(&cycle[1..]);
        } else {
            walk.extend_from_slice(&path[1..path.len() - 1]);
        }
    }
    let left = g
        .cycle_through(first)
        .ok_or_else(|| Error::arg(format!("component {c:?} carries no cycle")))?;
    SymbolicSequence::new(g, left, vec![], walk)
}

/// Outcome of the out-degree test on a component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChaosCertificate {
    /// Every vertex has exactly one successor inside the component: the lift
    /// is the single periodic orbit spelled by this word.
    PeriodicOrbit { word: Vec<usize> },
    /// A vertex with at least two successors inside the component.
    Chaotic { witness: usize },
    /// Single vertex without a self-loop; its lift is empty.
    Transient,
}

pub fn chaos_certificate(g: &DirectedGraph, component: &[usize]) -> Result<ChaosCertificate> {
    let c = check_component(g, component)?;
    let inside = |v: usize| c.binary_search(&v).is_ok();
    let internal: Vec<Vec<usize>> = c
        .iter()
        .map(|&v| g.successors(v).iter().copied().filter(|&s| inside(s)).collect())
        .collect();
    if let Some(pos) = internal.iter().position(|s| s.len() >= 2) {
        return Ok(ChaosCertificate::Chaotic { witness: c[pos] });
    }
    if internal.iter().any(Vec::is_empty) {
        return Ok(ChaosCertificate::Transient);
    }
    let mut word = vec![c[0]];
    loop {
        let pos = c.binary_search(word.last().unwrap()).unwrap();
        let next = internal[pos][0];
        if next == c[0] {
            break;
        }
        word.push(next);
    }
    Ok(ChaosCertificate::PeriodicOrbit { word })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> DirectedGraph {
        DirectedGraph::new(3, &[(0, 0), (0, 1), (1, 2), (2, 2)]).unwrap()
    }

    fn brute_metric(x: &SymbolicSequence, y: &SymbolicSequence, n: i64) -> f64 {
        (-n..=n)
            .map(|i| if x.at(i) != y.at(i) { 4f64.powi(-(i.abs() as i32)) } else { 0.0 })
            .sum()
    }

    #[test]
    fn indexing_examples() {
        let k1 = DirectedGraph::complete(1).unwrap();
        let a = SymbolicSequence::constant(&k1, 0).unwrap();
        assert!((-7..7).all(|i| a.at(i) == 0));

        let x = SymbolicSequence::new(&abc(), vec![0], vec![1], vec![2]).unwrap();
        assert_eq!(x.at(0), 1);
        assert_eq!(x.at(-3), 0);
        assert_eq!(x.at(5), 2);
    }

    #[test]
    fn rejects_inadmissible_representations() {
        let g = abc();
        assert!(matches!(
            SymbolicSequence::new(&g, vec![0], vec![2], vec![2]),
            Err(Error::Inadmissible { from: 0, to: 2 })
        ));
        let c2 = DirectedGraph::cycle(2).unwrap();
        // left period wrap-around 0 -> 0 is not an edge
        assert!(SymbolicSequence::new(&c2, vec![0], vec![1], vec![0, 1]).is_err());
        assert!(SymbolicSequence::new(&c2, vec![0, 1], vec![], vec![0, 1]).is_ok());
    }

    #[test]
    fn discrete_shift_examples() {
        let c2 = DirectedGraph::cycle(2).unwrap();
        let ab = SymbolicSequence::periodic(&c2, &[0, 1]).unwrap();
        let ba = SymbolicSequence::periodic(&c2, &[1, 0]).unwrap();
        assert!(ab.shift(0).same_values(&ab));
        assert!(ab.shift(3).shift(-3).same_values(&ab));
        let shifted = ab.shift(1);
        assert!((-4..=4).all(|i| shifted.at(i) == ba.at(i)));
        assert!(shifted.same_values(&ba));
        assert!(!ab.same_values(&ba));
    }

    #[test]
    fn metric_examples() {
        let k2 = DirectedGraph::complete(2).unwrap();
        let a = SymbolicSequence::constant(&k2, 0).unwrap();
        let b = SymbolicSequence::constant(&k2, 1).unwrap();
        assert_eq!(a.distance(&a, 1e-10).unwrap(), 0.0);
        let a_b_at_zero = SymbolicSequence::new(&k2, vec![0], vec![1], vec![0]).unwrap();
        assert_eq!(a.distance(&a_b_at_zero, 1e-10).unwrap(), 1.0);
        let d = a.distance(&b, 1e-10).unwrap();
        assert!((d - 5.0 / 3.0).abs() <= 1e-10);
        assert!(a.distance(&b, 0.0).is_err());
        assert!(a.distance(&b, -1.0).is_err());
    }

    #[test]
    fn truncated_metric_matches_long_brute_force_sum() {
        let k2 = DirectedGraph::complete(2).unwrap();
        let x = SymbolicSequence::new(&k2, vec![0, 1, 1], vec![1, 0, 0, 1], vec![1, 0]).unwrap();
        let y = SymbolicSequence::new(&k2, vec![1], vec![0, 0], vec![0, 1, 1]).unwrap().shift(2);
        for tol in [1e-3, 1e-6, 1e-10] {
            let d = x.distance(&y, tol).unwrap();
            assert!((d - brute_metric(&x, &y, 40)).abs() <= tol);
        }
    }

    #[test]
    fn horizon_is_minimal() {
        for tol in [1.0, 0.3, 1e-3, 1e-10] {
            let n = truncation_horizon(tol).unwrap();
            assert!(tail_weight(n) <= tol);
            if n > 0 {
                assert!(tail_weight(n - 1) > tol);
            }
        }
    }

    #[test]
    fn word_enumeration_examples() {
        let k2 = DirectedGraph::complete(2).unwrap();
        assert_eq!(
            enumerate_admissible_words(&k2, &[0, 1], 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        let c2 = DirectedGraph::cycle(2).unwrap();
        assert_eq!(enumerate_admissible_words(&c2, &[0, 1], 2), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            enumerate_admissible_words(&c2, &[0, 1], 3),
            vec![vec![0, 1, 0], vec![1, 0, 1]]
        );
        assert!(enumerate_admissible_words(&c2, &[], 3).is_empty());
    }

    fn contains_factor(hay: &[usize], needle: &[usize]) -> bool {
        hay.windows(needle.len()).any(|w| w == needle)
    }

    #[test]
    fn transitive_sequence_examples() {
        let k1 = DirectedGraph::complete(1).unwrap();
        let x = transitive_sequence(&k1, &[0], 3).unwrap();
        assert!(x.same_values(&SymbolicSequence::constant(&k1, 0).unwrap()));

        let k2 = DirectedGraph::complete(2).unwrap();
        let x = transitive_sequence(&k2, &[0, 1], 2).unwrap();
        let tail = x.window(0, 2 * x.right_period().len() as i64);
        for w in enumerate_admissible_words(&k2, &[0, 1], 2) {
            assert!(contains_factor(&tail, &w), "{w:?} missing");
        }

        let c2 = DirectedGraph::cycle(2).unwrap();
        let x = transitive_sequence(&c2, &[0, 1], 3).unwrap();
        let tail = x.window(0, 20);
        assert!(contains_factor(&tail, &[0, 1, 0]));
        assert!(contains_factor(&tail, &[1, 0, 1]));
    }

    #[test]
    fn transitive_sequence_rejects_non_components() {
        let g = abc();
        assert!(transitive_sequence(&g, &[0, 1], 2).is_err());
        let g = DirectedGraph::new(3, &[(0, 0), (0, 1), (1, 2), (2, 2)]).unwrap();
        // vertex 1 is a component without a cycle
        assert!(transitive_sequence(&g, &[1], 2).is_err());
    }

    #[test]
    fn chaos_certificate_examples() {
        let c2 = DirectedGraph::cycle(2).unwrap();
        assert_eq!(
            chaos_certificate(&c2, &[0, 1]).unwrap(),
            ChaosCertificate::PeriodicOrbit { word: vec![0, 1] }
        );
        let k2 = DirectedGraph::complete(2).unwrap();
        assert_eq!(
            chaos_certificate(&k2, &[0, 1]).unwrap(),
            ChaosCertificate::Chaotic { witness: 0 }
        );
        let c3 = DirectedGraph::cycle(3).unwrap();
        assert_eq!(
            chaos_certificate(&c3, &[2, 0, 1]).unwrap(),
            ChaosCertificate::PeriodicOrbit { word: vec![0, 1, 2] }
        );
        let g = DirectedGraph::new(3, &[(0, 0), (0, 1), (1, 2), (2, 2)]).unwrap();
        assert_eq!(chaos_certificate(&g, &[1]).unwrap(), ChaosCertificate::Transient);
    }

    #[test]
    fn splice_keeps_prefix_and_tail() {
        let k2 = DirectedGraph::complete(2).unwrap();
        let x = SymbolicSequence::new(&k2, vec![0, 1], vec![1, 1, 0], vec![0, 0, 1]).unwrap().shift(-2);
        let t = SymbolicSequence::new(&k2, vec![1], vec![0], vec![1, 0]).unwrap();
        for from in [-6, -1, 0, 3, 9] {
            let y = x.splice(&k2, from, &[1, 1, 0], &t, -2).unwrap();
            for i in -20..40 {
                let expect = if i < from {
                    x.at(i)
                } else if i < from + 3 {
                    [1, 1, 0][(i - from) as usize]
                } else {
                    t.at(i - from - 3 - 2)
                };
                assert_eq!(y.at(i), expect, "from={from} i={i}");
            }
        }
    }

    #[test]
    fn literal_round_trip() {
        let g = abc();
        let x = SymbolicSequence::parse(&g, "left=(A) core=[B] right=(C) shift=1").unwrap();
        assert_eq!(x.at(-1), 1);
        assert_eq!(SymbolicSequence::parse(&g, &x.to_literal(&g)).unwrap(), x);
        assert!(matches!(
            SymbolicSequence::parse(&g, "left=(A) core=[B] right=(C) shift=x"),
            Err(Error::Parse { position: 34, .. })
        ));
        assert!(SymbolicSequence::parse(&g, "left=(A) right=(C)").is_err());
    }
}
