//! Switching-rule graphs: validation, strongly connected components, the
//! condensation order and admissible paths.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed graph on vertices `0..n` with adjacency-matrix semantics: self-loops
/// are allowed, parallel edges are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    labels: Vec<String>,
}

/// A vertex that violates the degree condition of [`DirectedGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    pub vertex: usize,
    pub in_degree: usize,
    pub out_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<DegreeViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn offending_vertices(&self) -> Vec<usize> {
        self.violations.iter().map(|v| v.vertex).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                format!(
                    "vertex {} (in-degree {}, out-degree {})",
                    v.vertex, v.in_degree, v.out_degree
                )
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Deserialize)]
struct GraphDocument {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Default label for vertex `v`: `A`..`Z`, then `v26`, `v27`, ...
pub fn default_label(v: usize) -> String {
    if v < 26 {
        ((b'A' + v as u8) as char).to_string()
    } else {
        format!("v{v}")
    }
}

impl DirectedGraph {
    /// Builds a graph from an edge list. Only structural checks are done here;
    /// see [`DirectedGraph::validate`] for the degree condition.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut succ = vec![Vec::new(); vertex_count];
        let mut pred = vec![Vec::new(); vertex_count];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            succ[u].push(v);
            pred[v].push(u);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            succ,
            pred,
            labels: (0..vertex_count).map(default_label).collect(),
        })
    }

    /// Like [`DirectedGraph::new`] but also rejects graphs failing validation.
    pub fn validated(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::new(vertex_count, edges)?;
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::arg(format!(
                "{} labels given for {} vertices",
                labels.len(),
                self.vertex_count()
            )));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() || labels.iter().any(|l| l.trim().is_empty()) {
            return Err(Error::arg("vertex labels must be unique and nonempty"));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Complete graph on `n` vertices, self-loops included.
    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges)
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::new(n, &edges)
    }

    /// Parses `{"vertices": n, "edges": [[u,v],...], "labels": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| {
            Error::parse(e.column(), format!("line {}: {e}", e.line()))
        })?;
        let edges: Vec<_> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Self::new(doc.vertices, &edges)?;
        match doc.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }

    /// Parses one `u v` edge per line; `#` starts a comment. The vertex count is
    /// one more than the largest index mentioned.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = line.split('#').next().unwrap_or("");
            let fields: Vec<&str> = body.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                [u, v] => {
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| Error::parse(offset, format!("bad vertex index `{s}`")))
                    };
                    edges.push((parse(u)?, parse(v)?));
                }
                _ => return Err(Error::parse(offset, "expected `u v`")),
            }
            offset += line.len();
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(n, &edges)
    }

    /// Reads either format, sniffing for a leading `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_edge_list(text)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertex_count(),
            "edges": self.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
            "labels": self.labels,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.succ[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.pred[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count() && self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_complete(&self) -> bool {
        self.succ.iter().all(|s| s.len() == self.vertex_count())
    }

    /// Every vertex must have in-degree and out-degree at least one, so that
    /// bi-infinite admissible paths pass through every vertex.
    pub fn validate(&self) -> ValidationReport {
        let violations = (0..self.vertex_count())
            .filter(|&v| self.in_degree(v) == 0 || self.out_degree(v) == 0)
            .map(|v| DegreeViolation {
                vertex: v,
                in_degree: self.in_degree(v),
                out_degree: self.out_degree(v),
            })
            .collect();
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.to_string()))
        }
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    /// Checks that consecutive symbols of `word` are edges.
    pub fn check_walk(&self, word: &[usize]) -> Result<()> {
        for &v in word {
            self.check_vertex(v)?;
        }
        for pair in word.windows(2) {
            if !self.has_edge(pair[0], pair[1]) {
                return Err(Error::Inadmissible {
                    from: pair[0],
                    to: pair[1],
                });
            }
        }
        Ok(())
    }

    pub fn scc(&self) -> SccDecomposition {
        SccDecomposition::new(self)
    }

    /// Shortest walk `u ... v` (both ends included), found by breadth-first
    /// search that expands successors in increasing index order. `u == v`
    /// yields `[u]`.
    pub fn admissible_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        if u >= self.vertex_count() || v >= self.vertex_count() {
            return None;
        }
        if u == v {
            return Some(vec![u]);
        }
        let mut parent = vec![usize::MAX; self.vertex_count()];
        parent[u] = u;
        let mut queue = VecDeque::from([u]);
        while let Some(w) = queue.pop_front() {
            for &x in &self.succ[w] {
                if parent[x] != usize::MAX {
                    continue;
                }
                parent[x] = w;
                if x == v {
                    let mut path = vec![v];
                    let mut cur = v;
                    while cur != u {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(x);
            }
        }
        None
    }

    /// Shortest closed walk through `v`, returned as the word that starts at
    /// `v` and whose last symbol has an edge back to `v`.
    pub fn cycle_through(&self, v: usize) -> Option<Vec<usize>> {
        if self.has_edge(v, v) {
            return Some(vec![v]);
        }
        self.succ
            .get(v)?
            .iter()
            .filter_map(|&s| self.admissible_path(s, v))
            .min_by_key(Vec::len)
            .map(|back| {
                let mut word = vec![v];
                word.extend_from_slice(&back[..back.len() - 1]);
                word
            })
    }
}

/// Strongly connected components of an adjacency list, emitted in reverse
/// topological order of the condensation (sinks first). Iterative Tarjan.
pub fn tarjan_scc(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adjacency[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

/// Maximal SCC partition together with the condensation DAG. Components are
/// numbered in a topological order of the condensation: every condensation
/// edge `(a, b)` has `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccDecomposition {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    pub condensation_edges: BTreeSet<(usize, usize)>,
    /// Whether each component carries at least one internal edge (a cycle).
    pub nontrivial: Vec<bool>,
}

impl SccDecomposition {
    pub fn new(g: &DirectedGraph) -> Self {
        let mut components = tarjan_scc(&g.succ);
        components.reverse();
        let mut component_of = vec![0; g.vertex_count()];
        for (id, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = id;
            }
        }
        let mut condensation_edges = BTreeSet::new();
        let mut nontrivial = vec![false; components.len()];
        for (u, v) in g.edges() {
            let (cu, cv) = (component_of[u], component_of[v]);
            if cu == cv {
                nontrivial[cu] = true;
            } else {
                condensation_edges.insert((cu, cv));
            }
        }
        Self {
            components,
            component_of,
            condensation_edges,
            nontrivial,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Depth-first search over the condensation looking for a back edge.
    pub fn condensation_is_acyclic(&self) -> bool {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.condensation_edges {
            adj[a].push(b);
        }
        // 0 = white, 1 = grey, 2 = black
        let mut color = vec![0u8; n];
        for root in 0..n {
            if color[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            color[root] = 1;
            while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
                if let Some(&w) = adj[v].get(*pos) {
                    *pos += 1;
                    match color[w] {
                        0 => {
                            color[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    color[v] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    pub fn morse_order(&self) -> MorseOrder {
        MorseOrder::from_condensation(self.len(), &self.condensation_edges)
    }
}

/// Reflexive-transitive closure of the condensation edges. `precedes(a, b)`
/// holds when component `b` is reachable from component `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseOrder {
    leq: Vec<Vec<bool>>,
}

impl MorseOrder {
    pub fn from_condensation(n: usize, edges: &BTreeSet<(usize, usize)>) -> Self {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self { leq }
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// All related pairs `(a, b)` with `a != b`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.leq[a][b])
            .collect()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|i| self.leq[i][i])
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| a == b || !(self.leq[a][b] && self.leq[b][a])))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.leq[a][b] || (0..n).all(|c| !self.leq[b][c] || self.leq[a][c]))
        })
    }

    pub fn is_partial_order(&self) -> bool {
        self.is_reflexive() && self.is_antisymmetric() && self.is_transitive()
    }
}
