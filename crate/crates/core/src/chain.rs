//! Gridded (ε, T)-chain analysis on the state box: an outer-approximated
//! reachability graph over grid cells (optionally paired with graph
//! vertices), its chain components, viability kernels and lifts.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{euclidean, StateBox, SwitchedSystem};
use crate::graph::{tarjan_scc, DirectedGraph};

/// Uniform partition of a box into row-major indexed cells (first axis
/// slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    bounds: StateBox,
    counts: Vec<usize>,
    widths: Vec<f64>,
    radius: f64,
}

impl Grid {
    pub fn new(bounds: StateBox, counts: &[usize]) -> Result<Self> {
        if counts.len() != bounds.dimension() {
            return Err(Error::arg(format!(
                "{} cell counts given for a {}-dimensional box",
                counts.len(),
                bounds.dimension()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::arg("cell counts must be at least 1"));
        }
        let widths: Vec<f64> = (0..counts.len())
            .map(|i| (bounds.upper()[i] - bounds.lower()[i]) / counts[i] as f64)
            .collect();
        let radius = 0.5 * widths.iter().map(|w| w * w).sum::<f64>().sqrt();
        Ok(Self {
            bounds,
            counts: counts.to_vec(),
            widths,
            radius,
        })
    }

    pub fn bounds(&self) -> &StateBox {
        &self.bounds
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Half the diagonal of one cell.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dimension(&self) -> usize {
        self.counts.len()
    }

    pub fn cell_count(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn multi_index(&self, cell: usize) -> Vec<usize> {
        let mut rest = cell;
        let mut out = vec![0; self.dimension()];
        for (i, &n) in self.counts.iter().enumerate().rev() {
            out[i] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.counts).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        self.multi_index(cell)
            .iter()
            .enumerate()
            .map(|(i, &k)| self.bounds.lower()[i] + (k as f64 + 0.5) * self.widths[i])
            .collect()
    }

    pub fn centers(&self, cells: &[usize]) -> Vec<Vec<f64>> {
        cells.iter().map(|&c| self.center(c)).collect()
    }

    /// Cell containing `x`; upper faces belong to the last cell on each axis.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        if !self.bounds.contains(x) {
            return None;
        }
        let multi: Vec<usize> = (0..self.dimension())
            .map(|i| {
                let k = ((x[i] - self.bounds.lower()[i]) / self.widths[i]).floor() as usize;
                k.min(self.counts[i] - 1)
            })
            .collect();
        Some(self.flat_index(&multi))
    }

    /// The `2^d` corners of a cell.
    pub fn corners(&self, cell: usize) -> Vec<Vec<f64>> {
        let c = self.center(cell);
        let d = self.dimension();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| {
                        let sign = if mask >> i & 1 == 1 { 0.5 } else { -0.5 };
                        c[i] + sign * self.widths[i]
                    })
                    .collect()
            })
            .collect()
    }

    /// Cells whose centers lie within Euclidean distance `r` of `p`.
    pub fn cells_near(&self, p: &[f64], r: f64) -> Vec<usize> {
        let d = self.dimension();
        let mut ranges = Vec::with_capacity(d);
        for i in 0..d {
            let lo = self.bounds.lower()[i];
            let w = self.widths[i];
            let first = ((p[i] - r - lo) / w - 0.5).ceil().max(0.0);
            let last = ((p[i] + r - lo) / w - 0.5).floor().min(self.counts[i] as f64 - 1.0);
            if first > last {
                return Vec::new();
            }
            ranges.push((first as usize, last as usize));
        }
        let mut out = Vec::new();
        let mut multi: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        loop {
            let cell = self.flat_index(&multi);
            if euclidean(&self.center(cell), p) <= r {
                out.push(cell);
            }
            // odometer over the per-axis ranges, last axis fastest
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if multi[axis] < ranges[axis].1 {
                    multi[axis] += 1;
                    break;
                }
                multi[axis] = ranges[axis].0;
            }
        }
    }
}

/// Uniform grid with `counts[i]` cells along axis `i`.
pub fn build_grid(bounds: StateBox, counts: &[usize]) -> Result<Grid> {
    Grid::new(bounds, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMode {
    /// Nodes are cells; each link may use any walk of the graph.
    Free,
    /// Nodes are (cell, vertex) pairs; links use walks starting at the vertex.
    GraphConstrained,
}

impl fmt::Display for ChainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainMode::Free => "free",
            ChainMode::GraphConstrained => "graph-constrained",
        })
    }
}

impl FromStr for ChainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" | "free-switching" => Ok(ChainMode::Free),
            "graph" | "graph-constrained" => Ok(ChainMode::GraphConstrained),
            _ => Err(Error::arg(format!("unknown chain mode `{s}`"))),
        }
    }
}

pub const DEFAULT_WORK_LIMIT: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainParams {
    /// Jump tolerance, in state units.
    pub eps: f64,
    /// Link duration `T = m h`.
    pub m: usize,
    pub mode: ChainMode,
    /// Switch offsets sampled per cell: `tau in {0, h/q, ..., (q-1) h/q}`.
    pub q: usize,
    /// Upper bound on nodes × words.
    pub work_limit: usize,
}

impl ChainParams {
    pub fn new(eps: f64, m: usize, mode: ChainMode) -> Self {
        Self {
            eps,
            m,
            mode,
            q: 1,
            work_limit: DEFAULT_WORK_LIMIT,
        }
    }

    pub fn with_offsets(mut self, q: usize) -> Self {
        self.q = q;
        self
    }

    pub fn with_work_limit(mut self, limit: usize) -> Self {
        self.work_limit = limit;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::arg(format!("eps must be positive, got {}", self.eps)));
        }
        if self.m == 0 {
            return Err(Error::arg("m must be at least 1"));
        }
        if self.q == 0 {
            return Err(Error::arg("q must be at least 1"));
        }
        Ok(())
    }
}

/// A vertex word with per-letter durations summing to `m h`.
#[derive(Debug, Clone, PartialEq)]
struct TimedWord {
    letters: Vec<usize>,
    durations: Vec<f64>,
}

impl TimedWord {
    fn first(&self) -> usize {
        self.letters[0]
    }

    fn last(&self) -> usize {
        *self.letters.last().expect("words are nonempty")
    }
}

/// All walks of `len` vertices starting at `start`, in lexicographic order.
fn walks_from(g: &DirectedGraph, start: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![start]];
    while let Some(w) = stack.pop() {
        if w.len() == len {
            out.push(w);
            continue;
        }
        let last = *w.last().expect("nonempty");
        for &s in g.successors(last).iter().rev() {
            let mut next = w.clone();
            next.push(s);
            stack.push(next);
        }
    }
    out
}

/// Words of total duration `m h` for every sampled offset: `m` full cells at
/// offset 0, and `tau, h, ..., h, h - tau` otherwise.
fn timed_words(g: &DirectedGraph, m: usize, q: usize, h: f64) -> Vec<TimedWord> {
    let mut out = Vec::new();
    for r in 0..q {
        let tau = r as f64 * h / q as f64;
        let len = if r == 0 { m } else { m + 1 };
        let durations: Vec<f64> = if r == 0 {
            vec![h; m]
        } else {
            std::iter::once(tau)
                .chain(std::iter::repeat_n(h, m - 1))
                .chain(std::iter::once(h - tau))
                .collect()
        };
        for v in 0..g.vertex_count() {
            for letters in walks_from(g, v, len) {
                out.push(TimedWord {
                    letters,
                    durations: durations.clone(),
                });
            }
        }
    }
    out
}

fn flow_word(sys: &SwitchedSystem, x: &[f64], word: &TimedWord) -> Result<Vec<f64>> {
    let mut x = x.to_vec();
    for (&v, &dt) in word.letters.iter().zip(&word.durations) {
        x = sys.integrate_segment(v, &x, dt)?;
    }
    Ok(x)
}

/// Image of the center together with the largest corner displacement from it.
fn outer_image(sys: &SwitchedSystem, grid: &Grid, cell: usize, word: &TimedWord) -> Result<(Vec<f64>, f64)> {
    let img = flow_word(sys, &grid.center(cell), word)?;
    let mut spread = 0.0f64;
    for corner in grid.corners(cell) {
        spread = spread.max(euclidean(&flow_word(sys, &corner, word)?, &img));
    }
    Ok((img, spread))
}

fn check_setup(sys: &SwitchedSystem, g: &DirectedGraph, grid: &Grid) -> Result<()> {
    g.ensure_valid()?;
    if sys.fields().len() != g.vertex_count() {
        return Err(Error::arg("system and graph disagree on the number of vertices"));
    }
    if grid.dimension() != sys.dimension() {
        return Err(Error::arg("grid and system dimensions differ"));
    }
    Ok(())
}

/// `phi(m h, center(cell), f)` for the cell-aligned signal spelling `word`.
pub fn step_image(sys: &SwitchedSystem, g: &DirectedGraph, grid: &Grid, cell: usize, word: &[usize]) -> Result<Vec<f64>> {
    if word.is_empty() {
        return Err(Error::arg("word must be nonempty"));
    }
    if cell >= grid.cell_count() {
        return Err(Error::arg(format!("cell {cell} out of range")));
    }
    g.check_walk(word)?;
    let tw = TimedWord {
        letters: word.to_vec(),
        durations: vec![sys.step(); word.len()],
    };
    flow_word(sys, &grid.center(cell), &tw)
}

/// Directed graph over grid nodes. `a -> b` whenever some admissible word
/// carries the center of `a` to within `eps + spread + radius` of the center
/// of `b`, where `spread` bounds how far the images of `a`'s corners stray
/// from the center image.
///
/// Two uninflated relations are kept for viability: the point map (the cell
/// holding the center's image) and the cover map (other cells meeting the
/// image of the whole cell, plus the point map).
#[derive(Debug, Clone)]
pub struct ChainGraph {
    params: ChainParams,
    grid: Grid,
    vertex_count: usize,
    succ: Vec<Vec<usize>>,
    exact: Vec<Vec<usize>>,
    covers: Vec<Vec<usize>>,
}

impl ChainGraph {
    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn mode(&self) -> ChainMode {
        self.params.mode
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    /// Successors under the exact point map.
    pub fn point_successors(&self, node: usize) -> &[usize] {
        &self.exact[node]
    }

    /// Other nodes whose cells meet the image of this node's cell, plus the
    /// point-map successors.
    pub fn cover_successors(&self, node: usize) -> &[usize] {
        &self.covers[node]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn node(&self, cell: usize, vertex: Option<usize>) -> usize {
        match (self.params.mode, vertex) {
            (ChainMode::GraphConstrained, Some(v)) => cell * self.vertex_count + v,
            _ => cell,
        }
    }

    pub fn cell_of_node(&self, node: usize) -> usize {
        match self.params.mode {
            ChainMode::Free => node,
            ChainMode::GraphConstrained => node / self.vertex_count,
        }
    }

    pub fn vertex_of_node(&self, node: usize) -> Option<usize> {
        match self.params.mode {
            ChainMode::Free => None,
            ChainMode::GraphConstrained => Some(node % self.vertex_count),
        }
    }

    fn project(&self, nodes: &[usize]) -> Vec<usize> {
        let mut cells: Vec<usize> = nodes.iter().map(|&n| self.cell_of_node(n)).collect();
        cells.dedup();
        cells.sort_unstable();
        cells.dedup();
        cells
    }
}

pub fn build_chain_graph(
    sys: &SwitchedSystem,
    g: &DirectedGraph,
    grid: &Grid,
    params: &ChainParams,
) -> Result<ChainGraph> {
    params.validate()?;
    check_setup(sys, g, grid)?;
    let n = g.vertex_count();
    let words = timed_words(g, params.m, params.q, sys.step());
    let cells = grid.cell_count();
    let (nodes, words_per_node) = match params.mode {
        ChainMode::Free => (cells, words.len()),
        ChainMode::GraphConstrained => (cells * n, words.len().div_ceil(n)),
    };
    let work = nodes.saturating_mul(words_per_node);
    if work > params.work_limit {
        return Err(Error::ResourceGuard(format!(
            "{nodes} nodes x {words_per_node} words = {work} exceeds the limit of {}; \
             use a coarser grid or a smaller m",
            params.work_limit
        )));
    }

    let images: Vec<Vec<(Vec<f64>, f64)>> = (0..cells)
        .into_par_iter()
        .map(|c| words.iter().map(|w| outer_image(sys, grid, c, w)).collect())
        .collect::<Result<_>>()?;

    // (eps-inflated, point map, cover map) targets of one cell under one word
    let links = |cell: usize, w: usize| -> [Vec<usize>; 3] {
        let (img, spread) = &images[cell][w];
        let cover = spread + grid.radius();
        [
            grid.cells_near(img, params.eps + cover),
            grid.cell_of(img).into_iter().collect(),
            grid.cells_near(img, cover),
        ]
    };

    let edges: Vec<[Vec<usize>; 3]> = (0..nodes)
        .into_par_iter()
        .map(|node| {
            let mut rel: [Vec<usize>; 3] = Default::default();
            match params.mode {
                ChainMode::Free => {
                    for w in 0..words.len() {
                        for (r, targets) in rel.iter_mut().zip(links(node, w)) {
                            r.extend(targets);
                        }
                    }
                }
                ChainMode::GraphConstrained => {
                    let (cell, u) = (node / n, node % n);
                    for (w, word) in words.iter().enumerate().filter(|(_, w)| w.first() == u) {
                        let next = g.successors(word.last());
                        for (r, targets) in rel.iter_mut().zip(links(cell, w)) {
                            r.extend(targets.iter().flat_map(|&b| next.iter().map(move |&v| b * n + v)));
                        }
                    }
                }
            }
            // a cell's image always overlaps the cell itself where the flow is
            // slow; recurrence within one cell must come from the point map
            let own = node;
            rel[2].retain(|&b| b != own);
            let [_, exact, covers] = &mut rel;
            covers.extend_from_slice(exact);
            for r in &mut rel {
                r.sort_unstable();
                r.dedup();
            }
            rel
        })
        .collect();
    let (mut succ, mut exact, mut covers) = (Vec::new(), Vec::new(), Vec::new());
    for [a, b, c] in edges {
        succ.push(a);
        exact.push(b);
        covers.push(c);
    }
    Ok(ChainGraph {
        params: params.clone(),
        grid: grid.clone(),
        vertex_count: n,
        succ,
        exact,
        covers,
    })
}

/// Largest subset of `nodes` in which every member has a successor and a
/// predecessor inside the subset. `nodes` must be sorted.
pub fn viability_kernel(nodes: &[usize], succ: &[Vec<usize>]) -> Vec<usize> {
    viability_kernel_split(nodes, succ, succ)
}

/// As [`viability_kernel`], with successors taken from `forward` and
/// predecessors from `backward` (`a` precedes `b` when `backward[a]` holds `b`).
pub fn viability_kernel_split(nodes: &[usize], forward: &[Vec<usize>], backward: &[Vec<usize>]) -> Vec<usize> {
    let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = nodes.len();
    let restrict = |rel: &[Vec<usize>]| {
        let mut out = vec![Vec::new(); k];
        let mut inc = vec![Vec::new(); k];
        for (i, &v) in nodes.iter().enumerate() {
            for s in &rel[v] {
                if let Some(&j) = local.get(s) {
                    out[i].push(j);
                    inc[j].push(i);
                }
            }
        }
        (out, inc)
    };
    let (fwd_out, fwd_in) = restrict(forward);
    let (bwd_out, bwd_in) = restrict(backward);
    let mut out_deg: Vec<usize> = fwd_out.iter().map(Vec::len).collect();
    let mut in_deg: Vec<usize> = bwd_in.iter().map(Vec::len).collect();
    let mut alive = vec![true; k];
    let mut queue: Vec<usize> = (0..k).filter(|&i| out_deg[i] == 0 || in_deg[i] == 0).collect();
    while let Some(i) = queue.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &j in &bwd_out[i] {
            in_deg[j] -= 1;
            if alive[j] && in_deg[j] == 0 {
                queue.push(j);
            }
        }
        for &j in &fwd_in[i] {
            out_deg[j] -= 1;
            if alive[j] && out_deg[j] == 0 {
                queue.push(j);
            }
        }
    }
    nodes.iter().zip(&alive).filter(|(_, &a)| a).map(|(&v, _)| v).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainComponent {
    pub id: usize,
    /// Strongly connected node set of the chain graph.
    pub nodes: Vec<usize>,
    /// Nodes carrying a bi-infinite point-map orbit inside the component.
    pub core: Vec<usize>,
    /// Projection to cells of `core` when viable, of `nodes` otherwise.
    pub cells: Vec<usize>,
    pub viable: bool,
}

fn recurrent_sccs(cg: &ChainGraph) -> Vec<Vec<usize>> {
    tarjan_scc(&cg.succ)
        .into_iter()
        .filter(|c| c.len() > 1 || cg.succ[c[0]].binary_search(&c[0]).is_ok())
        .collect()
}

/// Chain components: strongly connected components of the chain graph that
/// are nontrivial or carry a self-edge, each with its viable core. Sorted by
/// cell count, largest first, ties broken by lowest cell index.
pub fn chain_components(cg: &ChainGraph) -> Vec<ChainComponent> {
    let mut out: Vec<ChainComponent> = recurrent_sccs(cg)
        .into_iter()
        .map(|nodes| {
            // forward orbits follow cell centers; backward, an expanding map may
            // skip every center of a cell that its full image still covers
            let core = viability_kernel_split(&nodes, &cg.exact, &cg.covers);
            let viable = !core.is_empty();
            let cells = cg.project(if viable { &core } else { &nodes });
            ChainComponent {
                id: 0,
                nodes,
                core,
                cells,
                viable,
            }
        })
        .collect();
    out.sort_by(|a, b| b.cells.len().cmp(&a.cells.len()).then(a.cells[0].cmp(&b.cells[0])));
    for (i, c) in out.iter_mut().enumerate() {
        c.id = i;
    }
    out
}

/// Whether `x` and `y` fall in cells of one recurrent component of the chain
/// graph.
pub fn chain_equivalent(cg: &ChainGraph, x: &[f64], y: &[f64]) -> Result<bool> {
    let locate = |p: &[f64]| {
        cg.grid
            .cell_of(p)
            .ok_or_else(|| Error::arg(format!("point {p:?} lies outside the box")))
    };
    let (cx, cy) = (locate(x)?, locate(y)?);
    Ok(recurrent_sccs(cg).iter().any(|c| {
        let cells = cg.project(c);
        cells.binary_search(&cx).is_ok() && cells.binary_search(&cy).is_ok()
    }))
}

/// Viability kernel of `E × V` under one `h`-step: `(a, u) -> (b, v)` when
/// `b` is in `E`, `b` meets the outer image of cell `a` under field `u`, and
/// `u -> v` is an edge. Returns sorted `(cell, vertex)` pairs.
pub fn lift_kernel(sys: &SwitchedSystem, g: &DirectedGraph, grid: &Grid, cells: &[usize]) -> Result<Vec<(usize, usize)>> {
    check_setup(sys, g, grid)?;
    let mut e = cells.to_vec();
    e.sort_unstable();
    e.dedup();
    if let Some(&c) = e.last() {
        if c >= grid.cell_count() {
            return Err(Error::arg(format!("cell {c} out of range")));
        }
    }
    let n = g.vertex_count();
    let h = sys.step();
    let targets: Vec<Vec<Vec<usize>>> = e
        .par_iter()
        .map(|&a| {
            (0..n)
                .map(|u| {
                    let w = TimedWord {
                        letters: vec![u],
                        durations: vec![h],
                    };
                    let (img, spread) = outer_image(sys, grid, a, &w)?;
                    Ok(grid
                        .cells_near(&img, spread + grid.radius())
                        .into_iter()
                        .filter(|b| e.binary_search(b).is_ok())
                        .collect())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut succ = vec![Vec::new(); grid.cell_count() * n];
    let mut nodes = Vec::with_capacity(e.len() * n);
    for (i, &a) in e.iter().enumerate() {
        for u in 0..n {
            let node = a * n + u;
            nodes.push(node);
            for &b in &targets[i][u] {
                succ[node].extend(g.successors(u).iter().map(|&v| b * n + v));
            }
        }
    }
    Ok(viability_kernel(&nodes, &succ)
        .into_iter()
        .map(|node| (node / n, node % n))
        .collect())
}

fn check_nonempty<T>(s: &[T]) -> Result<()> {
    if s.is_empty() {
        Err(Error::arg("Hausdorff distance of an empty set"))
    } else {
        Ok(())
    }
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    check_nonempty(a)?;
    check_nonempty(b)?;
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        from.iter()
            .map(|p| to.iter().map(|q| euclidean(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Hausdorff distance between a finite subset of the line and `[lo, hi]`.
pub fn hausdorff_to_interval(points: &[f64], lo: f64, hi: f64) -> Result<f64> {
    check_nonempty(points)?;
    if !(lo <= hi) {
        return Err(Error::arg(format!("empty interval [{lo}, {hi}]")));
    }
    let mut p = points.to_vec();
    p.sort_by(f64::total_cmp);
    let outside = p.iter().map(|&x| (lo - x).max(x - hi).max(0.0)).fold(0.0, f64::max);
    // the distance to the set, over the interval, peaks at an endpoint or at a
    // midpoint between consecutive points
    let nearest = |y: f64| p.iter().map(|&x| (x - y).abs()).fold(f64::INFINITY, f64::min);
    let uncovered = [lo, hi]
        .into_iter()
        .chain(p.windows(2).map(|w| 0.5 * (w[0] + w[1])).filter(|m| (lo..=hi).contains(m)))
        .map(nearest)
        .fold(0.0, f64::max);
    Ok(outside.max(uncovered))
}

/// Maximal runs `[start, end]` of consecutive indices in a sorted cell list.
pub fn cell_runs(cells: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &c in cells {
        match out.last_mut() {
            Some((_, end)) if *end + 1 == c => *end = c,
            _ => out.push((c, c)),
        }
    }
    out
}
