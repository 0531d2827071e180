//! Random generators and reference systems shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use skewchain::{DirectedGraph, StateBox, SwitchedSystem, SwitchingSignal, SymbolicSequence, VectorField};

pub const TWO_PI_INV: f64 = 1.0 / (2.0 * std::f64::consts::PI);

/// Random graph on `n` vertices in which every vertex has an in- and an
/// out-edge.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    for v in 0..n {
        if !edges.iter().any(|&(a, _)| a == v) {
            edges.push((v, rng.gen_range(0..n)));
        }
        if !edges.iter().any(|&(_, b)| b == v) {
            let u = rng.gen_range(0..n);
            if !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::validated(n, &edges).expect("degree repair yields a valid graph")
}

/// Random walk until a vertex repeats; returns `(prefix, cycle)` where the
/// walk is `prefix` followed by `cycle` repeated forever.
fn lasso<R: Rng>(rng: &mut R, start: usize, next: impl Fn(usize) -> Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    let mut walk = vec![start];
    loop {
        let cur = *walk.last().unwrap();
        let v = *next(cur).choose(rng).expect("valid graphs have no dead ends");
        if let Some(j) = walk.iter().position(|&w| w == v) {
            let cycle = walk.split_off(j);
            return (walk, cycle);
        }
        walk.push(v);
    }
}

/// Random eventually periodic admissible sequence with a random index shift.
pub fn random_sequence<R: Rng>(rng: &mut R, g: &DirectedGraph) -> SymbolicSequence {
    let start = rng.gen_range(0..g.vertex_count());
    // backward lasso read in forward time: cycle^inf, then the prefix ending at `start`
    let (back_prefix, back_cycle) = lasso(rng, start, |v| g.predecessors(v).to_vec());
    let left: Vec<usize> = back_cycle.into_iter().rev().collect();
    let mut core: Vec<usize> = back_prefix.into_iter().rev().collect();
    // forward lasso after `start`
    let (fwd_prefix, mut right) = lasso(rng, start, |v| g.successors(v).to_vec());
    if fwd_prefix.is_empty() {
        right.rotate_left(1);
    } else {
        core.extend(&fwd_prefix[1..]);
    }
    SymbolicSequence::new(g, left, core, right)
        .expect("lasso construction is admissible")
        .with_index_shift(rng.gen_range(-6..=6))
}

/// Random sequence that agrees with `x` up to a random index and is random
/// afterward, so that pairs at small distances are common.
pub fn random_neighbor<R: Rng>(rng: &mut R, g: &DirectedGraph, x: &SymbolicSequence) -> SymbolicSequence {
    for _ in 0..20 {
        let from = rng.gen_range(-8..=8);
        let tail = random_sequence(rng, g);
        let tail_from = rng.gen_range(-4..=4);
        if let Ok(y) = x.splice(g, from, &[], &tail, tail_from) {
            return y;
        }
    }
    random_sequence(rng, g)
}

pub fn random_signal<R: Rng>(rng: &mut R, g: &DirectedGraph, h: f64) -> SwitchingSignal {
    let x = random_sequence(rng, g);
    let offset = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..h) };
    SwitchingSignal::new(x, offset, h).unwrap()
}

pub fn random_signal_pair<R: Rng>(rng: &mut R, g: &DirectedGraph, h: f64) -> (SwitchingSignal, SwitchingSignal) {
    let f = random_signal(rng, g, h);
    let base = if rng.gen_bool(0.5) {
        random_neighbor(rng, g, f.base())
    } else {
        random_sequence(rng, g)
    };
    let offset = match rng.gen_range(0..3) {
        0 => f.offset(),
        1 => 0.0,
        _ => rng.gen_range(0.0..h),
    };
    (f, SwitchingSignal::new(base, offset, h).unwrap())
}

fn one_dim(g: &DirectedGraph, lo: f64, hi: f64, h: f64, substeps: usize, fields: &[&str]) -> SwitchedSystem {
    let fields = fields.iter().map(|s| VectorField::expressions(&[s]).unwrap()).collect();
    SwitchedSystem::new(g, StateBox::interval(lo, hi).unwrap(), h, substeps, fields).unwrap()
}

/// A: x' = -x(x-1)(x-2), B: x' = -x(x-2) on [0, 2].
pub fn two_field_example(g: &DirectedGraph, h: f64) -> SwitchedSystem {
    one_dim(g, 0.0, 2.0, h, 10, &["-x*(x-1)*(x-2)", "-x*(x-2)"])
}

/// A: x' = -x(c-x), B: x' = x(c-x) on [0, c] with c = 1/(2 pi).
pub fn sine_curve_example(g: &DirectedGraph, h: f64) -> SwitchedSystem {
    one_dim(g, 0.0, TWO_PI_INV, h, 10, &["-x*(1/(2*pi) - x)", "x*(1/(2*pi) - x)"])
}

pub fn scalar_system(g: &DirectedGraph, lo: f64, hi: f64, h: f64, substeps: usize, fields: &[&str]) -> SwitchedSystem {
    one_dim(g, lo, hi, h, substeps, fields)
}
