//! One function per subcommand. Outputs are deterministic: same config and
//! seed give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use skewchain::chain::{build_chain_graph, cell_runs, chain_components, hausdorff_to_interval};
use skewchain::symbolic::chaos_certificate;
use skewchain::{
    product_metric, ChaosCertificate, DirectedGraph, Error, HybridState, SwitchingSignal, SymbolicSequence,
};

use crate::config::{invalid, ExperimentConfig, MetricKind};

/// Failures detected by the harness itself rather than the library.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("numerical check failed: {0}")]
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Numeric(_) => 3,
        }
    }
}

fn write(out: &Path, name: &str, contents: &str) -> Result<()> {
    let path = out.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json(out: &Path, name: &str, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(out, name, &text)
}

/// The resolved config as `# `-prefixed lines.
fn provenance(cfg: &ExperimentConfig) -> String {
    cfg.to_toml()
        .lines()
        .map(|l| if l.is_empty() { "#\n".to_string() } else { format!("# {l}\n") })
        .collect()
}

fn envelope(command: &str, cfg: &ExperimentConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(cfg).expect("configs always serialize"));
    m
}

fn labels(g: &DirectedGraph, word: &[usize]) -> Vec<String> {
    word.iter().map(|&v| g.label(v).to_string()).collect()
}

fn certificate_json(g: &DirectedGraph, cert: &ChaosCertificate) -> Value {
    match cert {
        ChaosCertificate::PeriodicOrbit { word } => json!({"kind": "periodic_orbit", "word": labels(g, word)}),
        ChaosCertificate::Chaotic { witness } => json!({"kind": "chaotic", "witness": g.label(*witness)}),
        ChaosCertificate::Transient => json!({"kind": "transient"}),
    }
}

pub fn analyze_graph(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let g = cfg.raw_graph()?;
    let report = g.validate();
    let mut doc = envelope("analyze-graph", cfg);
    doc.insert("graph".into(), g.to_json());
    doc.insert("validation".into(), serde_json::to_value(&report)?);
    if !report.is_ok() {
        write_json(out, "graph_report.json", &Value::Object(doc))?;
        return Err(Error::InvalidGraph(report.to_string()).into());
    }

    let scc = g.scc();
    let components = scc
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let cert = chaos_certificate(&g, c)?;
            Ok(json!({
                "id": i,
                "vertices": labels(&g, c),
                "nontrivial": scc.nontrivial[i],
                "certificate": certificate_json(&g, &cert),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let order = scc.morse_order();
    doc.insert("components".into(), json!(components));
    doc.insert("condensation_edges".into(), json!(scc.condensation_edges));
    doc.insert(
        "morse_order".into(),
        json!({
            "strict_pairs": order.strict_pairs(),
            "is_partial_order": order.is_partial_order(),
        }),
    );
    write_json(out, "graph_report.json", &Value::Object(doc))?;

    println!("{} vertices, {} edges, {} SCCs", g.vertex_count(), g.edge_count(), scc.len());
    for c in &components {
        println!(
            "  SCC {}: {{{}}} {}",
            c["id"],
            c["vertices"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect::<Vec<_>>().join(", "),
            c["certificate"]["kind"].as_str().unwrap()
        );
    }
    Ok(())
}

pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let g = cfg.graph()?;
    let sys = cfg.system(&g)?;
    let s = cfg.run.simulate.as_ref().ok_or_else(|| invalid("missing [run.simulate] block"))?;
    if s.signal.is_empty() {
        return Err(invalid("simulate needs a signal literal").into());
    }
    let f = SwitchingSignal::parse_with_default_step(&g, &s.signal, Some(sys.step()))?;
    if s.x0.len() != sys.dimension() {
        return Err(invalid(format!("x0 has {} components, the system has {}", s.x0.len(), sys.dimension())).into());
    }
    if !sys.bounds().contains(&s.x0) {
        return Err(invalid(format!("x0 = {:?} lies outside the state box", s.x0)).into());
    }
    let (samples, status) = sys.trajectory_partial(&s.x0, &f, s.t_end, s.sample_dt);

    let mut csv = provenance(cfg);
    csv.push('t');
    for i in 1..=sys.dimension() {
        write!(csv, ",x{i}")?;
    }
    csv.push_str(",active_vertex\n");
    for sample in &samples {
        write!(csv, "{}", sample.t)?;
        for x in &sample.x {
            write!(csv, ",{x}")?;
        }
        writeln!(csv, ",{}", g.label(sample.vertex))?;
    }
    if let Err(e) = &status {
        writeln!(csv, "# incomplete: {e}")?;
    }
    write(out, "trajectory.csv", &csv)?;
    status?;
    if let Some(last) = samples.last() {
        println!("{} samples; x({}) = {:?}", samples.len(), last.t, last.x);
    }
    Ok(())
}

pub fn metric(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let g = cfg.graph()?;
    let m = cfg.run.metric.as_ref().expect("filled in by the caller");
    let tol = cfg.run.tolerance;
    let step = cfg.system.as_ref().map(|s| s.h);
    let mut doc = envelope("metric", cfg);
    let value = match m.kind {
        MetricKind::Omega => {
            let a = SymbolicSequence::parse(&g, &m.a)?;
            let b = SymbolicSequence::parse(&g, &m.b)?;
            let d = a.distance(&b, tol)?;
            if m.isometry {
                let h = step.unwrap_or(1.0);
                let fa = SwitchingSignal::embed(a, h)?;
                let fb = SwitchingSignal::embed(b, h)?;
                let dd = fa.distance(&fb, tol)?;
                doc.insert(
                    "isometry".into(),
                    json!({"embedded_distance": dd, "defect": (d - dd).abs(), "holds": (d - dd).abs() <= 2.0 * tol}),
                );
            }
            d
        }
        MetricKind::Delta => {
            let a = SwitchingSignal::parse_with_default_step(&g, &m.a, step)?;
            let b = SwitchingSignal::parse_with_default_step(&g, &m.b, step)?;
            a.distance(&b, tol)?
        }
        MetricKind::Product => {
            let (xa, xb) = match (&m.xa, &m.xb) {
                (Some(xa), Some(xb)) => (xa.clone(), xb.clone()),
                _ => return Err(invalid("product metric needs xa and xb").into()),
            };
            let a = SwitchingSignal::parse_with_default_step(&g, &m.a, step)?;
            let b = SwitchingSignal::parse_with_default_step(&g, &m.b, step)?;
            product_metric(&HybridState::new(xa, a), &HybridState::new(xb, b), tol)?
        }
    };
    doc.insert("value".into(), json!(value));
    doc.insert("tolerance".into(), json!(tol));
    write_json(out, "metric.json", &Value::Object(doc))?;
    println!("{value} (tolerance {tol:e})");
    Ok(())
}

pub fn chain_sets(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let g = cfg.graph()?;
    let sys = cfg.system(&g)?;
    let grid = cfg.grid(&sys)?;
    let params = cfg.chain_params()?;
    let references = &cfg.analysis_block()?.reference_intervals;
    if !references.is_empty() && grid.dimension() != 1 {
        return Err(invalid("reference_intervals apply to one-dimensional boxes only").into());
    }
    let cg = build_chain_graph(&sys, &g, &grid, &params)?;
    let components = chain_components(&cg);

    let d = grid.dimension();
    let mut csv = provenance(cfg);
    csv.push_str("component_id,cell_index");
    for i in 1..=d {
        write!(csv, ",center_x{i}")?;
    }
    csv.push('\n');
    let mut summaries = Vec::new();
    for c in &components {
        let centers = grid.centers(&c.cells);
        if c.viable {
            for (cell, x) in c.cells.iter().zip(&centers) {
                write!(csv, "{},{cell}", c.id)?;
                for v in x {
                    write!(csv, ",{v}")?;
                }
                csv.push('\n');
            }
        }
        let extent: Vec<[f64; 2]> = (0..d)
            .map(|k| {
                let w = grid.widths()[k] / 2.0;
                let lo = centers.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min);
                let hi = centers.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max);
                [lo - w, hi + w]
            })
            .collect();
        let distances = references
            .iter()
            .map(|r| {
                let pts: Vec<f64> = centers.iter().map(|x| x[0]).collect();
                Ok(json!({"interval": r, "hausdorff": hausdorff_to_interval(&pts, r[0], r[1])?}))
            })
            .collect::<Result<Vec<_>>>()?;
        summaries.push(json!({
            "id": c.id,
            "viable": c.viable,
            "cell_count": c.cells.len(),
            "runs": cell_runs(&c.cells),
            "extent": extent,
            "reference_distances": distances,
        }));
    }
    write(out, "components.csv", &csv)?;

    let viable = components.iter().filter(|c| c.viable).count();
    let mut doc = envelope("chain-sets", cfg);
    doc.insert(
        "parameters".into(),
        json!({
            "eps": params.eps,
            "m": params.m,
            "T": params.m as f64 * sys.step(),
            "mode": params.mode.to_string(),
            "q": params.q,
            "grid": grid.counts(),
            "cell_width": grid.widths(),
        }),
    );
    doc.insert(
        "counts".into(),
        json!({
            "cells": grid.cell_count(),
            "nodes": cg.node_count(),
            "edges": cg.edge_count(),
            "components": components.len(),
            "viable_components": viable,
        }),
    );
    doc.insert("components".into(), json!(summaries));
    write_json(out, "summary.json", &Value::Object(doc))?;

    println!("{} recurrent components, {viable} viable", components.len());
    for (c, s) in components.iter().zip(&summaries) {
        if c.viable {
            println!("  component {}: {} cells, extent {}", c.id, c.cells.len(), s["extent"]);
        }
    }
    Ok(())
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, min: usize, max: usize) -> Vec<usize> {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| rng.gen_range(0..n)).collect()
}

/// A random eventually periodic signal; every word is admissible on the
/// complete graph.
fn random_signal(rng: &mut ChaCha8Rng, g: &DirectedGraph, h: f64) -> Result<SwitchingSignal> {
    let n = g.vertex_count();
    let left = random_word(rng, n, 1, 3);
    let core = random_word(rng, n, 0, 6);
    let right = random_word(rng, n, 1, 3);
    let shift = rng.gen_range(-3..=3);
    let x = SymbolicSequence::new(g, left, core, right)?.with_index_shift(shift);
    Ok(SwitchingSignal::embed(x, h)?)
}

pub fn stitch_demo(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let g = cfg.graph()?;
    if !g.is_complete() {
        return Err(invalid("stitch-demo requires a complete graph").into());
    }
    let st = cfg.run.stitch.clone().unwrap_or_default();
    let h = st.h.or(cfg.system.as_ref().map(|s| s.h)).unwrap_or(0.1);
    if st.links == 0 || st.max_cells == 0 {
        return Err(invalid("stitch needs links >= 1 and max_cells >= 1").into());
    }
    let tol = cfg.run.tolerance;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let head = random_signal(&mut rng, &g, h)?;
    let tail = random_signal(&mut rng, &g, h)?;
    let chain = (0..st.links)
        .map(|_| {
            let f = random_signal(&mut rng, &g, h)?;
            let t = rng.gen_range(1..=st.max_cells) as f64 * h;
            Ok((f, t))
        })
        .collect::<Result<Vec<_>>>()?;

    let stitched = skewchain::signal::stitch_signals(&g, &chain, &head, &tail, st.window)?;
    let gaps = stitched.gaps(tol)?;
    let bound = stitched.gap_bound();
    let worst = gaps.iter().map(|x| x.gap).fold(0.0, f64::max);
    let ok = worst < bound;

    let mut doc = envelope("stitch-demo", cfg);
    doc.insert("step".into(), json!(h));
    doc.insert("head".into(), json!(head.to_literal(&g)));
    doc.insert("tail".into(), json!(tail.to_literal(&g)));
    doc.insert(
        "links".into(),
        json!(chain
            .iter()
            .map(|(f, t)| json!({"signal": f.to_literal(&g), "time": t}))
            .collect::<Vec<_>>()),
    );
    doc.insert(
        "stitched".into(),
        json!(stitched
            .signals
            .iter()
            .enumerate()
            // the final signal runs forever: it has no flow time
            .map(|(i, f)| json!({"signal": f.to_literal(&g), "time": stitched.times.get(i)}))
            .collect::<Vec<_>>()),
    );
    doc.insert("gaps".into(), serde_json::to_value(&gaps)?);
    doc.insert("bound".into(), json!(bound));
    doc.insert("max_gap".into(), json!(worst));
    doc.insert("all_below_bound".into(), json!(ok));
    write_json(out, "stitch.json", &Value::Object(doc))?;

    println!("{} links stitched; largest gap {worst:.3e}, bound {bound:.3e}", chain.len());
    if !ok {
        return Err(Failure::Numeric(format!("gap {worst} reaches the bound {bound}")).into());
    }
    Ok(())
}
