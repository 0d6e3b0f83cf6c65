use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use nipgraph::cube::build_mapping;
use nipgraph::edgelist::{read_edge_list, write_edge_list};
use nipgraph::graph::build_resampled;
use nipgraph::mask::{compile, serialize, sidecar_json, Pattern};
use nipgraph::nip::{asymptotic_nip, expected_nip, nip, nip_ratio_table, NipReport};
use nipgraph::topology::default_window;
use nipgraph::verify::{duality_suite, scaling_suite, DUALITY_SIZES};
use nipgraph::{Exec, Graph, NipError, Topology, TopologyParams};

use crate::output::{sink, Cell, Table};
use crate::{
    Failure, Format, GraphArgs, MapArgs, MaskArgs, RatioArgs, ScoreArgs, SweepArgs, VerifyArgs,
};

const RESAMPLE_ATTEMPTS: usize = 64;

fn params(g: &GraphArgs) -> TopologyParams {
    TopologyParams {
        w: g.w,
        p: g.p,
        force: g.force,
        seed: g.seed,
        self_loops: g.self_loops,
        ..TopologyParams::default()
    }
}

fn build_topology(t: Topology, n: usize, g: &GraphArgs) -> Result<Graph, NipError> {
    build_resampled(&t.spec(n, &params(g)), RESAMPLE_ATTEMPTS)
}

fn report_table(reports: &[NipReport]) -> Table {
    let mut t = Table::new(&[
        "method", "family", "n", "rho", "kappa", "cc", "ip", "ln_ip", "nip", "ln_nip", "refined",
        "argmin_pair", "samples", "asymmetric",
    ]);
    for r in reports {
        t.push(vec![
            Cell::text(format!("{:?}", r.method)),
            Cell::text(&r.family),
            r.n.into(),
            r.rho.into(),
            r.kappa.into(),
            r.cc.into(),
            Cell::linear(r.ip, r.ln_ip),
            r.ln_ip.into(),
            Cell::linear(r.nip, r.ln_nip),
            r.ln_nip.into(),
            Cell::Bool(r.refined),
            r.argmin_pair
                .map_or(Cell::Empty, |(a, b)| Cell::text(format!("{a}-{b}"))),
            r.samples.into(),
            Cell::Bool(r.asymmetric),
        ]);
    }
    t
}

pub fn score(a: &ScoreArgs) -> Result<(), Failure> {
    let refined = a.graph.refined_star;
    let mut reports = Vec::new();
    let graph = match &a.edges {
        Some(path) => {
            let g = read_edge_list(BufReader::new(File::open(path)?))?;
            reports.push(nip(&g, refined)?);
            g
        }
        None => {
            let t: Topology = a.family.as_deref().unwrap_or_default().parse()?;
            let n = a.n.expect("clap requires --n without --edges");
            let g = build_topology(t, n, &a.graph)?;
            let mut exact = nip(&g, refined)?;
            exact.family = t.name().to_string();
            reports.push(exact);
            if t != Topology::RingLattice && n >= 4 {
                reports.push(asymptotic_nip(t, n, a.graph.w, refined)?);
            }
            if let (Some(samples), true) = (a.samples, t.is_random()) {
                let spec = t.spec(n, &params(&a.graph));
                let mut avg = expected_nip(&spec, samples, refined, Exec::default())?;
                avg.family = t.name().to_string();
                reports.push(avg);
            }
            g
        }
    };
    if let Some(path) = &a.save_edges {
        write_edge_list(&graph, BufWriter::new(File::create(path)?))?;
    }
    let mut out = sink(&a.out)?;
    match a.format {
        Format::Json => {
            for r in &reports {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        f => report_table(&reports).write(f, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn check_range(n_min: usize, n_max: usize) -> Result<Vec<usize>, Failure> {
    for n in [n_min, n_max] {
        if !n.is_power_of_two() {
            return Err(NipError::NonPowerOfTwo { n }.into());
        }
    }
    if n_min < 4 {
        return Err(NipError::TooSmall { n: n_min, min: 4 }.into());
    }
    if n_min > n_max {
        return Err(Failure::usage(format!("--n-min {n_min} exceeds --n-max {n_max}")));
    }
    Ok(std::iter::successors(Some(n_min), |&n| Some(n * 2))
        .take_while(|&n| n <= n_max)
        .collect())
}

fn parse_families(names: &[String]) -> Result<Vec<Topology>, Failure> {
    if names.is_empty() {
        return Ok(Topology::SCORED.to_vec());
    }
    names
        .iter()
        .map(|s| s.parse::<Topology>().map_err(Failure::from))
        .collect()
}

fn exact_ln_nip(t: Topology, n: usize, a: &GraphArgs, samples: Option<u32>) -> Result<f64, NipError> {
    match samples {
        Some(s) if t.is_random() => {
            Ok(expected_nip(&t.spec(n, &params(a)), s, a.refined_star, Exec::Sequential)?.ln_nip)
        }
        _ => Ok(nip(&build_topology(t, n, a)?, a.refined_star)?.ln_nip),
    }
}

pub fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let sizes = check_range(a.n_min, a.n_max)?;
    let families = parse_families(&a.family)?;
    // A fixed window only fits sizes above it.
    let cells: Vec<(Topology, usize)> = families
        .iter()
        .flat_map(|&t| sizes.iter().map(move |&n| (t, n)))
        .filter(|&(t, n)| !t.uses_window() || a.graph.w.is_none_or(|w| w < n))
        .collect();
    if cells.is_empty() {
        return Err(Failure::usage("no size in range admits the requested window"));
    }
    let refined = a.graph.refined_star;
    let complete: Vec<Result<(f64, Option<f64>), NipError>> =
        Exec::default().map_slice(&sizes, |&n| {
            let closed = asymptotic_nip(Topology::Complete, n, None, refined)?.ln_nip;
            let exact = if a.exact {
                Some(exact_ln_nip(Topology::Complete, n, &a.graph, None)?)
            } else {
                None
            };
            Ok((closed, exact))
        });
    let complete = complete.into_iter().collect::<Result<Vec<_>, _>>()?;
    let base = |n: usize| complete[sizes.iter().position(|&m| m == n).unwrap()];

    let rows: Vec<Result<Vec<Cell>, NipError>> = Exec::default().map_slice(&cells, |&(t, n)| {
        let w = t.uses_window().then(|| a.graph.w.unwrap_or_else(|| default_window(n)));
        let closed = asymptotic_nip(t, n, w, refined)?;
        let (base_closed, base_exact) = base(n);
        let ln_ratio = closed.ln_nip - base_closed;
        let exact = if a.exact {
            Some(exact_ln_nip(t, n, &a.graph, a.samples)?)
        } else {
            None
        };
        let ln_ratio_exact = exact.zip(base_exact).map(|(e, b)| e - b);
        let opt = |x: Option<f64>| x.map_or(Cell::Empty, Cell::Float);
        let opt_linear = |x: Option<f64>| x.map_or(Cell::Empty, |l| Cell::linear(linear(l), l));
        Ok(vec![
            Cell::text(t.name()),
            n.into(),
            w.into(),
            closed.ln_nip.into(),
            Cell::linear(closed.nip, closed.ln_nip),
            ln_ratio.into(),
            Cell::linear(linear(ln_ratio), ln_ratio),
            opt(exact),
            opt_linear(exact),
            opt(ln_ratio_exact),
            opt_linear(ln_ratio_exact),
        ])
    });
    let mut table = Table::new(&[
        "family",
        "n",
        "w",
        "ln_nip_asymptotic",
        "nip_asymptotic",
        "ln_ratio_vs_complete",
        "ratio_vs_complete",
        "ln_nip_exact",
        "nip_exact",
        "ln_ratio_exact",
        "ratio_exact",
    ]);
    for row in rows {
        table.push(row?);
    }
    let mut out = sink(&a.out)?;
    table.write(a.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn linear(ln: f64) -> f64 {
    nipgraph::logp::linear_or_zero(ln)
}

pub fn mask(a: &MaskArgs) -> Result<(), Failure> {
    let pattern: Pattern = a.pattern.parse()?;
    let m = compile(pattern, a.n, a.b, a.seed)?;
    let path = a.out.clone().unwrap_or_else(|| {
        PathBuf::from(format!("{}-n{}-b{}-s{}.nipm", pattern.name(), a.n, a.b, a.seed))
    });
    let sidecar = path.with_extension("json");
    fs::write(&path, serialize(&m))?;
    fs::write(&sidecar, sidecar_json(&m) + "\n")?;

    let mut t = Table::new(&[
        "pattern", "n", "b", "grid", "seed", "blocks", "density_speedup", "out", "sidecar",
    ]);
    t.push(vec![
        Cell::text(pattern.name()),
        m.n().into(),
        m.b().into(),
        m.grid().into(),
        Cell::text(m.seed().to_string()),
        m.count_blocks().into(),
        m.density_speedup().into(),
        Cell::text(path.display().to_string()),
        Cell::text(sidecar.display().to_string()),
    ]);
    let mut out = sink(&None)?;
    t.write(a.format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn map(a: &MapArgs) -> Result<(), Failure> {
    let m = build_mapping(a.n)?;
    let mut t = Table::new(&["index", "code_binary", "code_value", "neighbor_indices"]);
    for i in 0..m.n() {
        let neighbors = m.cube_neighbors(i)?;
        t.push(vec![
            i.into(),
            Cell::text(m.code_binary(i)?),
            m.code(i)?.into(),
            Cell::text(
                neighbors
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
        ]);
    }
    let mut out = sink(&a.out)?;
    t.write(a.format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    match a.theorem {
        1 => verify_duality(a),
        2 => verify_scaling(a),
        other => Err(Failure::usage(format!(
            "unknown theorem {other}; expected 1 (walk/path duality) or 2 (block scaling)"
        ))),
    }
}

fn verify_duality(a: &VerifyArgs) -> Result<(), Failure> {
    if a.max_n < DUALITY_SIZES[0] {
        return Err(NipError::TooSmall {
            n: a.max_n,
            min: DUALITY_SIZES[0],
        }
        .into());
    }
    let rows = duality_suite(a.max_n, a.seed, Exec::default())?;
    let mut t = Table::new(&[
        "family", "n", "pairs", "failures", "max_rel_err", "worst_pair", "step", "walk_payload",
        "enum_payload", "abs_diff",
    ]);
    for r in &rows {
        let w = r.worst.as_ref();
        t.push(vec![
            Cell::text(&r.family),
            r.n.into(),
            r.pairs.into(),
            r.failures.into(),
            r.max_rel_err.into(),
            w.map_or(Cell::Empty, |c| Cell::text(format!("{}-{}", c.a, c.b))),
            w.map_or(Cell::Empty, |c| c.step.into()),
            w.map_or(Cell::Empty, |c| Cell::linear(c.walk.linear, c.walk.ln)),
            w.map_or(Cell::Empty, |c| Cell::linear(c.paths.linear, c.paths.ln)),
            w.map_or(Cell::Empty, |c| (c.walk.linear - c.paths.linear).abs().into()),
        ]);
    }
    let failures: usize = rows.iter().map(|r| r.failures).sum();
    let mut out = sink(&a.out)?;
    t.write(a.format, &mut out)?;
    if a.format == Format::Text {
        let verdict = if failures == 0 { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict}, {failures} failures over {} graphs", rows.len())?;
    }
    out.flush()?;
    if failures > 0 {
        return Err(Failure::Verification(format!("{failures} pairs disagree")));
    }
    Ok(())
}

fn verify_scaling(a: &VerifyArgs) -> Result<(), Failure> {
    let tables = scaling_suite(a.refined_star)?;
    let mut t = Table::new(&["family", "n0", "b", "depth", "ln_nip", "nip", "decreasing"]);
    for table in &tables {
        for (i, r) in table.rows.iter().enumerate() {
            let decreasing = i == 0 || r.ln_nip < table.rows[i - 1].ln_nip;
            t.push(vec![
                Cell::text(table.family.name()),
                r.n0.into(),
                r.b.into(),
                r.depth.into(),
                r.ln_nip.into(),
                Cell::linear(r.nip, r.ln_nip),
                Cell::Bool(decreasing),
            ]);
        }
    }
    let bad: Vec<String> = tables
        .iter()
        .filter(|t| !t.strictly_decreasing)
        .map(|t| format!("{}@{}", t.family, t.n0))
        .collect();
    let mut out = sink(&a.out)?;
    t.write(a.format, &mut out)?;
    if a.format == Format::Text {
        let verdict = if bad.is_empty() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict}, {}/{} tables strictly decreasing in b",
            tables.len() - bad.len(),
            tables.len()
        )?;
    }
    out.flush()?;
    if !bad.is_empty() {
        return Err(Failure::Verification(format!("not decreasing: {}", bad.join(", "))));
    }
    Ok(())
}

/// The published NIP column (sequence length 2048).
fn published_ratio(t: Topology) -> Option<f64> {
    match t {
        Topology::Complete | Topology::Star => Some(1.0),
        Topology::RingEr => Some(1.43e-10),
        Topology::Longformer => Some(8.25e-2),
        Topology::BigBird => Some(7.21e-2),
        Topology::Hypercube => Some(4.85),
        _ => None,
    }
}

pub fn ratio(a: &RatioArgs) -> Result<(), Failure> {
    let closed = nip_ratio_table(a.n, a.graph.w, a.graph.refined_star)?;
    let exact: Vec<Option<f64>> = if a.no_exact {
        vec![None; closed.len()]
    } else {
        let lns: Vec<Result<f64, NipError>> = Exec::default().map_slice(&closed, |row| {
            exact_ln_nip(row.family, a.n, &a.graph, None)
        });
        let lns = lns.into_iter().collect::<Result<Vec<_>, _>>()?;
        let base = lns[0];
        lns.iter().map(|l| Some(l - base)).collect()
    };
    let mut t = Table::new(&[
        "family",
        "ratio_closed_form",
        "ln_ratio_closed_form",
        "ratio_exact",
        "ln_ratio_exact",
        "ratio_published",
        "note",
    ]);
    for (row, ex) in closed.iter().zip(exact) {
        let published = published_ratio(row.family).filter(|_| a.n == 2048);
        let note = match published {
            Some(p) if (row.ln_ratio - p.ln()).abs() > 1.05f64.ln() => "closed form differs from published",
            Some(_) => "matches published",
            None => "",
        };
        t.push(vec![
            Cell::text(row.family.name()),
            Cell::linear(row.ratio, row.ln_ratio),
            row.ln_ratio.into(),
            ex.map_or(Cell::Empty, |l| Cell::linear(linear(l), l)),
            ex.map_or(Cell::Empty, Cell::Float),
            published.map_or(Cell::Empty, Cell::Float),
            Cell::text(note),
        ]);
    }
    let mut out = sink(&a.out)?;
    t.write(a.format, &mut out)?;
    out.flush()?;
    Ok(())
}
