//! Acceptance suite: one PASS/FAIL line per criterion, followed by the
//! individual checks. Exits nonzero if any criterion fails.

use std::time::Instant;

use rvb_cli::checks::{self, PairStats};
use rvb_cli::{execute, write_outputs, Check, RunConfig, Task};
use rvb_core::{
    assemble, enumerate_gas, enumerate_liquid, Boundary, CoveringEnsemble, LatticeSpec, Result, StateVector,
    Variant,
};

const NN_RUNTIME_TARGET_S: f64 = 10.0;
const GAS8_RUNTIME_TARGET_S: f64 = 120.0;

struct Sample {
    label: String,
    lattice: LatticeSpec,
    ensemble: CoveringEnsemble,
    state: StateVector,
    pairs: Vec<PairStats>,
}

impl Sample {
    fn build(label: String, lattice: LatticeSpec, ensemble: CoveringEnsemble) -> Result<Self> {
        let state = assemble(&ensemble)?;
        let pairs = checks::pair_table(&state, &lattice)?;
        Ok(Sample {
            label,
            lattice,
            ensemble,
            state,
            pairs,
        })
    }

    fn liquid(rows: usize, cols: usize) -> Result<Self> {
        let l = LatticeSpec::square(rows, cols, Boundary::Open)?;
        Self::build(format!("{rows}x{cols} liquid"), l, enumerate_liquid(&l)?)
    }

    fn gas(n: usize) -> Result<Self> {
        let l = LatticeSpec::complete_bipartite(n)?;
        Self::build(format!("gas N={n}"), l, enumerate_gas(&l)?)
    }
}

fn labelled(label: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{label}: {}", c.name);
            c
        })
        .collect()
}

fn samples() -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for n in 1..=8 {
        out.push(Sample::gas(n)?);
    }
    for (r, c) in [(2, 2), (2, 3), (2, 4), (4, 4)] {
        out.push(Sample::liquid(r, c)?);
    }
    Ok(out)
}

fn find<'a>(all: &'a [Sample], label: &str) -> &'a Sample {
    all.iter().find(|s| s.label == label).expect("sample exists")
}

fn criterion_1() -> Result<Vec<Check>> {
    let start = Instant::now();
    let l = LatticeSpec::square(4, 4, Boundary::Open)?;
    let e = enumerate_liquid(&l)?;
    let s = assemble(&e)?;
    let mut out = vec![
        Check::within("open 4x4 nearest-neighbour coverings", e.len() as f64, 36.0, 0.0),
        Check::within("amplitudes", s.amplitudes().len() as f64, 65536.0, 0.0),
    ];
    out.extend(checks::interior_bond_checks(&l, &s)?);
    out.push(Check::at_most(
        "runtime (s)",
        start.elapsed().as_secs_f64(),
        NN_RUNTIME_TARGET_S,
        0.0,
    ));
    Ok(out)
}

fn criterion_2(all: &[Sample]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in [6, 8] {
        let s = find(all, &format!("gas N={n}"));
        out.extend(checks::gas_saturation_checks(&s.lattice, &s.pairs)?);
    }
    let start = Instant::now();
    let fresh = Sample::gas(8)?;
    let elapsed = start.elapsed().as_secs_f64();
    out.extend(labelled(
        "rebuilt",
        checks::gas_saturation_checks(&fresh.lattice, &fresh.pairs)?,
    ));
    out.push(Check::at_most(
        "gas N=8 runtime (s)",
        elapsed,
        GAS8_RUNTIME_TARGET_S,
        0.0,
    ));
    Ok(out)
}

fn criterion_5(all: &[Sample]) -> Vec<Check> {
    all.iter()
        .flat_map(|s| labelled(&s.label, checks::werner_checks(&s.pairs)))
        .collect()
}

fn criterion_6(all: &[Sample]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for label in ["2x2 liquid", "2x3 liquid", "4x4 liquid"] {
        let s = find(all, label);
        out.extend(labelled(
            label,
            checks::loop_oracle_checks(&s.ensemble, &s.pairs, checks::LOOP_TOLERANCE)?,
        ));
    }
    Ok(out)
}

fn criterion_7(all: &[Sample]) -> Vec<Check> {
    let s = find(all, "4x4 liquid");
    labelled(&s.label, checks::same_sublattice_checks(&s.pairs))
}

fn criterion_8(all: &[Sample]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in all {
        out.extend(labelled(&s.label, checks::monogamy_checks(&s.state, &s.pairs)?));
    }
    Ok(out)
}

fn criterion_9(all: &[Sample]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in all {
        out.extend(labelled(&s.label, vec![checks::single_site_check(&s.state)?]));
    }
    let liquid = find(all, "4x4 liquid");
    out.extend(labelled(
        &liquid.label,
        vec![checks::odd_subset_check(
            &liquid.state,
            rvb_core::multipartite::DEFAULT_SEED,
        )?],
    ));
    for label in ["gas N=2", "2x3 liquid"] {
        out.extend(labelled(
            label,
            vec![checks::certificate_check(&find(all, label).state)?],
        ));
    }
    Ok(out)
}

fn criterion_10() -> Vec<Check> {
    let lattice = LatticeSpec::square(4, 4, Boundary::Open).expect("valid lattice");
    let cfg = RunConfig::new(lattice, Variant::Liquid, vec![Task::ReproducePaper]);
    let dirs = [
        tempfile::tempdir().expect("temp dir"),
        tempfile::tempdir().expect("temp dir"),
    ];
    let mut reports = Vec::new();
    for d in &dirs {
        let outcome = execute(&cfg);
        write_outputs(&outcome, d.path()).expect("writing report");
        reports.push(std::fs::read(d.path().join("report.json")).expect("report written"));
    }
    vec![Check::holds(
        "two reproduce-paper runs give byte-identical report.json",
        reports[0] == reports[1],
    )
    .with_note(format!("{} bytes", reports[0].len()))]
}

fn main() {
    let started = Instant::now();
    let all = samples().expect("building the sample states");

    let criteria: Vec<(u32, &str, Result<Vec<Check>>)> = vec![
        (1, "4x4 liquid interior nearest-neighbour p", criterion_1()),
        (
            2,
            "gas saturates the telecloning bound at N=6 and N=8",
            criterion_2(&all),
        ),
        (
            3,
            "entanglement of formation at p=1/2",
            checks::eof_anchor_check().map(|c| vec![c]),
        ),
        (
            4,
            "monogamy and telecloning bound table",
            checks::bound_table_checks(),
        ),
        (5, "every two-site state is Werner", Ok(criterion_5(&all))),
        (6, "loop formula equals extracted p", criterion_6(&all)),
        (7, "same-sublattice pairs are separable", Ok(criterion_7(&all))),
        (8, "monogamy holds for every anchor", criterion_8(&all)),
        (9, "multipartite structure", criterion_9(&all)),
        (10, "reproduce-paper is deterministic", Ok(criterion_10())),
    ];

    let mut failed = 0;
    for (id, title, result) in criteria {
        let (ok, lines) = match result {
            Ok(cs) => (
                cs.iter().all(|c| c.passed),
                cs.iter().map(Check::describe).collect::<Vec<_>>(),
            ),
            Err(e) => (false, vec![format!("[FAIL] error: {e}")]),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {id:>2} {}  {title}", if ok { "PASS" } else { "FAIL" });
        if ok && lines.len() > 4 {
            println!("      {} checks passed", lines.len());
        } else {
            for l in &lines {
                println!("      {l}");
            }
        }
    }
    println!(
        "acceptance: {} of 10 criteria passed ({:.1} s)",
        10 - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
