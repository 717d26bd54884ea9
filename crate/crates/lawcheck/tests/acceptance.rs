//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qf_core::forms::extend_to_continuous;
use qf_core::qmodules::{orth, phi_n_form};
use qf_core::{Caps, Lattice, TwoForm};
use qf_lawcheck::doc::{Structure, StructureDoc};
use qf_lawcheck::families::{self, Instance};
use qf_lawcheck::generate::generate;
use qf_lawcheck::laws;
use qf_lawcheck::report::{to_json, without_timing};
use qf_lawcheck::runner::{check_one, run, Report, RunOptions, Status};

type Check = Result<String, String>;

fn run_law(id: &str, bound: usize) -> Report {
    let opts = RunOptions { law: Some(id.into()), bound: Some(bound), ..RunOptions::default() };
    run(&opts).expect("law exists")
}

/// Runs the laws and requires no failures, no cap skips and at least one pass each.
fn all_hold(laws: &[(&str, usize)]) -> Check {
    let mut notes = Vec::new();
    for &(id, bound) in laws {
        let r = run_law(id, bound);
        if let Some(f) = r.results.iter().find(|x| x.status == Status::Fail) {
            return Err(format!("{id} failed on {}: {}", f.instance_id, f.witness.clone().unwrap_or_default()));
        }
        let capped = r.results.iter().filter(|x| x.reason.as_deref().is_some_and(|s| s.starts_with("cap"))).count();
        if capped > 0 {
            return Err(format!("{id}: {capped} instances skipped by caps"));
        }
        if r.summary.pass == 0 {
            return Err(format!("{id}: no instance met the hypotheses"));
        }
        notes.push(format!("{id} {}", r.summary.pass));
    }
    Ok(notes.join(", "))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Oracles over chains, the only lattices with at most three elements.

fn chain(n: usize) -> Arc<Lattice> {
    let l = Lattice::chain(n);
    for i in 0..n {
        for j in 0..n {
            assert_eq!(l.leq(i, j), i <= j, "chain labelling");
        }
    }
    Arc::new(l)
}

/// All `n × m` value matrices preserving joins in each variable on chains.
fn chain_forms(n: usize, m: usize) -> Vec<Vec<Vec<bool>>> {
    let mut out = Vec::new();
    for bits in 0u32..1 << (n * m) {
        let v: Vec<Vec<bool>> = (0..n).map(|x| (0..m).map(|y| bits >> (x * m + y) & 1 == 1).collect()).collect();
        let bottom = (0..m).all(|y| !v[0][y]) && (0..n).all(|x| !v[x][0]);
        // on a chain, preserving binary joins is monotonicity
        let monotone = (0..n)
            .all(|x| (0..m).all(|y| (x + 1 >= n || v[x][y] <= v[x + 1][y]) && (y + 1 >= m || v[x][y] <= v[x][y + 1])));
        if bottom && monotone {
            out.push(v);
        }
    }
    out
}

fn all_chain_forms(max: usize) -> Vec<(usize, usize, Vec<Vec<bool>>)> {
    let mut out = Vec::new();
    for n in 1..=max {
        for m in 1..=max {
            out.extend(chain_forms(n, m).into_iter().map(|v| (n, m, v)));
        }
    }
    out
}

fn dense(n: usize, m: usize, v: &[Vec<bool>]) -> bool {
    (1..m).all(|y| v[n - 1][y]) && (1..n).all(|x| v[x][m - 1])
}

/// Distinct columns: elements of the right side are separated by the form.
fn faithful_right(n: usize, m: usize, v: &[Vec<bool>]) -> bool {
    let cols: BTreeSet<Vec<bool>> = (0..m).map(|y| (0..n).map(|x| v[x][y]).collect()).collect();
    cols.len() == m
}

/// Monotone maps between chains fixing the bottom.
fn chain_homs(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|f: Vec<usize>| {
                let last = *f.last().unwrap();
                (last..m).map(move |v| {
                    let mut g = f.clone();
                    g.push(v);
                    g
                })
            })
            .collect();
    }
    out
}

fn criterion_1() -> Check {
    let forms = all_chain_forms(3);
    let r = run_law("prop-formsvsGalois", 3);
    ensure(r.summary.pass == forms.len() && r.summary.fail == 0, || {
        format!("{} passes for {} forms, {} failures", r.summary.pass, forms.len(), r.summary.fail)
    })?;
    Ok(format!("{} forms, all 16 clauses agree", forms.len()))
}

fn criterion_2() -> Check {
    let dense_count = all_chain_forms(3).iter().filter(|(n, m, v)| dense(*n, *m, v)).count();
    let r = run_law("thm-phi-of-Q-of-phi", 3);
    ensure(r.summary.pass == dense_count, || format!("{} passes for {dense_count} dense forms", r.summary.pass))?;
    all_hold(&[("thm-phi-of-Q-of-phi", 3), ("lemma-sidedisos", 3)])
}

fn criterion_3() -> Check {
    for (n, expected) in [(2, 2), (3, 6)] {
        let doc = generate("endo_quantale", &[format!("chain:{n}")]).map_err(|e| e.to_string())?;
        let Ok(Structure::Quantale(q)) = Structure::from_doc(&doc) else { return Err("not a quantale".into()) };
        let oracle = chain_homs(n, n).len();
        ensure(q.len() == expected && oracle == expected, || format!("|Q(C{n})| = {}, oracle {oracle}", q.len()))?;
    }
    all_hold(&[("ex-endo-quantale", 4)])
}

/// Quantales on chains of size ≤ 3, each table once plus once per involution.
fn quantale_oracle() -> usize {
    let mut count = 0;
    for n in 1..=3usize {
        let cells = n * n;
        let mut t = vec![0usize; cells];
        loop {
            let mul = |a: usize, b: usize| t[a * n + b];
            let bimorphic = (0..n).all(|a| mul(a, 0) == 0 && mul(0, a) == 0)
                && (0..n).all(|a| (0..n - 1).all(|b| mul(a, b) <= mul(a, b + 1) && mul(b, a) <= mul(b + 1, a)));
            let assoc =
                bimorphic && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| mul(mul(a, b), c) == mul(a, mul(b, c)))));
            if assoc {
                count += 1;
                // a chain has only the identity automorphism, an involution iff ⊙ commutes
                if (0..n).all(|a| (0..n).all(|b| mul(a, b) == mul(b, a))) {
                    count += 1;
                }
            }
            let mut i = 0;
            while i < cells && t[i] == n - 1 {
                t[i] = 0;
                i += 1;
            }
            if i == cells {
                break;
            }
            t[i] += 1;
        }
    }
    count
}

fn criterion_4() -> Check {
    let oracle = quantale_oracle();
    let r = run_law("thm-comparison", 3);
    ensure(r.summary.pass == oracle, || format!("{} passes for {oracle} quantales", r.summary.pass))?;
    all_hold(&[("thm-comparison", 3)])
}

fn criterion_5() -> Check {
    // existence of a continuous partner by search over all maps R' → R
    let forms = all_chain_forms(3);
    let mut checked = 0;
    for (n, m, v) in &forms {
        for (n2, m2, w) in &forms {
            if !(faithful_right(*n, *m, v) && faithful_right(*n2, *m2, w)) {
                continue;
            }
            let src = TwoForm::new(chain(*n), chain(*m), v).map_err(|e| e.to_string())?;
            let dst = TwoForm::new(chain(*n2), chain(*m2), w).map_err(|e| e.to_string())?;
            for f in chain_homs(*n, *n2) {
                let found = (0..(*m).pow(*m2 as u32)).any(|code| {
                    let g: Vec<usize> = (0..*m2).map(|y| code / (*m).pow(y as u32) % m).collect();
                    (0..*n).all(|x| (0..*m2).all(|y| w[f[x]][y] == v[x][g[y]]))
                });
                let fh = qf_core::lattice::JoinHom::new(src.left().clone(), dst.left().clone(), f.clone())
                    .map_err(|e| e.to_string())?;
                let ext = extend_to_continuous(&fh, &src, &dst).map_err(|e| e.to_string())?;
                ensure(found == ext.is_some(), || format!("f = {f:?}: search {found}, library {}", ext.is_some()))?;
                checked += 1;
            }
        }
    }
    let rest = all_hold(&[("prop-continuities", 3), ("prop-uniquedet", 3)])?;
    Ok(format!("{checked} maps searched; {rest}"))
}

fn criterion_6() -> Check {
    all_hold(&[
        ("prop-updownsegments", 3),
        ("prop-invvsleftsided", 3),
        ("prop-densequotient", 3),
        ("prop-principalmodules", 3),
        ("thm-irreducible", 3),
    ])
}

fn criterion_7() -> Check {
    let caps = Caps::default();
    let mut unital = 0;
    for (_, q) in families::named_quantales(3, &caps, &mut Vec::new()) {
        let Some(e) = q.unit() else { continue };
        unital += 1;
        let l = q.carrier();
        for n in q.elements() {
            let bf = phi_n_form(&q, n);
            let mut direct = l.bottom();
            for a in q.elements() {
                if l.leq(q.mul(e, q.mul(a, e)), n) {
                    direct = l.join2(direct, a);
                }
            }
            ensure(orth(&bf, e, e) == n && direct == n, || format!("orth(e,e) ≠ {n}"))?;
        }
    }
    let rest = all_hold(&[
        ("lemma-phi-n", 3),
        ("prop-equivalentformsoverQ", 3),
        ("thm-principalforms", 3),
        ("lemma-denseforms", 3),
        ("thm-upsegment-density", 3),
        ("thm-simpleQquotient", 3),
    ])?;
    Ok(format!("orth(e,e) = n on {unital} unital quantales; {rest}"))
}

fn criterion_8() -> Check {
    let caps = Caps::default();
    let faithful: usize = families::involutive_modules(3, &caps, &mut Vec::new())
        .iter()
        .map(|i| laws::faithful_segment_generators(&i.doc))
        .sum();
    ensure(faithful > 0, || "no faithful segment instance".into())?;
    let rest = all_hold(&[
        ("prop-symvsinv", 3),
        ("prop-involutive-bijection", 3),
        ("prop-selfadjoint-orth", 3),
        ("prop-upsegannx", 3),
        ("prop-involutive-residuation", 3),
    ])?;
    Ok(format!("{faithful} faithful segments; {rest}"))
}

const SUITES: &[(&str, usize)] = &[
    ("prop-formsvsGalois", 3),
    ("thm-phi-of-Q-of-phi", 3),
    ("ex-endo-quantale", 4),
    ("thm-comparison", 3),
    ("prop-continuities", 3),
    ("prop-updownsegments", 3),
    ("prop-equivalentformsoverQ", 3),
    ("lemma-phi-n", 3),
    ("thm-simpleQquotient", 3),
    ("prop-symvsinv", 3),
    ("prop-involutive-bijection", 3),
    ("prop-involutive-residuation", 3),
];

fn criterion_9() -> Check {
    let caps = Caps::default();
    let law = laws::find("residuation-identities").unwrap();
    let mut seen = BTreeSet::new();
    let mut docs: Vec<StructureDoc> = Vec::new();
    for &(id, bound) in SUITES {
        for inst in (laws::find(id).unwrap().family)(bound, &caps, &mut Vec::new()) {
            if seen.insert(serde_json::to_string(&inst.doc.body).unwrap()) {
                docs.push(inst.doc);
            }
        }
    }
    let mut checked = 0;
    for doc in docs {
        if !laws::accepts(law, &doc) {
            continue;
        }
        let r = check_one(law, &Instance { id: doc.name.clone(), doc }, &caps);
        ensure(r.status == Status::Pass, || format!("{}: {:?}", r.instance_id, r.witness))?;
        checked += 1;
    }
    Ok(format!("{checked} bimorphism instances"))
}

fn criterion_10() -> Check {
    let a = run(&RunOptions::default()).map_err(|e| e.to_string())?;
    let b = run(&RunOptions::default()).map_err(|e| e.to_string())?;
    let (ja, jb) = (to_json(&without_timing(&a)), to_json(&without_timing(&b)));
    ensure(ja == jb, || "reports differ".into())?;
    ensure(a.passed(), || format!("{} failures in the full run", a.summary.fail))?;
    Ok(format!("{} results, identical", a.results.len()))
}

fn main() {
    // `cargo test` passes harness flags; a filter that names nothing here skips the suite
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    type Criterion = (&'static str, u64, fn() -> Check);
    let criteria: &[Criterion] = &[
        ("1 galois round-trip", 60, criterion_1),
        ("2 reconstruction", 120, criterion_2),
        ("3 endomorphism quantales", 60, criterion_3),
        ("4 comparison homomorphism", 120, criterion_4),
        ("5 continuity", 120, criterion_5),
        ("6 modules", 180, criterion_6),
        ("7 balanced forms", 180, criterion_7),
        ("8 involutive", 180, criterion_8),
        ("9 residuation", 180, criterion_9),
        ("10 determinism", 300, criterion_10),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        let outcome = match outcome {
            Ok(note) if t > Duration::from_secs(*limit) => Err(format!("{note}; over the {limit} s limit")),
            o => o,
        };
        match outcome {
            Ok(note) => println!("PASS criterion {name} ({:.2} s ≤ {limit} s): {note}", t.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.2} s): {why}", t.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
