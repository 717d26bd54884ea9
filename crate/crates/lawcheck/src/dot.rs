//! Graphviz export of Hasse diagrams.

use std::fmt::Write;

use qf_core::Lattice;

use crate::doc::Structure;

fn cluster(out: &mut String, prefix: &str, title: &str, l: &Lattice, label: &dyn Fn(usize) -> String) {
    writeln!(out, "  subgraph cluster_{prefix} {{\n    label=\"{title}\";").unwrap();
    for x in l.elements() {
        writeln!(out, "    {prefix}{x} [label=\"{}\"];", label(x)).unwrap();
    }
    for (x, y) in l.hasse_edges() {
        writeln!(out, "    {prefix}{x} -> {prefix}{y};").unwrap();
    }
    out.push_str("  }\n");
}

type Part<'a> = (String, &'a Lattice, Box<dyn Fn(usize) -> String + 'a>);

fn parts<'a>(s: &'a Structure, title: &str, out: &mut Vec<Part<'a>>) {
    let plain = || Box::new(|x: usize| x.to_string()) as Box<dyn Fn(usize) -> String>;
    match s {
        Structure::Lattice(l) => out.push((title.to_string(), l, plain())),
        Structure::Form(f) => {
            out.push((format!("{title} left"), f.left(), plain()));
            out.push((format!("{title} right"), f.right(), plain()));
        }
        Structure::Quantale(q) => {
            let q2 = q.clone();
            out.push((
                title.to_string(),
                q.carrier(),
                Box::new(move |x| {
                    let mut s = x.to_string();
                    if q2.unit() == Some(x) {
                        s.push_str(" (e)");
                    }
                    if let Some(inv) = q2.involution() {
                        if inv[x] != x {
                            s.push_str(&format!(" *={}", inv[x]));
                        }
                    }
                    s
                }),
            ));
        }
        Structure::Module(m) => out.push((format!("{title} module"), m.carrier(), plain())),
        Structure::InvolutiveModule(im) => out.push((format!("{title} module"), im.module.carrier(), plain())),
        Structure::BalancedForm(bf) => {
            out.push((format!("{title} left"), bf.left.carrier(), plain()));
            out.push((format!("{title} right"), bf.right.carrier(), plain()));
        }
        Structure::Pair(a, b) => {
            parts(a, &format!("{title}.0"), out);
            parts(b, &format!("{title}.1"), out);
        }
    }
}

/// One Hasse diagram per carrier lattice, each in its own cluster.
pub fn to_dot(s: &Structure, name: &str) -> String {
    let mut ps = Vec::new();
    parts(s, name, &mut ps);
    let mut out = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
    for (i, (title, l, label)) in ps.iter().enumerate() {
        cluster(&mut out, &format!("c{i}_"), title.trim(), l, label.as_ref());
    }
    out.push_str("}\n");
    out
}

/// Number of edges in a rendered graph.
pub fn edge_count(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains("->")).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn hasse_edges() {
        assert_eq!(edge_count(&to_dot(&Structure::Lattice(Arc::new(Lattice::chain(2))), "c2")), 1);
        assert_eq!(edge_count(&to_dot(&Structure::Lattice(Arc::new(Lattice::diamond())), "d")), 4);
        assert_eq!(edge_count(&to_dot(&Structure::Lattice(Arc::new(Lattice::powerset(3))), "p")), 12);
    }
}
