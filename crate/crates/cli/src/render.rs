//! Plain-text rendering.

use std::fmt::Write as _;
use std::io::IsTerminal;

use csmkit::game::{EdgeSet, GameGraph, VertexSet};
use csmkit::templates::{Template, TemplateCheck};

pub fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

pub fn verdict(ok: bool) -> String {
    let (word, code) = if ok { ("PASS", "32") } else { ("FAIL", "31") };
    if color_enabled() {
        format!("\x1b[{code}m{word}\x1b[0m")
    } else {
        word.to_owned()
    }
}

pub fn set(g: &GameGraph, s: &VertexSet) -> String {
    let labels: Vec<String> = s.iter().map(|v| g.label(v)).collect();
    format!("{{{}}}", labels.join(", "))
}

fn edges(g: &GameGraph, es: &EdgeSet) -> String {
    let labels: Vec<String> = es
        .iter()
        .map(|&(u, v)| format!("({}, {})", g.label(u), g.label(v)))
        .collect();
    format!("{{{}}}", labels.join(", "))
}

pub fn template(g: &GameGraph, name: &str, t: &Template) -> String {
    let mut out = format!("{name}:\n");
    if t.is_empty() {
        out.push_str("  true\n");
        return out;
    }
    if !t.unsafe_edges.is_empty() {
        let _ = writeln!(out, "  unsafe {}", edges(g, &t.unsafe_edges));
    }
    if !t.colive.is_empty() {
        let _ = writeln!(out, "  colive {}", edges(g, &t.colive));
    }
    for c in &t.cond_live {
        let groups: Vec<String> = c.groups.iter().map(|grp| edges(g, &grp.edges)).collect();
        if c.cond.len() == g.vertex_count() {
            let _ = writeln!(out, "  live {}", groups.join(" "));
        } else {
            let _ = writeln!(out, "  live if {} {}", set(g, &c.cond), groups.join(" "));
        }
    }
    out
}

pub fn check(g: &GameGraph, c: &TemplateCheck) -> String {
    let mut out = format!("conflict-free: {}\n", c.conflict_free);
    if !c.bad_vertices.is_empty() {
        let _ = writeln!(out, "blocked vertices: {}", set(g, &c.bad_vertices));
    }
    for b in &c.bad_groups {
        let _ = writeln!(
            out,
            "unserved group {} at {}",
            edges(g, &b.group.edges),
            g.label(b.source)
        );
    }
    out
}
