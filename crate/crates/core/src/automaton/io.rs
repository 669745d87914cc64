//! Text renderings: programs, labels and DOT location graphs. JSON goes
//! through the serde derives on the automaton types.

use super::{Atomic, Gta, Gtt, Label, Step, ZERO};

pub fn fmt_atomic(a: &Gta, at: &Atomic) -> String {
    let op = if at.strict { "<" } else { "<=" };
    match (at.x, at.y) {
        (x, ZERO) => format!("{}{op}{}", a.clock_name(x), at.c),
        (ZERO, y) => format!("-{}{op}{}", a.clock_name(y), at.c),
        (x, y) => format!("{}-{}{op}{}", a.clock_name(x), a.clock_name(y), at.c),
    }
}

pub fn fmt_program(a: &Gta, prog: &[Step]) -> String {
    let parts: Vec<String> = prog
        .iter()
        .filter_map(|s| match s {
            Step::Guard(g) if g.is_empty() => None,
            Step::Guard(g) => Some(g.iter().map(|at| fmt_atomic(a, at)).collect::<Vec<_>>().join(" & ")),
            Step::Change(r) => Some(format!("[{}]", r.iter().map(|&c| a.clock_name(c)).collect::<Vec<_>>().join(","))),
            Step::Rename(sigma) => Some(format!(
                "rename({})",
                (1..sigma.len())
                    .filter(|&i| sigma[i] != i)
                    .map(|i| format!("{}<-{}", a.clock_name(i), a.clock_name(sigma[i])))
                    .collect::<Vec<_>>()
                    .join(",")
            )),
        })
        .collect();
    parts.join("; ")
}

pub fn fmt_label(a: &Gta, label: &Label) -> String {
    if label.is_empty() {
        return "*".into();
    }
    label
        .iter()
        .map(|&(ch, b)| if b { a.channels[ch].clone() } else { format!("!{}", a.channels[ch]) })
        .collect::<Vec<_>>()
        .join("&")
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot(a: &Gta, out: Option<&Gtt>) -> String {
    let mut s = String::from("digraph gta {\n  rankdir=LR;\n");
    for (i, name) in a.states.iter().enumerate() {
        let shape = if a.buchi[i] { "doublecircle" } else { "circle" };
        s.push_str(&format!("  s{i} [label=\"{}\", shape={shape}];\n", escape(name)));
    }
    for (k, init) in a.initial.iter().enumerate() {
        let g = init.guard.iter().map(|at| fmt_atomic(a, at)).collect::<Vec<_>>().join(" & ");
        s.push_str(&format!("  init{k} [shape=point];\n  init{k} -> s{} [label=\"{}\"];\n", init.state, escape(&g)));
    }
    for (ti, t) in a.transitions.iter().enumerate() {
        let mut label = format!("{} | {}", fmt_label(a, &t.label), fmt_program(a, &t.prog));
        if let Some(gtt) = out {
            let o: String = gtt.outputs[ti].iter().map(|&b| if b { '1' } else { '0' }).collect();
            label.push_str(&format!(" / {o}"));
        }
        s.push_str(&format!("  s{} -> s{} [label=\"{}\"];\n", t.src, t.tgt, escape(&label)));
    }
    s.push_str("}\n");
    s
}

pub fn gta_to_dot(a: &Gta) -> String {
    dot(a, None)
}

pub fn gtt_to_dot(t: &Gtt) -> String {
    dot(&t.gta, Some(t))
}
