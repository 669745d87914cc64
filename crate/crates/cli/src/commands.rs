//! The subcommands. Each returns the process exit code.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use gta_core::automaton::{gta_to_dot, label_matches, run_concrete, Gta, ReleaseChoices, StepChoice, Trace};
use gta_core::explorer::{
    build_zone_graph, explore_liveness, model_check_product, prepare, validate_witness, verdict_of, Covering,
    ExploreOptions, LassoWitness, Liveness, LivenessOptions, McVerdict, Stats, WitnessStep,
};
use gta_core::ext::fmt_rat;
use gta_core::translate::{formula_to_gtt, gtt_to_gta, size_report};
use gta_core::ExtReal;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::input::{self, Automaton};
use crate::SearchOpts;

pub const EMPTY: u8 = 0;
pub const NON_EMPTY: u8 = 1;
pub const INCONCLUSIVE: u8 = 2;

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    write(path, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn size_line(a: &Gta) -> String {
    format!(
        "{} locations, {} transitions, {} future clocks, {} history clocks",
        a.states.len(),
        a.transitions.len(),
        a.future_clocks().len(),
        a.history_clocks().len()
    )
}

pub fn compile(formula: Option<&str>, gtt: Option<PathBuf>, gta: Option<PathBuf>, dot: Option<PathBuf>) -> Result<u8> {
    let f = input::formula(formula)?;
    let t = formula_to_gtt(&f);
    let a = gtt_to_gta(&t)?;
    println!("formula: {f}");
    println!("transducer: {}", size_line(&t.gta));
    println!("automaton: {}", size_line(&a));
    for s in size_report(&f) {
        match s.slots {
            Some(k) => {
                let bound = s.location_bound.unwrap_or(0);
                let verdict = if s.locations <= bound { "ok" } else { "EXCEEDED" };
                println!(
                    "until {}: k={k}, locations {} (bound 6k={bound}: {verdict}), future clocks {} (2k+2={}), B states {} (2k-1={})",
                    s.interval,
                    s.locations,
                    s.future_clocks,
                    2 * k + 2,
                    s.b_states.unwrap_or(0),
                    s.b_states_stated.unwrap_or(0),
                );
            }
            None => println!("until {}: one-sided, locations {}, future clocks {}", s.interval, s.locations, s.future_clocks),
        }
    }
    if let Some(p) = gtt {
        write_json(&p, &serde_json::to_value(&t)?)?;
    }
    if let Some(p) = gta {
        write_json(&p, &serde_json::to_value(&a)?)?;
    }
    if let Some(p) = dot {
        write(&p, &gta_to_dot(&a))?;
    }
    Ok(0)
}

fn liveness_opts(s: &SearchOpts) -> LivenessOptions {
    LivenessOptions { budget: s.budget, non_zeno: !s.no_nonzeno, threads: s.threads }
}

/// Searches for an accepting lasso and writes the explored zone graph.
fn liveness(a: &Gta, s: &SearchOpts) -> Result<Liveness> {
    let (res, g, zg) = explore_liveness(a, &liveness_opts(s));
    if let Some(p) = &s.dot {
        write(p, &zg.to_dot(&g))?;
    }
    Ok(res)
}

fn stats_line(s: &Stats) -> String {
    format!("zone graph: {} nodes, {} edges{}", s.nodes, s.edges, if s.complete { "" } else { " (partial)" })
}

/// Validates `w`, prints the lasso word and writes the witness file.
/// Returns false when validation fails.
fn emit_witness(w: &LassoWitness, path: Option<&Path>) -> Result<bool> {
    let run = match validate_witness(w, 3) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("witness failed validation: {e}");
            return Ok(false);
        }
    };
    print!("{}", describe_lasso(w));
    if let Some(l) = &run.lasso {
        println!("word: {}", serde_json::to_string(l)?);
    }
    if let Some(p) = path {
        write_json(p, &json!({"witness": serde_json::to_value(w)?, "run": run.to_json(&w.automaton)}))?;
    }
    Ok(true)
}

fn describe_lasso(w: &LassoWitness) -> String {
    let step = |s: &WitnessStep| format!("  t{} -> {}  {}\n", s.transition, s.state, s.zone);
    let mut out = format!("start: {}  {}\nprefix:\n", w.start_state, w.start_zone);
    w.prefix.iter().for_each(|s| out.push_str(&step(s)));
    out.push_str("cycle:\n");
    w.cycle.iter().for_each(|s| out.push_str(&step(s)));
    for (clock, ev) in &w.evidence {
        out.push_str(&format!("  {clock}: {ev:?}\n"));
    }
    out
}

pub fn check_sat(formula: Option<&str>, s: &SearchOpts, witness: Option<PathBuf>) -> Result<u8> {
    let f = input::formula(formula)?;
    let a = gtt_to_gta(&formula_to_gtt(&f))?;
    Ok(match liveness(&a, s)? {
        Liveness::Empty(st) => {
            println!("UNSAT");
            println!("{}", stats_line(&st));
            EMPTY
        }
        Liveness::Inconclusive(st) => {
            println!("INCONCLUSIVE");
            println!("{}", stats_line(&st));
            INCONCLUSIVE
        }
        Liveness::NonEmpty(w, st) => {
            println!("SAT");
            println!("{}", stats_line(&st));
            if !emit_witness(&w, witness.as_deref())? {
                return Err(anyhow!("lasso witness did not replay"));
            }
            NON_EMPTY
        }
    })
}

pub fn model_check(system: &Path, formula: Option<&str>, s: &SearchOpts, witness: Option<PathBuf>) -> Result<u8> {
    let sys = input::automaton(system)?.gta().clone();
    let f = input::formula(formula)?;
    let prod = model_check_product(&sys, &f)?;
    Ok(match verdict_of(liveness(&prod, s)?) {
        McVerdict::Satisfied(st) => {
            println!("HOLDS");
            println!("{}", stats_line(&st));
            EMPTY
        }
        McVerdict::Inconclusive(st) => {
            println!("INCONCLUSIVE");
            println!("{}", stats_line(&st));
            INCONCLUSIVE
        }
        McVerdict::Violated(w, _, st) => {
            println!("VIOLATED");
            println!("{}", stats_line(&st));
            if !emit_witness(&w, witness.as_deref())? {
                return Err(anyhow!("counterexample did not replay"));
            }
            NON_EMPTY
        }
    })
}

pub struct SimulateJob {
    pub automaton: PathBuf,
    pub word: PathBuf,
    pub choices: Option<PathBuf>,
    pub unroll: usize,
    pub initial: usize,
    pub v0: String,
    pub release: String,
    pub seed: u64,
}

/// Depth-first search for choices that run through the whole word.
fn search_run(a: &Gta, word: &[(Vec<bool>, gta_core::Rat)], q0: usize, v0: &[ExtReal], rel: &ReleaseChoices, rng: &mut ChaCha8Rng) -> Option<Vec<StepChoice>> {
    let mut chosen: Vec<StepChoice> = Vec::new();
    let mut stack: Vec<Vec<usize>> = Vec::new();
    let mut state = q0;
    loop {
        if chosen.len() == word.len() {
            return Some(chosen);
        }
        if stack.len() == chosen.len() {
            let mut cands: Vec<usize> = (0..a.transitions.len())
                .filter(|&t| a.transitions[t].src == state && label_matches(&a.transitions[t].label, &word[chosen.len()].0))
                .collect();
            cands.shuffle(rng);
            stack.push(cands);
        }
        match stack.last_mut().and_then(|c| c.pop()) {
            Some(t) => {
                chosen.push(StepChoice { transition: t, releases: rel.clone() });
                match run_concrete(a, &word[..chosen.len()], q0, v0, &chosen) {
                    Ok(_) => state = a.transitions[t].tgt,
                    Err(_) => {
                        chosen.pop();
                    }
                }
            }
            None => {
                stack.pop();
                chosen.pop()?;
                state = chosen.last().map_or(q0, |c| a.transitions[c.transition].tgt);
            }
        }
    }
}

fn print_trace(aut: &Automaton, word: &[(Vec<bool>, gta_core::Rat)], trace: &Trace) {
    let a = aut.gta();
    let val = |v: &[ExtReal]| (1..v.len()).map(|i| format!("{}={}", a.clock_name(i), v[i])).collect::<Vec<_>>().join(" ");
    let letter = |bits: &[bool], names: &[String]| {
        let s: Vec<&str> = bits.iter().zip(names).filter(|(b, _)| **b).map(|(_, n)| n.as_str()).collect();
        format!("{{{}}}", s.join(","))
    };
    let (q, v) = &trace.configs[0];
    println!("start: {}  {}", a.states[*q], val(v));
    for (pos, &t) in trace.transitions.iter().enumerate() {
        let (q, v) = &trace.configs[pos + 1];
        let out = match aut {
            Automaton::Gtt(g) => format!("  out {}", letter(&g.outputs[t], &g.out_channels)),
            Automaton::Gta(_) => String::new(),
        };
        println!(
            "{pos}: t={} {} t{t} -> {}  {}{out}",
            fmt_rat(&word[pos].1),
            letter(&word[pos].0, &a.channels),
            a.states[*q],
            val(v)
        );
    }
}

pub fn simulate(job: &SimulateJob) -> Result<u8> {
    let aut = input::automaton(&job.automaton)?;
    let a = aut.gta();
    let default: ExtReal = job.release.parse().map_err(|e| anyhow!("bad --release value: {e}"))?;
    let w = input::word(&job.word, job.unroll)?;
    let bits = w.to_bits(&a.channels);
    let v0 = input::valuation(a, &job.v0, default)?;
    let q0 = a.initial.get(job.initial).ok_or_else(|| anyhow!("initial entry {} does not exist", job.initial))?.state;
    let choices = match &job.choices {
        Some(p) => input::choices(p, a, default)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(job.seed);
            let rel = ReleaseChoices::uniform(a.future_clocks(), default);
            match search_run(a, &bits, q0, &v0, &rel, &mut rng) {
                Some(c) => c,
                None => {
                    println!("BLOCKED: no run over the word from the given start");
                    return Ok(1);
                }
            }
        }
    };
    match run_concrete(a, &bits, q0, &v0, &choices) {
        Ok(trace) => {
            print_trace(&aut, &bits, &trace);
            Ok(0)
        }
        Err(e) => {
            println!("BLOCKED: {e}");
            Ok(1)
        }
    }
}

pub fn zonegraph(path: &Path, s: &SearchOpts) -> Result<u8> {
    let a = input::automaton(path)?.gta().clone();
    let g = prepare(&a, !s.no_nonzeno);
    let zg = build_zone_graph(&g, &ExploreOptions { budget: s.budget, covering: Covering::Equivalence, threads: s.threads });
    let st = Stats { nodes: zg.nodes.len(), edges: zg.edge_count(), complete: zg.complete };
    println!("{}", stats_line(&st));
    let buchi = zg.nodes.iter().filter(|n| g.buchi[n.state]).count();
    println!("buchi nodes: {buchi}");
    if let Some(p) = &s.dot {
        write(p, &zg.to_dot(&g))?;
    }
    Ok(if zg.complete { 0 } else { INCONCLUSIVE })
}
