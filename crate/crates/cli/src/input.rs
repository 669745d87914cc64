//! Reading formulae, automata, words and step choices.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gta_core::automaton::{ClockKind, Gta, Gtt, ReleaseChoices, StepChoice};
use gta_core::formula::{self, Formula, Lasso, TimedWord};
use gta_core::ExtReal;
use serde::Deserialize;

/// The formula argument, or stdin when it is absent or `-`.
pub fn formula(arg: Option<&str>) -> Result<Formula> {
    let text = match arg {
        Some(t) if t != "-" => t.to_string(),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading formula from stdin")?;
            s
        }
    };
    let text = text.trim();
    formula::parse(text).map_err(|e| anyhow!("parse error at offset {}: {}\n  {}\n  {}^", e.pos, e.msg, text, " ".repeat(e.pos)))
}

pub enum Automaton {
    Gta(Gta),
    Gtt(Gtt),
}

impl Automaton {
    pub fn gta(&self) -> &Gta {
        match self {
            Automaton::Gta(a) => a,
            Automaton::Gtt(t) => &t.gta,
        }
    }
}

/// A GTT or GTA in the toolkit's JSON format, validated.
pub fn automaton(path: &Path) -> Result<Automaton> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let a = if value.get("gta").is_some() {
        let t: Gtt = serde_json::from_value(value).with_context(|| format!("decoding transducer {}", path.display()))?;
        t.validate().map_err(|e| anyhow!("invalid transducer: {e}"))?;
        Automaton::Gtt(t)
    } else {
        let a: Gta = serde_json::from_value(value).with_context(|| format!("decoding automaton {}", path.display()))?;
        a.validate().map_err(|e| anyhow!("invalid automaton: {e}"))?;
        Automaton::Gta(a)
    };
    Ok(a)
}

/// A finite word, or a lasso unrolled `unroll` times.
pub fn word(path: &Path, unroll: usize) -> Result<TimedWord> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let w = if value.is_array() {
        serde_json::from_value::<TimedWord>(value).context("decoding timed word")?
    } else {
        let l: Lasso = serde_json::from_value(value).context("decoding lasso")?;
        l.check().map_err(|e| anyhow!("invalid lasso: {e}"))?;
        l.unroll(unroll.max(1))
    };
    w.check().map_err(|e| anyhow!("invalid timed word: {e}"))?;
    Ok(w)
}

#[derive(Deserialize)]
struct ChoiceFile {
    transition: usize,
    /// Release value per clock name.
    #[serde(default)]
    releases: BTreeMap<String, ExtReal>,
}

pub fn clock_index(a: &Gta, name: &str) -> Result<usize> {
    a.clocks.iter().find(|c| c.name == name).map(|c| c.index).ok_or_else(|| anyhow!("unknown clock `{name}`"))
}

/// Step choices `[{"transition": 0, "releases": {"x": "-1"}}, ...]`;
/// released future clocks not listed take `default`.
pub fn choices(path: &Path, a: &Gta, default: ExtReal) -> Result<Vec<StepChoice>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: Vec<ChoiceFile> = serde_json::from_str(&text).context("decoding step choices")?;
    raw.into_iter()
        .map(|c| {
            if c.transition >= a.transitions.len() {
                bail!("transition {} does not exist", c.transition);
            }
            let mut rel = ReleaseChoices::uniform(a.future_clocks(), default);
            for (name, v) in c.releases {
                rel = rel.with_clock(clock_index(a, &name)?, v);
            }
            Ok(StepChoice { transition: c.transition, releases: rel })
        })
        .collect()
}

/// `x=-1,y=0`; other clocks get `future_default` or 0.
pub fn valuation(a: &Gta, text: &str, future_default: ExtReal) -> Result<Vec<ExtReal>> {
    let mut v = vec![ExtReal::ZERO; a.num_clocks() + 1];
    for c in &a.clocks {
        if c.kind == ClockKind::Future {
            v[c.index] = future_default;
        }
    }
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, val) = part.split_once('=').ok_or_else(|| anyhow!("expected name=value, got `{part}`"))?;
        v[clock_index(a, name.trim())?] = val.parse().map_err(|e| anyhow!("bad value for {name}: {e}"))?;
    }
    Ok(v)
}
