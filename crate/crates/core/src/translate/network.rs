//! Transducers kept as an unflattened tree of compositions and products.
//! Flattening the tree gives the same transducer as [`compose`] and
//! [`product`]; exploring it directly keeps each component's zone separate.

use std::sync::Arc;

use super::basic::{atomic_transducer, bool_transducer, next_transducer, BoolOp};
use super::until::until_transducer;
use super::{compose, product, TranslateError};
use crate::automaton::Gtt;
use crate::formula::Formula;

#[derive(Clone, Debug)]
pub enum Network {
    Leaf(Arc<Gtt>),
    /// `outer ∘ inner`.
    Compose(Box<Network>, Box<Network>),
    Product(Box<Network>, Box<Network>),
}

impl Network {
    pub fn leaf(t: Gtt) -> Network {
        Network::Leaf(Arc::new(t))
    }

    pub fn compose(outer: Network, inner: Network) -> Result<Network, TranslateError> {
        let (expected, found) = (outer.in_channels().len(), inner.out_width());
        if expected != found {
            return Err(TranslateError::AlphabetMismatch { expected, found });
        }
        Ok(Network::Compose(Box::new(outer), Box::new(inner)))
    }

    pub fn product(a: Network, b: Network) -> Result<Network, TranslateError> {
        if a.in_channels() != b.in_channels() {
            return Err(TranslateError::AlphabetMismatch { expected: a.in_channels().len(), found: b.in_channels().len() });
        }
        Ok(Network::Product(Box::new(a), Box::new(b)))
    }

    pub fn in_channels(&self) -> &[String] {
        match self {
            Network::Leaf(t) => &t.gta.channels,
            Network::Compose(_, inner) => inner.in_channels(),
            Network::Product(a, _) => a.in_channels(),
        }
    }

    pub fn out_width(&self) -> usize {
        match self {
            Network::Leaf(t) => t.out_channels.len(),
            Network::Compose(outer, _) => outer.out_width(),
            Network::Product(a, b) => a.out_width() + b.out_width(),
        }
    }

    /// Leaves in evaluation order: inner before outer, left before right.
    pub fn leaves(&self) -> Vec<&Arc<Gtt>> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Arc<Gtt>>) {
        match self {
            Network::Leaf(t) => out.push(t),
            Network::Compose(outer, inner) => {
                inner.collect(out);
                outer.collect(out);
            }
            Network::Product(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn flatten(&self) -> Result<Gtt, TranslateError> {
        match self {
            Network::Leaf(t) => Ok((**t).clone()),
            Network::Compose(outer, inner) => compose(&outer.flatten()?, &inner.flatten()?),
            Network::Product(a, b) => product(&a.flatten()?, &b.flatten()?),
        }
    }
}

/// The network whose flattening is `formula_to_gtt_over(f, channels)`.
pub fn formula_to_network_over(f: &Formula, channels: &[String]) -> Result<Network, TranslateError> {
    Ok(match f {
        Formula::Prop(p) => Network::leaf(atomic_transducer(channels, p)?),
        Formula::Not(a) => Network::compose(Network::leaf(bool_transducer(BoolOp::Not)), formula_to_network_over(a, channels)?)?,
        Formula::And(a, b) | Formula::Or(a, b) => {
            let op = if matches!(f, Formula::And(..)) { BoolOp::And } else { BoolOp::Or };
            let pair = Network::product(formula_to_network_over(a, channels)?, formula_to_network_over(b, channels)?)?;
            Network::compose(Network::leaf(bool_transducer(op)), pair)?
        }
        Formula::Next(iv, a) => Network::compose(Network::leaf(next_transducer(*iv)), formula_to_network_over(a, channels)?)?,
        Formula::Until(iv, a, b) => {
            let pair = Network::product(formula_to_network_over(a, channels)?, formula_to_network_over(b, channels)?)?;
            Network::compose(Network::leaf(until_transducer(*iv)), pair)?
        }
    })
}

pub fn formula_to_network(f: &Formula) -> Network {
    let channels: Vec<String> = f.props().into_iter().collect();
    formula_to_network_over(f, &channels).expect("every proposition is a channel")
}
