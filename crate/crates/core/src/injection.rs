//! Text specifications of injections, as used on the command line:
//!
//! * `i->j,i'->j',...`: a finite partial injection
//! * `phi-word:<word>`: the graph of `φ(w)`, e.g. `phi-word:+01·-10`
//! * `perturb:<spec>@<point>-><value>`: another spec with one value moved
//! * `id`: the identity

use crate::map::{Eval, MapRef, Perturbed, PhiMap, PointMap};
use crate::surgery::PartialInjection;
use crate::tower::TowerRef;
use crate::words::Word;
use crate::Nat;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad injection spec {spec:?}: {reason}")]
pub struct SpecError {
    pub spec: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjectionSpec {
    Pairs(PartialInjection),
    PhiWord(Word),
    Perturb { base: Box<InjectionSpec>, point: Nat, value: Nat },
    Identity,
}

fn parse_nat(s: &str) -> Option<Nat> {
    Nat::parse_bytes(s.trim().as_bytes(), 10)
}

fn parse_arrow(s: &str) -> Option<(Nat, Nat)> {
    let (a, b) = s.split_once("->").or_else(|| s.split_once('→'))?;
    Some((parse_nat(a)?, parse_nat(b)?))
}

impl FromStr for InjectionSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| SpecError { spec: s.to_string(), reason: reason.to_string() };
        let s = s.trim();
        if s == "id" {
            return Ok(InjectionSpec::Identity);
        }
        if let Some(w) = s.strip_prefix("phi-word:") {
            return w.parse().map(InjectionSpec::PhiWord).map_err(|e| err(&e.to_string()));
        }
        if let Some(rest) = s.strip_prefix("perturb:") {
            let (base, tail) = rest.rsplit_once('@').ok_or_else(|| err("missing @point->value"))?;
            let (point, value) = parse_arrow(tail).ok_or_else(|| err("expected @point->value"))?;
            return Ok(InjectionSpec::Perturb { base: Box::new(base.parse()?), point, value });
        }
        let mut f = PartialInjection::new();
        if !s.is_empty() {
            for part in s.split(',') {
                let (a, b) = parse_arrow(part).ok_or_else(|| err("expected i->j pairs"))?;
                f.insert(a, b).map_err(|e| err(&e.to_string()))?;
            }
        }
        Ok(InjectionSpec::Pairs(f))
    }
}

impl fmt::Display for InjectionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectionSpec::Pairs(p) => write!(f, "{p}"),
            InjectionSpec::PhiWord(w) => write!(f, "phi-word:{w}"),
            InjectionSpec::Perturb { base, point, value } => write!(f, "perturb:{base}@{point}->{value}"),
            InjectionSpec::Identity => f.write_str("id"),
        }
    }
}

struct IdentityMap;

impl PointMap for IdentityMap {
    fn apply(&self, m: &Nat) -> Eval {
        Ok(Some(m.clone()))
    }

    fn preimage(&self, m: &Nat) -> Eval {
        Ok(Some(m.clone()))
    }

    fn describe(&self) -> String {
        "id".into()
    }

    fn is_identity(&self) -> bool {
        true
    }
}

pub fn identity_map() -> MapRef {
    Arc::new(IdentityMap)
}

impl InjectionSpec {
    /// The map this spec denotes on `tower`.
    pub fn bind(&self, tower: &TowerRef) -> Result<MapRef, SpecError> {
        Ok(match self {
            InjectionSpec::Pairs(p) => Arc::new(p.clone()),
            InjectionSpec::PhiWord(w) => Arc::new(PhiMap::new(tower.clone(), w.clone())),
            InjectionSpec::Identity => identity_map(),
            InjectionSpec::Perturb { base, point, value } => {
                let b = base.bind(tower)?;
                Arc::new(
                    Perturbed::new(b, point.clone(), value.clone())
                        .map_err(|e| SpecError { spec: self.to_string(), reason: e.to_string() })?,
                )
            }
        })
    }
}
