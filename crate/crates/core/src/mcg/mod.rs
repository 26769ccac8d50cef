//! The generator map ρ̇, elements of `Ċ_0`, and evaluation of words in `Ċ`.

pub mod member;

pub use member::{candidate, membership, recover_wh, Counterexample, MemberWindow, MembershipReport, Recovered};

use crate::coding::{BitPrefix, CodeMap};
use crate::dpipeline::{Budgets, Known, Pipeline, PipelineTrace};
use crate::map::{Eval, MapRef, OutOfWindow, PointMap};
use crate::surgery::{e_set, surgery, Grafted, SurgeryError};
use crate::tower::{interval_of, TowerRef};
use crate::words::{GeneratorCode, Letter, Sign, Word, WordError};
use crate::{Nat, TriBool};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{0}")]
    Window(String),
    /// the final site failed (III); the pipeline produced something it should not have
    #[error("final site is not spaced: {0}")]
    NotSpaced(String),
    /// catching is undecided in the window and `m` lies where the two branches differ
    #[error("undetermined at {point}: {reason}")]
    Undetermined { point: String, reason: String },
}

impl From<OutOfWindow> for EvalError {
    fn from(e: OutOfWindow) -> Self {
        EvalError::Window(e.0)
    }
}

/// Where the generator's injection came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "name")]
pub enum Source {
    /// `x ∉ ran χ`: some row or column of the graph has two ones
    OutOfRange,
    /// the partial injection read off the bits of `x`
    Decoded,
    /// a registered injection whose code starts with `x`
    Registry(String),
}

enum Branch {
    Phi,
    Graft(Result<Grafted, String>),
    /// the sites `ρ̇(x)` may be grafted on, with their `E`-sets
    Undecided {
        reason: String,
        e: BTreeSet<Nat>,
    },
}

/// A generator `ρ̇(x)` of `Ċ_0`.
pub struct GeneratorSpec {
    pub name: String,
    pub x: BitPrefix,
    pub source: Source,
    /// λ on the final site of `f = χ⁻¹(x)`; True when `x ∉ ran χ`
    pub caught: TriBool,
    pub f: Option<MapRef>,
    pub trace: Option<PipelineTrace>,
    phi: CodeMap,
    branch: Branch,
}

impl fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratorSpec({} x={} caught={})", self.name, self.x, self.caught)
    }
}

/// The part of a generator worth printing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSummary {
    pub name: String,
    pub x: BitPrefix,
    pub source: Source,
    pub caught: TriBool,
    #[serde(with = "crate::bignum::dec_vec")]
    pub d_final: Vec<Nat>,
    pub d_final_from: Option<String>,
}

impl GeneratorSpec {
    /// `ρ̇(x)` for a bare code. A graph-consistent prefix is taken to be in
    /// `ran χ` with the partial injection it spells out.
    pub fn from_code(tower: &TowerRef, x: BitPrefix, budgets: &Budgets, registry: &[Known]) -> Self {
        match x.decode_graph() {
            Some(f) => {
                let mut g = Self::build(tower, &format!("decoded:{x}"), Arc::new(f), Some(x), budgets, registry);
                g.source = Source::Decoded;
                g
            }
            None => Self {
                name: format!("code:{x}"),
                phi: CodeMap::new(tower.clone(), x.clone()),
                x,
                source: Source::OutOfRange,
                caught: TriBool::True,
                f: None,
                trace: None,
                branch: Branch::Phi,
            },
        }
    }

    /// `ρ̇(χ(f))`, with `χ(f)` cut to what the tower reads.
    pub fn from_injection(tower: &TowerRef, name: &str, f: MapRef, budgets: &Budgets, registry: &[Known]) -> Self {
        Self::build(tower, name, f, None, budgets, registry)
    }

    fn build(
        tower: &TowerRef,
        name: &str,
        f: MapRef,
        code: Option<BitPrefix>,
        budgets: &Budgets,
        registry: &[Known],
    ) -> Self {
        let mut p = Pipeline::new(tower.clone(), budgets.clone());
        for k in registry {
            p.register(k.name.clone(), k.map.clone());
        }
        let trace = p.run(name, f.clone());
        let x = code.unwrap_or_else(|| trace.xi_code.clone());
        let phi = CodeMap::new(tower.clone(), x.clone());
        let caught = trace.caught();
        let branch = match &caught {
            TriBool::True => Branch::Phi,
            TriBool::False => {
                let g: MapRef = Arc::new(phi.clone());
                Branch::Graft(surgery(g, &trace.d_final, f.as_ref()).map_err(|e| e.to_string()))
            }
            TriBool::Unknown(r) => {
                let mut e = BTreeSet::new();
                let mut reason = r.clone();
                for d in [trace.d2.points(), trace.d6.points.clone()] {
                    match e_set(&phi, &d, f.as_ref()) {
                        Ok(s) => e.extend(s),
                        Err(err) => reason = format!("{reason}; {err}"),
                    }
                }
                Branch::Undecided { reason, e }
            }
        };
        Self {
            name: name.to_string(),
            x,
            source: Source::Registry(name.to_string()),
            caught,
            f: Some(f),
            trace: Some(trace),
            phi,
            branch,
        }
    }

    pub fn summary(&self) -> GeneratorSummary {
        GeneratorSummary {
            name: self.name.clone(),
            x: self.x.clone(),
            source: self.source.clone(),
            caught: self.caught.clone(),
            d_final: self.trace.as_ref().map(|t| t.d_final.clone()).unwrap_or_default(),
            d_final_from: self.trace.as_ref().map(|t| t.d_final_from.clone()),
        }
    }

    /// Whether some evaluation can leave `φ(x)`.
    pub fn grafts(&self) -> bool {
        !matches!(self.branch, Branch::Phi)
    }

    /// `φ(x)(m)`, whatever the branch.
    pub fn phi_value(&self, m: &Nat) -> Result<Nat, EvalError> {
        Ok(self.phi.total(m)?)
    }

    pub fn phi_value_inverse(&self, m: &Nat) -> Result<Nat, EvalError> {
        Ok(self.phi.total_preimage(m)?)
    }

    fn eval(&self, m: &Nat, sign: Sign) -> Result<Nat, EvalError> {
        let phi = |m: &Nat| match sign {
            Sign::Pos => self.phi.total(m),
            Sign::Neg => self.phi.total_preimage(m),
        };
        match &self.branch {
            Branch::Phi => Ok(phi(m)?),
            Branch::Graft(Ok(g)) => Ok(match sign {
                Sign::Pos => g.total(m)?,
                Sign::Neg => g.total_preimage(m)?,
            }),
            Branch::Graft(Err(e)) => Err(EvalError::NotSpaced(e.clone())),
            // both candidates permute E and agree with φ(x) off it
            Branch::Undecided { reason, e } => {
                if e.contains(m) {
                    Err(EvalError::Undetermined { point: m.to_string(), reason: reason.clone() })
                } else {
                    Ok(phi(m)?)
                }
            }
        }
    }
}

/// `ρ̇(x)(m)`.
pub fn maxmap_eval(g: &GeneratorSpec, m: &Nat) -> Result<Nat, EvalError> {
    g.eval(m, Sign::Pos)
}

pub fn maxmap_eval_inverse(g: &GeneratorSpec, m: &Nat) -> Result<Nat, EvalError> {
    g.eval(m, Sign::Neg)
}

/// `(x_l)^{i_l} ⋯ (x_0)^{i_0}`, reduced, applied rightmost first.
#[derive(Clone, Debug, Default)]
pub struct GroupWordSpec {
    letters: Vec<(Arc<GeneratorSpec>, Sign)>,
}

impl GroupWordSpec {
    /// Generators are identified by code; adjacent `x^{±1} x^{∓1}` cancel.
    pub fn new(letters: impl IntoIterator<Item = (Arc<GeneratorSpec>, Sign)>) -> Self {
        let mut stack: Vec<(Arc<GeneratorSpec>, Sign)> = Vec::new();
        for (g, s) in letters {
            if stack.last().is_some_and(|(h, t)| h.x == g.x && *t != s) {
                stack.pop();
            } else {
                stack.push((g, s));
            }
        }
        Self { letters: stack }
    }

    pub fn letters(&self) -> &[(Arc<GeneratorSpec>, Sign)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.letters.iter().map(|(_, s)| *s).collect()
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|(g, s)| (g.clone(), s.flip())).collect() }
    }

    /// Whether any generator on the word can leave its `φ(x)`.
    pub fn grafts(&self) -> bool {
        self.letters.iter().any(|(g, _)| g.grafts())
    }

    /// The free word over the codes, at `level` (codes cut or padded to it).
    pub fn underlying(&self, level: usize) -> Result<Word, WordError> {
        if level == 0 {
            return Ok(Word::empty(0));
        }
        let letters = self.letters.iter().map(|(g, s)| {
            let mut bits = g.x.bits()[..level.min(g.x.len())].to_vec();
            bits.resize(level, false);
            Letter::new(GeneratorCode::new(bits), *s)
        });
        Word::reduce(level, letters)
    }
}

impl fmt::Display for GroupWordSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, (g, s)) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            let e = if *s == Sign::Pos { "" } else { "^-1" };
            write!(f, "[{}]{e}", g.name)?;
        }
        Ok(())
    }
}

/// The element of `Ċ` named by `w`, at `m`.
pub fn word_eval(w: &GroupWordSpec, m: &Nat) -> Result<Nat, EvalError> {
    let mut y = m.clone();
    for (g, s) in w.letters.iter().rev() {
        y = g.eval(&y, *s)?;
    }
    Ok(y)
}

pub fn word_eval_inverse(w: &GroupWordSpec, m: &Nat) -> Result<Nat, EvalError> {
    let mut y = m.clone();
    for (g, s) in &w.letters {
        y = g.eval(&y, s.flip())?;
    }
    Ok(y)
}

/// A word of `Ċ` as a point map, for graphs and composition.
pub struct WordMap {
    pub tower: TowerRef,
    pub word: GroupWordSpec,
}

impl WordMap {
    fn check(&self, m: &Nat) -> Result<(), OutOfWindow> {
        interval_of(self.tower.as_ref(), m).map(|_| ()).map_err(OutOfWindow::from)
    }
}

impl PointMap for WordMap {
    fn apply(&self, m: &Nat) -> Eval {
        self.check(m)?;
        word_eval(&self.word, m).map(Some).map_err(|e| OutOfWindow(e.to_string()))
    }

    fn preimage(&self, m: &Nat) -> Eval {
        self.check(m)?;
        word_eval_inverse(&self.word, m).map(Some).map_err(|e| OutOfWindow(e.to_string()))
    }

    fn describe(&self) -> String {
        format!("word {}", self.word)
    }

    fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

impl From<SurgeryError> for EvalError {
    fn from(e: SurgeryError) -> Self {
        EvalError::Window(e.to_string())
    }
}
