//! Lie algebra weight systems on A(↓↓): the universal sl2 weight system and the
//! standard representations of gl_N, sl_N, so_N, sp_2N with symbolic `N`.

pub mod checks;
pub mod oracle;
pub mod standard;
pub mod usl2;

use std::fmt;
use std::str::FromStr;

pub use checks::{commutativity_report, conjugation_check, relation_annihilation, skein_verify};
pub use standard::{weight_standard, Op, OperatorElt, StdSystem};
pub use usl2::{weight_universal_sl2, PbwMono, Usl2TensorElt};

use crate::diagrams::{stu_expand, DiagElt, StuOrder};
use crate::error::{Error, Result};
use crate::scalar::FormalScalar;

/// A weight system selectable by name: `sl2 | glN | slN | soN | sp2N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightSystem {
    Sl2,
    Std(StdSystem),
}

impl WeightSystem {
    pub const ALL: [WeightSystem; 5] = [
        WeightSystem::Sl2,
        WeightSystem::Std(StdSystem::GlN),
        WeightSystem::Std(StdSystem::SlN),
        WeightSystem::Std(StdSystem::SoN),
        WeightSystem::Std(StdSystem::Sp2N),
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightSystem::Sl2 => "sl2",
            WeightSystem::Std(s) => s.name(),
        }
    }
}

impl FromStr for WeightSystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "sl2" {
            return Ok(WeightSystem::Sl2);
        }
        s.parse::<StdSystem>().map(WeightSystem::Std).map_err(|_| {
            Error::Parse(format!(
                "unknown weight system {s:?} (sl2, glN, slN, soN, sp2N)"
            ))
        })
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A weight-system value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightValue {
    Sl2(Usl2TensorElt),
    Std(OperatorElt),
}

impl WeightValue {
    pub fn mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (WeightValue::Sl2(a), WeightValue::Sl2(b)) => Ok(WeightValue::Sl2(a.mul(b)?)),
            (WeightValue::Std(a), WeightValue::Std(b)) => Ok(WeightValue::Std(a.compose(b)?)),
            _ => Err(Error::Invalid("values of different weight systems".into())),
        }
    }

    pub fn add_scaled(&mut self, o: &Self, c: &FormalScalar) -> Result<()> {
        match (self, o) {
            (WeightValue::Sl2(a), WeightValue::Sl2(b)) => a.add_scaled(b, c),
            (WeightValue::Std(a), WeightValue::Std(b)) => a.add_scaled(b, c),
            _ => Err(Error::Invalid("values of different weight systems".into())),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.add_scaled(o, &FormalScalar::int(-1))?;
        Ok(r)
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            WeightValue::Sl2(a) => a.is_zero(),
            WeightValue::Std(a) => a.is_zero(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            WeightValue::Sl2(a) => a.to_text(),
            WeightValue::Std(a) => a.to_sexpr(),
        }
    }
}

impl fmt::Display for WeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Evaluate a weight system on `A(↓↓)`; standard systems first rewrite into chord diagrams by STU.
pub fn evaluate(system: WeightSystem, x: &DiagElt) -> Result<WeightValue> {
    match system {
        WeightSystem::Sl2 => Ok(WeightValue::Sl2(weight_universal_sl2(x)?)),
        WeightSystem::Std(s) => {
            let chords = if x.terms().keys().all(|d| d.is_chord()) {
                x.clone()
            } else {
                stu_expand(x, StuOrder::FirstLeg)?
            };
            Ok(WeightValue::Std(weight_standard(s, &chords)?))
        }
    }
}
