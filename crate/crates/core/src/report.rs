//! Norm and constant reports shared by the measure, norm and characterization modules.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::dyadic::DyadicInterval;
use crate::rational::{fmt_q, to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// True supremum over the stated dyadic family, in exact arithmetic.
    ExactRational,
    /// Supremum over a finite interval family; a lower bound of the true value.
    GridSup,
    Quadrature,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Dyadic(DyadicInterval),
    Interval { a: f64, b: f64 },
    Exact { a: Q, b: Q },
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        match self {
            Witness::Dyadic(i) => {
                m.serialize_entry("scale", &i.scale)?;
                m.serialize_entry("pos", &i.pos)?;
            }
            Witness::Interval { a, b } => {
                m.serialize_entry("a", a)?;
                m.serialize_entry("b", b)?;
            }
            Witness::Exact { a, b } => {
                m.serialize_entry("a", &fmt_q(a))?;
                m.serialize_entry("b", &fmt_q(b))?;
            }
        }
        m.end()
    }
}

/// A computed norm or constant together with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub exact: Option<Q>,
    pub method: Method,
    pub witness: Option<Witness>,
    pub params: BTreeMap<String, String>,
}

impl NormReport {
    pub fn exact(value: Q, witness: Option<Witness>) -> Self {
        NormReport {
            value: to_f64(&value),
            exact: Some(value),
            method: Method::ExactRational,
            witness,
            params: BTreeMap::new(),
        }
    }

    pub fn approx(value: f64, method: Method, witness: Option<Witness>) -> Self {
        NormReport {
            value,
            exact: None,
            method,
            witness,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn dyadic_witness(&self) -> Option<DyadicInterval> {
        match self.witness {
            Some(Witness::Dyadic(i)) => Some(i),
            _ => None,
        }
    }

    pub fn exact_value(&self) -> Option<&Q> {
        self.exact.as_ref()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl Serialize for NormReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match &self.exact {
            Some(q) => m.serialize_entry("value", &fmt_q(q))?,
            None => m.serialize_entry("value", &self.value)?,
        }
        m.serialize_entry("value_f64", &self.value)?;
        m.serialize_entry("method", &self.method)?;
        m.serialize_entry("witness", &self.witness)?;
        m.serialize_entry("params", &self.params)?;
        m.end()
    }
}
