use std::collections::BTreeMap;

use crate::qubit::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Clock,
    Jc,
    Degenerate,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::Clock => "clock",
            Model::Jc => "jc",
            Model::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Analytic,
    Numeric,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
        }
    }
}

/// Conditional apparatus shift for one outcome.
///
/// Clock shifts are in the energy units of `omega0`; oscillator shifts are in
/// photon quanta.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftReport<T> {
    pub model: Model,
    pub method: Method,
    pub outcome: Outcome,
    pub shift: T,
    pub probability: T,
    pub residuals: BTreeMap<String, T>,
}

impl<T> ShiftReport<T> {
    pub fn new(model: Model, method: Method, outcome: Outcome, shift: T, probability: T) -> Self {
        Self { model, method, outcome, shift, probability, residuals: BTreeMap::new() }
    }

    pub fn with_residual(mut self, name: &str, value: T) -> Self {
        self.residuals.insert(name.to_owned(), value);
        self
    }
}
