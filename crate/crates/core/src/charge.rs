//! Round charges for subroutines run as sequential oracles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs a formula may read; unused fields stay zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChargeInputs {
    pub n: f64,
    pub m: f64,
    pub d: f64,
    pub l: f64,
    pub k: f64,
    pub eps: f64,
    pub phi: f64,
    pub lambda: f64,
    /// Pre-measured rounds, for `Measured`.
    pub rounds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Formula {
    /// `c * (D + sqrt(n * l)) * ceil(log2 n)`
    CSlotMst { c: f64 },
    /// `c * (sqrt(n) * (log* n)^a + D) * eps^-b * ceil(log2 n)^e`
    LambdaEstimate { c: f64, a: f64, b: f64, e: f64 },
    /// `c * (sqrt(n) * log* n + D) * lambda^4 * ceil(log2 n)^2`
    LambdaExact { c: f64 },
    /// `D + c * log2(m)^a / phi^b`
    LowConductance { c: f64, a: f64, b: f64 },
    /// `c * D + 1`
    Diameter { c: f64 },
    /// `c * n^(1 - gamma + 10 rho)`, the tripartition bound with `gamma = eps`
    /// and `rho = eps / 11` read from `eps`
    Tripartition { c: f64 },
    /// `k + D * ceil(log2(k + 2))`, `k` the number of trimmed nodes
    Trim,
    /// `c * n * ceil(log2 n)^2.2`
    TreeCutExact { c: f64 },
    /// the supplied `rounds`
    Measured,
}

impl Formula {
    pub fn describe(&self) -> String {
        match self {
            Formula::CSlotMst { c } => format!("{c} * (D + sqrt(n*l)) * ceil(log2 n)"),
            Formula::LambdaEstimate { c, a, b, e } => {
                format!("{c} * (sqrt(n) * (log* n)^{a} + D) * eps^-{b} * ceil(log2 n)^{e}")
            }
            Formula::LambdaExact { c } => format!("{c} * (sqrt(n) * log* n + D) * lambda^4 * ceil(log2 n)^2"),
            Formula::LowConductance { c, a, b } => format!("D + {c} * log2(m)^{a} / phi^{b}"),
            Formula::Diameter { c } => format!("{c} * D + 1"),
            Formula::Tripartition { c } => format!("{c} * n^(1 - eps + 10 eps / 11)"),
            Formula::Trim => "k + D * ceil(log2(k + 2))".into(),
            Formula::TreeCutExact { c } => format!("{c} * n * ceil(log2 n)^2.2"),
            Formula::Measured => "measured".into(),
        }
    }

    pub fn evaluate(&self, x: &ChargeInputs) -> f64 {
        let lg = x.n.max(2.0).log2().ceil();
        match *self {
            Formula::CSlotMst { c } => c * (x.d + (x.n * x.l).sqrt()) * lg,
            Formula::LambdaEstimate { c, a, b, e } => {
                c * (x.n.sqrt() * log_star(x.n).powf(a) + x.d) * x.eps.powf(-b) * lg.powf(e)
            }
            Formula::LambdaExact { c } => c * (x.n.sqrt() * log_star(x.n) + x.d) * x.lambda.powi(4) * lg * lg,
            Formula::LowConductance { c, a, b } => x.d + c * x.m.max(2.0).log2().powf(a) / x.phi.powf(b),
            Formula::Diameter { c } => c * x.d + 1.0,
            Formula::Tripartition { c } => c * x.n.powf(1.0 - x.eps + 10.0 * x.eps / 11.0),
            Formula::Trim => x.k + x.d * (x.k + 2.0).log2().ceil(),
            Formula::TreeCutExact { c } => c * x.n * lg.powf(2.2),
            Formula::Measured => x.rounds,
        }
    }
}

/// Iterations of `log2` until the value drops to 1 or below.
pub fn log_star(x: f64) -> f64 {
    let mut v = x;
    let mut k = 0.0;
    while v > 1.0 {
        v = v.log2();
        k += 1.0;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub label: String,
    pub formula: String,
    pub inputs: ChargeInputs,
    pub rounds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeRegistry {
    pub formulas: BTreeMap<String, Formula>,
}

impl Default for ChargeRegistry {
    fn default() -> Self {
        let mut f = BTreeMap::new();
        f.insert("c_slot_mst".into(), Formula::CSlotMst { c: 1.0 });
        f.insert("lambda_estimate".into(), Formula::LambdaEstimate { c: 1.0, a: 1.0, b: 5.0, e: 3.0 });
        f.insert("lambda_exact".into(), Formula::LambdaExact { c: 1.0 });
        f.insert("low_conductance".into(), Formula::LowConductance { c: 1.0, a: 9.0, b: 10.0 });
        f.insert("diameter".into(), Formula::Diameter { c: 2.0 });
        f.insert("trim".into(), Formula::Trim);
        f.insert("tripartition".into(), Formula::Tripartition { c: 1.0 });
        f.insert("tree_cut_exact".into(), Formula::TreeCutExact { c: 1.0 });
        f.insert("measured".into(), Formula::Measured);
        ChargeRegistry { formulas: f }
    }
}

impl ChargeRegistry {
    pub fn charge(&self, label: &str, inputs: ChargeInputs) -> Result<Charge> {
        let f = self.formulas.get(label).ok_or_else(|| Error::UnknownCharge(label.into()))?;
        let v = f.evaluate(&inputs);
        let rounds = if v.is_nan() { 0.0 } else { v.max(0.0).ceil() };
        Ok(Charge { label: label.into(), formula: f.describe(), inputs, rounds })
    }

    /// Charges a registered formula under a different stage label.
    pub fn charge_as(&self, formula: &str, label: &str, inputs: ChargeInputs) -> Result<Charge> {
        let mut c = self.charge(formula, inputs)?;
        c.label = label.into();
        Ok(c)
    }
}
