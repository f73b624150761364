//! Leading-order communication predictions for the three simulation
//! protocols under the general, k-local and nearest-neighbour models, with
//! unit constants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostModel {
    General,
    Klocal,
    Nn,
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::General => "general",
            CostModel::Klocal => "klocal",
            CostModel::Nn => "nn",
        })
    }
}

impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(CostModel::General),
            "klocal" | "k-local" => Ok(CostModel::Klocal),
            "nn" => Ok(CostModel::Nn),
            _ => Err(Error::Config(format!("unknown cost model {s:?}"))),
        }
    }
}

/// Inputs of the table rows; each model reads only the fields it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub gamma: Option<f64>,
    /// Qubits per node.
    pub n: Option<f64>,
    /// Interaction terms `|E|`.
    pub edges: Option<f64>,
    /// `α = ‖H‖₁`.
    pub alpha: Option<f64>,
    /// Nested-commutator norm `α̃_comm,p`.
    pub alpha_comm: Option<f64>,
    /// Induced 1-norm `|||H|||₁`.
    pub induced_norm: Option<f64>,
    pub k: Option<f64>,
    pub p: Option<f64>,
    pub t: Option<f64>,
    pub eps: Option<f64>,
}

impl CostParams {
    pub const NAMES: [&'static str; 10] = [
        "gamma",
        "n",
        "edges",
        "alpha",
        "alpha_comm",
        "induced_norm",
        "k",
        "p",
        "t",
        "eps",
    ];

    fn slot(&mut self, name: &str) -> Result<&mut Option<f64>> {
        Ok(match name {
            "gamma" => &mut self.gamma,
            "n" => &mut self.n,
            "edges" => &mut self.edges,
            "alpha" => &mut self.alpha,
            "alpha_comm" => &mut self.alpha_comm,
            "induced_norm" => &mut self.induced_norm,
            "k" => &mut self.k,
            "p" => &mut self.p,
            "t" => &mut self.t,
            "eps" => &mut self.eps,
            _ => return Err(Error::Config(format!("unknown cost parameter {name:?}"))),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        *self.slot(name)? = Some(value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.clone()
            .slot(name)?
            .ok_or_else(|| Error::Config(format!("missing cost parameter {name}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostRow {
    pub protocol: &'static str,
    pub model: CostModel,
    pub value: f64,
    pub formula: &'static str,
    /// Parameter whose doubling the row's scaling is quoted against.
    pub driver: &'static str,
}

/// `ln x / ln ln x`, the Taylor-order factor.
pub fn taylor_log_factor(x: f64) -> Result<f64> {
    if !(x >= std::f64::consts::E.exp()) {
        return Err(Error::Domain(format!("asymptotic Taylor factor needs αt/ε ≥ e^e, got {x}")));
    }
    Ok(x.ln() / x.ln().ln())
}

struct Inputs<'a>(&'a CostParams);

impl Inputs<'_> {
    fn get(&self, name: &str) -> Result<f64> {
        let v = self.0.get(name)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Domain(format!("cost parameter {name} = {v}")));
        }
        Ok(v)
    }

    fn positive(&self, name: &str) -> Result<f64> {
        let v = self.get(name)?;
        if v <= 0.0 {
            return Err(Error::Domain(format!("cost parameter {name} must be positive")));
        }
        Ok(v)
    }

    fn trotter_time(&self) -> Result<f64> {
        let p = self.positive("p")?;
        let t = self.get("t")?;
        let eps = self.positive("eps")?;
        Ok(t.powf(1.0 + 1.0 / p) / eps.powf(1.0 / p))
    }

    fn taylor(&self) -> Result<f64> {
        let at = self.get("alpha")? * self.get("t")?;
        if at == 0.0 {
            return Ok(0.0);
        }
        Ok(at * taylor_log_factor(at / self.positive("eps")?)?)
    }

    fn qsp(&self) -> Result<f64> {
        Ok(self.get("alpha")? * self.get("t")? + (1.0 / self.positive("eps")?).ln())
    }
}

fn row(protocol: &'static str, model: CostModel, value: f64, formula: &'static str, driver: &'static str) -> CostRow {
    CostRow {
        protocol,
        model,
        value,
        formula,
        driver,
    }
}

/// One row per protocol. A single node never communicates, so `Γ = 1`
/// predicts 0 everywhere.
pub fn cost_table(model: CostModel, params: &CostParams) -> Result<Vec<CostRow>> {
    let x = Inputs(params);
    let gamma = x.positive("gamma")?;
    let mut rows = match model {
        CostModel::General => {
            let e = x.get("edges")?;
            let p = x.positive("p")?;
            let w = (e + gamma).log2();
            vec![
                row(
                    "d-PF",
                    model,
                    gamma * x.get("alpha_comm")?.powf(1.0 / p) * e * x.trotter_time()?,
                    "Γ·α̃^(1/p)·|E|·t^(1+1/p)/ε^(1/p)",
                    "t",
                ),
                row("d-TS", model, w * gamma * x.taylor()?, "log(|E|+Γ)·Γ·αt·log(αt/ε)/loglog(αt/ε)", "t"),
                row("d-QSP", model, w * gamma * x.qsp()?, "log(|E|+Γ)·Γ·(αt + log(1/ε))", "t"),
            ]
        }
        CostModel::Klocal => {
            let k = x.positive("k")?;
            let n = x.positive("n")?;
            let p = x.positive("p")?;
            let w = k * (gamma * n).log2();
            vec![
                row(
                    "d-PF",
                    model,
                    k.min(gamma)
                        * (gamma * n).powf(k)
                        * x.get("induced_norm")?
                        * x.get("alpha")?.powf(1.0 / p)
                        * x.trotter_time()?,
                    "min(k,Γ)·(Γn)^k·|||H|||₁·α^(1/p)·t^(1+1/p)/ε^(1/p)",
                    "t",
                ),
                row("d-TS", model, w * gamma * x.taylor()?, "k·log(Γn)·Γ·αt·log(αt/ε)/loglog(αt/ε)", "t"),
                row("d-QSP", model, w * gamma * x.qsp()?, "k·log(Γn)·Γ·(αt + log(1/ε))", "t"),
            ]
        }
        CostModel::Nn => {
            let p = x.positive("p")?;
            vec![
                row(
                    "d-PF",
                    model,
                    gamma.powf(1.0 + 1.0 / p) * x.trotter_time()?,
                    "Γ^(1+1/p)·t^(1+1/p)/ε^(1/p)",
                    "gamma",
                ),
                row("d-TS", model, gamma.log2() * gamma * x.taylor()?, "log(Γ)·Γ·αt·log(αt/ε)/loglog(αt/ε)", "t"),
                row("d-QSP", model, gamma.log2() * gamma * x.qsp()?, "log(Γ)·Γ·(αt + log(1/ε))", "t"),
            ]
        }
    };
    if gamma == 1.0 {
        rows.iter_mut().for_each(|r| r.value = 0.0);
    }
    Ok(rows)
}
