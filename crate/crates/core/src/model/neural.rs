//! Cartpole closed-loop models with continuous-time neural controllers.
//!
//! The controllers unroll into ordinary model text, so the resulting systems
//! go through the same parser, differentiator and interval evaluator as every
//! other model. Weights come from a plain-text file made of blocks
//!
//! ```text
//! W 8 4
//! 0.1 -0.2 0.3 0.0
//! ...
//! ```
//!
//! i.e. a `NAME ROWS COLS` header followed by `ROWS` lines of `COLS` numbers.

use std::collections::BTreeMap;
use std::fmt::Write;

use nalgebra::DMatrix;

use super::{parse_model, ModelError, OdeSystem};

pub const NEURONS: usize = 8;
/// Cartpole observation `(x, w, θ, σ)`.
pub const INPUTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Controller {
    /// `h' = -h + tanh(W y + V h + b)`, `F = 10 tanh(U h + c)`.
    NeuralOde,
    /// Liquid time-constant network with sensory and recurrent synapses.
    Ltc,
}

impl Controller {
    /// Block names and shapes expected in a weights file.
    pub fn blocks(self) -> &'static [(&'static str, usize, usize)] {
        match self {
            Controller::NeuralOde => &[
                ("W", NEURONS, INPUTS),
                ("V", NEURONS, NEURONS),
                ("b", NEURONS, 1),
                ("U", 1, NEURONS),
                ("c", 1, 1),
            ],
            Controller::Ltc => &[
                ("cm", NEURONS, 1),
                ("gleak", NEURONS, 1),
                ("vleak", NEURONS, 1),
                ("w", NEURONS, NEURONS),
                ("E", NEURONS, NEURONS),
                ("sigma", NEURONS, NEURONS),
                ("mu", NEURONS, NEURONS),
                ("sw", NEURONS, INPUTS),
                ("sE", NEURONS, INPUTS),
                ("ssigma", NEURONS, INPUTS),
                ("smu", NEURONS, INPUTS),
                ("a", 1, NEURONS),
                ("b", 1, 1),
            ],
        }
    }
}

/// Named weight matrices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Weights {
    blocks: BTreeMap<String, DMatrix<f64>>,
}

impl Weights {
    /// All-zero weights (unit membrane capacitance and leak for the LTC)
    /// so the model structure can be exercised without trained parameters.
    pub fn placeholder(kind: Controller) -> Self {
        let mut blocks = BTreeMap::new();
        for &(name, r, c) in kind.blocks() {
            let fill = if matches!(name, "cm" | "gleak") { 1.0 } else { 0.0 };
            blocks.insert(name.to_string(), DMatrix::from_element(r, c, fill));
        }
        Self { blocks }
    }

    pub fn get(&self, name: &str) -> Option<&DMatrix<f64>> {
        self.blocks.get(name)
    }

    pub fn insert(&mut self, name: &str, m: DMatrix<f64>) {
        self.blocks.insert(name.to_string(), m);
    }

    fn check(&self, kind: Controller) -> Result<(), ModelError> {
        for &(name, r, c) in kind.blocks() {
            let m = self
                .blocks
                .get(name)
                .ok_or_else(|| ModelError::Weights(format!("missing block `{name}`")))?;
            if m.shape() != (r, c) {
                return Err(ModelError::Weights(format!(
                    "block `{name}` is {}x{}, expected {r}x{c}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut blocks = BTreeMap::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        while let Some((line, header)) = lines.next() {
            let parts: Vec<&str> = header.split_whitespace().collect();
            let bad = || ModelError::Weights(format!("line {line}: expected `NAME ROWS COLS`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let rows: usize = parts[1].parse().map_err(|_| bad())?;
            let cols: usize = parts[2].parse().map_err(|_| bad())?;
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (line, row) = lines.next().ok_or_else(|| {
                    ModelError::Weights(format!("block `{}` ends early", parts[0]))
                })?;
                let vals: Vec<f64> = row
                    .split_whitespace()
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ModelError::Weights(format!("line {line}: invalid number")))?;
                if vals.len() != cols || vals.iter().any(|v| !v.is_finite()) {
                    return Err(ModelError::Weights(format!(
                        "line {line}: expected {cols} finite values"
                    )));
                }
                data.extend(vals);
            }
            if blocks
                .insert(parts[0].to_string(), DMatrix::from_row_slice(rows, cols, &data))
                .is_some()
            {
                return Err(ModelError::Weights(format!("duplicate block `{}`", parts[0])));
            }
        }
        Ok(Self { blocks })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, m) in &self.blocks {
            let _ = writeln!(s, "{name} {} {}", m.nrows(), m.ncols());
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?}", m[(i, j)])).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        s
    }
}

fn lit(v: f64) -> String {
    format!("({v:?})")
}

// Observation y = (x, w, θ, σ) in terms of state variables x1..x4 = (σ, w, x, θ).
const OBS: [&str; INPUTS] = ["x3", "x2", "x4", "x1"];

fn neuron(i: usize) -> String {
    format!("x{}", INPUTS + i + 1)
}

/// Gym cartpole dynamics driven by the force expression `force`.
fn cartpole_text(force: &str) -> String {
    let (g, mc, m, l) = ("9.81", "1", "0.1", "0.5");
    let acc = format!(
        "({g}*sin(x4) + cos(x4)*((-({force}) - {m}*{l}*x1^2*sin(x4))/({mc} + {m}))) \
         / ({l}*(4/3 - {m}*cos(x4)^2/({mc} + {m})))"
    );
    format!(
        "x1' = {acc}\n\
         x2' = (({force}) + {m}*{l}*(x1^2*sin(x4) - ({acc})*cos(x4)))/({mc} + {m})\n\
         x3' = x2\n\
         x4' = x1\n"
    )
}

fn neural_ode_text(wt: &Weights) -> String {
    let (w, v, b, u, c) = (
        &wt.blocks["W"],
        &wt.blocks["V"],
        &wt.blocks["b"],
        &wt.blocks["U"],
        &wt.blocks["c"],
    );
    let mut force = format!("10*tanh({}", lit(c[(0, 0)]));
    for j in 0..NEURONS {
        let _ = write!(force, " + {}*{}", lit(u[(0, j)]), neuron(j));
    }
    force.push(')');
    let mut s = cartpole_text(&force);
    for i in 0..NEURONS {
        let mut pre = lit(b[(i, 0)]);
        for (k, y) in OBS.iter().enumerate() {
            let _ = write!(pre, " + {}*{y}", lit(w[(i, k)]));
        }
        for j in 0..NEURONS {
            let _ = write!(pre, " + {}*{}", lit(v[(i, j)]), neuron(j));
        }
        let _ = writeln!(s, "{}' = -{} + tanh({pre})", neuron(i), neuron(i));
    }
    s
}

fn synapse(w: f64, e: f64, sigma: f64, mu: f64, pre: &str, post: &str) -> String {
    format!(
        "{}*({} - {post})/(1 + exp(-{}*({pre} + {})))",
        lit(w),
        lit(e),
        lit(sigma),
        lit(mu)
    )
}

fn ltc_text(wt: &Weights) -> String {
    let p = |n: &str| &wt.blocks[n];
    let a = p("a");
    let mut force = format!("10*tanh({}", lit(p("b")[(0, 0)]));
    for j in 0..NEURONS {
        let _ = write!(force, " + {}*{}", lit(a[(0, j)]), neuron(j));
    }
    force.push(')');
    let mut s = cartpole_text(&force);
    for i in 0..NEURONS {
        let vi = neuron(i);
        let mut sum = format!("{}*({} - {vi})", lit(p("gleak")[(i, 0)]), lit(p("vleak")[(i, 0)]));
        for (k, y) in OBS.iter().enumerate() {
            let _ = write!(
                sum,
                " + {}",
                synapse(p("sw")[(i, k)], p("sE")[(i, k)], p("ssigma")[(i, k)], p("smu")[(i, k)], y, &vi)
            );
        }
        for j in 0..NEURONS {
            let _ = write!(
                sum,
                " + {}",
                synapse(p("w")[(i, j)], p("E")[(i, j)], p("sigma")[(i, j)], p("mu")[(i, j)], &neuron(j), &vi)
            );
        }
        let _ = writeln!(s, "{vi}' = ({sum}) / {}", lit(p("cm")[(i, 0)]));
    }
    s
}

/// Model text of the 12-dimensional closed loop; state `(σ, w, x, θ, h1..h8)`.
pub fn controller_model_text(kind: Controller, weights: &Weights) -> Result<String, ModelError> {
    weights.check(kind)?;
    Ok(match kind {
        Controller::NeuralOde => neural_ode_text(weights),
        Controller::Ltc => ltc_text(weights),
    })
}

pub fn controller_model(kind: Controller, weights: &Weights) -> Result<OdeSystem, ModelError> {
    parse_model(&controller_model_text(kind, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholder_models_parse() {
        for kind in [Controller::NeuralOde, Controller::Ltc] {
            let sys = controller_model(kind, &Weights::placeholder(kind)).unwrap();
            assert_eq!(sys.dim(), 12);
            let mut x = vec![0.0; 12];
            x[3] = 0.001;
            assert!(sys.eval_rhs(&x).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn neural_ode_neuron_equation() {
        let mut w = Weights::placeholder(Controller::NeuralOde);
        let mut b = DMatrix::zeros(NEURONS, 1);
        b[(0, 0)] = 0.5;
        w.insert("b", b);
        let sys = controller_model(Controller::NeuralOde, &w).unwrap();
        let x = vec![0.0; 12];
        assert!((sys.eval_rhs(&x)[4] - 0.5f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn weights_text_round_trip() {
        let mut w = Weights::placeholder(Controller::Ltc);
        w.insert("b", DMatrix::from_element(1, 1, -0.25));
        assert_eq!(Weights::parse(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn weights_shape_checked() {
        let mut w = Weights::placeholder(Controller::NeuralOde);
        w.insert("W", DMatrix::zeros(4, 8));
        assert!(matches!(
            controller_model(Controller::NeuralOde, &w),
            Err(ModelError::Weights(_))
        ));
        assert!(Weights::parse("W 2 2\n1 2\n").is_err());
    }
}
