//! Built-in benchmark library.

use super::neural::{controller_model, Controller, Weights};
use super::{parse_model, InitialSet, ModelError, OdeSystem};
use crate::reachtube::RunConfig;

/// Published average volumes for orders 1 and 4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceVolume {
    pub order1: f64,
    pub order4: f64,
}

#[derive(Clone, Debug)]
pub struct Benchmark {
    /// Short label, e.g. `B` or `C-N`.
    pub label: &'static str,
    pub system: OdeSystem,
    pub initial: InitialSet,
    pub dt: f64,
    pub horizon: f64,
    pub reference: Option<ReferenceVolume>,
    /// Needs trained weights; ships with placeholders.
    pub neural: Option<Controller>,
}

impl Benchmark {
    pub fn name(&self) -> &str {
        self.system.name()
    }

    pub fn run_config(&self, order: u32) -> RunConfig {
        RunConfig::new(self.initial.clone(), self.dt, self.horizon)
            .with_order(order)
            .with_time_index(self.system.time_index())
    }

    /// Replaces placeholder controller weights.
    pub fn with_weights(mut self, weights: &Weights) -> Result<Self, ModelError> {
        let kind = self
            .neural
            .ok_or_else(|| ModelError::Weights(format!("{} has no neural controller", self.name())))?;
        let name = self.name().to_string();
        self.system = controller_model(kind, weights)?.with_name(name);
        Ok(self)
    }
}

pub const BRUSSELATOR: &str = "\
x1' = 1 + x1^2*x2 - 2.5*x1
x2' = 1.5*x1 - x1^2*x2
";

pub const VAN_DER_POL: &str = "\
x1' = x2
x2' = (x1^2 - 1)*x2 - x1
";

pub const ROBOTARM: &str = "\
x1' = x3
x2' = x4
x3' = (-2*x2*x3*x4 - 2*x1 - 2*x3)/(x2^2 + 1) + 4/(x2^2 + 1)
x4' = x2*x3^2 - x2 - x4 + 1
";

pub const DUBINS: &str = "\
x1' = cos(x3)
x2' = sin(x3)
x3' = x1*sin(x4)
x4' = 1
time x4
";

pub const MITCHELL_SCHAEFFER: &str = "\
x1' = x2*x1^2*(1 - x1)/0.3 - x1/6
x2' = 0.5*(1 + tanh(50*x1 - 5))*(-x2/150) + (1 - 0.5*(1 + tanh(50*x1 - 5)))*(1 - x2)/20
";

/// State `(σ, w, x, θ)`; `M = 1`, `m = 0.001`, `g = 9.81`, `l = 1`,
/// force `f = -1.1 M g θ - σ`.
pub const CARTPOLE: &str = "\
x1' = ((-1.1*9.81*x4 - x1)*cos(x4) - 0.001*x1^2*cos(x4)*sin(x4) + 1.001*9.81*sin(x4)) / (1 + 0.001*sin(x4)^2)
x2' = ((-1.1*9.81*x4 - x1) + 0.001*sin(x4)*(-x1^2 + 9.81*cos(x4))) / (1 + 0.001*sin(x4)^2)
x3' = x2
x4' = x1
";

/// State `(pn, pe, h, u, v, w, q0, q1, q2, q3, p, q, r, pI, qI, rI, hI)`.
pub const QUADCOPTER: &str = "\
x1' = 2*x4*(x7^2 + x8^2 - 0.5) - 2*x5*(x7*x10 - x8*x9) + 2*x6*(x7*x9 + x8*x10)
x2' = 2*x5*(x7^2 + x9^2 - 0.5) + 2*x4*(x7*x10 + x8*x9) - 2*x6*(x7*x8 - x9*x10)
x3' = 2*x6*(x7^2 + x10^2 - 0.5) - 2*x4*(x7*x9 - x8*x10) + 2*x5*(x7*x8 + x9*x10)
x4' = x13*x5 - x12*x6 - 11.62*(x7*x9 - x8*x10)
x5' = x11*x6 - x13*x4 + 11.62*(x7*x8 + x9*x10)
x6' = x12*x4 - x11*x5 + 11.62*(x7^2 + x10^2 - 0.5)
x7' = -0.5*x8*x11 - 0.5*x9*x12 - 0.5*x10*x13
x8' = 0.5*x7*x11 - 0.5*x10*x12 + 0.5*x9*x13
x9' = 0.5*x10*x11 + 0.5*x7*x12 - 0.5*x8*x13
x10' = 0.5*x8*x12 - 0.5*x9*x11 + 0.5*x7*x13
x11' = (-40.0006326*x14 - 2.82839798295*x11) - 1.1334074237*x12*x13
x12' = (-39.9998045*x15 - 2.82837525410*x12) + 1.1320781796*x11*x13
x13' = (-39.9997891*x16 - 2.82841342233*x13) - 0.00469522*x11*x12
x14' = x11
x15' = x12
x16' = x13
x17' = x3
";

fn quadcopter_initial() -> InitialSet {
    let mut c = vec![-0.995; 17];
    let mut r = vec![0.005; 17];
    c[2] = 9.005;
    for j in 6..10 {
        c[j] = 0.0;
        r[j] = 0.0;
    }
    c[9] = 1.0;
    for j in 13..17 {
        c[j] = 0.0;
        r[j] = 0.0;
    }
    InitialSet::new(c, &r).expect("valid initial set")
}

fn cartpole_neural_center() -> Vec<f64> {
    let mut c = vec![0.0; 12];
    c[3] = 0.001;
    c
}

#[allow(clippy::too_many_arguments)]
fn make(
    label: &'static str,
    name: &str,
    text: &str,
    center: Vec<f64>,
    r: f64,
    dt: f64,
    horizon: f64,
    reference: Option<(f64, f64)>,
) -> Benchmark {
    let system = parse_model(text).expect("built-in model parses").with_name(name);
    Benchmark {
        label,
        system,
        initial: InitialSet::new(center, &[r]).expect("valid initial set"),
        dt,
        horizon,
        reference: reference.map(|(order1, order4)| ReferenceVolume { order1, order4 }),
        neural: None,
    }
}

fn neural(label: &'static str, name: &str, kind: Controller, dt: f64, horizon: f64) -> Benchmark {
    let system = controller_model(kind, &Weights::placeholder(kind))
        .expect("placeholder controller parses")
        .with_name(name);
    Benchmark {
        label,
        system,
        initial: InitialSet::new(cartpole_neural_center(), &[1e-4]).expect("valid initial set"),
        dt,
        horizon,
        reference: None,
        neural: Some(kind),
    }
}

/// All nine benchmarks in table order.
pub fn builtin_benchmarks() -> Vec<Benchmark> {
    let mut quad = make("Q", "quadcopter", QUADCOPTER, vec![0.0; 17], 0.005, 1e-4, 2.0, Some((3.21e-54, 9.31e-56)));
    quad.initial = quadcopter_initial();
    vec![
        make("B", "brusselator", BRUSSELATOR, vec![1.0, 1.0], 0.01, 0.01, 9.0, Some((1.5e-4, 1.4e-4))),
        make("V", "vanderpol", VAN_DER_POL, vec![-1.0, -1.0], 0.01, 0.01, 40.0, Some((4.2e-4, 4.1e-4))),
        make(
            "R",
            "robotarm",
            ROBOTARM,
            vec![1.505, 1.505, 0.005, 0.005],
            0.005,
            0.01,
            40.0,
            Some((8e-11, 7.9e-11)),
        ),
        make("D", "dubins", DUBINS, vec![0.0, 0.0, 0.7854, 0.0], 0.01, 0.00125, 15.0, Some((0.132, 0.131))),
        make("M", "mitchell-schaeffer", MITCHELL_SCHAEFFER, vec![0.8, 0.5], 1e-4, 0.01, 10.0, Some((3.8e-9, 3.7e-9))),
        make("C", "cartpole", CARTPOLE, vec![0.0, 0.0, 0.0, 0.001], 1e-4, 0.001, 10.0, Some((8.4e-17, 7.2e-17))),
        quad,
        neural("C-N", "cartpole-node", Controller::NeuralOde, 1e-5, 1.0),
        neural("C-L", "cartpole-ltc", Controller::Ltc, 1e-6, 0.35),
    ]
}

/// Looks a benchmark up by label or name (case-insensitive).
pub fn find_benchmark(key: &str) -> Option<Benchmark> {
    builtin_benchmarks()
        .into_iter()
        .find(|b| b.label.eq_ignore_ascii_case(key) || b.name().eq_ignore_ascii_case(key))
}
