use super::{parse_model, DslError};
use crate::graph::Graph;

pub const BUILTIN_NAMES: [&str; 3] = ["simple", "piston", "multipoint"];

const SIMPLE: &str = "\
# f = cos(u1) + exp(-u2)
input u1 ~ Normal(0, 1)
input u2 ~ Normal(0, 1)
output f = cos(u1) + exp(-u2)
";

const PISTON: &str = "\
# Piston cycle time C in seconds.
input M ~ Normal(50, 10)         # piston weight (kg)
input S ~ Normal(0.01, 0.005)    # piston surface area (m^2)
input V0 ~ Normal(0.005, 0.002)  # initial gas volume (m^3)
param k_spring = 3000            # spring coefficient (N/m)
param P0 = 100000                # atmospheric pressure (N/m^2)
param Ta = 293                   # ambient temperature (K)
param T0 = 350                   # filling gas temperature (K)
A = P0 * S + 19.62 * M - k_spring * V0 / S
V = S / (2 * k_spring) * (sqrt(A ^ 2 + 4 * k_spring * (P0 * V0 / T0) * Ta) - A)
output C = 2 * pi * sqrt(M / (k_spring + S ^ 2 * P0 * V0 * Ta / (T0 * V ^ 2)))
";

// Two independent segments, each a 20-operation expansion of
// g(v) = exp(sin(v)) * v^2 + log(1 + v^2).
const MULTIPOINT: &str = "\
input v1 ~ Normal(0.3, 0.03)
input v2 ~ Normal(0.5, 0.05)

h1 = v1 - v1 / 2
s1 = 2 * sin(h1) * cos(h1)
e1 = exp(s1 / 2) * exp(s1 / 2)
q1 = (v1 + v1) * v1 / 2
lift1 = e1 * q1
w1 = sqrt(v1 ^ 4)
drag1 = log(1 + w1)
g1 = lift1 + drag1

h2 = v2 - v2 / 2
s2 = 2 * sin(h2) * cos(h2)
e2 = exp(s2 / 2) * exp(s2 / 2)
q2 = (v2 + v2) * v2 / 2
lift2 = e2 * q2
w2 = sqrt(v2 ^ 4)
drag2 = log(1 + w2)
g2 = lift2 + drag2

output f = g1 + g2
";

/// Source text of a builtin model.
pub fn builtin_source(name: &str) -> Result<&'static str, DslError> {
    match name {
        "simple" => Ok(SIMPLE),
        "piston" => Ok(PISTON),
        "multipoint" => Ok(MULTIPOINT),
        other => Err(DslError::UnknownModel(other.to_string())),
    }
}

pub fn builtin_model(name: &str) -> Result<Graph, DslError> {
    parse_model(builtin_source(name)?)
}
