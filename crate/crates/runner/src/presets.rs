//! Named parameter sets for the published scenarios.
//!
//! Each preset is a complete configuration written in the same TOML schema
//! as a config file, so `sgdec presets --show NAME` prints something that
//! can be saved and edited.

use crate::config::{from_table, ConfigError, SimulationConfig};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

impl Preset {
    pub fn table(&self) -> toml::Table {
        toml::from_str(self.toml).unwrap_or_else(|e| panic!("preset {} does not parse: {e}", self.name))
    }

    pub fn config(&self) -> Result<SimulationConfig, ConfigError> {
        from_table(self.table(), None)
    }
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn all() -> &'static [Preset] {
    PRESETS
}

pub static PRESETS: &[Preset] = &[
    Preset {
        name: "bare_fluxon",
        summary: "single fluxon bouncing in a closed unbiased junction, L=100, u=0.55, T=50000",
        toml: r#"
schema_version = 1
name = "bare_fluxon"
t_max = 50000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg" }
ic = { kind = "kink", x0 = 0.0, u = 0.55 }
probes = [
    { name = "V_left", x = -50.0, quantity = "phi_t" },
    { name = "V_right", x = 50.0, quantity = "phi_t" },
]
probe_every = 25
energy = { every = 2500 }
"#,
    },
    Preset {
        name: "fluxon_biased_boundary",
        summary: "single fluxon with boundary bias eta=0.002, xi=0.006, L=100, u=0.55, T=50000",
        toml: r#"
schema_version = 1
name = "fluxon_biased_boundary"
t_max = 50000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg" }
ic = { kind = "kink", x0 = 0.0, u = 0.55 }
boundaries.left = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
boundaries.right = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
probes = [{ name = "V_right", x = 50.0, quantity = "phi_t" }]
probe_every = 25
"#,
    },
    Preset {
        name: "vortex_antivortex",
        summary: "vortex-antivortex pair, d=66, u=0.55, L=100",
        toml: r#"
schema_version = 1
name = "vortex_antivortex"
t_max = 1000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg" }
ic = { kind = "kink_antikink_pair", x0 = 0.0, u = 0.55, d = 66.0 }
probes = [{ name = "H_center", x = 0.0, quantity = "phi_x" }]
probe_every = 25
energy = { every = 250 }
"#,
    },
    Preset {
        name: "breather_travelling",
        summary: "breather travelling at u=0.55 in a closed junction, L=100",
        toml: r#"
schema_version = 1
name = "breather_travelling"
t_max = 1000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg" }
ic = { kind = "breather", nu = 0.5, x0 = 0.0, u = 0.55 }
probes = [{ name = "V_center", x = 0.0, quantity = "phi_t" }]
probe_every = 25
energy = { every = 250 }
"#,
    },
    Preset {
        name: "dissipative_fluxon",
        summary: "fluxon with loss alpha=0.003, boundary bias eta=0.002, xi=0.006, T=1000",
        toml: r#"
schema_version = 1
name = "dissipative_fluxon"
t_max = 1000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.003 }
ic = { kind = "kink", x0 = 0.0, u = 0.55 }
boundaries.left = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
boundaries.right = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
probes = [{ name = "V_right", x = 50.0, quantity = "phi_t" }]
probe_every = 25
"#,
    },
    Preset {
        name: "dissipative_fluxon_strong",
        summary: "fluxon with heavy loss alpha=0.03 that stops before the boundary, T=1000",
        toml: r#"
schema_version = 1
name = "dissipative_fluxon_strong"
t_max = 1000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.03 }
ic = { kind = "kink", x0 = 0.0, u = 0.55 }
boundaries.left = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
boundaries.right = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
probes = [{ name = "V_center", x = 0.0, quantity = "phi_t" }]
probe_every = 25
"#,
    },
    Preset {
        name: "dissipative_fluxon_biased",
        summary: "fluxon with loss alpha=0.003 and bias beta=0.001, T=1000",
        toml: r#"
schema_version = 1
name = "dissipative_fluxon_biased"
t_max = 1000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.003, beta = 0.001 }
ic = { kind = "kink", x0 = 0.0, u = 0.55 }
boundaries.left = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
boundaries.right = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
probes = [{ name = "V_right", x = 50.0, quantity = "phi_t" }]
probe_every = 25
"#,
    },
    Preset {
        name: "dissipative_breather",
        summary: "travelling breather with loss alpha=0.003, T=1000",
        toml: r#"
schema_version = 1
name = "dissipative_breather"
t_max = 1000.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.003 }
ic = { kind = "breather", nu = 0.5, x0 = 0.0, u = 0.55 }
boundaries.left = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
boundaries.right = { kind = "neumann_bias", eta = 0.002, xi = 0.006 }
probe_every = 25
"#,
    },
    Preset {
        name: "lossy_pair_slow",
        summary: "vortex-antivortex pair at u=0.4 with loss alpha=0.003, T=1500",
        toml: r#"
schema_version = 1
name = "lossy_pair_slow"
t_max = 1500.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.003 }
ic = { kind = "kink_antikink_pair", x0 = 0.0, u = 0.4, d = 66.0 }
probes = [{ name = "H_center", x = 0.0, quantity = "phi_x" }]
probe_every = 25
energy = { every = 250 }
"#,
    },
    Preset {
        name: "lossy_pair_fast",
        summary: "vortex-antivortex pair at u=0.55 with loss alpha=0.003, T=1500",
        toml: r#"
schema_version = 1
name = "lossy_pair_fast"
t_max = 1500.0
grid = { length = 100.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.003 }
ic = { kind = "kink_antikink_pair", x0 = 0.0, u = 0.55, d = 66.0 }
probes = [{ name = "H_center", x = 0.0, quantity = "phi_x" }]
probe_every = 25
energy = { every = 250 }
"#,
    },
    Preset {
        name: "microshort_repelled",
        summary: "antifluxon at terminal speed 0.3 (alpha=0.005, beta=0.002) pinned in front of a microshort",
        toml: r#"
schema_version = 1
name = "microshort_repelled"
t_max = 1500.0
grid = { length = 40.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.005, beta = 0.002, microshorts = [{ x = -10.0, mu = 0.5 }] }
ic = { kind = "kink", x0 = 10.0, u = -0.3, polarity = -1 }
probes = [{ name = "V_short", x = -10.0, quantity = "phi_t" }]
probe_every = 25
"#,
    },
    Preset {
        name: "microshort_pass",
        summary: "antifluxon at terminal speed 0.618 (alpha=0.005, beta=0.005) passing a microshort",
        toml: r#"
schema_version = 1
name = "microshort_pass"
t_max = 60.0
grid = { length = 40.0, dx = 0.05, dt = 0.04 }
model = { kind = "sg", alpha = 0.005, beta = 0.005, microshorts = [{ x = -10.0, mu = 0.5 }] }
ic = { kind = "kink", x0 = 10.0, u = -0.618, polarity = -1 }
probes = [{ name = "V_short", x = -10.0, quantity = "phi_t" }]
probe_every = 5
"#,
    },
    Preset {
        name: "constriction_strong",
        summary: "fluxon at u=0.85 repelled by a constriction with mu=10, L=200, l=40, b=10",
        toml: r#"
schema_version = 1
name = "constriction_strong"
t_max = 600.0
grid = { length = 200.0, dx = 0.05, dt = 0.04, x_min = 0.0 }
ic = { kind = "kink", x0 = 40.0, u = 0.85 }
probes = [{ name = "V_right", x = 200.0, quantity = "phi_t" }]
probe_every = 25

[model]
kind = "sg"
mu = { kind = "constrictions", background = 1.0, regions = [{ center = 120.0, length = 40.0, taper = 10.0, mu = 10.0 }] }
"#,
    },
    Preset {
        name: "constriction_weak",
        summary: "fluxon at u=0.85 entering a constriction with mu=3, L=200, l=40, b=10",
        toml: r#"
schema_version = 1
name = "constriction_weak"
t_max = 600.0
grid = { length = 200.0, dx = 0.05, dt = 0.04, x_min = 0.0 }
ic = { kind = "kink", x0 = 40.0, u = 0.85 }
probes = [{ name = "V_right", x = 200.0, quantity = "phi_t" }]
probe_every = 25

[model]
kind = "sg"
mu = { kind = "constrictions", background = 1.0, regions = [{ center = 120.0, length = 40.0, taper = 10.0, mu = 3.0 }] }
"#,
    },
    Preset {
        name: "triple_constriction",
        summary: "fluxon at u=0.85 crossing three mu=3 constrictions and radiating",
        toml: r#"
schema_version = 1
name = "triple_constriction"
t_max = 700.0
grid = { length = 400.0, dx = 0.05, dt = 0.04, x_min = -60.0 }
ic = { kind = "kink", x0 = -20.0, u = 0.85 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probe_every = 25
energy = { every = 250 }

[model]
kind = "sg"

[model.mu]
kind = "constrictions"
background = 1.0
regions = [
    { center = 50.0, length = 40.0, taper = 10.0, mu = 3.0 },
    { center = 150.0, length = 40.0, taper = 10.0, mu = 3.0 },
    { center = 250.0, length = 40.0, taper = 10.0, mu = 3.0 },
]
"#,
    },
    Preset {
        name: "pulse_excitation",
        summary: "junction of length 160 driven by a boundary pulse, A=1.5, omega=0.8, sigma=10, T=250",
        toml: r#"
schema_version = 1
name = "pulse_excitation"
t_max = 250.0
grid = { length = 160.0, dx = 0.02, dt = 0.016, x_min = 0.0 }
model = { kind = "sg" }
ic = { kind = "zero" }
boundaries.left = { kind = "pulse", amplitude = 1.5, omega = 0.8, sigma_rise = 10.0, sigma_fall = 10.0, duration = 250.0 }
boundaries.right = { kind = "neumann_bias", eta = 0.0, xi = 0.0 }
probes = [{ name = "H_left", x = 0.0, quantity = "phi_x" }]
probe_every = 25
"#,
    },
    Preset {
        name: "pulse_tuned",
        summary: "tuned boundary pulse (A=1.4, omega=0.6, sigma=10, T_p=70) creating one fluxon, one antifluxon and one breather",
        toml: r#"
schema_version = 1
name = "pulse_tuned"
t_max = 250.0
grid = { length = 160.0, dx = 0.02, dt = 0.016, x_min = 0.0 }
model = { kind = "sg" }
ic = { kind = "zero" }
boundaries.left = { kind = "pulse", amplitude = 1.4, omega = 0.6, sigma_rise = 10.0, sigma_fall = 10.0, duration = 70.0 }
boundaries.right = { kind = "neumann_bias", eta = 0.0, xi = 0.0 }
probes = [{ name = "H_left", x = 0.0, quantity = "phi_x" }]
probe_every = 25
"#,
    },
    Preset {
        name: "capacitor_massless",
        summary: "massless fluid discharging a capacitor, Q=4, Lc=40, g=1.2, current probed at x=100, T=25000",
        toml: r#"
schema_version = 1
name = "capacitor_massless"
t_max = 25000.0
grid = { length = 1200.0, dx = 0.2, dt = 0.16 }
ic = { kind = "zero" }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [
    { name = "J_100", x = 100.0, quantity = "current" },
    { name = "J_0", x = 0.0, quantity = "current" },
    { name = "E_0", x = 0.0, quantity = "efield" },
]
probe_every = 5
dump = { kind = "count", count = 500 }

[model]
kind = "massless_schwinger"
g = 1.2
sources = [{ kind = "capacitor", q = 4.0, separation = 40.0 }]
"#,
    },
    Preset {
        name: "capacitor_massive",
        summary: "massive fluid (m=0.1) discharging a capacitor, Q=100, Lc=40, g=1.2, T=2000",
        toml: r#"
schema_version = 1
name = "capacitor_massive"
t_max = 2000.0
grid = { length = 600.0, dx = 0.05, dt = 0.04 }
ic = { kind = "zero" }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [
    { name = "E_0", x = 0.0, quantity = "efield" },
    { name = "E_100", x = 100.0, quantity = "efield" },
]
probe_every = 5

# phi rescaled by 2 sqrt(pi): mu = 2 pi m, plate charge 2 sqrt(pi) Q
[model]
kind = "massless_schwinger"
g = 1.2
mu = { kind = "uniform", value = 0.6283185307179586 }
sources = [{ kind = "capacitor", q = 354.4907701811032, separation = 40.0 }]
"#,
    },
    Preset {
        name: "schwinger_atom",
        summary: "kink (g=0.3) launched from x0=-10 at u=0.55 towards a point charge -2 pi g at the origin",
        toml: r#"
schema_version = 1
name = "schwinger_atom"
t_max = 2000.0
grid = { length = 800.0, dx = 0.1, dt = 0.08 }
ic = { kind = "kink", x0 = -10.0, u = 0.55 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [{ name = "J_0", x = 0.0, quantity = "current" }]
probe_every = 5

[model]
kind = "massive_schwinger"
g = 0.3
sources = [{ kind = "point_charge", q = -1.8849555921538759, x = 0.0 }]
"#,
    },
    Preset {
        name: "schwinger_atom_far",
        summary: "kink (g=0.3) launched from x0=-30 at u=0.55 towards a point charge at the origin",
        toml: r#"
schema_version = 1
name = "schwinger_atom_far"
t_max = 200.0
grid = { length = 400.0, dx = 0.02, dt = 0.016 }
ic = { kind = "kink", x0 = -30.0, u = 0.55 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [{ name = "J_0", x = 0.0, quantity = "current" }]
probe_every = 5

[model]
kind = "massive_schwinger"
g = 0.3
sources = [{ kind = "point_charge", q = -1.8849555921538759, x = 0.0 }]
"#,
    },
    Preset {
        name: "schwinger_atom_centered",
        summary: "kink (g=0.3) starting on top of a point charge at the origin with u=0.55",
        toml: r#"
schema_version = 1
name = "schwinger_atom_centered"
t_max = 2000.0
grid = { length = 600.0, dx = 0.1, dt = 0.08, x_min = -400.0 }
ic = { kind = "kink", x0 = 0.0, u = 0.55 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probe_every = 5

[model]
kind = "massive_schwinger"
g = 0.3
sources = [{ kind = "point_charge", q = -1.8849555921538759, x = 0.0 }]
"#,
    },
    Preset {
        name: "positronium",
        summary: "kink-antikink pair (g=0.3, d=22, u=0.55) settling into a bound oscillating state, T=4000",
        toml: r#"
schema_version = 1
name = "positronium"
t_max = 4000.0
grid = { length = 4000.0, dx = 0.1, dt = 0.08 }
model = { kind = "massive_schwinger", g = 0.3 }
ic = { kind = "kink_antikink_pair", x0 = 0.0, u = 0.55, d = 22.0 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [{ name = "phi_0", x = 0.0, quantity = "phi" }]
probe_every = 5
energy = { every = 25, window = [-16.0, 16.0] }
"#,
    },
    Preset {
        name: "positronium_wide",
        summary: "kink-antikink pair with g=0.3, d=66, u=0.55",
        toml: r#"
schema_version = 1
name = "positronium_wide"
t_max = 4000.0
grid = { length = 4000.0, dx = 0.1, dt = 0.08 }
model = { kind = "massive_schwinger", g = 0.3 }
ic = { kind = "kink_antikink_pair", x0 = 0.0, u = 0.55, d = 66.0 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [{ name = "phi_0", x = 0.0, quantity = "phi" }]
probe_every = 5
energy = { every = 25, window = [-16.0, 16.0] }
"#,
    },
    Preset {
        name: "positronium_heavy",
        summary: "kink-antikink pair with large effective mass g=0.4, d=22, u=0.55",
        toml: r#"
schema_version = 1
name = "positronium_heavy"
t_max = 4000.0
grid = { length = 4000.0, dx = 0.1, dt = 0.08 }
model = { kind = "massive_schwinger", g = 0.4 }
ic = { kind = "kink_antikink_pair", x0 = 0.0, u = 0.55, d = 22.0 }
boundaries.left = { kind = "outgoing", order = 1 }
boundaries.right = { kind = "outgoing", order = 1 }
probes = [{ name = "phi_0", x = 0.0, quantity = "phi" }]
probe_every = 5
energy = { every = 25, window = [-16.0, 16.0] }
"#,
    },
];
