use sgdec_core::boundary::{neumann_bias_edge, Side};
use sgdec_core::diagnostics::std_dev;
use sgdec_core::model::{evaluate_coefficients, CapacitorSource, Source};
use sgdec_core::reference::{crank_nicolson_run, CrankNicolson};
use sgdec_core::{BoundarySpec, EnergyFormula, InitialCondition, PhysicsModel, Simulation, SpacetimeGrid};

/// Gaussian elimination with partial pivoting on a dense copy.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

#[test]
fn crank_nicolson_step_matches_dense_solve() {
    let n = 8;
    let (dx, dt) = (0.5, 0.4);
    let grid = SpacetimeGrid::implicit(n, dx, dt, -1.75).unwrap();
    let mut model = PhysicsModel::massless_schwinger(0.8).with_source(Source::Capacitor(CapacitorSource {
        q: 1.5,
        separation: 2.0,
        center: 0.0,
    }));
    model.alpha = 0.1;
    let (eta, xi) = (0.3, -0.2);
    let bc = BoundarySpec::neumann_bias(eta, xi);
    let ic = InitialCondition::Gaussian {
        x0: 0.3,
        width: 0.7,
        amplitude: 0.9,
        direction: 1,
    };
    let c = evaluate_coefficients(&model, &grid).unwrap();
    let mut cn = CrankNicolson::new(&ic, grid, &model, &bc).unwrap();
    let edges = [neumann_bias_edge(dx, eta, xi, Side::Left), neumann_bias_edge(dx, eta, xi, Side::Right)];

    for _ in 0..5 {
        let p = cn.state().varphi_prev.clone();
        let q = cn.state().varphi_curr.clone();
        // A phi with mirrored ghosts shifted by the prescribed end edges
        let apply = |v: &[f64], with_edges: bool| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let l = if i == 0 { v[1] - if with_edges { 2.0 * edges[0] } else { 0.0 } } else { v[i - 1] };
                    let r = if i + 1 == n { v[n - 2] + if with_edges { 2.0 * edges[1] } else { 0.0 } } else { v[i + 1] };
                    (l - 2.0 * v[i] + r) / (dx * dx) - c.m2[i] * v[i]
                })
                .collect()
        };
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0 / (dt * dt) + 0.5 * c.alpha / dt;
        }
        // column i of A is A applied to the i-th unit vector
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            for (k, v) in apply(&e, false).into_iter().enumerate() {
                m[k][i] -= 0.5 * v;
            }
        }
        let aq = apply(&q, true);
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                2.0 * q[i] / (dt * dt) - (1.0 / (dt * dt) - 0.5 * c.alpha / dt) * p[i]
                    + 0.5 * aq[i]
                    + c.source[i]
                    // the new slice's edge terms
                    + 0.5 * match i {
                        0 => -2.0 * edges[0] / (dx * dx),
                        _ if i + 1 == n => 2.0 * edges[1] / (dx * dx),
                        _ => 0.0,
                    }
            })
            .collect();
        let want = dense_solve(m, rhs);
        cn.step().unwrap();
        for (a, b) in cn.state().varphi_curr.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

fn capacitor_model() -> PhysicsModel {
    PhysicsModel::massless_schwinger(1.2).with_source(Source::Capacitor(CapacitorSource {
        q: 4.0,
        separation: 40.0,
        center: 0.0,
    }))
}

#[test]
fn centred_energy_is_conserved_for_linear_fields() {
    let grid = SpacetimeGrid::build(120.0, 0.333, 0.125, -60.0).unwrap();
    let mut sim = Simulation::new(&InitialCondition::Zero, grid, &capacitor_model(), &BoundarySpec::closed()).unwrap();
    let mut e = Vec::new();
    for _ in 0..4000 {
        e.push(sim.step_with_energy(EnergyFormula::Centered, None).unwrap().total);
    }
    let mean = e.iter().sum::<f64>() / e.len() as f64;
    assert!(mean > 100.0);
    assert!(std_dev(&e) < 1e-10 * mean, "std {}", std_dev(&e));
}

#[test]
fn centred_energy_stays_bounded_for_sine_gordon() {
    let grid = SpacetimeGrid::build(60.0, 0.1, 0.05, -30.0).unwrap();
    let ic = InitialCondition::KinkAntikinkPair { x0: 0.0, u: 0.4, d: 10.0 };
    let mut sim = Simulation::new(&ic, grid, &PhysicsModel::sine_gordon(), &BoundarySpec::closed()).unwrap();
    let e0 = sim.step_with_energy(EnergyFormula::Centered, None).unwrap().total;
    let exact = 2.0 * 8.0 / (1.0f64 - 0.16).sqrt();
    assert!((e0 - exact).abs() < 1e-2 * exact, "{e0} vs {exact}");
    for _ in 0..2000 {
        let e = sim.step_with_energy(EnergyFormula::Centered, None).unwrap().total;
        assert!((e - e0).abs() < 1e-3 * e0, "{e} vs {e0}");
    }
}

#[test]
fn crank_nicolson_loses_capacitor_energy() {
    let grid = SpacetimeGrid::implicit(361, 0.333, 0.125, -60.0).unwrap();
    let tr = crank_nicolson_run(&InitialCondition::Zero, grid, &capacitor_model(), &BoundarySpec::closed(), 200.0, 8).unwrap();
    let first = tr.energies[0].total;
    let last = tr.energies.last().unwrap().total;
    assert!(last < 0.1 * first, "{first} -> {last}");
}
