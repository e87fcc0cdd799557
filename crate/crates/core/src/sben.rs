//! Dissipative-evolution demo: decomposing phase-space velocities into
//! reversible and irreversible parts and scoring discretized paths.
//!
//! The irreversible rate is the symplectic gradient of a convex dissipation
//! potential evaluated at the velocity; it is the unique point where the
//! induced Fenchel-Young divergence vanishes, so the natural path has zero
//! action and every other choice of irreversible rates scores positive.
//!
//! Discretization: velocities are forward differences on the time grid with
//! the last node copying the penultimate rate; the action integral uses the
//! trapezoid rule.

use serde::Serialize;

use crate::conjugate::{fenchel_conjugate, symplectic_gradient, SolverParams};
use crate::divergence::symplectic_fenchel_young;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::space::{PhasePoint, SymplecticForm};

/// A sampled trajectory with per-node irreversible rates.
#[derive(Debug, Clone)]
pub struct DiscretePath {
    times: Vec<f64>,
    points: Vec<PhasePoint>,
    irr_rates: Vec<PhasePoint>,
}

impl DiscretePath {
    /// Validates alignment, strictly increasing times, and a consistent
    /// half-dimension across all nodes.
    pub fn new(
        times: Vec<f64>,
        points: Vec<PhasePoint>,
        irr_rates: Vec<PhasePoint>,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::DegenerateGrid {
                context: format!("need at least 2 nodes, got {}", times.len()),
            });
        }
        if times.len() != points.len() || times.len() != irr_rates.len() {
            return Err(Error::DegenerateGrid {
                context: format!(
                    "misaligned columns: {} times, {} points, {} rates",
                    times.len(),
                    points.len(),
                    irr_rates.len()
                ),
            });
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::DegenerateGrid {
                    context: format!("times must be strictly increasing, got {} then {}", w[0], w[1]),
                });
            }
        }
        let n = points[0].n();
        if points.iter().chain(irr_rates.iter()).any(|p| p.n() != n) {
            return Err(Error::DegenerateGrid {
                context: "inconsistent point dimensions".into(),
            });
        }
        Ok(Self {
            times,
            points,
            irr_rates,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn irr_rates(&self) -> &[PhasePoint] {
        &self.irr_rates
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points[0].n()
    }

    /// Forward-difference velocities; the last node copies the penultimate
    /// rate so every node has one.
    pub fn rates(&self) -> Vec<PhasePoint> {
        let k = self.times.len();
        let mut out = Vec::with_capacity(k);
        for i in 0..k - 1 {
            let dt = self.times[i + 1] - self.times[i];
            out.push(self.points[i + 1].sub(&self.points[i]).scale(1.0 / dt));
        }
        out.push(out[k - 2].clone());
        out
    }
}

/// Splits a velocity into `(reversible, irreversible)` parts:
/// `irr = grad^w phi(zdot)` and `rev = zdot - irr`.
pub fn decompose_rate(
    phi: &dyn Potential,
    form: &SymplecticForm,
    zdot: &PhasePoint,
) -> Result<(PhasePoint, PhasePoint)> {
    let irr = symplectic_gradient(phi, form, zdot)?;
    let rev = zdot.sub(&irr);
    Ok((rev, irr))
}

/// Trapezoid-rule action `sum (dt/2) (Y_k + Y_{k+1})` of the per-node
/// Fenchel-Young divergences `Y_k = Y_phi(zdot_k, irr_k)`.
pub fn path_action(
    path: &DiscretePath,
    phi: &dyn Potential,
    form: &SymplecticForm,
    params: &SolverParams,
) -> Result<f64> {
    let rates = path.rates();
    let mut node_values = Vec::with_capacity(path.len());
    for (rate, irr) in rates.iter().zip(path.irr_rates()) {
        let y = symplectic_fenchel_young(phi, form, rate, irr, params)?;
        node_values.push(y.value);
    }
    let mut action = 0.0;
    for i in 0..path.len() - 1 {
        let dt = path.times()[i + 1] - path.times()[i];
        action += 0.5 * dt * (node_values[i] + node_values[i + 1]);
    }
    Ok(action)
}

/// Per-node minimization of the action over the irreversible rates, the
/// trajectory itself staying fixed.
///
/// The per-node objective `w -> Y_phi(zdot, w)` is convex; its gradient is
/// `Omega (argmax - zdot)` where `argmax` is the conjugate maximizer at the
/// pulled-back target, so each node is solved by gradient descent with
/// backtracking starting from zero. Non-convergence at any node is flagged.
pub fn minimize_irr(
    times: &[f64],
    points: &[PhasePoint],
    phi: &dyn Potential,
    form: &SymplecticForm,
    params: &SolverParams,
) -> Result<DiscretePath> {
    let zero_rates = vec![PhasePoint::zero(points[0].n()); points.len()];
    let skeleton = DiscretePath::new(times.to_vec(), points.to_vec(), zero_rates)?;
    let rates = skeleton.rates();

    let mut optimized = Vec::with_capacity(rates.len());
    for rate in &rates {
        optimized.push(minimize_node(phi, form, rate, params)?);
    }
    DiscretePath::new(times.to_vec(), points.to_vec(), optimized)
}

fn minimize_node(
    phi: &dyn Potential,
    form: &SymplecticForm,
    zdot: &PhasePoint,
    params: &SolverParams,
) -> Result<PhasePoint> {
    let dim = form.dim();
    let omega_zdot = form.gram().matvec(&zdot.flat())?;
    // Maximize -h(w) = -(phi^{*w}(w) - w(w, zdot)) with the shared solver.
    let objective = |w: &[f64]| -> crate::potential::ExtReal {
        let value = form
            .transpose_apply(w)
            .and_then(|pulled| fenchel_conjugate(phi, &pulled, params))
            .map(|conj| {
                let wz: f64 = w.iter().zip(&omega_zdot).map(|(a, b)| a * b).sum();
                conj.value - wz
            });
        match value {
            Ok(h) => crate::potential::ExtReal::Finite(-h),
            Err(_) => crate::potential::ExtReal::PosInf,
        }
    };
    let ascent_direction = |w: &[f64]| -> Result<Vec<f64>> {
        let pulled = form.transpose_apply(w)?;
        let conj = fenchel_conjugate(phi, &pulled, params)?;
        let shifted: Vec<f64> = zdot
            .flat()
            .iter()
            .zip(&conj.argmax)
            .map(|(b, a)| b - a)
            .collect();
        form.gram().matvec(&shifted)
    };
    let outcome = crate::conjugate::ascend(vec![0.0; dim], objective, ascent_direction, params)?;
    if !outcome.converged {
        return Err(Error::GradientInversion {
            iterations: outcome.iterations,
            residual: -outcome.value,
        });
    }
    PhasePoint::from_flat(&outcome.point)
}

/// Summary of a path evaluation, serialized to JSON by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct ActionReport {
    pub action: f64,
    pub nodes: usize,
    pub max_node_value: f64,
}

/// Evaluates the action and the worst per-node divergence in one pass.
pub fn action_report(
    path: &DiscretePath,
    phi: &dyn Potential,
    form: &SymplecticForm,
    params: &SolverParams,
) -> Result<ActionReport> {
    let rates = path.rates();
    let mut max_node_value: f64 = 0.0;
    let mut node_values = Vec::with_capacity(path.len());
    for (rate, irr) in rates.iter().zip(path.irr_rates()) {
        let y = symplectic_fenchel_young(phi, form, rate, irr, params)?;
        max_node_value = max_node_value.max(y.value);
        node_values.push(y.value);
    }
    let mut action = 0.0;
    for i in 0..path.len() - 1 {
        let dt = path.times()[i + 1] - path.times()[i];
        action += 0.5 * dt * (node_values[i] + node_values[i + 1]);
    }
    Ok(ActionReport {
        action,
        nodes: path.len(),
        max_node_value,
    })
}

/// Serializes a path as CSV with header `t,z0..z{2n-1},irr0..irr{2n-1}`.
/// Numbers print as shortest round-trip decimals.
pub fn trajectory_to_csv(path: &DiscretePath) -> String {
    let dim = 2 * path.n();
    let mut out = String::from("t");
    for i in 0..dim {
        out.push_str(&format!(",z{i}"));
    }
    for i in 0..dim {
        out.push_str(&format!(",irr{i}"));
    }
    out.push('\n');
    for k in 0..path.len() {
        out.push_str(&format!("{}", path.times()[k]));
        for v in path.points()[k].flat() {
            out.push_str(&format!(",{v}"));
        }
        for v in path.irr_rates()[k].flat() {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV format written by [`trajectory_to_csv`], validating the
/// header, column counts, number syntax, and the path invariants.
pub fn trajectory_from_csv(text: &str) -> Result<DiscretePath> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Csv {
        line: 1,
        context: "empty input".into(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 5 || columns[0] != "t" || (columns.len() - 1) % 4 != 0 {
        return Err(Error::Csv {
            line: 1,
            context: format!("bad header {header:?}: want t,z0..,irr0.. with 4n value columns"),
        });
    }
    let dim = (columns.len() - 1) / 2;
    for (i, name) in columns.iter().enumerate().skip(1) {
        let expected = if i <= dim {
            format!("z{}", i - 1)
        } else {
            format!("irr{}", i - 1 - dim)
        };
        if *name != expected {
            return Err(Error::Csv {
                line: 1,
                context: format!("column {i} is {name:?}, expected {expected:?}"),
            });
        }
    }

    let mut times = Vec::new();
    let mut points = Vec::new();
    let mut irr_rates = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::Csv {
                line: idx + 1,
                context: format!("{} fields, expected {}", fields.len(), columns.len()),
            });
        }
        let mut values = Vec::with_capacity(fields.len());
        for field in &fields {
            let v: f64 = field.parse().map_err(|_| Error::Csv {
                line: idx + 1,
                context: format!("bad number {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line: idx + 1,
                    context: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        times.push(values[0]);
        points.push(PhasePoint::from_flat(&values[1..1 + dim])?);
        irr_rates.push(PhasePoint::from_flat(&values[1 + dim..])?);
    }
    DiscretePath::new(times, points, irr_rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Quadratic;

    fn params() -> SolverParams {
        SolverParams::default()
    }

    fn canonical() -> SymplecticForm {
        SymplecticForm::canonical(1).unwrap()
    }

    #[test]
    fn decompose_rate_quadratic_example() {
        let phi = Quadratic::isotropic(2);
        let zdot = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
        let (rev, irr) = decompose_rate(&phi, &canonical(), &zdot).unwrap();
        assert_eq!(irr.flat(), vec![0.0, -1.0]);
        assert_eq!(rev.flat(), vec![1.0, 1.0]);
        // Zero velocity decomposes trivially.
        let (rev0, irr0) = decompose_rate(&phi, &canonical(), &PhasePoint::zero(1)).unwrap();
        assert_eq!(rev0.flat(), vec![0.0, 0.0]);
        assert_eq!(irr0.flat(), vec![0.0, 0.0]);
    }

    #[test]
    fn decompose_rate_is_linear_in_the_quadratic_weight() {
        // phi = lambda |z|^2 / 2 gives irr = lambda Omega0 zdot exactly.
        let form = canonical();
        for lambda in [0.5, 1.0, 3.25] {
            let phi = Quadratic::scaled(2, lambda).unwrap();
            let zdot = PhasePoint::new(vec![0.7], vec![-1.2]).unwrap();
            let (_, irr) = decompose_rate(&phi, &form, &zdot).unwrap();
            let expected = form.gram().matvec(&zdot.flat()).unwrap();
            for (got, want) in irr.flat().iter().zip(&expected) {
                assert!((got - lambda * want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn decomposition_zeroes_the_divergence() {
        let phi = Quadratic::isotropic(2);
        let form = canonical();
        let zdot = PhasePoint::new(vec![0.3], vec![0.8]).unwrap();
        let (_, irr) = decompose_rate(&phi, &form, &zdot).unwrap();
        let y = symplectic_fenchel_young(&phi, &form, &zdot, &irr, &params()).unwrap();
        assert!(y.value <= 1e-8);
    }

    fn linear_path(kmax: usize, velocity: (f64, f64), horizon: f64) -> (Vec<f64>, Vec<PhasePoint>) {
        let times: Vec<f64> = (0..=kmax).map(|k| horizon * k as f64 / kmax as f64).collect();
        let points = times
            .iter()
            .map(|t| PhasePoint::new(vec![velocity.0 * t], vec![velocity.1 * t]).unwrap())
            .collect();
        (times, points)
    }

    #[test]
    fn constant_velocity_with_zero_irr_scores_the_potential() {
        // zdot = (1, 0), irr = 0: Y = phi(zdot) = 1/2 per node, action = 1/2.
        let phi = Quadratic::isotropic(2);
        let (times, points) = linear_path(10, (1.0, 0.0), 1.0);
        let zero_rates = vec![PhasePoint::zero(1); points.len()];
        let path = DiscretePath::new(times, points, zero_rates).unwrap();
        let action = path_action(&path, &phi, &canonical(), &params()).unwrap();
        assert!((action - 0.5).abs() < 1e-12, "action {action}");
    }

    #[test]
    fn motionless_path_has_zero_action() {
        let phi = Quadratic::isotropic(2);
        let times: Vec<f64> = (0..=5).map(|k| k as f64 * 0.2).collect();
        let points = vec![PhasePoint::new(vec![0.4], vec![-0.1]).unwrap(); 6];
        let zero_rates = vec![PhasePoint::zero(1); 6];
        let path = DiscretePath::new(times, points, zero_rates).unwrap();
        let action = path_action(&path, &phi, &canonical(), &params()).unwrap();
        assert_eq!(action, 0.0);
    }

    #[test]
    fn decomposed_rates_give_zero_action() {
        let phi = Quadratic::isotropic(2);
        let form = canonical();
        let (times, points) = linear_path(20, (0.7, -0.4), 2.0);
        let skeleton = DiscretePath::new(
            times.clone(),
            points.clone(),
            vec![PhasePoint::zero(1); points.len()],
        )
        .unwrap();
        let irr: Vec<PhasePoint> = skeleton
            .rates()
            .iter()
            .map(|r| decompose_rate(&phi, &form, r).unwrap().1)
            .collect();
        let path = DiscretePath::new(times, points, irr).unwrap();
        let action = path_action(&path, &phi, &form, &params()).unwrap();
        assert!(action <= 1e-6, "action {action}");
    }

    #[test]
    fn minimize_irr_recovers_the_decomposition() {
        let phi = Quadratic::isotropic(2);
        let form = canonical();
        let (times, points) = linear_path(8, (0.5, 0.3), 1.0);
        let optimized = minimize_irr(&times, &points, &phi, &form, &params()).unwrap();
        let rates = optimized.rates();
        for (rate, irr) in rates.iter().zip(optimized.irr_rates()) {
            let (_, expected) = decompose_rate(&phi, &form, rate).unwrap();
            for (a, b) in irr.flat().iter().zip(&expected.flat()) {
                assert!((a - b).abs() < 1e-4, "{a} vs {b}");
            }
        }
        // Zero trajectory minimizes to zero rates.
        let still = vec![PhasePoint::zero(1); 4];
        let t: Vec<f64> = (0..4).map(|k| k as f64).collect();
        let opt0 = minimize_irr(&t, &still, &phi, &form, &params()).unwrap();
        for irr in opt0.irr_rates() {
            assert!(irr.norm() < 1e-9);
        }
    }

    #[test]
    fn minimization_descends_from_zero_rates() {
        let phi = Quadratic::isotropic(2);
        let form = canonical();
        let (times, points) = linear_path(8, (1.0, 0.0), 1.0);
        let before = DiscretePath::new(
            times.clone(),
            points.clone(),
            vec![PhasePoint::zero(1); points.len()],
        )
        .unwrap();
        let action_before = path_action(&before, &phi, &form, &params()).unwrap();
        let after = minimize_irr(&times, &points, &phi, &form, &params()).unwrap();
        let action_after = path_action(&after, &phi, &form, &params()).unwrap();
        assert!(action_after < action_before);
    }

    #[test]
    fn grid_validation() {
        let p = PhasePoint::zero(1);
        assert!(matches!(
            DiscretePath::new(vec![0.0], vec![p.clone()], vec![p.clone()]),
            Err(Error::DegenerateGrid { .. })
        ));
        assert!(matches!(
            DiscretePath::new(
                vec![0.0, 0.0],
                vec![p.clone(), p.clone()],
                vec![p.clone(), p.clone()]
            ),
            Err(Error::DegenerateGrid { .. })
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let times = vec![0.0, 0.5, 1.0];
        let points = vec![
            PhasePoint::new(vec![0.1], vec![0.2]).unwrap(),
            PhasePoint::new(vec![0.3], vec![-0.4]).unwrap(),
            PhasePoint::new(vec![0.5], vec![0.6]).unwrap(),
        ];
        let rates = vec![PhasePoint::zero(1); 3];
        let path = DiscretePath::new(times, points, rates).unwrap();
        let text = trajectory_to_csv(&path);
        assert!(text.starts_with("t,z0,z1,irr0,irr1\n"));
        let back = trajectory_from_csv(&text).unwrap();
        assert_eq!(back.times(), path.times());
        assert_eq!(back.points(), path.points());
        let again = trajectory_to_csv(&back);
        assert_eq!(text, again);
    }

    #[test]
    fn csv_parser_rejects_malformed_input() {
        assert!(trajectory_from_csv("").is_err());
        assert!(trajectory_from_csv("a,b,c\n").is_err());
        assert!(trajectory_from_csv("t,z0,z1,irr0,irr1\n0,1,2,3\n").is_err());
        assert!(trajectory_from_csv("t,z0,z1,irr0,irr1\n0,1,2,3,nope\n").is_err());
        assert!(trajectory_from_csv("t,z0,z1,irr0,irr1\n0,1,2,3,inf\n").is_err());
        // Non-increasing times.
        let bad = "t,z0,z1,irr0,irr1\n0,1,2,0,0\n0,1,2,0,0\n";
        assert!(trajectory_from_csv(bad).is_err());
    }
}
