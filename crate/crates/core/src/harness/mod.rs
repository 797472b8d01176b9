//! Monte Carlo experiment runner: scenarios, sweeps, speedup tables and
//! export.
//!
//! Trial `i` of sweep point `k` draws from stream `(seed, k, i)`, so a table
//! is reproduced exactly from its scenario and seed whatever the thread
//! count.

mod scenario;
mod stats;
mod table;

use rayon::prelude::*;

pub use scenario::{random_users, Scenario, TopologySpec, UserSpec};
pub use stats::{ErStats, TrialRecord, BOOTSTRAP_RESAMPLES, MAX_FAIL_FRACTION};
pub use table::{Cell, Format, Table};

use crate::analytics::{
    analytic_er_estimate, estimate_component_distribution_in, expected_link_presence,
    sp_analytic_er,
};
use crate::error::{Error, Result};
use crate::graph::Subgraph;
use crate::netstate::CutOff;
use crate::protocols::{run_protocol, Protocol};
use crate::rng::{derive_seed, trial_rng};
use crate::routing::{min_user_cut_bound, select_centre_node, steiner_tree};
use crate::topology::{NodeId, Topology};

/// Rate statistics plus the number of random user draws that no centre
/// could serve.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub stats: ErStats,
    /// Only nonzero for centre protocols with random users. These draws
    /// are left out of `stats`.
    pub infeasible_draws: u64,
}

/// Runs every trial of `s` using sweep index `index` for the streams.
pub fn run_trials(s: &Scenario, index: u64) -> Result<(Vec<TrialRecord>, u64)> {
    let (t, fixed) = s.prepare()?;
    if let Some(users) = &fixed {
        if s.protocol.needs_centre() {
            select_centre_node(&t, users)?;
        }
    }
    let k = s.users.count();
    let outcomes: Vec<Option<TrialRecord>> = (0..s.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(s.seed, index, trial);
            let users = match &fixed {
                Some(u) => u.clone(),
                None => random_users(t.node_count(), k, &mut rng),
            };
            match run_protocol(s.protocol, &t, &s.protocol_config(users), rng) {
                Ok(out) => Ok(Some(TrialRecord {
                    trial,
                    succeeded: out.succeeded,
                    ghz: out.ghz_count as u64,
                    slots: out.timeslots_used,
                })),
                Err(Error::Infeasible(_)) if fixed.is_none() => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let infeasible = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    let records: Vec<TrialRecord> = outcomes.into_iter().flatten().collect();
    if records.is_empty() {
        return Err(Error::Infeasible(format!(
            "no centre node can serve any of the {infeasible} random user sets"
        )));
    }
    Ok((records, infeasible))
}

/// Runs a scenario and aggregates its rate statistics.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioResult> {
    run_scenario_at(s, 0)
}

/// As [`run_scenario`] for sweep point `index`.
pub fn run_scenario_at(s: &Scenario, index: u64) -> Result<ScenarioResult> {
    let (records, infeasible_draws) = run_trials(s, index)?;
    Ok(ScenarioResult {
        stats: ErStats::from_trials(&records, derive_seed(s.seed, index, u64::MAX)),
        infeasible_draws,
    })
}

/// A scenario parameter that can be swept.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// Link probability: the grid `p`, or a uniform `p_e` on a mesh.
    P,
    /// Operational probability of mesh edges (equal to `p` on grids).
    POp,
    QC,
    /// A user count `k` (random users) or any user spec.
    Users,
    GridM,
    Protocol,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::P => "p",
            SweepAxis::POp => "p_op",
            SweepAxis::QC => "q_c",
            SweepAxis::Users => "users",
            SweepAxis::GridM => "grid_M",
            SweepAxis::Protocol => "protocol",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(
            match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
                "p" => SweepAxis::P,
                "p_op" => SweepAxis::POp,
                "q_c" | "qc" => SweepAxis::QC,
                "users" => SweepAxis::Users,
                "grid_m" | "m" => SweepAxis::GridM,
                "protocol" => SweepAxis::Protocol,
                _ => return Err(Error::UnknownAxis(s.to_string())),
            },
        )
    }
}

fn parse_f64(value: &str) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::domain(format!("`{value}` is not a number")))
}

/// `base` with one parameter replaced.
pub fn apply_axis(base: &Scenario, axis: SweepAxis, value: &str) -> Result<Scenario> {
    let mut s = base.clone();
    match axis {
        SweepAxis::P | SweepAxis::POp => {
            let v = parse_f64(value)?;
            match &mut s.topology {
                TopologySpec::Grid { p, .. } => *p = v,
                TopologySpec::File { p_op, p, .. } | TopologySpec::Builtin { p_op, p, .. } => {
                    if axis == SweepAxis::P {
                        (*p, *p_op) = (Some(v), None);
                    } else {
                        (*p, *p_op) = (None, Some(v));
                    }
                }
            }
        }
        SweepAxis::QC => s.q_c = value.parse()?,
        SweepAxis::Users => {
            s.users = match value.trim().parse::<usize>() {
                Ok(k) => UserSpec::Random(k),
                Err(_) => value.parse()?,
            }
        }
        SweepAxis::GridM => match &mut s.topology {
            TopologySpec::Grid { m, .. } => {
                *m = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::domain(format!("`{value}` is not a grid width")))?
            }
            _ => {
                return Err(Error::validation(
                    None,
                    "grid_M sweeps need a grid topology",
                ))
            }
        },
        SweepAxis::Protocol => s.protocol = value.parse()?,
    }
    Ok(s)
}

/// One sweep point: statistics, or the reason the point is infeasible.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: String,
    pub scenario: Scenario,
    pub result: std::result::Result<ScenarioResult, String>,
}

/// Runs `base` once per value of `axis`. Point `k` uses sweep index `k`.
pub fn sweep(base: &Scenario, axis: SweepAxis, values: &[String]) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::with_capacity(values.len());
    for (k, value) in values.iter().enumerate() {
        let s = apply_axis(base, axis, value)?;
        let result = match run_scenario_at(&s, k as u64) {
            Ok(r) => Ok(r),
            Err(Error::Infeasible(msg)) => Err(msg),
            Err(e) => return Err(e),
        };
        points.push(SweepPoint {
            value: value.clone(),
            scenario: s,
            result,
        });
    }
    Ok(points)
}

const STATS_COLUMNS: [&str; 17] = [
    "axis",
    "value",
    "protocol",
    "topology",
    "users",
    "q_c",
    "trials",
    "er",
    "ci95_low",
    "ci95_high",
    "fail_fraction",
    "valid",
    "successes",
    "failures",
    "mean_ghz_per_success",
    "mean_timeslots",
    "note",
];

fn topology_label(spec: &TopologySpec) -> String {
    match spec {
        TopologySpec::Grid { m, p } => format!("grid{m}x{m} p={p}"),
        TopologySpec::File { path, .. } => path.display().to_string(),
        TopologySpec::Builtin { name, .. } => name.clone(),
    }
}

fn stats_row(
    axis: &str,
    value: &str,
    s: &Scenario,
    r: &std::result::Result<ScenarioResult, String>,
) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![
        axis.into(),
        value.into(),
        s.protocol.name().into(),
        topology_label(&s.topology).into(),
        s.users.to_string().into(),
        s.q_c.to_string().into(),
    ];
    match r {
        Ok(res) => {
            let st = &res.stats;
            let note = if res.infeasible_draws > 0 {
                format!("{} infeasible user draws skipped", res.infeasible_draws)
            } else {
                String::new()
            };
            row.extend([
                st.trials.into(),
                st.er.into(),
                st.ci95_low.into(),
                st.ci95_high.into(),
                st.fail_fraction.into(),
                st.valid.into(),
                st.successes.into(),
                st.failures.into(),
                st.mean_ghz_per_success.into(),
                st.mean_timeslots.into(),
                note.into(),
            ]);
        }
        Err(msg) => {
            row.extend([
                s.trials.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            row.extend([
                false.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            row.push(format!("infeasible: {msg}").into());
        }
    }
    row
}

/// A one-row table for a single scenario.
pub fn scenario_table(s: &Scenario, r: &ScenarioResult) -> Table {
    let mut t = Table::new(&STATS_COLUMNS);
    t.push(stats_row("", "", s, &Ok(r.clone())));
    t
}

pub fn sweep_table(axis: SweepAxis, points: &[SweepPoint]) -> Table {
    let mut t = Table::new(&STATS_COLUMNS);
    for pt in points {
        t.push(stats_row(axis.name(), &pt.value, &pt.scenario, &pt.result));
    }
    t
}

/// Analytic single-path rate at `Q_c = 1` for fixed users: the product of
/// `p_e` over the centre routes, or over the Steiner tree for SP-tree.
pub fn analytic_sp_rate(t: &Topology, users: &[NodeId], protocol: Protocol) -> Result<f64> {
    match protocol {
        Protocol::Sp => {
            let choice = select_centre_node(t, users)?;
            let route = choice.routing.edges();
            if route.is_empty() {
                return Ok(1.0);
            }
            sp_analytic_er(t, &route)
        }
        Protocol::SpTree => {
            let tree = steiner_tree(&Subgraph::full(t), users)?
                .ok_or_else(|| Error::Infeasible("users are not connected".into()))?;
            sp_analytic_er(t, &tree.edges)
        }
        other => Err(Error::domain(format!("no analytic rate for {other}"))),
    }
}

/// Rate ratios of protocol `a` over protocol `b` on a `p x q_c` grid of
/// cells. A ratio is left blank when either side has too many failed runs,
/// is infeasible, or `b` has zero rate. With `analytic_b`, cells with
/// `Q_c = 1` take `b`'s rate from the closed-form single-path product.
pub fn speedup_report(
    base: &Scenario,
    p_values: &[f64],
    qc_values: &[CutOff],
    a: Protocol,
    b: Protocol,
    analytic_b: bool,
) -> Result<Table> {
    if analytic_b && !matches!(b, Protocol::Sp | Protocol::SpTree) {
        return Err(Error::validation(
            None,
            "the analytic denominator needs sp or sp-tree",
        ));
    }
    if analytic_b && base.users.is_random() {
        return Err(Error::validation(
            None,
            "the analytic denominator needs fixed users",
        ));
    }
    let mut table = Table::new(&[
        "p",
        "q_c",
        "protocol_a",
        "er_a",
        "valid_a",
        "protocol_b",
        "er_b",
        "valid_b",
        "source_b",
        "ratio",
        "note",
    ]);
    let mut index = 0u64;
    for &p in p_values {
        for &q_c in qc_values {
            let mut cell = apply_axis(base, SweepAxis::P, &p.to_string())?;
            cell.q_c = q_c;
            let run =
                |protocol: Protocol, index: u64| -> Result<std::result::Result<ErStats, String>> {
                    let s = Scenario {
                        protocol,
                        ..cell.clone()
                    };
                    match run_scenario_at(&s, index) {
                        Ok(r) => Ok(Ok(r.stats)),
                        Err(Error::Infeasible(m)) => Ok(Err(m)),
                        Err(e) => Err(e),
                    }
                };
            let ra = run(a, 2 * index)?;
            let (rb, source) = if analytic_b && q_c == CutOff::Slots(1) {
                let (t, users) = cell.prepare()?;
                let users = users.expect("fixed users checked above");
                let rb = match analytic_sp_rate(&t, &users, b) {
                    Ok(er) => Ok((er, true)),
                    Err(Error::Infeasible(m)) => Err(m),
                    Err(e) => return Err(e),
                };
                (rb, "analytic")
            } else {
                (run(b, 2 * index + 1)?.map(|s| (s.er, s.valid)), "simulated")
            };
            index += 1;

            let (er_a, valid_a) = match &ra {
                Ok(s) => (Cell::Float(s.er), s.valid),
                Err(_) => (Cell::Empty, false),
            };
            let (er_b, valid_b) = match &rb {
                Ok((er, v)) => (Cell::Float(*er), *v),
                Err(_) => (Cell::Empty, false),
            };
            let (ratio, note) = match (&ra, &rb) {
                (Err(m), _) => (Cell::Empty, format!("{a} infeasible: {m}")),
                (_, Err(m)) => (Cell::Empty, format!("{b} infeasible: {m}")),
                _ if !valid_a => (Cell::Empty, format!("{a} failure fraction above 5%")),
                _ if !valid_b => (Cell::Empty, format!("{b} failure fraction above 5%")),
                (Ok(sa), Ok((eb, _))) => {
                    if *eb > 0.0 {
                        (Cell::Float(sa.er / eb), String::new())
                    } else {
                        (Cell::Empty, format!("{b} rate is zero"))
                    }
                }
            };
            table.push(vec![
                p.into(),
                q_c.to_string().into(),
                a.name().into(),
                er_a,
                valid_a.into(),
                b.name().into(),
                er_b,
                valid_b.into(),
                source.into(),
                ratio,
                note.into(),
            ]);
        }
    }
    Ok(table)
}

/// Closed-form and semi-analytical estimates for a scenario.
///
/// Rows: steady-state link presence (mean over edges), single-path rates
/// for fixed users, the cut upper bound, and the component-based MP-C
/// estimate for randomly placed users.
pub fn analyze(s: &Scenario, samples: u64) -> Result<Table> {
    let (t, fixed) = s.prepare()?;
    let mut table = Table::new(&["quantity", "value", "detail"]);
    let presence: Vec<f64> = t
        .edges()
        .iter()
        .map(|e| expected_link_presence(e.p_e, s.q_c))
        .collect::<Result<_>>()?;
    let mean_presence = presence.iter().sum::<f64>() / presence.len() as f64;
    let max_presence = presence.iter().copied().fold(0.0, f64::max);
    table.push(vec![
        "expected_link_presence".into(),
        mean_presence.into(),
        format!("mean over {} edges, q_c = {}", t.edge_count(), s.q_c).into(),
    ]);
    if let Some(users) = &fixed {
        for protocol in [Protocol::Sp, Protocol::SpTree] {
            let (value, detail) = match analytic_sp_rate(&t, users, protocol) {
                Ok(er) => (Cell::Float(er), "valid for q_c = 1".to_string()),
                Err(Error::Infeasible(m)) => (Cell::Empty, format!("infeasible: {m}")),
                Err(e) => return Err(e),
            };
            table.push(vec![
                format!("{protocol}_analytic_er").into(),
                value,
                detail.into(),
            ]);
        }
        let cut = min_user_cut_bound(&t, users)?;
        table.push(vec![
            "er_upper_bound".into(),
            (cut as f64 * max_presence).into(),
            format!("min user cut {cut} times link presence").into(),
        ]);
    }
    let k = s.users.count();
    let dist = estimate_component_distribution_in(&t, s.q_c, samples, s.seed)?;
    table.push(vec![
        "mean_largest_component".into(),
        dist.mean().into(),
        format!("{samples} sampled link graphs").into(),
    ]);
    if k <= t.node_count() {
        table.push(vec![
            "analytic_er_estimate".into(),
            analytic_er_estimate(&t, k, &dist)?.into(),
            format!("mp-c with {k} randomly placed users").into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize, p: f64, protocol: Protocol, users: &str) -> Scenario {
        let mut s = Scenario::grid(m, p, protocol, users.parse().unwrap());
        s.trials = 200;
        s.seed = 11;
        s
    }

    #[test]
    fn certain_links_give_unit_rate() {
        let r = run_scenario(&grid(6, 1.0, Protocol::MpC, "random:5")).unwrap();
        assert_eq!(r.stats.er, 1.0);
        assert_eq!(r.stats.fail_fraction, 0.0);
        assert_eq!(r.stats.successes, 200);
    }

    #[test]
    fn replay_gives_identical_tables() {
        let s = grid(5, 0.6, Protocol::MpP, "random:4");
        let a = scenario_table(&s, &run_scenario(&s).unwrap())
            .to_csv()
            .unwrap();
        let b = scenario_table(&s, &run_scenario(&s).unwrap())
            .to_csv()
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn accounting_adds_up() {
        let mut s = grid(4, 0.2, Protocol::Sp, "corners");
        s.max_timeslots = 40;
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.stats.successes + r.stats.failures, r.stats.trials);
        assert_eq!(r.stats.valid, r.stats.fail_fraction <= MAX_FAIL_FRACTION);
        assert!(!r.stats.valid);
    }

    #[test]
    fn infeasible_fixed_users() {
        let s = grid(6, 0.7, Protocol::Sp, "0,5,30,35,2");
        assert!(matches!(run_scenario(&s), Err(Error::Infeasible(_))));
        let points = sweep(&s, SweepAxis::Protocol, &["sp".into(), "mp-c".into()]).unwrap();
        assert!(points[0].result.is_err());
        assert!(points[1].result.is_ok());
        let table = sweep_table(SweepAxis::Protocol, &points);
        assert_eq!(table.get(0, "valid"), Some(&Cell::Bool(false)));
        assert!(matches!(table.get(0, "note"), Some(Cell::Text(n)) if n.starts_with("infeasible")));
    }

    #[test]
    fn axes() {
        let base = grid(4, 0.5, Protocol::MpC, "corners");
        assert!(matches!(
            "speed".parse::<SweepAxis>(),
            Err(Error::UnknownAxis(_))
        ));
        let s = apply_axis(&base, SweepAxis::GridM, "7").unwrap();
        assert_eq!(s.topology, TopologySpec::Grid { m: 7, p: 0.5 });
        let s = apply_axis(&base, SweepAxis::Users, "6").unwrap();
        assert_eq!(s.users, UserSpec::Random(6));
        let s = apply_axis(&base, SweepAxis::QC, "inf").unwrap();
        assert_eq!(s.q_c, CutOff::Unbounded);
        let s = apply_axis(&base, SweepAxis::POp, "0.25").unwrap();
        assert_eq!(s.topology, TopologySpec::Grid { m: 4, p: 0.25 });
        assert!(apply_axis(&base, SweepAxis::P, "x").is_err());
    }

    #[test]
    fn sweep_points_use_distinct_streams() {
        let base = grid(4, 0.5, Protocol::MpC, "corners");
        let pts = sweep(&base, SweepAxis::P, &["0.5".into(), "0.5".into()]).unwrap();
        let er = |i: usize| pts[i].result.as_ref().unwrap().stats.er;
        assert_ne!(er(0), er(1));
    }

    #[test]
    fn speedup_at_unit_probability() {
        let base = grid(4, 1.0, Protocol::MpP, "corners");
        let t = speedup_report(
            &base,
            &[1.0],
            &[CutOff::Slots(1)],
            Protocol::MpP,
            Protocol::Sp,
            false,
        )
        .unwrap();
        assert_eq!(t.get(0, "er_b"), Some(&Cell::Float(1.0)));
        assert_eq!(t.get(0, "ratio"), Some(&Cell::Float(2.0)));
        let t = speedup_report(
            &base,
            &[1.0],
            &[CutOff::Slots(1)],
            Protocol::MpP,
            Protocol::Sp,
            true,
        )
        .unwrap();
        assert_eq!(t.get(0, "source_b"), Some(&Cell::Text("analytic".into())));
        assert_eq!(t.get(0, "ratio"), Some(&Cell::Float(2.0)));
        let random = grid(4, 1.0, Protocol::MpP, "random:3");
        assert!(speedup_report(
            &random,
            &[1.0],
            &[CutOff::Slots(1)],
            Protocol::MpP,
            Protocol::Sp,
            true
        )
        .is_err());
    }

    #[test]
    fn analyze_rows() {
        let s = grid(3, 0.75, Protocol::MpC, "corners");
        let t = analyze(&s, 500).unwrap();
        let value = |q: &str| {
            let row = t
                .rows
                .iter()
                .position(|r| r[0] == Cell::Text(q.into()))
                .unwrap();
            t.rows[row][1].as_f64()
        };
        assert_eq!(value("expected_link_presence"), Some(0.75));
        assert!((value("sp_analytic_er").unwrap() - 0.75f64.powi(8)).abs() < 1e-12);
        assert!((value("sp-tree_analytic_er").unwrap() - 0.75f64.powi(6)).abs() < 1e-12);
        assert_eq!(value("er_upper_bound"), Some(1.5));
        let est = value("analytic_er_estimate").unwrap();
        assert!((0.0..=1.0).contains(&est));
    }
}
