//! Flat-file exports. Every table has a header row and fixed-precision
//! numbers; timings go to separate files so the rest is reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{summary_table, metrics_table, Campaign, HarnessError, ScenarioSuite};
use crate::grp::GaOutcome;
use crate::lpp::{BSplinePath, PathRunStats};
use crate::mission::MissionGraph;
use crate::obstacles::ObstacleField;
use crate::synchro::MissionLog;
use crate::textfmt::sig;

pub const CONVERGENCE_HEADER: &str = "iteration,best_cost,mean_cost,best_violation,mean_violation";
pub const GA_CONVERGENCE_HEADER: &str = "generation,best_cost,mean_cost,best_violation";
pub const TRAJECTORY_HEADER: &str = "index,x,y,z";

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    Ok(path)
}

pub fn export_graph(g: &MissionGraph, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    Ok(vec![write_file(dir, "graph.json", &g.to_json())?])
}

pub fn export_route_run(o: &GaOutcome, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let route = format!(
        "route,cost,t_available,t_route,distance,weight,n_tasks,violation\n{},{},{},{},{},{},{},{}\n",
        o.route,
        sig(o.cost),
        sig(o.t_available),
        sig(o.summary.time),
        sig(o.summary.distance),
        sig(o.summary.weight),
        o.summary.n_tasks,
        sig(o.violation())
    );
    let mut conv = format!("{GA_CONVERGENCE_HEADER}\n");
    for (i, ((b, m), v)) in o.stats.best_cost.iter().zip(&o.stats.mean_cost).zip(&o.stats.best_violation).enumerate() {
        let _ = writeln!(conv, "{i},{},{},{}", sig(*b), sig(*m), sig(*v));
    }
    let timing = format!("planner,cpu_seconds\nga,{}\n", sig(o.stats.cpu_seconds));
    Ok(vec![
        write_file(dir, "route.csv", &route)?,
        write_file(dir, "ga_convergence.csv", &conv)?,
        write_file(dir, "route_timing.csv", &timing)?,
    ])
}

fn convergence_table(stats: &PathRunStats) -> String {
    let mut s = format!("{CONVERGENCE_HEADER}\n");
    for i in 0..stats.best_cost.len() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{}",
            sig(stats.best_cost[i]),
            sig(stats.mean_cost[i]),
            sig(stats.best_violation[i]),
            sig(stats.mean_violation[i])
        );
    }
    s
}

/// Trajectory, convergence trace and obstacle snapshot of one path planner run.
pub fn export_path_run(
    path: &BSplinePath,
    stats: &PathRunStats,
    field: &ObstacleField,
    dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>, HarnessError> {
    Ok(vec![
        write_file(dir, &format!("{prefix}trajectory.csv"), &path.trajectory_csv())?,
        write_file(dir, &format!("{prefix}convergence.csv"), &convergence_table(stats))?,
        write_file(dir, &format!("{prefix}obstacles.csv"), &field.snapshot_csv())?,
    ])
}

pub fn export_mission(log: &MissionLog, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let outcome = match &log.outcome {
        Some(o) => format!("outcome\n{o}\n"),
        None => "outcome\n".to_string(),
    };
    Ok(vec![
        write_file(dir, "mission_grp.csv", &log.grp_table())?,
        write_file(dir, "mission_lpp.csv", &log.lpp_table())?,
        write_file(dir, "mission_outcome.csv", &outcome)?,
        write_file(dir, "mission_timing.csv", &log.timing_table())?,
    ])
}

pub fn export_campaign(c: &Campaign, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut timing = String::from("seed,cpu_seconds\n");
    for r in &c.rows {
        let _ = writeln!(timing, "{},{}", r.seed, sig(r.cpu_seconds));
    }
    let cpu: Vec<_> = c.summaries.iter().filter(|(n, _)| n == "cpu_seconds").cloned().collect();
    Ok(vec![
        write_file(dir, "metrics.csv", &metrics_table(&c.rows))?,
        write_file(dir, "summary.csv", &summary_table(&c.summaries, false))?,
        write_file(dir, "metrics_timing.csv", &timing)?,
        write_file(dir, "summary_timing.csv", &summary_table(&cpu, true))?,
    ])
}

pub fn export_suite(suite: &ScenarioSuite, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = vec![write_file(dir, "suite.csv", &suite.table())?];
    let mut timing = String::from("count,seed,cpu_seconds\n");
    for r in &suite.runs {
        let prefix = format!("s{}_n{}_seed{}_", suite.scenario.id(), r.count, r.seed);
        written.extend(export_path_run(&r.path, &r.stats, &r.field, dir, &prefix)?);
        let _ = writeln!(timing, "{},{},{}", r.count, r.seed, sig(r.stats.cpu_seconds));
    }
    written.push(write_file(dir, "suite_timing.csv", &timing)?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mission_log_exports_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let files = export_mission(&MissionLog::new(10.0), dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        for f in files {
            let text = fs::read_to_string(&f).unwrap();
            assert_eq!(text.lines().count(), 1, "{}", f.display());
        }
    }

    #[test]
    fn unwritable_path_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = write_file(&blocker.join("sub"), "a.csv", "x").unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
        assert!(matches!(err, HarnessError::Io { .. }));
    }
}
