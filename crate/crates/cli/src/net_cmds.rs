use std::fs;
use std::path::Path;

use enet::analysis::{
    build_state_graph, check_conflict_freedom, check_deadlock_freedom, check_safeness, check_sequence_language,
    check_transition_coverage, AbstractMarking, AnalysisError, CheckKind, CheckReport, ExploreOptions,
    FinalsPredicate, StagePattern, StateGraph,
};
use enet::dsl;
use enet::endef::{en_def_procedures, EN_DEF_PATTERN};
use enet::sim::{NoResolution, RandomResolution, ResolutionSource};
use enet::{run_with, FiringEvent, Marking, Net, SchedulingPolicy, ScriptEntry, StopReason, Token};

use crate::args::{AnalyzeArgs, ExportDotArgs, FileArgs, FormatArgs, Policy, SimulateArgs};
use crate::{CmdResult, Failure, Io, EXIT_FAIL, EXIT_OK};

pub(crate) fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Loads a net with the `EN_Def` procedures available, printing every diagnostic.
fn load(path: &Path, io: &mut Io<'_>) -> Result<Net, Failure> {
    let source = read(path)?;
    let (net, diags) = dsl::load(&source, &en_def_procedures());
    let file = path.display().to_string();
    for d in &diags {
        io.diagnostic(&d.render(&file));
    }
    match net {
        Some(net) if !dsl::has_errors(&diags) => Ok(net),
        _ => Err(Failure::data("")),
    }
}

/// `P,Q,R=V`: tokens on `P` and `Q`, resolution `R` set to `V`.
fn initial_marking(net: &Net, text: Option<&str>) -> Result<Marking, Failure> {
    let Some(text) = text else {
        return Ok(Marking::peripheral(net));
    };
    let mut m = Marking::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some((r, v)) => {
                let v = v
                    .trim()
                    .parse()
                    .map_err(|_| Failure::usage(format!("bad resolution value in `{item}`")))?;
                m.set_resolution(r.trim(), v);
            }
            None => {
                m.place(item, Token::new());
            }
        }
    }
    m.check(net).map_err(|e| Failure::usage(format!("bad --initial: {e}")))?;
    Ok(m)
}

fn finals(text: &str) -> Result<FinalsPredicate, Failure> {
    text.parse().map_err(Failure::usage)
}

pub(crate) fn validate(a: &FileArgs, io: &mut Io<'_>) -> CmdResult {
    let net = load(&a.file, io)?;
    let _ = writeln!(
        io.out,
        "ok {}: {} positions, {} transitions",
        net.name(),
        net.positions().len(),
        net.transitions().len()
    );
    Ok(EXIT_OK)
}

pub(crate) fn format(a: &FormatArgs, io: &mut Io<'_>) -> CmdResult {
    let net = load(&a.file, io)?;
    let text = dsl::format(&net);
    if a.check {
        if read(&a.file)? == text {
            return Ok(EXIT_OK);
        }
        let _ = writeln!(io.err, "{} is not in canonical form", a.file.display());
        return Ok(EXIT_FAIL);
    }
    let _ = io.out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn tokens(ts: &[Token]) -> String {
    ts.iter().map(Token::to_string).collect::<Vec<_>>().join(" + ")
}

/// `step k: tX branch b : before -> after`, with `-` for unbranched kinds.
pub fn trace_line(k: usize, e: &FiringEvent) -> String {
    let branch = e.branch.map_or_else(|| "-".to_owned(), |b| b.to_string());
    format!("step {k}: {} branch {branch} : {} -> {}", e.transition, tokens(&e.before), e.after)
}

fn script(path: &Path) -> Result<Vec<ScriptEntry>, Failure> {
    let text = read(path)?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(Failure::usage))
        .collect()
}

pub(crate) fn simulate(a: &SimulateArgs, io: &mut Io<'_>) -> CmdResult {
    let finals = finals(&a.finals)?;
    if a.script.is_some() && a.policy != Policy::Script {
        return Err(Failure::usage("--script needs --policy script"));
    }
    let net = load(&a.file, io)?;
    let m0 = initial_marking(&net, a.initial.as_deref())?;

    let (mut policy, mut env): (SchedulingPolicy, Box<dyn ResolutionSource>) = match a.policy {
        Policy::Order => (SchedulingPolicy::FirstByDeclaredOrder, Box::new(NoResolution)),
        Policy::Random => (SchedulingPolicy::seeded_random(a.seed), Box::new(RandomResolution::new(a.seed))),
        Policy::Script => {
            let path = a.script.as_ref().ok_or_else(|| Failure::usage("--policy script needs --script FILE"))?;
            (SchedulingPolicy::scripted(script(path)?), Box::new(NoResolution))
        }
    };
    let trace = run_with(&net, &m0, &mut policy, a.max_steps, env.as_mut())
        .map_err(|e| Failure::data(format!("simulation failed: {e}")))?;

    if a.trace {
        for (k, e) in trace.events.iter().enumerate() {
            let _ = writeln!(io.out, "{}", trace_line(k + 1, e));
        }
    }
    let accepting = finals.accepts_in(
        &net,
        &AbstractMarking::from(&m0),
        &AbstractMarking::from(&trace.final_marking),
    );
    let stop = match trace.stop {
        StopReason::Quiescent => "quiescent",
        StopReason::MaxSteps => "max-steps",
    };
    let _ = writeln!(
        io.out,
        "stop {stop} after {} steps; final {} ({})",
        trace.events.len(),
        trace.final_marking,
        if accepting { "accepting" } else { "not accepting" }
    );
    Ok(if trace.stop == StopReason::Quiescent && accepting {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn graph(net: &Net, initial: Option<&str>, max_states: usize) -> Result<StateGraph, Failure> {
    let m0 = initial_marking(net, initial)?;
    build_state_graph(net, &AbstractMarking::from(&m0), ExploreOptions { max_states }).map_err(|e| match e {
        AnalysisError::StateBudgetExceeded(_) => Failure::data(e.to_string()),
        AnalysisError::InvalidNet(_) => Failure::data(e.to_string()),
    })
}

pub(crate) fn analyze(a: &AnalyzeArgs, io: &mut Io<'_>) -> CmdResult {
    let requested: Option<Vec<CheckKind>> = a
        .checks
        .as_deref()
        .map(|s| s.split(',').filter(|c| !c.trim().is_empty()).map(str::parse).collect::<Result<_, _>>())
        .transpose()
        .map_err(Failure::usage)?;
    let finals = finals(&a.finals)?;
    let explicit_pattern = a
        .pattern
        .as_deref()
        .map(str::parse::<StagePattern>)
        .transpose()
        .map_err(|e| Failure::usage(format!("bad --pattern: {e}")))?;

    let net = load(&a.file, io)?;
    let pattern = match explicit_pattern {
        Some(p) => Some(p),
        None if net.name() == "EN_Def" => Some(EN_DEF_PATTERN.parse().expect("built-in pattern parses")),
        None => None,
    };
    let checks = match requested {
        Some(list) => {
            if list.contains(&CheckKind::Sequence) && pattern.is_none() {
                return Err(Failure::usage("the sequence check needs --pattern"));
            }
            list
        }
        None => CheckKind::ALL.to_vec(),
    };

    let g = graph(&net, a.initial.as_deref(), a.max_states)?;
    let mut all_pass = true;
    for kind in checks {
        let report: CheckReport = match kind {
            CheckKind::Safeness => check_safeness(&g),
            CheckKind::Deadlock => check_deadlock_freedom(&g, &finals),
            CheckKind::Coverage => check_transition_coverage(&g, &net),
            CheckKind::Conflict => check_conflict_freedom(&g, &net),
            CheckKind::Sequence => match &pattern {
                Some(p) => check_sequence_language(&g, p, &finals),
                None => {
                    let _ = writeln!(io.out, "SKIP sequence (no pattern)");
                    continue;
                }
            },
        };
        all_pass &= report.passed();
        let _ = writeln!(io.out, "{report}");
    }
    if let Some(path) = &a.dot {
        write_file(path, &enet::analysis::export_dot(&g))?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FAIL })
}

pub(crate) fn export_dot(a: &ExportDotArgs, io: &mut Io<'_>) -> CmdResult {
    let net = load(&a.file, io)?;
    let dot = enet::analysis::export_dot(&graph(&net, a.initial.as_deref(), a.max_states)?);
    match &a.out {
        Some(path) => write_file(path, &dot)?,
        None => {
            let _ = io.out.write_all(dot.as_bytes());
        }
    }
    Ok(EXIT_OK)
}
