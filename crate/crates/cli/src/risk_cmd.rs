use std::str::FromStr;

use enet::endef::{run_defining_session, Routing, SessionInput, DEFAULT_MAX_RETRIES};
use enet::risk::{build_plan, load_registers, render_register, Decimal, RiskRegister};

use crate::args::RiskArgs;
use crate::net_cmds::{read, write_file};
use crate::{CmdResult, Failure, Io, EXIT_FAIL, EXIT_OK};

fn decimal(flag: &str, text: &str) -> Result<Decimal, Failure> {
    Decimal::from_str(text.trim()).map_err(|_| Failure::usage(format!("--{flag}: `{text}` is not a number")))
}

pub(crate) fn risk(a: &RiskArgs, io: &mut Io<'_>) -> CmdResult {
    let threshold = decimal("treat-threshold", &a.treat_threshold)?;
    let unit_cost = decimal("unit-cost", &a.unit_cost)?;
    if unit_cost < Decimal::ZERO {
        return Err(Failure::usage("--unit-cost must not be negative"));
    }
    let routing: Routing = a.routing.parse().map_err(Failure::usage)?;
    let (assets, threats, matrix) = (read(&a.assets)?, read(&a.threats)?, read(&a.matrix)?);

    let (seed, diags) = load_registers(&assets, &threats, &matrix);
    for d in &diags {
        io.diagnostic(&d.to_string());
    }
    let seed = match seed {
        Some(seed) if !diags.iter().any(|d| d.is_error()) => seed,
        _ => return Ok(EXIT_FAIL),
    };
    let direct = RiskRegister::from_seed(seed);

    let register = if a.via_net {
        let input = SessionInput {
            operator: a.operator.clone(),
            assets,
            threats,
            matrix,
            routing,
            validity_override: None,
        };
        let outcome = run_defining_session(&input, DEFAULT_MAX_RETRIES)
            .map_err(|e| Failure::data(format!("defining session failed: {e}")))?;
        if outcome.register != direct {
            return Err(Failure::data("register from the EN_Def session differs from the direct computation"));
        }
        let _ = writeln!(
            io.err,
            "EN_Def session: {} -> {}, {} retries",
            outcome.trace.labels().join(" "),
            outcome.target,
            outcome.retries
        );
        outcome.register
    } else {
        direct
    };

    let plan = build_plan(&register.risks, threshold, unit_cost).map_err(|e| Failure::usage(e.to_string()))?;
    let text = render_register(&plan);
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            let _ = writeln!(
                io.out,
                "wrote {} risks to {} (total budget {})",
                plan.entries.len(),
                path.display(),
                plan.total_budget
            );
        }
        None => {
            let _ = io.out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_OK)
}
