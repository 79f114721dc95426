//! Human-readable rendering of a [`Report`].

use std::fmt::Write;

use crate::report::Report;

fn vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{}", x + 0.0)).collect();
    format!("[{}]", parts.join(", "))
}

fn matrix(m: &[Vec<f64>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| vec(r)).collect();
    format!("[{}]", rows.join("; "))
}

pub fn render(r: &Report) -> String {
    let mut out = String::new();
    let c = &r.command;
    let _ = writeln!(out, "{} {} (n = {}, m = {}) at {}", c.name, c.file, c.n, c.m, vec(&c.point));
    for q in &r.quasidifferentials {
        let _ = writeln!(out, "{} at {}: value {}", q.function, vec(&q.point), vec(&q.value));
        for g in &q.subd {
            let _ = writeln!(out, "  subd {}", matrix(g));
        }
        for g in &q.supd {
            let _ = writeln!(out, "  supd {}", matrix(g));
        }
    }
    if let Some(s) = &r.solver {
        let _ = writeln!(
            out,
            "solver: {} after {} steps, f {} -> {}, final point {}, distance {:e}",
            s.status,
            s.steps,
            s.initial_value,
            s.final_value,
            vec(&s.final_point),
            s.final_distance
        );
    }
    if let Some(v) = &r.verdict {
        let _ = writeln!(
            out,
            "{} condition {}",
            v.mode.as_str(),
            if v.holds { "holds" } else { "fails" }
        );
        if !v.active_constraints.is_empty() {
            let _ = writeln!(out, "  active constraints {:?}", v.active_constraints);
        }
        if let Some(w) = &v.witness {
            let at = w.point.map(|p| format!(" at point {}", p)).unwrap_or_default();
            let _ = writeln!(
                out,
                "  witness: coordinate {}{}, direction {}, derivative {}",
                w.coordinate,
                at,
                vec(&w.direction),
                vec(&w.derivative)
            );
        }
        for e in v.certificate.iter().flatten() {
            let _ = writeln!(
                out,
                "  certificate: coordinate {}, generator {}, gamma {}, lambda {}, residual {:e}",
                e.coordinate,
                vec(&e.generator),
                vec(&e.gamma),
                vec(&e.lambda),
                e.residual
            );
        }
    }
    if let Some(reg) = &r.diagnostics.regularity {
        let min_gap = reg.entries.iter().map(|e| e.gap).fold(f64::INFINITY, f64::min);
        let _ = writeln!(
            out,
            "quasiregularity: {} over {} tests (smallest gap {})",
            if reg.regular { "regular" } else { "not regular" },
            reg.entries.len(),
            min_gap
        );
    }
    for f in &r.diagnostics.fd_residuals {
        let _ = writeln!(
            out,
            "fd residual {}: {:e} over {} directions",
            f.function, f.max_residual, f.directions
        );
    }
    out
}
