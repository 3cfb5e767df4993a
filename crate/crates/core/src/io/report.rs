use crate::calibration::FitResult;
use crate::experiments::MetricsReport;

/// Flat JSON object, keys in declaration order, absent events as `null`.
pub fn metrics_document(report: &MetricsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("metrics are plain data");
    s.push('\n');
    s
}

/// Flat `key = value` document; TOML-compatible.
pub fn fit_report(fit: &FitResult) -> String {
    let p = &fit.params;
    let lines = [
        format!("material = \"{}\"", p.name),
        format!("t_sw_c = {}", p.t_sw_c),
        format!("w_c = {}", p.w_c),
        format!("plateau_n = {}", fit.plateau_n),
        format!("e_rubbery_mpa = {}", p.e_rubbery_mpa),
        format!("e_glassy_mpa = {}", p.e_glassy_mpa),
        format!("rss = {:e}", fit.rss),
        format!("rss_init = {:e}", fit.rss_init),
        format!("iterations = {}", fit.iterations),
        format!("restart = {}", fit.restart),
        format!("converged = {}", fit.converged),
    ];
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
