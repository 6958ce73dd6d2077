use std::io::Write;
use std::path::PathBuf;

use jmcert::certifier::{certify as certify_set, reproduce_table1, s_min_isotropic, MeasurementSet, OrderingCertificate, Table1Grid, TableEntry};
use jmcert::channels::{default_nu_grid, eb_sufficient_report, eb_tms_scan, loss_with_excess, parse_channel, ChannelTag};
use jmcert::measurements::{parse_measurement, parse_measurement_list, spqd};
use jmcert::oracle::{run_battery, BatteryConfig, BatteryItem, ItemKind};
use serde_json::{json, Value};

use crate::config::{document, write_text, CliError, FileConfig, EXIT_FAILURE, EXIT_NOT_BROKEN};
use crate::format::{sig9, table};
use crate::Format;

/// Largest accepted eigenvalue-vs-closed-form deviation in the table reproduction.
const TABLE_TOLERANCE: f64 = 1e-9;

fn unsupported(command: &str, format: Format) -> CliError {
    CliError::input(format!("`{command}` does not produce {format:?} output").to_lowercase())
}

fn emit(path: Option<PathBuf>, text: &str, stdout: &mut impl Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(&p, text),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::failure(format!("stdout: {e}"))),
    }
}

/// Shortest round-trip representation, as in the JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite numbers serialize")
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub struct CertifyArgs {
    pub channel: Option<PathBuf>,
    pub measurements: Option<PathBuf>,
    pub fail_if_not_broken: bool,
    pub out: Option<PathBuf>,
}

pub fn certify(args: CertifyArgs, file: &FileConfig, format: Option<Format>, stdout: &mut impl Write) -> Result<u8, CliError> {
    file.restrict("certify", &["channel", "measurements", "fail_if_not_broken", "out"])?;
    let format = format.unwrap_or(Format::Json);
    if format == Format::Csv {
        return Err(unsupported("certify", format));
    }
    let (origin, doc) = document(args.channel.as_ref(), file, "channel")?;
    let channel = parse_channel(&doc).map_err(|e| CliError::located(&origin, e))?;
    let (origin, doc) = document(args.measurements.as_ref(), file, "measurements")?;
    let members = parse_measurement_list(&doc).map_err(|e| CliError::located(&origin, e))?;
    let set = MeasurementSet::new(members).map_err(|e| CliError::input(format!("{origin}: {e}")))?;
    let cert = certify_set(&set, &channel).map_err(|e| CliError::input(e.to_string()))?;
    log::info!("s_min = {}, s̄ = {}, broken = {}", cert.s_min_channel, cert.s_bar_set, cert.broken);

    let fail_if_not_broken = args.fail_if_not_broken || file.bool("fail_if_not_broken")?.unwrap_or(false);
    let text = match format {
        Format::Json => pretty(&cert.to_json()),
        _ => certificate_text(&cert),
    };
    emit(args.out.or(file.path("out")?), &text, stdout)?;
    Ok(if fail_if_not_broken && !cert.broken { EXIT_NOT_BROKEN } else { 0 })
}

fn certificate_text(cert: &OrderingCertificate) -> String {
    let rows = |m: &jmcert::linalg::RealMatrix| {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(|&v| sig9(v)).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let mut out = format!(
        "broken: {}\ns_min (channel): {}\ns_bar (set): {}\nmother T: [{}]\nmother noise: [{}]\nmother d: [{}]\n",
        cert.broken,
        sig9(cert.s_min_channel),
        sig9(cert.s_bar_set),
        rows(&cert.mother.transfer),
        rows(&cert.mother.noise),
        cert.mother.shift.iter().map(|&v| sig9(v)).collect::<Vec<_>>().join(" "),
    );
    if cert.mother.special_case.is_some() {
        out.push_str("special case: heterodyne_rescaled\n");
    }
    out.push_str(&format!("note: {}\n", cert.note));
    out
}

pub fn table1(
    class: Option<String>,
    csv: Option<PathBuf>,
    file: &FileConfig,
    format: Option<Format>,
    stdout: &mut impl Write,
) -> Result<u8, CliError> {
    file.restrict("table1", &["class", "csv"])?;
    let class = class.or(file.string("class")?);
    let tag = class
        .map(|c| c.parse::<ChannelTag>().map_err(|e| CliError::input(format!("--class: {e}"))))
        .transpose()?;
    let rows = reproduce_table1(&Table1Grid::default(), tag);
    let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);

    let csv_text = {
        let mut s = String::from("class,tau,nbar,s_min_eigen,s_min_closed,abs_diff\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.class.tag().name(),
                num(r.class.tau()),
                num(r.class.nbar()),
                num(r.s_min_eigen),
                match r.s_min_closed {
                    TableEntry::Threshold(v) => num(v),
                    other => other.to_string(),
                },
                num(r.abs_diff)
            ));
        }
        s
    };
    if let Some(path) = csv.or(file.path("csv")?) {
        write_text(&path, &csv_text)?;
    }
    let text = match format.unwrap_or(Format::Text) {
        Format::Csv => csv_text,
        Format::Json => {
            let closed = |e: &TableEntry| match e {
                TableEntry::Threshold(v) => json!(v),
                other => json!(other.to_string()),
            };
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "class": r.class.tag().name(),
                        "tau": r.class.tau(),
                        "nbar": r.class.nbar(),
                        "s_min_eigen": r.s_min_eigen,
                        "s_min_closed": closed(&r.s_min_closed),
                        "abs_diff": r.abs_diff,
                    })
                })
                .collect();
            pretty(&json!({ "rows": items, "max_abs_diff": worst, "tolerance": TABLE_TOLERANCE }))
        }
        Format::Text => {
            let mut out = String::new();
            for tag in ChannelTag::ALL {
                let section: Vec<Vec<String>> = rows
                    .iter()
                    .filter(|r| r.class.tag() == tag)
                    .map(|r| {
                        let closed = match r.s_min_closed {
                            TableEntry::Threshold(v) => sig9(v),
                            other => other.to_string(),
                        };
                        vec![sig9(r.class.tau()), sig9(r.class.nbar()), sig9(r.s_min_eigen), closed, sig9(r.abs_diff)]
                    })
                    .collect();
                if section.is_empty() {
                    continue;
                }
                out.push_str(&format!("== {} ==\n", tag.name()));
                out.push_str(&table(&["tau", "nbar", "s_min_eigen", "s_min_closed", "abs_diff"], &section));
                out.push('\n');
            }
            out.push_str(&format!("{} rows, max abs_diff {} (tolerance {})\n", rows.len(), sig9(worst), sig9(TABLE_TOLERANCE)));
            out
        }
    };
    emit(None, &text, stdout)?;
    if worst > TABLE_TOLERANCE {
        log::error!("table reproduction deviates by {worst:e}");
        return Ok(EXIT_FAILURE);
    }
    Ok(0)
}

pub fn smin(channel: Option<PathBuf>, file: &FileConfig, format: Option<Format>, stdout: &mut impl Write) -> Result<u8, CliError> {
    file.restrict("smin", &["channel"])?;
    let (origin, doc) = document(channel.as_ref(), file, "channel")?;
    let ch = parse_channel(&doc).map_err(|e| CliError::located(&origin, e))?;
    let s_min = s_min_isotropic(&ch);
    let text = match format.unwrap_or(Format::Text) {
        Format::Json => pretty(&json!({ "modes": ch.modes(), "s_min": s_min })),
        Format::Text => format!("s_min = {}\n", sig9(s_min)),
        f => return Err(unsupported("smin", f)),
    };
    emit(None, &text, stdout)?;
    Ok(0)
}

pub struct PqdGridArgs {
    pub model: Option<PathBuf>,
    pub s: Option<f64>,
    pub half_width: Option<f64>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn pqd_grid(args: PqdGridArgs, file: &FileConfig, format: Option<Format>, stdout: &mut impl Write) -> Result<u8, CliError> {
    file.restrict("pqd-grid", &["model", "s", "half_width", "points", "out"])?;
    let format = format.unwrap_or(Format::Csv);
    if format == Format::Text {
        return Err(unsupported("pqd-grid", format));
    }
    let (origin, doc) = document(args.model.as_ref(), file, "model")?;
    let model = parse_measurement(&doc).map_err(|e| CliError::located(&origin, e))?;
    let missing = |flag: &str| CliError::input(format!("missing --{flag}"));
    let s = args.s.or(file.f64("s")?).ok_or_else(|| missing("s"))?;
    let half_width = args.half_width.or(file.f64("half_width")?).ok_or_else(|| missing("half-width"))?;
    let points = args.points.or(file.usize("points")?).ok_or_else(|| missing("points"))?;
    if !s.is_finite() {
        return Err(CliError::input(format!("--s: expected a finite number, got {s}")));
    }
    if !(half_width >= 0.0) || !half_width.is_finite() {
        return Err(CliError::input(format!("--half-width: expected a finite non-negative number, got {half_width}")));
    }
    if points == 0 {
        return Err(CliError::input("--points: need at least one point per axis"));
    }
    let limit = model.convergence_limit();
    if !(s < limit) {
        return Err(CliError::input(format!(
            "--s: the {} density diverges for s ≥ {limit}; got s = {s}",
            model.label()
        )));
    }

    let step = if points > 1 { 2.0 * half_width / (points - 1) as f64 } else { 0.0 };
    let axis: Vec<f64> = (0..points)
        .map(|i| if points == 1 { 0.0 } else { -half_width + i as f64 * step })
        .collect();
    let mut samples = Vec::with_capacity(points * points * 2);
    for outcome in model.grid_outcomes() {
        for &z1 in &axis {
            for &z2 in &axis {
                let v = spqd(&model, outcome, s, [z1, z2]).map_err(|e| CliError::input(e.to_string()))?;
                samples.push((z1, z2, outcome.label(), v));
            }
        }
    }
    let text = if format == Format::Csv {
        let mut out = String::from("z1,z2,outcome,value\n");
        for (z1, z2, label, v) in &samples {
            out.push_str(&format!("{},{},{label},{}\n", num(*z1), num(*z2), num(*v)));
        }
        out
    } else {
        let rows: Vec<Value> = samples
            .iter()
            .map(|(z1, z2, label, v)| json!({ "z1": z1, "z2": z2, "outcome": label, "value": v }))
            .collect();
        pretty(&json!({ "model": model.label(), "s": s, "samples": rows }))
    };
    emit(args.out.or(file.path("out")?), &text, stdout)?;
    Ok(0)
}

pub fn oracle_validate(
    cutoff: Option<usize>,
    items: Vec<String>,
    file: &FileConfig,
    format: Option<Format>,
    stdout: &mut impl Write,
) -> Result<u8, CliError> {
    file.restrict("oracle-validate", &["cutoff", "item"])?;
    let mut config = BatteryConfig::default();
    if let Some(d) = cutoff.or(file.usize("cutoff")?) {
        if !(2..4096).contains(&d) {
            return Err(CliError::input(format!("--cutoff: expected 2 ≤ D < 4096, got {d}")));
        }
        config.cutoff = d;
    }
    let names = if items.is_empty() { file.strings("item")? } else { items };
    let only: Vec<ItemKind> = names
        .iter()
        .map(|n| n.parse::<ItemKind>().map_err(|e| CliError::input(format!("--item: {e}"))))
        .collect::<Result<_, _>>()?;
    let format = format.unwrap_or(Format::Text);
    if format == Format::Csv {
        return Err(unsupported("oracle-validate", format));
    }

    let results = run_battery(&config, &only);
    let all_passed = results.iter().all(BatteryItem::passed);
    let text = if format == Format::Json {
        let items: Vec<Value> = results
            .iter()
            .map(|item| {
                let checks: Vec<Value> = item
                    .checks
                    .iter()
                    .map(|c| match &c.report {
                        Ok(r) => json!({
                            "quantity": c.quantity,
                            "numeric": r.numeric,
                            "reference": r.reference,
                            "abs_error": r.abs_error,
                            "tolerance": c.tolerance,
                            "passed": c.passed(),
                        }),
                        Err(e) => json!({
                            "quantity": c.quantity,
                            "error": e,
                            "tolerance": c.tolerance,
                            "passed": false,
                        }),
                    })
                    .collect();
                json!({ "item": item.kind.name(), "passed": item.passed(), "checks": checks })
            })
            .collect();
        pretty(&json!({ "cutoff": config.cutoff, "passed": all_passed, "items": items }))
    } else {
        let mut out = String::new();
        for item in &results {
            let verdict = if item.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict} {} ({} checks)\n", item.kind, item.checks.len()));
            for c in &item.checks {
                out.push_str(&format!("    {c}\n"));
            }
        }
        let passed = results.iter().filter(|i| i.passed()).count();
        out.push_str(&format!("{passed} of {} items passed at cutoff {}\n", results.len(), config.cutoff));
        out
    };
    emit(None, &text, stdout)?;
    Ok(if all_passed { 0 } else { EXIT_FAILURE })
}

pub fn eb_check(
    tau: Option<f64>,
    epsilon: Option<f64>,
    nu_max: Option<f64>,
    file: &FileConfig,
    format: Option<Format>,
    stdout: &mut impl Write,
) -> Result<u8, CliError> {
    file.restrict("eb-check", &["tau", "epsilon", "nu_max"])?;
    let tau = tau.or(file.f64("tau")?).ok_or_else(|| CliError::input("missing --tau"))?;
    let epsilon = epsilon.or(file.f64("epsilon")?).ok_or_else(|| CliError::input("missing --epsilon"))?;
    let nu_max = nu_max.or(file.f64("nu_max")?).unwrap_or(jmcert::channels::DEFAULT_NU_MAX);
    if !(nu_max >= 1.0) || !nu_max.is_finite() {
        return Err(CliError::input(format!("--nu-max: expected a finite value ≥ 1, got {nu_max}")));
    }
    let format = format.unwrap_or(Format::Text);
    if format == Format::Csv {
        return Err(unsupported("eb-check", format));
    }
    let channel = loss_with_excess(tau, epsilon).map_err(|e| CliError::input(e.to_string()))?;
    let sufficient = eb_sufficient_report(&channel);
    let scan = eb_tms_scan(tau, epsilon, &default_nu_grid(nu_max)).map_err(|e| CliError::input(e.to_string()))?;
    let s_min = s_min_isotropic(&channel);
    let text = if format == Format::Json {
        pretty(&json!({
            "tau": tau,
            "epsilon": epsilon,
            "sufficient_condition": sufficient.is_psd,
            "sufficient_min_eigenvalue": sufficient.min_eigenvalue,
            "s_min": s_min,
            "scan_nu_range": [scan.scan_nu_range.0, scan.scan_nu_range.1],
            "tms_min_eigenvalue": scan.tms_min_eigenvalue,
            "argmin_nu": scan.argmin_nu,
            "separable_on_grid": scan.separable_on_grid,
        }))
    } else {
        format!(
            "loss channel τ = {}, ε = {}\n\
             sufficient condition N − I − iTΩTᵀ ≥ 0: {} (min eigenvalue {})\n\
             s_min = {}\n\
             two-mode squeezed scan ν ∈ [{}, {}]: min eigenvalue {} at ν = {}\n\
             separable on grid: {}\n",
            sig9(tau),
            sig9(epsilon),
            sufficient.is_psd,
            sig9(sufficient.min_eigenvalue),
            sig9(s_min),
            sig9(scan.scan_nu_range.0),
            sig9(scan.scan_nu_range.1),
            sig9(scan.tms_min_eigenvalue),
            sig9(scan.argmin_nu),
            scan.separable_on_grid,
        )
    };
    emit(None, &text, stdout)?;
    Ok(0)
}
