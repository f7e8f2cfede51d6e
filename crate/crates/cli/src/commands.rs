//! The four subcommands. Each returns a process exit code: 0 success,
//! 1 usage/configuration/IO failure, 2 non-convergence.

use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;

use serde_json::json;

use fhutch_core::compact::{read_point_set, write_point_set};
use fhutch_core::harness::{
    run_convergence_suite, run_lemma14_suite, run_lemma15_suite, run_lifted_contraction_suite,
    SuiteSpec,
};
use fhutch_core::hutchinson::{CorollaryForm, StopReason};
use fhutch_core::metric::{check_b_triangle, check_f_axioms_with, FGridSpec, TauGridSpec};
use fhutch_core::sample::SampleSpec;
use fhutch_core::{hausdorff, hausdorff_accelerated, BMetric, HausdorffValue, PointSet};

use crate::config::SystemConfig;
use crate::fmt::sig12;
use crate::raster::RasterImage;

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_NO_CONVERGENCE: i32 = 2;

/// Print one line to stdout. A consumer that closes the pipe early (think
/// `fhutch … | head`) ends the process with the conventional SIGPIPE code
/// instead of a panic; 141 never collides with a success exit.
fn outln(text: impl AsRef<str>) {
    let mut stdout = std::io::stdout();
    let written = stdout
        .write_all(text.as_ref().as_bytes())
        .and_then(|()| stdout.write_all(b"\n"));
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        eprintln!("cannot write to stdout: {e}");
        std::process::exit(EXIT_USAGE);
    }
}

/// All suite names `verify` accepts, in the order `all` runs them.
const ALL_SUITES: [&str; 10] = [
    "axioms",
    "lemma14",
    "lemma15",
    "lifted",
    "convergence",
    "eq-1.2",
    "eq-1.3",
    "cor-2.5",
    "cor-2.6",
    "cor-2.7",
];

/// `iterate`: run the union operator to its attractor and write
/// `attractor.csv`, `trace.csv`, and `result.json` into `out`.
pub fn cmd_iterate(cfg: &SystemConfig, out: &Path) -> i32 {
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("cannot create output directory `{}`: {e}", out.display());
        return EXIT_USAGE;
    }
    let (result, trace) = match cfg.system.iterate(&cfg.seed, &cfg.params) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("iteration failed: {e}");
            return EXIT_USAGE;
        }
    };

    let write_all = || -> std::io::Result<()> {
        let mut csv = Vec::new();
        write_point_set(&mut csv, &result.attractor, true)
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        fs::write(out.join("attractor.csv"), csv)?;
        fs::write(out.join("trace.csv"), trace.to_csv())?;
        fs::write(out.join("result.json"), result.metadata_json())?;
        Ok(())
    };
    if let Err(e) = write_all() {
        eprintln!("cannot write results under `{}`: {e}", out.display());
        return EXIT_USAGE;
    }

    outln(format!(
        "{} after {} steps; {} points; residual {}",
        result.stop,
        trace.steps.len(),
        result.attractor.len(),
        sig12(result.residual)
    ));
    if result.stop == StopReason::Converged {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    }
}

/// `verify`: run the selected suites against the configured system and
/// print one JSON report; exit 0 iff everything passed.
pub fn cmd_verify(cfg: &SystemConfig, suites: &[String]) -> i32 {
    if suites.is_empty() {
        eprintln!("no suites selected");
        return EXIT_USAGE;
    }
    let selected: Vec<&str> = if suites.iter().any(|s| s == "all") {
        ALL_SUITES.to_vec()
    } else {
        let mut chosen = Vec::new();
        for name in suites {
            match ALL_SUITES.iter().find(|&&s| s == name) {
                Some(&s) => {
                    if !chosen.contains(&s) {
                        chosen.push(s);
                    }
                }
                None => {
                    eprintln!(
                        "unknown suite `{name}` (expected all or one of: {})",
                        ALL_SUITES.join(", ")
                    );
                    return EXIT_USAGE;
                }
            }
        }
        chosen
    };

    let mut entries = Vec::new();
    let mut all_passed = true;
    for name in selected {
        let (passed, report) = match run_suite(cfg, name) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("suite {name} could not run: {e}");
                return EXIT_USAGE;
            }
        };
        all_passed &= passed;
        entries.push(json!({ "suite": name, "passed": passed, "report": report }));
    }

    let doc = json!({ "passed": all_passed, "config": cfg.to_json(), "suites": entries });
    outln(serde_json::to_string_pretty(&doc).expect("plain JSON"));
    if all_passed {
        EXIT_OK
    } else {
        EXIT_USAGE
    }
}

fn run_suite(
    cfg: &SystemConfig,
    name: &str,
) -> fhutch_core::Result<(bool, serde_json::Value)> {
    let system = &cfg.system;
    let metric = system.metric();
    let dim = system.dim();
    let spec = SuiteSpec::default();
    let pairs = SampleSpec { count: 1000, ..SampleSpec::default() };

    Ok(match name {
        "axioms" => {
            let tri =
                check_b_triangle(metric, dim, &SampleSpec { count: 10_000, ..Default::default() })?;
            let f = *system.f();
            let fax = check_f_axioms_with(
                |alpha| f.eval(alpha).expect("axiom probes are positive"),
                f.h(),
                &FGridSpec::default(),
            );
            let tau = system.tau().check_liminf(&TauGridSpec::default());
            let passed = tri.passed() && fax.all_pass() && tau.passed();
            (
                passed,
                json!({
                    "b_triangle": tri,
                    "f_axioms": fax,
                    "tau_liminf": tau,
                }),
            )
        }
        "lemma14" => {
            let report = run_lemma14_suite(metric, dim, &spec)?;
            (report.passed(), serde_json::to_value(&report).expect("plain data"))
        }
        "lemma15" => {
            let report = run_lemma15_suite(metric, dim, &spec)?;
            (report.passed(), serde_json::to_value(&report).expect("plain data"))
        }
        "lifted" => {
            let report = run_lifted_contraction_suite(system, &SuiteSpec::with_cases(500))?;
            (report.passed(), serde_json::to_value(&report).expect("plain data"))
        }
        "convergence" => {
            let seeds = convergence_seeds(cfg);
            let report = run_convergence_suite(system, &seeds, &cfg.params)?;
            (report.passed(), serde_json::to_value(&report).expect("plain data"))
        }
        "eq-1.2" => {
            let mut reports = Vec::new();
            let mut passed = true;
            for idx in 0..system.maps().len() {
                let report = system.certify_pointwise(idx, &pairs)?;
                passed &= report.passed();
                reports.push(report);
            }
            (passed, serde_json::to_value(&reports).expect("plain data"))
        }
        "eq-1.3" => {
            let trajectory = system.trajectory(&cfg.seed, 10, Some(trajectory_cell(cfg)))?;
            let pairs: Vec<(PointSet, PointSet)> =
                trajectory.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            let report = system.certify_set_level(&pairs)?;
            (report.passed(), serde_json::to_value(&report).expect("plain data"))
        }
        "cor-2.5" | "cor-2.6" | "cor-2.7" => {
            let form = CorollaryForm::ALL
                .into_iter()
                .find(|f| f.id().wire() == name)
                .expect("selector names match wire ids");
            let report = system.certify_corollary(form, &pairs)?;
            (
                report.passed() && report.consistent(),
                serde_json::to_value(&report).expect("plain data"),
            )
        }
        other => unreachable!("suite selector `{other}` was validated"),
    })
}

/// Seeds for the convergence suite: the configured seed plus canonical
/// distant singletons, so attractors from genuinely different starts get
/// compared.
fn convergence_seeds(cfg: &SystemConfig) -> Vec<PointSet> {
    let dim = cfg.system.dim();
    let zeros = PointSet::from_flat(dim, vec![0.0; dim]).expect("singleton");
    let ones = PointSet::from_flat(dim, vec![1.0; dim]).expect("singleton");
    let mut seeds = vec![cfg.seed.clone()];
    for extra in [zeros, ones] {
        if seeds.iter().all(|s| *s != extra) {
            seeds.push(extra);
        }
    }
    seeds
}

/// Decimation cell for the set-level certificate's trajectory: coarse
/// enough to keep ten iterates around ~10³ points, scaled to the system's
/// geometry (seed extent, translation extent, at least the unit box).
fn trajectory_cell(cfg: &SystemConfig) -> f64 {
    let mut scale: f64 = 1.0;
    scale = scale.max(cfg.seed.bbox_diagonal());
    for map in cfg.system.maps() {
        for &t in map.translation() {
            scale = scale.max(t.abs());
        }
    }
    scale * 2f64.powi(-5)
}

/// `distance`: Hausdorff distance between two CSV point sets, printed with
/// its witnesses. `--accel` switches to the grid-indexed evaluator, whose
/// output must be byte-identical.
pub fn cmd_distance(a: &Path, b: &Path, metric_flag: &str, accel: bool) -> i32 {
    let metric = match parse_metric_flag(metric_flag) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    let (set_a, set_b) = match (load_csv(a), load_csv(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    if set_a.dim() != set_b.dim() {
        eprintln!(
            "dimension mismatch: `{}` has dimension {}, `{}` has {}",
            a.display(),
            set_a.dim(),
            b.display(),
            set_b.dim()
        );
        return EXIT_USAGE;
    }

    let computed = if accel {
        hausdorff_accelerated(&set_a, &set_b, &metric)
    } else {
        hausdorff(&set_a, &set_b, &metric)
    };
    match computed {
        Ok(h) => {
            print_distance(&h);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("distance failed: {e}");
            EXIT_USAGE
        }
    }
}

fn print_distance(h: &HausdorffValue) {
    outln(format!("H = {}", sig12(h.value)));
    outln(format!(
        "forward: a[{}] = {} -> b[{}] = {}",
        h.forward_idx.0, h.forward.0, h.forward_idx.1, h.forward.1
    ));
    outln(format!(
        "backward: b[{}] = {} -> a[{}] = {}",
        h.backward_idx.0, h.backward.0, h.backward_idx.1, h.backward.1
    ));
}

/// Accepted metric flags: `euclidean`, `abs-diff`, `snowflake:p=N`.
fn parse_metric_flag(flag: &str) -> Result<BMetric, String> {
    match flag {
        "euclidean" => return Ok(BMetric::Euclidean),
        "abs-diff" => return Ok(BMetric::AbsDiff),
        _ => {}
    }
    if let Some(rest) = flag.strip_prefix("snowflake:p=") {
        let p: f64 = rest
            .parse()
            .map_err(|_| format!("cannot parse snowflake exponent `{rest}`"))?;
        return BMetric::snowflake(BMetric::Euclidean, p).map_err(|e| e.to_string());
    }
    Err(format!(
        "unknown metric `{flag}` (expected euclidean, abs-diff, or snowflake:p=N)"
    ))
}

fn load_csv(path: &Path) -> Result<PointSet, String> {
    let file = fs::File::open(path)
        .map_err(|e| format!("cannot read `{}`: {e}", path.display()))?;
    read_point_set(BufReader::new(file))
        .map_err(|e| format!("`{}`: {e}", path.display()))
}

/// `render`: rasterize a 2-D CSV point set to a binary PGM.
pub fn cmd_render(
    input: &Path,
    out: &Path,
    size: &str,
    viewport: Option<&str>,
) -> i32 {
    let set = match load_csv(input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    if set.dim() != 2 {
        eprintln!("render requires dimension 2 (input has dimension {})", set.dim());
        return EXIT_USAGE;
    }

    let Some((w, h)) = parse_size(size) else {
        eprintln!("cannot parse size `{size}` (expected WIDTHxHEIGHT)");
        return EXIT_USAGE;
    };
    let view = match viewport {
        None => RasterImage::auto_viewport(&set),
        Some(text) => match parse_viewport(text) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("{e}");
                return EXIT_USAGE;
            }
        },
    };

    let mut img = match RasterImage::new(w, h, view) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    img.splat(&set);

    let bytes = img.to_pgm();
    let write = fs::File::create(out).and_then(|mut f| f.write_all(&bytes));
    if let Err(e) = write {
        eprintln!("cannot write `{}`: {e}", out.display());
        return EXIT_USAGE;
    }
    outln(format!("wrote {}x{} PGM ({} bytes) to {}", w, h, bytes.len(), out.display()));
    EXIT_OK
}

fn parse_size(text: &str) -> Option<(usize, usize)> {
    let (w, h) = text.split_once('x')?;
    let w: usize = w.parse().ok()?;
    let h: usize = h.parse().ok()?;
    (w >= 1 && h >= 1).then_some((w, h))
}

fn parse_viewport(text: &str) -> Result<(f64, f64, f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("cannot parse viewport `{text}` (expected x0,y0,x1,y1)"));
    }
    let mut vals = [0.0f64; 4];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse viewport coordinate `{p}`"))?;
    }
    Ok((vals[0], vals[1], vals[2], vals[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_flags_parse() {
        assert_eq!(parse_metric_flag("euclidean").unwrap(), BMetric::Euclidean);
        assert_eq!(parse_metric_flag("abs-diff").unwrap(), BMetric::AbsDiff);
        let snow = parse_metric_flag("snowflake:p=2").unwrap();
        assert_eq!(snow.b(), 2.0);
        assert!(parse_metric_flag("manhattan").is_err());
        assert!(parse_metric_flag("snowflake:p=abc").is_err());
    }

    #[test]
    fn size_and_viewport_parse() {
        assert_eq!(parse_size("512x512"), Some((512, 512)));
        assert_eq!(parse_size("1x3"), Some((1, 3)));
        assert_eq!(parse_size("0x3"), None);
        assert_eq!(parse_size("abc"), None);
        assert_eq!(parse_viewport("0,0,1,1").unwrap(), (0.0, 0.0, 1.0, 1.0));
        assert!(parse_viewport("0,0,1").is_err());
        assert!(parse_viewport("0,0,one,1").is_err());
    }

    #[test]
    fn suite_selector_covers_every_certificate_form() {
        for form in CorollaryForm::ALL {
            assert!(
                ALL_SUITES.contains(&form.id().wire()),
                "{} missing from the selector",
                form.id()
            );
        }
    }
}
