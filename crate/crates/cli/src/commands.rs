use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mibids::dataset::{load_csv, save_csv, synthesize};
use mibids::eval::{cross_validate, MARKDOWN_HEADER};
use mibids::featsel::FeatureSubset;
use mibids::learn::ClassifierKind;
use mibids::{FeatureId, MibGroup};

use crate::experiment::{run_experiment, trace_csv, ExperimentSpec};
use crate::select::{genetic_select, infogain_ranking, relieff_ranking, select_features, Selector};
use crate::settings::Settings;

/// Settings from an optional file plus `key=value` overrides.
pub fn settings(config: Option<&Path>, overrides: &[String]) -> Result<Settings> {
    let mut s = match config {
        Some(p) => Settings::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => Settings::default(),
    };
    for kv in overrides {
        s.apply_override(kv)?;
    }
    Ok(s)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn synth(settings: &Settings, out: &Path) -> Result<usize> {
    let ds = synthesize(&settings.synth_config()?)?;
    save_csv(&ds, out).with_context(|| format!("writing {}", out.display()))?;
    Ok(ds.len())
}

pub fn rank(data: &Path, method: &str, settings: &Settings, seed: u64, out: Option<&Path>) -> Result<()> {
    let ds = load_csv(data).with_context(|| format!("loading {}", data.display()))?;
    let ranking = match method {
        "infogain" => infogain_ranking(&ds, settings)?,
        "relieff" => relieff_ranking(&ds, settings, seed)?,
        other => bail!("unknown ranking method `{other}` (expected infogain or relieff)"),
    };
    let mut buf = Vec::new();
    ranking.write_csv(&mut buf)?;
    write_or_print(out, &String::from_utf8(buf)?)
}

/// Genetic wrapper search; writes the subset literal to `out` and the
/// best-so-far fitness per generation next to it.
pub fn select(
    data: &Path,
    classifier: ClassifierKind,
    group: Option<MibGroup>,
    settings: &Settings,
    seed: u64,
    out: Option<&Path>,
) -> Result<FeatureSubset> {
    let ds = load_csv(data).with_context(|| format!("loading {}", data.display()))?;
    let pool = group.map(MibGroup::members).unwrap_or_else(FeatureId::all);
    let (outcome, _) = genetic_select(&ds, classifier, &pool, settings, seed)?;
    let literal = format!("{}\n", outcome.subset.to_literal());
    match out {
        Some(p) => {
            fs::write(p, &literal).with_context(|| format!("writing {}", p.display()))?;
            fs::write(trace_path(p), trace_csv(&outcome.trace))?;
        }
        None => {
            print!("{literal}");
            print!("{}", trace_csv(&outcome.trace));
        }
    }
    Ok(outcome.subset)
}

pub fn trace_path(subset_path: &Path) -> PathBuf {
    let mut name = subset_path.file_name().unwrap_or_default().to_os_string();
    name.push(".trace.csv");
    subset_path.with_file_name(name)
}

pub struct EvalArgs<'a> {
    pub data: &'a Path,
    pub classifier: ClassifierKind,
    pub selector: Selector,
    pub k: usize,
    pub seed: u64,
    pub timing: bool,
    pub out: Option<&'a Path>,
    pub save_model: Option<&'a Path>,
}

/// Cross-validates one classifier and prints its table row.
pub fn eval(args: &EvalArgs, settings: &Settings) -> Result<String> {
    let ds = load_csv(args.data).with_context(|| format!("loading {}", args.data.display()))?;
    let selection = select_features(&ds, args.classifier, &args.selector, settings, args.seed, &[])?;
    let spec = settings.classifier_spec(args.classifier, args.seed)?;
    let mut report = cross_validate(&ds, &spec, &selection.subset, args.k, args.seed)?;
    report.provenance.push(("selector".into(), args.selector.to_string()));
    report.provenance.extend(selection.provenance);
    if let Some(p) = args.out {
        fs::write(p, report.to_json(args.timing)).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = args.save_model {
        let model = spec.fit(&mibids::dataset::project(&ds, &selection.subset)?)?;
        fs::write(p, model.to_text()).with_context(|| format!("writing {}", p.display()))?;
    }
    let name = crate::experiment::default_name(args.classifier, &args.selector);
    Ok(format!("{MARKDOWN_HEADER}\n{}\n", report.markdown_row(&name, args.timing)))
}

pub struct ExperimentOutcome {
    pub cells: usize,
    pub failures: usize,
    pub out_dir: PathBuf,
}

/// `spec` is a config path or the built-in name `paper-matrix`.
pub fn experiment(
    spec: &str,
    overrides: &[String],
    out: Option<&Path>,
    jobs: usize,
    timing: bool,
) -> Result<ExperimentOutcome> {
    let mut settings = if spec == "paper-matrix" {
        let mut s = Settings::default();
        s.set("matrix", "paper-matrix")?;
        s
    } else {
        let path = Path::new(spec);
        Settings::load(path).with_context(|| format!("reading {}", path.display()))?
    };
    for kv in overrides {
        settings.apply_override(kv)?;
    }
    let mut spec = ExperimentSpec::from_settings(settings)?;
    if let Some(o) = out {
        spec.out_dir = o.to_path_buf();
    }
    let bundle = run_experiment(&spec, jobs)?;
    bundle
        .write(&spec.out_dir, timing)
        .with_context(|| format!("writing {}", spec.out_dir.display()))?;
    Ok(ExperimentOutcome {
        cells: bundle.cells.len(),
        failures: bundle.failures(),
        out_dir: spec.out_dir,
    })
}
