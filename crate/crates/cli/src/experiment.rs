//! Experiment specs, the built-in `paper-matrix`, and report bundles.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use mibids::dataset::{load_csv, synthesize, MibGroup, SynthConfig};
use mibids::eval::{cross_validate, percent, seconds, EvaluationReport, MARKDOWN_HEADER};
use mibids::featsel::FeatureSubset;
use mibids::learn::ClassifierKind;
use mibids::{Dataset, Error, Result};

use crate::select::{select_features, Selector};
use crate::settings::Settings;

/// Summary table a cell is reported in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Table {
    Models,
    Groups,
    Frequent,
    Legacy,
    Custom,
}

impl Table {
    pub const ALL: [Table; 5] = [Table::Models, Table::Groups, Table::Frequent, Table::Legacy, Table::Custom];

    pub fn id(self) -> &'static str {
        match self {
            Table::Models => "models",
            Table::Groups => "groups",
            Table::Frequent => "frequent",
            Table::Legacy => "legacy",
            Table::Custom => "custom",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Table::Models => "Models evaluation results",
            Table::Groups => "Results based on each MIB group",
            Table::Frequent => "The most frequent features in all subsets",
            Table::Legacy => "Results based on the previous-work MIB subset",
            Table::Custom => "Other cells",
        }
    }

    fn parse(s: &str) -> Result<Table> {
        Table::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown table `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub name: String,
    pub table: Table,
    pub classifier: ClassifierKind,
    pub selector: Selector,
}

impl CellSpec {
    pub fn new(classifier: ClassifierKind, selector: Selector, table: Table) -> CellSpec {
        CellSpec {
            name: default_name(classifier, &selector),
            table,
            classifier,
            selector,
        }
    }

    fn group(&self) -> Option<MibGroup> {
        match self.selector {
            Selector::Group(g) | Selector::GroupGenetic(g) => Some(g),
            _ => None,
        }
    }

    fn slug(&self) -> String {
        let mut raw = self.name.clone();
        if let Some(g) = self.group() {
            raw = format!("{}-{raw}", g.as_str());
        }
        let mut out = String::new();
        for c in raw.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c.to_ascii_lowercase());
            } else if !out.ends_with('-') {
                out.push('-');
            }
        }
        out.trim_matches('-').to_string()
    }
}

/// Row label in the style of the published tables.
pub fn default_name(kind: ClassifierKind, selector: &Selector) -> String {
    let base = kind.display_name();
    match selector {
        Selector::None | Selector::Preset(_) | Selector::Frequent(_) | Selector::Group(_) => {
            base.to_string()
        }
        Selector::InfoGainTop(n) => format!("{base}+infogain+top{n}"),
        Selector::ReliefTop(n) => format!("{base}+reliefF+top{n}"),
        Selector::Genetic | Selector::GroupGenetic(_) => format!("{base}+geneticsearch"),
        Selector::Literal(_) => format!("{base}+subset"),
    }
}

/// The eighteen model rows, fifteen group rows, three frequent-feature rows
/// and three previous-work rows of the reference study.
pub fn paper_matrix() -> Vec<CellSpec> {
    let mut cells = Vec::new();
    for kind in ClassifierKind::ALL {
        for sel in [
            Selector::None,
            Selector::InfoGainTop(5),
            Selector::ReliefTop(5),
            Selector::InfoGainTop(10),
            Selector::ReliefTop(10),
            Selector::Genetic,
        ] {
            cells.push(CellSpec::new(kind, sel, Table::Models));
        }
    }
    for group in MibGroup::ALL {
        for kind in ClassifierKind::ALL {
            cells.push(CellSpec::new(kind, Selector::GroupGenetic(group), Table::Groups));
        }
    }
    for kind in ClassifierKind::ALL {
        cells.push(CellSpec::new(kind, Selector::Frequent(None), Table::Frequent));
    }
    for kind in ClassifierKind::ALL {
        cells.push(CellSpec::new(kind, Selector::Preset("wiener-legacy".into()), Table::Legacy));
    }
    cells
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv(PathBuf),
    Synth(SynthConfig),
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataSource::Csv(p) => load_csv(p),
            DataSource::Synth(cfg) => synthesize(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub settings: Settings,
    pub source: DataSource,
    pub cells: Vec<CellSpec>,
    pub k: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn from_settings(settings: Settings) -> Result<ExperimentSpec> {
        let source = match settings.raw("dataset.path") {
            Some(p) => DataSource::Csv(settings.resolve(p)),
            None => DataSource::Synth(settings.synth_config()?),
        };
        let mut cells = match settings.raw("matrix") {
            None => Vec::new(),
            Some("paper-matrix") => paper_matrix(),
            Some(m) => return Err(Error::InvalidConfig(format!("unknown matrix `{m}`"))),
        };
        for id in settings.cell_ids() {
            let key = |f: &str| format!("cell.{id}.{f}");
            let classifier: ClassifierKind = settings
                .raw(&key("classifier"))
                .ok_or_else(|| Error::InvalidConfig(format!("{} is missing", key("classifier"))))?
                .parse()?;
            let selector: Selector = settings.raw(&key("selector")).unwrap_or("none").parse()?;
            let table = settings
                .raw(&key("table"))
                .map(Table::parse)
                .transpose()?
                .unwrap_or(Table::Custom);
            let mut cell = CellSpec::new(classifier, selector, table);
            if let Some(name) = settings.raw(&key("name")) {
                cell.name = name.to_string();
            }
            cells.push(cell);
        }
        if cells.is_empty() {
            return Err(Error::InvalidConfig("experiment has no cells".into()));
        }
        let k = settings.get_or("cv.k", 10usize)?;
        let seed = settings.get_or("seed", 42u64)?;
        let out_dir = settings.resolve(settings.raw("out.dir").unwrap_or("results"));
        Ok(ExperimentSpec {
            settings,
            source,
            cells,
            k,
            seed,
            out_dir,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub report: EvaluationReport,
    pub trace: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub spec: CellSpec,
    pub result: std::result::Result<CellResult, String>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub source: String,
    pub records: usize,
    pub k: usize,
    pub seed: u64,
    pub cells: Vec<CellOutcome>,
}

fn run_cell(
    ds: &Dataset,
    spec: &ExperimentSpec,
    cell: &CellSpec,
    genetic_sources: &[FeatureSubset],
) -> Result<CellResult> {
    let selection = select_features(
        ds,
        cell.classifier,
        &cell.selector,
        &spec.settings,
        spec.seed,
        genetic_sources,
    )?;
    let classifier = spec.settings.classifier_spec(cell.classifier, spec.seed)?;
    let mut report = cross_validate(ds, &classifier, &selection.subset, spec.k, spec.seed)?;
    report.provenance.push(("selector".into(), cell.selector.to_string()));
    report.provenance.extend(selection.provenance);
    Ok(CellResult {
        report,
        trace: selection.trace,
    })
}

/// Runs `indices` on up to `jobs` threads; results come back by index.
fn run_parallel(
    ds: &Dataset,
    spec: &ExperimentSpec,
    indices: &[usize],
    genetic_sources: &[FeatureSubset],
    jobs: usize,
) -> Vec<(usize, std::result::Result<CellResult, String>)> {
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(indices.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(indices.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&cell) = indices.get(i) else { break };
                let r = run_cell(ds, spec, &spec.cells[cell], genetic_sources)
                    .map_err(|e| e.to_string());
                done.lock().expect("no panics while holding the lock").push((cell, r));
            });
        }
    });
    let mut out = done.into_inner().expect("threads joined");
    out.sort_by_key(|(i, _)| *i);
    out
}

/// Runs every cell. Frequent-feature cells run after the others, fed by the
/// subsets of the genetic cells in the models table (or of every
/// whole-pool genetic cell when that table has none). A failing cell is
/// recorded and the run continues; only a dataset load failure is fatal.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<ReportBundle> {
    let ds = spec.source.load()?;
    let (later, first): (Vec<usize>, Vec<usize>) = (0..spec.cells.len())
        .partition(|&i| matches!(spec.cells[i].selector, Selector::Frequent(_)));
    let mut results: Vec<Option<std::result::Result<CellResult, String>>> =
        vec![None; spec.cells.len()];
    for (i, r) in run_parallel(&ds, spec, &first, &[], jobs) {
        results[i] = Some(r);
    }
    if !later.is_empty() {
        let genetic_ok = |only_models: bool| -> Vec<FeatureSubset> {
            first
                .iter()
                .filter(|&&i| {
                    spec.cells[i].selector == Selector::Genetic
                        && (!only_models || spec.cells[i].table == Table::Models)
                })
                .filter_map(|&i| results[i].as_ref()?.as_ref().ok())
                .map(|r| r.report.subset.clone())
                .collect()
        };
        let mut sources = genetic_ok(true);
        if sources.is_empty() {
            sources = genetic_ok(false);
        }
        for (i, r) in run_parallel(&ds, spec, &later, &sources, jobs) {
            results[i] = Some(r);
        }
    }
    Ok(ReportBundle {
        source: ds.source().to_string(),
        records: ds.len(),
        k: spec.k,
        seed: spec.seed,
        cells: spec
            .cells
            .iter()
            .cloned()
            .zip(results)
            .map(|(spec, r)| CellOutcome {
                spec,
                result: r.expect("every cell ran"),
            })
            .collect(),
    })
}

impl ReportBundle {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }

    fn file_stem(&self, i: usize) -> String {
        format!("{:02}-{}", i + 1, self.cells[i].spec.slug())
    }

    /// Markdown summary in the layouts of the reference tables; one row per
    /// cell.
    pub fn summary_markdown(&self, timing: bool) -> String {
        let mut md = String::new();
        let _ = writeln!(md, "# Experiment summary\n");
        let _ = writeln!(
            md,
            "Dataset `{}` ({} records), {}-fold stratified cross-validation, seed {}.",
            self.source, self.records, self.k, self.seed
        );
        let time = |r: &EvaluationReport| {
            if timing {
                seconds(r.build_seconds)
            } else {
                "-".to_string()
            }
        };
        for table in Table::ALL {
            let rows: Vec<&CellOutcome> = self.cells.iter().filter(|c| c.spec.table == table).collect();
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(md, "\n## {}\n", table.title());
            match table {
                Table::Models | Table::Custom => {
                    let _ = writeln!(md, "{MARKDOWN_HEADER}");
                    for c in rows {
                        let _ = match &c.result {
                            Ok(r) => writeln!(md, "{}", r.report.markdown_row(&c.spec.name, timing)),
                            Err(_) => writeln!(md, "| {} | ERROR | ERROR | ERROR | ERROR | - |", c.spec.name),
                        };
                    }
                }
                Table::Groups => {
                    let _ = writeln!(md, "| Group | Algorithm | ACC | Time Taken (seconds) |\n|---|---|---|---|");
                    for c in rows {
                        let group = c.spec.group().map(|g| format!("{} Group", g.as_str())).unwrap_or_default();
                        let _ = match &c.result {
                            Ok(r) => writeln!(
                                md,
                                "| {group} | {} | {} | {} |",
                                c.spec.name,
                                percent(r.report.accuracy()),
                                time(&r.report)
                            ),
                            Err(_) => writeln!(md, "| {group} | {} | ERROR | - |", c.spec.name),
                        };
                    }
                }
                Table::Frequent | Table::Legacy => {
                    if let Some(Ok(r)) = rows.iter().map(|c| &c.result).find(|r| r.is_ok()) {
                        let _ = writeln!(md, "Features: `{}`\n", r.report.subset.to_literal());
                    }
                    let _ = writeln!(md, "| Algorithm | ACC | Time Taken (seconds) |\n|---|---|---|");
                    for c in rows {
                        let _ = match &c.result {
                            Ok(r) => writeln!(
                                md,
                                "| {} | {} | {} |",
                                c.spec.name,
                                percent(r.report.accuracy()),
                                time(&r.report)
                            ),
                            Err(_) => writeln!(md, "| {} | ERROR | - |", c.spec.name),
                        };
                    }
                }
            }
        }
        let selected: Vec<(usize, &CellOutcome)> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.spec.selector != Selector::None)
            .collect();
        if !selected.is_empty() {
            let _ = writeln!(md, "\n## Feature subsets\n");
            let _ = writeln!(md, "| Cell | Selector | Count | Features |\n|---|---|---|---|");
            for (i, c) in selected {
                if let Ok(r) = &c.result {
                    let s = &r.report.subset;
                    let _ = writeln!(md, "| {} | {} | {} | `{}` |", self.file_stem(i), c.spec.selector, s.len(), s.to_literal());
                }
            }
        }
        if self.failures() > 0 {
            let _ = writeln!(md, "\n## Failed cells\n");
            let _ = writeln!(md, "| Cell | Error |\n|---|---|");
            for (i, c) in self.cells.iter().enumerate() {
                if let Err(e) = &c.result {
                    let _ = writeln!(md, "| {} | {} |", self.file_stem(i), e.replace('|', "/"));
                }
            }
        }
        md
    }

    /// One row per cell with the unrounded metrics of its report.
    pub fn summary_csv(&self, timing: bool) -> String {
        let mut out = String::from(
            "cell,table,name,classifier,selector,status,features,subset,accuracy,precision,recall,f_measure,build_seconds\n",
        );
        for (i, c) in self.cells.iter().enumerate() {
            let head = format!(
                "{},{},{},{},{}",
                self.file_stem(i),
                c.spec.table.id(),
                c.spec.name,
                c.spec.classifier.id(),
                c.spec.selector.to_string().replace(',', " ")
            );
            let _ = match &c.result {
                Ok(r) => {
                    let m = &r.report.metrics;
                    writeln!(
                        out,
                        "{head},ok,{},\"{}\",{},{},{},{},{}",
                        r.report.subset.len(),
                        r.report.subset.to_literal(),
                        m.accuracy,
                        m.precision,
                        m.recall,
                        m.f_measure,
                        if timing { seconds(r.report.build_seconds) } else { String::new() }
                    )
                }
                Err(_) => writeln!(out, "{head},error,,,,,,,"),
            };
        }
        out
    }

    /// Per-group accuracies for a bar chart (group, classifier, accuracy).
    pub fn group_accuracy_csv(&self) -> String {
        let mut out = String::from("group,classifier,accuracy_percent\n");
        for c in &self.cells {
            if let (Table::Groups, Some(g), Ok(r)) = (c.spec.table, c.spec.group(), &c.result) {
                let _ = writeln!(
                    out,
                    "{},{},{:.2}",
                    g.as_str(),
                    c.spec.classifier.display_name(),
                    r.report.accuracy() * 100.0
                );
            }
        }
        out
    }

    /// Writes per-cell reports, subsets and traces plus the summaries.
    pub fn write(&self, dir: &Path, timing: bool) -> Result<()> {
        let cells_dir = dir.join("cells");
        fs::create_dir_all(&cells_dir)?;
        for (i, c) in self.cells.iter().enumerate() {
            let stem = cells_dir.join(self.file_stem(i));
            match &c.result {
                Ok(r) => {
                    fs::write(stem.with_extension("json"), r.report.to_json(timing))?;
                    fs::write(stem.with_extension("subset"), format!("{}\n", r.report.subset.to_literal()))?;
                    if let Some(trace) = &r.trace {
                        fs::write(stem.with_extension("trace.csv"), trace_csv(trace))?;
                    }
                }
                Err(e) => {
                    let v = serde_json::json!({
                        "cell": self.file_stem(i),
                        "classifier": c.spec.classifier.id(),
                        "selector": c.spec.selector.to_string(),
                        "error": e,
                    });
                    let mut text = serde_json::to_string_pretty(&v).expect("plain values");
                    text.push('\n');
                    fs::write(stem.with_extension("error.json"), text)?;
                }
            }
        }
        fs::write(dir.join("summary.md"), self.summary_markdown(timing))?;
        fs::write(dir.join("summary.csv"), self.summary_csv(timing))?;
        if self.cells.iter().any(|c| c.spec.table == Table::Groups) {
            fs::write(dir.join("group_accuracy.csv"), self.group_accuracy_csv())?;
        }
        Ok(())
    }
}

pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("generation,best_fitness\n");
    for (g, f) in trace.iter().enumerate() {
        let _ = writeln!(out, "{g},{f}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_matrix_shape() {
        let m = paper_matrix();
        let count = |t| m.iter().filter(|c| c.table == t).count();
        assert_eq!(
            (count(Table::Models), count(Table::Groups), count(Table::Frequent), count(Table::Legacy)),
            (18, 15, 3, 3)
        );
        assert_eq!(m[5].name, "BayesNet+geneticsearch");
        assert_eq!(m[2].name, "BayesNet+reliefF+top5");
        assert_eq!(m[18].slug(), "if-bayesnet-geneticsearch");
    }

    #[test]
    fn spec_from_settings() {
        let s = Settings::parse(
            "synth.total = 200\ncell.1.classifier = svm\ncell.1.selector = group:ip\ncell.1.table = groups\ncell.2.classifier = bayes\ncell.2.name = Plain\n",
        )
        .unwrap();
        let spec = ExperimentSpec::from_settings(s).unwrap();
        assert_eq!(spec.cells.len(), 2);
        assert_eq!(spec.cells[0].table, Table::Groups);
        assert_eq!(spec.cells[1].name, "Plain");
        assert_eq!((spec.k, spec.seed), (10, 42));
        assert!(matches!(spec.source, DataSource::Synth(_)));
    }

    #[test]
    fn empty_cell_list_is_invalid() {
        let s = Settings::parse("seed = 1").unwrap();
        assert!(matches!(ExperimentSpec::from_settings(s), Err(Error::InvalidConfig(_))));
        let s = Settings::parse("cell.1.selector = none").unwrap();
        assert!(ExperimentSpec::from_settings(s).is_err());
    }
}
