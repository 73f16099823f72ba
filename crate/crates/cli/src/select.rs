//! Feature selectors addressable from configs and the command line.

use std::fmt;
use std::str::FromStr;

use mibids::dataset::{apply_bins, fit_bins, group_features, FeatureId, MibGroup, DEFAULT_BINS};
use mibids::eval::stratified_subsample;
use mibids::featsel::{
    frequent_features, genetic_search, info_gain, preset, rank_top_n, relieff, wrapper_fitness,
    FeatureSubset, GaOutcome, Ranking, WRAPPER_FOLDS,
};
use mibids::learn::ClassifierKind;
use mibids::{Dataset, Error, Result};

use crate::settings::Settings;

#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    None,
    InfoGainTop(usize),
    ReliefTop(usize),
    Genetic,
    Preset(String),
    Group(MibGroup),
    GroupGenetic(MibGroup),
    /// Features shared by the genetic subsets of the same experiment;
    /// `None` requires all of them.
    Frequent(Option<usize>),
    Literal(FeatureSubset),
}

impl Selector {
    pub fn is_genetic(&self) -> bool {
        matches!(self, Selector::Genetic | Selector::GroupGenetic(_))
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Selector> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(Selector::Literal(FeatureSubset::parse_literal(s, "literal")?));
        }
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a.trim())),
            None => (s, None),
        };
        let count = |a: Option<&str>| -> Result<usize> {
            a.and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::InvalidConfig(format!("selector `{s}` needs a count")))
        };
        let sel = match head.to_ascii_lowercase().as_str() {
            "none" | "all" => Selector::None,
            "infogain-top" => Selector::InfoGainTop(count(arg)?),
            "relieff-top" => Selector::ReliefTop(count(arg)?),
            "genetic" => Selector::Genetic,
            "preset" => {
                let name = arg.unwrap_or("");
                preset(name)?;
                Selector::Preset(name.to_string())
            }
            "group" => Selector::Group(arg.unwrap_or("").parse()?),
            "group-genetic" => Selector::GroupGenetic(arg.unwrap_or("").parse()?),
            "frequent" => Selector::Frequent(arg.map(|a| count(Some(a))).transpose()?),
            _ => return Err(Error::InvalidConfig(format!("unknown selector `{s}`"))),
        };
        Ok(sel)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::None => f.write_str("none"),
            Selector::InfoGainTop(n) => write!(f, "infogain-top:{n}"),
            Selector::ReliefTop(n) => write!(f, "relieff-top:{n}"),
            Selector::Genetic => f.write_str("genetic"),
            Selector::Preset(p) => write!(f, "preset:{p}"),
            Selector::Group(g) => write!(f, "group:{g}"),
            Selector::GroupGenetic(g) => write!(f, "group-genetic:{g}"),
            Selector::Frequent(None) => f.write_str("frequent"),
            Selector::Frequent(Some(t)) => write!(f, "frequent:{t}"),
            Selector::Literal(s) => f.write_str(&s.to_literal()),
        }
    }
}

/// A chosen subset with notes on how it was obtained.
#[derive(Debug, Clone)]
pub struct Selection {
    pub subset: FeatureSubset,
    pub provenance: Vec<(String, String)>,
    pub trace: Option<Vec<f64>>,
}

impl Selection {
    fn plain(subset: FeatureSubset) -> Selection {
        Selection {
            subset,
            provenance: Vec::new(),
            trace: None,
        }
    }
}

pub fn infogain_ranking(ds: &Dataset, settings: &Settings) -> Result<Ranking> {
    let bins = fit_bins(ds, settings.get_or("rank.bins", DEFAULT_BINS)?)?;
    info_gain(&apply_bins(&bins, ds)?)
}

pub fn relieff_ranking(ds: &Dataset, settings: &Settings, seed: u64) -> Result<Ranking> {
    relieff(ds, &settings.relief_config(seed)?)
}

/// Genetic wrapper search over `pool` with the settings' GA and wrapper keys.
pub fn genetic_select(
    ds: &Dataset,
    kind: ClassifierKind,
    pool: &[FeatureId],
    settings: &Settings,
    seed: u64,
) -> Result<(GaOutcome, Vec<(String, String)>)> {
    let folds = settings.get_or("wrapper.folds", WRAPPER_FOLDS)?;
    let sample = settings.wrapper_sample(kind)?;
    let data = match sample {
        Some(n) => stratified_subsample(ds, n, folds, seed)?,
        None => ds.clone(),
    };
    let spec = settings.wrapper_spec(kind, seed)?;
    let mut fitness = wrapper_fitness(&data, spec.clone(), folds, seed)?;
    let cfg = settings.ga_config(seed)?;
    let outcome = genetic_search(pool, &cfg, |s| fitness.evaluate(s))?;
    let provenance = vec![
        (
            "ga".to_string(),
            format!(
                "P={} G={} pc={} pm={} seed={}",
                cfg.population, cfg.generations, cfg.crossover, cfg.mutation, cfg.seed
            ),
        ),
        (
            "wrapper".to_string(),
            format!("{}; {folds}-fold CV on {} records", spec.describe(), data.len()),
        ),
        ("ga_best_fitness".to_string(), outcome.best_fitness.to_string()),
    ];
    Ok((outcome, provenance))
}

/// Resolves a selector against the full dataset. `genetic_sources` feeds
/// the frequent-feature selector.
pub fn select_features(
    ds: &Dataset,
    kind: ClassifierKind,
    selector: &Selector,
    settings: &Settings,
    seed: u64,
    genetic_sources: &[FeatureSubset],
) -> Result<Selection> {
    Ok(match selector {
        Selector::None => Selection::plain(FeatureSubset::full()),
        Selector::InfoGainTop(n) => {
            let mut sel = Selection::plain(rank_top_n(&infogain_ranking(ds, settings)?, *n)?);
            sel.provenance
                .push(("ranking".into(), "infogain computed once on the full dataset".into()));
            sel
        }
        Selector::ReliefTop(n) => {
            let mut sel = Selection::plain(rank_top_n(&relieff_ranking(ds, settings, seed)?, *n)?);
            sel.provenance
                .push(("ranking".into(), "relieff computed once on the full dataset".into()));
            sel
        }
        Selector::Genetic | Selector::GroupGenetic(_) => {
            let (pool, label) = match selector {
                Selector::GroupGenetic(g) => {
                    (g.members(), format!("genetic-{}", g.as_str().to_ascii_lowercase()))
                }
                _ => (FeatureId::all(), "genetic".to_string()),
            };
            let (outcome, provenance) = genetic_select(ds, kind, &pool, settings, seed)?;
            Selection {
                subset: outcome.subset.relabel(label),
                provenance,
                trace: Some(outcome.trace),
            }
        }
        Selector::Preset(name) => Selection::plain(preset(name)?),
        Selector::Group(g) => Selection::plain(group_features(g.as_str())?),
        Selector::Frequent(t) => {
            if genetic_sources.is_empty() {
                return Err(Error::InvalidConfig(
                    "frequent selector needs at least one genetic cell".into(),
                ));
            }
            let subset = frequent_features(genetic_sources, *t)?;
            if subset.is_empty() {
                return Err(Error::EmptySubset);
            }
            let mut sel = Selection::plain(subset);
            sel.provenance.push((
                "frequent_sources".into(),
                genetic_sources
                    .iter()
                    .map(|s| s.to_literal())
                    .collect::<Vec<_>>()
                    .join(" "),
            ));
            sel
        }
        Selector::Literal(s) => Selection::plain(s.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_round_trip() {
        for s in [
            "none",
            "infogain-top:5",
            "relieff-top:10",
            "genetic",
            "preset:gs-bayes",
            "group:IP",
            "group-genetic:ICMP",
            "frequent",
            "frequent:2",
            "{3,7,9}",
        ] {
            let sel: Selector = s.parse().unwrap();
            assert_eq!(sel.to_string(), s);
        }
    }

    #[test]
    fn selector_errors() {
        for s in ["chi2", "infogain-top", "preset:gs-knn", "group:DNS", "frequent:x", "{0}"] {
            assert!(s.parse::<Selector>().is_err(), "{s}");
        }
        assert_eq!("group:ip".parse::<Selector>().unwrap(), Selector::Group(MibGroup::Ip));
    }
}
