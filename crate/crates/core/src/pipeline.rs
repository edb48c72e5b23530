//! Per-user and cohort runs: frames, generators, group aggregation.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::discretize::{BinningScheme, RangeBin};
use crate::frame::Frame;
use crate::ingest::Dataset;
use crate::model::{RunConfig, TimeSeries, Vocabulary};
use crate::protoforms::{
    gen_group, generate_all, GenContext, ProtoformType, Summary, TemplateRegistry,
};
use crate::Error;

/// Everything fixed across users.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: RunConfig,
    pub vocab: Vocabulary,
    pub templates: TemplateRegistry,
    /// Raw-range bins that override the vocabulary, by attribute.
    pub bins: BTreeMap<String, Vec<RangeBin>>,
    /// `None` runs every type.
    pub protoforms: Option<BTreeSet<ProtoformType>>,
}

impl Setup {
    pub fn new(config: RunConfig, vocab: Vocabulary) -> Self {
        Self {
            config,
            vocab,
            templates: TemplateRegistry::default(),
            bins: BTreeMap::new(),
            protoforms: None,
        }
    }

    pub fn context(&self) -> GenContext<'_> {
        GenContext::new(&self.config, &self.vocab, &self.templates)
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.config.validate()?;
        self.vocab.validate()?;
        self.templates.validate()?;
        for bins in self.bins.values() {
            BinningScheme::from_range_bins(bins)?;
        }
        Ok(())
    }

    /// Raw ranges when configured for the attribute, otherwise SAX.
    pub fn scheme_for(&self, attribute: &str) -> Result<BinningScheme, Error> {
        if let Some(bins) = self
            .bins
            .get(attribute)
            .or_else(|| self.vocab.raw_ranges.get(attribute))
        {
            return Ok(BinningScheme::from_range_bins(bins)?);
        }
        let n = self.config.alphabet_size;
        Ok(BinningScheme::sax(n, self.vocab.standard_labels(n))?)
    }
}

/// Summaries of one frame.
#[derive(Debug, Clone)]
pub struct FrameSummaries {
    pub frame: Frame,
    pub summaries: Vec<Summary>,
}

/// One univariate frame per attribute plus a joint frame when there are several.
pub fn build_frames(series: &[TimeSeries], setup: &Setup) -> Result<Vec<Frame>, Error> {
    let mut sets: Vec<Vec<&TimeSeries>> = series.iter().map(|s| vec![s]).collect();
    if series.len() > 1 {
        sets.push(series.iter().collect());
    }
    sets.into_iter()
        .map(|set| {
            let schemes = set
                .iter()
                .map(|s| setup.scheme_for(s.attribute()))
                .collect::<Result<Vec<_>, _>>()?;
            let phrases: Vec<String> = set
                .iter()
                .map(|s| setup.vocab.attribute_phrase(s.attribute()))
                .collect();
            Ok(Frame::build(
                &set,
                &schemes,
                &phrases,
                setup.config.granularity,
                setup.config.window_mode,
            )?)
        })
        .collect()
}

/// Runs every generator over every frame of one user.
pub fn summarize(series: &[TimeSeries], setup: &Setup) -> Result<Vec<FrameSummaries>, Error> {
    let frames = build_frames(series, setup)?;
    let ctx = setup.context();
    frames
        .into_par_iter()
        .map(|frame| {
            let summaries = generate_all(&frame, &ctx, setup.protoforms.as_ref())?;
            Ok(FrameSummaries { frame, summaries })
        })
        .collect()
}

/// Per-user results and the group summaries built from them.
#[derive(Debug, Clone)]
pub struct CohortRun {
    pub users: Vec<String>,
    pub per_user: Vec<Vec<FrameSummaries>>,
    pub group: Vec<Summary>,
}

pub fn summarize_cohort(dataset: &Dataset, setup: &Setup) -> Result<CohortRun, Error> {
    let users: Vec<String> = dataset.users.keys().cloned().collect();
    // a requested group type needs the individual types it is built from
    let mut individual = setup.clone();
    if let Some(filter) = &mut individual.protoforms {
        filter.extend(
            ProtoformType::INDIVIDUAL
                .into_iter()
                .filter(|t| setup.protoforms.as_ref().is_some_and(|f| f.contains(&t.group_type()))),
        );
    }
    let per_user = dataset
        .users
        .par_iter()
        .map(|(user, series)| {
            summarize(series, &individual).map_err(|e| Error::User {
                user: user.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let flat: Vec<Vec<Summary>> = per_user
        .iter()
        .map(|frames| frames.iter().flat_map(|f| f.summaries.iter().cloned()).collect())
        .collect();
    let mut group = gen_group(&flat, setup.config.granularity, &setup.context())?;
    if let Some(filter) = &setup.protoforms {
        // group types can be requested directly or through their individual type
        group.retain(|s| {
            filter.contains(&s.kind) || s.group_of.is_some_and(|g| filter.contains(&g))
        });
    }
    Ok(CohortRun {
        users,
        per_user,
        group,
    })
}
