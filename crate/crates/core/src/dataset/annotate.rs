use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controls::{project, sample_subset, ControlSubset, ControlVector};
use crate::error::SamplingError;
use crate::rng::stream_rng;

use super::load::DatasetExample;
use super::preprocess::PreparedExample;
use super::prompt::{render_prompt, Prompt, TEMPLATE_VERSION};

/// Default maximum number of controls per training example.
pub const DEFAULT_MAX_CONTROLS: usize = 5;

/// A training example conditioned on controls measured from its own output.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedExample {
    pub example: DatasetExample,
    pub subset: ControlSubset,
    pub controls: ControlVector<f64>,
    pub prompt: Prompt,
    /// The source output, byte for byte.
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationMeta {
    pub seed: u64,
    pub m: usize,
    pub sigma: Option<f64>,
    pub template_version: String,
}

/// One line of an annotated training file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub id: String,
    pub prompt: String,
    pub target: String,
    pub controls: ControlVector<f64>,
    pub meta: AnnotationMeta,
}

impl AnnotatedExample {
    pub fn to_record(&self, seed: u64, m: usize) -> AnnotationRecord {
        AnnotationRecord {
            id: self.example.id.clone(),
            prompt: self.prompt.text(),
            target: self.target.clone(),
            controls: self.controls.clone(),
            meta: AnnotationMeta {
                seed,
                m,
                sigma: None,
                template_version: TEMPLATE_VERSION.to_string(),
            },
        }
    }
}

/// Samples a control subset and tags the prompt with `f_C(y)`.
pub fn annotate_training<R: Rng + ?Sized>(
    prepared: &PreparedExample,
    m: usize,
    rng: &mut R,
) -> Result<AnnotatedExample, SamplingError> {
    let subset = sample_subset(m, rng)?;
    let controls = project(&prepared.features, &subset);
    let ex = &prepared.example;
    let prompt = render_prompt(&ex.instruction, &ex.input, &controls);
    Ok(AnnotatedExample {
        example: ex.clone(),
        subset,
        controls,
        prompt,
        target: ex.output.clone(),
    })
}

/// Annotates every example in parallel. Example `i` uses RNG stream
/// `prepared.index` of `seed`, so output is independent of thread count.
pub fn annotate_dataset(
    prepared: &[PreparedExample],
    m: usize,
    seed: u64,
) -> Result<Vec<AnnotatedExample>, SamplingError> {
    prepared
        .par_iter()
        .map(|p| annotate_training(p, m, &mut stream_rng(seed, p.index as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::preprocess::preprocess;
    use crate::dataset::prompt::parse_tags;
    use crate::feature::Feature;
    use crate::lingfeat::Extractor;

    fn prepared(output: &str) -> Vec<PreparedExample> {
        let ex = DatasetExample {
            id: "e".into(),
            instruction: "Describe two animals.".into(),
            input: String::new(),
            output: output.into(),
        };
        preprocess(&[ex], &Extractor::default()).0
    }

    #[test]
    fn m_one_gives_one_tag() {
        let p = prepared("The cat and the dog play in the big garden.");
        let mut rng = stream_rng(1, 0);
        for _ in 0..20 {
            let a = annotate_training(&p[0], 1, &mut rng).unwrap();
            assert_eq!(parse_tags(&a.prompt.user).len(), 1);
            assert_eq!(a.controls.len(), 1);
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let p = prepared("The cat and the dog play in the big garden.");
        let a = annotate_dataset(&p, 5, 7).unwrap();
        let b = annotate_dataset(&p, 5, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn word_count_tag() {
        let p = prepared("the cat saw the dog");
        let subset = ControlSubset::new(vec![Feature::TWord]).unwrap();
        let controls = project(&p[0].features, &subset);
        let prompt = render_prompt("x", "", &controls);
        assert!(prompt.user.contains("[t_word: 5]"));
    }

    #[test]
    fn target_is_verbatim_and_controls_match_subset() {
        let text = "  Odd   spacing,\tand “quotes” stay.  ";
        let p = prepared(text);
        let a = annotate_dataset(&p, 5, 3).unwrap();
        assert_eq!(a[0].target, text);
        assert_eq!(a[0].controls.subset().unwrap(), a[0].subset);
        let rec = a[0].to_record(3, 5);
        assert_eq!(rec.meta.template_version, TEMPLATE_VERSION);
        assert!(rec.meta.sigma.is_none());
    }
}
