//! Bundled six-variant calibration study data.
//!
//! Characteristic values of the six steering-feel variants (plus rating
//! tables including the repeated reference drive) back binding
//! resolution of the builtin prediction models, backtests, and the
//! regression tests.

use crate::charvals::{load_cvsets_str, CharacteristicValueSet};
use crate::error::Result;
use crate::ingest::{load_ratings_str, RatingTable};

const STUDY_CVS: &str = include_str!("../data/study_cvs.csv");
const STUDY_RATINGS: &str = include_str!("../data/study_ratings.csv");
const STUDY_LIKING: &str = include_str!("../data/study_liking.csv");
const STUDY_INTENSITY: &str = include_str!("../data/study_intensity.csv");

/// Characteristic values of the six study variants (40 entries each).
pub fn study_cvs() -> Result<Vec<CharacteristicValueSet>> {
    load_cvsets_str(STUDY_CVS, "builtin:study_cvs.csv")
}

/// Mean liking and intensity ratings of all seven drives, the repeated
/// reference (`RV*`) included.
pub fn study_ratings() -> Result<RatingTable> {
    load_ratings_str(STUDY_RATINGS, "builtin:study_ratings.csv")
}

/// Mean liking ratings of the six distinct variants.
pub fn study_liking() -> Result<RatingTable> {
    load_ratings_str(STUDY_LIKING, "builtin:study_liking.csv")
}

/// Mean intensity ratings of the six distinct variants (no overall
/// intensity is rated).
pub fn study_intensity() -> Result<RatingTable> {
    load_ratings_str(STUDY_INTENSITY, "builtin:study_intensity.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Aspect, Criterion};

    #[test]
    fn study_cvs_load_consistently() {
        let sets = study_cvs().unwrap();
        assert_eq!(sets.len(), 6);
        let ids: Vec<&str> = sets.iter().map(|s| s.variant_id.as_str()).collect();
        assert_eq!(ids, ["RV", "RD↑", "RD↓", "ST↑", "ST↓", "EF↓"]);
        for set in &sets {
            assert_eq!(set.len(), 40, "variant {}", set.variant_id);
            assert!(set.warnings.is_empty(), "variant {}", set.variant_id);
        }
        let rv = &sets[0];
        let key = |t: &str| crate::charvals::CvKey::parse(t).unwrap();
        assert_eq!(rv.get(&key("mh/0/v0")), Some(0.18));
        assert_eq!(rv.get(&key("dh/0/phase@1.5")), Some(-86.4));
        assert_eq!(sets[5].get(&key("ay/0/phase@1.5")), Some(-15.0));
    }

    #[test]
    fn study_ratings_cover_all_drives() {
        let table = study_ratings().unwrap();
        assert_eq!(table.entries().len(), 91);
        let variants = table.variants();
        assert_eq!(variants.len(), 7);
        assert!(variants.contains(&"RV*"));
        // the repetition rates every liking criterion and every
        // intensity criterion except the overall rating
        assert_eq!(
            table.criteria(Aspect::Liking).len(),
            7,
            "liking criteria"
        );
        assert_eq!(table.criteria(Aspect::Intensity).len(), 6);
        assert_eq!(
            table.get("mean", "RV*", Criterion::Ral, Aspect::Liking),
            Some(7.9)
        );
        assert_eq!(table.get("mean", "RV*", Criterion::Or, Aspect::Intensity), None);
    }

    #[test]
    fn split_tables_match_combined() {
        let liking = study_liking().unwrap();
        let intensity = study_intensity().unwrap();
        assert_eq!(liking.entries().len(), 42);
        assert_eq!(intensity.entries().len(), 36);
        let combined = study_ratings().unwrap();
        for e in liking.entries() {
            assert_eq!(
                combined.get(&e.subject, &e.variant, e.criterion, e.aspect),
                Some(e.value),
                "{} {} mismatch",
                e.variant,
                e.criterion.as_str()
            );
        }
        for e in intensity.entries() {
            assert_eq!(
                combined.get(&e.subject, &e.variant, e.criterion, e.aspect),
                Some(e.value)
            );
        }
    }
}
