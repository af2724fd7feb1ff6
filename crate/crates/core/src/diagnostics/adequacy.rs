use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adequacy {
    pub reliable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Observations-per-predictor rule for the auxiliary VIF regressions.
/// The boundary `n == ratio_floor * predictors` counts as adequate.
pub fn sample_size_adequacy(n_respondents: usize, n_predictors: usize, ratio_floor: f64) -> Adequacy {
    let needed = ratio_floor * n_predictors as f64;
    if n_respondents as f64 >= needed {
        Adequacy { reliable: true, warning: None }
    } else {
        Adequacy {
            reliable: false,
            warning: Some(format!(
                "{n_respondents} respondents for {n_predictors} predictor(s) is below {ratio_floor} per predictor \
                 ({needed} needed); treat these VIF values as tentative"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_rule() {
        assert!(sample_size_adequacy(30, 4, 5.0).reliable);
        let low = sample_size_adequacy(12, 4, 5.0);
        assert!(!low.reliable);
        assert!(low.warning.unwrap().contains("tentative"));
        assert!(sample_size_adequacy(20, 4, 5.0).reliable);
    }
}
