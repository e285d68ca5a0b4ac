/// One step of the weighted-sum loss: the mean of the previous value and the
/// newest loss. Starting from zero, the first value is half the first loss.
pub fn wsl_update(wsl_prev: f64, loss: f64) -> f64 {
    (wsl_prev + loss) / 2.0
}

/// Weighted-sum loss of a whole history, `Σ_i l_i / 2^(k−i+1)` for `i = 1..k`.
///
/// # Panics
/// If `losses` is empty.
pub fn wsl_closed_form(losses: &[f64]) -> f64 {
    assert!(!losses.is_empty(), "weighted-sum loss needs at least one loss");
    let k = losses.len();
    losses.iter().enumerate().map(|(i, l)| l * 0.5f64.powi((k - i) as i32)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_examples() {
        assert_eq!(wsl_update(0.0, 1.0), 0.5);
        assert_eq!(wsl_update(1.0, 1.0), 1.0);
        assert_eq!(wsl_update(1.0, 0.5), 0.75);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(wsl_closed_form(&[1.0]), 0.5);
        assert_eq!(wsl_closed_form(&[1.0; 4]), 0.9375);
    }

    #[test]
    #[should_panic]
    fn closed_form_rejects_empty() {
        wsl_closed_form(&[]);
    }
}
