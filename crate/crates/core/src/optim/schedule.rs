/// The `a_t` sequence of Nesterov's method, `a_0 = 1`,
/// `a_t = (1 + √(4a_{t−1}² + 1)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NesterovSchedule {
    pub a: f64,
    pub t: u64,
}

impl NesterovSchedule {
    pub fn new() -> Self {
        Self { a: 1.0, t: 0 }
    }
}

impl Default for NesterovSchedule {
    fn default() -> Self {
        Self::new()
    }
}

/// Returns `m_t = (a_t − 1) / a_{t+1}` and the schedule advanced to `t + 1`.
pub fn nesterov_momentum(sched: NesterovSchedule) -> (f64, NesterovSchedule) {
    let a_next = (1.0 + (4.0 * sched.a * sched.a + 1.0).sqrt()) / 2.0;
    let m = (sched.a - 1.0) / a_next;
    (m, NesterovSchedule { a: a_next, t: sched.t + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_momenta() {
        let (m0, s1) = nesterov_momentum(NesterovSchedule::new());
        assert_eq!(m0, 0.0);
        assert!((s1.a - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let (m1, s2) = nesterov_momentum(s1);
        // a_2 = (1 + √(4·φ² + 1)) / 2 with φ the golden ratio.
        assert!((s2.a - 2.193_527).abs() < 1e-6, "a_2 = {}", s2.a);
        assert!((m1 - 0.281_754).abs() < 1e-6, "m_1 = {m1}");
        assert_eq!(s2.t, 2);
    }

    #[test]
    fn a_strictly_increases() {
        let mut s = NesterovSchedule::new();
        for _ in 0..1000 {
            let (_, next) = nesterov_momentum(s);
            assert!(next.a > s.a);
            s = next;
        }
    }
}
