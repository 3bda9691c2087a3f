//! Closed-form uncertainty signals `a sin(w t)` / `a cos(w t)`.

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signal {
    pub amplitude: f64,
    pub omega: f64,
    pub wave: Wave,
}

impl Signal {
    pub const ZERO: Signal = Signal {
        amplitude: 0.0,
        omega: 0.0,
        wave: Wave::Sin,
    };

    pub fn sin(amplitude: f64, omega: f64) -> Self {
        Self {
            amplitude,
            omega,
            wave: Wave::Sin,
        }
    }

    pub fn cos(amplitude: f64, omega: f64) -> Self {
        Self {
            amplitude,
            omega,
            wave: Wave::Cos,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let phase = self.omega * t;
        self.amplitude
            * match self.wave {
                Wave::Sin => phase.sin(),
                Wave::Cos => phase.cos(),
            }
    }

    /// `sup_t |s(t)|`.
    pub fn bound(&self) -> f64 {
        self.amplitude.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_bounds() {
        let s = Signal::sin(0.3, 5.0);
        assert_eq!(s.eval(0.0), 0.0);
        assert!((s.eval(core::f64::consts::PI / 10.0) - 0.3).abs() < 1e-15);
        let c = Signal::cos(4.0, 4.0);
        assert_eq!(c.eval(0.0), 4.0);
        assert_eq!(Signal::ZERO.eval(12.3), 0.0);
        for i in 0..100_001 {
            let t = i as f64 * 1e-3;
            assert!(s.eval(t).abs() <= s.bound());
            assert!(c.eval(t).abs() <= c.bound());
        }
    }
}
