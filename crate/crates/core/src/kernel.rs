//! Scalar losses φ applied coordinatewise; Φ(v) = Σ φ(v_i).

use crate::error::{invalid, Result};
use crate::tukey::MollifiedTukey;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelFunction {
    /// |t|^p, with 0^p = 0.
    PowerP { p: f64 },
    /// 1 if t ≠ 0.
    ZeroIndicator,
    /// ln|t| for |t| ≥ 1, else 0.
    LogAbs,
    /// |t|^p capped at τ^p.
    TukeyP { p: f64, tau: f64 },
    Huber { tau: f64 },
    Fair { tau: f64 },
    CauchyEst { tau: f64 },
    /// 2(√(1 + t²/2) − 1).
    L1L2,
    /// Tukey 1-loss smoothed on [3τ/4, 5τ/4].
    MollifiedTukey1 { tau: f64 },
}

impl KernelFunction {
    pub fn power(p: f64) -> Self {
        KernelFunction::PowerP { p }
    }

    /// Checks the parameter ranges (p > 0, τ > 0).
    pub fn validate(&self) -> Result<()> {
        use KernelFunction::*;
        let ok = match *self {
            PowerP { p } => p > 0.0 && p.is_finite(),
            TukeyP { p, tau } => p > 0.0 && tau > 0.0 && p.is_finite() && tau.is_finite(),
            Huber { tau } | Fair { tau } | CauchyEst { tau } | MollifiedTukey1 { tau } => {
                tau > 0.0 && tau.is_finite()
            }
            ZeroIndicator | LogAbs | L1L2 => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("kernel parameters out of range: {self:?}"))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        use KernelFunction::*;
        let a = t.abs();
        match *self {
            PowerP { p } => {
                if a == 0.0 {
                    0.0
                } else {
                    a.powf(p)
                }
            }
            ZeroIndicator => {
                if a == 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            LogAbs => {
                if a >= 1.0 {
                    a.ln()
                } else {
                    0.0
                }
            }
            TukeyP { p, tau } => {
                if a == 0.0 {
                    0.0
                } else if a <= tau {
                    a.powf(p)
                } else {
                    tau.powf(p)
                }
            }
            Huber { tau } => {
                if a <= tau {
                    a * a / (2.0 * tau)
                } else {
                    a - tau / 2.0
                }
            }
            Fair { tau } => tau * tau * (a / tau - (a / tau).ln_1p()),
            CauchyEst { tau } => 0.5 * tau * tau * ((t / tau) * (t / tau)).ln_1p(),
            L1L2 => 2.0 * ((1.0 + t * t / 2.0).sqrt() - 1.0),
            MollifiedTukey1 { tau } => MollifiedTukey::new(tau).eval(t),
        }
    }

    /// Short tag used in CSV output.
    pub fn name(&self) -> &'static str {
        use KernelFunction::*;
        match self {
            PowerP { .. } => "power",
            ZeroIndicator => "zero",
            LogAbs => "log",
            TukeyP { .. } => "tukey",
            Huber { .. } => "huber",
            Fair { .. } => "fair",
            CauchyEst { .. } => "cauchy",
            L1L2 => "l1l2",
            MollifiedTukey1 { .. } => "mollified_tukey",
        }
    }

    /// The exponent p where the kernel has one; NaN otherwise.
    pub fn exponent(&self) -> f64 {
        match *self {
            KernelFunction::PowerP { p } | KernelFunction::TukeyP { p, .. } => p,
            KernelFunction::ZeroIndicator => 0.0,
            _ => f64::NAN,
        }
    }

    /// Integer exponent when this is |t|^p for a non-negative integer p.
    pub fn integer_power(&self) -> Option<u32> {
        match *self {
            KernelFunction::PowerP { p } if p.fract() == 0.0 && p > 0.0 && p < 64.0 => {
                Some(p as u32)
            }
            _ => None,
        }
    }

    /// Parses the CLI spelling: `power`, `zero`, `log`, `tukey`, `huber`, `fair`,
    /// `cauchy`, `l1l2`, `mollified_tukey`.
    pub fn parse(name: &str, p: Option<f64>, tau: Option<f64>) -> Result<Self> {
        let need_p = || p.ok_or_else(|| crate::Error::InvalidInput(format!("kernel {name} needs --p")));
        let tau_or_one = tau.unwrap_or(1.0);
        let k = match name {
            "power" => KernelFunction::PowerP { p: need_p()? },
            "zero" => KernelFunction::ZeroIndicator,
            "log" => KernelFunction::LogAbs,
            "tukey" => KernelFunction::TukeyP {
                p: need_p()?,
                tau: tau_or_one,
            },
            "huber" => KernelFunction::Huber { tau: tau_or_one },
            "fair" => KernelFunction::Fair { tau: tau_or_one },
            "cauchy" => KernelFunction::CauchyEst { tau: tau_or_one },
            "l1l2" => KernelFunction::L1L2,
            "mollified_tukey" => KernelFunction::MollifiedTukey1 { tau: tau_or_one },
            other => return invalid(format!("unknown kernel '{other}'")),
        };
        k.validate()?;
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all(tau: f64) -> Vec<KernelFunction> {
        use KernelFunction::*;
        vec![
            PowerP { p: 0.5 },
            PowerP { p: 1.0 },
            PowerP { p: 3.0 },
            ZeroIndicator,
            LogAbs,
            TukeyP { p: 1.5, tau },
            Huber { tau },
            Fair { tau },
            CauchyEst { tau },
            L1L2,
            MollifiedTukey1 { tau },
        ]
    }

    #[test]
    fn power_at_zero_is_zero() {
        for p in [0.1, 0.5, 1.0, 2.0] {
            assert_eq!(KernelFunction::power(p).eval(0.0), 0.0);
        }
        assert_eq!(KernelFunction::ZeroIndicator.eval(0.0), 0.0);
    }

    #[test]
    fn known_values() {
        use KernelFunction::*;
        assert_eq!(Huber { tau: 2.0 }.eval(1.0), 0.25);
        assert_eq!(Huber { tau: 2.0 }.eval(3.0), 2.0);
        assert_eq!(TukeyP { p: 2.0, tau: 1.5 }.eval(4.0), 2.25);
        assert!((LogAbs.eval(std::f64::consts::E) - 1.0).abs() < 1e-15);
        assert_eq!(LogAbs.eval(0.5), 0.0);
        assert!((L1L2.eval(2.0) - 2.0 * (3f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn kernels_even_and_nonnegative(t in -10.0f64..10.0, tau in 0.1f64..5.0) {
            for k in all(tau) {
                let a = k.eval(t);
                let b = k.eval(-t);
                prop_assert!(a >= 0.0, "{k:?} negative at {t}");
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{k:?} not even at {t}");
            }
        }
    }
}
