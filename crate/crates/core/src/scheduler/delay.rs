//! Per-REPORT scheduling budget `D_q`.
//!
//! With gated grants the packet that just misses a REPORT waits for the next
//! REPORT and then for that REPORT's grant, so consecutive budgets must obey
//! `D_{q-1} + D_q + T_rtt/2 <= D_max`.

use crate::config::DelayPolicy;
use crate::error::{Result, SimError};
use crate::time::SimTime;
use crate::types::OnuState;

/// How a budget was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetRule {
    Fixed,
    Variable,
    /// The previous gap already consumed the whole delay bound; the budget
    /// is zero and the grant necessarily falls back to earliest-finish.
    Clamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayBudget {
    pub d_q: SimTime,
    pub rule: BudgetRule,
}

impl DelayBudget {
    pub fn forced_eft(&self) -> bool {
        self.rule == BudgetRule::Clamped
    }
}

/// `(D_max - T_rtt/2) / 2`, constant across REPORTs.
pub fn fixed_delay_bound(onu: &OnuState) -> Result<SimTime> {
    let half_rtt = onu.rtt.half();
    if onu.d_max <= half_rtt {
        return Err(SimError::DelayBoundUnsatisfiable {
            onu: onu.id,
            d_max: onu.d_max,
            half_rtt,
        });
    }
    Ok((onu.d_max - half_rtt).half())
}

/// `D_max - D_{q-1} - T_rtt/2`, clamped to zero when the previous gap left
/// nothing.
pub fn variable_delay_bound(onu: &OnuState) -> DelayBudget {
    let used = onu.d_prev + onu.rtt.half();
    if onu.d_max > used {
        DelayBudget {
            d_q: onu.d_max - used,
            rule: BudgetRule::Variable,
        }
    } else {
        DelayBudget {
            d_q: SimTime::ZERO,
            rule: BudgetRule::Clamped,
        }
    }
}

/// Budget for the next grant under `policy`.
///
/// The fixed policy keeps `D_const` while the previous gap stayed within it;
/// after a late (earliest-finish) grant the gap exceeds `D_const` and the
/// variable rule is used until the gap is back under the constant.
pub fn delay_budget(onu: &OnuState, policy: DelayPolicy) -> DelayBudget {
    match policy {
        DelayPolicy::Fixed if onu.d_prev <= onu.d_const => DelayBudget {
            d_q: onu.d_const,
            rule: BudgetRule::Fixed,
        },
        _ => variable_delay_bound(onu),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;

    fn onu(d_max: SimTime, rtt: SimTime, d_prev: SimTime) -> OnuState {
        let cfg = SimConfig { d_max, rtt, ..SimConfig::default() };
        let mut o = OnuState::new(0, &cfg).unwrap();
        o.d_prev = d_prev;
        o
    }

    #[test]
    fn fixed_bound_examples() {
        let o = onu(SimTime::from_ms(10), SimTime::from_us(200), SimTime::ZERO);
        assert_eq!(fixed_delay_bound(&o).unwrap(), SimTime::from_ns(4_950_000));
        let o = onu(SimTime::from_ms(5), SimTime::from_us(200), SimTime::ZERO);
        assert_eq!(fixed_delay_bound(&o).unwrap(), SimTime::from_ns(2_450_000));
        let rtt = SimTime::from_us(200);
        let o = onu(rtt.half() + SimTime::from_ns(2), rtt, SimTime::ZERO);
        assert_eq!(fixed_delay_bound(&o).unwrap(), SimTime::from_ns(1));
    }

    #[test]
    fn fixed_bound_rejects_unsatisfiable() {
        let mut o = onu(SimTime::from_ms(10), SimTime::from_us(200), SimTime::ZERO);
        o.d_max = SimTime::from_us(100);
        assert!(matches!(
            fixed_delay_bound(&o),
            Err(SimError::DelayBoundUnsatisfiable { .. })
        ));
    }

    #[test]
    fn variable_bound_examples() {
        let o = onu(SimTime::from_ms(10), SimTime::from_us(200), SimTime::from_ms(6));
        assert_eq!(
            variable_delay_bound(&o),
            DelayBudget { d_q: SimTime::from_ns(3_900_000), rule: BudgetRule::Variable }
        );
        let o = onu(SimTime::from_ms(10), SimTime::from_us(200), SimTime::from_us(9_950));
        let b = variable_delay_bound(&o);
        assert_eq!(b.d_q, SimTime::ZERO);
        assert!(b.forced_eft());
    }

    #[test]
    fn variable_reduces_to_fixed_at_the_fixed_point() {
        let mut o = onu(SimTime::from_ms(10), SimTime::from_us(200), SimTime::ZERO);
        o.d_prev = o.d_const;
        // D_max - T_rtt/2 is even here, so the fixed point is exact.
        assert_eq!(variable_delay_bound(&o).d_q, o.d_const);
    }

    #[test]
    fn fixed_policy_switches_to_variable_after_a_long_gap() {
        let mut o = onu(SimTime::from_ms(10), SimTime::from_us(200), SimTime::ZERO);
        o.d_prev = o.d_const;
        assert_eq!(delay_budget(&o, DelayPolicy::Fixed).rule, BudgetRule::Fixed);
        o.d_prev = SimTime::from_ms(7);
        let b = delay_budget(&o, DelayPolicy::Fixed);
        assert_eq!(b.rule, BudgetRule::Variable);
        assert_eq!(b.d_q, SimTime::from_ns(2_900_000));
        o.d_prev = SimTime::from_ms(1);
        assert_eq!(delay_budget(&o, DelayPolicy::Variable).d_q, SimTime::from_ns(8_900_000));
    }
}
