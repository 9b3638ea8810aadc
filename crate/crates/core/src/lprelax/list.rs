use super::{LpError, SpeedAssignment, SpeedClass};
use crate::rational::Rational;
use crate::schedule::{Schedule, Segment};
use crate::taskmodel::Instance;

/// Event-driven non-preemptive list scheduling in which a free machine only
/// takes an available task of its own speed class. Tasks are prioritised by
/// `(chain index, position in chain)` and free machines are filled in index
/// order.
pub fn speed_based_list_schedule(instance: &Instance, assignment: &SpeedAssignment) -> Result<Schedule, LpError> {
    let view = instance.config.view().ok_or(LpError::NotTwoSpeed)?;
    let n = instance.n();
    if assignment.len() != n {
        return Err(LpError::AssignmentSize { expected: n, got: assignment.len() });
    }
    if view.m == view.m_s && assignment.fast_count() < n {
        return Err(LpError::NoSlowMachines);
    }
    let graph = &instance.graph;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&t| instance.chains.position(t));

    let class_of = |machine: usize| if machine < view.m_s { SpeedClass::Fast } else { SpeedClass::Slow };
    let duration = |class: SpeedClass| match class {
        SpeedClass::Fast => view.s.recip(),
        SpeedClass::Slow => Rational::ONE,
    };

    let mut free_at = vec![Rational::ZERO; view.m];
    let mut finish: Vec<Option<Rational>> = vec![None; n];
    let mut started = vec![false; n];
    let mut segments = Vec::with_capacity(n);
    let mut now = Rational::ZERO;
    let mut left = n;
    while left > 0 {
        for machine in 0..view.m {
            if free_at[machine] > now {
                continue;
            }
            let class = class_of(machine);
            let pick = order.iter().copied().find(|&t| {
                !started[t]
                    && assignment.class(t) == class
                    && graph.preds(t).iter().all(|&p| finish[p].is_some_and(|f| f <= now))
            });
            if let Some(t) = pick {
                let end = now + duration(class);
                started[t] = true;
                finish[t] = Some(end);
                free_at[machine] = end;
                segments.push(Segment::new(t, machine, now, end));
                left -= 1;
            }
        }
        if left == 0 {
            break;
        }
        now = free_at
            .iter()
            .copied()
            .filter(|&f| f > now)
            .min()
            .expect("a running task always exists while tasks remain");
    }
    Ok(Schedule::new(segments).canonical())
}
