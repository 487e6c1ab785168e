//! Time-ordered event queue with deterministic tie-breaking.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::time::SimTime;

/// Event kinds in the order they are processed at equal timestamps.
///
/// A window ending at `t` frees its receiver before anything else happens
/// at `t`; REPORTs are scheduled before receivers wake or windows start so a
/// window placed at `t` is seen by the receiver logic in the same instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    UpstreamEnd,
    ReportAtOlt,
    GateAtOnu,
    ReceiverWake,
    UpstreamStart,
    SimEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Event {
    pub time: SimTime,
    pub kind: EventKind,
    /// ONU id for REPORT and GATE events, wavelength otherwise.
    pub subject: usize,
    /// Wake plans are invalidated by bumping the receiver's token.
    pub token: u64,
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<(Event, u64)>>,
    seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        EventQueue::default()
    }

    pub fn push(&mut self, time: SimTime, kind: EventKind, subject: usize, token: u64) {
        self.seq += 1;
        let ev = Event { time, kind, subject, token };
        self.heap.push(Reverse((ev, self.seq)));
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|Reverse((ev, _))| ev)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_by_time_then_kind_then_subject() {
        let mut q = EventQueue::new();
        let t = SimTime::from_ns(10);
        q.push(t, EventKind::UpstreamStart, 0, 0);
        q.push(t, EventKind::ReportAtOlt, 3, 0);
        q.push(t, EventKind::ReportAtOlt, 1, 0);
        q.push(SimTime::from_ns(5), EventKind::SimEnd, 0, 0);
        q.push(t, EventKind::UpstreamEnd, 9, 0);
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).map(|e| (e.time.as_ns(), e.kind, e.subject)).collect();
        assert_eq!(
            order,
            vec![
                (5, EventKind::SimEnd, 0),
                (10, EventKind::UpstreamEnd, 9),
                (10, EventKind::ReportAtOlt, 1),
                (10, EventKind::ReportAtOlt, 3),
                (10, EventKind::UpstreamStart, 0),
            ]
        );
    }
}
