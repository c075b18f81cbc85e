/// Tie-grouped view of the time axis.
///
/// Rows are sorted by ascending time. Each block covers one distinct observed
/// time; the risk set at that time is every row from the block start to the
/// end of the ordering, so censored subjects tied with an event stay at risk.
#[derive(Debug, Clone)]
pub struct RiskIndex {
    order: Vec<usize>,
    blocks: Vec<TimeBlock>,
}

#[derive(Debug, Clone)]
pub struct TimeBlock {
    pub time: f64,
    /// Range into the ascending ordering covering rows observed at `time`.
    pub start: usize,
    pub end: usize,
    /// Rows failing at `time`.
    pub events: Vec<usize>,
}

impl RiskIndex {
    pub fn new(times: &[f64], status: &[bool]) -> Self {
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]).then(a.cmp(&b)));
        let mut blocks: Vec<TimeBlock> = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            match blocks.last_mut() {
                Some(b) if b.time == times[i] => b.end = pos + 1,
                _ => blocks.push(TimeBlock {
                    time: times[i],
                    start: pos,
                    end: pos + 1,
                    events: Vec::new(),
                }),
            }
            if status[i] {
                blocks.last_mut().unwrap().events.push(i);
            }
        }
        Self { order, blocks }
    }

    /// Row indices sorted by ascending time.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// All distinct-time blocks, ascending.
    pub fn blocks(&self) -> &[TimeBlock] {
        &self.blocks
    }

    /// Blocks with at least one event.
    pub fn event_blocks(&self) -> impl Iterator<Item = &TimeBlock> {
        self.blocks.iter().filter(|b| !b.events.is_empty())
    }

    /// Sorted distinct event times.
    pub fn event_times(&self) -> Vec<f64> {
        self.event_blocks().map(|b| b.time).collect()
    }

    /// Rows at risk at the time of `block`: `{ i : Y_i >= t }`.
    pub fn at_risk(&self, block: &TimeBlock) -> &[usize] {
        &self.order[block.start..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_ties_and_keeps_tied_censored_at_risk() {
        let times = [2.0, 1.0, 2.0, 3.0, 2.0];
        let status = [true, true, false, false, true];
        let idx = RiskIndex::new(&times, &status);
        assert_eq!(idx.event_times(), vec![1.0, 2.0]);
        let blocks: Vec<_> = idx.event_blocks().collect();
        assert_eq!(blocks[0].events, vec![1]);
        assert_eq!(blocks[1].events, vec![0, 4]);
        let mut risk: Vec<usize> = idx.at_risk(blocks[1]).to_vec();
        risk.sort();
        assert_eq!(risk, vec![0, 2, 3, 4]);
        assert_eq!(idx.at_risk(blocks[0]).len(), 5);
    }

    #[test]
    fn no_events_gives_no_event_blocks() {
        let idx = RiskIndex::new(&[1.0, 2.0], &[false, false]);
        assert_eq!(idx.event_blocks().count(), 0);
        assert_eq!(idx.blocks().len(), 2);
    }
}
