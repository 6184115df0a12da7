//! Mixed-radix index over achievable states.
//!
//! Each axis of length `n` contributes a digit of radix `2n` (its axis code, see
//! [`AxisType::code`]); axis 0 is the most significant digit.

use crate::campaign::{AxisType, Campaign, CampaignState};
use crate::error::ModelError;

impl Campaign {
    /// Radix per axis (`2|x|`).
    pub fn radices(&self) -> Vec<usize> {
        self.axes().iter().map(|a| 2 * a.len()).collect()
    }

    /// Place value of each axis digit in the state index.
    pub fn axis_weights(&self) -> Result<Vec<usize>, ModelError> {
        let radices = self.radices();
        let mut weights = vec![1usize; radices.len()];
        for x in (0..radices.len().saturating_sub(1)).rev() {
            weights[x] = weights[x + 1]
                .checked_mul(radices[x + 1])
                .ok_or(ModelError::StateSpaceOverflow)?;
        }
        Ok(weights)
    }

    /// Number of achievable states, `∏ 2|x|`.
    pub fn achievable_state_count(&self) -> Result<usize, ModelError> {
        self.radices()
            .into_iter()
            .try_fold(1usize, |acc, r| acc.checked_mul(r))
            .ok_or(ModelError::StateSpaceOverflow)
    }

    pub fn encode_state(&self, state: &CampaignState) -> Result<usize, ModelError> {
        if state.len() != self.objective_count() {
            return Err(ModelError::StateLength {
                expected: self.objective_count(),
                got: state.len(),
            });
        }
        let mut index = 0usize;
        for (x, axis) in self.axes().iter().enumerate() {
            let code = self
                .classify_axis(x, state)
                .code(axis.len())
                .ok_or_else(|| ModelError::Unachievable { state: state.to_string(), axis: x })?;
            index = index * (2 * axis.len()) + code;
        }
        Ok(index)
    }

    pub fn decode_state(&self, index: usize) -> Result<CampaignState, ModelError> {
        let count = self.achievable_state_count()?;
        if index >= count {
            return Err(ModelError::IndexOutOfRange { index, count });
        }
        let mut state = CampaignState::uniform(self.objective_count(), crate::Player::One);
        let mut rest = index;
        for axis in self.axes().iter().rev() {
            let n = axis.len();
            let code = rest % (2 * n);
            rest /= 2 * n;
            let pattern = AxisType::from_code(code, n)
                .and_then(|t| t.pattern(n))
                .expect("code below radix always decodes");
            for (&o, p) in axis.objectives.iter().zip(pattern) {
                state.set(o, p);
            }
        }
        Ok(state)
    }

    /// All achievable states in index order.
    pub fn enumerate_achievable_states(&self) -> Result<Vec<CampaignState>, ModelError> {
        let count = self.achievable_state_count()?;
        (0..count).map(|i| self.decode_state(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use crate::campaign::{Axis, Commander, Objective};
    use crate::transitions::ProbabilityModel;
    use crate::{Campaign, CampaignState};
    use proptest::prelude::*;

    fn campaign(sizes: &[usize]) -> Campaign {
        let total: usize = sizes.iter().sum();
        let objectives = (0..total).map(|id| Objective { id, label: String::new(), loss: 1.0 }).collect();
        let mut next = 0;
        let axes = sizes
            .iter()
            .enumerate()
            .map(|(id, &n)| {
                let objectives = (next..next + n).collect();
                next += n;
                Axis { id, objectives }
            })
            .collect();
        let commanders = vec![Commander { id: 0, axes: (0..sizes.len()).collect() }];
        Campaign::new(objectives, axes, commanders, 0.9, ProbabilityModel::constant(total, 0.3, 0.3)).unwrap()
    }

    #[test]
    fn single_axis_codes() {
        let c = campaign(&[3]);
        let code = |s: &str| c.encode_state(&s.parse::<CampaignState>().unwrap()).unwrap();
        assert_eq!(code("111"), 0);
        assert_eq!(code("222"), 1);
        assert_eq!(code("112"), 3);
        assert_eq!(code("212"), 4);
        assert!(c.encode_state(&"211".parse().unwrap()).is_err());
    }

    #[test]
    fn index_space_sizes() {
        assert_eq!(campaign(&[2, 4]).achievable_state_count().unwrap(), 32);
        assert_eq!(campaign(&[1]).achievable_state_count().unwrap(), 2);
        assert_eq!(campaign(&[1]).enumerate_achievable_states().unwrap().len(), 2);
    }

    #[test]
    fn decode_rejects_out_of_range() {
        let c = campaign(&[2, 4]);
        assert!(c.decode_state(32).is_err());
    }

    #[test]
    fn enumeration_is_exactly_the_achievable_subset() {
        // brute force over {1,2}^O for a small campaign
        let c = campaign(&[2, 3, 1]);
        let n = c.objective_count();
        let mut brute = Vec::new();
        for bits in 0u32..(1 << n) {
            let s = CampaignState::new(
                (0..n)
                    .map(|o| if bits >> o & 1 == 1 { crate::Player::Two } else { crate::Player::One })
                    .collect(),
            );
            if c.is_achievable(&s) {
                brute.push(s);
            }
        }
        let mut listed = c.enumerate_achievable_states().unwrap();
        assert_eq!(listed.len(), 4 * 6 * 2);
        listed.sort();
        brute.sort();
        assert_eq!(listed, brute);
    }

    proptest! {
        #[test]
        fn encode_decode_bijection(sizes in proptest::collection::vec(1usize..5, 1..4), seed in any::<u64>()) {
            let c = campaign(&sizes);
            let count = c.achievable_state_count().unwrap();
            let index = (seed as usize) % count;
            let s = c.decode_state(index).unwrap();
            prop_assert!(c.is_achievable(&s));
            prop_assert_eq!(c.encode_state(&s).unwrap(), index);
        }
    }
}
