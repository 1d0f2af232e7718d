//! Cooperative lane-merge task for several automated vehicles.
//!
//! Vehicles drive along a straight multi-lane road. Lane 0 may be a merge
//! lane that ends at `merge_end`; a vehicle still in it past that point hits
//! the lane end. The vehicles share one objective: reach the horizon without
//! any collision, everybody on their goal lane.
//!
//! | constant                | value                     |
//! |-------------------------|---------------------------|
//! | time step               | 1.0 s                     |
//! | longitudinal action     | [-4, 2] m/s²              |
//! | lateral action          | [-1, 1] lanes/s           |
//! | speed range             | [0, 20] m/s               |
//! | vehicle length envelope | 5.0 m (centre distance)   |
//! | vehicle width envelope  | 0.8 lanes                 |
//! | collision checks        | at t + 0.5 Δt and t + Δt  |
//! | collision reward        | -10 for every vehicle     |
//! | goal tolerance          | 0.25 lanes (default)      |
//! | completion reward       | +10 for every vehicle     |
//!
//! Per-step shaping for vehicle `i` is
//! `0.5·exp(-((lane - goal) / 0.25)²) - 0.25·min(|v - v_des| / v_des, 1)`,
//! which lies in `[-0.25, 0.5]`; the narrow lane peak rewards centring. On the horizon step the completion reward
//! replaces shaping when all vehicles are on their goal lanes.

use crate::action::{ContinuousAction, Interval};
use crate::error::{Error, Result};
use crate::rng::Stream;

use super::{check_step_preconditions, Environment, EnvironmentSpec, State, Transition};

pub const DT: f64 = 1.0;
pub const ACCEL_BOUNDS: Interval = Interval::new(-4.0, 2.0);
pub const LATERAL_BOUNDS: Interval = Interval::new(-1.0, 1.0);
pub const MAX_SPEED: f64 = 20.0;
pub const VEHICLE_LENGTH: f64 = 5.0;
pub const VEHICLE_WIDTH: f64 = 0.8;
pub const COLLISION_REWARD: f64 = -10.0;
pub const COMPLETION_REWARD: f64 = 10.0;
/// Default lateral distance from the goal lane that still counts as on it.
pub const GOAL_TOLERANCE: f64 = 0.25;
pub const LANE_SHAPING_WIDTH: f64 = 0.25;

const FIELDS_PER_AGENT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeAgent {
    /// Longitudinal position, m.
    pub x: f64,
    /// Lateral position in continuous lane units.
    pub lane: f64,
    /// m/s.
    pub speed: f64,
    pub goal_lane: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeParams {
    pub lanes: usize,
    /// Longitudinal position where lane 0 ends; `None` when lane 0 is a
    /// through lane.
    pub merge_end: Option<f64>,
    pub desired_speed: f64,
    /// Lateral distance from the goal lane that still counts as on it.
    pub goal_tolerance: f64,
    pub horizon: usize,
    pub agents: Vec<MergeAgent>,
}

/// Structured view of a merge-task [`State`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoopMergeState {
    pub agents: Vec<MergeAgent>,
    pub collision: bool,
}

impl CoopMergeState {
    pub fn from_state(state: &State) -> Self {
        let agents = state.values[1..]
            .chunks_exact(FIELDS_PER_AGENT)
            .map(|c| MergeAgent {
                x: c[0],
                lane: c[1],
                speed: c[2],
                goal_lane: c[3],
            })
            .collect();
        Self {
            agents,
            collision: state.values[0] != 0.0,
        }
    }

    pub fn to_values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + FIELDS_PER_AGENT * self.agents.len());
        v.push(if self.collision { 1.0 } else { 0.0 });
        for a in &self.agents {
            v.extend_from_slice(&[a.x, a.lane, a.speed, a.goal_lane]);
        }
        v
    }
}

/// Whether two vehicles' envelopes overlap.
pub fn vehicles_overlap(a: &MergeAgent, b: &MergeAgent) -> bool {
    (a.x - b.x).abs() < VEHICLE_LENGTH && (a.lane - b.lane).abs() < VEHICLE_WIDTH
}

#[derive(Debug, Clone)]
pub struct CoopMerge {
    spec: EnvironmentSpec,
    params: MergeParams,
}

impl CoopMerge {
    pub fn new(name: &str, params: MergeParams) -> Result<Self> {
        if params.lanes == 0 {
            return Err(Error::InvalidConfig("merge task needs at least one lane".into()));
        }
        let spec = EnvironmentSpec::new(
            name,
            params.agents.len(),
            vec![ACCEL_BOUNDS, LATERAL_BOUNDS],
            params.horizon,
        )?;
        Ok(Self { spec, params })
    }

    pub fn params(&self) -> &MergeParams {
        &self.params
    }

    fn max_lane(&self) -> f64 {
        (self.params.lanes - 1) as f64
    }

    fn hits_lane_end(&self, a: &MergeAgent) -> bool {
        match self.params.merge_end {
            Some(end) => a.lane < 0.5 && a.x >= end,
            None => false,
        }
    }

    fn collides(&self, agents: &[MergeAgent]) -> bool {
        agents.iter().any(|a| self.hits_lane_end(a))
            || agents.iter().enumerate().any(|(i, a)| {
                agents[i + 1..].iter().any(|b| vehicles_overlap(a, b))
            })
    }

    fn shaping(&self, a: &MergeAgent) -> f64 {
        let v_des = self.params.desired_speed;
        let lane_error = (a.lane - a.goal_lane) / LANE_SHAPING_WIDTH;
        0.5 * (-lane_error * lane_error).exp() - 0.25 * ((a.speed - v_des).abs() / v_des).min(1.0)
    }

    fn advance(&self, a: &MergeAgent, action: &ContinuousAction, fraction: f64) -> MergeAgent {
        let dt = DT * fraction;
        let accel = action.values()[0];
        let lateral = action.values()[1];
        let speed = (a.speed + accel * dt).clamp(0.0, MAX_SPEED);
        MergeAgent {
            x: a.x + 0.5 * (a.speed + speed) * dt,
            lane: (a.lane + lateral * dt).clamp(0.0, self.max_lane()),
            speed,
            goal_lane: a.goal_lane,
        }
    }
}

impl Environment for CoopMerge {
    fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    fn initial_state(&self) -> State {
        let s = CoopMergeState {
            agents: self.params.agents.clone(),
            collision: false,
        };
        State::new(s.to_values(), 0)
    }

    fn step(
        &self,
        state: &State,
        joint: &[ContinuousAction],
        _rng: &mut Stream,
    ) -> Result<Transition> {
        check_step_preconditions(&self.spec, state, joint)?;
        let current = CoopMergeState::from_state(state);
        let n = current.agents.len();
        let depth = state.depth + 1;

        let halfway: Vec<MergeAgent> = current
            .agents
            .iter()
            .zip(joint)
            .map(|(a, act)| self.advance(a, act, 0.5))
            .collect();
        let next: Vec<MergeAgent> = current
            .agents
            .iter()
            .zip(joint)
            .map(|(a, act)| self.advance(a, act, 1.0))
            .collect();

        let collision = self.collides(&halfway) || self.collides(&next);
        let rewards = if collision {
            vec![COLLISION_REWARD; n]
        } else if depth >= self.spec.horizon
            && next
                .iter()
                .all(|a| (a.lane - a.goal_lane).abs() <= self.params.goal_tolerance)
        {
            vec![COMPLETION_REWARD; n]
        } else {
            next.iter().map(|a| self.shaping(a)).collect()
        };

        let s = CoopMergeState {
            agents: next,
            collision,
        };
        Ok(Transition {
            state: State {
                values: s.to_values(),
                terminal: collision || depth >= self.spec.horizon,
                depth,
            },
            rewards,
        })
    }

    /// Horizon reached without collision, everybody on their goal lane.
    fn is_success(&self, state: &State) -> bool {
        let s = CoopMergeState::from_state(state);
        state.depth >= self.spec.horizon
            && !s.collision
            && s.agents
                .iter()
                .all(|a| (a.lane - a.goal_lane).abs() <= self.params.goal_tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, StreamKey};

    fn zero(n: usize) -> Vec<ContinuousAction> {
        vec![ContinuousAction::new(vec![0.0, 0.0]); n]
    }

    fn two_lane(agents: Vec<MergeAgent>, horizon: usize) -> CoopMerge {
        CoopMerge::new(
            "test",
            MergeParams {
                lanes: 2,
                merge_end: None,
                desired_speed: 10.0,
                goal_tolerance: GOAL_TOLERANCE,
                horizon,
                agents,
            },
        )
        .unwrap()
    }

    fn agent(x: f64, lane: f64, speed: f64, goal: f64) -> MergeAgent {
        MergeAgent {
            x,
            lane,
            speed,
            goal_lane: goal,
        }
    }

    #[test]
    fn far_apart_agents_only_get_shaping() {
        let env = two_lane(vec![agent(0.0, 0.0, 10.0, 0.0), agent(100.0, 1.0, 10.0, 1.0)], 5);
        let mut rng = derive_stream(&StreamKey::new(0));
        let t = env.step(&env.initial_state(), &zero(2), &mut rng).unwrap();
        assert!(!t.terminal());
        assert_eq!(t.rewards, vec![0.5, 0.5]);
        let s = CoopMergeState::from_state(&t.state);
        assert_eq!(s.agents[0].x, 10.0);
        assert!(!s.collision);
    }

    #[test]
    fn converging_agents_collide() {
        let env = two_lane(vec![agent(0.0, 0.0, 10.0, 1.0), agent(0.0, 1.0, 10.0, 1.0)], 5);
        let mut rng = derive_stream(&StreamKey::new(0));
        let joint = vec![
            ContinuousAction::new(vec![0.0, 1.0]),
            ContinuousAction::new(vec![0.0, 0.0]),
        ];
        let t = env.step(&env.initial_state(), &joint, &mut rng).unwrap();
        assert!(t.terminal());
        assert_eq!(t.rewards, vec![-10.0, -10.0]);
        assert!(CoopMergeState::from_state(&t.state).collision);
        assert!(!env.is_success(&t.state));
    }

    #[test]
    fn collision_is_symmetric() {
        let a = agent(3.0, 0.2, 10.0, 0.0);
        let b = agent(6.0, 0.9, 12.0, 1.0);
        assert_eq!(vehicles_overlap(&a, &b), vehicles_overlap(&b, &a));
        assert!(vehicles_overlap(&a, &b));
        let c = agent(9.0, 0.2, 10.0, 0.0);
        assert!(!vehicles_overlap(&a, &c));
    }

    #[test]
    fn holding_goal_lane_matches_closed_form() {
        let horizon = 6;
        let env = two_lane(vec![agent(0.0, 1.0, 10.0, 1.0)], horizon);
        let mut rng = derive_stream(&StreamKey::new(0));
        let mut s = env.initial_state();
        let mut total = 0.0;
        while !s.terminal {
            let t = env.step(&s, &zero(1), &mut rng).unwrap();
            total += t.rewards[0];
            s = t.state;
        }
        // 0.5 shaping for each of the first horizon-1 steps, then completion.
        assert_eq!(total, 0.5 * (horizon - 1) as f64 + COMPLETION_REWARD);
        assert!(env.is_success(&s));
        assert_eq!(s.depth, horizon);
    }

    #[test]
    fn lane_end_is_a_collision() {
        let env = CoopMerge::new(
            "end",
            MergeParams {
                lanes: 2,
                merge_end: Some(15.0),
                desired_speed: 10.0,
                goal_tolerance: GOAL_TOLERANCE,
                horizon: 4,
                agents: vec![agent(0.0, 0.0, 10.0, 1.0)],
            },
        )
        .unwrap();
        let mut rng = derive_stream(&StreamKey::new(0));
        let t1 = env.step(&env.initial_state(), &zero(1), &mut rng).unwrap();
        assert!(!t1.terminal());
        let t2 = env.step(&t1.state, &zero(1), &mut rng).unwrap();
        assert!(t2.terminal());
        assert_eq!(t2.rewards, vec![COLLISION_REWARD]);
    }

    #[test]
    fn out_of_bounds_action_is_an_error() {
        let env = two_lane(vec![agent(0.0, 1.0, 10.0, 1.0)], 3);
        let mut rng = derive_stream(&StreamKey::new(0));
        let bad = vec![ContinuousAction::new(vec![5.0, 0.0])];
        assert!(matches!(
            env.step(&env.initial_state(), &bad, &mut rng),
            Err(Error::ActionOutOfBounds { dim: 0, .. })
        ));
    }

    #[test]
    fn state_round_trips() {
        let s = CoopMergeState {
            agents: vec![agent(1.0, 0.5, 9.0, 1.0), agent(-3.0, 1.0, 11.0, 0.0)],
            collision: true,
        };
        let state = State::new(s.to_values(), 0);
        assert_eq!(CoopMergeState::from_state(&state), s);
    }
}
