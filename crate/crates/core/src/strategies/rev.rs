//! Revolutionary strategies: witness-driven group growth and the baselines.

use crate::game::{RevStrategy, StrategyCtx, TraceEvent, View};
use crate::graph::{Graph, VertexSet};
use crate::properties::{find_witness, EcQuery, EcVariant};

use super::StrategyError;

/// r distinct vertices, highest degree first, ties by id; wraps around when
/// r exceeds n.
fn placement_by_degree(g: &Graph, r: u32) -> Vec<u32> {
    let mut order: Vec<u32> = (0..g.n()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    (0..r as usize).map(|i| order[i % order.len()]).collect()
}

/// One BFS from `to`; step(v) = lowest-id neighbor strictly closer to `to`.
struct StepField {
    dist: Vec<u32>,
}

impl StepField {
    fn new(g: &Graph, to: u32) -> Self {
        StepField {
            dist: g.bfs_distances(to),
        }
    }

    fn dist(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    fn step(&self, g: &Graph, v: u32) -> u32 {
        let dv = self.dist[v as usize];
        if dv == 0 || dv == u32::MAX {
            return v;
        }
        *g.neighbors(v)
            .iter()
            .find(|&&w| self.dist[w as usize] == dv - 1)
            .expect("positive finite distance has a closer neighbor")
    }
}

/// The witness-growth offense.
///
/// Keeps the largest unguarded co-located cluster as the group and grows it
/// by one recruit per round through an existentially-closed witness z: the
/// group and the recruit both move to (or toward) a vertex that is close to
/// both and far from every spy, so the grown group ends the round unguarded.
/// With j = 1 and the corresponding exact e.c. property confirmed, the group
/// reaches m tokens and wins by round m.
///
/// `helpers = None` queries pairwise (group vertex and recruit both within
/// distance j of z); `helpers = Some(l)` anchors at the group vertex and
/// offers a pool of l recruits, merging whichever one the witness reaches.
pub struct GrowthStrategy {
    j: u32,
    helpers: Option<u32>,
}

impl GrowthStrategy {
    pub fn pair_growth(
        _g: &Graph,
        _config: &crate::game::GameConfig,
        j: u32,
    ) -> Result<Self, StrategyError> {
        if j < 1 {
            return Err(StrategyError::BadParameter("j must be >= 1".into()));
        }
        Ok(GrowthStrategy { j, helpers: None })
    }

    pub fn anchored_growth(
        _g: &Graph,
        _config: &crate::game::GameConfig,
        l: u32,
        j: u32,
    ) -> Result<Self, StrategyError> {
        if j < 1 || l < 1 {
            return Err(StrategyError::BadParameter("need l >= 1 and j >= 1".into()));
        }
        Ok(GrowthStrategy {
            j,
            helpers: Some(l),
        })
    }

    /// True when the theorem precondition for a guaranteed win holds; the
    /// strategy still plays greedily without it.
    pub fn guarantees_win(&self, config: &crate::game::GameConfig) -> bool {
        let l = self.helpers.unwrap_or(1);
        config.r >= config.m + l - 1 + config.s && self.j >= 1
    }
}

impl RevStrategy for GrowthStrategy {
    fn name(&self) -> &'static str {
        if self.helpers.is_none() {
            "ec-growth"
        } else {
            "one-ec"
        }
    }

    fn place(&mut self, ctx: &mut StrategyCtx) -> Vec<u32> {
        placement_by_degree(ctx.g, ctx.config.r)
    }

    fn moves(&mut self, ctx: &mut StrategyCtx, view: &View) -> Vec<u32> {
        let g = ctx.g;
        let mut target = view.rev.to_vec();
        let spy_set = VertexSet::from_unsorted(view.spy.to_vec());

        // the group is the largest unguarded co-located cluster
        let mut counts: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
        for &v in view.rev {
            if !spy_set.contains(v) {
                *counts.entry(v).or_insert(0) += 1;
            }
        }
        let group_vertex = match counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
            Some((&v, _)) => v,
            None => {
                ctx.events.push(TraceEvent::WitnessNotFound {
                    round: view.round,
                    detail: "every revolutionary is guarded".into(),
                });
                return target;
            }
        };
        let group: Vec<usize> = (0..view.rev.len())
            .filter(|&i| view.rev[i] == group_vertex)
            .collect();

        // recruit candidates: distinct unguarded vertices holding free
        // tokens, nearest to the group first, ties by vertex id
        let field_from_group = StepField::new(g, group_vertex);
        let mut candidates: Vec<u32> = counts
            .keys()
            .copied()
            .filter(|&v| v != group_vertex && field_from_group.dist(v) != u32::MAX)
            .collect();
        candidates.sort_by_key(|&v| (field_from_group.dist(v), v));

        let grown_enough = group.len() as u32 >= ctx.config.m;

        // try to grow, pairwise or anchored
        if !grown_enough {
            match self.helpers {
                None => {
                    for &b in &candidates {
                        let q = EcQuery {
                            variant: EcVariant::EcJ,
                            v: None,
                            a: VertexSet::from_unsorted(vec![group_vertex, b]),
                            b: spy_set.clone(),
                            j: self.j,
                        };
                        if let Ok(Some(z)) = find_witness(g, &q) {
                            self.march(g, view, &mut target, &group, &[b], z);
                            return target;
                        }
                    }
                }
                Some(l) => {
                    let l = l as usize;
                    let mut offset = 0;
                    while offset + l <= candidates.len() {
                        let pool = &candidates[offset..offset + l];
                        let q = EcQuery {
                            variant: EcVariant::OneEcJ,
                            v: Some(group_vertex),
                            a: VertexSet::from_unsorted(pool.to_vec()),
                            b: spy_set.clone(),
                            j: self.j,
                        };
                        if let Ok(Some(z)) = find_witness(g, &q) {
                            // merge the helper the witness actually reaches
                            let to_z = StepField::new(g, z);
                            let reachable: Vec<u32> = pool
                                .iter()
                                .copied()
                                .filter(|&h| to_z.dist(h) <= self.j)
                                .take(1)
                                .collect();
                            self.march(g, view, &mut target, &group, &reachable, z);
                            return target;
                        }
                        offset += 1;
                    }
                }
            }
        }

        // no recruit worked (or the group is complete): hop to keep the
        // group out of the spies' reach
        let safety = EcQuery {
            variant: EcVariant::EcJ,
            v: None,
            a: VertexSet::singleton(group_vertex),
            b: spy_set.clone(),
            j: self.j,
        };
        if let Ok(Some(z)) = find_witness(g, &safety) {
            self.march(g, view, &mut target, &group, &[], z);
            return target;
        }
        ctx.events.push(TraceEvent::WitnessNotFound {
            round: view.round,
            detail: format!(
                "no witness around group at {group_vertex} ({} candidates tried)",
                candidates.len()
            ),
        });
        target
    }
}

impl GrowthStrategy {
    /// Move the group and every token on the recruit vertices toward z
    /// (onto z when j = 1).
    fn march(
        &self,
        g: &Graph,
        view: &View,
        target: &mut [u32],
        group: &[usize],
        recruit_vertices: &[u32],
        z: u32,
    ) {
        let to_z = StepField::new(g, z);
        let mut movers: Vec<usize> = group.to_vec();
        for (i, &v) in view.rev.iter().enumerate() {
            if recruit_vertices.contains(&v) {
                movers.push(i);
            }
        }
        for i in movers {
            target[i] = to_z.step(g, view.rev[i]);
        }
    }
}

/// Everyone marches toward the most crowded spy-free vertex.
pub struct GreedyRally;

impl GreedyRally {
    pub fn new(_g: &Graph) -> Self {
        GreedyRally
    }
}

impl RevStrategy for GreedyRally {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn place(&mut self, ctx: &mut StrategyCtx) -> Vec<u32> {
        placement_by_degree(ctx.g, ctx.config.r)
    }

    fn moves(&mut self, ctx: &mut StrategyCtx, view: &View) -> Vec<u32> {
        let g = ctx.g;
        let spy_set = VertexSet::from_unsorted(view.spy.to_vec());
        let mut counts: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
        for &v in view.rev {
            *counts.entry(v).or_insert(0) += 1;
        }
        // rally: spy-free, most revolutionaries, then highest degree, then id
        let rally = (0..g.n())
            .filter(|&v| !spy_set.contains(v))
            .max_by(|&a, &b| {
                let ca = counts.get(&a).copied().unwrap_or(0);
                let cb = counts.get(&b).copied().unwrap_or(0);
                ca.cmp(&cb)
                    .then(g.degree(a).cmp(&g.degree(b)))
                    .then(b.cmp(&a))
            })
            .unwrap_or(0);
        let field = StepField::new(g, rally);
        view.rev.iter().map(|&v| field.step(g, v)).collect()
    }
}

/// Independent seeded random walks.
pub struct RandomWalkRev;

impl RevStrategy for RandomWalkRev {
    fn name(&self) -> &'static str {
        "random"
    }

    fn place(&mut self, ctx: &mut StrategyCtx) -> Vec<u32> {
        let n = ctx.g.n() as u64;
        (0..ctx.config.r).map(|_| ctx.rng.below(n) as u32).collect()
    }

    fn moves(&mut self, ctx: &mut StrategyCtx, view: &View) -> Vec<u32> {
        view.rev
            .iter()
            .map(|&v| {
                let opts = crate::game::legal_moves(ctx.g, v);
                opts.as_slice()[ctx.rng.below(opts.len() as u64) as usize]
            })
            .collect()
    }
}
