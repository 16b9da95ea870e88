//! Factory-maze benchmarks and random games and objectives.
//!
//! Rows are numbered from the top. Cell `(col, row)` with row 0 the upper
//! edge. Horizontal movement within a row is never blocked; movement between
//! rows goes through passages, one per column and adjacent row pair.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::game::{GameGraph, Player, PriorityFn, TwoObjectiveGame, Vertex};

pub type Cell = (usize, usize);

/// Opening between `(col, row)` and `(col, row + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Passage {
    pub col: usize,
    pub row: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Maze {
    pub x: usize,
    pub y: usize,
    pub walls: BTreeSet<Passage>,
    #[serde(serialize_with = "one_way_list")]
    pub one_way: BTreeMap<Passage, Direction>,
    pub seed: u64,
}

fn one_way_list<S: serde::Serializer>(
    m: &BTreeMap<Passage, Direction>,
    s: S,
) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry {
        col: usize,
        row: usize,
        dir: Direction,
    }
    s.collect_seq(m.iter().map(|(p, &dir)| Entry {
        col: p.col,
        row: p.row,
        dir,
    }))
}

impl Maze {
    pub fn open(x: usize, y: usize) -> Self {
        Maze {
            x,
            y,
            walls: BTreeSet::new(),
            one_way: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn max_walls(&self) -> usize {
        (self.y - 1) * (self.x - 1)
    }

    /// Every adjacent row pair keeps an open passage and the one-way
    /// corridors sit on open passages.
    pub fn is_valid(&self) -> bool {
        let rows_ok = (0..self.y - 1)
            .all(|row| (0..self.x).any(|col| !self.walls.contains(&Passage { col, row })));
        let in_bounds = |p: &Passage| p.col < self.x && p.row + 1 < self.y;
        rows_ok
            && self.walls.iter().all(in_bounds)
            && self
                .one_way
                .keys()
                .all(|p| in_bounds(p) && !self.walls.contains(p))
    }

    /// Cells reachable in one move, the current cell included.
    pub fn moves(&self, (col, row): Cell) -> Vec<Cell> {
        let mut out = vec![(col, row)];
        if row > 0 && self.passable(Passage { col, row: row - 1 }, Direction::Up) {
            out.push((col, row - 1));
        }
        if col > 0 {
            out.push((col - 1, row));
        }
        if col + 1 < self.x {
            out.push((col + 1, row));
        }
        if row + 1 < self.y && self.passable(Passage { col, row }, Direction::Down) {
            out.push((col, row + 1));
        }
        out
    }

    fn passable(&self, p: Passage, dir: Direction) -> bool {
        !self.walls.contains(&p) && self.one_way.get(&p).is_none_or(|&d| d == dir)
    }

    pub fn upper_left(&self) -> Cell {
        (0, 0)
    }

    pub fn upper_right(&self) -> Cell {
        (self.x - 1, 0)
    }

    pub fn lower_middle(&self) -> Cell {
        (self.x / 2, self.y - 1)
    }

    /// Start cells of the two robots: lower-left and lower-right.
    pub fn starts(&self) -> [Cell; 2] {
        [(0, self.y - 1), (self.x - 1, self.y - 1)]
    }
}

/// `w` horizontal walls (clamped so every row pair keeps a passage), then
/// each remaining passage becomes a one-way corridor with probability 1/2
/// until `c` corridors exist.
pub fn gen_maze(x: usize, y: usize, w: usize, c: usize, seed: u64) -> Maze {
    assert!(x >= 2 && y >= 2, "maze needs at least 2 columns and 2 rows");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut maze = Maze {
        seed,
        ..Maze::open(x, y)
    };
    let target = w.min(maze.max_walls());

    let mut passages: Vec<Passage> = (0..y - 1)
        .flat_map(|row| (0..x).map(move |col| Passage { col, row }))
        .collect();
    passages.shuffle(&mut rng);
    let mut open_per_row = vec![x; y - 1];
    let mut open = Vec::new();
    for p in passages {
        if maze.walls.len() < target && open_per_row[p.row] > 1 {
            open_per_row[p.row] -= 1;
            maze.walls.insert(p);
        } else {
            open.push(p);
        }
    }
    for p in open {
        if maze.one_way.len() == c {
            break;
        }
        if rng.gen_bool(0.5) {
            let dir = if rng.gen_bool(0.5) {
                Direction::Up
            } else {
                Direction::Down
            };
            maze.one_way.insert(p, dir);
        }
    }
    maze
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactoryKind {
    Buchi,
    Parity,
}

/// Product state. `mem` holds the objective gadgets; it stays 0 for the
/// Büchi kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FactoryState {
    pub pos: [Cell; 2],
    pub mem: [u8; 2],
    pub turn: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactoryMeta {
    pub maze: Maze,
    pub kind: FactoryKind,
    /// Cells named by the objectives.
    pub roles: BTreeMap<&'static str, Cell>,
    pub states: Vec<FactoryState>,
}

#[derive(Debug, Clone)]
pub struct FactoryGame {
    pub game: TwoObjectiveGame,
    pub meta: FactoryMeta,
}

/// Gadget values: 0 waiting for the first cell of the round, 1 waiting for
/// the second, 2 round just completed (acts as 0 for the next move).
fn advance_round(mem: u8, at: Cell, first: Cell, second: Cell) -> u8 {
    match mem {
        1 if at == second => 2,
        1 => 1,
        _ if at == first => 1,
        _ => 0,
    }
}

/// Two robots on a maze. Player 0 moves robot 1, player 1 moves robot 2,
/// turns alternate and moves onto the other robot's cell are not generated.
///
/// Büchi kind: robot 1 visits the upper-right corner and robot 2 the
/// upper-left corner infinitely often. Parity kind, with cells a = upper
/// right, b = lower middle, c = upper left: robot 1 visits a and b
/// infinitely often; if robot 1 visits a infinitely often then robot 2
/// visits b and c infinitely often.
///
/// Only states reachable from the start are built; vertex 0 is the start.
pub fn maze_to_game(m: &Maze, kind: FactoryKind) -> FactoryGame {
    let (a, b, c) = (m.upper_right(), m.lower_middle(), m.upper_left());
    let start = FactoryState {
        pos: m.starts(),
        mem: [0, 0],
        turn: 0,
    };
    let mut index: HashMap<FactoryState, Vertex> = HashMap::from([(start, 0)]);
    let mut states = vec![start];
    let mut successors: Vec<Vec<Vertex>> = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        let s = states[v];
        let me = s.turn as usize;
        let other = s.pos[1 - me];
        let mut succ = Vec::new();
        for cell in m.moves(s.pos[me]) {
            if cell == other {
                continue;
            }
            let mut t = s;
            t.pos[me] = cell;
            t.turn = 1 - s.turn;
            if kind == FactoryKind::Parity {
                t.mem[me] = match me {
                    0 => advance_round(s.mem[0], cell, a, b),
                    _ => advance_round(s.mem[1], cell, b, c),
                };
            }
            let w = *index.entry(t).or_insert_with(|| {
                states.push(t);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            succ.push(w);
        }
        succ.sort_unstable();
        successors.resize(v + 1, Vec::new());
        successors[v] = succ;
    }

    let owner = states
        .iter()
        .map(|s| {
            if s.turn == 0 {
                Player::Zero
            } else {
                Player::One
            }
        })
        .collect();
    let (p0, p1): (Vec<u32>, Vec<u32>) = states
        .iter()
        .map(|s| match kind {
            FactoryKind::Buchi => (
                if s.pos[0] == a { 2 } else { 1 },
                if s.pos[1] == c { 2 } else { 1 },
            ),
            FactoryKind::Parity => (
                if s.mem[0] == 2 { 2 } else { 1 },
                if s.mem[1] == 2 {
                    2
                } else if s.pos[0] == a {
                    1
                } else {
                    0
                },
            ),
        })
        .unzip();
    let graph = GameGraph::new(owner, successors).expect("product graph is total");
    let game = TwoObjectiveGame::new(graph, PriorityFn::new(p0), PriorityFn::new(p1))
        .expect("priority functions cover the product");
    let roles = match kind {
        FactoryKind::Buchi => BTreeMap::from([("target1", a), ("target2", c)]),
        FactoryKind::Parity => BTreeMap::from([("a", a), ("b", b), ("c", c)]),
    };
    FactoryGame {
        game,
        meta: FactoryMeta {
            maze: m.clone(),
            kind,
            roles,
            states,
        },
    }
}

/// Half the vertices (rounded down) are spread evenly over priorities
/// `0..=m`, remainder to the lowest priorities; the rest get uniform random
/// priorities in `0..=m`.
pub fn gen_random_objective(g: &GameGraph, m: u32, seed: u64) -> PriorityFn {
    assert!(m >= 1, "need at least two priorities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.vertex_count();
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.shuffle(&mut rng);
    let (selected, rest) = order.split_at(n / 2);
    let buckets = m as usize + 1;
    let (base, extra) = (selected.len() / buckets, selected.len() % buckets);
    let mut prio = vec![0u32; n];
    let mut it = selected.iter();
    for j in 0..buckets {
        let size = base + usize::from(j < extra);
        for &v in it.by_ref().take(size) {
            prio[v] = j as u32;
        }
    }
    for &v in rest {
        prio[v] = rng.gen_range(0..=m);
    }
    PriorityFn::new(prio)
}

/// Random game with `n` vertices, owners uniform, 1 to `max_branching`
/// distinct successors each.
pub fn gen_random_graph(n: usize, max_branching: usize, rng: &mut impl Rng) -> GameGraph {
    let owner = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Player::Zero
            } else {
                Player::One
            }
        })
        .collect();
    let successors = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_branching.min(n));
            let mut s = rand::seq::index::sample(rng, n, k).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    GameGraph::new(owner, successors).expect("generated graph is total")
}

pub fn gen_random_priorities(n: usize, max_priority: u32, rng: &mut impl Rng) -> PriorityFn {
    PriorityFn::new((0..n).map(|_| rng.gen_range(0..=max_priority)).collect())
}

/// Seeded random single-objective game with 1 to `max_n` vertices.
pub fn gen_random_game(
    max_n: usize,
    max_priority: u32,
    max_branching: usize,
    seed: u64,
) -> (GameGraph, PriorityFn) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let g = gen_random_graph(n, max_branching, &mut rng);
    let p = gen_random_priorities(n, max_priority, &mut rng);
    (g, p)
}

/// Seeded random two-objective game with 1 to `max_n` vertices.
pub fn gen_random_two_objective(
    max_n: usize,
    max_priority: u32,
    max_branching: usize,
    seed: u64,
) -> TwoObjectiveGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let g = gen_random_graph(n, max_branching, &mut rng);
    let p0 = gen_random_priorities(n, max_priority, &mut rng);
    let p1 = gen_random_priorities(n, max_priority, &mut rng);
    TwoObjectiveGame::new(g, p0, p1).expect("priorities cover the graph")
}
