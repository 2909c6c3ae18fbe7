//! Generalized Reidemeister moves as rewrites of token sequences, and a
//! seeded random walk through them.
//!
//! Gaps are numbered `0..=len`: gap `g` sits just before token `g`.
//! Deletion and triangle sites are named by the position of the first
//! token of each adjacent pair involved.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{CrossingId, DiagramCode, Passage, PassageToken, Sign};

/// Which passage of a first-move kink comes first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum KinkOrder {
    /// `O c, U c`: early over.
    OverFirst,
    /// `U c, O c`: early under, changes `ζ` by a power of `q`.
    UnderFirst,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Variant {
    Parallel,
    Antiparallel,
}

/// For a classical bigon: which passages are inserted at the first gap.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Layer {
    Over,
    Under,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TriangleKind {
    Classical,
    Virtual,
    Semivirtual,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum MoveKind {
    R1Insert,
    R1Delete,
    V1Insert,
    V1Delete,
    R2Insert,
    R2Delete,
    V2Insert,
    V2Delete,
    TriangleClassical,
    TriangleVirtual,
    TriangleSemivirtual,
}

impl MoveKind {
    pub const ALL: [MoveKind; 11] = [
        MoveKind::R1Insert,
        MoveKind::R1Delete,
        MoveKind::V1Insert,
        MoveKind::V1Delete,
        MoveKind::R2Insert,
        MoveKind::R2Delete,
        MoveKind::V2Insert,
        MoveKind::V2Delete,
        MoveKind::TriangleClassical,
        MoveKind::TriangleVirtual,
        MoveKind::TriangleSemivirtual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::R1Insert => "R1_insert",
            MoveKind::R1Delete => "R1_delete",
            MoveKind::V1Insert => "V1_insert",
            MoveKind::V1Delete => "V1_delete",
            MoveKind::R2Insert => "R2_insert",
            MoveKind::R2Delete => "R2_delete",
            MoveKind::V2Insert => "V2_insert",
            MoveKind::V2Delete => "V2_delete",
            MoveKind::TriangleClassical => "Triangle_classical",
            MoveKind::TriangleVirtual => "Triangle_virtual",
            MoveKind::TriangleSemivirtual => "Triangle_semivirtual",
        }
    }

    pub fn is_insertion(self) -> bool {
        matches!(
            self,
            MoveKind::R1Insert | MoveKind::V1Insert | MoveKind::R2Insert | MoveKind::V2Insert
        )
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MoveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| MoveError::Syntax(format!("unknown move kind `{s}`")))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MoveSpec {
    R1Insert {
        gap: usize,
        sign: Sign,
        order: KinkOrder,
    },
    R1Delete {
        pos: usize,
    },
    V1Insert {
        gap: usize,
        sense: Sign,
    },
    V1Delete {
        pos: usize,
    },
    R2Insert {
        gaps: (usize, usize),
        sign: Sign,
        variant: Variant,
        layer: Layer,
    },
    R2Delete {
        first: usize,
        second: usize,
    },
    V2Insert {
        gaps: (usize, usize),
        sense: Sign,
        variant: Variant,
    },
    V2Delete {
        first: usize,
        second: usize,
    },
    Triangle {
        kind: TriangleKind,
        pairs: [usize; 3],
    },
}

impl MoveSpec {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveSpec::R1Insert { .. } => MoveKind::R1Insert,
            MoveSpec::R1Delete { .. } => MoveKind::R1Delete,
            MoveSpec::V1Insert { .. } => MoveKind::V1Insert,
            MoveSpec::V1Delete { .. } => MoveKind::V1Delete,
            MoveSpec::R2Insert { .. } => MoveKind::R2Insert,
            MoveSpec::R2Delete { .. } => MoveKind::R2Delete,
            MoveSpec::V2Insert { .. } => MoveKind::V2Insert,
            MoveSpec::V2Delete { .. } => MoveKind::V2Delete,
            MoveSpec::Triangle {
                kind: TriangleKind::Classical,
                ..
            } => MoveKind::TriangleClassical,
            MoveSpec::Triangle {
                kind: TriangleKind::Virtual,
                ..
            } => MoveKind::TriangleVirtual,
            MoveSpec::Triangle {
                kind: TriangleKind::Semivirtual,
                ..
            } => MoveKind::TriangleSemivirtual,
        }
    }

    /// For a first-move kink with an early-under crossing, the exponent `r`
    /// with `ζ(after) = q^r·ζ(before)`. `None` for every other move, which
    /// must leave `ζ` unchanged.
    pub fn q_shift(&self, before: &DiagramCode) -> Option<i32> {
        match *self {
            MoveSpec::R1Insert {
                order: KinkOrder::UnderFirst,
                sign,
                ..
            } => Some(sign.value()),
            MoveSpec::R1Delete { pos } => {
                let t = before.tokens().get(pos)?;
                match t.passage {
                    Passage::Under(sign) => Some(-sign.value()),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

fn sign_char(s: Sign) -> char {
    s.symbol()
}

impl fmt::Display for MoveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind();
        match *self {
            MoveSpec::R1Insert { gap, sign, order } => {
                let o = if order == KinkOrder::OverFirst {
                    "OU"
                } else {
                    "UO"
                };
                write!(f, "{kind} {gap} {} {o}", sign_char(sign))
            }
            MoveSpec::R1Delete { pos } | MoveSpec::V1Delete { pos } => write!(f, "{kind} {pos}"),
            MoveSpec::V1Insert { gap, sense } => write!(f, "{kind} {gap} {}", sign_char(sense)),
            MoveSpec::R2Insert {
                gaps,
                sign,
                variant,
                layer,
            } => {
                let l = if layer == Layer::Over {
                    "over"
                } else {
                    "under"
                };
                write!(
                    f,
                    "{kind} {} {} {} {} {l}",
                    gaps.0,
                    gaps.1,
                    sign_char(sign),
                    variant_name(variant)
                )
            }
            MoveSpec::V2Insert {
                gaps,
                sense,
                variant,
            } => {
                write!(
                    f,
                    "{kind} {} {} {} {}",
                    gaps.0,
                    gaps.1,
                    sign_char(sense),
                    variant_name(variant)
                )
            }
            MoveSpec::R2Delete { first, second } | MoveSpec::V2Delete { first, second } => {
                write!(f, "{kind} {first} {second}")
            }
            MoveSpec::Triangle { pairs, .. } => {
                write!(f, "{kind} {} {} {}", pairs[0], pairs[1], pairs[2])
            }
        }
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Parallel => "parallel",
        Variant::Antiparallel => "antiparallel",
    }
}

impl FromStr for MoveSpec {
    type Err = MoveError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (&head, args) = fields
            .split_first()
            .ok_or_else(|| MoveError::Syntax("empty move".into()))?;
        let kind: MoveKind = head.parse()?;
        let arity = match kind {
            MoveKind::R1Delete | MoveKind::V1Delete => 1,
            MoveKind::V1Insert | MoveKind::R2Delete | MoveKind::V2Delete => 2,
            MoveKind::R1Insert => 3,
            MoveKind::TriangleClassical
            | MoveKind::TriangleVirtual
            | MoveKind::TriangleSemivirtual => 3,
            MoveKind::V2Insert => 4,
            MoveKind::R2Insert => 5,
        };
        if args.len() != arity {
            return Err(MoveError::Syntax(format!(
                "{kind} takes {arity} parameters, got {}",
                args.len()
            )));
        }
        let num = |i: usize| -> Result<usize, MoveError> {
            args[i]
                .parse()
                .map_err(|_| MoveError::Syntax(format!("bad position `{}`", args[i])))
        };
        let sign = |i: usize| -> Result<Sign, MoveError> {
            let mut chars = args[i].chars();
            match (chars.next().and_then(Sign::from_symbol), chars.next()) {
                (Some(s), None) => Ok(s),
                _ => Err(MoveError::Syntax(format!("bad sign `{}`", args[i]))),
            }
        };
        let variant = |i: usize| match args[i] {
            "parallel" => Ok(Variant::Parallel),
            "antiparallel" => Ok(Variant::Antiparallel),
            other => Err(MoveError::Syntax(format!("bad variant `{other}`"))),
        };
        let triangle = |kind| {
            Ok(MoveSpec::Triangle {
                kind,
                pairs: [num(0)?, num(1)?, num(2)?],
            })
        };
        match kind {
            MoveKind::R1Insert => {
                let order = match args[2] {
                    "OU" => KinkOrder::OverFirst,
                    "UO" => KinkOrder::UnderFirst,
                    other => return Err(MoveError::Syntax(format!("bad kink order `{other}`"))),
                };
                Ok(MoveSpec::R1Insert {
                    gap: num(0)?,
                    sign: sign(1)?,
                    order,
                })
            }
            MoveKind::R1Delete => Ok(MoveSpec::R1Delete { pos: num(0)? }),
            MoveKind::V1Insert => Ok(MoveSpec::V1Insert {
                gap: num(0)?,
                sense: sign(1)?,
            }),
            MoveKind::V1Delete => Ok(MoveSpec::V1Delete { pos: num(0)? }),
            MoveKind::R2Insert => {
                let layer = match args[4] {
                    "over" => Layer::Over,
                    "under" => Layer::Under,
                    other => return Err(MoveError::Syntax(format!("bad layer `{other}`"))),
                };
                Ok(MoveSpec::R2Insert {
                    gaps: (num(0)?, num(1)?),
                    sign: sign(2)?,
                    variant: variant(3)?,
                    layer,
                })
            }
            MoveKind::R2Delete => Ok(MoveSpec::R2Delete {
                first: num(0)?,
                second: num(1)?,
            }),
            MoveKind::V2Insert => Ok(MoveSpec::V2Insert {
                gaps: (num(0)?, num(1)?),
                sense: sign(2)?,
                variant: variant(3)?,
            }),
            MoveKind::V2Delete => Ok(MoveSpec::V2Delete {
                first: num(0)?,
                second: num(1)?,
            }),
            MoveKind::TriangleClassical => triangle(TriangleKind::Classical),
            MoveKind::TriangleVirtual => triangle(TriangleKind::Virtual),
            MoveKind::TriangleSemivirtual => triangle(TriangleKind::Semivirtual),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("{spec}: {reason}")]
    Inapplicable { spec: String, reason: String },
    #[error("move syntax: {0}")]
    Syntax(String),
    #[error("move log line {line}: {message}")]
    Log { line: usize, message: String },
}

/// Replayable sequence of moves, one per line.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MoveLog {
    pub moves: Vec<MoveSpec>,
}

impl MoveLog {
    pub fn replay(&self, code: &DiagramCode) -> Result<DiagramCode, MoveError> {
        self.moves
            .iter()
            .try_fold(code.clone(), |c, m| apply(&c, m))
    }
}

impl fmt::Display for MoveLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for MoveLog {
    type Err = MoveError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut moves = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let m = line.parse().map_err(|e: MoveError| MoveError::Log {
                line: i + 1,
                message: match e {
                    MoveError::Syntax(s) => s,
                    other => other.to_string(),
                },
            })?;
            moves.push(m);
        }
        Ok(Self { moves })
    }
}

fn inapplicable(m: &MoveSpec, reason: impl Into<String>) -> MoveError {
    MoveError::Inapplicable {
        spec: m.to_string(),
        reason: reason.into(),
    }
}

fn pair_at(tokens: &[PassageToken], pos: usize) -> Option<(PassageToken, PassageToken)> {
    Some((*tokens.get(pos)?, *tokens.get(pos + 1)?))
}

fn remove_positions(tokens: &[PassageToken], drop: &[usize]) -> DiagramCode {
    DiagramCode::new(
        tokens
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, t)| *t)
            .collect(),
    )
}

fn insert_at(tokens: &[PassageToken], inserts: &[(usize, Vec<PassageToken>)]) -> DiagramCode {
    let mut out = Vec::with_capacity(tokens.len() + 4);
    for g in 0..=tokens.len() {
        for (gap, items) in inserts {
            if *gap == g {
                out.extend_from_slice(items);
            }
        }
        if let Some(t) = tokens.get(g) {
            out.push(*t);
        }
    }
    DiagramCode::new(out)
}

fn passage(letter: char, id: CrossingId, s: Sign) -> PassageToken {
    match letter {
        'O' => PassageToken::over(id, s),
        'U' => PassageToken::under(id, s),
        _ => PassageToken::virtual_pass(id, s),
    }
}

/// Rewrites `code` by `m`, or explains which condition of the site fails.
pub fn apply(code: &DiagramCode, m: &MoveSpec) -> Result<DiagramCode, MoveError> {
    let tokens = code.tokens();
    let n = tokens.len();
    let fresh = code.max_id() + 1;
    let check_gaps = |g1: usize, g2: usize| {
        if g1 > g2 || g2 > n {
            Err(inapplicable(
                m,
                format!("gaps must satisfy g1 <= g2 <= {n}"),
            ))
        } else {
            Ok(())
        }
    };
    match *m {
        MoveSpec::R1Insert { gap, sign, order } => {
            check_gaps(gap, gap)?;
            let (c, first, second) = (fresh, 'O', 'U');
            let mut items = vec![passage(first, c, sign), passage(second, c, sign)];
            if order == KinkOrder::UnderFirst {
                items.reverse();
            }
            Ok(insert_at(tokens, &[(gap, items)]))
        }
        MoveSpec::V1Insert { gap, sense } => {
            check_gaps(gap, gap)?;
            let items = vec![
                PassageToken::virtual_pass(fresh, sense),
                PassageToken::virtual_pass(fresh, sense.flip()),
            ];
            Ok(insert_at(tokens, &[(gap, items)]))
        }
        MoveSpec::R1Delete { pos } | MoveSpec::V1Delete { pos } => {
            let (a, b) =
                pair_at(tokens, pos).ok_or_else(|| inapplicable(m, "position out of range"))?;
            if a.crossing != b.crossing {
                return Err(inapplicable(
                    m,
                    "the two tokens belong to different crossings",
                ));
            }
            let wants_virtual = matches!(m, MoveSpec::V1Delete { .. });
            if a.is_virtual() != wants_virtual {
                return Err(inapplicable(
                    m,
                    if wants_virtual {
                        "crossing is classical"
                    } else {
                        "crossing is virtual"
                    },
                ));
            }
            Ok(remove_positions(tokens, &[pos, pos + 1]))
        }
        MoveSpec::R2Insert {
            gaps: (g1, g2),
            sign,
            variant,
            layer,
        } => {
            check_gaps(g1, g2)?;
            let (c, d) = (fresh, fresh + 1);
            let (a, b) = if layer == Layer::Over {
                ('O', 'U')
            } else {
                ('U', 'O')
            };
            let head = vec![passage(a, c, sign), passage(a, d, sign.flip())];
            let tail = if g1 == g2 || variant == Variant::Antiparallel {
                vec![passage(b, d, sign.flip()), passage(b, c, sign)]
            } else {
                vec![passage(b, c, sign), passage(b, d, sign.flip())]
            };
            Ok(insert_at(tokens, &[(g1, head), (g2, tail)]))
        }
        MoveSpec::V2Insert {
            gaps: (g1, g2),
            sense,
            variant,
        } => {
            check_gaps(g1, g2)?;
            let (c, d) = (fresh, fresh + 1);
            let v = PassageToken::virtual_pass;
            let head = vec![v(c, sense), v(d, sense.flip())];
            let tail = if g1 == g2 || variant == Variant::Antiparallel {
                vec![v(d, sense), v(c, sense.flip())]
            } else {
                vec![v(c, sense.flip()), v(d, sense)]
            };
            Ok(insert_at(tokens, &[(g1, head), (g2, tail)]))
        }
        MoveSpec::R2Delete { first, second } | MoveSpec::V2Delete { first, second } => {
            let wants_virtual = matches!(m, MoveSpec::V2Delete { .. });
            check_bigon(tokens, first, second, wants_virtual).map_err(|r| inapplicable(m, r))?;
            Ok(remove_positions(
                tokens,
                &[first, first + 1, second, second + 1],
            ))
        }
        MoveSpec::Triangle { kind, pairs } => {
            let found = triangle_at(tokens, pairs).map_err(|r| inapplicable(m, r))?;
            if found != kind {
                return Err(inapplicable(m, format!("site is a {found:?} triangle")));
            }
            let mut out = tokens.to_vec();
            for p in pairs {
                out.swap(p, p + 1);
            }
            Ok(DiagramCode::new(out))
        }
    }
}

fn check_bigon(
    tokens: &[PassageToken],
    first: usize,
    second: usize,
    virtual_: bool,
) -> Result<(), &'static str> {
    if second < first + 2 {
        return Err("pairs must be disjoint and in order");
    }
    let (a, b) = pair_at(tokens, first).ok_or("position out of range")?;
    let (c, d) = pair_at(tokens, second).ok_or("position out of range")?;
    if a.crossing == b.crossing {
        return Err("first pair is a single crossing");
    }
    let kinds_ok = if virtual_ {
        a.is_virtual() && b.is_virtual()
    } else {
        !a.is_virtual() && a.passage.letter() == b.passage.letter()
    };
    if !kinds_ok {
        return Err(if virtual_ {
            "first pair is not two virtual passages"
        } else {
            "first pair is not two over or two under passages"
        });
    }
    if a.sign() == b.sign() {
        return Err("the two crossings have the same sign or sense");
    }
    let mut ids = [c.crossing, d.crossing];
    ids.sort_unstable();
    let mut want = [a.crossing, b.crossing];
    want.sort_unstable();
    if ids != want {
        return Err("second pair does not hold the partner passages");
    }
    Ok(())
}

/// Kind of the triangle formed by the adjacent pairs starting at `pairs`,
/// or the reason they do not form one. Besides the token pattern, the three
/// strands must be orientable as straight lines: with `o_i = ±1` telling
/// whether strand `i` meets strand `i+1` first and `τ_i` the sense in which
/// strand `i+1` passes strand `i+2`, the products `o_i·τ_i` agree.
pub fn triangle_at(
    tokens: &[PassageToken],
    pairs: [usize; 3],
) -> Result<TriangleKind, &'static str> {
    if !(pairs[0] + 2 <= pairs[1] && pairs[1] + 2 <= pairs[2]) {
        return Err("pairs must be disjoint and in increasing order");
    }
    let mut strands = [[PassageToken::over(0, Sign::Pos); 2]; 3];
    for (s, &p) in strands.iter_mut().zip(&pairs) {
        let (a, b) = pair_at(tokens, p).ok_or("position out of range")?;
        if a.crossing == b.crossing {
            return Err("a pair holds both passages of one crossing");
        }
        *s = [a, b];
    }
    let ids = |i: usize| [strands[i][0].crossing, strands[i][1].crossing];
    let shared = |i: usize, j: usize| ids(i).into_iter().find(|x| ids(j).contains(x));
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (Some(x), Some(y)) = (shared(i, j), shared(i, k)) else {
            return Err("strands do not pairwise share a crossing");
        };
        if x == y || shared(j, k).is_none_or(|z| z == x || z == y) {
            return Err("strands do not pairwise share a crossing");
        }
    }
    let n_classical = {
        let mut cls: Vec<CrossingId> = strands
            .iter()
            .flatten()
            .filter(|t| !t.is_virtual())
            .map(|t| t.crossing)
            .collect();
        cls.sort_unstable();
        cls.dedup();
        cls.len()
    };
    let kind = match n_classical {
        0 => TriangleKind::Virtual,
        1 => TriangleKind::Semivirtual,
        3 => {
            let mut layers: Vec<String> = strands
                .iter()
                .map(|s| {
                    let mut l = [s[0].passage.letter(), s[1].passage.letter()];
                    l.sort_unstable();
                    l.iter().collect()
                })
                .collect();
            layers.sort();
            if layers != ["OO", "OU", "UU"] {
                return Err("no top, middle and bottom strand");
            }
            TriangleKind::Classical
        }
        _ => return Err("two classical crossings and one virtual crossing"),
    };
    let sense = |i: usize, j: usize| {
        let x = shared(i, j).expect("checked");
        let t = strands[i]
            .iter()
            .find(|t| t.crossing == x)
            .expect("checked");
        match t.passage {
            Passage::Virtual(s) | Passage::Over(s) => s.value(),
            Passage::Under(s) => -s.value(),
        }
    };
    let products: Vec<i32> = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let o = if ids(j).contains(&strands[i][0].crossing) {
                1
            } else {
                -1
            };
            o * sense(j, k)
        })
        .collect();
    if products.iter().any(|&x| x != products[0]) {
        return Err("orientations are not realizable by three straight strands");
    }
    Ok(kind)
}

fn triangle_sites(tokens: &[PassageToken]) -> Vec<MoveSpec> {
    let n = tokens.len();
    let mut position = std::collections::HashMap::with_capacity(n);
    for (i, t) in tokens.iter().enumerate() {
        position.entry(t.crossing).or_insert_with(Vec::new).push(i);
    }
    let other = |id: CrossingId, pos: usize| position[&id].iter().copied().find(|&p| p != pos);
    let pair_starts = |p: usize| [p.checked_sub(1), (p + 1 < n).then_some(p)];
    let mut sites = Vec::new();
    for a in 0..n.saturating_sub(1) {
        let (x, y) = (tokens[a], tokens[a + 1]);
        if x.crossing == y.crossing {
            continue;
        }
        let (Some(px), Some(py)) = (other(x.crossing, a), other(y.crossing, a + 1)) else {
            continue;
        };
        for b in pair_starts(px).into_iter().flatten() {
            for c in pair_starts(py).into_iter().flatten() {
                let mut starts = [a, b, c];
                starts.sort_unstable();
                if starts[0] != a {
                    continue;
                }
                if let Ok(kind) = triangle_at(tokens, starts) {
                    let spec = MoveSpec::Triangle {
                        kind,
                        pairs: starts,
                    };
                    if !sites.contains(&spec) {
                        sites.push(spec);
                    }
                }
            }
        }
    }
    sites
}

/// Upper bound on the number of insertion sites listed by [`enumerate_sites`].
pub const INSERTION_SITE_CAP: usize = 512;

const SIGNS: [Sign; 2] = [Sign::Pos, Sign::Neg];
const VARIANTS: [Variant; 2] = [Variant::Parallel, Variant::Antiparallel];

/// Applicable sites of one kind. Insertions are listed gap by gap up to
/// [`INSERTION_SITE_CAP`].
pub fn enumerate_sites(code: &DiagramCode, kind: MoveKind) -> Vec<MoveSpec> {
    let tokens = code.tokens();
    let n = tokens.len();
    let gaps = 0..=n;
    let gap_pairs = || (0..=n).flat_map(move |g1| (g1..=n).map(move |g2| (g1, g2)));
    let mut sites: Vec<MoveSpec> =
        match kind {
            MoveKind::R1Insert => gaps
                .flat_map(|gap| {
                    SIGNS.into_iter().flat_map(move |sign| {
                        [KinkOrder::OverFirst, KinkOrder::UnderFirst]
                            .map(|order| MoveSpec::R1Insert { gap, sign, order })
                    })
                })
                .take(INSERTION_SITE_CAP)
                .collect(),
            MoveKind::V1Insert => gaps
                .flat_map(|gap| SIGNS.map(|sense| MoveSpec::V1Insert { gap, sense }))
                .take(INSERTION_SITE_CAP)
                .collect(),
            MoveKind::R2Insert => gap_pairs()
                .flat_map(|gaps| {
                    SIGNS.into_iter().flat_map(move |sign| {
                        VARIANTS.into_iter().flat_map(move |variant| {
                            [Layer::Over, Layer::Under].map(|layer| MoveSpec::R2Insert {
                                gaps,
                                sign,
                                variant,
                                layer,
                            })
                        })
                    })
                })
                .take(INSERTION_SITE_CAP)
                .collect(),
            MoveKind::V2Insert => gap_pairs()
                .flat_map(|gaps| {
                    SIGNS.into_iter().flat_map(move |sense| {
                        VARIANTS.map(|variant| MoveSpec::V2Insert {
                            gaps,
                            sense,
                            variant,
                        })
                    })
                })
                .take(INSERTION_SITE_CAP)
                .collect(),
            MoveKind::R1Delete | MoveKind::V1Delete => {
                let virtual_ = kind == MoveKind::V1Delete;
                (0..n.saturating_sub(1))
                    .filter(|&p| {
                        tokens[p].crossing == tokens[p + 1].crossing
                            && tokens[p].is_virtual() == virtual_
                    })
                    .map(|pos| {
                        if virtual_ {
                            MoveSpec::V1Delete { pos }
                        } else {
                            MoveSpec::R1Delete { pos }
                        }
                    })
                    .collect()
            }
            MoveKind::R2Delete | MoveKind::V2Delete => {
                let virtual_ = kind == MoveKind::V2Delete;
                let mut out = Vec::new();
                for first in 0..n.saturating_sub(1) {
                    let (a, b) = (tokens[first], tokens[first + 1]);
                    let partners = code
                        .positions_of(a.crossing)
                        .into_iter()
                        .chain(code.positions_of(b.crossing));
                    for p in partners.filter(|&p| p > first + 1) {
                        for second in [p - 1, p] {
                            if check_bigon(tokens, first, second, virtual_).is_ok() {
                                let m = if virtual_ {
                                    MoveSpec::V2Delete { first, second }
                                } else {
                                    MoveSpec::R2Delete { first, second }
                                };
                                if !out.contains(&m) {
                                    out.push(m);
                                }
                            }
                        }
                    }
                }
                out
            }
            MoveKind::TriangleClassical
            | MoveKind::TriangleVirtual
            | MoveKind::TriangleSemivirtual => triangle_sites(tokens)
                .into_iter()
                .filter(|m| m.kind() == kind)
                .collect(),
        };
    sites.dedup();
    sites
}

fn random_insertion<G: Rng>(kind: MoveKind, n: usize, rng: &mut G) -> MoveSpec {
    let sign = *SIGNS.choose(rng).expect("nonempty");
    let variant = *VARIANTS.choose(rng).expect("nonempty");
    let mut gaps = || {
        let (a, b) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
        (a.min(b), a.max(b))
    };
    match kind {
        MoveKind::R1Insert => {
            let gap = gaps().0;
            let order = if rng.gen() {
                KinkOrder::OverFirst
            } else {
                KinkOrder::UnderFirst
            };
            MoveSpec::R1Insert { gap, sign, order }
        }
        MoveKind::V1Insert => MoveSpec::V1Insert {
            gap: gaps().0,
            sense: sign,
        },
        MoveKind::R2Insert => {
            let g = gaps();
            let layer = if rng.gen() { Layer::Over } else { Layer::Under };
            MoveSpec::R2Insert {
                gaps: g,
                sign,
                variant,
                layer,
            }
        }
        MoveKind::V2Insert => MoveSpec::V2Insert {
            gaps: gaps(),
            sense: sign,
            variant,
        },
        _ => unreachable!("not an insertion"),
    }
}

/// One random applicable move: a kind is drawn uniformly among the kinds
/// that have a site, then a site of that kind uniformly.
pub fn random_move<G: Rng>(code: &DiagramCode, rng: &mut G) -> MoveSpec {
    let mut candidates: Vec<(MoveKind, Vec<MoveSpec>)> = Vec::with_capacity(MoveKind::ALL.len());
    for kind in MoveKind::ALL {
        if kind.is_insertion() {
            candidates.push((kind, Vec::new()));
        } else {
            let sites = enumerate_sites(code, kind);
            if !sites.is_empty() {
                candidates.push((kind, sites));
            }
        }
    }
    let (kind, sites) = candidates
        .choose(rng)
        .expect("insertions are always available");
    if kind.is_insertion() {
        random_insertion(*kind, code.len(), rng)
    } else {
        *sites.choose(rng).expect("nonempty")
    }
}

/// Applies `steps` random moves, deterministically in `seed`.
pub fn random_equivalent(code: &DiagramCode, steps: usize, seed: u64) -> (DiagramCode, MoveLog) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = code.clone();
    let mut log = MoveLog::default();
    for _ in 0..steps {
        let m = random_move(&current, &mut rng);
        current = apply(&current, &m).expect("sampled sites are applicable");
        log.moves.push(m);
    }
    (current, log)
}
