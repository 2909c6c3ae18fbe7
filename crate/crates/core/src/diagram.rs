//! Gauss-style codes for long virtual knot diagrams and their decomposition
//! into arcs and long arcs.
//!
//! A code lists the passages met while walking the diagram from the `-∞` end
//! to the `+∞` end. Arcs are cut at under-passages and virtual passages;
//! long arcs are cut at under-passages only.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

pub type CrossingId = u32;

/// Local writhe of a classical crossing, or the sense of a virtual passage
/// (`Pos` = left to right over the transversal strand, degree goes up).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Pos),
            '-' => Some(Sign::Neg),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Passage {
    Over(Sign),
    Under(Sign),
    Virtual(Sign),
}

impl Passage {
    pub fn sign(self) -> Sign {
        match self {
            Passage::Over(s) | Passage::Under(s) | Passage::Virtual(s) => s,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Passage::Over(_) => 'O',
            Passage::Under(_) => 'U',
            Passage::Virtual(_) => 'V',
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PassageToken {
    pub crossing: CrossingId,
    pub passage: Passage,
}

impl PassageToken {
    pub fn over(crossing: CrossingId, sign: Sign) -> Self {
        Self {
            crossing,
            passage: Passage::Over(sign),
        }
    }

    pub fn under(crossing: CrossingId, sign: Sign) -> Self {
        Self {
            crossing,
            passage: Passage::Under(sign),
        }
    }

    pub fn virtual_pass(crossing: CrossingId, sense: Sign) -> Self {
        Self {
            crossing,
            passage: Passage::Virtual(sense),
        }
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self.passage, Passage::Virtual(_))
    }

    pub fn is_under(&self) -> bool {
        matches!(self.passage, Passage::Under(_))
    }

    pub fn is_over(&self) -> bool {
        matches!(self.passage, Passage::Over(_))
    }

    pub fn sign(&self) -> Sign {
        self.passage.sign()
    }
}

impl fmt::Display for PassageToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.passage.letter(),
            self.crossing,
            self.sign().symbol()
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at token {token} (byte offset {offset}): `{text}`")]
pub struct ParseError {
    /// 1-based index among the tokens of the input.
    pub token: usize,
    pub offset: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroId { position: usize },
    Occurrences { crossing: CrossingId, count: usize },
    MixedKinds { crossing: CrossingId },
    DuplicatePassage { crossing: CrossingId, letter: char },
    SignMismatch { crossing: CrossingId },
    SameSense { crossing: CrossingId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroId { position } => {
                write!(f, "token {position}: crossing id must be at least 1")
            }
            Violation::Occurrences { crossing, count } => {
                write!(f, "crossing {crossing}: occurs {count} times, expected 2")
            }
            Violation::MixedKinds { crossing } => write!(
                f,
                "crossing {crossing}: mixes classical and virtual passages"
            ),
            Violation::DuplicatePassage { crossing, letter } => {
                write!(f, "crossing {crossing}: two `{letter}` passages")
            }
            Violation::SignMismatch { crossing } => {
                write!(f, "crossing {crossing}: over and under signs differ")
            }
            Violation::SameSense { crossing } => write!(
                f,
                "virtual crossing {crossing}: both passages have the same sense"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid diagram code: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Ordered passages of a long diagram. Validity is checked separately by
/// [`DiagramCode::validate`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiagramCode {
    tokens: Vec<PassageToken>,
}

impl DiagramCode {
    pub fn new(tokens: Vec<PassageToken>) -> Self {
        Self { tokens }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn tokens(&self) -> &[PassageToken] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<PassageToken> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn max_id(&self) -> CrossingId {
        self.tokens.iter().map(|t| t.crossing).max().unwrap_or(0)
    }

    /// Sorted ids of the classical crossings.
    pub fn classical_ids(&self) -> Vec<CrossingId> {
        let mut ids: Vec<_> = self
            .tokens
            .iter()
            .filter(|t| t.is_over())
            .map(|t| t.crossing)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Number of classical crossings (`n`).
    pub fn classical_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_over()).count()
    }

    /// Number of virtual crossings (`k`).
    pub fn virtual_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_virtual()).count() / 2
    }

    /// Positions of the two tokens of `id`, in traversal order.
    pub fn positions_of(&self, id: CrossingId) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.crossing == id)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn shifted(&self, by: CrossingId) -> Self {
        Self::new(
            self.tokens
                .iter()
                .map(|t| PassageToken {
                    crossing: t.crossing + by,
                    ..*t
                })
                .collect(),
        )
    }

    /// Renumbers crossings 1, 2, ... in order of first appearance.
    pub fn relabeled(&self) -> Self {
        let mut map = BTreeMap::new();
        let tokens = self
            .tokens
            .iter()
            .map(|t| {
                let next = map.len() as CrossingId + 1;
                let id = *map.entry(t.crossing).or_insert(next);
                PassageToken { crossing: id, ..*t }
            })
            .collect();
        Self::new(tokens)
    }

    /// Product of long diagrams: `self` followed by `other`, whose ids are
    /// moved past the largest id of `self`.
    pub fn connect_sum(&self, other: &DiagramCode) -> DiagramCode {
        let mut tokens = self.tokens.clone();
        tokens.extend(other.shifted(self.max_id()).tokens);
        Self::new(tokens)
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let mut by_id: BTreeMap<CrossingId, Vec<Passage>> = BTreeMap::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.crossing == 0 {
                violations.push(Violation::ZeroId { position: i + 1 });
                continue;
            }
            by_id.entry(t.crossing).or_default().push(t.passage);
        }
        for (&crossing, passages) in &by_id {
            if passages.len() != 2 {
                violations.push(Violation::Occurrences {
                    crossing,
                    count: passages.len(),
                });
                continue;
            }
            match (passages[0], passages[1]) {
                (Passage::Virtual(a), Passage::Virtual(b)) => {
                    if a == b {
                        violations.push(Violation::SameSense { crossing });
                    }
                }
                (Passage::Virtual(_), _) | (_, Passage::Virtual(_)) => {
                    violations.push(Violation::MixedKinds { crossing });
                }
                (Passage::Over(_), Passage::Over(_)) => {
                    violations.push(Violation::DuplicatePassage {
                        crossing,
                        letter: 'O',
                    });
                }
                (Passage::Under(_), Passage::Under(_)) => {
                    violations.push(Violation::DuplicatePassage {
                        crossing,
                        letter: 'U',
                    });
                }
                (a, b) => {
                    if a.sign() != b.sign() {
                        violations.push(Violation::SignMismatch { crossing });
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn decompose(&self) -> Result<Decomposition, DiagramError> {
        self.validate().map_err(DiagramError::Invalid)?;
        Ok(Decomposition::build(self))
    }
}

impl fmt::Display for DiagramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for DiagramCode {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let base = text.as_ptr() as usize;
        let mut tokens = Vec::new();
        for line in text.lines() {
            if line.trim_start().starts_with('#') {
                continue;
            }
            for word in line.split_whitespace() {
                let offset = word.as_ptr() as usize - base;
                let err = || ParseError {
                    token: tokens.len() + 1,
                    offset,
                    text: word.to_string(),
                };
                tokens.push(parse_token(word).ok_or_else(err)?);
            }
        }
        Ok(Self::new(tokens))
    }
}

fn parse_token(word: &str) -> Option<PassageToken> {
    let mut chars = word.chars();
    let letter = chars.next()?;
    let sign = Sign::from_symbol(chars.next_back()?)?;
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let crossing: CrossingId = digits.parse().ok().filter(|&id| id >= 1)?;
    let passage = match letter {
        'O' => Passage::Over(sign),
        'U' => Passage::Under(sign),
        'V' => Passage::Virtual(sign),
        _ => return None,
    };
    Some(PassageToken { crossing, passage })
}

/// Segment of the diagram between two consecutive cut tokens. `start` and
/// `end` are token positions of the cuts; `None` stands for the open ends.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Arc {
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub long_arc: usize,
    pub degree: i32,
}

impl Arc {
    /// Whether the token at `pos` lies strictly inside the arc.
    pub fn contains(&self, pos: usize) -> bool {
        self.start.is_none_or(|s| s < pos) && self.end.is_none_or(|e| pos < e)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Origin {
    SourceEnd,
    Crossing(CrossingId),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LongArc {
    /// Indices into [`Decomposition::arcs`], in traversal order.
    pub arcs: Vec<usize>,
    pub origin: Origin,
    pub is_initial: bool,
    pub is_final: bool,
    pub increasing_count: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EarlyClass {
    EarlyOver,
    EarlyUnder,
}

/// Long arcs feeding one matrix column, in walk order. The united column
/// lists the final long arc first and the initial one second: the walk leaves
/// the paired crossing, runs to `+∞` and comes back from `-∞`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Column {
    pub crossing: CrossingId,
    pub long_arcs: Vec<usize>,
}

/// Arcs, long arcs, degrees and crossing data of a valid code.
///
/// Degrees start at 0 on the first arc of every long arc and move by the
/// sense at each virtual passage. On the united long arc the initial half
/// continues from the final degree of the final half.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    pub arcs: Vec<Arc>,
    pub long_arcs: Vec<LongArc>,
    /// Row order of the matrix: classical ids, ascending.
    pub crossings: Vec<CrossingId>,
    /// `columns[j]` is paired with `crossings[j]`.
    pub columns: Vec<Column>,
    pub pairing: BTreeMap<CrossingId, usize>,
    pub united_column: Option<usize>,
    pub early_class: BTreeMap<CrossingId, EarlyClass>,
    pub signs: BTreeMap<CrossingId, Sign>,
    pub over_position: BTreeMap<CrossingId, usize>,
    pub under_position: BTreeMap<CrossingId, usize>,
    pub virtual_count: usize,
}

impl Decomposition {
    fn build(code: &DiagramCode) -> Self {
        let tokens = code.tokens();
        let mut bounds = vec![None];
        bounds.extend(
            tokens
                .iter()
                .enumerate()
                .filter(|(_, t)| !t.is_over())
                .map(|(i, _)| Some(i)),
        );
        bounds.push(None);

        let mut arcs = Vec::with_capacity(bounds.len() - 1);
        let mut long_arcs: Vec<LongArc> = Vec::new();
        for w in bounds.windows(2) {
            let (start, end) = (w[0], w[1]);
            let opens_long_arc = start.is_none_or(|s| tokens[s].is_under());
            let degree = if opens_long_arc {
                long_arcs.push(LongArc {
                    arcs: Vec::new(),
                    origin: start
                        .map_or(Origin::SourceEnd, |s| Origin::Crossing(tokens[s].crossing)),
                    is_initial: start.is_none(),
                    is_final: false,
                    increasing_count: 0,
                });
                0
            } else {
                let sense = tokens[start.unwrap()].sign();
                let current = long_arcs.last_mut().unwrap();
                if sense == Sign::Pos {
                    current.increasing_count += 1;
                }
                let prev: &Arc = &arcs[*current.arcs.last().unwrap()];
                prev.degree + sense.value()
            };
            let long_arc = long_arcs.len() - 1;
            long_arcs[long_arc].arcs.push(arcs.len());
            arcs.push(Arc {
                start,
                end,
                long_arc,
                degree,
            });
        }
        long_arcs.last_mut().unwrap().is_final = true;

        let crossings = code.classical_ids();
        let mut over_position = BTreeMap::new();
        let mut under_position = BTreeMap::new();
        let mut signs = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            match t.passage {
                Passage::Over(s) => {
                    over_position.insert(t.crossing, i);
                    signs.insert(t.crossing, s);
                }
                Passage::Under(_) => {
                    under_position.insert(t.crossing, i);
                }
                Passage::Virtual(_) => {}
            }
        }
        let early_class = crossings
            .iter()
            .map(|c| {
                let class = if over_position[c] < under_position[c] {
                    EarlyClass::EarlyOver
                } else {
                    EarlyClass::EarlyUnder
                };
                (*c, class)
            })
            .collect();

        let mut columns = Vec::with_capacity(crossings.len());
        let mut united_column = None;
        if !crossings.is_empty() {
            let last = long_arcs.len() - 1;
            let offset = arcs[*long_arcs[last].arcs.last().unwrap()].degree;
            for &a in &long_arcs[0].arcs {
                arcs[a].degree += offset;
            }
            let by_origin: BTreeMap<CrossingId, usize> = long_arcs
                .iter()
                .enumerate()
                .filter_map(|(i, l)| match l.origin {
                    Origin::Crossing(c) => Some((c, i)),
                    Origin::SourceEnd => None,
                })
                .collect();
            for (j, &c) in crossings.iter().enumerate() {
                let l = by_origin[&c];
                if l == last {
                    united_column = Some(j);
                    columns.push(Column {
                        crossing: c,
                        long_arcs: vec![last, 0],
                    });
                } else {
                    columns.push(Column {
                        crossing: c,
                        long_arcs: vec![l],
                    });
                }
            }
        }
        let pairing = crossings.iter().enumerate().map(|(j, c)| (*c, j)).collect();

        Self {
            arcs,
            long_arcs,
            crossings,
            columns,
            pairing,
            united_column,
            early_class,
            signs,
            over_position,
            under_position,
            virtual_count: code.virtual_count(),
        }
    }

    pub fn classical_count(&self) -> usize {
        self.crossings.len()
    }

    /// Arcs of column `j` in walk order.
    pub fn column_arcs(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.columns[j]
            .long_arcs
            .iter()
            .flat_map(move |&l| self.long_arcs[l].arcs.iter().copied())
    }

    /// Increasing passages along the long arcs of column `j`.
    pub fn column_increasing(&self, j: usize) -> usize {
        self.columns[j]
            .long_arcs
            .iter()
            .map(|&l| self.long_arcs[l].increasing_count)
            .sum()
    }

    /// On the united column: the last arc before `+∞` and the first arc after
    /// `-∞`, which meet at infinity.
    pub fn junction(&self) -> Option<(usize, usize)> {
        self.united_column?;
        let last = self.long_arcs.last()?.arcs.last()?;
        let first = self.long_arcs.first()?.arcs.first()?;
        Some((*last, *first))
    }
}

/// Built-in diagram families.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    ClassicalTrefoil,
    ClassicalFigure8,
    VirtualKink,
    /// `r`-fold product of the virtual kink.
    VirtualKinkChain(u32),
}

impl FromStr for Family {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classical_trefoil" | "trefoil" => Ok(Family::ClassicalTrefoil),
            "classical_figure8" | "figure8" => Ok(Family::ClassicalFigure8),
            "virtual_kink" => Ok(Family::VirtualKink),
            _ => {
                let r = s
                    .strip_prefix("virtual_kink_chain")
                    .or_else(|| s.strip_prefix("kink_chain_"))
                    .map(|r| r.trim_matches(|c| c == '(' || c == ')' || c == '_'))
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| {
                        DiagramError::InvalidParameter(format!("unknown family `{s}`"))
                    })?;
                Ok(Family::VirtualKinkChain(r))
            }
        }
    }
}

pub fn generate(family: Family) -> Result<DiagramCode, DiagramError> {
    let text = match family {
        Family::ClassicalTrefoil => "O1+ U2+ O3+ U1+ O2+ U3+",
        Family::ClassicalFigure8 => "O1+ U2- O3- U1+ O4+ U3- O2- U4+",
        Family::VirtualKink => "O1+ V2+ U1+ V2-",
        Family::VirtualKinkChain(0) => {
            return Err(DiagramError::InvalidParameter(
                "virtual_kink_chain needs r >= 1".into(),
            ));
        }
        Family::VirtualKinkChain(r) => {
            let kink = generate(Family::VirtualKink)?;
            return Ok((1..r).fold(kink.clone(), |acc, _| acc.connect_sum(&kink)));
        }
    };
    Ok(text.parse().expect("built-in code parses"))
}

/// Uniformly shuffled valid code with `n` classical and `k` virtual
/// crossings and random signs and senses.
pub fn random_code<G: Rng + ?Sized>(n: usize, k: usize, rng: &mut G) -> DiagramCode {
    let mut tokens = Vec::with_capacity(2 * (n + k));
    for c in 1..=n as CrossingId {
        let sign = if rng.gen() { Sign::Pos } else { Sign::Neg };
        tokens.push(PassageToken::over(c, sign));
        tokens.push(PassageToken::under(c, sign));
    }
    for v in 0..k as CrossingId {
        let id = n as CrossingId + 1 + v;
        let sense = if rng.gen() { Sign::Pos } else { Sign::Neg };
        tokens.push(PassageToken::virtual_pass(id, sense));
        tokens.push(PassageToken::virtual_pass(id, sense.flip()));
    }
    tokens.shuffle(rng);
    DiagramCode::new(tokens)
}
