//! Elections and referenda as societies.
//!
//! Voters fall into types by preference order (τ = |C|! types, indexed by
//! lexicographic Lehmer rank, plus an optional latent type for deletion
//! models). Conditions over the resulting society variables `s_0..s_{τ-1}`
//! express head-to-head wins, Condorcet victory, and the Dodgson/Young/
//! Dodgson′ score predicates.

use crate::error::{Error, Result};
use crate::pa::{negate_nnf, substitute_affine, Int, LinearAtom, PaFormula};
use crate::society::{
    build_move_constraints_over, move_var_block, shift_by_move, society_var, society_vars,
    MoveCosts, Price, Society, SocietyRef,
};
use std::collections::BTreeMap;

/// An election: named candidates, voter counts per preference order, and a
/// uniform per-pair swap price (default 1).
#[derive(Debug, Clone)]
pub struct Election {
    candidates: Vec<String>,
    tallies: BTreeMap<Vec<usize>, Int>,
    swap_sigma: BTreeMap<(usize, usize), Int>,
}

impl Election {
    pub fn new(candidates: Vec<String>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::invalid("an election needs at least one candidate"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &candidates {
            if !seen.insert(c.clone()) {
                return Err(Error::invalid(format!("duplicate candidate `{c}`")));
            }
        }
        Ok(Election { candidates, tallies: BTreeMap::new(), swap_sigma: BTreeMap::new() })
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidate_index(&self, name: &str) -> Result<usize> {
        self.candidates
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::invalid(format!("unknown candidate `{name}`")))
    }

    /// Adds voters sharing one preference order (candidate indices, most
    /// preferred first).
    pub fn add_voters(&mut self, order: Vec<usize>, count: Int) -> Result<()> {
        if count < 1 {
            return Err(Error::invalid("voter count must be at least 1"));
        }
        validate_permutation(&order, self.candidate_count())?;
        *self.tallies.entry(order).or_insert(0) += count;
        Ok(())
    }

    pub fn set_swap_cost(&mut self, a: usize, b: usize, sigma: Int) -> Result<()> {
        if a == b || a >= self.candidate_count() || b >= self.candidate_count() {
            return Err(Error::invalid("swap cost needs two distinct candidates"));
        }
        if sigma < 1 {
            return Err(Error::invalid("swap cost must be positive"));
        }
        self.swap_sigma.insert((a.min(b), a.max(b)), sigma);
        Ok(())
    }

    pub fn swap_cost(&self, a: usize, b: usize) -> Int {
        self.swap_sigma.get(&(a.min(b), a.max(b))).copied().unwrap_or(1)
    }

    pub fn has_unit_swap_costs(&self) -> bool {
        self.swap_sigma.values().all(|&s| s == 1)
    }

    pub fn tallies(&self) -> impl Iterator<Item = (&Vec<usize>, Int)> {
        self.tallies.iter().map(|(o, &c)| (o, c))
    }

    pub fn voter_count(&self) -> Int {
        self.tallies.values().sum()
    }

    /// Parses the election file format:
    ///
    /// ```text
    /// candidates a b c
    /// voters 3 : a > b > c
    /// swapcost a b 2        # optional; default 1 per unordered pair
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut election: Option<Election> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap();
            let err = |msg: String| Error::Parse { line: lineno + 1, col: 1, msg };
            match key {
                "candidates" => {
                    let names: Vec<String> = words.map(str::to_string).collect();
                    if election.is_some() {
                        return Err(err("duplicate candidates line".into()));
                    }
                    election = Some(Election::new(names)?);
                }
                "voters" => {
                    let e = election
                        .as_mut()
                        .ok_or_else(|| err("voters before candidates".into()))?;
                    let count: Int = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("expected voter count".into()))?;
                    let rest = line
                        .split_once(':')
                        .ok_or_else(|| err("expected `:` before the order".into()))?
                        .1;
                    let mut order = Vec::new();
                    for name in rest.split('>').map(str::trim) {
                        if name.is_empty() {
                            return Err(err("empty candidate in order".into()));
                        }
                        order.push(e.candidate_index(name)?);
                    }
                    e.add_voters(order, count)?;
                }
                "swapcost" => {
                    let e = election
                        .as_mut()
                        .ok_or_else(|| err("swapcost before candidates".into()))?;
                    let a = words.next().ok_or_else(|| err("expected candidate".into()))?;
                    let b = words.next().ok_or_else(|| err("expected candidate".into()))?;
                    let sigma: Int = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("expected swap price".into()))?;
                    let (a, b) = (e.candidate_index(a)?, e.candidate_index(b)?);
                    e.set_swap_cost(a, b, sigma)?;
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let e = election.ok_or_else(|| Error::invalid("missing candidates line"))?;
        if e.tallies.is_empty() {
            return Err(Error::invalid("election has no voters"));
        }
        Ok(e)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

fn validate_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: order.len() });
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || seen[c] {
            return Err(Error::invalid("order is not a permutation of the candidates"));
        }
        seen[c] = true;
    }
    Ok(())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lexicographic rank of a permutation via its Lehmer code.
pub fn rank_order(order: &[usize]) -> Result<usize> {
    validate_permutation(order, order.len())?;
    let n = order.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller_after = order[i + 1..].iter().filter(|&&x| x < order[i]).count();
        rank += smaller_after * factorial(n - 1 - i);
    }
    Ok(rank)
}

/// Inverse of [`rank_order`] for `n` candidates.
pub fn unrank_order(mut index: usize, n: usize) -> Result<Vec<usize>> {
    if index >= factorial(n) {
        return Err(Error::invalid(format!("rank {index} out of range for {n} candidates")));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i);
        let pick = index / f;
        index %= f;
        order.push(pool.remove(pick));
    }
    Ok(order)
}

/// Bijection between preference orders and type indices `0..|C|!-1`
/// (lexicographic rank), with an optional latent type appended at `|C|!`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIndex {
    n_candidates: usize,
    latent: bool,
}

impl TypeIndex {
    pub fn new(n_candidates: usize) -> Self {
        TypeIndex { n_candidates, latent: false }
    }

    pub fn with_latent(n_candidates: usize) -> Self {
        TypeIndex { n_candidates, latent: true }
    }

    pub fn candidate_count(&self) -> usize {
        self.n_candidates
    }

    /// Number of active (preference-order) types.
    pub fn active_types(&self) -> usize {
        factorial(self.n_candidates)
    }

    /// Total number of types including the latent one, if any.
    pub fn tau(&self) -> usize {
        self.active_types() + usize::from(self.latent)
    }

    pub fn latent_type(&self) -> Option<usize> {
        self.latent.then(|| self.active_types())
    }

    pub fn rank(&self, order: &[usize]) -> Result<usize> {
        if order.len() != self.n_candidates {
            return Err(Error::DimensionMismatch { expected: self.n_candidates, got: order.len() });
        }
        rank_order(order)
    }

    pub fn unrank(&self, index: usize) -> Result<Vec<usize>> {
        unrank_order(index, self.n_candidates)
    }
}

/// Number of candidate pairs the two orders rank oppositely.
pub fn kendall_tau(p: &[usize], q: &[usize]) -> Result<usize> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    validate_permutation(p, p.len())?;
    validate_permutation(q, q.len())?;
    let n = p.len();
    let mut pos_q = vec![0usize; n];
    for (idx, &c) in q.iter().enumerate() {
        pos_q[c] = idx;
    }
    let mut inversions = 0;
    for i in 0..n {
        for j in i + 1..n {
            if pos_q[p[i]] > pos_q[p[j]] {
                inversions += 1;
            }
        }
    }
    Ok(inversions)
}

/// The election as a society: `s_i` = number of voters of the order with
/// rank `i`.
pub fn election_to_society(e: &Election) -> Result<(Society, TypeIndex)> {
    let t = TypeIndex::new(e.candidate_count());
    let mut counts = vec![0; t.tau()];
    for (order, c) in e.tallies() {
        counts[t.rank(order)?] += c;
    }
    Ok((Society::new(counts)?, t))
}

/// As [`election_to_society`] with the latent type appended (count 0).
pub fn election_to_society_latent(e: &Election) -> Result<(Society, TypeIndex)> {
    let (s, _) = election_to_society(e)?;
    Ok((s.with_latent(), TypeIndex::with_latent(e.candidate_count())))
}

/// Minimum σ-price of turning one order into another by adjacent swaps:
/// shortest paths over the adjacent-transposition graph of permutations.
/// With unit σ this is the Kendall-tau distance. Latent edges (if the index
/// has a latent type) are +∞ — swaps never delete voters.
pub fn swap_cost_vector(e: &Election, t: &TypeIndex) -> Result<MoveCosts> {
    let perms = t.active_types();
    let n = t.candidate_count();
    let tau = t.tau();
    let mut cost = vec![Price::Infinite; tau * tau];
    for i in 0..tau {
        cost[i * tau + i] = Price::Finite(0);
    }
    // Dijkstra from every permutation; the graph is tiny (τ ≤ |C|! nodes).
    for src in 0..perms {
        let mut dist = vec![Int::MAX; perms];
        dist[src] = 0;
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse((0, src)));
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            let order = t.unrank(u)?;
            for k in 0..n.saturating_sub(1) {
                let mut next = order.clone();
                next.swap(k, k + 1);
                let w = e.swap_cost(order[k], order[k + 1]);
                let v = t.rank(&next)?;
                if d + w < dist[v] {
                    dist[v] = d + w;
                    heap.push(std::cmp::Reverse((d + w, v)));
                }
            }
        }
        for dst in 0..perms {
            if dist[dst] < Int::MAX {
                cost[src * tau + dst] = Price::Finite(dist[dst]);
            }
        }
    }
    MoveCosts::new(tau, cost)
}

/// Unit swap-distance matrix: entry (i,j) is the number of inversions
/// between the orders of ranks i and j. This is the score-side price vector
/// for the Dodgson condition regardless of the election's σ.
pub fn kendall_cost_vector(t: &TypeIndex) -> Result<MoveCosts> {
    let perms = t.active_types();
    let tau = t.tau();
    let mut cost = vec![Price::Infinite; tau * tau];
    for i in 0..tau {
        cost[i * tau + i] = Price::Finite(0);
    }
    for i in 0..perms {
        let p = t.unrank(i)?;
        for j in 0..perms {
            if i == j {
                continue;
            }
            let q = t.unrank(j)?;
            cost[i * tau + j] = Price::Finite(kendall_tau(&p, &q)? as Int);
        }
    }
    MoveCosts::new(tau, cost)
}

/// Deletion prices: 1 from every active type to the latent type, +∞ between
/// distinct active types and from latent back, 0 on the diagonal.
pub fn deletion_cost_vector(t: &TypeIndex) -> Result<MoveCosts> {
    let latent = t
        .latent_type()
        .ok_or_else(|| Error::invalid("deletion costs need a latent type"))?;
    let tau = t.tau();
    let mut cost = vec![Price::Infinite; tau * tau];
    for i in 0..tau {
        cost[i * tau + i] = Price::Finite(0);
    }
    for i in 0..latent {
        cost[i * tau + latent] = Price::Finite(1);
    }
    MoveCosts::new(tau, cost)
}

/// Uniform per-person price matrix over the active types (latent edges +∞).
pub fn unit_bribe_cost_vector(t: &TypeIndex) -> Result<MoveCosts> {
    let perms = t.active_types();
    let tau = t.tau();
    let mut cost = vec![Price::Infinite; tau * tau];
    for i in 0..tau {
        cost[i * tau + i] = Price::Finite(0);
    }
    for i in 0..perms {
        for j in 0..perms {
            if i != j {
                cost[i * tau + j] = Price::Finite(1);
            }
        }
    }
    MoveCosts::new(tau, cost)
}

/// Strict head-to-head victory of `c` over `c_other` as one `≤` atom over the
/// society variables: Σ_{i: c_other ≻_i c} s_i − Σ_{i: c ≻_i c_other} s_i ≤ −1.
/// The latent type (if any) is excluded from both sums.
pub fn build_beats(c: usize, c_other: usize, t: &TypeIndex) -> Result<PaFormula> {
    if c == c_other {
        return Err(Error::invalid("a candidate cannot beat itself"));
    }
    let n = t.candidate_count();
    if c >= n || c_other >= n {
        return Err(Error::invalid("candidate index out of range"));
    }
    let mut terms = Vec::new();
    for i in 0..t.active_types() {
        let order = t.unrank(i)?;
        let pos_c = order.iter().position(|&x| x == c).unwrap();
        let pos_o = order.iter().position(|&x| x == c_other).unwrap();
        terms.push((society_var(i), if pos_c < pos_o { -1 } else { 1 }));
    }
    Ok(PaFormula::Atom(LinearAtom::new(terms, -1)))
}

/// Condorcet victory of `c`: conjunction of beats over all rivals.
pub fn build_condorcet(c: usize, t: &TypeIndex) -> Result<PaFormula> {
    let mut parts = Vec::new();
    for other in 0..t.candidate_count() {
        if other != c {
            parts.push(build_beats(c, other, t)?);
        }
    }
    Ok(PaFormula::And(parts))
}

/// Winner semantics: co-winner ties allowed (default), or unique winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WinnerMode {
    #[default]
    CoWinner,
    UniqueWinner,
}

/// Shared builder for the score-d winning conditions: the ∃ block asserts a
/// feasible (costs, d)-move making `c_star` a Condorcet winner, the ∀ block
/// asserts no feasible (costs, d−1)-move (d under unique-winner semantics)
/// makes any rival one. Free variables are the society block `s_0..s_{τ−1}`.
fn build_score_condition(
    t: &TypeIndex,
    c_star: usize,
    d: Int,
    score_costs: &MoveCosts,
    mode: WinnerMode,
) -> Result<PaFormula> {
    if d < 0 {
        return Err(Error::invalid("score budget must be non-negative"));
    }
    if c_star >= t.candidate_count() {
        return Err(Error::invalid("candidate index out of range"));
    }
    if d == 0 {
        // Degenerate: the move is forced to zero, and no rival can also be a
        // Condorcet winner, so both semantics collapse to plain victory.
        return build_condorcet(c_star, t);
    }
    let tau = t.tau();
    let svars = society_vars(tau);

    let witness_prefix = "w";
    let rival_prefix = "r";
    let guard_w =
        build_move_constraints_over(score_costs, d, SocietyRef::Vars(&svars), witness_prefix)?;
    let cond_star =
        substitute_affine(&build_condorcet(c_star, t)?, &shift_by_move(&svars, witness_prefix))?;

    let rival_budget = match mode {
        WinnerMode::CoWinner => d - 1,
        WinnerMode::UniqueWinner => d,
    };
    let guard_r = build_move_constraints_over(
        score_costs,
        rival_budget,
        SocietyRef::Vars(&svars),
        rival_prefix,
    )?;
    let shift_r = shift_by_move(&svars, rival_prefix);
    let mut no_rival = Vec::new();
    for c in 0..t.candidate_count() {
        if c != c_star {
            no_rival.push(negate_nnf(&substitute_affine(&build_condorcet(c, t)?, &shift_r)?));
        }
    }
    // Guarded universal: an infeasible or over-budget rival move satisfies
    // the block vacuously.
    let universal_body =
        PaFormula::Or(vec![negate_nnf(&guard_r), PaFormula::And(no_rival)]);

    let matrix = PaFormula::And(vec![guard_w, cond_star, universal_body]);
    Ok(PaFormula::exists(
        move_var_block(witness_prefix, tau),
        PaFormula::forall(move_var_block(rival_prefix, tau), matrix),
    ))
}

/// Dodgson-winner-with-score-d condition over the society variables. Swap
/// prices are the unit swap distances (inversion counts) between orders.
pub fn build_dodgson_condition(
    e: &Election,
    c_star: usize,
    d: Int,
    mode: WinnerMode,
) -> Result<PaFormula> {
    let t = TypeIndex::new(e.candidate_count());
    build_score_condition(&t, c_star, d, &kendall_cost_vector(&t)?, mode)
}

/// Young analogue: deletion prices over the latent-extended type space.
pub fn build_young_condition(
    e: &Election,
    c_star: usize,
    d: Int,
    mode: WinnerMode,
) -> Result<PaFormula> {
    let t = TypeIndex::with_latent(e.candidate_count());
    build_score_condition(&t, c_star, d, &deletion_cost_vector(&t)?, mode)
}

/// Dodgson′: every off-diagonal reassignment costs 1 (bribed-voter count).
pub fn build_dodgson_prime_condition(
    e: &Election,
    c_star: usize,
    d: Int,
    mode: WinnerMode,
) -> Result<PaFormula> {
    let t = TypeIndex::new(e.candidate_count());
    build_score_condition(&t, c_star, d, &unit_bribe_cost_vector(&t)?, mode)
}

/// A referendum: named issues, voter counts per yes/no ballot, and the
/// agenda to push.
#[derive(Debug, Clone)]
pub struct Referendum {
    issues: Vec<String>,
    tallies: BTreeMap<Vec<bool>, Int>,
    agenda: Vec<bool>,
}

impl Referendum {
    pub fn new(issues: Vec<String>, agenda: Vec<bool>) -> Result<Self> {
        if issues.is_empty() {
            return Err(Error::invalid("a referendum needs at least one issue"));
        }
        if agenda.len() != issues.len() {
            return Err(Error::DimensionMismatch { expected: issues.len(), got: agenda.len() });
        }
        Ok(Referendum { issues, tallies: BTreeMap::new(), agenda })
    }

    pub fn add_ballots(&mut self, ballot: Vec<bool>, count: Int) -> Result<()> {
        if ballot.len() != self.issues.len() {
            return Err(Error::DimensionMismatch { expected: self.issues.len(), got: ballot.len() });
        }
        if count < 1 {
            return Err(Error::invalid("ballot count must be at least 1"));
        }
        *self.tallies.entry(ballot).or_insert(0) += count;
        Ok(())
    }

    pub fn issue_count(&self) -> usize {
        self.issues.len()
    }

    pub fn agenda(&self) -> &[bool] {
        &self.agenda
    }

    pub fn tallies(&self) -> impl Iterator<Item = (&Vec<bool>, Int)> {
        self.tallies.iter().map(|(b, &c)| (b, c))
    }

    pub fn voter_count(&self) -> Int {
        self.tallies.values().sum()
    }

    /// Parses the referendum file format:
    ///
    /// ```text
    /// issues p q
    /// ballots 2 : yes no
    /// agenda yes yes
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut issues: Option<Vec<String>> = None;
        let mut agenda: Option<Vec<bool>> = None;
        let mut ballots: Vec<(Vec<bool>, Int)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, col: 1, msg };
            let mut words = line.split_whitespace();
            match words.next().unwrap() {
                "issues" => {
                    issues = Some(words.map(str::to_string).collect());
                }
                "ballots" => {
                    let count: Int = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err("expected ballot count".into()))?;
                    let rest = line
                        .split_once(':')
                        .ok_or_else(|| err("expected `:` before the answers".into()))?
                        .1;
                    let mut bits = Vec::new();
                    for w in rest.split_whitespace() {
                        bits.push(parse_yes_no(w).ok_or_else(|| err(format!("bad answer `{w}`")))?);
                    }
                    ballots.push((bits, count));
                }
                "agenda" => {
                    let mut bits = Vec::new();
                    for w in words {
                        bits.push(parse_yes_no(w).ok_or_else(|| err(format!("bad answer `{w}`")))?);
                    }
                    agenda = Some(bits);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let issues = issues.ok_or_else(|| Error::invalid("missing issues line"))?;
        let agenda = agenda.ok_or_else(|| Error::invalid("missing agenda line"))?;
        let mut r = Referendum::new(issues, agenda)?;
        for (bits, count) in ballots {
            r.add_ballots(bits, count)?;
        }
        Ok(r)
    }
}

fn parse_yes_no(w: &str) -> Option<bool> {
    match w {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

/// Type index of a ballot: issue 0 is the most significant bit.
pub fn ballot_rank(ballot: &[bool]) -> usize {
    ballot.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// Inverse of [`ballot_rank`] for `q` issues.
pub fn ballot_unrank(index: usize, q: usize) -> Vec<bool> {
    (0..q).map(|j| (index >> (q - 1 - j)) & 1 == 1).collect()
}

/// The referendum as a society over 2^q ballot types.
pub fn referendum_to_society(r: &Referendum) -> Result<Society> {
    let tau = 1usize << r.issue_count();
    let mut counts = vec![0; tau];
    for (ballot, c) in r.tallies() {
        counts[ballot_rank(ballot)] += c;
    }
    Society::new(counts)
}

/// Opinion-change prices between ballots: 1 per flipped answer (Hamming).
pub fn referendum_move_costs(q: usize) -> MoveCosts {
    let tau = 1usize << q;
    let mut cost = vec![Price::Finite(0); tau * tau];
    for i in 0..tau {
        for j in 0..tau {
            cost[i * tau + j] = Price::Finite((i ^ j).count_ones() as Int);
        }
    }
    MoveCosts::new(tau, cost).expect("hamming matrix is well-formed")
}

/// The agenda succeeds: per issue, a strict majority of ballots agrees with
/// the agenda bit. Quantifier-free conjunction over the 2^q society variables.
pub fn build_lobbying_condition(r: &Referendum) -> PaFormula {
    let q = r.issue_count();
    let tau = 1usize << q;
    let mut parts = Vec::with_capacity(q);
    for issue in 0..q {
        let want = r.agenda()[issue];
        let mut terms = Vec::with_capacity(tau);
        for ty in 0..tau {
            let bit = (ty >> (q - 1 - issue)) & 1 == 1;
            terms.push((society_var(ty), if bit == want { -1 } else { 1 }));
        }
        parts.push(PaFormula::Atom(LinearAtom::new(terms, -1)));
    }
    PaFormula::And(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa::{eval_qf, measure, Assignment};
    use crate::society::validate_costs;

    fn two_candidate_election(ab: Int, ba: Int) -> Election {
        let mut e = Election::new(vec!["a".into(), "b".into()]).unwrap();
        if ab > 0 {
            e.add_voters(vec![0, 1], ab).unwrap();
        }
        if ba > 0 {
            e.add_voters(vec![1, 0], ba).unwrap();
        }
        e
    }

    #[test]
    fn rank_unrank_edges() {
        assert_eq!(rank_order(&[0, 1, 2]).unwrap(), 0);
        assert_eq!(rank_order(&[2, 1, 0]).unwrap(), 5);
        for i in 0..24 {
            let p = unrank_order(i, 4).unwrap();
            assert_eq!(rank_order(&p).unwrap(), i);
        }
        assert!(unrank_order(24, 4).is_err());
        assert!(rank_order(&[0, 0, 1]).is_err());
    }

    #[test]
    fn kendall_tau_examples() {
        assert_eq!(kendall_tau(&[0, 1, 2], &[0, 1, 2]).unwrap(), 0);
        assert_eq!(kendall_tau(&[0, 1, 2], &[2, 1, 0]).unwrap(), 3);
        assert_eq!(kendall_tau(&[0, 1, 2], &[1, 0, 2]).unwrap(), 1);
    }

    #[test]
    fn society_from_election() {
        let e = two_candidate_election(2, 1);
        let (s, t) = election_to_society(&e).unwrap();
        assert_eq!(s.counts(), &[2, 1]);
        assert_eq!(t.tau(), 2);
        let mut e3 = Election::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        for i in 0..6 {
            e3.add_voters(unrank_order(i, 3).unwrap(), 1).unwrap();
        }
        let (s3, _) = election_to_society(&e3).unwrap();
        assert_eq!(s3.counts(), &[1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn swap_costs_equal_kendall_for_unit_sigma() {
        for n in 2..=4 {
            let e = Election::new((0..n).map(|i| format!("c{i}")).collect()).unwrap();
            let t = TypeIndex::new(n);
            let swaps = swap_cost_vector(&e, &t).unwrap();
            let kendall = kendall_cost_vector(&t).unwrap();
            assert_eq!(swaps, kendall, "n={n}");
            assert!(validate_costs(&swaps));
        }
    }

    #[test]
    fn weighted_swap_distance_takes_shortest_path() {
        // σ(a,b) = 2, others 1: abc → bac costs 2 (the one forced swap).
        let mut e = Election::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        e.set_swap_cost(0, 1, 2).unwrap();
        let t = TypeIndex::new(3);
        let c = swap_cost_vector(&e, &t).unwrap();
        let abc = rank_order(&[0, 1, 2]).unwrap();
        let bac = rank_order(&[1, 0, 2]).unwrap();
        assert_eq!(c.get(abc, bac), Price::Finite(2));
        let cba = rank_order(&[2, 1, 0]).unwrap();
        // Reversal: all three pairs must swap once each: 2 + 1 + 1.
        assert_eq!(c.get(abc, cba), Price::Finite(4));
        assert!(validate_costs(&c));
    }

    #[test]
    fn deletion_costs_shape() {
        let t = TypeIndex::with_latent(2);
        let c = deletion_cost_vector(&t).unwrap();
        let latent = t.latent_type().unwrap();
        assert_eq!(c.get(0, latent), Price::Finite(1));
        assert_eq!(c.get(1, latent), Price::Finite(1));
        assert_eq!(c.get(0, 1), Price::Infinite);
        assert_eq!(c.get(latent, 0), Price::Infinite);
        assert_eq!(c.get(0, 0), Price::Finite(0));
        assert!(validate_costs(&c));
        assert!(deletion_cost_vector(&TypeIndex::new(2)).is_err());
    }

    #[test]
    fn beats_is_the_two_type_margin() {
        let t = TypeIndex::new(2);
        let f = build_beats(0, 1, &t).unwrap();
        // s_1 − s_0 ≤ −1
        assert_eq!(f, PaFormula::Atom(LinearAtom::new([("s_1", 1), ("s_0", -1)], -1)));
        let at = |s0, s1| Assignment::from_pairs([("s_0", s0), ("s_1", s1)]);
        assert!(eval_qf(&f, &at(2, 1)).unwrap());
        assert!(!eval_qf(&f, &at(1, 1)).unwrap());
        assert!(build_beats(0, 0, &t).is_err());
    }

    #[test]
    fn beats_never_both_ways() {
        let t = TypeIndex::new(3);
        let ab = build_beats(0, 1, &t).unwrap();
        let ba = build_beats(1, 0, &t).unwrap();
        // Spot-check over small societies.
        for s0 in 0..3 {
            for s1 in 0..3 {
                for s2 in 0..3 {
                    let a = Assignment::from_pairs([
                        ("s_0", s0),
                        ("s_1", s1),
                        ("s_2", s2),
                        ("s_3", 0),
                        ("s_4", 0),
                        ("s_5", 0),
                    ]);
                    assert!(!(eval_qf(&ab, &a).unwrap() && eval_qf(&ba, &a).unwrap()));
                }
            }
        }
    }

    #[test]
    fn condorcet_conjunction_shape() {
        let t = TypeIndex::new(2);
        let f = build_condorcet(0, &t).unwrap();
        assert_eq!(f, PaFormula::And(vec![build_beats(0, 1, &t).unwrap()]));
        // Single candidate: empty conjunction, identically true.
        let t1 = TypeIndex::new(1);
        let f1 = build_condorcet(0, &t1).unwrap();
        assert!(eval_qf(&f1, &Assignment::new()).unwrap());
    }

    #[test]
    fn dodgson_condition_at_zero_is_condorcet() {
        let e = two_candidate_election(2, 1);
        let f = build_dodgson_condition(&e, 0, 0, WinnerMode::CoWinner).unwrap();
        assert_eq!(f, build_condorcet(0, &TypeIndex::new(2)).unwrap());
    }

    #[test]
    fn dodgson_condition_is_prenex_depth_two() {
        let e = two_candidate_election(2, 1);
        let f = build_dodgson_condition(&e, 0, 2, WinnerMode::CoWinner).unwrap();
        let p = measure(&f).unwrap();
        assert_eq!(p.depth, 2);
        assert_eq!(p.dims[0], 2); // free society variables
        assert_eq!(p.dims[1], 4); // ∃ move block τ²
        assert_eq!(p.dims[2], 4); // ∀ move block τ²
        assert!(matches!(f, PaFormula::Exists(..)));
    }

    #[test]
    fn lobbying_condition_counts_majorities() {
        // Two issues, agenda (yes, yes), tallies {11: 2, 00: 1}: both issues
        // carried 2 to 1.
        let mut r =
            Referendum::new(vec!["p".into(), "q".into()], vec![true, true]).unwrap();
        r.add_ballots(vec![true, true], 2).unwrap();
        r.add_ballots(vec![false, false], 1).unwrap();
        let f = build_lobbying_condition(&r);
        match &f {
            PaFormula::And(parts) => assert_eq!(parts.len(), 2),
            other => panic!("expected conjunction, got {other:?}"),
        }
        let s = referendum_to_society(&r).unwrap();
        let a: Assignment =
            (0..4).map(|i| (society_var(i), s.counts()[i])).collect();
        assert!(eval_qf(&f, &a).unwrap());
    }

    #[test]
    fn lobbying_single_issue_orientation() {
        let mut r = Referendum::new(vec!["p".into()], vec![true]).unwrap();
        r.add_ballots(vec![true], 1).unwrap();
        let f = build_lobbying_condition(&r);
        // s_1 is the yes-type (bit 1), agenda yes: s_0 − s_1 ≤ −1.
        let yes = Assignment::from_pairs([("s_0", 0), ("s_1", 1)]);
        let tie = Assignment::from_pairs([("s_0", 1), ("s_1", 1)]);
        assert!(eval_qf(&f, &yes).unwrap());
        assert!(!eval_qf(&f, &tie).unwrap());
    }

    #[test]
    fn parse_election_round_trip() {
        let text = "# fixture\ncandidates a b c\nvoters 3 : a > b > c\nvoters 1 : c > b > a\nswapcost a b 2\n";
        let e = Election::parse(text).unwrap();
        assert_eq!(e.voter_count(), 4);
        assert_eq!(e.swap_cost(0, 1), 2);
        assert_eq!(e.swap_cost(1, 2), 1);
        let (s, _) = election_to_society(&e).unwrap();
        assert_eq!(s.counts()[0], 3);
        assert_eq!(s.counts()[5], 1);
    }

    #[test]
    fn parse_referendum() {
        let text = "issues p q\nballots 2 : yes no\nballots 1 : no no\nagenda yes no\n";
        let r = Referendum::parse(text).unwrap();
        assert_eq!(r.voter_count(), 3);
        assert_eq!(r.agenda(), &[true, false]);
        let s = referendum_to_society(&r).unwrap();
        assert_eq!(s.counts(), &[1, 0, 2, 0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Election::parse("candidates a b\nvoters x : a > b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
