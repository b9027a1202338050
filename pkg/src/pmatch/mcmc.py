"""Broder and JSV-type chains on perfect and near-perfect matchings.

States are handled as partner arrays over positions of ``Graph.order``
(``-1`` marks a hole).  A JSV-type chain runs the Broder proposal and
accepts with ``min(1, w(new)/w(old))`` where ``w`` depends only on the
hole pattern.  Every branch of the proposal that does not move (chosen
vertex not adjacent, hole chosen with non-adjacent holes, rejected
Metropolis step) adds to the self-loop.
"""

from __future__ import annotations

import math
import random
from array import array
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .exact import count_omega, hole_pattern_table, iter_omega
from .graph import PERFECT, Graph, HolePattern, Matching, NotInOmega, hole_pattern

STATE_CAP = 5_000_000
DENSE_CAP = 3000

HoleWeights = Mapping[HolePattern, float]


class StateSpaceTooLarge(ValueError):
    pass


def eq2_weights(table: Mapping[HolePattern, int]) -> dict[HolePattern, float]:
    """Reciprocal pattern sizes: each realised pattern class gets equal mass."""
    return {pat: 1.0 / c for pat, c in table.items() if c > 0}


def jsv_weights(g: Graph) -> dict[HolePattern, float]:
    return eq2_weights(hole_pattern_table(g))


def constant_weights(g: Graph) -> dict[HolePattern, float]:
    return dict.fromkeys(hole_pattern_table(g), 1.0)


def read_weights(lines: Iterable[str]) -> dict[HolePattern, float]:
    """Parse ``u v weight`` and ``perfect weight`` lines."""
    out: dict[HolePattern, float] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if tok[0] == "perfect":
                out[PERFECT] = float(tok[1])
            else:
                out[HolePattern.near(int(tok[0]), int(tok[1]))] = float(tok[2])
        except (IndexError, ValueError):
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
    for pat, w in out.items():
        if not w > 0:
            raise ValueError(f"weight of {pat} must be positive")
    return out


# single steps


def _rng(rng: random.Random | int | None) -> random.Random:
    return rng if isinstance(rng, random.Random) else random.Random(rng)


class _Walker:
    """Fast stepping on a partner array; shared by the public step functions
    and :func:`simulate` so both consume the random stream identically."""

    def __init__(self, g: Graph, weights: HoleWeights | None = None):
        self.g = g
        self.n = len(g)
        self.order = g.order
        self.masks = g.adj_masks
        self.wpos: dict[tuple[int, ...], float] | None = None
        if weights is not None:
            idx = g.index
            self.wpos = {tuple(idx[v] for v in pat.holes): w for pat, w in weights.items()}

    def load(self, m: Matching) -> tuple[list[int], tuple[int, ...]]:
        pat = hole_pattern(self.g, m)
        idx = self.g.index
        p = [-1] * self.n
        for u, v in m.pairs:
            p[idx[u]] = idx[v]
            p[idx[v]] = idx[u]
        return p, tuple(idx[h] for h in pat.holes)

    def dump(self, p: Sequence[int]) -> Matching:
        o = self.order
        return Matching.of((o[i], o[j]) for i, j in enumerate(p) if j > i)

    def weight(self, holes: tuple[int, ...]) -> float:
        try:
            return self.wpos[holes]
        except KeyError:
            pat = HolePattern(tuple(self.order[h] for h in holes))
            raise KeyError(f"weight function has no entry for {pat}") from None

    def step(self, p: list[int], holes: tuple[int, ...], rng: random.Random) -> tuple[int, ...]:
        """Advance ``p`` in place; return the new hole tuple."""
        n = self.n
        if not holes:
            pairs = [(i, j) for i, j in enumerate(p) if j > i]
            i, j = pairs[rng.randrange(len(pairs))]
            new_holes = (i, j)
            move = ("del", i, j)
        else:
            h1, h2 = holes
            x = rng.randrange(n)
            if x == h1 or x == h2:
                if not self.masks[h1] >> h2 & 1:
                    return holes
                new_holes = ()
                move = ("add", h1, h2)
            else:
                w = holes[rng.randrange(2)]
                if not self.masks[x] >> w & 1:
                    return holes
                y = p[x]
                other = h2 if w == h1 else h1
                new_holes = (other, y) if other < y else (y, other)
                move = ("shift", x, w, y)
        if self.wpos is not None:
            ratio = self.weight(new_holes) / self.weight(holes)
            if ratio < 1 and not rng.random() < ratio:
                return holes
        if move[0] == "del":
            p[move[1]] = p[move[2]] = -1
        elif move[0] == "add":
            p[move[1]] = move[2]
            p[move[2]] = move[1]
        else:
            _, x, w, y = move
            p[x] = w
            p[w] = x
            p[y] = -1
        return new_holes


def broder_step(g: Graph, m: Matching, rng: random.Random | int | None = None) -> Matching:
    walker = _Walker(g)
    p, holes = walker.load(m)
    walker.step(p, holes, _rng(rng))
    return walker.dump(p)


def jsv_step(g: Graph, m: Matching, weights: HoleWeights,
             rng: random.Random | int | None = None) -> Matching:
    walker = _Walker(g, weights)
    p, holes = walker.load(m)
    walker.weight(holes)
    walker.step(p, holes, _rng(rng))
    return walker.dump(p)


# exact models


def _key(p: Sequence[int]) -> bytes:
    return array("i", p).tobytes()


@dataclass
class ChainModel:
    """Explicit chain: state list, sparse row-stochastic kernel, stationary
    distribution.  ``states``/``graph`` are ``None`` for hand-made kernels."""

    kernel: sp.csr_matrix
    pi: np.ndarray
    chain: str = "custom"
    graph: Graph | None = None
    states: np.ndarray | None = None
    pattern_ids: np.ndarray | None = None
    patterns: list[HolePattern] = field(default_factory=list)
    weights: dict[HolePattern, float] | None = None
    index: dict[bytes, int] = field(default_factory=dict, repr=False)

    @classmethod
    def from_kernel(cls, P, pi) -> ChainModel:
        return cls(sp.csr_matrix(np.asarray(P, dtype=float) if not sp.issparse(P) else P),
                   np.asarray(pi, dtype=float))

    def __len__(self) -> int:
        return self.kernel.shape[0]

    def matching(self, i: int) -> Matching:
        o = self.graph.order
        row = self.states[i]
        return Matching.of((o[a], o[int(b)]) for a, b in enumerate(row) if b > a)

    def state_of(self, m: Matching) -> int:
        idx = self.graph.index
        p = [-1] * len(self.graph)
        for u, v in m.pairs:
            p[idx[u]] = idx[v]
            p[idx[v]] = idx[u]
        try:
            return self.index[_key(p)]
        except KeyError:
            raise NotInOmega("matching is not a state of this model") from None

    def pattern_of(self, i: int) -> HolePattern:
        return self.patterns[self.pattern_ids[i]]

    def pattern_mask(self, *pats: HolePattern) -> np.ndarray:
        want = [self.patterns.index(p) for p in pats if p in self.patterns]
        return np.isin(self.pattern_ids, want)

    def class_masses(self) -> dict[HolePattern, float]:
        mass = np.bincount(self.pattern_ids, weights=self.pi, minlength=len(self.patterns))
        return dict(zip(self.patterns, mass.tolist()))


def build_chain_model(g: Graph, weights: HoleWeights | None = None,
                      cap: int = STATE_CAP) -> ChainModel:
    """Enumerate Omega(g) and assemble the exact kernel.

    ``weights=None`` builds the Broder chain; otherwise the JSV-type chain
    with the given hole-pattern weights (total over realised patterns).
    """
    c0, c2 = count_omega(g)
    total = c0 + c2
    if total > cap:
        raise StateSpaceTooLarge(f"|Omega| = {total} exceeds the cap {cap}; use simulate()")
    if total == 0:
        raise StateSpaceTooLarge("Omega is empty (no perfect or near-perfect matching)")
    n = len(g)
    order = g.order
    states = np.full((total, n), -1, dtype=np.int32)
    index: dict[bytes, int] = {}
    pattern_index: dict[tuple[int, ...], int] = {}
    pattern_ids = np.empty(total, dtype=np.int64)
    patterns: list[HolePattern] = []
    for s, pairs in enumerate(iter_omega(g)):
        row = states[s]
        for a, b in pairs:
            row[a] = b
            row[b] = a
        holes = tuple(np.flatnonzero(row < 0).tolist())
        pid = pattern_index.get(holes)
        if pid is None:
            pid = pattern_index[holes] = len(patterns)
            patterns.append(HolePattern(tuple(order[h] for h in holes)))
        pattern_ids[s] = pid
        index[row.tobytes()] = s

    if weights is not None:
        w_of = np.empty(len(patterns))
        for pid, pat in enumerate(patterns):
            try:
                w_of[pid] = float(weights[pat])
            except KeyError:
                raise KeyError(f"weight function has no entry for realised pattern {pat}") from None
            if not w_of[pid] > 0:
                raise ValueError(f"weight of {pat} must be positive")
    else:
        w_of = np.ones(len(patterns))

    masks = g.adj_masks
    nbrs = [[j for j in range(n) if masks[i] >> j & 1] for i in range(n)]
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    inv_n = 1.0 / n
    half_inv_n = 0.5 / n
    for s in range(total):
        p = states[s].tolist()
        pid = int(pattern_ids[s])
        holes = [i for i, x in enumerate(p) if x < 0]
        moves: list[tuple[list[int], float]] = []
        if not holes:
            pairs = [(i, j) for i, j in enumerate(p) if j > i]
            prob = 1.0 / len(pairs)
            for i, j in pairs:
                q = list(p)
                q[i] = q[j] = -1
                moves.append((q, prob))
        else:
            h1, h2 = holes
            if masks[h1] >> h2 & 1:
                q = list(p)
                q[h1], q[h2] = h2, h1
                moves.append((q, inv_n + inv_n))
            for w in (h1, h2):
                for x in nbrs[w]:
                    if x == h1 or x == h2:
                        continue
                    y = p[x]
                    q = list(p)
                    q[x] = w
                    q[w] = x
                    q[y] = -1
                    moves.append((q, half_inv_n))
        stay = 1.0
        for q, prob in moves:
            t = index[_key(q)]
            if weights is not None:
                ratio = w_of[pattern_ids[t]] / w_of[pid]
                if ratio < 1:
                    prob *= ratio
            rows.append(s)
            cols.append(t)
            vals.append(prob)
            stay -= prob
        if stay > 1e-15:
            rows.append(s)
            cols.append(s)
            vals.append(stay)
    kernel = sp.csr_matrix((vals, (rows, cols)), shape=(total, total))
    mass = w_of[pattern_ids]
    pi = mass / math.fsum(mass)
    wdict = None if weights is None else {pat: float(w_of[i]) for i, pat in enumerate(patterns)}
    return ChainModel(kernel, pi, "broder" if weights is None else "jsv", g, states,
                      pattern_ids, patterns, wdict, index)


# diagnostics


def row_sum_error(model: ChainModel) -> float:
    return float(np.max(np.abs(np.asarray(model.kernel.sum(axis=1)).ravel() - 1.0)))


def detailed_balance_error(model: ChainModel) -> float:
    """Largest relative mismatch of pi(x)P(x,y) against pi(y)P(y,x)."""
    flow = (sp.diags(model.pi) @ model.kernel).tocsr()
    back = flow.T.tocsr()
    pattern = (flow + back).tocoo()
    r, c = pattern.row, pattern.col
    a = np.asarray(flow[r, c]).ravel()
    b = np.asarray(back[r, c]).ravel()
    scale = np.maximum(a, b)
    keep = scale > 0
    if not keep.any():
        return 0.0
    return float(np.max(np.abs(a - b)[keep] / scale[keep]))


def is_symmetric(model: ChainModel) -> bool:
    """Exact equality P(x, y) == P(y, x)."""
    d = (model.kernel - model.kernel.T).tocoo()
    return not np.any(d.data != 0)


def stationarity_residual(model: ChainModel) -> float:
    """``|| pi P - pi ||_1``: how far pi is from a left eigenvector for 1."""
    return float(np.abs(model.kernel.T @ model.pi - model.pi).sum())


def power_iteration(model: ChainModel, iters: int = 100_000, tol: float = 1e-13) -> tuple[np.ndarray, int]:
    """Stationary vector of the lazy kernel (I + P)/2 from the uniform start."""
    x = np.full(len(model), 1.0 / len(model))
    pt = model.kernel.T.tocsr()
    for it in range(1, iters + 1):
        y = 0.5 * (x + pt @ x)
        y /= y.sum()
        if np.abs(y - x).sum() < tol:
            return y, it
        x = y
    return x, iters


@dataclass(frozen=True)
class CutReport:
    description: str
    phi: float
    pi_S: float
    pi_Sbar: float
    size: int

    @property
    def mixing_lower_bound(self) -> float | None:
        """``1/(4 phi)`` when the cut qualifies (``pi(S) <= 1/2``)."""
        if self.pi_S > 0.5:
            return None
        return math.inf if self.phi == 0 else 1.0 / (4.0 * self.phi)


def _as_mask(model: ChainModel, S) -> np.ndarray:
    S = np.asarray(S)
    if S.dtype == bool:
        if S.shape != (len(model),):
            raise ValueError("boolean cut has the wrong length")
        return S
    mask = np.zeros(len(model), dtype=bool)
    mask[S.astype(int)] = True
    return mask


def conductance(model: ChainModel, S, description: str = "") -> CutReport:
    """Exact Phi(S) = sum_{x in S, y not in S} pi(x) P(x, y) / pi(S)."""
    mask = _as_mask(model, S)
    if not mask.any() or mask.all():
        raise ValueError("cut must be a proper non-empty subset of the state space")
    sub = model.kernel[mask][:, ~mask]
    out = np.asarray(sub.sum(axis=1)).ravel()
    pis = model.pi[mask]
    pi_S = math.fsum(pis)
    flow = math.fsum(pis * out)
    return CutReport(description, flow / pi_S, pi_S, math.fsum(model.pi[~mask]), int(mask.sum()))


class MixingTime(NamedTuple):
    steps: int
    capped: bool


def _worst_tv(Q: np.ndarray, pi: np.ndarray) -> float:
    return float(0.5 * np.abs(Q - pi[None, :]).sum(axis=1).max())


def tv_profile(model: ChainModel, t: int) -> float:
    """Worst-start total variation distance after ``t`` steps (dense)."""
    P = model.kernel.toarray()
    return _worst_tv(np.linalg.matrix_power(P, t), model.pi)


def mixing_time(model: ChainModel, delta: float = 0.25, t_max: int = 1 << 20,
                dense_cap: int = DENSE_CAP) -> MixingTime:
    """``max_i min{t : d_TV(P^t(i, .), pi) <= delta}``.

    The worst-start distance is non-increasing in t, so the first crossing is
    found by repeated squaring and then bit-by-bit descent.  If it has not
    crossed by ``t_max`` the result is ``(t_max, capped=True)``, a lower
    bound.
    """
    N = len(model)
    if N > dense_cap:
        raise StateSpaceTooLarge(f"{N} states exceed the dense cap {dense_cap}")
    pi = model.pi
    if _worst_tv(np.eye(N), pi) <= delta:
        return MixingTime(0, False)
    powers = [model.kernel.toarray()]
    while _worst_tv(powers[-1], pi) > delta:
        if 1 << len(powers) > t_max:
            return MixingTime(t_max, True)
        powers.append(powers[-1] @ powers[-1])
    J = len(powers) - 1
    if J == 0:
        return MixingTime(1, False)
    cur = powers[J - 1]
    t = 1 << (J - 1)
    for b in range(J - 2, -1, -1):
        cand = cur @ powers[b]
        if _worst_tv(cand, pi) > delta:
            cur = cand
            t += 1 << b
    return MixingTime(t + 1, False)


# simulation


@dataclass
class TrajectorySummary:
    steps: int
    occupancy: Counter
    perfect_visits: int
    final: Matching
    checkpoints: list[tuple[int, int, float | None]]

    def fraction(self, pred: Callable[[HolePattern], bool]) -> float:
        total = sum(self.occupancy.values())
        return sum(c for p, c in self.occupancy.items() if pred(p)) / total


def simulate(g: Graph, start: Matching, steps: int, seed: int,
             weights: HoleWeights | None = None, model: ChainModel | None = None,
             checkpoints: Sequence[int] = (),
             on_state: Callable[[int, list[int], tuple[int, ...]], None] | None = None) -> TrajectorySummary:
    """Run one seeded trajectory of the Broder (``weights=None``) or JSV-type chain.

    Occupancy counts the start state and the state after every step.  At each
    checkpoint the total variation distance between the empirical pattern
    occupancy and the model's pattern masses is recorded when ``model`` is
    given.
    """
    walker = _Walker(g, weights)
    rng = random.Random(seed)
    p, holes = walker.load(start)
    if weights is not None:
        walker.weight(holes)
    occ: Counter = Counter()
    occ[holes] += 1
    if on_state is not None:
        on_state(0, p, holes)
    marks = sorted(set(checkpoints))
    target = None
    if model is not None:
        target = {tuple(model.graph.index[v] for v in pat.holes): m
                  for pat, m in model.class_masses().items()}
    out = []
    mi = 0
    for t in range(1, steps + 1):
        holes = walker.step(p, holes, rng)
        occ[holes] += 1
        if on_state is not None:
            on_state(t, p, holes)
        while mi < len(marks) and marks[mi] == t:
            out.append((t, occ[()], _class_tv(occ, target, t + 1)))
            mi += 1
    order = g.order
    occupancy = Counter({HolePattern(tuple(order[h] for h in k)): c for k, c in occ.items()})
    return TrajectorySummary(steps, occupancy, occ[()], walker.dump(p), out)


def _class_tv(occ: Counter, target: dict | None, total: int) -> float | None:
    if target is None:
        return None
    keys = set(occ) | set(target)
    return 0.5 * math.fsum(abs(occ.get(k, 0) / total - target.get(k, 0.0)) for k in keys)
