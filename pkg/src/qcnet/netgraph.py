"""Oscillator networks: construction, generators and ingestion.

A network is a set of harmonic oscillators with bare frequencies ``omega``
joined by spring-like links whose strengths form the symmetric adjacency
matrix ``V``. Everything downstream (normal modes, propagators, probing)
starts from an :class:`OscillatorNetwork`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

__all__ = [
    "OscillatorNetwork",
    "TopologySpec",
    "InvalidParameter",
    "EdgeListParseError",
    "KINDS",
    "generate",
    "load_edge_list",
    "degrees",
    "edges",
    "network_to_json",
    "network_from_json",
]

KINDS = ("periodic-chain", "shortcut-chain", "erdos-renyi", "barabasi-albert", "watts-strogatz")


class InvalidParameter(ValueError):
    """A topology or network parameter is out of its allowed range."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class EdgeListParseError(ValueError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class OscillatorNetwork:
    """Bare frequencies plus a symmetric, zero-diagonal coupling matrix.

    Arrays are stored read-only so a network can be shared freely.
    """

    omega: np.ndarray
    V: np.ndarray
    name: str = ""

    def __post_init__(self):
        omega = _frozen(self.omega).reshape(-1)
        V = _frozen(self.V)
        n = omega.size
        if n == 0:
            raise InvalidParameter("n", "network must have at least one node")
        if V.shape != (n, n):
            raise InvalidParameter("V", f"expected shape {(n, n)}, got {V.shape}")
        if not np.all(np.isfinite(V)) or not np.all(np.isfinite(omega)):
            raise InvalidParameter("V", "non-finite entries")
        if not np.array_equal(V, V.T):
            raise InvalidParameter("V", "adjacency matrix must be symmetric")
        if np.any(np.diag(V) != 0):
            raise InvalidParameter("V", "adjacency matrix must have zero diagonal")
        if np.any(V < 0):
            raise InvalidParameter("V", "couplings must be non-negative")
        if np.any(omega <= 0):
            raise InvalidParameter("omega", "bare frequencies must be positive")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "V", V)

    @property
    def n(self):
        return self.omega.size

    def __eq__(self, other):
        if not isinstance(other, OscillatorNetwork):
            return NotImplemented
        return np.array_equal(self.omega, other.omega) and np.array_equal(self.V, other.V)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<OscillatorNetwork{label} n={self.n} edges={len(edges(self))}>"


@dataclass(frozen=True)
class TopologySpec:
    """Declarative description of a generated network.

    Only the fields relevant to ``kind`` are read. Every generated network
    uses a uniform link strength ``v`` (and ``v_weak`` / ``v / shortcut_ratio``
    for the weak links of the chain families) and a uniform bare frequency
    ``omega0``.
    """

    kind: str
    n: int
    v: float = 0.1
    omega0: float = 0.25
    # periodic-chain
    v_weak: float | None = None
    period: int = 3
    # shortcut-chain: explicit pairs win over (n_shortcuts, seed)
    shortcut_ratio: float = 50.0
    shortcuts: tuple[tuple[int, int], ...] | None = None
    n_shortcuts: int = 0
    # erdos-renyi
    p: float = 0.1
    # barabasi-albert
    m: int = 3
    # watts-strogatz
    ring_degree: int = 4
    rewire_p: float = 0.2

    def validate(self):
        if self.kind not in KINDS:
            raise InvalidParameter("kind", f"unknown topology {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidParameter("n", "node count must be a positive integer")
        if not self.v > 0:
            raise InvalidParameter("v", "coupling must be positive")
        if not self.omega0 > 0:
            raise InvalidParameter("omega0", "frequency must be positive")
        k = self.kind
        if k == "periodic-chain":
            if self.n < 3:
                raise InvalidParameter("n", "a ring needs at least 3 nodes")
            if self.v_weak is not None and not self.v_weak > 0:
                raise InvalidParameter("v_weak", "weak coupling must be positive")
            if self.period < 1:
                raise InvalidParameter("period", "must be >= 1")
        elif k == "shortcut-chain":
            if not self.shortcut_ratio > 0:
                raise InvalidParameter("shortcut_ratio", "must be positive")
            if self.n_shortcuts < 0:
                raise InvalidParameter("n_shortcuts", "must be >= 0")
            if self.shortcuts is not None:
                for i, j in self.shortcuts:
                    if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                        raise InvalidParameter("shortcuts", f"invalid pair ({i}, {j})")
            else:
                free = self.n * (self.n - 1) // 2 - (self.n - 1)
                if self.n_shortcuts > free:
                    raise InvalidParameter("n_shortcuts", f"at most {free} shortcuts fit on {self.n} nodes")
        elif k == "erdos-renyi":
            if not 0.0 <= self.p <= 1.0:
                raise InvalidParameter("p", "edge probability must lie in [0, 1]")
        elif k == "barabasi-albert":
            if self.m < 1:
                raise InvalidParameter("m", "attachment parameter must be >= 1")
            if self.m >= self.n:
                raise InvalidParameter("m", f"attachment parameter m={self.m} must be smaller than n={self.n}")
        elif k == "watts-strogatz":
            if self.ring_degree < 2 or self.ring_degree % 2:
                raise InvalidParameter("ring_degree", "must be an even integer >= 2")
            if self.ring_degree >= self.n:
                raise InvalidParameter("ring_degree", "must be smaller than n")
            if not 0.0 <= self.rewire_p <= 1.0:
                raise InvalidParameter("rewire_p", "rewiring probability must lie in [0, 1]")
        return self

    def to_dict(self):
        d = asdict(self)
        if d["shortcuts"] is not None:
            d["shortcuts"] = [list(s) for s in d["shortcuts"]]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if d.get("shortcuts") is not None:
            d["shortcuts"] = tuple(tuple(int(x) for x in s) for s in d["shortcuts"])
        return cls(**d)


def _from_edges(n, weighted_edges, omega0, name=""):
    V = np.zeros((n, n))
    for i, j, w in weighted_edges:
        V[i, j] = V[j, i] = w
    return OscillatorNetwork(np.full(n, float(omega0)), V, name=name)


def _periodic_chain(spec, rng):
    v_weak = spec.v if spec.v_weak is None else spec.v_weak
    out = []
    for i in range(spec.n):
        w = v_weak if (i + 1) % spec.period == 0 else spec.v
        out.append((i, (i + 1) % spec.n, w))
    return out


def _shortcut_chain(spec, rng):
    out = [(i, i + 1, spec.v) for i in range(spec.n - 1)]
    weak = spec.v / spec.shortcut_ratio
    if spec.shortcuts is not None:
        pairs = [tuple(sorted(s)) for s in spec.shortcuts]
    else:
        pairs = set()
        while len(pairs) < spec.n_shortcuts:
            i, j = sorted(int(x) for x in rng.choice(spec.n, size=2, replace=False))
            if j - i > 1:
                pairs.add((i, j))
        pairs = sorted(pairs)
    out += [(i, j, weak) for i, j in pairs if abs(i - j) > 1]
    return out


def _erdos_renyi(spec, rng):
    iu, ju = np.triu_indices(spec.n, k=1)
    keep = rng.random(iu.size) < spec.p
    return [(int(i), int(j), spec.v) for i, j in zip(iu[keep], ju[keep])]


def _barabasi_albert(spec, rng):
    # seed: m isolated nodes, the first newcomer links to all of them
    m = spec.m
    targets = list(range(m))
    repeated = []
    out = []
    for new in range(m, spec.n):
        for t in targets:
            out.append((t, new, spec.v))
        repeated.extend(targets)
        repeated.extend([new] * m)
        chosen = set()
        while len(chosen) < m:
            chosen.add(repeated[int(rng.integers(len(repeated)))])
        targets = sorted(chosen)
    return out


def _watts_strogatz(spec, rng):
    n, half = spec.n, spec.ring_degree // 2
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(1, half + 1):
            adj[i].add((i + j) % n)
            adj[(i + j) % n].add(i)
    for j in range(1, half + 1):
        for i in range(n):
            u, w = i, (i + j) % n
            if rng.random() < spec.rewire_p and w in adj[u]:
                candidates = [x for x in range(n) if x != u and x not in adj[u]]
                if not candidates:
                    continue
                new = candidates[int(rng.integers(len(candidates)))]
                adj[u].discard(w)
                adj[w].discard(u)
                adj[u].add(new)
                adj[new].add(u)
    return [(i, j, spec.v) for i in range(n) for j in sorted(adj[i]) if j > i]


_GENERATORS = {
    "periodic-chain": _periodic_chain,
    "shortcut-chain": _shortcut_chain,
    "erdos-renyi": _erdos_renyi,
    "barabasi-albert": _barabasi_albert,
    "watts-strogatz": _watts_strogatz,
}


def generate(spec: TopologySpec, seed: int = 0) -> OscillatorNetwork:
    """Build the network described by ``spec``.

    The result is a pure function of ``(spec, seed)``.

    Raises:
        InvalidParameter: if a field of ``spec`` is out of range; ``.field``
            names the offending field.
    """
    spec.validate()
    rng = np.random.default_rng(seed)
    weighted = _GENERATORS[spec.kind](spec, rng)
    return _from_edges(spec.n, weighted, spec.omega0, name=spec.kind)


def load_edge_list(text, default_v=0.05, omega0=0.25, index_base="auto", name=""):
    """Parse an ``i j [weight]`` edge list into a network.

    Blank lines and ``#`` comments are ignored. ``index_base`` is ``0``,
    ``1`` or ``"auto"``; auto treats the file as 1-based unless some line
    uses index 0. Repeating an edge with the same weight is tolerated,
    with a different weight it is rejected.
    """
    if hasattr(text, "read"):
        text = text.read()
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(f"expected 'i j [weight]', got {raw.strip()!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise EdgeListParseError(f"non-numeric field in {raw.strip()!r}", lineno) from None
        if i < 0 or j < 0:
            raise EdgeListParseError("negative node index", lineno)
        if w is not None and not (np.isfinite(w) and w >= 0):
            raise EdgeListParseError(f"invalid weight {parts[2]!r}", lineno)
        if i == j:
            raise EdgeListParseError(f"self-loop on node {i}", lineno)
        rows.append((lineno, i, j, w))
    if not rows:
        raise EdgeListParseError("no edges found; node count is undefined")

    if index_base == "auto":
        base = 0 if any(i == 0 or j == 0 for _, i, j, _ in rows) else 1
    elif index_base in (0, 1):
        base = index_base
    else:
        raise InvalidParameter("index_base", "must be 0, 1 or 'auto'")

    seen = {}
    for lineno, i, j, w in rows:
        i, j = i - base, j - base
        if i < 0 or j < 0:
            raise EdgeListParseError("index 0 in a 1-based edge list", lineno)
        key = (min(i, j), max(i, j))
        w = default_v if w is None else w
        if key in seen and seen[key] != w:
            raise EdgeListParseError(f"duplicate edge {key} with conflicting weight", lineno)
        seen[key] = w
    n = 1 + max(max(k) for k in seen)
    return _from_edges(n, [(i, j, w) for (i, j), w in sorted(seen.items())], omega0, name=name)


def degrees(net: OscillatorNetwork) -> list[int]:
    """Number of links per node."""
    return [int(c) for c in np.count_nonzero(net.V, axis=1)]


def edges(net: OscillatorNetwork) -> list[tuple[int, int, float]]:
    iu, ju = np.nonzero(np.triu(net.V, k=1))
    return [(int(i), int(j), float(net.V[i, j])) for i, j in zip(iu, ju)]


def network_to_json(net: OscillatorNetwork, **extra) -> str:
    doc = {"n": net.n, "omega": net.omega.tolist(), "edges": [list(e) for e in edges(net)]}
    if net.name:
        doc["name"] = net.name
    doc.update(extra)
    return json.dumps(doc, indent=1, sort_keys=True)


def network_from_json(text) -> OscillatorNetwork:
    doc = json.loads(text) if isinstance(text, (str, bytes)) else text
    try:
        n = int(doc["n"])
        omega = np.asarray(doc["omega"], dtype=float)
        raw_edges = doc["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter("json", f"malformed network document: {exc}") from None
    V = np.zeros((n, n))
    for e in raw_edges:
        i, j, w = int(e[0]), int(e[1]), float(e[2])
        if i == j:
            raise InvalidParameter("edges", f"self-loop on node {i}")
        V[i, j] = V[j, i] = w
    return OscillatorNetwork(omega, V, name=doc.get("name", ""))
