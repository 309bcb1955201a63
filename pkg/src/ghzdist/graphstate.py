"""Graph states, local complementation, and local conversion to GHZ form.

Star and complete graph states are local-Clifford equivalent to the GHZ
state; this module produces explicit per-vertex single-qubit recipes and
verifies them by exact signed-tableau equality against the oracle: the
conjugated graph tableau must generate the GHZ stabilizer group with the
correct signs, not merely match it pattern-wise.

Vertices are 1-based.  The conversion recipes use Hadamards on the star
leaves: conjugating the star generators by leaf Hadamards yields exactly
the X-type and adjacent-Z GHZ generators with positive signs, which a
single Hadamard on the center provably does not for three or more
vertices.
"""
from __future__ import annotations

from dataclasses import dataclass

from .oracle import (
    CliffordMap,
    PauliString,
    StabilizerTableau,
    conjugate_tableau,
    ghz_generators,
    hadamard,
    pauli_gate,
    sqrt_x_dag,
    sqrt_z,
    SpanSolver,
)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 1..n."""

    n: int
    edges: frozenset

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u},{v}) outside 1..{self.n}")

    @classmethod
    def from_edge_list(cls, n: int, pairs) -> "Graph":
        return cls(n, frozenset(tuple(sorted(p)) for p in pairs))

    def neighbors(self, v: int) -> set:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def has_edge(self, u: int, v: int) -> bool:
        return tuple(sorted((u, v))) in self.edges


def complete_graph(n: int) -> Graph:
    return Graph.from_edge_list(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def star_graph(n: int, center: int = 1) -> Graph:
    return Graph.from_edge_list(n, [(center, v) for v in range(1, n + 1) if v != center])


def graph_stabilizers(graph: Graph) -> StabilizerTableau:
    """Generator per vertex v: X_v times Z on every neighbor of v."""
    rows = []
    for v in range(1, graph.n + 1):
        x = 1 << (v - 1)
        z = 0
        for u in graph.neighbors(v):
            z |= 1 << (u - 1)
        rows.append(PauliString(graph.n, x, z, 0))
    return StabilizerTableau(graph.n, tuple(rows))


def local_complement(graph: Graph, vertex: int) -> Graph:
    """Complement the edge set inside the neighborhood of `vertex`."""
    if not 1 <= vertex <= graph.n:
        raise ValueError(f"vertex {vertex} outside 1..{graph.n}")
    nbrs = sorted(graph.neighbors(vertex))
    edges = set(graph.edges)
    for i, u in enumerate(nbrs):
        for v in nbrs[i + 1:]:
            e = (u, v)
            if e in edges:
                edges.discard(e)
            else:
                edges.add(e)
    return Graph(graph.n, frozenset(edges))


def lc_state_correction(graph: Graph, vertex: int):
    """Per-vertex single-qubit Cliffords realizing local complementation on
    the state: sqrt(-iX) on the vertex and sqrt(iZ) on each neighbor."""
    ops = [(vertex, sqrt_x_dag(1, 0), "SQRT_X_DAG")]
    for u in sorted(graph.neighbors(vertex)):
        ops.append((u, sqrt_z(1, 0), "SQRT_Z"))
    return ops


@dataclass(frozen=True)
class LocalBasisChange:
    """Strictly local recipe: per-vertex single-qubit Clifford maps plus
    human-readable gate labels (applied left to right)."""

    n: int
    ops: tuple  # tuple of per-vertex CliffordMap (1 qubit each)
    labels: tuple  # tuple of per-vertex label tuples

    def as_global(self) -> CliffordMap:
        total = CliffordMap.identity(self.n)
        for v, m in enumerate(self.ops):
            total = total.then(m.embed(self.n, (v,)))
        return total

    def describe(self) -> str:
        parts = []
        for v, labels in enumerate(self.labels, start=1):
            if labels:
                parts.append(f"{'*'.join(labels)} at {v}")
        return "; ".join(parts) if parts else "identity"


def _compose_local(n: int, steps) -> LocalBasisChange:
    """steps: iterable of (vertex, 1-qubit CliffordMap, label)."""
    ops = [CliffordMap.identity(1) for _ in range(n)]
    labels = [[] for _ in range(n)]
    for vertex, m, label in steps:
        ops[vertex - 1] = ops[vertex - 1].then(m)
        labels[vertex - 1].append(label)
    return LocalBasisChange(n, tuple(ops), tuple(tuple(l) for l in labels))


def ghz_tableau(n: int) -> StabilizerTableau:
    return StabilizerTableau(n, ghz_generators(n))


def _sign_fix_steps(tableau: StabilizerTableau):
    """Local Paulis mapping a state whose stabilizer group equals the GHZ
    group pattern-wise onto the exact all-positive GHZ tableau.

    Reads off the state's phase bits by decomposing each GHZ generator
    over the tableau rows, then flips them: X corrections fix the
    adjacent-Z signs (solved as a prefix chain), a final Z on vertex 1
    fixes the X-type sign.
    """
    n = tableau.n
    gens = ghz_generators(n)
    solver = SpanSolver([r.symplectic for r in tableau.rows], 2 * n)
    signs = []
    for g in gens:
        combo = solver.decompose(g.symplectic)
        if combo is None:
            raise ValueError("state is not in the GHZ basis")
        prod = PauliString(n)
        for j, row in enumerate(tableau.rows):
            if (combo >> j) & 1:
                prod = prod * row
        signs.append(prod.sign)
    steps = []
    c = 0  # X on qubit k+1 iff c_k xor c_{k+1} should flip z_k
    xs = [0]
    for zsign in signs[1:]:
        c ^= zsign < 0
        xs.append(c)
    for k, apply_x in enumerate(xs):
        if apply_x:
            steps.append((k + 1, pauli_gate(1, 0, "X"), "X"))
    x_parity_flips = sum(xs) & 1
    del x_parity_flips  # X corrections never touch the X-type sign
    if signs[0] < 0:
        steps.append((1, pauli_gate(1, 0, "Z"), "Z"))
    return steps


def star_to_ghz(n: int, center: int = 1) -> LocalBasisChange:
    """Hadamard on every leaf of the star (plus sign fixes, vacuous here);
    conjugates the star tableau into the exact GHZ tableau."""
    if n < 2:
        raise ValueError("need n >= 2")
    steps = [(v, hadamard(1, 0), "H") for v in range(1, n + 1) if v != center]
    base = _compose_local(n, steps)
    transformed = conjugate_tableau(graph_stabilizers(star_graph(n, center)), base.as_global())
    steps += _sign_fix_steps(transformed)
    lbc = _compose_local(n, steps)
    verify_ghz_conversion(star_graph(n, center), lbc)
    return lbc


def complete_to_ghz(n: int):
    """(vertex for local complementation, local basis change).

    Local complementation at vertex 1 turns the complete graph into the
    star centered there; the basis change composes the complementation's
    single-qubit corrections with the star conversion and any Pauli sign
    fixes, and is verified by signed row-space equality.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    vertex = 1
    graph = complete_graph(n)
    steps = list(lc_state_correction(graph, vertex))
    steps += [(v, hadamard(1, 0), "H") for v in range(2, n + 1)]
    base = _compose_local(n, steps)
    transformed = conjugate_tableau(graph_stabilizers(graph), base.as_global())
    steps += _sign_fix_steps(transformed)
    lbc = _compose_local(n, steps)
    verify_ghz_conversion(graph, lbc)
    return vertex, lbc


def verify_ghz_conversion(graph: Graph, lbc: LocalBasisChange) -> None:
    """Assert the basis change maps the graph state exactly onto GHZ:
    signed row-space equality of the conjugated tableau and the GHZ one."""
    transformed = conjugate_tableau(graph_stabilizers(graph), lbc.as_global())
    if not transformed.same_group(ghz_tableau(graph.n)):
        raise AssertionError("conversion does not reach the GHZ stabilizer group")


def convert_to_ghz(graph: Graph):
    """General entry point for CLI conversion: returns (lc_vertex or None,
    LocalBasisChange) or raises ValueError when the graph is not
    GHZ-equivalent by the supported star/complete routes."""
    n = graph.n
    if graph.edges == star_graph(n).edges:
        return None, star_to_ghz(n)
    for center in range(1, n + 1):
        if graph.edges == star_graph(n, center).edges:
            return None, star_to_ghz(n, center)
    if graph.edges == complete_graph(n).edges:
        return complete_to_ghz(n)
    # try a single local complementation into a star
    for vertex in range(1, n + 1):
        lc = local_complement(graph, vertex)
        for center in range(1, n + 1):
            if lc.edges == star_graph(n, center).edges:
                steps = list(lc_state_correction(graph, vertex))
                steps += [(v, hadamard(1, 0), "H") for v in range(1, n + 1) if v != center]
                base = _compose_local(n, steps)
                transformed = conjugate_tableau(graph_stabilizers(graph), base.as_global())
                steps += _sign_fix_steps(transformed)
                lbc = _compose_local(n, steps)
                verify_ghz_conversion(graph, lbc)
                return vertex, lbc
    raise ValueError("graph is not GHZ-equivalent via star/complete conversion")
