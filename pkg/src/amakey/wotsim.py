"""Web-of-trust graph simulator: mean-shortest-distance and the colluder attack.

Demonstrates why certification-chain proximity is a poor trust proxy: a
small set of colluding associates, once certified by their victims, can
place impostor keys one certification hop away from everything the victims
signed, giving the impostors better path metrics than the genuine keys.

Conventions (stated in every report): certification edges point from
signer to signed key, and unreachable nodes are excluded from the MSD mean
rather than given a penalty distance.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

MSD_CONVENTION = "unreachable-excluded"


@dataclass(frozen=True)
class WotNode:
    node_id: str
    owner: str
    impostor: bool = False


class WotGraph:
    """Directed certification graph: an edge (a, b) means a signed b's key."""

    def __init__(self):
        self.nodes: dict[str, WotNode] = {}
        self._successors: dict[str, set[str]] = {}

    def add_node(self, node_id: str, owner: str, impostor: bool = False) -> None:
        if node_id in self.nodes:
            raise ValueError(f"duplicate node: {node_id}")
        self.nodes[node_id] = WotNode(node_id, owner, impostor)
        self._successors[node_id] = set()

    def add_edge(self, signer: str, signed: str) -> None:
        if signer not in self.nodes or signed not in self.nodes:
            raise ValueError(f"edge references unknown node: {signer} -> {signed}")
        if signer == signed:
            raise ValueError("self-certification edges are not allowed")
        self._successors[signer].add(signed)

    def successors(self, node_id: str) -> set[str]:
        return set(self._successors[node_id])

    @property
    def edges(self) -> set[tuple[str, str]]:
        return {(a, b) for a, succ in self._successors.items() for b in succ}

    def copy(self) -> "WotGraph":
        clone = WotGraph()
        for node in self.nodes.values():
            clone.add_node(node.node_id, node.owner, node.impostor)
        for a, b in self.edges:
            clone.add_edge(a, b)
        return clone


def shortest_distances(graph: WotGraph, source: str) -> dict[str, int]:
    """BFS distances from source to every reachable node (source included at 0)."""
    if source not in graph.nodes:
        raise KeyError(f"unknown node: {source}")
    dist = {source: 0}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        for nxt in graph._successors[current]:
            if nxt not in dist:
                dist[nxt] = dist[current] + 1
                queue.append(nxt)
    return dist


def msd(graph: WotGraph, node: str) -> Fraction:
    """Mean shortest directed distance from node to the other reachable nodes.

    Unreachable nodes are excluded from the mean; a node that reaches
    nothing (including the single-node graph) has MSD 0.
    """
    dist = shortest_distances(graph, node)
    others = [d for target, d in dist.items() if target != node]
    if not others:
        return Fraction(0)
    return Fraction(sum(others), len(others))


@dataclass(frozen=True)
class MsdEntry:
    node_id: str
    owner: str
    impostor: bool
    msd: Fraction
    reachable: int
    unreachable: int


@dataclass(frozen=True)
class MsdReport:
    entries: dict[str, MsdEntry]
    convention: str = MSD_CONVENTION


def msd_report(graph: WotGraph) -> MsdReport:
    entries = {}
    total_others = len(graph.nodes) - 1
    for node_id, node in sorted(graph.nodes.items()):
        dist = shortest_distances(graph, node_id)
        reachable = len(dist) - 1
        entries[node_id] = MsdEntry(
            node_id=node_id,
            owner=node.owner,
            impostor=node.impostor,
            msd=msd(graph, node_id),
            reachable=reachable,
            unreachable=total_others - reachable,
        )
    return MsdReport(entries)


def node_disjoint_path_count(graph: WotGraph, source: str, target: str) -> int:
    """Maximum number of internally node-disjoint paths from source to target.

    Unit-capacity max flow on the node-split graph, via BFS augmentation.
    """
    if source not in graph.nodes or target not in graph.nodes:
        raise KeyError("unknown node")
    if source == target:
        return 0
    # Split every node v into v_in -> v_out with capacity 1 (source/target unlimited).
    capacity: dict[tuple[str, str], int] = {}

    def add(u: str, v: str, cap: int):
        capacity[(u, v)] = capacity.get((u, v), 0) + cap
        capacity.setdefault((v, u), 0)

    for node_id in graph.nodes:
        cap = len(graph.nodes) if node_id in (source, target) else 1
        add(f"{node_id}#in", f"{node_id}#out", cap)
    for a, b in graph.edges:
        add(f"{a}#out", f"{b}#in", 1)

    adjacency: dict[str, set[str]] = {}
    for (u, v) in capacity:
        adjacency.setdefault(u, set()).add(v)

    src, dst = f"{source}#out", f"{target}#in"
    flow = 0
    while True:
        parent = {src: None}
        queue = deque([src])
        while queue and dst not in parent:
            current = queue.popleft()
            for nxt in adjacency.get(current, ()):
                if nxt not in parent and capacity[(current, nxt)] > 0:
                    parent[nxt] = current
                    queue.append(nxt)
        if dst not in parent:
            return flow
        node = dst
        while parent[node] is not None:
            prev = parent[node]
            capacity[(prev, node)] -= 1
            capacity[(node, prev)] += 1
            node = prev
        flow += 1


# --- the colluder scenario ----------------------------------------------------

VICTIMS = ("alice", "bob")
ASSOCIATES = ("charlie", "dave", "francis")


def build_eve_scenario() -> WotGraph:
    """The colluder impostor attack.

    Alice and Bob diligently verify and sign the keys of three associates.
    The associates then certify impostor keys for both Alice and Bob. Every
    victim now finds multiple independent certification pathways, each
    ending in a single 1-hop link from a key they personally signed, to an
    impostor key.
    """
    graph = WotGraph()
    graph.add_node("alice", owner="Alice")
    graph.add_node("bob", owner="Bob")
    for associate in ASSOCIATES:
        graph.add_node(associate, owner=associate.title())
    graph.add_node("impostor-alice", owner="Alice", impostor=True)
    graph.add_node("impostor-bob", owner="Bob", impostor=True)
    for victim in VICTIMS:
        for associate in ASSOCIATES:
            graph.add_edge(victim, associate)
    for associate in ASSOCIATES:
        graph.add_edge(associate, "impostor-alice")
        graph.add_edge(associate, "impostor-bob")
    return graph


@dataclass(frozen=True)
class AttackRow:
    """How one querying node sees the genuine vs impostor keys for one owner."""

    querier: str
    owner: str
    genuine_node: str | None
    impostor_node: str
    genuine_distance: int | None
    impostor_distance: int | None
    disjoint_paths_to_impostor: int
    last_hop_from_querier_signee: bool
    closer: str


@dataclass(frozen=True)
class AttackReport:
    rows: list[AttackRow]
    msd: MsdReport
    convention: str = MSD_CONVENTION


def attack_report(graph: WotGraph) -> AttackReport:
    """Compare path metrics toward genuine and impostor keys per owner label.

    Raises ValueError when the graph contains no impostor nodes.
    """
    impostors = [n for n in graph.nodes.values() if n.impostor]
    if not impostors:
        raise ValueError("graph contains no impostor nodes")
    genuine_by_owner: dict[str, str] = {
        n.owner: n.node_id for n in graph.nodes.values() if not n.impostor
    }
    rows: list[AttackRow] = []
    queriers = sorted(n.node_id for n in graph.nodes.values() if not n.impostor)
    for querier in queriers:
        dist = shortest_distances(graph, querier)
        signees = graph.successors(querier)
        for impostor in sorted(impostors, key=lambda n: n.node_id):
            if genuine_by_owner.get(impostor.owner) == querier:
                continue  # a node does not look up its own key
            genuine_node = genuine_by_owner.get(impostor.owner)
            genuine_distance = dist.get(genuine_node) if genuine_node else None
            impostor_distance = dist.get(impostor.node_id)
            if impostor_distance is None and genuine_distance is None:
                closer = "neither-reachable"
            elif impostor_distance is None:
                closer = "genuine"
            elif genuine_distance is None or impostor_distance < genuine_distance:
                closer = "impostor"
            elif impostor_distance == genuine_distance:
                closer = "tie"
            else:
                closer = "genuine"
            rows.append(
                AttackRow(
                    querier=querier,
                    owner=impostor.owner,
                    genuine_node=genuine_node,
                    impostor_node=impostor.node_id,
                    genuine_distance=genuine_distance,
                    impostor_distance=impostor_distance,
                    disjoint_paths_to_impostor=node_disjoint_path_count(graph, querier, impostor.node_id),
                    last_hop_from_querier_signee=any(
                        impostor.node_id in graph.successors(s) for s in signees
                    ),
                    closer=closer,
                )
            )
    return AttackReport(rows=rows, msd=msd_report(graph))


# --- text formats ----------------------------------------------------------------

def serialize_graph(graph: WotGraph) -> str:
    """Edge-list text format: a [nodes] header block, then one signer/signed pair per line."""
    lines = ["[nodes]"]
    for node in sorted(graph.nodes.values(), key=lambda n: n.node_id):
        tag = "impostor" if node.impostor else "genuine"
        lines.append(f"{node.node_id} {tag} {node.owner}")
    lines.append("[edges]")
    for a, b in sorted(graph.edges):
        lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> WotGraph:
    graph = WotGraph()
    section = None
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("[nodes]", "[edges]"):
            section = line
            continue
        parts = line.split()
        if section == "[nodes]":
            if len(parts) < 3 or parts[1] not in ("genuine", "impostor"):
                raise ValueError(f"bad node line: {raw_line!r}")
            graph.add_node(parts[0], owner=" ".join(parts[2:]), impostor=parts[1] == "impostor")
        elif section == "[edges]":
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {raw_line!r}")
            graph.add_edge(parts[0], parts[1])
        else:
            raise ValueError(f"line outside any section: {raw_line!r}")
    return graph


def report_to_csv(report: AttackReport) -> str:
    """CSV with one row per (querier, impostor key), plus an MSD table."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        [
            "querier",
            "owner",
            "genuine_node",
            "impostor_node",
            "genuine_distance",
            "impostor_distance",
            "disjoint_paths_to_impostor",
            "last_hop_from_querier_signee",
            "closer",
            "convention",
        ]
    )
    for row in report.rows:
        writer.writerow(
            [
                row.querier,
                row.owner,
                row.genuine_node or "",
                row.impostor_node,
                "" if row.genuine_distance is None else row.genuine_distance,
                "" if row.impostor_distance is None else row.impostor_distance,
                row.disjoint_paths_to_impostor,
                "yes" if row.last_hop_from_querier_signee else "no",
                row.closer,
                report.convention,
            ]
        )
    writer.writerow([])
    writer.writerow(["node", "owner", "kind", "msd_exact", "msd", "reachable", "unreachable"])
    for entry in report.msd.entries.values():
        writer.writerow(
            [
                entry.node_id,
                entry.owner,
                "impostor" if entry.impostor else "genuine",
                f"{entry.msd.numerator}/{entry.msd.denominator}",
                float(entry.msd),
                entry.reachable,
                entry.unreachable,
            ]
        )
    return out.getvalue()
