from pathlib import Path

import networkx as nx
import pytest

from drgfeas.arrays import DomainError, parse_array
from drgfeas.graphs import (
    EdgeListError,
    Graph,
    build,
    build_cycle,
    build_hadamard_graph,
    build_hypercube,
    build_icosahedron,
    build_johnson,
    build_line_graph,
    build_petersen,
    certify_drg,
    distance_i_graph,
    format_edge_list,
    is_antipodal,
    is_bipartite,
    is_terwilliger,
    parse_edge_list,
    read_edge_list,
    write_edge_list,
)
from strategies import EXTRA_GRAPHS, FIXTURES, fixture_array, fixture_graph

DATA = Path(__file__).parent / "data"


def _nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


@pytest.mark.parametrize("name", sorted(FIXTURES) + sorted(EXTRA_GRAPHS))
def test_fixture_certifies_to_expected_array(name):
    out = certify_drg(fixture_graph(name))
    assert out.ok, out.witness
    assert out.array == fixture_array(name)


def test_petersen_minus_edge_is_not_drg():
    out = certify_drg(build_petersen().remove_edge(0, next(iter(build_petersen().adj[0]))))
    assert out.status == "not-drg" and "pair" in out.witness
    assert out.to_json()["array"] is None


def test_path_is_not_drg():
    out = certify_drg(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]))
    assert out.status == "not-drg"


def test_disconnected():
    c6 = build_cycle(6)
    assert certify_drg(distance_i_graph(c6, 3)).status == "disconnected"
    assert certify_drg(Graph.from_edges(4, [(0, 1), (2, 3)])).status == "disconnected"


def test_distance_graphs():
    ico = build_icosahedron()
    assert distance_i_graph(ico, 1) == ico
    out = certify_drg(distance_i_graph(ico, 2))
    assert out.ok and out.array == parse_array("5,2,1;1,2,5")
    with pytest.raises(DomainError):
        distance_i_graph(ico, 4)
    with pytest.raises(DomainError):
        distance_i_graph(Graph.from_edges(4, [(0, 1), (2, 3)]), 1)


def test_structural_predicates():
    q4 = build_hypercube(4)
    assert is_bipartite(q4) and is_antipodal(q4)
    ico = build_icosahedron()
    assert is_terwilliger(ico) and is_antipodal(ico) and not is_bipartite(ico)
    pet = build_petersen()
    assert is_terwilliger(pet) and not is_antipodal(pet) and not is_bipartite(pet)
    # J(6,3) is antipodal (complements), J(7,3) is not; neither is Terwilliger (c_2 = 4, mu-graph a square)
    assert is_antipodal(build_johnson(6, 3)) and not is_antipodal(build_johnson(7, 3))
    assert not is_terwilliger(build_johnson(7, 3))


@pytest.mark.parametrize("name", ["pentagon", "petersen", "cube4", "icosahedron", "johnson73", "halved7", "line_petersen"])
def test_predicates_match_networkx(name):
    g = fixture_graph(name)
    h = _nx(g)
    assert is_bipartite(g) == nx.is_bipartite(h)
    assert g.diameter() == nx.diameter(h)
    assert g.distance_matrix() == [[nx.shortest_path_length(h, x, y) for y in range(g.n)] for x in range(g.n)]


@pytest.mark.parametrize(
    "ours, theirs",
    [
        (build_petersen, nx.petersen_graph),
        (build_icosahedron, nx.icosahedral_graph),
        (lambda: build_hypercube(4), lambda: nx.hypercube_graph(4)),
        (lambda: build_cycle(9), lambda: nx.cycle_graph(9)),
        (lambda: build_line_graph(build_petersen()), lambda: nx.line_graph(nx.petersen_graph())),
    ],
)
def test_builders_isomorphic_to_networkx(ours, theirs):
    assert nx.is_isomorphic(_nx(ours()), theirs())


def test_johnson_5_2_is_triangular_graph():
    assert nx.is_isomorphic(_nx(build_johnson(5, 2)), nx.line_graph(nx.complete_graph(5)))


def test_hadamard_small_cases():
    assert certify_drg(build_hadamard_graph(2)).array == parse_array("4,3,2,1;1,2,3,4")
    assert nx.is_isomorphic(_nx(build_hadamard_graph(2)), nx.hypercube_graph(4))
    assert nx.is_isomorphic(_nx(build_hadamard_graph(1)), nx.cycle_graph(8))


def test_build_dispatch_and_errors():
    assert build("johnson", 7, 3).n == 35
    assert build("petersen").n == 10
    with pytest.raises(DomainError):
        build("nope")
    with pytest.raises(DomainError):
        build("johnson", 7)
    with pytest.raises(DomainError):
        build_johnson(5, 3)
    with pytest.raises(DomainError):
        build_hadamard_graph(0)


def test_edge_list_roundtrip(tmp_path):
    g = build_petersen()
    assert parse_edge_list(format_edge_list(g)) == g
    p = tmp_path / "g.edges"
    write_edge_list(g, p)
    assert read_edge_list(p) == g


def test_edge_list_fixture_file():
    g = read_edge_list(DATA / "petersen.edges")
    assert certify_drg(g).array == parse_array("3,2;1,1")


def test_edge_list_comments_and_blank_lines():
    g = parse_edge_list("# triangle\n0 1\n\n1 2  # closing\n2 0\n")
    assert g.n == 3 and len(g.edges()) == 3


@pytest.mark.parametrize(
    "text, line",
    [("0 1\n1\n", 2), ("0 1\nx 2\n", 2), ("3 3\n", 1), ("0 -1\n", 1), ("0 1 2\n", 1)],
)
def test_edge_list_errors(text, line):
    with pytest.raises(EdgeListError) as err:
        parse_edge_list(text)
    assert err.value.line == line
