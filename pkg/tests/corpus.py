"""Fixed graph corpus shared by the zeta tests and the acceptance suite."""
from __future__ import annotations

from topinfer._seeding import derive_seed
from topinfer.ensembles import sample_er
from topinfer.graph import (
    Graph,
    build_graph,
    complete_graph,
    connected_components,
    cycle_graph,
    grid_graph,
    petersen_graph,
)

CORPUS_SEED = 20240611


def random_md2(n: int, p: float, index: int) -> Graph:
    """The first connected min-degree-2 draw of G(n, p) along a derived seed sequence."""
    j = 0
    while True:
        g = sample_er(n, p, derive_seed(CORPUS_SEED, n, index, j))
        if connected_components(g)[0] == 1 and g.degrees().min() >= 2:
            return g
        j += 1


def corpus() -> dict[str, Graph]:
    out: dict[str, Graph] = {}
    for k in range(3, 9):
        out[f"C{k}"] = cycle_graph(k)
    out["K4"] = complete_graph(4)
    k4 = complete_graph(4)
    out["K4-e"] = build_graph(4, [e[:2] for e in k4.edges if e[:2] != (0, 1)])
    out["Petersen"] = petersen_graph()
    for n in (6, 8):
        for i in range(3):
            out[f"ER{n}_{i}"] = random_md2(n, 0.5, i)
    # padding to twenty graphs
    out["K33"] = build_graph(6, [(i, 3 + j) for i in range(3) for j in range(3)])
    cube = [(v, v ^ (1 << b)) for v in range(8) for b in range(3) if v < v ^ (1 << b)]
    out["Q3"] = build_graph(8, cube)
    out["prism"] = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])
    out["bowtie"] = build_graph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    out["theta"] = build_graph(5, [(0, 1), (0, 2), (2, 1), (0, 3), (3, 4), (4, 1)])
    return out


REGULAR = {"K4": 3, "Petersen": 3, "K33": 3, "Q3": 3, "prism": 3, **{f"C{k}": 2 for k in range(3, 9)}}
