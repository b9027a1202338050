import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from pmatch.graph import build_graph

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=0, max_n=8, multi=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if not pairs:
        return build_graph(n, [])
    edges = draw(st.lists(st.sampled_from(pairs), max_size=3 * n, unique=not multi))
    return build_graph(n, edges)


@st.composite
def even_graphs(draw, max_n=10):
    g = draw(graphs(min_n=0, max_n=max_n))
    if len(g) % 2:
        g = build_graph(len(g) + 1, list(g.edges) + [(0, len(g))])
    return g
