"""Reference ETDs shipped with the package, addressable with --example."""

from toroidal.exceptions.etd import EtdFileError
from toroidal.schemas.etd import EtdFile

CATALOG: dict[str, EtdFile] = {
    # cone over (1,0), (1,2) with no facets: base change fails in characteristic 2
    "bacha": EtdFile(
        name="bacha",
        ambient_rank=2,
        p_generators=[[1, 0], [1, 1], [1, 2]],
        q_generators=[],
        facets=[],
    ),
    # N -> N^2 along the diagonal
    "a1": EtdFile(
        name="a1",
        ambient_rank=2,
        p_generators=[[1, 0], [0, 1]],
        q_generators=[[1, 1]],
        facets="min",
    ),
    # the cone of xy = tw over the t-line
    "xytw": EtdFile(
        name="xytw",
        ambient_rank=3,
        p_generators=[[1, 0, 0], [0, 1, 1], [1, 0, 1], [0, 1, 0]],
        q_generators=[[1, 0, 1]],
        facets="min",
    ),
    # N^2 over a point, keeping only the facet spanned by e_1
    "danilov-pair": EtdFile(
        name="danilov-pair",
        ambient_rank=2,
        p_generators=[[1, 0], [0, 1]],
        q_generators=[],
        facets=[[0]],
    ),
}


def get_example(name: str) -> EtdFile:
    try:
        return CATALOG[name]
    except KeyError:
        raise EtdFileError(
            f"Unknown example {name!r}; choose from {sorted(CATALOG)}",
            diagnostics=[{"field": "example", "message": f"unknown example {name!r}"}],
        )
