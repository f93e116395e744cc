"""Write the example JSON inputs under data/."""

import json
from pathlib import Path

from supertoric import catalog
from supertoric.decofan import MorphismData
from supertoric.qgr import SupportPattern, hypersimplex_polytope

OUT = Path(__file__).resolve().parent.parent / "data"


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    dump("wild_chain.json", catalog.wild_chain_fan().to_json())
    dump("wild_chain_override.json", catalog.WILD_CHAIN_OVERRIDE_JSON)
    dump("three_chain_orthant.json", catalog.three_chain_orthant().to_json())
    dump("even_smooth_singular.json", catalog.even_smooth_singular_fan().to_json())
    dump("even_smooth_subdivision.json", catalog.even_smooth_subdivision().to_json())
    for n in (1, 2, 3):
        dump(f"projective_{n}_fan.json", catalog.projective_fan(n).to_json())
    dump("matroid_obstruction_fan.json", catalog.matroid_obstruction_fan().to_json())
    dump("projective_line_decorated.json", catalog.projective_line_decorated(True).to_json())
    dump("projective_line_plain.json", catalog.projective_line_decorated(False).to_json())
    dump("identity_map_1_1.json", MorphismData.identity(1, 1).to_json())
    dump("hypersimplex_1_2.json", hypersimplex_polytope(1, 2).to_json())
    dump("hypersimplex_2_4.json", hypersimplex_polytope(2, 4).to_json())
    dump("pattern_3_1_partial.json", SupportPattern.from_rows([[1], [1], [0]]).to_json())
    dump(
        "projective_2_sqrt.json",
        {
            "torus": {"p": 2, "q": 2, "x": [[["1", "0"], ["0", "0"]], [["0", "0"], ["0", "1"]]]},
            "fan": catalog.projective_fan(2).to_json(),
            "h": [],
            "decorations": {"0": {"signs": [1, 0]}, "1": {"signs": [0, 0]}, "2": {"signs": [0, 0]}},
        },
    )
    dump(
        "irrational_line.json",
        {
            "torus": {"p": 2, "q": 2, "x": [[["1", "0"], ["0", "0"]], [["0", "0"], ["0", "1"]]]},
            "fan": {"rank": 2, "rays": [[1, 2]], "cones": [[0]]},
            "h": [],
            "decorations": {"0": {"signs": [1, 1]}},
        },
    )
    dump("empty_fan.json", {"torus": {"p": 2, "q": 1}, "fan": {"rank": 2, "rays": [], "cones": [[]]}, "h": [], "decorations": {}})


if __name__ == "__main__":
    main()
