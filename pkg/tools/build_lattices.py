"""Regenerate src/ckl/data from the constructions in ckl.lattices.

    python3 tools/build_lattices.py

Writes one JSON file per Tait lattice, one per Temperley lift, and
examples.json with the catalog records.  Commit the output; the package
never rebuilds lattices at run time.
"""

import json
import math
import pathlib

from ckl.lattices import TAIT_LATTICES
from ckl.periodic_graph import graph_to_dict
from ckl.spanning_tree import temperley_lift
from ckl.special_functions import V_OCT, V_TET

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "ckl" / "data"


def q(value, note, source="quoted"):
    return {"value": value, "source": source, "note": note}


EXAMPLES = [
    {
        "name": "triaxial",
        "tait": "triangular",
        "isoradial": True,
        "face_degrees": {"degrees": [6, 3, 3], "source": "quoted", "note": "2 vol(B3) + vol(B6)"},
        "expected": {
            "two_pi_M": q(10 * V_TET, "equality case, 10 v_tet", "closed_form"),
            "vol_bipyramid": q(10 * V_TET, "10 v_tet", "closed_form"),
            "M_critical": q(5 / math.pi * V_TET + math.log(3), "(5/pi) v_tet + log 3", "closed_form"),
            "gauge_shift": q(-math.log(3), "two face-black vertices scaled by 1/sqrt 3", "closed_form"),
            "tree_entropy_fd": q(1.615329, "z_tri, Teufl and Wagner"),
        },
    },
    {
        "name": "weave",
        "tait": "square",
        "isoradial": True,
        "face_degrees": None,
        "expected": {
            "two_pi_M": q(2 * V_OCT, "equality case, 2 v_oct", "closed_form"),
            "vol_bipyramid": q(2 * V_OCT, "2 v_oct", "closed_form"),
            "M_critical": q(V_OCT / math.pi + math.log(2), "v_oct/pi + log 2", "closed_form"),
            "gauge_shift": q(-math.log(2), "both black vertices scaled by 1/sqrt 2", "closed_form"),
        },
    },
    {
        "name": "rhombitrihexagonal",
        "tait": "kagome",
        "isoradial": False,
        "face_degrees": None,
        "expected": {
            "two_pi_M": q(21.407368, "2 pi z_kag"),
            "tree_entropy_fd": q(3.407088, "z_tri + log 6, Teufl and Wagner"),
        },
    },
    {
        "name": "three-twelve-twelve",
        "tait": "three-twelve-twelve",
        "isoradial": False,
        "face_degrees": {"degrees": [12] + [3] * 8, "source": "quoted", "note": "vol(B12) + 8 vol(B3)"},
        "expected": {
            "two_pi_M": q(27.164592, "2 pi z_3.12.12"),
            "vol_bipyramid": q(26.6109, "vol(B12) + 8 vol(B3), rounded sum"),
            "tree_entropy_fd": q(4.323379, "z_tri + log 15, Teufl and Wagner"),
        },
    },
    {
        "name": "nine",
        "tait": "nine",
        "isoradial": False,
        "face_degrees": {"degrees": [9] + [3] * 5, "source": "quoted", "note": "vol(B9) + 5 vol(B3)"},
        "expected": {
            "two_pi_M": q(18.859756, "2 pi z_nine"),
            "vol_bipyramid": q(18.7326, "vol(B9) + 5 vol(B3), rounded sum"),
            "tree_entropy_fd": q(3.001623, "z_tri + 2 log 2, Teufl and Wagner"),
        },
    },
    {
        "name": "four-eight-eight",
        "tait": "four-eight-eight",
        "isoradial": False,
        "face_degrees": {"degrees": [8, 4, 3, 3, 3, 3], "source": "quoted", "note": "vol(B8) + vol(B4) + 4 vol(B3)"},
        "expected": {
            "two_pi_M": q(19.7715323218, "8 pi z_4.8.8"),
            "vol_bipyramid": q(19.6379, "vol(B8) + vol(B4) + 4 vol(B3), rounded sum"),
            "tree_entropy_per_vertex": q(0.786684275378832, "z_4.8.8, Chang and Shrock"),
        },
    },
    {
        "name": "kite",
        "tait": "kite",
        "isoradial": False,
        "face_degrees": {"degrees": [8] + [4] * 7 + [3] * 4, "source": "quoted", "note": "vol(B8) + 7 vol(B4) + 4 vol(B3)"},
        "expected": {
            "two_pi_M": q(42.287446, "2 pi z_kite"),
            "vol_bipyramid": q(41.6207, "vol(B8) + 7 vol(B4) + 4 vol(B3), rounded sum"),
            "tree_entropy_fd": q(6.730256, "z_4.8.8 + 2 log 6, Teufl and Wagner"),
        },
    },
]


def main():
    (DATA / "tait").mkdir(parents=True, exist_ok=True)
    (DATA / "lifts").mkdir(parents=True, exist_ok=True)
    for name, build in TAIT_LATTICES.items():
        T = build()
        (DATA / "tait" / f"{name}.json").write_text(json.dumps(graph_to_dict(T), indent=1) + "\n")
    for ex in EXAMPLES:
        T = TAIT_LATTICES[ex["tait"]]()
        L = temperley_lift(T, name=f"{ex['name']}-dimer")
        (DATA / "lifts" / f"{ex['name']}.json").write_text(json.dumps(graph_to_dict(L), indent=1) + "\n")
    (DATA / "examples.json").write_text(json.dumps(EXAMPLES, indent=1) + "\n")
    print(f"wrote {len(TAIT_LATTICES)} lattices and {len(EXAMPLES)} examples to {DATA}")


if __name__ == "__main__":
    main()
