"""The built-in collection of loops, with their expected classifications.

Each entry carries a hand-written expected fragment (a few properties that
place it in a region of the variety diagram) and a committed golden report
in ``data/golden/<name>.json`` holding the full classification.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import LoopError
from .loop import (
    CayleyLoop, boolean_group, chein_double, cyclic_group, direct_product, parse_loop,
    symmetric_group, trivial_loop,
)
from .steiner import steiner_loop, sts9_system, z13_system
from .varieties import classify, report_dict

TABLE_CHECKSUMS = {
    "flexible_c24.tbl": "353574c4b5859019dd945ba309eb07c077d4f2fd8e777128afb3efc7afb23fce",
    "nonflexible_c12.tbl": "d7305d42a70c1e0004a0a0e1c56a544d076ab291f042fd79292375378401fdd0",
    "nonip5.tbl": "4d3dd6fa6e6ca248315f4cae11654a80ef19c12d13f60010d4a50362ac7c801f",
    "ip7_nonalt.tbl": "6356804c326532ad39877d91ebf7cc51202f2c91e12d9e9c2492796c6d23f629",
}

# (file, row, col, value) lookups that a transcription slip would break
SPOT_CHECKS = (
    ("flexible_c24.tbl", 3, 12, 18),
    ("flexible_c24.tbl", 15, 18, 10),
    ("flexible_c24.tbl", 12, 3, 18),
    ("nonflexible_c12.tbl", 3, 3, 0),
    ("nonflexible_c12.tbl", 3, 6, 10),
)


class CorpusError(LoopError):
    pass


def _data(name):
    path = resources.files("loopforge").joinpath("data")
    for part in name.split("/"):
        path = path.joinpath(part)
    return path


def data_table(filename, name=None):
    """Load a shipped table after checking its checksum and spot values."""
    raw = _data(filename).read_bytes()
    want = TABLE_CHECKSUMS.get(filename)
    got = hashlib.sha256(raw).hexdigest()
    if want is not None and got != want:
        raise CorpusError(f"{filename}: checksum {got} does not match {want}")
    loop = parse_loop(raw.decode(), name=name or filename.rsplit(".", 1)[0])
    for fname, r, c, v in SPOT_CHECKS:
        if fname == filename and loop.mul(r, c) != v:
            raise CorpusError(f"{filename}: entry ({r},{c}) is {loop.mul(r, c)}, expected {v}")
    return loop


@dataclass
class CorpusEntry:
    name: str
    build: object = field(repr=False)
    provenance: str
    expected: dict
    region: str = ""

    @property
    def loop(self):
        return _built(self.name)


def _s3():
    return symmetric_group(3)


def _chein_s3():
    return chein_double(symmetric_group(3))


def _flexible_c24():
    return data_table("flexible_c24.tbl", "flexible_c24")


def _nonflexible_c12():
    return data_table("nonflexible_c12.tbl", "nonflexible_c12")


def _steiner14():
    return steiner_loop(z13_system())


def _steiner10():
    return steiner_loop(sts9_system())


_T, _F = True, False

_ENTRIES = (
    CorpusEntry("trivial", trivial_loop, "constructed",
                {"boolean_group": _T, "steiner": _T}, "the one-element loop"),
    CorpusEntry("z2", lambda: boolean_group(1), "constructed",
                {"boolean_group": _T}, "boolean group"),
    CorpusEntry("z2x2", lambda: boolean_group(2), "constructed",
                {"boolean_group": _T, "extra": _T}, "boolean group"),
    CorpusEntry("z2x3", lambda: boolean_group(3), "constructed",
                {"boolean_group": _T, "steiner": _T}, "boolean group"),
    CorpusEntry("z3", lambda: cyclic_group(3), "constructed",
                {"associative": _T, "boolean_group": _F, "extra": _T}, "group, not boolean"),
    CorpusEntry("z4", lambda: cyclic_group(4), "constructed",
                {"associative": _T, "boolean_group": _F}, "group, not boolean"),
    CorpusEntry("z5", lambda: cyclic_group(5), "constructed",
                {"associative": _T, "boolean_group": _F}, "group, not boolean"),
    CorpusEntry("z6", lambda: cyclic_group(6), "constructed",
                {"associative": _T, "boolean_group": _F, "extra": _T}, "group, not boolean"),
    CorpusEntry("s3", _s3, "constructed",
                {"associative": _T, "commutative": _F, "extra": _T}, "nonabelian group"),
    CorpusEntry("chein_s3", _chein_s3, "constructed",
                {"moufang": _T, "associative": _F, "c_loop": _F, "extra": _F, "rif": _T},
                "Moufang, not extra"),
    CorpusEntry("flexible_c24", _flexible_c24, "published-table",
                {"ip": _T, "flexible": _T, "c_loop": _T, "arif": _T, "rif": _F,
                 "moufang": _F, "diassociative": _T, "power_alternative": _T, "steiner": _F},
                "flexible C-loop, not RIF"),
    CorpusEntry("nonflexible_c12", _nonflexible_c12, "published-table",
                {"c_loop": _T, "flexible": _F, "alternative": _T, "ip": _T, "arif": _F},
                "C-loop, not flexible"),
    CorpusEntry("steiner14", _steiner14, "constructed",
                {"steiner": _T, "rif": _T, "c_loop": _T, "associative": _F, "moufang": _F},
                "Steiner, not a group"),
    CorpusEntry("steiner10", _steiner10, "constructed",
                {"steiner": _T, "associative": _F, "moufang": _F, "c_loop": _T},
                "Steiner, not a group"),
    CorpusEntry("steiner10_x_z3", lambda: direct_product(_steiner10(), cyclic_group(3)),
                "constructed",
                {"rif": _T, "flexible": _T, "c_loop": _T, "moufang": _F, "steiner": _F},
                "RIF flexible C-loop, neither Moufang nor Steiner"),
    CorpusEntry("steiner10_x_chein_s3", lambda: direct_product(_steiner10(), _chein_s3()),
                "constructed",
                {"rif": _T, "c_loop": _F, "moufang": _F},
                "RIF, not a C-loop"),
    CorpusEntry("flexible_c24_x_chein_s3", lambda: direct_product(_flexible_c24(), _chein_s3()),
                "constructed",
                {"arif": _T, "c_loop": _F, "rif": _F, "diassociative": _T},
                "ARIF, neither C nor RIF"),
    CorpusEntry("nonip5", lambda: data_table("nonip5.tbl"), "finder-output",
                {"ip": _F, "arif": _F}, "loop without two-sided inverses"),
    CorpusEntry("ip7_nonalt", lambda: data_table("ip7_nonalt.tbl"), "finder-output",
                {"ip": _T, "right_alt": _F, "power_associative": _T,
                 "power_alternative": _F, "diassociative": _F},
                "IP loop, power associative but not power alternative"),
)

# variety-diagram regions and the entry that inhabits each
REGIONS = {
    "boolean group": "z2x2",
    "group, not boolean (extra)": "z6",
    "Moufang, not extra": "chein_s3",
    "Steiner, not a group": "steiner10",
    "RIF flexible C, neither Moufang nor Steiner": "steiner10_x_z3",
    "RIF, not C": "steiner10_x_chein_s3",
    "flexible C, not RIF": "flexible_c24",
    "ARIF, neither C nor RIF": "flexible_c24_x_chein_s3",
}


def corpus():
    return list(_ENTRIES)


def names():
    return [e.name for e in _ENTRIES]


def entry(name):
    for e in _ENTRIES:
        if e.name == name:
            return e
    raise KeyError(f"no corpus loop named {name!r}; known: {', '.join(names())}")


@lru_cache(maxsize=None)
def _built(name):
    e = entry(name)
    loop = e.build()
    return CayleyLoop(loop.table, name=name, comments=loop.comments)


def get(name):
    return _built(name)


def expected_mismatches(e, report):
    return {k: (v, report[k]) for k, v in e.expected.items() if report[k] != v}


def golden_text(name, report=None):
    """The canonical JSON text of an entry's report."""
    loop = get(name)
    report = report or classify(loop)
    return json.dumps(report_dict(loop, report, name=name), indent=2, sort_keys=True) + "\n"


def golden_path(name):
    return _data(f"golden/{name}.json")


def check_entry(name):
    """Classify an entry and compare with its fragment and golden file.

    Returns a list of human-readable problems (empty when everything matches).
    """
    e = entry(name)
    report = classify(get(name))
    problems = [f"{k}: expected {want}, got {got}"
                for k, (want, got) in expected_mismatches(e, report).items()]
    path = golden_path(name)
    text = golden_text(name, report)
    if not path.is_file():
        problems.append(f"missing golden file {name}.json")
    elif path.read_text() != text:
        import difflib
        diff = difflib.unified_diff(path.read_text().splitlines(), text.splitlines(),
                                    "golden", "computed", lineterm="")
        problems.append("\n".join(diff))
    return problems


def write_golden(selected=None):
    """Regenerate golden files (after a deliberate change in the classifier)."""
    out = []
    for name in selected or names():
        path = golden_path(name)
        with resources.as_file(path) as real:
            real.write_text(golden_text(name))
        out.append(name)
    return out


if __name__ == "__main__":
    import sys
    for done in write_golden(sys.argv[1:] or None):
        print("wrote", done)
