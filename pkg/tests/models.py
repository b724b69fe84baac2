"""Shared model groups and cached character tables for the test suite."""

from functools import lru_cache

from lpackets.chars import character_table
from lpackets.gf import make_field
from lpackets.group import FakeHeisenberg, Sp4MaxUnipotent, Unitriangular, VectorGroup, points

BUILDERS = {
    "ut2_2": lambda: Unitriangular(2, make_field(2, 1)),
    "ut3_2": lambda: Unitriangular(3, make_field(2, 1)),
    "ut3_3": lambda: Unitriangular(3, make_field(3, 1)),
    "ut3_4": lambda: Unitriangular(3, make_field(2, 2)),
    "ut3_5": lambda: Unitriangular(3, make_field(5, 1)),
    "ut4_2": lambda: Unitriangular(4, make_field(2, 1)),
    "sp4_2": lambda: Sp4MaxUnipotent(make_field(2, 1)),
    "sp4_4": lambda: Sp4MaxUnipotent(make_field(2, 2)),
    "fh_3": lambda: FakeHeisenberg(make_field(3, 1)),
    "fh_9": lambda: FakeHeisenberg(make_field(3, 2)),
    "vec2_2": lambda: VectorGroup(2, make_field(2, 1)),
    "vec1_4": lambda: VectorGroup(1, make_field(2, 2)),
}

# shipped models with q <= 4
SMALL_Q = ["ut2_2", "ut3_2", "ut3_3", "ut3_4", "ut4_2", "sp4_2", "sp4_4", "fh_3", "vec2_2", "vec1_4"]


@lru_cache(maxsize=None)
def model(name):
    return BUILDERS[name]()


@lru_cache(maxsize=None)
def group(name):
    return points(model(name), 1)


@lru_cache(maxsize=None)
def table(name):
    return character_table(group(name))
