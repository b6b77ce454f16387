"""Datasets on disk for the CLI tests."""

import numpy as np

from gvc_atlas.core import NodeIndex, SectorGroup, build_table
from gvc_atlas.ingest import IndicatorRow, write_dataset

from conftest import autarkic, worked

G = SectorGroup
INDIA_NODES = (
    NodeIndex("IND", "M", G.MANUFACTURING),
    NodeIndex("IND", "BS", G.BUSINESS_SERVICES),
    NodeIndex("IND", "OS", G.OTHER_SERVICES),
    NodeIndex("ROW", "M", G.MANUFACTURING),
)


def india_table(year, exports):
    """IND manufacturing draws 0.3 of its output from ROW; ``exports`` are IND final sales to ROW."""
    A = np.zeros((4, 4))
    A[3, 0] = 0.3
    A[3, 3] = 0.1
    F = np.array([[100.0, exports[0]], [100.0, exports[1]], [100.0, exports[2]], [10.0, 500.0]])
    return build_table(INDIA_NODES, A, F, year)


def india_dataset(root):
    tables = [india_table(1990, (65.0, 0.0, 35.0)), india_table(2015, (50.0, 35.0, 15.0))]
    ind = [
        IndicatorRow(c, y, ip, rd, pop)
        for y in (1990, 2015)
        for c, ip, rd, pop in (("IND", 0.01, 0.7, 1.3e9), ("ROW", 0.5, 2.5, 6e9))
    ]
    return write_dataset(root, tables, ind)


def worked_dataset(root, indicators=True):
    ind = [IndicatorRow("A", 2000, 0.01, 0.5, 5e6), IndicatorRow("B", 2000, 0.02, 0.3, 3e6)] if indicators else []
    return write_dataset(root, [worked()], ind)


def autarkic_dataset(root):
    return write_dataset(root, [autarkic()], [IndicatorRow("A", 2000, 0.0, 0.0, 1e6), IndicatorRow("B", 2000, 0.0, 0.0, 1e6)])


# (country, manuf, biz, primary, backward, ip, rd, population)
FOUR_ROWS = [
    ("S1", 0.50, 0.00, 0.45, 0.15, 0.0, 0.0, 5e6),
    ("S2", 0.70, 0.05, 0.10, 0.05, 0.15, 1.5, 5e6),
    ("IND", 0.45, 0.38, 0.10, 0.16, 0.02, 0.7, 1.3e9),
    ("M1", 0.70, 0.05, 0.10, 0.12, 0.0, 0.2, 2e7),
]


def four_row_table(year=2000):
    """Each country buys a share ``a`` of its manufacturing inputs from ROW and
    nothing else from abroad, so with exports ``e`` (summing to 1):
    backward = a * e_M, DVA = 1 - backward, manufacturing DVA = (1 - a) * e_M.
    Solving for the target shares gives e_M = w + m (1 - w) and a = w / e_M.
    """
    sectors = (("M", G.MANUFACTURING), ("BS", G.BUSINESS_SERVICES), ("P", G.PRIMARY), ("OS", G.OTHER_SERVICES))
    nodes = [NodeIndex(c, s, g) for c, *_ in FOUR_ROWS for s, g in sectors] + [NodeIndex("ROW", "M", G.MANUFACTURING)]
    m = len(nodes)
    A = np.zeros((m, m))
    F = np.zeros((m, len(FOUR_ROWS) + 1))
    for k, (_, manuf, biz, prim, w, *_rest) in enumerate(FOUR_ROWS):
        e_m = w + manuf * (1 - w)
        e = [e_m, biz * (1 - w), prim * (1 - w), (1 - w) * (1 - manuf - biz - prim)]
        A[m - 1, 4 * k] = w / e_m
        for j in range(4):
            F[4 * k + j, k] = 100.0
            F[4 * k + j, -1] = 100.0 * e[j]
    F[m - 1, -1] = 1000.0
    return build_table(tuple(nodes), A, F, year)


def four_row_dataset(root):
    ind = [IndicatorRow(c, 2000, ip, rd, pop) for c, *_s, ip, rd, pop in FOUR_ROWS]
    return write_dataset(root, [four_row_table()], ind)
