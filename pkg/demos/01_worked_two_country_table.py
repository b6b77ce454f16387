"""
Decomposing exports in a two-country table
==========================================

Country A sells 50 of intermediates to country B, which uses them to
produce its own exports. Nothing flows the other way, so the Leontief
inverse is just I + A and every number can be checked by hand.
"""

import numpy as np

from gvc_atlas import ICIOTable, NodeIndex, decompose_all, va_origin_matrix, validate_table

nodes = (NodeIndex("A", "M", "Manufacturing"), NodeIndex("B", "M", "Manufacturing"))
table = ICIOTable(
    nodes,
    Z=[[0.0, 50.0], [0.0, 0.0]],
    F=[[30.0, 20.0], [40.0, 80.0]],  # columns: final demand in A, in B
    va=[100.0, 70.0],
    x=[100.0, 120.0],
    year=2000,
)
print("balanced:", validate_table(table, "strict").ok)

# value added from each origin (rows) inside each exporter's gross exports (columns)
vax = va_origin_matrix(table)
print(np.round(vax.vax, 3))

# B's 40 of exports carry 50/120 * 40 of A's value added: that is B's
# backward participation and A's forward participation
for country, d in decompose_all(table).items():
    print(f"{country}: E={d.gross_exports:g}  DVA={d.dva:.3f}  FVA={d.fva:.3f}  DVX={d.dvx:.3f}  "
          f"backward={d.backward_share:.4f}  forward={d.forward_share:.4f}")
