"""
Classifying countries and tracking their moves
==============================================

Indicator rows are classified with the size-adjusted thresholds; the trace
of every comparison is kept so an assignment can be audited and replayed.
"""

from gvc_atlas import CountryIndicators, classify_panel, replay_trace, transitions

# country, year, manufacturing / business-services / primary share of DVA,
# backward manufacturing, IP receipts %GDP, R&D %GDP, population
panel = [
    CountryIndicators("CZE", 1995, 0.70, 0.05, 0.10, 0.25, 0.02, 0.9, 10.3e6),
    CountryIndicators("CZE", 2005, 0.65, 0.20, 0.05, 0.30, 0.05, 1.2, 10.2e6),
    CountryIndicators("CZE", 2012, 0.65, 0.22, 0.05, 0.32, 0.12, 1.9, 10.5e6),
    CountryIndicators("IND", 1990, 0.55, 0.15, 0.20, 0.08, 0.00, 0.6, 870e6),
    CountryIndicators("IND", 2015, 0.45, 0.38, 0.10, 0.16, 0.02, 0.7, 1.31e9),
]

assignments = classify_panel(panel)
for a in assignments:
    print(f"{a.country} {a.year} {a.size_class.value:6} -> {a.bucket.value}")

print("\naudit trail for IND 2015:")
ind_2015 = assignments[-1]
for rec in ind_2015.trace:
    print(f"  {rec.rule:28} {rec.value:.3f} {rec.op} {rec.threshold:g} -> {rec.verdict}")
assert replay_trace(ind_2015.trace) is ind_2015.bucket

print()
for rep in transitions(assignments):
    for m in rep.moves:
        print(f"{rep.country}: {m.from_bucket.value} ({m.from_year}) -> {m.to_bucket.value} ({m.to_year})")
