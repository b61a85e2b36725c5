"""Render occupancy and opportunity maps and score a guarded estimate.

Loads the campus scenario, sketches the band-0 maps as ASCII shading,
exports the exact rasters as CSV, then treats a guard-margin estimate of
opportunity as if it were the published one and scores it against the
true field: recovered, lost, and potentially incursed spectrum.
"""

from pathlib import Path

import numpy as np

from spectrumspace import (
    apply_guard_margin,
    export_field,
    harvest_metrics,
    load_scenario,
    occupancy_map,
    opportunity_map,
)

HERE = Path(__file__).parent
scenario = load_scenario(HERE / "scenarios" / "campus.json")
out_dir = HERE / "out"
out_dir.mkdir(exist_ok=True)

SHADES = " .:-=+*#%@"


def sketch(field, lo=-125.0, hi=30.0):
    span = hi - lo
    for row in field.values_dbm[::-1]:
        idx = np.clip((row - lo) / span * (len(SHADES) - 1), 0, len(SHADES) - 1)
        print("".join(SHADES[int(i)] for i in idx))


occupancy = occupancy_map(scenario, band=0, quantum=0)
opportunity = opportunity_map(scenario, band=0, quantum=0)

print("band 0, quantum 0 occupancy (dark = loud):")
sketch(occupancy)
print()
print("band 0, quantum 0 opportunity (dark = room to transmit):")
sketch(opportunity)
print()

for field, name in ((occupancy, "occupancy"), (opportunity, "opportunity")):
    path = out_dir / f"{name}_b0_q0.csv"
    export_field(field, path)
    print(f"wrote {path}")
print()

# a regulator would publish the guarded field; compare it against the truth
guarded = apply_guard_margin(opportunity, margin_db=6.0, bounds=scenario.bounds)
metrics = harvest_metrics(guarded, opportunity, scenario.grid, scenario.bounds)
print("harvest score of a 6 dB guard margin on band 0, quantum 0:")
print(f"  recovered            {metrics.recovered.value:12.4f} W*m^2")
print(f"  lost available       {metrics.lost_available.value:12.4f} W*m^2")
print(f"  potentially incursed {metrics.potentially_incursed.value:12.4f} W*m^2")
print("a guard margin only ever loses spectrum, it cannot incur:")
print(f"  incursed == 0 is {metrics.potentially_incursed.value == 0.0}")
