"""Measure spectrum as a quantity on a one-row toy scenario.

A single 30 dBm link sits in a 1.2 km strip of 100 m cells. The script
walks through the basic accounting: how much spectrum the strip holds,
what the link occupies, what its receiver denies to entrants, and why
the union of both consumptions never exceeds the total.
"""

from spectrumspace import (
    Grid,
    PowerBounds,
    PropagationConfig,
    Receiver,
    RFNetwork,
    Scenario,
    SpectrumSpaceDims,
    Transmitter,
    available_spectrum,
    combine_consumption,
    occupancy_at_cell,
    opportunity_at_cell,
    quantify,
    rx_consumption,
    total_spectrum,
    tx_consumption,
)

grid = Grid(origin=(0.0, 0.0), cell_size=100.0, n_x=12, n_y=1)
bounds = PowerBounds(p_max_dbm=30.0, p_min_dbm=-125.0)
dims = SpectrumSpaceDims(b_hat=1, t_hat=1)

link = RFNetwork(
    id="a",
    transmitters=(Transmitter(id="a-tx", network_id="a", position=(50.0, 50.0),
                              tx_power_dbm=30.0, band=0, quanta=frozenset({0})),),
    receivers=(Receiver(id="a-rx", network_id="a", position=(150.0, 50.0),
                        band=0, quanta=frozenset({0}), beta_db=10.0,
                        noise_floor_dbm=-100.0, linked_tx_id="a-tx"),),
)
scenario = Scenario(grid=grid, dims=dims, bounds=bounds,
                    propagation=PropagationConfig(), networks=(link,))

total = total_spectrum(grid, dims, bounds)
print(f"total spectrum of the strip: {total.value:.1f} W*m^2")

available = available_spectrum(scenario)
print(f"still available to entrants: {available.value:.1f} W*m^2")
print(f"the link therefore forecloses {total.value - available.value:.1f} W*m^2")
print()

# the occupancy and opportunity views disagree on purpose: occupancy is what
# the air already carries, opportunity is what a newcomer may add
for ix in (0, 2, 5, 11):
    occ = occupancy_at_cell(scenario, 0, 0, (ix, 0))
    opp, limiter = opportunity_at_cell(scenario, 0, 0, (ix, 0))
    suffix = f"(limited by {limiter})" if limiter else "(unconstrained)"
    print(f"cell {ix:2d}: occupancy {occ:8.2f} dBm   opportunity {opp:7.2f} dBm {suffix}")
print()

tx_space = tx_consumption("a-tx", scenario)
rx_space = rx_consumption("a-rx", scenario)
tx_used = quantify(tx_space, grid, dims)
rx_used = quantify(rx_space, grid, dims)
print(f"transmitter consumes {tx_used.value:10.4f} W*m^2 (power it puts in the air)")
print(f"receiver consumes    {rx_used.value:10.4f} W*m^2 (power it denies to others)")

union = quantify(combine_consumption(tx_space, rx_space, bounds), grid, dims)
print(f"union of the two:    {union.value:10.4f} W*m^2")
print(f"sum of the two:      {tx_used.value + rx_used.value:10.4f} W*m^2")
print("the union is clipped per cell, so shared cells are never double counted")
