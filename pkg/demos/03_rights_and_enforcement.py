"""Define transmit rights, audit the air, and bill the grantee.

An entrant asks to transmit two cells away from a protected receiver.
The authority defines rights from the guarded opportunity field, the
entrant first obeys the cap and then cheats by 5 dB, and enforcement
catches the difference. Harmful interference at the receiver is then
attributed proportionally and the obedient entrant is billed.
"""

from spectrumspace import (
    Grid,
    PowerBounds,
    PriceSheet,
    PropagationConfig,
    Receiver,
    RFNetwork,
    RightsRequest,
    Scenario,
    SpectrumSpaceDims,
    Transmitter,
    attribute_harmful_interference,
    define_rights,
    enforce,
    price,
    quantify,
    tx_consumption,
)

grid = Grid(origin=(0.0, 0.0), cell_size=100.0, n_x=12, n_y=1)
bounds = PowerBounds(p_max_dbm=30.0, p_min_dbm=-125.0)
dims = SpectrumSpaceDims(b_hat=1, t_hat=1)

incumbent = RFNetwork(
    id="a",
    transmitters=(Transmitter(id="a-tx", network_id="a", position=(50.0, 50.0),
                              tx_power_dbm=30.0, band=0, quanta=frozenset({0})),),
    receivers=(Receiver(id="a-rx", network_id="a", position=(150.0, 50.0),
                        band=0, quanta=frozenset({0}), beta_db=10.0,
                        noise_floor_dbm=-100.0, linked_tx_id="a-tx"),),
)
base = Scenario(grid=grid, dims=dims, bounds=bounds,
                propagation=PropagationConfig(), networks=(incumbent,))

request = RightsRequest(tx_id="e1", position=(250.0, 50.0), desired_dbm=30.0,
                        min_useful_dbm=-20.0, band=0, quanta=frozenset({0}))
right = define_rights(base, request, margin_db=1.0)
cap = right.cap_dbm()
print(f"grant {right.grant_id}: cap {cap:.4f} dBm "
      f"(desired 30, clipped by a-rx with a 1 dB guard)")
print()


def with_entrant(power_dbm: float) -> Scenario:
    entrant = RFNetwork(
        id="entrant",
        transmitters=(Transmitter(id="e1", network_id="entrant",
                                  position=(250.0, 50.0), tx_power_dbm=power_dbm,
                                  band=0, quanta=frozenset({0})),),
    )
    return Scenario(grid=grid, dims=dims, bounds=bounds,
                    propagation=PropagationConfig(),
                    networks=(incumbent, entrant))


for power in (cap, cap + 5.0):
    observed = with_entrant(power)
    violations = [v for v in enforce([right], observed) if v.tx_id == "e1"]
    print(f"entrant transmits at {power:.4f} dBm -> "
          f"{len(violations)} violation(s) against its grant")
    for v in violations:
        print(f"  cell {v.cell} band {v.band} quantum {v.quantum}: "
              f"observed {v.observed_dbm:.4f} vs granted {v.granted_dbm:.4f} "
              f"(excess {v.excess_db:.4f} dB)")
print()

rogue = with_entrant(cap + 5.0)
rx = rogue.receiver("a-rx")
shares = attribute_harmful_interference(rx, rogue, quantum=0)
print("harmful interference at a-rx, attributed proportionally (mW):")
for tx_id, share in sorted(shares.items()):
    print(f"  {tx_id}: {share:.3e}")
if not shares:
    print("  none: the receiver still clears its SINR threshold")
print()

obedient = with_entrant(cap)
consumed = quantify(tx_consumption("e1", obedient), grid, dims)
sheet = PriceSheet(rate=1.5)
print(f"obedient entrant consumes {consumed.value:.6f} W*m^2")
print(f"billed at 1.5 per W*m^2: {price(consumed, sheet):.6f}")
