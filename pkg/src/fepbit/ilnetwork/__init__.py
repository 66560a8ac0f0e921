from .gates import (TRUTH_TABLES, GateReport, InfeasibleGateError, IsingGate, all_states,
                    ising_energy, library_gate, synthesize_gate, synthesize_with_ancilla,
                    verify_gate)
from .circuit import (CircuitBuilder, IsingCircuit, clamp_product, compose_multiplier, energy,
                      enumerate_ground_states, iand_circuit, single_gate_circuit)
from .sampler import (PBitResponse, SolutionHistogram, descend, factor_pairs, factorize,
                      pbit_update, run_network, sweep, wrong_basin_state)
from .netlist import emit_netlist, parse_netlist
