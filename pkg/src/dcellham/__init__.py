"""dcellham: DCell topologies, Hamiltonian path constructions (including
fault-tolerant and partially-deployed variants), a brute-force certification
oracle, and broadcast simulation."""

__version__ = "0.1.0"
