"""Multi-execution information-flow enforcement over security lattices."""

from .closure import (closure_bruteforce, closure_size_profile, enumerate_closure, in_closure,
                      omega_family, upset_contains)
from .dclabels import DCLabel, DCLattice
from .enforcement import Program, check_noninterference, check_transparency, mef, mef_galois
from .galois import (GaloisConnection, canonicity_check, check_galois_laws, closure_to_galois,
                     compose_galois, dc_truncation_chain, kp_oracle, specify_unspecify, truncate_embed)
from .labeled import LabeledSet, equivalent_at, labels_of, project, select
from .lattices import (BOT, TOP, Discrete, Exponential, HSum, Lattice, NatChain, Powerset, Product,
                       TruncatedPowerset, TwoPoint, VSum, join_all, meet_all)

__version__ = "0.1.0"
