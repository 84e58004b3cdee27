"""Charge-function verification toolkit for n-dimensional partitions.

Exact integer pole-order bookkeeping for the charge functions attached to
molten crystals (n-dimensional partitions), with independent cross-checking
oracles, executable structural lemmas, dense hypercube-ideal enumeration and
a command-line verification front end.
"""

from .lattice import add_dirs, charge_of_box, neighbor_degree, normalize, zero_charge
from .crystal import (Crystal, InvalidPartitionError, ProjectionCollisionError,
                      addable, bisect, dump_crystal, dumps_crystal, grow_random,
                      hypercube, is_crystal, load_crystal, loads_crystal,
                      removable, surface_membership, targets)
from .charge_engine import (Cluster, ClusterRule, Recipe, SingleRule,
                            UnsupportedDimensionError, WeightCollisionError,
                            WeightSystem, clusters_in, factor_multiset_oracle,
                            omega_at, omega_cluster_between, potential,
                            recipe_for, residue_probe, spectrum_to_json)
from .lemma_suite import (LemmaReport, analytic_hc_identity, check_conjecture,
                          check_lemma1, check_lemma2, check_lemma3,
                          check_lemma4, check_lemma5, hypercube_G_shortcut,
                          in_G, random_crystal, run_conjecture_scan,
                          run_lemma_instances)
from .hypercube_lab import (DEDEKIND, CubeIdeal, StratumHistogram,
                            enumerate_ideals, sample_ideal, sample_scan,
                            stratified_scan)

__version__ = "0.1.0"
