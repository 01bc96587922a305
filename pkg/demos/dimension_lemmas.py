"""
Binarised classes never shatter more than the class itself
===========================================================

For random small classes, compare the graph dimension of H with the VC
dimension of every level-set class H_v and of its true-positive class.
"""

import numpy as np

from multical import binarize_class, check_lemma_graph, check_lemma_phi
from multical.synthetic import random_predictor_class

rng = np.random.default_rng(0)
domain = [f"x{i}" for i in range(5)]
Y = [0.2, 0.5, 0.8]

for trial in range(5):
    H = random_predictor_class(domain, Y, 6, rng)
    g = check_lemma_graph(H, domain, Y)
    phi = [check_lemma_phi(binarize_class(H, v), domain).vc_true_positive for v in Y]
    print(f"d_G={g.graph_dimension}  VC(H_v)={list(g.vc_by_value.values())}  VC(Phi)={phi}")
