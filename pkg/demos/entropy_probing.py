"""Reading network structure from entanglement entropy.

Compares a scale-free and a random network in two ways: the ground-state
entropy of each node averaged by degree, and the entropy a weakly coupled
probe picks up as it is attached to more and more nodes (hubs first).

Run: python demos/entropy_probing.py
"""
import numpy as np

from qcnet.fixtures import fixture
from qcnet.netgraph import degrees
from qcnet.probing import connectivity_table, nested_subsets, probe_entropy_protocol

for fid, label in (("D", "scale-free"), ("C", "random")):
    net = fixture(fid)
    print(f"\n{label} network {net.name}")
    print("  degree  <S>      count")
    for h, mean, _, count in connectivity_table(net):
        print(f"  {h:>6}  {mean:.5f}  {count}")
    order = np.argsort(-np.asarray(degrees(net)), kind="stable")
    rows = probe_entropy_protocol(net, 0.25, 0.005, nested_subsets(list(order), 8))
    print("  probe entropy vs number of attached nodes:", " ".join(f"{s:.4f}" for _, s in rows))
