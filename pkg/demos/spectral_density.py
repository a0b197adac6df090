"""Probing a network's spectral density with one extra oscillator.

A squeezed probe is tuned across the normal-mode band of each benchmark
network; its photon-number drift after time t gives J(omega). The sweep is
printed next to the broadened discrete-mode reference, both normalized to
their maxima, as a coarse text plot.

Run: python demos/spectral_density.py [--network B] [--steps 40]
"""
import argparse

import numpy as np

from qcnet.dynamics import build_modes
from qcnet.fixtures import fixture
from qcnet.probing import ProbeSpec, probe_spectral_density, reference_spectral_density

ap = argparse.ArgumentParser()
ap.add_argument("--network", default="A")
ap.add_argument("--steps", type=int, default=40)
ap.add_argument("--t", type=float, default=300.0)
args = ap.parse_args()

net = fixture(args.network)
Om = build_modes(net).Omega
ws = np.linspace(Om.min() - 0.03, Om.max() + 0.03, args.steps)
spec = ProbeSpec(k=0.003, node=0, t=args.t)

samples = probe_spectral_density(net, spec, ws)
J = np.array([s.J for s in samples])
ref = reference_spectral_density(net, spec.node, spec.k, 2 / spec.t, ws)
J, ref = J / np.nanmax(J), ref / ref.max()

print(f"{net.name}, probe on node {spec.node}, k = {spec.k}, t = {spec.t}")
print(" omega_s   probe                           reference")
for w, a, b in zip(ws, J, ref):
    bar = lambda v: "#" * max(0, int(round(30 * v)))
    print(f" {w:.4f}  {bar(a):<30}  {bar(b)}")
print(f"{sum(s.valid for s in samples)}/{len(samples)} samples valid")
