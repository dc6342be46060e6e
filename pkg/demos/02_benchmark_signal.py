#!/usr/bin/env python3
"""The built-in benchmark signal and its two parameter coordinate systems.

A four-harmonic signal with known frequencies is linear in the
interleaved (b, c) = (a cos phi, a sin phi) parameters, which is what
makes LMS-style adaptation applicable; results are reported in the
amplitude/phase coordinates.
"""

import numpy as np

from lmslab import aphi_from_bc, bc_from_aphi, benchmark_spec, regressor, synthesize

spec, truth = benchmark_spec(noise_std=0.5)

print("benchmark harmonics:")
for k, (a, w, p) in enumerate(zip(spec.amplitudes, spec.frequencies, spec.phases), start=1):
    print(f"  {k}: amplitude {a:4.1f}, angular frequency {w:4.2f} rad/sample, phase {p:4.2f} rad")

print()
print("truth in amplitude/phase order:", truth.theta_aphi)
print("truth in interleaved (b, c):   ", np.round(truth.theta_bc, 4))
print("round trip through the transforms:",
      np.allclose(aphi_from_bc(truth.theta_bc), truth.theta_aphi, atol=1e-12))

print()
print("regressor rows psi(n) = [sin w1 n, cos w1 n, ...] for n = 1..3:")
for n in (1, 2, 3):
    print(f"  psi({n}) =", np.round(regressor(spec.frequencies, n), 4))
print("||psi(n)||^2 equals the harmonic count:",
      float((regressor(spec.frequencies, 123) ** 2).sum()))

print()
print("clean samples y(n) = psi(n) . theta_bc for n = 1..8:")
clean = [synthesize(spec, n, 0.0) for n in range(1, 9)]
print(" ", np.round(clean, 4))

rng = np.random.default_rng(7)
noisy = [synthesize(spec, n, rng.normal(0, spec.noise_std)) for n in range(1, 9)]
print("with injected Gaussian noise (std 0.5):")
print(" ", np.round(noisy, 4))
