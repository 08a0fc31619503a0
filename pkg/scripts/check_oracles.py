"""Compare simulated metrics with closed-form expectations and print a table.

Three checks:
  * resonant, lossless latency against pi / (sqrt(2) * 2 pi g)
  * dispersive latency against pi * Delta / (2 g^2) (angular units)
  * the adaptive integrator against the dense matrix exponential
"""

import math

import numpy as np

from wgqed import SystemParams, evolve, evolve_expm, initial_state, simulate_transfer

TWO_PI = 2 * math.pi


def resonant():
    print("resonant lossless latency")
    print(f"{'g [GHz]':>8} {'latency [ns]':>14} {'analytic':>14} {'rel err':>10} {'fidelity':>12}")
    for g in (0.05, 0.1, 0.2, 0.5, 1.0):
        m = simulate_transfer(SystemParams(g_qw=g))
        exact = math.pi / (math.sqrt(2) * TWO_PI * g)
        print(f"{g:8.3f} {m.latency:14.9f} {exact:14.9f} {m.latency / exact - 1:10.2e} {m.fidelity:12.10f}")


def dispersive():
    print("\ndispersive latency (lossless)")
    print(f"{'w_w':>5} {'g':>6} {'D/g':>5} {'latency [ns]':>13} {'oracle':>10} {'rel err':>9}")
    for omega_w, g in [(7, 0.1), (7, 0.05), (8, 0.1), (10, 0.2), (10, 0.1), (20, 0.5)]:
        delta = omega_w - 6.0
        m = simulate_transfer(SystemParams(omega_w=omega_w, g_qw=g))
        oracle = math.pi * TWO_PI * delta / (2 * (TWO_PI * g) ** 2)
        print(f"{omega_w:5.1f} {g:6.3f} {delta / g:5.0f} {m.latency:13.4f} {oracle:10.4f} {m.latency / oracle - 1:9.4f}")


def integrator(draws=20, seed=2024):
    print("\nadaptive integrator vs matrix exponential")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        p = SystemParams(omega_w=rng.uniform(6, 50), g_qw=rng.uniform(0.05, 1),
                         gamma=10 ** rng.uniform(-3, 0), kappa=10 ** rng.uniform(-3, 0))
        times = np.sort(rng.uniform(0, 50, 10))
        traj = evolve(initial_state(p.space), p, np.concatenate([[0.0], times]))
        err = max(float(np.max(np.abs(r - evolve_expm(initial_state(p.space), p, t))))
                  for t, r in zip(times, traj.states[1:]))
        worst = max(worst, err)
    print(f"max elementwise difference over {draws} draws: {worst:.3e}")


if __name__ == "__main__":
    resonant()
    dispersive()
    integrator()
