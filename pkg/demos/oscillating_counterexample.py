"""Resolvents converge while envelopes do not.

On the line, ``f^n`` is the constant 0 for odd ``n`` and 1 for even ``n``.
Every resolvent is the identity, so the resolvent limit exists, but the
envelope values alternate and the Mosco check against the zero functional
finds a witness. Resolvent convergence alone therefore does not give Mosco
convergence. The same verdicts come from ``hadprox demo counterexample``.
"""

from hadprox import Euclidean, ModeSpec, ProxParams, TailWindow, limit_mode_check
from hadprox import moreau_envelope, mosco_check, zero
from hadprox.families import oscillating


def main():
    E = Euclidean(1)
    seq = oscillating(E, 0.0, 1.0)
    x = E.point(0.25)
    print("n   envelope at x=0.25, lam=1")
    for n in range(1, 9):
        print(f"{n:<3d} {moreau_envelope(seq[n], x, ProxParams(1.0)):.6f}")

    spec = ModeSpec("envelope", points=(x, E.point(2.0)), lambdas=(1.0, 0.1),
                    tail=TailWindow(16, 32, 1e-2))
    for mode in ("envelope", "prox"):
        v = limit_mode_check(seq, seq.limit, spec.with_mode(mode))
        print(f"{mode:>9} limit: {v.outcome.value} (residual {v.residual:.3g})")
    v = mosco_check(seq, zero(E), spec.with_mode("mosco"))
    print(f"    mosco vs 0: {v.outcome.value} (witness {v.witness})")


if __name__ == "__main__":
    main()
