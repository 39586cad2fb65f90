"""Watching ``|x - 1/n|`` converge to ``|x|`` in every mode.

Prints the envelope gap ``|f^n_lam(x) - f_lam(x)|`` on a growing tail,
then runs the main equivalence check, which tests that Mosco convergence
holds exactly when envelopes and resolvents converge.
"""

from hadprox import Distance, Euclidean, ModeSpec, ProxParams, TailWindow, moreau_envelope
from hadprox import theorem_verify
from hadprox.families import shifted_abs


def main():
    E = Euclidean(1)
    seq = shifted_abs(E)
    f = Distance(E.origin())
    x = E.point(0.3)
    print("n      envelope gap at x=0.3, lam=0.5")
    for n in (1, 4, 16, 64, 256):
        params = ProxParams(0.5)
        gap = abs(moreau_envelope(seq[n], x, params) - moreau_envelope(f, x, params))
        print(f"{n:<6d} {gap:.3e}")

    spec = ModeSpec("mosco", points=(x, E.point(-1.0), E.point(2.0)), lambdas=(1.0, 0.5),
                    tail=TailWindow(32, 64, 5e-2))
    rep = theorem_verify("mainthm", seq, f, spec)
    for name, v in rep.sub_checks():
        print(f"{name:<28} {v.outcome.value}")
    print("overall:", rep.outcome.value)


if __name__ == "__main__":
    main()
