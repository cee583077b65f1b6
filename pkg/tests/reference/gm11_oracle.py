"""Regenerates the frozen GM(1,1) oracle constants used by the test suite.

Independent of the package under test: the normal equations are solved in
exact rational arithmetic (sympy) and the time-response restoration is
evaluated at 50 decimal digits (mpmath), then printed as shortest-repr
doubles for freezing into tests. Run with:

    python tests/reference/gm11_oracle.py
"""

import mpmath as mp
import sympy as sp

mp.mp.dps = 50

SEQUENCE = ["36.3", "36.8", "33.9", "34.6", "34.4", "34.8", "37.3", "37.4", "38.6", "39.5"]
HORIZON = 10


def main():
    A = [sp.Rational(s) for s in SEQUENCE]
    n = len(A)

    x1 = []
    s = sp.Integer(0)
    for v in A:
        s += v
        x1.append(s)

    # background values z(k) = (x1(k) + x1(k-1)) / 2 for k = 2..n
    z = [(x1[k] + x1[k - 1]) / 2 for k in range(1, n)]
    Y = A[1:]

    # exact least squares for Y = -a*z + u
    m = n - 1
    s_z = sum(z)
    s_zz = sum(v * v for v in z)
    s_y = sum(Y)
    s_zy = sum(zv * yv for zv, yv in zip(z, Y))
    den = m * s_zz - s_z * s_z
    slope = (m * s_zy - s_z * s_y) / den
    a = -slope
    u = (s_y - slope * s_z) / m

    def to_mp(q):
        return mp.mpf(q.p) / mp.mpf(q.q)

    am, um, first = to_mp(a), to_mp(u), to_mp(A[0])

    # accumulated time response F(i) = (A(1) - u/a) e^{-a(i-1)} + u/a, F(1) = A(1)
    total = n + HORIZON
    F = [first]
    for i in range(2, total + 1):
        F.append((first - um / am) * mp.e ** (-am * (i - 1)) + um / am)
    restored = [F[0]] + [F[i] - F[i - 1] for i in range(1, total)]

    fitted, forecast = restored[:n], restored[n:]
    originals = [to_mp(v) for v in A]
    q_stat = sum(abs((originals[k] - fitted[k]) / originals[k]) for k in range(n)) / n

    def as_double(x) -> str:
        return repr(float(mp.nstr(x, 25)))

    print("ORACLE_A =", as_double(am))
    print("ORACLE_U =", as_double(um))
    print("ORACLE_FITTED = [")
    for v in fitted:
        print(f"    {as_double(v)},")
    print("]")
    print("ORACLE_FORECAST = [")
    for v in forecast:
        print(f"    {as_double(v)},")
    print("]")
    print("ORACLE_Q =", as_double(q_stat))


if __name__ == "__main__":
    main()
