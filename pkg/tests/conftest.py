import random

import pytest

from endoring import Curve, PrimeField, trace


def curves_with_trace(p: int, t: int, limit: int | None = None):
    """All (curve, fd) over F_p with the given Frobenius trace, scanning (a, b)."""
    F = PrimeField(p)
    out = []
    for a in range(p):
        for b in range(p):
            try:
                E = Curve(F, a, b)
            except Exception:
                continue
            fd = trace(E)
            if fd.t == t:
                out.append((E, fd))
                if limit is not None and len(out) >= limit:
                    return out
    return out


@pytest.fixture(scope="session")
def rng():
    return random.Random(0xDECAF)


@pytest.fixture(scope="session")
def e11(dummy=None):
    """The worked example: y^2 = x^3 + x + 1 over F_11 (t = -2, Delta = -40)."""
    F = PrimeField(11)
    E = Curve(F, 1, 1)
    return E, trace(E)


@pytest.fixture(scope="session")
def family_f31():
    """The Delta = -108 family: all t = 4 curves over F_31."""
    return curves_with_trace(31, 4)
