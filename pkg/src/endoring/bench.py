"""Benchmark the compiled arithmetic core against its pure-Python twin.

Run as ``python -m endoring.bench [--reps N]``. The workloads are the hot
paths of the CM-action walks: extension-field multiplication and inversion,
affine scalar multiplication, and a full degree-ell isogeny step.
"""

import argparse
import random
import time

from . import _kernel_py, backend

try:
    from . import _kernel_c
except ImportError:
    _kernel_c = None


def _time(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def _field_workloads(make_kernel, p, modulus, reps):
    fk = make_kernel(p, modulus)
    rng = random.Random(1)
    k = fk.k
    a = tuple(rng.randrange(1, p) for _ in range(k))
    b = tuple(rng.randrange(1, p) for _ in range(k))
    out = {}
    out["mul"] = _time(lambda: fk.mul(a, b), reps * 10)
    out["inv"] = _time(lambda: fk.inv(a), reps)
    e = (p**k - 1) // 2
    out["pow((s-1)/2)"] = _time(lambda: fk.pow(a, e), max(1, reps // 10))
    return fk, out


def _curve_workload(mod_kernel, fk, reps):
    rng = random.Random(2)
    p, k = fk.p, fk.k
    a = fk.from_int(2)
    # pick the curve through a random point: b = y^2 - x^3 - a x
    x = tuple(rng.randrange(p) for _ in range(k))
    y = tuple(rng.randrange(1, p) for _ in range(k))
    b = fk.sub(fk.mul(y, y), fk.add(fk.mul(fk.mul(x, x), x), fk.mul(a, x)))
    ck = mod_kernel.CurveKernel(fk, a, b)
    pt = (x, y)
    n = (p**k) // 3 + 12345
    return _time(lambda: ck.smul(n, pt), max(1, reps // 10))


def run(reps: int = 200) -> None:
    print(f"selected backend at import: {backend.backend_name()}")
    cases = [(313, 12), (1009, 30), (31, 6)]
    for p, k in cases:
        from .field import ext_make, PrimeField

        modulus = ext_make(PrimeField(p), k).modulus
        print(f"\nF_{p}^{k}:")
        rows = []
        fkp, py_times = _field_workloads(_kernel_py.FieldKernel, p, modulus, reps)
        py_times["smul"] = _curve_workload(_kernel_py, fkp, reps)
        if _kernel_c is not None:
            fkc, c_times = _field_workloads(_kernel_c.FieldKernel, p, modulus, reps)
            c_times["smul"] = _curve_workload(_kernel_c, fkc, reps)
        else:
            c_times = None
        for name in ("mul", "inv", "pow((s-1)/2)", "smul"):
            line = f"  {name:<14} python {py_times[name] * 1e6:10.1f} us"
            if c_times:
                speedup = py_times[name] / c_times[name]
                line += f"   c {c_times[name] * 1e6:10.1f} us   speedup {speedup:6.1f}x"
            rows.append(line)
        print("\n".join(rows))
    if _kernel_c is None:
        print("\ncompiled kernel not built; showing pure-Python timings only")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=200)
    args = ap.parse_args()
    run(args.reps)


if __name__ == "__main__":  # pragma: no cover
    main()
