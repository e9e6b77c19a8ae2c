"""Pure-Python arithmetic core: F_{p^k} coefficient vectors and curve points.

This is the fallback twin of the compiled core in ``_kernel_c``; the two are
selected at import time by ``endoring.backend`` and must produce identical
outputs. Field elements are little-endian coefficient tuples of length k,
reduced mod p; the extension modulus is a monic polynomial of degree k.
Points are ``(x, y)`` pairs of such tuples, with ``None`` for infinity.
"""

BACKEND_NAME = "python"


class FieldKernel:
    __slots__ = ("p", "k", "modulus", "_tail")

    def __init__(self, p, modulus):
        modulus = tuple(c % p for c in modulus[:-1]) + (1,)
        if len(modulus) < 2:
            raise ValueError("modulus must have degree >= 1")
        self.p = p
        self.k = len(modulus) - 1
        self.modulus = modulus
        self._tail = modulus[:-1]

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def from_int(self, c):
        return (c % self.p,) + (0,) * (self.k - 1)

    def is_zero(self, a):
        return not any(a)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        tail = self._tail
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i] % p
            if c:
                base = i - k
                for j in range(k):
                    prod[base + j] -= c * tail[j]
        return tuple(c % p for c in prod[:k])

    def sqr(self, a):
        return self.mul(a, a)

    def inv(self, a):
        p, k = self.p, self.k
        if k == 1:
            if a[0] == 0:
                raise ZeroDivisionError("inverse of zero field element")
            return (pow(a[0], p - 2, p),)
        # extended Euclid over F_p[x]
        r0 = list(self.modulus)
        r1 = [c % p for c in a]
        s0, s1 = [0], [1]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if not r1:
                raise ZeroDivisionError("inverse of zero field element")
            if len(r1) == 1:
                c = pow(r1[0], p - 2, p)
                out = [x * c % p for x in s1]
                out += [0] * (k - len(out))
                return tuple(out[:k])
            # r0 = q*r1 + r; degree of r1 >= 1 here
            inv_lead = pow(r1[-1], p - 2, p)
            r = list(r0)
            q = [0] * (len(r) - len(r1) + 1) if len(r) >= len(r1) else []
            while len(r) >= len(r1) and any(r):
                while r and r[-1] == 0:
                    r.pop()
                if len(r) < len(r1):
                    break
                c = r[-1] * inv_lead % p
                d = len(r) - len(r1)
                q[d] = c
                for j in range(len(r1)):
                    r[d + j] = (r[d + j] - c * r1[j]) % p
            # s = s0 - q*s1
            qs = [0] * (len(q) + len(s1) - 1) if q and s1 else [0]
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        qs[i + j] = (qs[i + j] + qi * sj) % p
            s = [0] * max(len(s0), len(qs))
            for i in range(len(s)):
                v = s0[i] if i < len(s0) else 0
                w = qs[i] if i < len(qs) else 0
                s[i] = (v - w) % p
            r0, r1 = r1, r
            s0, s1 = s1, s

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result


class CurveKernel:
    """Affine short-Weierstrass point arithmetic over a FieldKernel."""

    __slots__ = ("fk", "a", "b")

    def __init__(self, fk, a, b):
        self.fk = fk
        self.a = a
        self.b = b

    def on_curve(self, pt):
        if pt is None:
            return True
        fk = self.fk
        x, y = pt
        lhs = fk.mul(y, y)
        rhs = fk.add(fk.mul(fk.mul(x, x), x), fk.add(fk.mul(self.a, x), self.b))
        return lhs == rhs

    def neg(self, pt):
        if pt is None:
            return None
        return (pt[0], self.fk.neg(pt[1]))

    def add(self, pt1, pt2):
        if pt1 is None:
            return pt2
        if pt2 is None:
            return pt1
        fk = self.fk
        x1, y1 = pt1
        x2, y2 = pt2
        if x1 == x2:
            if y1 == fk.neg(y2):
                return None
            return self.dbl(pt1)
        lam = fk.mul(fk.sub(y2, y1), fk.inv(fk.sub(x2, x1)))
        x3 = fk.sub(fk.sub(fk.mul(lam, lam), x1), x2)
        y3 = fk.sub(fk.mul(lam, fk.sub(x1, x3)), y1)
        return (x3, y3)

    def dbl(self, pt):
        if pt is None:
            return None
        fk = self.fk
        x, y = pt
        if fk.is_zero(y):
            return None
        xx = fk.mul(x, x)
        num = fk.add(fk.add(xx, fk.add(xx, xx)), self.a)
        lam = fk.mul(num, fk.inv(fk.add(y, y)))
        x3 = fk.sub(fk.sub(fk.mul(lam, lam), x), x)
        y3 = fk.sub(fk.mul(lam, fk.sub(x, x3)), y)
        return (x3, y3)

    def smul(self, n, pt):
        if n < 0:
            n, pt = -n, self.neg(pt)
        result = None
        base = pt
        while n:
            if n & 1:
                result = self.add(result, base)
            n >>= 1
            if n:
                base = self.dbl(base)
        return result

    def multiples(self, pt, count):
        """[0*pt, 1*pt, ..., (count-1)*pt]."""
        out = [None]
        cur = None
        for _ in range(count - 1):
            cur = self.add(cur, pt)
            out.append(cur)
        return out
