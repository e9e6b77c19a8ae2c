# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic core: F_{p^k} coefficient vectors and curve points.

Twin of ``_kernel_py`` with identical semantics; selected at import time by
``endoring.backend``. Requires p < 2^20 so schoolbook accumulation stays in
int64 (the backend falls back to the pure-Python core otherwise).
"""

from cpython.mem cimport PyMem_Malloc, PyMem_Free
from libc.stdint cimport int64_t
from libc.string cimport memcpy, memset

BACKEND_NAME = "c"


cdef int64_t _powmod(int64_t base, int64_t e, int64_t p) nogil:
    cdef int64_t r = 1 % p
    base %= p
    while e:
        if e & 1:
            r = r * base % p
        base = base * base % p
        e >>= 1
    return r


cdef class FieldKernel:
    cdef readonly int64_t p
    cdef readonly int k
    cdef readonly tuple modulus
    cdef int64_t* tail  # low k coefficients of the monic modulus

    def __cinit__(self, p, modulus):
        cdef int i
        if p >= (1 << 20) or p < 2:
            raise ValueError("compiled kernel requires 2 <= p < 2^20")
        if len(modulus) < 2 or len(modulus) > 4097:
            raise ValueError("modulus degree out of range")
        self.p = p
        self.k = len(modulus) - 1
        mod = tuple(int(c) % int(p) for c in tuple(modulus)[:-1]) + (1,)
        self.modulus = mod
        self.tail = <int64_t*> PyMem_Malloc(self.k * sizeof(int64_t))
        if self.tail == NULL:
            raise MemoryError()
        for i in range(self.k):
            self.tail[i] = mod[i]

    def __dealloc__(self):
        if self.tail != NULL:
            PyMem_Free(self.tail)

    # -- tuple <-> buffer ----------------------------------------------------

    cdef int _load(self, object a, int64_t* buf) except -1:
        cdef int i
        if len(<tuple> a) != self.k:
            raise ValueError("element has wrong length")
        for i in range(self.k):
            buf[i] = <int64_t> (<tuple> a)[i]
        return 0

    cdef tuple _store(self, int64_t* buf):
        cdef int i
        cdef list out = [0] * self.k
        for i in range(self.k):
            out[i] = buf[i]
        return tuple(out)

    # -- C-level ops ----------------------------------------------------------

    cdef void c_add(self, int64_t* a, int64_t* b, int64_t* out) nogil:
        cdef int i
        cdef int64_t v
        for i in range(self.k):
            v = a[i] + b[i]
            if v >= self.p:
                v -= self.p
            out[i] = v

    cdef void c_sub(self, int64_t* a, int64_t* b, int64_t* out) nogil:
        cdef int i
        cdef int64_t v
        for i in range(self.k):
            v = a[i] - b[i]
            if v < 0:
                v += self.p
            out[i] = v

    cdef void c_neg(self, int64_t* a, int64_t* out) nogil:
        cdef int i
        for i in range(self.k):
            out[i] = 0 if a[i] == 0 else self.p - a[i]

    cdef bint c_is_zero(self, int64_t* a) nogil:
        cdef int i
        for i in range(self.k):
            if a[i]:
                return 0
        return 1

    cdef void c_mul(self, int64_t* a, int64_t* b, int64_t* out, int64_t* scratch) nogil:
        # scratch: length 2k-1
        cdef int i, j, base
        cdef int64_t ai, c
        cdef int k = self.k
        cdef int64_t p = self.p
        if k == 1:
            out[0] = a[0] * b[0] % p
            return
        for i in range(2 * k - 1):
            scratch[i] = 0
        for i in range(k):
            ai = a[i]
            if ai:
                for j in range(k):
                    scratch[i + j] += ai * b[j]
        for i in range(2 * k - 2, k - 1, -1):
            c = scratch[i] % p
            if c < 0:
                c += p
            if c:
                base = i - k
                for j in range(k):
                    scratch[base + j] -= c * self.tail[j]
        for i in range(k):
            c = scratch[i] % p
            if c < 0:
                c += p
            out[i] = c

    cdef int c_inv(self, int64_t* a, int64_t* out) except -1:
        """Extended Euclid over F_p[x]; raises ZeroDivisionError on zero."""
        cdef int k = self.k
        cdef int64_t p = self.p
        cdef int i, j, dr0, dr1, d
        cdef int64_t c, inv_lead
        if k == 1:
            if a[0] == 0:
                raise ZeroDivisionError("inverse of zero field element")
            out[0] = _powmod(a[0], p - 2, p)
            return 0
        buf = <int64_t*> PyMem_Malloc(4 * (k + 1) * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        cdef int64_t* r0 = buf
        cdef int64_t* r1 = buf + (k + 1)
        cdef int64_t* s0 = buf + 2 * (k + 1)
        cdef int64_t* s1 = buf + 3 * (k + 1)
        cdef int64_t* swp
        try:
            for i in range(k):
                r0[i] = self.tail[i]
                r1[i] = a[i]
                s0[i] = 0
                s1[i] = 0
            r0[k] = 1
            r1[k] = 0
            s0[k] = 0
            s1[k] = 0
            s1[0] = 1
            dr0 = k
            while True:
                dr1 = -1
                for i in range(k, -1, -1):
                    if r1[i]:
                        dr1 = i
                        break
                if dr1 < 0:
                    raise ZeroDivisionError("inverse of zero field element")
                if dr1 == 0:
                    c = _powmod(r1[0], p - 2, p)
                    for i in range(k):
                        out[i] = s1[i] * c % p
                    return 0
                inv_lead = _powmod(r1[dr1], p - 2, p)
                # r0 -= q * r1 ; s0 -= q * s1 (q accumulated coefficient-wise)
                while dr0 >= dr1:
                    c = r0[dr0] % p
                    if c == 0:
                        dr0 -= 1
                        if dr0 < 0:
                            break
                        continue
                    c = c * inv_lead % p
                    d = dr0 - dr1
                    for j in range(dr1 + 1):
                        r0[d + j] = (r0[d + j] - c * r1[j]) % p
                        if r0[d + j] < 0:
                            r0[d + j] += p
                    for j in range(k + 1 - d):
                        s0[d + j] = (s0[d + j] - c * s1[j]) % p
                        if s0[d + j] < 0:
                            s0[d + j] += p
                    while dr0 >= 0 and r0[dr0] == 0:
                        dr0 -= 1
                    if dr0 < 0:
                        break
                # swap (r0, s0) <-> (r1, s1)
                dr0 = dr1
                swp = r0
                r0 = r1
                r1 = swp
                swp = s0
                s0 = s1
                s1 = swp
        finally:
            PyMem_Free(buf)

    # -- Python-facing API (tuples) -------------------------------------------

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def from_int(self, c):
        return (int(c) % int(self.p),) + (0,) * (self.k - 1)

    def is_zero(self, a):
        return not any(a)

    def add(self, a, b):
        cdef int64_t* buf = <int64_t*> PyMem_Malloc(3 * self.k * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        try:
            self._load(a, buf)
            self._load(b, buf + self.k)
            self.c_add(buf, buf + self.k, buf + 2 * self.k)
            return self._store(buf + 2 * self.k)
        finally:
            PyMem_Free(buf)

    def sub(self, a, b):
        cdef int64_t* buf = <int64_t*> PyMem_Malloc(3 * self.k * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        try:
            self._load(a, buf)
            self._load(b, buf + self.k)
            self.c_sub(buf, buf + self.k, buf + 2 * self.k)
            return self._store(buf + 2 * self.k)
        finally:
            PyMem_Free(buf)

    def neg(self, a):
        cdef int64_t* buf = <int64_t*> PyMem_Malloc(2 * self.k * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        try:
            self._load(a, buf)
            self.c_neg(buf, buf + self.k)
            return self._store(buf + self.k)
        finally:
            PyMem_Free(buf)

    def mul(self, a, b):
        cdef int64_t* buf = <int64_t*> PyMem_Malloc((5 * self.k - 1) * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        try:
            self._load(a, buf)
            self._load(b, buf + self.k)
            self.c_mul(buf, buf + self.k, buf + 2 * self.k, buf + 3 * self.k)
            return self._store(buf + 2 * self.k)
        finally:
            PyMem_Free(buf)

    def sqr(self, a):
        return self.mul(a, a)

    def inv(self, a):
        cdef int64_t* buf = <int64_t*> PyMem_Malloc(2 * self.k * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        try:
            self._load(a, buf)
            self.c_inv(buf, buf + self.k)
            return self._store(buf + self.k)
        finally:
            PyMem_Free(buf)

    def pow(self, a, e):
        cdef int64_t* buf = <int64_t*> PyMem_Malloc((6 * self.k - 1) * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        cdef int64_t* res = buf
        cdef int64_t* base = buf + self.k
        cdef int64_t* tmp = buf + 2 * self.k
        cdef int64_t* scratch = buf + 3 * self.k
        cdef int i
        try:
            if e < 0:
                inv = self.inv(a)
                self._load(inv, base)
                e = -e
            else:
                self._load(a, base)
            memset(res, 0, self.k * sizeof(int64_t))
            res[0] = 1 % self.p
            while e:
                if e & 1:
                    self.c_mul(res, base, tmp, scratch)
                    memcpy(res, tmp, self.k * sizeof(int64_t))
                e >>= 1
                if e:
                    self.c_mul(base, base, tmp, scratch)
                    memcpy(base, tmp, self.k * sizeof(int64_t))
            return self._store(res)
        finally:
            PyMem_Free(buf)


cdef class CurveKernel:
    """Affine short-Weierstrass point arithmetic over a FieldKernel."""

    cdef readonly FieldKernel fk
    cdef int64_t* a
    cdef int64_t* b

    def __cinit__(self, FieldKernel fk, a, b):
        self.fk = fk
        self.a = <int64_t*> PyMem_Malloc(2 * fk.k * sizeof(int64_t))
        if self.a == NULL:
            raise MemoryError()
        self.b = self.a + fk.k
        fk._load(a, self.a)
        fk._load(b, self.b)

    def __dealloc__(self):
        if self.a != NULL:
            PyMem_Free(self.a)

    # workspace layout for point ops: 7 field slots + mul scratch (2k-1)
    cdef int64_t* _ws(self) except NULL:
        cdef int64_t* ws = <int64_t*> PyMem_Malloc((9 * self.fk.k - 1) * sizeof(int64_t))
        if ws == NULL:
            raise MemoryError()
        return ws

    cdef int c_dbl(self, int64_t* x, int64_t* y, int64_t* ox, int64_t* oy, int64_t* ws) except -1:
        """(ox, oy) = 2*(x, y); returns 1 when the result is infinity."""
        cdef FieldKernel fk = self.fk
        cdef int k = fk.k
        cdef int64_t* num = ws
        cdef int64_t* den = ws + k
        cdef int64_t* lam = ws + 2 * k
        cdef int64_t* t = ws + 3 * k
        cdef int64_t* x3 = ws + 4 * k
        cdef int64_t* scratch = ws + 5 * k
        if fk.c_is_zero(y):
            return 1
        fk.c_mul(x, x, t, scratch)           # x^2
        fk.c_add(t, t, num)
        fk.c_add(num, t, num)                # 3x^2
        fk.c_add(num, self.a, num)           # + a
        fk.c_add(y, y, den)                  # 2y
        self.fk.c_inv(den, t)
        fk.c_mul(num, t, lam, scratch)
        fk.c_mul(lam, lam, t, scratch)       # lam^2
        fk.c_sub(t, x, t)
        fk.c_sub(t, x, x3)                   # x3
        fk.c_sub(x, x3, t)
        fk.c_mul(lam, t, t, scratch)
        fk.c_sub(t, y, oy)
        memcpy(ox, x3, k * sizeof(int64_t))
        return 0

    cdef int c_padd(self, int64_t* x1, int64_t* y1, int64_t* x2, int64_t* y2,
                    int64_t* ox, int64_t* oy, int64_t* ws) except -1:
        """(ox, oy) = (x1,y1) + (x2,y2), both affine; 1 when infinity."""
        cdef FieldKernel fk = self.fk
        cdef int k = fk.k
        cdef int64_t* num = ws
        cdef int64_t* den = ws + k
        cdef int64_t* lam = ws + 2 * k
        cdef int64_t* t = ws + 3 * k
        cdef int64_t* x3 = ws + 4 * k
        cdef int64_t* scratch = ws + 5 * k
        cdef int i
        cdef bint same_x = 1
        for i in range(k):
            if x1[i] != x2[i]:
                same_x = 0
                break
        if same_x:
            fk.c_neg(y2, t)
            for i in range(k):
                if y1[i] != t[i]:
                    break
            else:
                return 1
            return self.c_dbl(x1, y1, ox, oy, ws)
        fk.c_sub(y2, y1, num)
        fk.c_sub(x2, x1, den)
        self.fk.c_inv(den, t)
        fk.c_mul(num, t, lam, scratch)
        fk.c_mul(lam, lam, t, scratch)
        fk.c_sub(t, x1, t)
        fk.c_sub(t, x2, x3)
        fk.c_sub(x1, x3, t)
        fk.c_mul(lam, t, t, scratch)
        fk.c_sub(t, y1, oy)
        memcpy(ox, x3, k * sizeof(int64_t))
        return 0

    # -- Python-facing API -----------------------------------------------------

    def on_curve(self, pt):
        if pt is None:
            return True
        cdef FieldKernel fk = self.fk
        cdef int k = fk.k
        cdef int64_t* buf = <int64_t*> PyMem_Malloc((6 * k - 1) * sizeof(int64_t))
        if buf == NULL:
            raise MemoryError()
        try:
            fk._load(pt[0], buf)
            fk._load(pt[1], buf + k)
            fk.c_mul(buf + k, buf + k, buf + 2 * k, buf + 4 * k)  # y^2
            fk.c_mul(buf, buf, buf + 3 * k, buf + 4 * k)          # x^2
            fk.c_mul(buf + 3 * k, buf, buf + 3 * k, buf + 4 * k)  # x^3
            fk.c_mul(self.a, buf, buf + k, buf + 4 * k)           # a*x
            fk.c_add(buf + 3 * k, buf + k, buf + 3 * k)
            fk.c_add(buf + 3 * k, self.b, buf + 3 * k)
            for i in range(k):
                if buf[2 * k + i] != buf[3 * k + i]:
                    return False
            return True
        finally:
            PyMem_Free(buf)

    def neg(self, pt):
        if pt is None:
            return None
        return (pt[0], self.fk.neg(pt[1]))

    def add(self, pt1, pt2):
        if pt1 is None:
            return pt2
        if pt2 is None:
            return pt1
        cdef FieldKernel fk = self.fk
        cdef int k = fk.k
        cdef int64_t* bufs = <int64_t*> PyMem_Malloc(6 * k * sizeof(int64_t))
        if bufs == NULL:
            raise MemoryError()
        cdef int64_t* ws = NULL
        cdef int inf
        try:
            ws = self._ws()
            fk._load(pt1[0], bufs)
            fk._load(pt1[1], bufs + k)
            fk._load(pt2[0], bufs + 2 * k)
            fk._load(pt2[1], bufs + 3 * k)
            inf = self.c_padd(bufs, bufs + k, bufs + 2 * k, bufs + 3 * k,
                              bufs + 4 * k, bufs + 5 * k, ws)
            if inf:
                return None
            return (fk._store(bufs + 4 * k), fk._store(bufs + 5 * k))
        finally:
            if ws != NULL:
                PyMem_Free(ws)
            PyMem_Free(bufs)

    def dbl(self, pt):
        return self.add(pt, pt)

    def smul(self, n, pt):
        if pt is None or n == 0:
            return None
        cdef FieldKernel fk = self.fk
        cdef int k = fk.k
        if n < 0:
            n = -n
            pt = (pt[0], fk.neg(pt[1]))
        cdef int64_t* bufs = <int64_t*> PyMem_Malloc(6 * k * sizeof(int64_t))
        if bufs == NULL:
            raise MemoryError()
        cdef int64_t* rx = bufs
        cdef int64_t* ry = bufs + k
        cdef int64_t* bx = bufs + 2 * k
        cdef int64_t* by = bufs + 3 * k
        cdef int64_t* tx = bufs + 4 * k
        cdef int64_t* ty = bufs + 5 * k
        cdef int64_t* ws = NULL
        cdef bint r_inf = 1
        cdef int inf
        try:
            ws = self._ws()
            fk._load(pt[0], bx)
            fk._load(pt[1], by)
            while n:
                if n & 1:
                    if r_inf:
                        memcpy(rx, bx, k * sizeof(int64_t))
                        memcpy(ry, by, k * sizeof(int64_t))
                        r_inf = 0
                    else:
                        inf = self.c_padd(rx, ry, bx, by, tx, ty, ws)
                        if inf:
                            r_inf = 1
                        else:
                            memcpy(rx, tx, k * sizeof(int64_t))
                            memcpy(ry, ty, k * sizeof(int64_t))
                n >>= 1
                if n:
                    inf = self.c_dbl(bx, by, tx, ty, ws)
                    if inf:
                        # base became infinity: remaining bits contribute nothing
                        break
                    memcpy(bx, tx, k * sizeof(int64_t))
                    memcpy(by, ty, k * sizeof(int64_t))
            if r_inf:
                return None
            return (fk._store(rx), fk._store(ry))
        finally:
            if ws != NULL:
                PyMem_Free(ws)
            PyMem_Free(bufs)

    def multiples(self, pt, count):
        """[0*pt, 1*pt, ..., (count-1)*pt]."""
        cdef FieldKernel fk = self.fk
        cdef int k = fk.k
        cdef list out = [None]
        if count <= 1:
            return out
        if pt is None:
            return out + [None] * (count - 1)
        cdef int64_t* bufs = <int64_t*> PyMem_Malloc(6 * k * sizeof(int64_t))
        if bufs == NULL:
            raise MemoryError()
        cdef int64_t* cx = bufs
        cdef int64_t* cy = bufs + k
        cdef int64_t* px = bufs + 2 * k
        cdef int64_t* py = bufs + 3 * k
        cdef int64_t* tx = bufs + 4 * k
        cdef int64_t* ty = bufs + 5 * k
        cdef int64_t* ws = NULL
        cdef bint cur_inf = 1
        cdef int inf, i
        try:
            ws = self._ws()
            fk._load(pt[0], px)
            fk._load(pt[1], py)
            for i in range(count - 1):
                if cur_inf:
                    memcpy(cx, px, k * sizeof(int64_t))
                    memcpy(cy, py, k * sizeof(int64_t))
                    cur_inf = 0
                else:
                    inf = self.c_padd(cx, cy, px, py, tx, ty, ws)
                    if inf:
                        cur_inf = 1
                    else:
                        memcpy(cx, tx, k * sizeof(int64_t))
                        memcpy(cy, ty, k * sizeof(int64_t))
                out.append(None if cur_inf else (fk._store(cx), fk._store(cy)))
            return out
        finally:
            if ws != NULL:
                PyMem_Free(ws)
            PyMem_Free(bufs)
