"""Pure-Python kernels for level-indexed vector and matrix algebra.

Vectors are plain lists; matrices are lists of row lists.  All functions are
value-producing (inputs never mutated).  The compiled twin in ``_ckernels``
implements the same signatures; ``dynbicon.kernels`` picks one at import.

These kernels are duck-typed: entries only need ``+`` (used by the approximate
counter backend, whose entries are objects rather than ints).
"""

BACKEND = "python"


def vec_add(a, b):
    return [x + y for x, y in zip(a, b)]


def vec_or(a, b):
    return [x | y for x, y in zip(a, b)]


def vec_splice(a, k, b):
    return a[:k] + b[k:]


def vec_is_zero(a):
    for x in a:
        if x:
            return False
    return True


def mat_splice(m, k, n):
    return m[:k] + n[k:]


def mat_addvector(m, v, r):
    out = list(m)
    out[r] = vec_add(m[r], v)
    return out


def mat_orvector(m, v, r):
    out = list(m)
    out[r] = vec_or(m[r], v)
    return out


def mat_sum(m):
    it = iter(m)
    acc = list(next(it))
    for row in it:
        for j, x in enumerate(row):
            acc[j] = acc[j] + x
    return acc


def mat_or(m):
    it = iter(m)
    acc = list(next(it))
    for row in it:
        for j, x in enumerate(row):
            acc[j] = acc[j] | x
    return acc


def mat_uppersum(m):
    # out[j] = sum of m[i][j] for i >= j
    size = len(m)
    out = [None] * size
    for j in range(size):
        acc = m[j][j]
        for i in range(j + 1, size):
            acc = acc + m[i][j]
        out[j] = acc
    return out


def mat_upperor(m):
    size = len(m)
    out = [0] * size
    for j in range(size):
        acc = m[j][j]
        for i in range(j + 1, size):
            acc = acc | m[i][j]
        out[j] = acc
    return out
