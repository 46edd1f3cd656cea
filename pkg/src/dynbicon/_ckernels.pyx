# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled kernels for level-indexed vector/matrix algebra.

Mirrors dynbicon._pykernels exactly, restricted to int entries (counter
values are vertex counts, far below 2**63).  Vectors stay plain Python
lists so callers are backend-agnostic; the win is C-level loops and
preallocated result lists.
"""

from cpython.list cimport PyList_New, PyList_SET_ITEM, PyList_GET_ITEM, PyList_GET_SIZE
from cpython.ref cimport Py_INCREF

BACKEND = "cython"


cdef inline list _new_from_longs(long long* buf, Py_ssize_t size):
    cdef list out = PyList_New(size)
    cdef Py_ssize_t i
    cdef object v
    for i in range(size):
        v = buf[i]
        Py_INCREF(v)
        PyList_SET_ITEM(out, i, v)
    return out


def vec_add(list a, list b):
    cdef Py_ssize_t i, size = PyList_GET_SIZE(a)
    cdef list out = PyList_New(size)
    cdef object v
    for i in range(size):
        v = (<object>PyList_GET_ITEM(a, i)) + (<object>PyList_GET_ITEM(b, i))
        Py_INCREF(v)
        PyList_SET_ITEM(out, i, v)
    return out


def vec_or(list a, list b):
    cdef Py_ssize_t i, size = PyList_GET_SIZE(a)
    cdef list out = PyList_New(size)
    cdef object v
    for i in range(size):
        v = (<object>PyList_GET_ITEM(a, i)) | (<object>PyList_GET_ITEM(b, i))
        Py_INCREF(v)
        PyList_SET_ITEM(out, i, v)
    return out


def vec_splice(list a, Py_ssize_t k, list b):
    return a[:k] + b[k:]


def vec_is_zero(list a):
    cdef Py_ssize_t i, size = PyList_GET_SIZE(a)
    for i in range(size):
        if <object>PyList_GET_ITEM(a, i):
            return False
    return True


def mat_splice(list m, Py_ssize_t k, list n):
    return m[:k] + n[k:]


def mat_addvector(list m, list v, Py_ssize_t r):
    cdef list out = list(m)
    out[r] = vec_add(<list>m[r], v)
    return out


def mat_orvector(list m, list v, Py_ssize_t r):
    cdef list out = list(m)
    out[r] = vec_or(<list>m[r], v)
    return out


def mat_sum(list m):
    cdef Py_ssize_t i, j, rows = PyList_GET_SIZE(m)
    cdef list row0 = <list>PyList_GET_ITEM(m, 0)
    cdef list acc = list(row0)
    cdef list row
    for i in range(1, rows):
        row = <list>PyList_GET_ITEM(m, i)
        for j in range(PyList_GET_SIZE(row)):
            acc[j] = (<object>acc[j]) + (<object>PyList_GET_ITEM(row, j))
    return acc


def mat_or(list m):
    cdef Py_ssize_t i, j, rows = PyList_GET_SIZE(m)
    cdef list acc = list(<list>PyList_GET_ITEM(m, 0))
    cdef list row
    for i in range(1, rows):
        row = <list>PyList_GET_ITEM(m, i)
        for j in range(PyList_GET_SIZE(row)):
            acc[j] = (<object>acc[j]) | (<object>PyList_GET_ITEM(row, j))
    return acc


def mat_uppersum(list m):
    cdef Py_ssize_t i, j, size = PyList_GET_SIZE(m)
    cdef list out = PyList_New(size)
    cdef object acc
    for j in range(size):
        acc = <object>PyList_GET_ITEM(<list>PyList_GET_ITEM(m, j), j)
        for i in range(j + 1, size):
            acc = acc + (<object>PyList_GET_ITEM(<list>PyList_GET_ITEM(m, i), j))
        Py_INCREF(acc)
        PyList_SET_ITEM(out, j, acc)
    return out


def mat_upperor(list m):
    cdef Py_ssize_t i, j, size = PyList_GET_SIZE(m)
    cdef list out = PyList_New(size)
    cdef object acc
    for j in range(size):
        acc = <object>PyList_GET_ITEM(<list>PyList_GET_ITEM(m, j), j)
        for i in range(j + 1, size):
            acc = acc | (<object>PyList_GET_ITEM(<list>PyList_GET_ITEM(m, i), j))
        Py_INCREF(acc)
        PyList_SET_ITEM(out, j, acc)
    return out
