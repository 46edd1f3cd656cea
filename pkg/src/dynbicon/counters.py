"""Level-indexed counters, bits, and their vector/matrix algebra.

Counters are nonnegative integers that are added and compared but never
subtracted; forgoing subtraction is what lets the approximate backend and
the prefix-splice tricks upstream stay sound.  A vector has a fixed length
``size`` (one slot per level); a matrix is ``size`` rows of that length.

The supported operations are exactly:

* vectors: element-wise add (or, for bits), splice (prefix of one vector,
  suffix of another), element get/set;
* matrices: add (or) a vector to one row, splice (row prefix/suffix),
  column sum and column upper sum (``out[j] = reduce over rows i >= j``).

Hot code paths elsewhere in the package use the raw list form of these
values through :mod:`dynbicon.kernels`; the classes here are the typed
public surface over the same kernels.

The exact integer backend is the default.  :class:`ApproxCounter` is an
opt-in entry type implementing rounded-down floating-point addition (a
``b``-bit mantissa and ``s``-bit exponent); vectors over it go through the
duck-typed pure-Python kernels.
"""

from fractions import Fraction

from dynbicon import _pykernels
from dynbicon import kernels as K

# When set (tests), every constructed integer counter entry is checked
# against this cap; all counted quantities are vertex counts <= n.
DEBUG_CAP = None


class UsageError(Exception):
    """A caller violated an operation's contract."""


def _check_entries(entries):
    if DEBUG_CAP is not None:
        for x in entries:
            if isinstance(x, int) and not 0 <= x <= DEBUG_CAP:
                raise AssertionError(f"counter entry {x} outside [0, {DEBUG_CAP}]")


def _pick_kernels(entries):
    for x in entries:
        if not isinstance(x, int):
            return _pykernels
    return K


class CounterVec:
    """Fixed-length vector of counters."""

    __slots__ = ("entries", "_k")

    def __init__(self, size=None, entries=None):
        if entries is None:
            entries = [0] * size
        else:
            entries = list(entries)
            if size is not None and len(entries) != size:
                raise UsageError("entries do not match requested size")
        _check_entries(entries)
        self.entries = entries
        self._k = _pick_kernels(entries)

    @classmethod
    def zeros(cls, size):
        return cls(size)

    @classmethod
    def ones(cls, size):
        return cls(entries=[1] * size)

    def _wrap(self, entries):
        out = CounterVec.__new__(CounterVec)
        out.entries = entries
        out._k = self._k
        _check_entries(entries)
        return out

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def set(self, i, value):
        self.entries[i] = value
        _check_entries(self.entries)

    def add(self, other):
        if len(other) != len(self):
            raise UsageError("vector length mismatch")
        return self._wrap(self._k.vec_add(self.entries, other.entries))

    __add__ = add

    def splice(self, k, other):
        if len(other) != len(self):
            raise UsageError("vector length mismatch")
        if not 0 <= k <= len(self):
            raise UsageError("splice index out of range")
        return self._wrap(self._k.vec_splice(self.entries, k, other.entries))

    def copy(self):
        return self._wrap(list(self.entries))

    def __eq__(self, other):
        return isinstance(other, CounterVec) and self.entries == other.entries

    def __repr__(self):
        return f"CounterVec({self.entries})"


class CounterMat:
    """Square matrix of counters, stored as rows."""

    __slots__ = ("rows", "_k")

    def __init__(self, size=None, rows=None):
        if rows is None:
            rows = [[0] * size for _ in range(size)]
        else:
            rows = [list(r) for r in rows]
            if any(len(r) != len(rows) for r in rows):
                raise UsageError("matrix must be square")
        for r in rows:
            _check_entries(r)
        self.rows = rows
        self._k = _pick_kernels([x for r in rows for x in r][:1] or [0])

    @classmethod
    def zeros(cls, size):
        return cls(size)

    def _wrap(self, rows):
        out = CounterMat.__new__(CounterMat)
        out.rows = rows
        out._k = self._k
        return out

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def set(self, i, j, value):
        self.rows[i] = list(self.rows[i])
        self.rows[i][j] = value
        _check_entries(self.rows[i])

    def addvector(self, vec, r):
        if len(vec) != len(self):
            raise UsageError("vector length mismatch")
        if not 0 <= r < len(self):
            raise UsageError("row index out of range")
        return self._wrap(self._k.mat_addvector(self.rows, vec.entries, r))

    def splice(self, k, other):
        if len(other) != len(self):
            raise UsageError("matrix shape mismatch")
        if not 0 <= k <= len(self):
            raise UsageError("splice index out of range")
        return self._wrap(self._k.mat_splice(self.rows, k, other.rows))

    def sum(self):
        return CounterVec(entries=self._k.mat_sum(self.rows))

    def uppersum(self):
        return CounterVec(entries=self._k.mat_uppersum(self.rows))

    def __eq__(self, other):
        return isinstance(other, CounterMat) and self.rows == other.rows

    def __repr__(self):
        return f"CounterMat({self.rows})"


class BitVec:
    """Fixed-length vector of booleans (stored as 0/1 ints)."""

    __slots__ = ("entries",)

    def __init__(self, size=None, entries=None):
        if entries is None:
            entries = [0] * size
        else:
            entries = [1 if x else 0 for x in entries]
            if size is not None and len(entries) != size:
                raise UsageError("entries do not match requested size")
        self.entries = entries

    @classmethod
    def zeros(cls, size):
        return cls(size)

    def _wrap(self, entries):
        out = BitVec.__new__(BitVec)
        out.entries = entries
        return out

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def set(self, i, flag):
        self.entries[i] = 1 if flag else 0

    def or_(self, other):
        if len(other) != len(self):
            raise UsageError("vector length mismatch")
        return self._wrap(K.vec_or(self.entries, other.entries))

    __or__ = or_

    def splice(self, k, other):
        if len(other) != len(self):
            raise UsageError("vector length mismatch")
        if not 0 <= k <= len(self):
            raise UsageError("splice index out of range")
        return self._wrap(K.vec_splice(self.entries, k, other.entries))

    def any(self):
        return not K.vec_is_zero(self.entries)

    def __eq__(self, other):
        return isinstance(other, BitVec) and self.entries == other.entries

    def __repr__(self):
        return f"BitVec({self.entries})"


class BitMat:
    """Square matrix of booleans."""

    __slots__ = ("rows",)

    def __init__(self, size=None, rows=None):
        if rows is None:
            rows = [[0] * size for _ in range(size)]
        else:
            rows = [[1 if x else 0 for x in r] for r in rows]
            if any(len(r) != len(rows) for r in rows):
                raise UsageError("matrix must be square")
        self.rows = rows

    @classmethod
    def zeros(cls, size):
        return cls(size)

    def _wrap(self, rows):
        out = BitMat.__new__(BitMat)
        out.rows = rows
        return out

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def orvector(self, vec, r):
        if len(vec) != len(self):
            raise UsageError("vector length mismatch")
        if not 0 <= r < len(self):
            raise UsageError("row index out of range")
        return self._wrap(K.mat_orvector(self.rows, vec.entries, r))

    def splice(self, k, other):
        if len(other) != len(self):
            raise UsageError("matrix shape mismatch")
        if not 0 <= k <= len(self):
            raise UsageError("splice index out of range")
        return self._wrap(K.mat_splice(self.rows, k, other.rows))

    def or_all(self):
        return BitVec(entries=K.mat_or(self.rows))

    def upperor(self):
        return BitVec(entries=K.mat_upperor(self.rows))

    def __eq__(self, other):
        return isinstance(other, BitMat) and self.rows == other.rows

    def __repr__(self):
        return f"BitMat({self.rows})"


class ApproxConfig:
    """Mantissa/exponent widths for the approximate counter backend.

    ``b``-bit mantissas lose at most a factor (1 + 2^-b) per addition, so a
    value built by additions nested ``d`` deep is exact within (1 + 2^-b)^d.
    ``for_depth`` picks b so that depth ``max_depth`` stays within the target
    factor ``B`` (we use B = 1.5 throughout the tests; the widths below are
    calibrated empirically, not prescribed).
    """

    __slots__ = ("b", "s")

    def __init__(self, b, s):
        self.b = b
        self.s = s

    @classmethod
    def for_depth(cls, max_depth, n_max, B=1.5):
        import math

        # (1 + 2^-b)^max_depth <= B  <=>  2^b >= max_depth / ln(B) (approx).
        b = max(2, math.ceil(math.log2(max_depth / math.log(B))) + 1)
        s = max(2, math.ceil(math.log2(max(2, math.log2(max(n_max, 2))))) + 2)
        return cls(b, s)


class ApproxCounter:
    """Floating-point counter: value = num * 2^exp with a (b+1)-bit num.

    Addition is exact integer addition followed by rounding the result DOWN
    to the nearest representable value, so a stored value never overestimates
    the true sum.  ``depth`` tracks how deeply nested in additions the value
    is; ``saturated`` flags exponent overflow (the value clamps at the top of
    the representable range).
    """

    __slots__ = ("cfg", "num", "exp", "depth", "saturated")

    def __init__(self, cfg, value=0):
        self.cfg = cfg
        self.depth = 0 if value == 0 else 1
        self.saturated = False
        if value == 0:
            self.num, self.exp = 0, 0
        else:
            if value < 0:
                raise UsageError("counters are nonnegative")
            self.num, self.exp = self._round_down(value, 0)

    def _round_down(self, num, exp):
        # Normalize num * 2^exp so num has exactly b+1 bits, rounding down.
        b, s = self.cfg.b, self.cfg.s
        sh = num.bit_length() - (b + 1)
        if sh > 0:
            num >>= sh
        elif sh < 0:
            num <<= -sh
        exp += sh
        if exp + b >= (1 << s):
            self.saturated = True
            return (1 << (b + 1)) - 1, (1 << s) - 1 - b
        return num, exp

    def _with(self, num, exp, depth, saturated):
        out = ApproxCounter.__new__(ApproxCounter)
        out.cfg, out.num, out.exp, out.depth, out.saturated = (
            self.cfg,
            num,
            exp,
            depth,
            saturated,
        )
        return out

    def __add__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self
            other = ApproxCounter(self.cfg, other)
        if self.num == 0:
            return other._with(
                other.num, other.exp, max(self.depth, other.depth) + 1, other.saturated
            )
        if other.num == 0:
            return self._with(
                self.num, self.exp, max(self.depth, other.depth) + 1, self.saturated
            )
        e = min(self.exp, other.exp)
        total = (self.num << (self.exp - e)) + (other.num << (other.exp - e))
        out = self._with(0, 0, max(self.depth, other.depth) + 1,
                         self.saturated or other.saturated)
        out.num, out.exp = out._round_down(total, e)
        return out

    __radd__ = __add__

    def value(self):
        """Exact represented value (may be fractional below 2^b)."""
        if self.exp >= 0:
            return self.num << self.exp
        return Fraction(self.num, 1 << -self.exp)

    def __bool__(self):
        return self.num != 0

    def __le__(self, other):
        return self.value() <= (other.value() if isinstance(other, ApproxCounter) else other)

    def __lt__(self, other):
        return self.value() < (other.value() if isinstance(other, ApproxCounter) else other)

    def __repr__(self):
        return f"ApproxCounter({self.value()}, depth={self.depth})"


def approx_vec(cfg, values):
    """CounterVec over approximate entries (routed to pure kernels)."""
    return CounterVec(entries=[ApproxCounter(cfg, v) for v in values])
