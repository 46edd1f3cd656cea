"""Biased disjoint sets: weighted items in splittable, coalescible sets.

Each set is encoded as an *upper* balanced tree (AVL, height <= 1.44 log2 t
+ 2) whose leaves are the roots of *lower* perfectly biased binary trees.
A lower-tree leaf has rank ``floor(log2 w)`` and every internal node has
exactly two children of rank one less, so an item of weight w sits
``rank(root) - floor(log2 w)`` edges below its lower root.  A set of total
weight W keeps at most ``max(1, 2*log2 W)`` lower trees; when an operation
pushes the count above that, same-rank lower trees are pairwise combined
(one rank higher per combine) and the upper tree is rebuilt over the
survivors.  Item depth is then O(log(W/w) + log log W).

Items are stable handles; restructuring moves internal nodes only.  Items
carry a weight, an optional counter vector ``cnt`` and bit vector ``marks``
(plain lists, treated as immutable), and an opaque client ``ref``.  Sets
expose combined aggregates at the root plus the heaviest item.

No subtraction anywhere: aggregates are recomputed from children, never
decremented.
"""

import math

from dynbicon import kernels as K

# Monotone instrumentation for the amortized accounting audit.
stats = {"combines": 0, "unions": 0, "deletes": 0, "potential": 0.0}


def reset_stats():
    stats["combines"] = 0
    stats["unions"] = 0
    stats["deletes"] = 0
    stats["potential"] = 0.0


class UsageError(Exception):
    pass


def _agg_add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return K.vec_add(a, b)


def _agg_or(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return K.vec_or(a, b)


_SEQ = 0


class BdsItem:
    """A weighted item; identity is stable across all restructuring."""

    __slots__ = ("weight", "cnt", "marks", "rank", "parent", "in_set", "seq",
                 "ref", "enc")

    upper = False

    def __init__(self, weight=1, cnt=None, marks=None, ref=None):
        global _SEQ
        self.weight = weight
        self.cnt = cnt
        self.marks = marks
        self.rank = weight.bit_length() - 1
        self.parent = None
        self.in_set = False
        self.ref = ref
        self.enc = None
        _SEQ += 1
        self.seq = _SEQ

    @property
    def w(self):
        return self.weight

    @property
    def hitem(self):
        return self

    def __repr__(self):
        return f"BdsItem(w={self.weight}, ref={self.ref!r})"


class _Inner:
    """Internal node of a lower tree (perfectly biased; never rebalanced)."""

    __slots__ = ("rank", "left", "right", "parent", "w", "cnt", "marks",
                 "hitem", "enc")

    upper = False

    def __init__(self, left, right):
        self.rank = left.rank + 1
        self.left = left
        self.right = right
        left.parent = self
        right.parent = self
        self.parent = None
        self.enc = None
        self._refresh()

    def _refresh(self):
        l, r = self.left, self.right
        self.w = l.w + r.w
        self.cnt = _agg_add(l.cnt, r.cnt)
        self.marks = _agg_or(l.marks, r.marks)
        self.hitem = _heavier(l.hitem, r.hitem)


class _Upper:
    """Internal node of the upper AVL; children are upper nodes or lower roots."""

    __slots__ = ("left", "right", "parent", "h", "nlower", "w", "cnt",
                 "marks", "hitem", "enc")

    upper = True

    def __init__(self, left, right):
        self.left = left
        self.right = right
        left.parent = self
        right.parent = self
        self.parent = None
        self.enc = None
        self._refresh()

    def _refresh(self):
        l, r = self.left, self.right
        self.h = 1 + max(_height(l), _height(r))
        self.nlower = _nlower(l) + _nlower(r)
        self.w = l.w + r.w
        self.cnt = _agg_add(l.cnt, r.cnt)
        self.marks = _agg_or(l.marks, r.marks)
        self.hitem = _heavier(l.hitem, r.hitem)


def _heavier(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if (a.weight, a.seq) >= (b.weight, b.seq):
        return a
    return b


def _height(node):
    return node.h if node.upper else 0


def _nlower(node):
    return node.nlower if node.upper else 1


class Encoding:
    """Root handle of one set.  Dead after the set is consumed by an op."""

    __slots__ = ("top", "alive", "owner")

    def __init__(self, top):
        top.parent = None
        top.enc = self
        self.top = top
        self.alive = True
        self.owner = None  # client slot (the tree node owning this set)

    def _set_top(self, top):
        if self.top is not None and self.top.enc is self:
            self.top.enc = None
        top.parent = None
        top.enc = self
        self.top = top

    @property
    def weight(self):
        return self.top.w

    @property
    def cnt(self):
        return self.top.cnt

    @property
    def marks(self):
        return self.top.marks

    @property
    def heaviest(self):
        return self.top.hitem

    @property
    def nlower(self):
        return _nlower(self.top)

    def items(self):
        stack = [self.top]
        while stack:
            node = stack.pop()
            if isinstance(node, BdsItem):
                yield node
            else:
                stack.append(node.left)
                stack.append(node.right)

    def __repr__(self):
        return f"Encoding(w={self.weight}, t={self.nlower})"


def _kill(enc):
    if enc.top is not None and enc.top.enc is enc:
        enc.top.enc = None
    enc.top = None
    enc.alive = False


# --- upper-tree AVL mechanics ------------------------------------------------


def _rotate_left(p):
    r = p.right
    p.right = r.left
    p.right.parent = p
    r.left = p
    p.parent = r
    p._refresh()
    r._refresh()
    return r


def _rotate_right(p):
    l = p.left
    p.left = l.right
    p.left.parent = p
    l.right = p
    p.parent = l
    p._refresh()
    l._refresh()
    return l


def _balance(p):
    p._refresh()
    bf = _height(p.left) - _height(p.right)
    if bf > 1:
        if _height(p.left.left) < _height(p.left.right):
            p.left = _rotate_left(p.left)
            p.left.parent = p
        return _rotate_right(p)
    if bf < -1:
        if _height(p.right.right) < _height(p.right.left):
            p.right = _rotate_right(p.right)
            p.right.parent = p
        return _rotate_left(p)
    return p


def _join(l, r):
    """Concatenate two upper trees (either side may be a bare lower root)."""
    if l is None:
        return r
    if r is None:
        return l
    if abs(_height(l) - _height(r)) <= 1:
        return _Upper(l, r)
    if _height(l) > _height(r):
        l.right = _join(l.right, r)
        l.right.parent = l
        return _balance(l)
    r.left = _join(l, r.left)
    r.left.parent = r
    return _balance(r)


def _build_upper(roots):
    if not roots:
        return None
    if len(roots) == 1:
        roots[0].parent = None
        return roots[0]
    mid = len(roots) // 2
    return _Upper(_build_upper(roots[:mid]), _build_upper(roots[mid:]))


def _remove_upper_leaf(lower_root):
    """Detach one lower root; returns the new top (or None) of the remainder."""
    p = lower_root.parent
    lower_root.parent = None
    if p is None:
        return None
    sib = p.right if p.left is lower_root else p.left
    g = p.parent
    p.left = p.right = None
    sib.parent = g
    if g is None:
        sib.parent = None
        return sib
    if g.left is p:
        g.left = sib
    else:
        g.right = sib
    node, top = g, g
    while node is not None:
        parent = node.parent
        new_node = _balance(node)
        new_node.parent = parent
        if parent is None:
            top = new_node
        elif parent.left is node:
            parent.left = new_node
        else:
            parent.right = new_node
        node = parent
    return top


def _lower_roots(top):
    out = []
    stack = [top]
    while stack:
        node = stack.pop()
        if node.upper:
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append(node)
    return out


# --- public operations ---------------------------------------------------


def _threshold(w):
    return max(1.0, 2.0 * math.log2(w)) if w > 1 else 1.0


def _maybe_simplify(enc):
    if enc.nlower <= _threshold(enc.weight):
        return enc
    by_rank = {}
    for root in _lower_roots(enc.top):
        root.parent = None
        by_rank.setdefault(root.rank, []).append(root)
    queue = sorted(by_rank)
    survivors = []
    qi = 0
    while qi < len(queue):
        rank = queue[qi]
        bucket = by_rank.get(rank, [])
        while len(bucket) >= 2:
            merged = _Inner(bucket.pop(), bucket.pop())
            stats["combines"] += 1
            nxt = by_rank.setdefault(rank + 1, [])
            if not nxt and (qi == len(queue) - 1 or queue[qi + 1] != rank + 1):
                queue.insert(qi + 1, rank + 1)
            nxt.append(merged)
        if bucket:
            survivors.append(bucket[0])
        qi += 1
    enc._set_top(_build_upper(survivors))
    return enc


def make_set(item, weight):
    """Create a singleton set over a free item with the given weight."""
    if item.in_set:
        raise UsageError("item already belongs to a set")
    if weight < 1:
        raise UsageError("weights are positive")
    item.weight = weight
    item.rank = weight.bit_length() - 1
    item.in_set = True
    item.parent = None
    return Encoding(item)


def find(item):
    """Root encoding of the set containing the item (leaf-to-root walk)."""
    if not item.in_set:
        raise UsageError("item is free")
    node = item
    while node.parent is not None:
        node = node.parent
    return node.enc


def depth(item):
    """Edges from the item's leaf to the encoding root (diagnostic)."""
    if not item.in_set:
        raise UsageError("item is free")
    d = 0
    node = item
    while node.parent is not None:
        node = node.parent
        d += 1
    return d


def root_union(x_enc, y_enc):
    """Merge two live sets; both input encodings die."""
    if x_enc is y_enc:
        raise UsageError("cannot union a set with itself")
    if not (x_enc.alive and y_enc.alive):
        raise UsageError("dead encoding")
    stats["unions"] += 1
    stats["potential"] += math.log2(x_enc.weight + y_enc.weight) + 1
    ltop, rtop = x_enc.top, y_enc.top
    _kill(x_enc)
    _kill(y_enc)
    return _maybe_simplify(Encoding(_join(ltop, rtop)))


def delete(item):
    """Remove the item from its set; returns the remaining set or None."""
    enc = find(item)
    stats["deletes"] += 1
    stats["potential"] += math.log2(enc.weight) + 1
    # Perfectly biased subtrees hanging off the item's ancestor path.
    sibs = []
    node = item
    while node.parent is not None and not node.parent.upper:
        p = node.parent
        sib = p.right if p.left is node else p.left
        sibs.append(sib)
        node = p
    lower_root = node
    if enc.top is lower_root:
        rem_top = None
    else:
        rem_top = _remove_upper_leaf(lower_root)
    _kill(enc)
    for sib in sibs:
        sib.parent = None
    item.parent = None
    item.in_set = False
    top = _join(rem_top, _build_upper(sibs))
    if top is None:
        return None
    return _maybe_simplify(Encoding(top))


def coalesce(x, y, z):
    """Replace items x and y (weights w_x, w_y) by the free item z (w_x+w_y)."""
    if x is y:
        raise UsageError("coalesce needs two distinct items")
    if z.in_set:
        raise UsageError("replacement item is not free")
    w = x.weight + y.weight
    rem1 = delete(x)
    rem2 = delete(y)
    out = make_set(z, w)
    for rem in (rem1, rem2):
        if rem is not None and rem.alive:
            out = root_union(out, rem)
    return out


def union(x, y):
    """Construct or find the union of the sets containing x and y."""
    if x is y:
        raise UsageError("union needs two distinct items")
    ex, ey = find(x), find(y)
    if ex is ey:
        return ex
    return root_union(ex, ey)


def insert(enc, item, weight):
    """make_set plus root_union into ``enc`` when it is a live set."""
    single = make_set(item, weight)
    if enc is None or not enc.alive:
        return single
    return root_union(enc, single)


def aggregate_excluding(item):
    """(cnt, marks) of the item's set minus the item's own contribution.

    Combines sibling subtrees along the leaf-to-root path, so no
    subtraction is ever performed.
    """
    cnt = marks = None
    node = item
    while node.parent is not None:
        p = node.parent
        sib = p.right if p.left is node else p.left
        cnt = _agg_add(cnt, sib.cnt)
        marks = _agg_or(marks, sib.marks)
        node = p
    return cnt, marks


def find_marked(enc, i):
    """Any item whose marks[i] bit is set (leftmost in the layout), or None."""
    node = enc.top
    if node.marks is None or not node.marks[i]:
        return None
    while not isinstance(node, BdsItem):
        l = node.left
        node = l if (l.marks is not None and l.marks[i]) else node.right
    return node


# --- audits (test support) ---------------------------------------------------


def check_encoding(enc):
    """Structural invariants; raises AssertionError on violation."""
    assert enc.alive and enc.top.enc is enc and enc.top.parent is None
    roots = _lower_roots(enc.top)
    assert len(roots) <= _threshold(enc.weight), (len(roots), enc.weight)
    for root in roots:
        _check_lower(root)
    _check_upper(enc.top)


def _check_lower(node):
    if isinstance(node, BdsItem):
        assert node.rank == node.weight.bit_length() - 1
        return node.w, node.cnt, node.marks
    assert isinstance(node, _Inner)
    assert node.left.rank == node.right.rank == node.rank - 1
    wl, cl, ml = _check_lower(node.left)
    wr, cr, mr = _check_lower(node.right)
    assert node.w == wl + wr
    assert node.cnt == _agg_add(cl, cr)
    assert node.marks == _agg_or(ml, mr)
    assert node.left.parent is node and node.right.parent is node
    return node.w, node.cnt, node.marks


def _check_upper(node):
    if not node.upper:
        return
    for child in (node.left, node.right):
        assert child.parent is node
        _check_upper(child)
    assert node.h == 1 + max(_height(node.left), _height(node.right))
    assert abs(_height(node.left) - _height(node.right)) <= 1
    assert node.w == node.left.w + node.right.w
    assert node.cnt == _agg_add(node.left.cnt, node.right.cnt)
    assert node.marks == _agg_or(node.left.marks, node.right.marks)
