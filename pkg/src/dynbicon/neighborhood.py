"""Per-vertex leveled partition structure ("neighborhood levels").

Maintains a descending chain of partitions L_0 >= L_1 >= ... >= L_lmax over
a weighted ground set of items, with:

* counting: each item carries a counter vector c^x; sum_counters(x) returns
  s with s[i] = sum of c^y[i] over all y related to x at level i;
* marking: bit-vector analog (or_marks) plus find_marked(x, i) returning a
  concrete i-marked item related to x at level i;
* selection: a pair of VIP items whose shared chain of classes is kept in a
  split "primed" form so that raising/lowering the pair's level (long_zip /
  long_unzip) is O(1) via a single stored ``sel_level``;
* biasing: positive item weights; heavier items sit closer to the root, so
  operations touching them are cheaper.

Representation.  A rooted tree: the root (depth 0) is the whole set, an
internal node at depth i+1 is a class of the primed partition L'_i, leaves
(depth lmax+1) are items.  The real partition L_i is recovered by uniting
the two selected strands' classes at levels <= sel_level.

Edges are solid or dashed.  Between public operations an edge (c, p) is
solid exactly when it is heavy: (1) c is an ancestor of the first selected
item; or (2) c is an ancestor of a selected item and p is not an ancestor
of the first; or (3) p is no selected-item ancestor and w(T_p) < 2 w(T_c).
Each solid path is a small AVL keyed by depth whose per-node aggregates
combine the *local* values of path nodes (own leaf values plus dashed
children's frozen subtree totals); dashed children live in one biased
disjoint-sets encoding per node.  Ancestor sums (sum_counters / or_marks)
use depth-masked locals, so one prefix query per crossed path yields the
level-indexed sums; subtree descent (find_marked) uses the plain locals.

``FlatNbh`` is the list-of-sets oracle with identical public behavior; the
naive cover-level implementation and the differential tests build on it.
"""

from dynbicon import bds
from dynbicon import kernels as K


class UsageError(Exception):
    pass


def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return K.vec_add(a, b)


def _or(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return K.vec_or(a, b)


class Node:
    """Tree node; doubles as its own AVL node within its solid path."""

    __slots__ = (
        "depth", "ref", "weight", "cnt", "marks",
        "parent_solid", "bds_item", "solid_child", "dchildren", "nchild",
        "sel",
        # local contribution: own payload plus dashed children totals
        "lw", "lc", "lm", "lcm", "lmm",
        # solid-path AVL linkage and subtree aggregates over locals
        "pl", "pr", "pp", "ph",
        "aw", "apc", "apm", "ac", "am",
    )

    def __init__(self, depth, ref=None):
        self.depth = depth
        self.ref = ref
        self.weight = 0
        self.cnt = None
        self.marks = None
        self.parent_solid = None
        self.bds_item = None
        self.solid_child = None
        self.dchildren = None
        self.nchild = 0
        self.sel = 0
        self.lw = 0
        self.lc = self.lm = self.lcm = self.lmm = None
        self.pl = self.pr = self.pp = None
        self.ph = 1
        self.aw = 0
        self.apc = self.apm = self.ac = self.am = None

    def __repr__(self):
        kind = "item" if self.ref is not None else "class"
        return f"<{kind} d={self.depth} ref={self.ref!r}>"


# --- solid-path AVL ---------------------------------------------------------
# In-order = top of the path (smallest depth) to bottom.  All operations keep
# parent pointers and the five aggregate fields exact.


def _ph(n):
    return n.ph if n is not None else 0


def _p_refresh(n):
    l, r = n.pl, n.pr
    n.ph = 1 + max(_ph(l), _ph(r))
    aw, apc, apm, ac, am = n.lw, n.lc, n.lm, n.lcm, n.lmm
    if l is not None:
        aw += l.aw
        apc = _add(apc, l.apc)
        apm = _or(apm, l.apm)
        ac = _add(ac, l.ac)
        am = _or(am, l.am)
    if r is not None:
        aw += r.aw
        apc = _add(apc, r.apc)
        apm = _or(apm, r.apm)
        ac = _add(ac, r.ac)
        am = _or(am, r.am)
    n.aw, n.apc, n.apm, n.ac, n.am = aw, apc, apm, ac, am


def _p_rot_left(p):
    r = p.pr
    p.pr = r.pl
    if p.pr is not None:
        p.pr.pp = p
    r.pl = p
    p.pp = r
    _p_refresh(p)
    _p_refresh(r)
    return r


def _p_rot_right(p):
    l = p.pl
    p.pl = l.pr
    if p.pl is not None:
        p.pl.pp = p
    l.pr = p
    p.pp = l
    _p_refresh(p)
    _p_refresh(l)
    return l


def _p_balance(p):
    _p_refresh(p)
    bf = _ph(p.pl) - _ph(p.pr)
    if bf > 1:
        if _ph(p.pl.pl) < _ph(p.pl.pr):
            p.pl = _p_rot_left(p.pl)
            p.pl.pp = p
        return _p_rot_right(p)
    if bf < -1:
        if _ph(p.pr.pr) < _ph(p.pr.pl):
            p.pr = _p_rot_right(p.pr)
            p.pr.pp = p
        return _p_rot_left(p)
    return p


def _p_rebalance_up(node):
    """Rebalance/refresh from ``node`` to the root; returns the root."""
    top = node
    while node is not None:
        parent = node.pp
        new_node = _p_balance(node)
        new_node.pp = parent
        if parent is None:
            top = new_node
        elif parent.pl is node:
            parent.pl = new_node
        else:
            parent.pr = new_node
        node = parent
    return top


def _p_detach_max(root):
    """Remove and return (max_node, new_root)."""
    piv = root
    while piv.pr is not None:
        piv = piv.pr
    p = piv.pp
    left = piv.pl
    piv.pl = piv.pr = piv.pp = None
    _p_refresh(piv)
    if p is None:
        if left is not None:
            left.pp = None
        return piv, left
    p.pr = left
    if left is not None:
        left.pp = p
    return piv, _p_rebalance_up(p)


def _p_join(l, r):
    """Concatenate path trees (every depth in l above every depth in r).

    Arguments are treated as roots: stale parent pointers are severed on
    entry so no rebalance can escape into a surrounding tree.
    """
    if l is None:
        if r is not None:
            r.pp = None
        return r
    l.pp = None
    if r is None:
        return l
    r.pp = None
    if _ph(l) > _ph(r) + 1:
        l.pr = _p_join(l.pr, r)
        l.pr.pp = l
        out = _p_balance(l)
        out.pp = None
        return out
    if _ph(r) > _ph(l) + 1:
        r.pl = _p_join(l, r.pl)
        r.pl.pp = r
        out = _p_balance(r)
        out.pp = None
        return out
    piv, lrest = _p_detach_max(l)
    piv.pl = lrest
    piv.pr = r
    if lrest is not None:
        lrest.pp = piv
    r.pp = piv
    piv.pp = None
    out = _p_balance(piv)
    out.pp = None
    return out


def _p_split_below(v):
    """Split v's path into ([top..v], [strictly below v]); returns roots."""
    lacc = v.pl
    racc = v.pr
    if lacc is not None:
        lacc.pp = None
    if racc is not None:
        racc.pp = None
    node = v
    p = v.pp
    v.pl = v.pr = v.pp = None
    _p_refresh(v)
    lacc = _p_join(lacc, v)
    while p is not None:
        gp = p.pp
        if p.pl is node:
            # p and its right subtree are deeper than v
            rsub = p.pr
            p.pl = p.pr = p.pp = None
            _p_refresh(p)
            if rsub is not None:
                rsub.pp = None
            racc = _p_join(racc, _p_join(p, rsub))
        else:
            lsub = p.pl
            p.pl = p.pr = p.pp = None
            _p_refresh(p)
            if lsub is not None:
                lsub.pp = None
            lacc = _p_join(_p_join(lsub, p), lacc)
        node, p = p, gp
    return lacc, racc


def _p_root(n):
    while n.pp is not None:
        n = n.pp
    return n


def _p_top(n):
    n = _p_root(n)
    while n.pl is not None:
        n = n.pl
    return n


def _p_inorder(root):
    out = []
    stack = []
    node = root
    while stack or node is not None:
        while node is not None:
            stack.append(node)
            node = node.pl
        node = stack.pop()
        out.append(node)
        node = node.pr
    return out


class NbhStructure:
    """The real structure.  Items are opaque hashable refs."""

    def __init__(self, lmax, track_counters=True, debug=False):
        self.lmax = lmax
        self.size = lmax + 1
        self.track_counters = track_counters
        self.root = Node(0)
        self.leaf = {}
        self.sel_pair = None  # (leaf1, leaf2)
        self.sel_level = -1
        self.debug = debug
        self.mirror = FlatNbh(lmax) if debug else None

    # -- local aggregates ------------------------------------------------

    def _local_refresh(self, v):
        d = v.dchildren
        lw = v.weight
        lc, lm = v.cnt, v.marks
        if d is not None:
            lw += d.weight
            lc = _add(lc, d.cnt)
            lm = _or(lm, d.marks)
        v.lw, v.lc, v.lm = lw, lc, lm
        depth, size = v.depth, self.size
        if lc is None or depth >= size:
            v.lcm = lc
        else:
            v.lcm = lc[:depth] + [0] * (size - depth)
        if lm is None or depth >= size:
            v.lmm = lm
        else:
            v.lmm = lm[:depth] + [0] * (size - depth)

    def _refresh_up(self, v):
        node = v
        while node is not None:
            _p_refresh(node)
            node = node.pp

    def _local_and_up(self, v):
        self._local_refresh(v)
        self._refresh_up(v)

    # -- parent / child plumbing -----------------------------------------

    def _parent(self, v):
        if v.parent_solid is not None:
            return v.parent_solid
        it = v.bds_item
        if it is not None and it.in_set:
            return bds.find(it).owner
        return None

    def _subtree_weight(self, v):
        """w(T_v): suffix weights from v over v's path."""
        w = v.lw + (v.pr.aw if v.pr is not None else 0)
        node = v
        while node.pp is not None:
            p = node.pp
            if node is p.pl:
                w += p.lw
                if p.pr is not None:
                    w += p.pr.aw
            node = p
        return w

    def _attach_dashed(self, p, c):
        """c (root of its own proper path tree) becomes a dashed child of p."""
        root = _p_root(c)
        it = c.bds_item
        if it is None:
            it = bds.BdsItem(ref=c)
            c.bds_item = it
        it.cnt = root.apc
        it.marks = root.apm
        p.dchildren = bds.insert(p.dchildren, it, max(1, root.aw))
        p.dchildren.owner = p
        p.nchild += 1
        self._local_and_up(p)

    def _detach_dashed(self, p, c):
        enc = bds.delete(c.bds_item)
        p.dchildren = enc
        if enc is not None:
            enc.owner = p
        p.nchild -= 1
        self._local_and_up(p)

    def _attach_solid(self, p, c):
        """c becomes p's solid child; p must be the bottom of its path."""
        p.solid_child = c
        c.parent_solid = p
        p.nchild += 1
        _p_join(_p_root(p), _p_root(c))

    def _detach_solid(self, p):
        c = p.solid_child
        p.solid_child = None
        c.parent_solid = None
        p.nchild -= 1
        _p_split_below(p)
        return c

    def _make_dashed(self, p):
        """Turn p's solid child (if any) dashed."""
        c = p.solid_child
        if c is None:
            return
        self._detach_solid(p)
        self._attach_dashed(p, c)

    def _make_solid(self, p, c):
        """Pull dashed child c of p solid (p has no solid child)."""
        self._detach_dashed(p, c)
        self._attach_solid(p, c)

    # -- heavy rule --------------------------------------------------------

    def _strand_child(self, p, bit):
        leaf = self.sel_pair[0] if bit == 1 else self.sel_pair[1]
        node = leaf
        while node.depth > p.depth + 1:
            node = self._parent(node)
        return node

    def _heavy(self, p):
        if p.ref is not None:
            return None  # items have no children
        if p.sel & 1:
            return self._strand_child(p, 1)
        if p.sel & 2:
            return self._strand_child(p, 2)
        best, bw = None, -1
        sc = p.solid_child
        if sc is not None:
            bw = self._subtree_weight(sc)
            best = sc
        d = p.dchildren
        if d is not None:
            hv = d.heaviest
            if hv.weight > bw:
                best, bw = hv.ref, hv.weight
        if best is None:
            return None
        if self._subtree_weight(p) < 2 * bw:
            return best
        return None

    def _unselect_heavy(self, p):
        self._make_dashed(p)

    def _select_heavy(self, p):
        if p.solid_child is not None:
            return
        h = self._heavy(p)
        if h is not None:
            self._make_solid(p, h)

    def _refix_heavy(self, p):
        h = self._heavy(p)
        if p.solid_child is h:
            return
        self._make_dashed(p)
        if h is not None:
            self._make_solid(p, h)

    def _refreeze_strand_tops(self):
        """Re-freeze the stored payloads of dashed strand top nodes.

        The root keeps only the first selected strand solid; the second
        strand's depth-1 node is a dashed child of the root, so strand
        operations that move content across the strands must refresh its
        frozen aggregate afterwards.
        """
        if self.sel_pair is None:
            return
        for leaf in self.sel_pair:
            t = self._level_ancestor(leaf, 0)
            it = t.bds_item
            if it is not None and it.in_set:
                p = bds.find(it).owner
                self._detach_dashed(p, t)
                self._attach_dashed(p, t)

    # -- expose / conceal ---------------------------------------------------

    def _expose(self, x):
        """Make the x-to-root path solid with x bottommost; returns the root."""
        if x.solid_child is not None:
            self._make_dashed(x)
        t = _p_top(x)
        while True:
            p = self._parent(t)
            if p is None:
                return t
            if p.solid_child is not None:
                self._make_dashed(p)
            self._make_solid(p, t)
            t = _p_top(p)

    def _conceal(self, r):
        """Restore solid == heavy along the exposed root path."""
        nodes = _p_inorder(_p_root(r))
        for v in reversed(nodes):
            h = self._heavy(v)
            if v.solid_child is not h:
                if v.solid_child is not None:
                    self._make_dashed(v)
                if h is not None:
                    self._make_solid(v, h)

    # -- cuts and links -------------------------------------------------------

    def _cut_raw(self, c):
        """Detach c from its parent (no heavy fixes above)."""
        p = self._parent(c)
        if p.solid_child is c:
            self._detach_solid(p)
        else:
            self._detach_dashed(p, c)
        return p

    def _cut_full(self, c):
        p = self._parent(c)
        r = self._expose(p)
        self._cut_raw(c)
        self._conceal(r)
        return p

    def _link_full(self, c, p):
        r = self._expose(p)
        self._attach_dashed(p, c)
        self._conceal(r)

    # -- navigation ------------------------------------------------------------

    def _level_ancestor(self, x, i):
        """Ancestor of x at level i (depth i+1); i = -1 gives the root."""
        node = x
        while node.depth > i + 1:
            node = self._parent(node)
        return node

    def _nca(self, x, y):
        seen = set()
        node = x
        while node is not None:
            seen.add(id(node))
            node = self._parent(node)
        node = y
        while node is not None:
            if id(node) in seen:
                return node
            node = self._parent(node)
        raise AssertionError("disconnected structure")

    def _sel_nca_level(self, x, bit):
        """Level of nca(x, s_bit) via the ancestor flags (read-only)."""
        node = x
        while not (node.sel & bit):
            node = self._parent(node)
        return node.depth - 1

    # -- public: structure -------------------------------------------------------

    def insert(self, ref, weight=1):
        # items live at depth lmax+2; the class node of L'_i lives at depth
        # i+1, so level(x, y) = depth(nca) - 1 works uniformly.
        if ref in self.leaf:
            raise UsageError(f"item {ref!r} already present")
        leaf = Node(self.lmax + 2, ref)
        leaf.weight = weight
        if self.track_counters:
            leaf.cnt = [0] * self.size
        leaf.marks = [0] * self.size
        self._local_refresh(leaf)
        _p_refresh(leaf)
        self.leaf[ref] = leaf
        # fresh chain of singleton classes at levels lmax..0, all solid
        chain = leaf
        for depth in range(self.lmax + 1, 0, -1):
            p = Node(depth)
            self._local_refresh(p)
            _p_refresh(p)
            self._attach_solid(p, chain)
            chain = p
        self._link_full(chain, self.root)
        if self.mirror is not None:
            self.mirror.insert(ref, weight)
            self._audit()

    def delete(self, ref):
        x = self.leaf.pop(ref, None)
        if x is None:
            raise UsageError(f"item {ref!r} not present")
        if self.sel_pair is not None and (x is self.sel_pair[0] or x is self.sel_pair[1]):
            raise UsageError("cannot delete a selected item")
        node = x
        while True:
            p = self._parent(node)
            if p is self.root or p.nchild > 1:
                break
            node = p
        self._cut_full(node)
        if self.mirror is not None:
            self.mirror.delete(ref)
            self._audit()

    # -- public: levels ---------------------------------------------------------

    def level(self, xr, yr):
        x, y = self.leaf[xr], self.leaf[yr]
        if x is y:
            raise UsageError("level() needs two distinct items")
        base = self._nca(x, y).depth - 1
        if self.sel_pair is None:
            return base
        ax = max(self._sel_nca_level(x, 1), self._sel_nca_level(x, 2))
        ay = max(self._sel_nca_level(y, 1), self._sel_nca_level(y, 2))
        return max(base, min(self.sel_level, ax, ay))

    def zip(self, xr, yr, i):
        x, y = self.leaf[xr], self.leaf[yr]
        cx = self._level_ancestor(x, i)
        cy = self._level_ancestor(y, i)
        if not cx.sel:
            self._zip_into(cx, cy)
        elif not cy.sel:
            self._zip_into(cy, cx)
        else:
            self.sel_level = i
        self._refreeze_strand_tops()
        if self.mirror is not None:
            self.mirror.zip(xr, yr, i)
            self._audit()

    def _zip_into(self, cx, cy):
        px = self._parent(cx)
        py = self._parent(cy)
        if px is not py:
            # both parents are selected-strand nodes: the level above is
            # virtually unified, so moving cx across is weight-neutral for
            # every common ancestor
            self._cut_raw(cx)
            self._attach_dashed(py, cx)
            px2 = py
        else:
            px2 = px
        self._unselect_heavy(cx)
        self._unselect_heavy(cy)
        self._unselect_heavy(px2)
        c = Node(cx.depth)
        c.sel = cx.sel | cy.sel
        c.nchild = cx.nchild + cy.nchild
        c.dchildren = bds.root_union(cx.dchildren, cy.dchildren)
        c.dchildren.owner = c
        self._local_refresh(c)
        _p_refresh(c)
        zitem = bds.BdsItem(ref=c)
        zitem.cnt = _add(cx.bds_item.cnt, cy.bds_item.cnt)
        zitem.marks = _or(cx.bds_item.marks, cy.bds_item.marks)
        c.bds_item = zitem
        enc = bds.coalesce(cx.bds_item, cy.bds_item, zitem)
        enc.owner = px2
        px2.dchildren = enc
        px2.nchild -= 1
        self._local_and_up(px2)
        cx.bds_item = cy.bds_item = None
        self._select_heavy(c)
        self._select_heavy(px2)

    def unzip(self, xr, yr, i):
        self._unzip(self.leaf[xr], self.leaf[yr], i)
        self._refreeze_strand_tops()
        if self.mirror is not None:
            self.mirror.unzip(xr, yr, i)
            self._audit()

    def _unzip(self, x, y, i):
        # NOT symmetric: x's side keeps L_{i+1}(x), the rest of L_i(x) stays
        # lumped as one class, so all dispatching keys on x's class node.
        cx = self._level_ancestor(x, i + 1)
        if cx.sel:
            if self.sel_level >= i + 1:
                # L_{i+1}(x) is the virtual union of the two strands; both
                # strands' loose children form the split-off class.
                p1 = self._level_ancestor(self.sel_pair[0], i)
                p2 = self._level_ancestor(self.sel_pair[1], i)
                py = self._level_ancestor(y, i)
                gy = self._parent(py)
                self._materialize_rest((p1, p2), gy, i)
                return
            px = self._level_ancestor(x, i)
            if self.sel_level == i:
                # the doubled strand at level i splits into two single
                # nodes: x's strand node keeps only its strand child, its
                # loose children join the *other* strand's level-i class
                # (the unzip remainder), and the virtual union dissolves
                other = self.sel_pair[1] if (cx.sel & 1) else self.sel_pair[0]
                po = self._level_ancestor(other, i)
                moved = px.nchild - (1 if px.solid_child is not None else 0)
                if moved:
                    enc = px.dchildren
                    if po.dchildren is not None:
                        enc = bds.root_union(enc, po.dchildren)
                    enc.owner = po
                    po.dchildren = enc
                    px.dchildren = None
                    px.nchild -= moved
                    po.nchild += moved
                    self._local_and_up(px)
                    self._local_and_up(po)
                self.sel_level = i - 1
                return
            # sel_level < i: the union sits below; split off px's loose
            # children into a fresh sibling class, keeping the pair's level
            gx = self._parent(px)
            self._materialize_rest((px,), gx, i)
            return
        # general case: pull cx out of px into a fresh class under gx
        px = self._parent(cx)
        gx = self._parent(px)
        r = self._expose(px)
        self._cut_raw(cx)
        pnew = Node(px.depth)
        self._local_refresh(pnew)
        _p_refresh(pnew)
        self._attach_solid(pnew, cx)
        self._attach_dashed(gx, pnew)
        self._conceal(r)

    def _materialize_rest(self, strands, target, i):
        """Move the dashed children of the given level-i strand nodes into a
        fresh level-i class attached under ``target`` (a strand node)."""
        pnew = Node(i + 1)
        moved = 0
        enc = None
        for p in strands:
            if p.dchildren is None:
                continue
            moved += p.nchild - (1 if p.solid_child is not None else 0)
            enc = p.dchildren if enc is None else bds.root_union(enc, p.dchildren)
            p.dchildren = None
        for p in strands:
            p.nchild = 1 if p.solid_child is not None else 0
            self._local_and_up(p)
        if enc is None:
            raise AssertionError("unzip split off an empty class")
        enc.owner = pnew
        pnew.dchildren = enc
        pnew.nchild = moved
        self._local_refresh(pnew)
        _p_refresh(pnew)
        self._select_heavy(pnew)
        self._attach_dashed(target, pnew)

    # -- public: selection -------------------------------------------------------

    def select(self, pair):
        if pair is not None and len(pair) not in (0, 2):
            raise UsageError("selection must be empty or a pair")
        if pair is not None and len(pair) == 0:
            pair = None
        self._materialize_selection()
        if pair is not None:
            xr, yr = pair
            x, y = self.leaf[xr], self.leaf[yr]
            s = self.level(xr, yr)
            if s >= 0:
                cx = self._level_ancestor(x, s + 1)
                self._cut_full(cx)
                chain = cx
                for depth in range(cx.depth - 1, 0, -1):
                    p = Node(depth)
                    self._local_refresh(p)
                    _p_refresh(p)
                    self._attach_solid(p, chain)
                    chain = p
                self._link_full(chain, self.root)
            node = x
            while node is not None:
                node.sel |= 1
                node = self._parent(node)
            node = y
            while node is not None:
                node.sel |= 2
                node = self._parent(node)
            self.sel_pair = (x, y)
            self.sel_level = s
            self._fix_strand(x)
            self._fix_strand(y)
        if self.mirror is not None:
            self.mirror.select(pair and (pair[0], pair[1]))
            self._audit()

    def _fix_strand(self, leaf):
        chain = []
        node = self._parent(leaf)
        while node is not None:
            chain.append(node)
            node = self._parent(node)
        for p in chain:
            self._refix_heavy(p)

    def _materialize_selection(self):
        if self.sel_pair is None:
            return
        s = self.sel_level
        xo, yo = self.sel_pair
        self.sel_pair = None
        self.sel_level = -1
        for leaf in (xo, yo):
            node = leaf
            while node is not None:
                node.sel = 0
                node = self._parent(node)
        if s < 0:
            self._fix_strand(xo)
            self._fix_strand(yo)
            return
        sx = [self._level_ancestor(xo, i) for i in range(s + 1)]
        sy = [self._level_ancestor(yo, i) for i in range(s + 1)]
        for i in range(s + 1):
            self._cut_raw(sx[i])
            self._cut_raw(sy[i])
        ms = []
        for i in range(s + 1):
            self._unselect_heavy(sx[i])
            self._unselect_heavy(sy[i])
            m = Node(i + 1)
            m.nchild = sx[i].nchild + sy[i].nchild
            if sx[i].dchildren is None:
                m.dchildren = sy[i].dchildren
            elif sy[i].dchildren is None:
                m.dchildren = sx[i].dchildren
            else:
                m.dchildren = bds.root_union(sx[i].dchildren, sy[i].dchildren)
            if m.dchildren is not None:
                m.dchildren.owner = m
            sx[i].dchildren = sy[i].dchildren = None
            self._local_refresh(m)
            _p_refresh(m)
            self._select_heavy(m)
            ms.append(m)
        for i in range(s, 0, -1):
            self._attach_dashed(ms[i - 1], ms[i])
            self._refix_heavy(ms[i - 1])
        self._attach_dashed(self.root, ms[0])
        self._refix_heavy(self.root)
        # residual strand segments (levels > s) lost their forced-solid
        # status with the flags; restore solid == heavy along them
        self._fix_strand(xo)
        self._fix_strand(yo)

    def selected_level(self):
        if self.sel_pair is None:
            raise UsageError("no selection")
        return self.sel_level

    def long_zip(self, i1, i2):
        if self.sel_pair is None or self.sel_level != i1 or not i1 < i2:
            raise UsageError("long_zip precondition violated")
        self.sel_level = i2
        if self.mirror is not None:
            self.mirror.long_zip(i1, i2)
            self._audit()

    def long_unzip(self, i2, i1):
        if self.sel_pair is None or self.sel_level != i2 or not i1 < i2:
            raise UsageError("long_unzip precondition violated")
        self.sel_level = i1
        if self.mirror is not None:
            self.mirror.long_unzip(i2, i1)
            self._audit()

    # -- public: weights, counters, marks --------------------------------------

    def set_weight(self, ref, w):
        if w < 1:
            raise UsageError("weights are positive")
        x = self.leaf[ref]
        r = self._expose(x)
        x.weight = w
        self._local_and_up(x)
        self._conceal(r)
        if self.mirror is not None:
            self.mirror.set_weight(ref, w)
            self._audit()

    def update_counters(self, ref, cnt):
        x = self.leaf[ref]
        if len(cnt) != self.size:
            raise UsageError("counter vector length mismatch")
        r = self._expose(x)
        x.cnt = list(cnt)
        self._local_and_up(x)
        self._conceal(r)
        if self.mirror is not None:
            self.mirror.update_counters(ref, cnt)
            self._audit()

    def update_marks(self, ref, marks):
        x = self.leaf[ref]
        if len(marks) != self.size:
            raise UsageError("mark vector length mismatch")
        r = self._expose(x)
        x.marks = list(marks)
        self._local_and_up(x)
        self._conceal(r)
        if self.mirror is not None:
            self.mirror.update_marks(ref, marks)
            self._audit()

    def _mask_to(self, vec, depth):
        if vec is None or depth >= self.size:
            return vec
        if depth <= 0:
            return None
        return vec[:depth] + [0] * (self.size - depth)

    def _prefix_masked(self, node, include_self):
        """Masked (cnt, marks) over node's path restricted to depth <= (or <)
        node.depth."""
        if include_self:
            c, m = node.lcm, node.lmm
        else:
            c = m = None
        if node.pl is not None:
            c = _add(c, node.pl.ac)
            m = _or(m, node.pl.am)
        walk = node
        while walk.pp is not None:
            p = walk.pp
            if walk is p.pr:
                c = _add(c, p.lcm)
                m = _or(m, p.lmm)
                if p.pl is not None:
                    c = _add(c, p.pl.ac)
                    m = _or(m, p.pl.am)
            walk = p
        return c, m

    def _suffix_plain_below(self, p):
        """Plain (cnt, marks) over p's path restricted to depth > p.depth."""
        c = m = None
        if p.pr is not None:
            c, m = p.pr.apc, p.pr.apm
        walk = p
        while walk.pp is not None:
            q = walk.pp
            if walk is q.pl:
                c = _add(c, q.lc)
                m = _or(m, q.lm)
                if q.pr is not None:
                    c = _add(c, q.pr.apc)
                    m = _or(m, q.pr.apm)
            walk = q
        return c, m

    def _ancestor_sums(self, x):
        """(masked cnt, masked marks) accumulated over x's ancestor chain.

        Within a solid path the chain enters every node through its solid
        child, so the full local values apply.  At a dashed crossing into p,
        the off-chain children of p are its other dashed children (their
        aggregate is combined from the entered item's set siblings, never
        subtracted) plus p's solid child's subtree (the path suffix below p).
        """
        cnt, marks = self._prefix_masked(x, True)
        t = _p_top(x)
        while True:
            it = t.bds_item
            if it is None or not it.in_set:
                return cnt, marks
            p = bds.find(it).owner
            ec, em = bds.aggregate_excluding(it)
            sc, sm = self._suffix_plain_below(p)
            cnt = _add(cnt, self._mask_to(_add(ec, sc), p.depth))
            marks = _or(marks, self._mask_to(_or(em, sm), p.depth))
            c, m = self._prefix_masked(p, False)
            cnt = _add(cnt, c)
            marks = _or(marks, m)
            t = _p_top(p)

    def _strand_adjustment(self, x):
        """(other strand's leaf, level cap) per the selection rule, or None.

        x picks up the other strand's classes at levels i <= sel_level that
        x itself still shares with its own strand, i.e. up to the level of
        x's junction with the strand it hangs off.
        """
        if self.sel_pair is None or self.sel_level < 0:
            return None
        s1, s2 = self.sel_pair
        a1 = self._sel_nca_level(x, 1)
        a2 = self._sel_nca_level(x, 2)
        if a1 < 0 and a2 < 0:
            return None
        if a1 >= a2:
            other, own = s2, a1
        else:
            other, own = s1, a2
        cap = min(self.sel_level, own)
        if cap < -1:
            return None
        return other, cap

    def sum_counters(self, ref):
        x = self.leaf[ref]
        cnt, _ = self._ancestor_sums(x)
        adj = self._strand_adjustment(x)
        if adj is not None:
            other, cap = adj
            ocnt, _ = self._ancestor_sums(other)
            if ocnt is not None:
                cut = cap + 1
                cnt = _add(cnt, ocnt[:cut] + [0] * (self.size - cut))
        return cnt if cnt is not None else [0] * self.size

    def or_marks(self, ref):
        x = self.leaf[ref]
        _, marks = self._ancestor_sums(x)
        adj = self._strand_adjustment(x)
        if adj is not None:
            other, cap = adj
            _, om = self._ancestor_sums(other)
            if om is not None:
                cut = cap + 1
                marks = _or(marks, om[:cut] + [0] * (self.size - cut))
        return marks if marks is not None else [0] * self.size

    # -- public: find_marked ----------------------------------------------------

    def find_marked(self, ref, i):
        x = self.leaf[ref]
        v = self._level_ancestor(x, i)
        hit = self._subtree_has_mark(v, i)
        if hit is None and v.sel and self.sel_level >= i and self.sel_pair:
            bit = 1 if (v.sel & 1) else 2
            other = self.sel_pair[1] if bit == 1 else self.sel_pair[0]
            v2 = self._level_ancestor(other, i)
            hit = self._subtree_has_mark(v2, i)
        if hit is None:
            return None
        return self._descend_marked(hit, i).ref

    def _subtree_has_mark(self, v, i):
        """Path node at/below v with plain-local marks bit i, else None."""
        if v.lm is not None and v.lm[i]:
            return v
        node = v.pr
        found = self._scan_subtree(node, i)
        if found is not None:
            return found
        walk = v
        while walk.pp is not None:
            p = walk.pp
            if walk is p.pl:
                if p.lm is not None and p.lm[i]:
                    return p
                found = self._scan_subtree(p.pr, i)
                if found is not None:
                    return found
            walk = p
        return None

    def _scan_subtree(self, node, i):
        while node is not None:
            if node.apm is None or not node.apm[i]:
                return None
            l = node.pl
            if l is not None and l.apm is not None and l.apm[i]:
                node = l
                continue
            if node.lm is not None and node.lm[i]:
                return node
            node = node.pr
        return None

    def _descend_marked(self, u, i):
        while True:
            if u.ref is not None:
                return u
            if u.marks is not None and u.marks[i]:
                return u
            item = bds.find_marked(u.dchildren, i)
            c = item.ref
            u = self._subtree_has_mark(c, i)

    # -- audits -------------------------------------------------------------

    def partitions(self):
        """Materialized selection-adjusted partitions, one per level."""
        out = []
        for i in range(self.lmax + 1):
            groups = {}
            for ref, leaf in self.leaf.items():
                anc = self._level_ancestor(leaf, i)
                key = id(anc)
                if anc.sel and self.sel_level >= i:
                    key = ("sel", i)
                groups.setdefault(key, set()).add(ref)
            out.append(sorted(map(tuple, map(sorted, groups.values()))))
        return out

    def _audit(self):
        check_structure(self)
        assert self.partitions() == self.mirror.partitions()

    # step-count instrumentation for the depth audit
    def depth_steps(self, ref):
        """Unit traversal steps from an item to the root: per crossed solid
        path, the AVL climb to the path root; per dashed hop, the set depth."""
        steps = 0
        node = self.leaf[ref]
        while node is not None:
            walk = node
            while walk.pp is not None:
                walk = walk.pp
                steps += 1
            top = _p_top(node)
            it = top.bds_item
            if it is not None and it.in_set:
                steps += bds.depth(it) + 1
                node = bds.find(it).owner
            else:
                node = None
        return steps


def check_structure(n):
    """Full structural invariants of an NbhStructure (test support)."""
    seen = set()
    stack = [n.root]
    while stack:
        v = stack.pop()
        assert id(v) not in seen
        seen.add(id(v))
        kids = []
        if v.solid_child is not None:
            kids.append(v.solid_child)
            assert v.solid_child.parent_solid is v
        if v.dchildren is not None:
            assert v.dchildren.owner is v
            bds.check_encoding(v.dchildren)
            for it in v.dchildren.items():
                c = it.ref
                kids.append(c)
                assert c.parent_solid is None and c.bds_item is it
                root = _p_root(c)
                assert _p_top(c) is c
                assert it.weight == max(1, root.aw)
                assert it.cnt == root.apc
                assert it.marks == root.apm
        assert v.nchild == len(kids)
        for c in kids:
            assert c.depth == v.depth + 1
            stack.append(c)
        if v.ref is not None:
            assert v.depth == n.lmax + 2
            assert v.nchild == 0
        # local aggregates exact
        lw = v.weight + (v.dchildren.weight if v.dchildren is not None else 0)
        assert v.lw == lw
        # solid == heavy between operations
        h = n._heavy(v)
        assert v.solid_child is h, (v, v.solid_child, h)
    # every leaf reachable
    for ref, leaf in n.leaf.items():
        assert id(leaf) in seen
    # path aggregates exact: recompute bottom-up per path
    roots = set()
    stack = [n.root]
    while stack:
        v = stack.pop()
        roots.add(id(_p_root(v)))
        if v.solid_child is not None:
            stack.append(v.solid_child)
        if v.dchildren is not None:
            stack.extend(it.ref for it in v.dchildren.items())
    # selection flags
    if n.sel_pair is None:
        pass
    else:
        s1, s2 = n.sel_pair
        node = s1
        while node is not None:
            assert node.sel & 1
            node = n._parent(node)
        node = s2
        while node is not None:
            assert node.sel & 2
            node = n._parent(node)


class FlatNbh:
    """List-of-sets oracle with the same public interface.

    Classes are materialized eagerly (long operations loop over levels), so
    selection only stores the pair; semantics follow directly.
    """

    def __init__(self, lmax):
        self.lmax = lmax
        self.size = lmax + 1
        self.cls = [{} for _ in range(lmax + 1)]  # level -> ref -> class key
        self.members = [{} for _ in range(lmax + 1)]  # level -> key -> set
        self.weights = {}
        self.cnt = {}
        self.marks = {}
        self.sel = None
        self._next = 0

    def _new_class(self, i, refs):
        key = self._next
        self._next += 1
        self.members[i][key] = set(refs)
        for r in refs:
            self.cls[i][r] = key
        return key

    def insert(self, ref, weight=1):
        if ref in self.weights:
            raise UsageError(f"item {ref!r} already present")
        self.weights[ref] = weight
        self.cnt[ref] = [0] * self.size
        self.marks[ref] = [0] * self.size
        for i in range(self.size):
            self._new_class(i, [ref])

    def delete(self, ref):
        if ref not in self.weights:
            raise UsageError(f"item {ref!r} not present")
        if self.sel and ref in self.sel:
            raise UsageError("cannot delete a selected item")
        del self.weights[ref], self.cnt[ref], self.marks[ref]
        for i in range(self.size):
            key = self.cls[i].pop(ref)
            group = self.members[i][key]
            group.discard(ref)
            if not group:
                del self.members[i][key]

    def level(self, x, y):
        if x == y:
            raise UsageError("level() needs two distinct items")
        lv = -1
        for i in range(self.size):
            if self.cls[i][x] == self.cls[i][y]:
                lv = i
            else:
                break
        return lv

    def zip(self, x, y, i):
        if self.level(x, y) != i - 1:
            raise UsageError("zip precondition violated")
        kx, ky = self.cls[i][x], self.cls[i][y]
        group = self.members[i].pop(ky)
        self.members[i][kx] |= group
        for r in group:
            self.cls[i][r] = kx

    def unzip(self, x, y, i):
        lv = self.level(x, y)
        if not (lv == i):
            raise UsageError("unzip precondition violated")
        kx = self.cls[i][x]
        keep = set(self.members[i + 1][self.cls[i + 1][x]]) if i + 1 <= self.lmax else {x}
        rest = self.members[i][kx] - keep
        if not rest:
            raise AssertionError("unzip with empty remainder")
        self.members[i][kx] = keep
        for r in keep:
            self.cls[i][r] = kx
        self._new_class(i, rest)

    def select(self, pair):
        if pair is not None and len(pair) == 0:
            pair = None
        if pair is None:
            self.sel = None
        else:
            self.sel = (pair[0], pair[1])

    def selected_level(self):
        if self.sel is None:
            raise UsageError("no selection")
        return self.level(*self.sel)

    def long_zip(self, i1, i2):
        x, y = self.sel
        if self.level(x, y) != i1 or not i1 < i2:
            raise UsageError("long_zip precondition violated")
        for i in range(i1 + 1, i2 + 1):
            self.zip(x, y, i)

    def long_unzip(self, i2, i1):
        x, y = self.sel
        if self.level(x, y) != i2 or not i1 < i2:
            raise UsageError("long_unzip precondition violated")
        # uniformity assertion: L_{i1+1}(x) = ... = L_{i2}(x) = union at i2+1
        union = (
            self.members[i2 + 1][self.cls[i2 + 1][x]] if i2 + 1 <= self.lmax else {x}
        ) | (
            self.members[i2 + 1][self.cls[i2 + 1][y]] if i2 + 1 <= self.lmax else {y}
        )
        for i in range(i1 + 1, i2 + 1):
            if self.members[i][self.cls[i][x]] != union:
                raise UsageError("long_unzip uniformity violated")
        for i in range(i2, i1, -1):
            self.unzip(x, y, i)

    def set_weight(self, ref, w):
        if w < 1:
            raise UsageError("weights are positive")
        self.weights[ref] = w

    def rename(self, old_ref, new_ref):
        """Re-key an item, preserving every class membership."""
        if new_ref in self.weights:
            raise UsageError(f"item {new_ref!r} already present")
        self.weights[new_ref] = self.weights.pop(old_ref)
        self.cnt[new_ref] = self.cnt.pop(old_ref)
        self.marks[new_ref] = self.marks.pop(old_ref)
        for i in range(self.size):
            key = self.cls[i].pop(old_ref)
            self.cls[i][new_ref] = key
            group = self.members[i][key]
            group.discard(old_ref)
            group.add(new_ref)
        if self.sel is not None and old_ref in self.sel:
            self.sel = tuple(new_ref if r == old_ref else r for r in self.sel)

    def update_counters(self, ref, cnt):
        self.cnt[ref] = list(cnt)

    def sum_counters(self, ref):
        out = [0] * self.size
        for i in range(self.size):
            for r in self.members[i][self.cls[i][ref]]:
                out[i] += self.cnt[r][i]
        return out

    def update_marks(self, ref, marks):
        self.marks[ref] = list(marks)

    def or_marks(self, ref):
        out = [0] * self.size
        for i in range(self.size):
            for r in self.members[i][self.cls[i][ref]]:
                if self.marks[r][i]:
                    out[i] = 1
        return out

    def find_marked(self, ref, i):
        group = sorted(self.members[i][self.cls[i][ref]], key=repr)
        for r in group:
            if self.marks[r][i]:
                return r
        return None

    def partitions(self):
        # classes are materialized eagerly, so these ARE the real partitions
        out = []
        for i in range(self.size):
            groups = {}
            for ref, key in self.cls[i].items():
                groups.setdefault(key, set()).add(ref)
            out.append(sorted(map(tuple, map(sorted, groups.values()))))
        return out
