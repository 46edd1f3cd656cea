"""Fully dynamic biconnectivity over a cover-level structure.

Maintains the graph G, a spanning forest F (inside the cover-level
structure), a level in [0, lmax] for every non-tree edge, and per-vertex
per-level neighbor sets N^i(v) = {u : uv is a non-tree edge of level i}.
The level assignment induces subgraphs G = G_0 >= G_1 >= ... where G_i
keeps F plus the non-tree edges of level >= i, under the invariant that
cycle-bearing biconnected components of G_i have at most ceil(n / 2^i)
vertices.  A vertex is i-marked in the cover-level structure exactly when
N^i(v) is nonempty.

Deleting an edge lowers its level one step at a time; each step promotes
the level-i edges it inspects (when legal) and repairs the affected
partitions with uniform and local uncovers, sweeping the tree path from
both ends.  Tree-edge deletions first search for a replacement at the
highest level with one, promote along the way, and swap.

The cover-level implementation is injected (`cl`): either the top-tree
structure or the naive reference, both with identical contracts.
"""

from dynbicon.reference import NaiveCoverLevel, UsageError, norm_edge


class Event:
    __slots__ = ("x", "z", "p", "strong_left")

    def __init__(self, x, z, p, strong_left):
        self.x = x          # marked endpoint of the non-tree edge
        self.z = z          # its partner (minimum of N^i(x))
        self.p = p          # projection onto the swept path
        self.strong_left = strong_left

    def key(self):
        # successive events count as "the same" while the projection and
        # witness side persist, regardless of which edge they expose
        return (self.p, self.strong_left)


class DynBiconnectivity:
    def __init__(self, n, cl=None):
        if n < 1:
            raise UsageError("need at least one vertex")
        self.n = n
        # ceil(log2 n): the deepest level whose size bound can still be met
        self.lmax = (n - 1).bit_length() if n > 1 else 0
        self.cl = cl if cl is not None else NaiveCoverLevel(n, self.lmax)
        if getattr(self.cl, "lmax", self.lmax) != self.lmax:
            raise UsageError("cover-level structure has mismatched level count")
        self.edges = {}   # norm_edge -> "tree" | level int
        self.nsets = [[set() for _ in range(self.lmax + 1)] for _ in range(n)]
        self.marked = [[False] * (self.lmax + 1) for _ in range(n)]
        self.stats = {
            "promotions": 0,
            "unpromoted_events": 0,
            "deletes": 0,
            "last_delete_unpromoted": 0,
            # per-phase-pair audit: <= 2 per swap, <= 2 per uncover sweep
            "max_unpromoted_per_swap": 0,
            "max_unpromoted_per_uncover": 0,
        }
        # per live edge: True once its level has ever decreased
        self._lowering = {}

        # marks suppressed for the duration of one uncover/replacement sweep
        self._suppressed = set()

    # -- bookkeeping ------------------------------------------------------

    def _update_mark(self, u, i):
        want = bool(self.nsets[u][i]) and (u, i) not in self._suppressed
        if self.marked[u][i] != want:
            self.cl.set_mark(u, i, want)
            self.marked[u][i] = want

    def _set_nontree(self, u, v, i):
        self.nsets[u][i].add(v)
        self.nsets[v][i].add(u)
        self._update_mark(u, i)
        self._update_mark(v, i)

    def _clear_nontree(self, u, v, i):
        self.nsets[u][i].discard(v)
        self.nsets[v][i].discard(u)
        self._update_mark(u, i)
        self._update_mark(v, i)

    def _legal_cap(self, level):
        return -(-self.n // (1 << level))

    # -- public updates ------------------------------------------------------

    def insert(self, u, v):
        if u == v:
            raise UsageError("self-loops are not supported")
        e = norm_edge(u, v)
        if e in self.edges:
            raise UsageError(f"duplicate edge {e}")
        if not self.cl.connected(u, v):
            self.cl.link(u, v)
            self.edges[e] = "tree"
        else:
            self.edges[e] = 0
            self.cl.cover(u, v, 0)
            self._set_nontree(u, v, 0)
        self._lowering[e] = False

    def delete(self, u, v):
        e = norm_edge(u, v)
        if e not in self.edges:
            raise UsageError(f"no such edge {e}")
        self.stats["deletes"] += 1
        self.stats["last_delete_unpromoted"] = 0
        if self.edges[e] == "tree":
            if not self._swap(u, v):
                self.cl.cut(u, v)
                del self.edges[e]
                self._lowering.pop(e, None)
                return
        i = self.edges[e]
        self.cl.expose(u, v)
        for j in range(i, -1, -1):
            self._lowering[e] = True
            self._clear_nontree(u, v, j)
            if j > 0:
                self._set_nontree(u, v, j - 1)
                self.edges[e] = j - 1
            else:
                del self.edges[e]
                self._lowering.pop(e, None)
            self._uncover_path(u, v, j)

    # -- queries ------------------------------------------------------------

    def are_biconnected(self, u, v):
        if u == v or not self.cl.connected(u, v):
            return False
        if self.cl.cover_level(u, v) == -1:
            return False
        return self.cl.find_size(u, v, 0) != 2

    def next_cut_vertex(self, u, v):
        if u == v:
            return v
        if not self.cl.connected(u, v):
            raise UsageError("next_cut_vertex on a disconnected pair")
        if self.cl.cover_level(u, v) == -1:
            e1, e2 = self.cl.min_covered_pair(u, v)
            (common,) = set(e1) & set(e2)
            return common
        return v

    # -- internals -----------------------------------------------------------

    def _promote(self, x, z, i):
        """Raise non-tree edge xz from level i to i+1 (legality checked by caller)."""
        e = norm_edge(x, z)
        if self._lowering.get(e):
            raise AssertionError("promotion after a level decrease")
        self._clear_nontree(x, z, i)
        self._set_nontree(x, z, i + 1)
        self.edges[e] = i + 1
        self.cl.cover(x, z, i + 1)
        self.stats["promotions"] += 1

    def _z_reachable(self, a, b, z, i):
        """Is z i-reachable from the tree path a..b?"""
        m = self.cl.meet(a, b, z)
        if m == z:
            return True
        if self.cl.cover_level(m, z) < i:
            return False
        t = self.cl.step_toward(m, z)
        if m != a and self.cl.cover_level(self.cl.step_toward(m, a), t) >= i:
            return True
        if m != b and self.cl.cover_level(self.cl.step_toward(m, b), t) >= i:
            return True
        return False

    def _event_partner(self, a, b, x, i, foreign):
        """Smallest partner z of x whose edge influences a..b, or None.

        A level-i edge matters for the sweep exactly when both endpoints
        are i-reachable from the path (it then shares a biconnected
        component of G_i with the lowered edge); an i-marked vertex can sit
        on or near the path while all its level-i edges live in a foreign
        component, and those edges must not be processed.
        """
        for z in sorted(self.nsets[x][i]):
            if (x, z) in foreign:
                continue
            if self._z_reachable(a, b, z, i):
                return z
            foreign.add((x, z))
            foreign.add((z, x))
        return None

    def _suppress(self, x, i):
        self._suppressed.add((x, i))
        self._update_mark(x, i)

    def _restore_suppressed(self):
        pending = list(self._suppressed)
        self._suppressed.clear()
        for x, i in pending:
            self._update_mark(x, i)

    def _find_next_event(self, a, b, i, foreign):
        """Next level-i event on a..b, left to right by projection.

        The witness side is resolved with the strong-reachability tiebreak:
        when the first reach comes through the far end p of its edge (the
        edge is then left of p), a strongly reachable marked vertex from
        that edge through p takes precedence and the event sides with the
        left edge.  Vertices marked only by foreign-component edges are
        unmarked for the remainder of the sweep.
        """
        while True:
            edge, c, y = self.cl.find_first_reach(a, b, i)
            if edge is None:
                return None
            p = c
            if c == edge[1] and p not in (a, b):
                w = self.cl.find_strong_reach(a, b, edge, p, i)
                if w is not None:
                    z = self._event_partner(a, b, w, i, foreign)
                    if z is None:
                        self._suppress(w, i)
                        continue
                    return Event(w, z, p, True)
            z = self._event_partner(a, b, y, i, foreign)
            if z is None:
                self._suppress(y, i)
                continue
            return Event(y, z, p, False)

    def _swap(self, u, v):
        """Replace tree edge uv by the best non-tree edge, if any.

        Returns False when no replacement exists at any level (bridge).
        """
        sizes = self.cl.find_size_vector(u, v)
        i = None
        for j in range(self.lmax, -1, -1):
            if sizes[j] > 2:
                i = j
                break
        if i is None:
            return False
        x, y = self._find_replacement(u, v, i)
        lvl = self.edges[norm_edge(x, y)]
        self._clear_nontree(x, y, lvl)
        del self.edges[norm_edge(x, y)]
        self._lowering.pop(norm_edge(x, y), None)
        if x == u or x == v:
            # the new tree edge shares x with the cut edge and inherits the
            # cut edge's partition classes there (same crossing cycles)
            self.cl.swap_edge(x, v if x == u else u, y)
        elif y == u or y == v:
            self.cl.swap_edge(y, v if y == u else u, x)
        else:
            self.cl.cut(u, v)
            self.cl.link(x, y)
        self.edges[norm_edge(x, y)] = "tree"
        self._lowering[norm_edge(x, y)] = False
        e = norm_edge(u, v)
        self.edges[e] = i
        self._set_nontree(u, v, i)
        for j in range(0, i + 1):
            self.cl.cover(u, v, j)
        return True

    def _find_replacement(self, u, v, i):
        cap = self._legal_cap(i + 1)
        foreign = set()
        unpromoted = 0
        try:
            for a, b in ((u, v), (v, u)):
                while True:
                    ev = self._find_next_event(a, b, i, foreign)
                    if ev is None:
                        break  # exhausted; replacement sits on the other side
                    if ev.z != a and self.cl.step_toward(a, ev.z) == b:
                        unpromoted += 1
                        return (ev.x, ev.z)
                    if self.cl.find_size(ev.x, ev.z, i + 1) <= cap:
                        self._promote(ev.x, ev.z, i)
                    else:
                        unpromoted += 1
                        break
            raise AssertionError("replacement not found despite the size probe")
        finally:
            self._restore_suppressed()
            self.stats["unpromoted_events"] += unpromoted
            self.stats["last_delete_unpromoted"] += unpromoted
            s = self.stats
            s["max_unpromoted_per_swap"] = max(s["max_unpromoted_per_swap"], unpromoted)

    def _maybe_local_uncover(self, a, b, p, i):
        if p in (a, b):
            return
        sa = self.cl.step_toward(p, a)
        sb = self.cl.step_toward(p, b)
        if self.cl.cover_level(sa, sb) == i:
            self.cl.local_uncover((sa, p), (p, sb), i)

    def _uncover_path(self, u, v, i):
        """Resolve all cover levels after dropping uv from level i to i-1.

        Sweeps run from both ends; events arrive left to right by
        projection.  A projection's own pair is split (local uncover) the
        moment its strong-side events are exhausted: on retrieving its first
        non-strong event, on moving past it, or on running out of events.
        The stretch between consecutive projections is uniformly uncovered.
        A sweep stops at the first illegal promotion; the second sweep then
        resolves everything on the other side of the one oversized
        component.
        """
        cap = self._legal_cap(i + 1)
        foreign = set()
        before = self.stats["unpromoted_events"]
        try:
            self._uncover_sweeps(u, v, i, cap, foreign)
        finally:
            self._restore_suppressed()
            delta = self.stats["unpromoted_events"] - before
            self.stats["last_delete_unpromoted"] += delta
            s = self.stats
            s["max_unpromoted_per_uncover"] = max(s["max_unpromoted_per_uncover"], delta)

    def _uncover_sweeps(self, u, v, i, cap, foreign):
        for a, b in ((u, v), (v, u)):
            prev = None
            while True:
                ev = self._find_next_event(a, b, i, foreign)
                if ev is None:
                    if prev is None:
                        self.cl.uniform_uncover(a, b, i)
                    else:
                        if prev.strong_left:
                            self._maybe_local_uncover(a, b, prev.p, i)
                        self.cl.uniform_uncover(prev.p, b, i)
                    return
                if prev is None:
                    self.cl.uniform_uncover(a, ev.p, i)
                elif ev.key() != prev.key():
                    if prev.strong_left:
                        self._maybe_local_uncover(a, b, prev.p, i)
                    if ev.p != prev.p:
                        self.cl.uniform_uncover(prev.p, ev.p, i)
                if not ev.strong_left and (
                    prev is None or prev.p != ev.p or prev.strong_left
                ):
                    # first non-strong event at this projection
                    self._maybe_local_uncover(a, b, ev.p, i)
                if self.cl.find_size(ev.x, ev.z, i + 1) <= cap:
                    self._promote(ev.x, ev.z, i)
                else:
                    self.stats["unpromoted_events"] += 1
                    break
                prev = ev
        # both sweeps stopped inside the one oversized component; nothing
        # between their stopping points needs a split

    # -- audit views ----------------------------------------------------------

    def edge_levels(self):
        return dict(self.edges)

    def tree_edges(self):
        return [e for e, kind in self.edges.items() if kind == "tree"]

    def nontree_levels(self):
        return {e: lv for e, lv in self.edges.items() if lv != "tree"}

    def check_marks(self):
        """(++) audit: v is i-marked exactly when N^i(v) is nonempty."""
        for v in range(self.n):
            for i in range(self.lmax + 1):
                assert self.cl.is_marked(v, i) == bool(self.nsets[v][i]), (v, i)
