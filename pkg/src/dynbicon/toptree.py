"""Top trees over a dynamic forest via round-based tree contraction.

Every vertex carries a dummy edge to a fictional leaf, so every merge fits
one of three shapes:

* case 1: two point clusters with the same boundary vertex;
* case 2: a slim path cluster A (boundary {v, x}) absorbs the point
  cluster at x, yielding the point cluster of the oriented edge v->(...);
* case 3: two slim path clusters meeting at midpoint x absorb the point
  cluster at x, yielding a longer slim path cluster.

Rounds contract the forest: every non-external degree-1 vertex rakes into
its neighbor (ties between two leaves broken by a per-round hash), and a
degree-2 vertex compresses when it is a strict hash local minimum among
its compress-eligible neighbors and no leaf is raking into it.  Raked and
compressed vertices die; their accumulated point clusters (dummy edge plus
earlier rakes, kept in a small weight-balanced tree of case-1 merges) form
the point child of the dying vertex's merge.  A component contracts to a
single vertex (point root) or, with two external boundary vertices, to a
root triple (path root plus two point roots).

Updates (link / cut / expose) dirty O(1) round-0 positions; each round's
moves are a pure function of that round's local shape and per-round hashes
(seeded, deterministic), so the repair sweep re-decides moves only around
the dirty frontier and reuses every cluster whose inputs are unchanged.
Split callbacks (clean) run ancestors-first, merge callbacks bottom-up.

A transient expose splits the ancestors of the target dummy leaves, then
greedily re-contracts the pieces with the targets as boundary; transient
unexpose destroys the temporary clusters and re-merges the hidden ones
(with merge callbacks re-run; transient clusters never hold lazy state).
"""

from dynbicon.rng import mix64


class UsageError(Exception):
    pass


_CSEQ = 0


class Cluster:
    __slots__ = (
        "kind",          # "edge" | "dummy" | "rake" | "point2" | "path3"
        "bu", "bv",      # boundary vertices (bv None for point clusters)
        "children",      # tuple of child clusters
        "parent",
        "transient",
        "mid",           # dying vertex (case 2/3)
        "fe_u", "fe_v",  # first path edge at bu / bv, oriented away
        "size",          # internal vertex count (dummies excluded)
        "rh",            # height within a rake (case-1) tree
        "group",         # RootGroup when this is a component root
        "seq",
        # cover-level client payload
        "cover", "cover_from", "cover_top",
        "argcover_u", "argcover_v",
        "totalcnt", "diagcnt_u", "diagcnt_v",
        "totalmarks", "diagmarks_u", "diagmarks_v",
    )

    def __init__(self, kind, bu, bv=None):
        global _CSEQ
        _CSEQ += 1
        self.seq = _CSEQ
        self.kind = kind
        self.bu = bu
        self.bv = bv
        self.children = ()
        self.parent = None
        self.transient = False
        self.mid = None
        self.fe_u = None
        self.fe_v = None
        self.size = 0
        self.rh = 1
        self.group = None
        self.cover = self.cover_from = self.cover_top = None
        self.argcover_u = self.argcover_v = None
        self.totalcnt = None
        self.diagcnt_u = self.diagcnt_v = None
        self.totalmarks = None
        self.diagmarks_u = self.diagmarks_v = None

    @property
    def is_path(self):
        return self.bv is not None

    def firstedge(self, x):
        if x == self.bu:
            return self.fe_u
        if x == self.bv:
            return self.fe_v
        raise AssertionError(f"{x} is not a boundary of {self}")

    def other_boundary(self, x):
        return self.bv if x == self.bu else self.bu

    def __repr__(self):
        b = f"{self.bu}" if self.bv is None else f"{self.bu}-{self.bv}"
        return f"<{self.kind} {b} #{self.seq}{' T' if self.transient else ''}>"


class RootGroup:
    __slots__ = ("roots", "boundary")

    def __init__(self, roots, boundary):
        self.roots = roots
        self.boundary = boundary


class _Round:
    """One contraction round: adjacency over alive vertices, moves taken."""

    __slots__ = ("adj", "move")

    def __init__(self):
        self.adj = {}   # vertex -> {neighbor: path Cluster}
        self.move = {}  # vertex -> ("rake", u) | ("compress",) | None


class _NullClient:
    def on_create(self, c):
        pass

    def on_merge(self, c, permanent):
        pass

    def clean(self, c):
        pass

    def on_destroy(self, c, permanent):
        pass


class TopForest:
    def __init__(self, n, client=None, seed=0x5EED):
        self.n = n
        self.client = client if client is not None else _NullClient()
        self.seed = seed
        self.external = {}        # vertex -> True (at most 2 per component)
        self.dummy = []
        self.pts_root = []        # vertex -> point-cluster tree root
        self.counters = {
            "merges": 0, "splits": 0, "tmerges": 0, "tsplits": 0,
            "expose_events": 0,
        }
        self.rounds = [_Round()]
        self._window = None
        r0 = self.rounds[0]
        for v in range(n):
            d = Cluster("dummy", v)
            self.dummy.append(d)
            self.pts_root.append(d)
            self.client.on_create(d)
            r0.adj[v] = {}
            r0.move[v] = None
        self._repair(set(range(n)))

    # -- hashes and move rules ---------------------------------------------

    def _h(self, v, k):
        return mix64(self.seed, v, k)

    def _decide(self, k, v):
        adj = self.rounds[k].adj
        nbrs = adj[v]
        deg = len(nbrs)
        ext = v in self.external
        if deg == 0 or deg > 2:
            return None
        if deg == 1:
            if ext:
                return None
            (u,) = nbrs
            if len(adj[u]) == 1 and u not in self.external:
                hv, hu = self._h(v, k), self._h(u, k)
                if (hu, u) < (hv, v):
                    return None
            return ("rake", u)
        if ext:
            return None
        hv = self._h(v, k)
        for w in nbrs:
            wn = adj[w]
            if len(wn) == 1 and w not in self.external:
                return None  # w rakes into v this round
            if len(wn) == 2 and w not in self.external:
                if (self._h(w, k), w) < (hv, v):
                    return None
        return ("compress",)

    # -- cluster constructors (structural only; callbacks run later) -------

    def _mk_edge(self, u, v):
        c = Cluster("edge", u, v)
        c.fe_u = (u, v)
        c.fe_v = (v, u)
        return c

    def _mk_case1(self, a, b, v, transient=False):
        c = Cluster("rake", v)
        c.children = (a, b)
        a.parent = b.parent = c
        c.size = a.size + b.size
        c.rh = 1 + max(a.rh, b.rh)
        c.transient = transient
        return c

    def _mk_case2(self, path, point, x, transient=False):
        v = path.other_boundary(x)
        c = Cluster("point2", v)
        c.children = (path, point)
        path.parent = point.parent = c
        c.mid = x
        c.fe_u = path.firstedge(v)
        c.size = path.size + point.size + 1
        c.transient = transient
        return c

    def _mk_case3(self, a, b, point, x, transient=False):
        u = a.other_boundary(x)
        w = b.other_boundary(x)
        c = Cluster("path3", u, w)
        c.children = (a, b, point)
        a.parent = b.parent = point.parent = c
        c.mid = x
        c.fe_u = a.firstedge(u)
        c.fe_v = b.firstedge(w)
        c.size = a.size + b.size + point.size + 1
        c.transient = transient
        return c

    # -- rake (pts) trees: weight-balanced by rh, rebalanced by rotation ----
    # Rotations mutate case-1 nodes in place; their only payload is `size`
    # (and rh), both refreshed locally.  Leaf sets above are unchanged.

    def _rake_refresh(self, c):
        a, b = c.children
        c.size = a.size + b.size
        c.rh = 1 + max(a.rh, b.rh)

    def _rake_rot(self, c, left):
        a, b = c.children
        self.counters["splits"] += 1
        self.counters["merges"] += 1
        if left:
            # (a, (x, y)) -> ((a, x), y) rotated onto b
            x, y = b.children
            b.children = (a, x)
            a.parent = x.parent = b
            self._rake_refresh(b)
            c.children = (b, y)
            b.parent = y.parent = c
        else:
            x, y = a.children
            a.children = (y, b)
            y.parent = b.parent = a
            self._rake_refresh(a)
            c.children = (x, a)
            x.parent = a.parent = c
        self._rake_refresh(c)

    def _rake_balance_up(self, c):
        while c is not None and c.kind == "rake" and not c.transient:
            a, b = c.children
            if a.rh > b.rh + 1:
                self._rake_rot(c, left=False)
            elif b.rh > a.rh + 1:
                self._rake_rot(c, left=True)
            else:
                self._rake_refresh(c)
            p = c.parent
            if p is not None and p.kind != "rake":
                # consumer of the rake root: sizes above are unchanged
                break
            c = p

    def _pts_insert(self, v, c, created):
        # the point tree root's parent may be a (stale) consumer merge; the
        # pts-dirty propagation guarantees that consumer gets rebuilt
        root = self.pts_root[v]
        node = root
        while node.kind == "rake":
            a, b = node.children
            node = a if a.rh <= b.rh else b
        holder = node.parent if node is not root else None
        joint = self._mk_case1(node, c, v)
        created.append(joint)
        if holder is None or holder.kind != "rake":
            self.pts_root[v] = joint
            joint.parent = None
        else:
            kids = list(holder.children)
            kids[kids.index(node)] = joint
            holder.children = tuple(kids)
            joint.parent = holder
            self._rake_balance_up(holder)

    def _pts_remove(self, v, c, destroyed):
        holder = c.parent
        c.parent = None
        if holder is None or holder.kind != "rake":
            raise AssertionError("removing the only point cluster of a vertex")
        sib = holder.children[0] if holder.children[1] is c else holder.children[1]
        up = holder.parent if holder is not self.pts_root[v] else None
        holder.children = ()
        destroyed.append(holder)
        if up is None or up.kind != "rake":
            self.pts_root[v] = sib
            sib.parent = None
        else:
            kids = list(up.children)
            kids[kids.index(holder)] = sib
            up.children = tuple(kids)
            sib.parent = up
            self._rake_balance_up(up)

    # -- structural updates -------------------------------------------------

    def _check_no_window(self):
        if self._window is not None:
            raise UsageError("structural update during a transient expose")

    def link(self, u, v):
        self._check_no_window()
        if self.connected(u, v):
            raise UsageError("link would close a cycle")
        for w in (u, v):
            comp = self._component_boundary(w)
            for x in comp:
                self.external.pop(x, None)
        leaf = self._mk_edge(u, v)
        self.client.on_create(leaf)
        r0 = self.rounds[0]
        r0.adj[u][v] = leaf
        r0.adj[v][u] = leaf
        self._repair({u, v})

    def cut(self, u, v):
        self._check_no_window()
        r0 = self.rounds[0]
        if v not in r0.adj[u]:
            raise UsageError("no such tree edge")
        comp = self._component_boundary(u)
        for x in comp:
            self.external.pop(x, None)
        leaf = r0.adj[u].pop(v)
        del r0.adj[v][u]
        self.client.on_destroy(leaf, True)
        self._repair({u, v})

    def expose(self, a, b):
        self._check_no_window()
        if not self.connected(a, b):
            raise UsageError("expose of a disconnected pair")
        old = self._component_boundary(a)
        dirty = {a, b} | set(old)
        for x in old:
            self.external.pop(x, None)
        self.external[a] = True
        if b != a:
            self.external[b] = True
        self._repair(dirty)

    def _component_boundary(self, v):
        group = self._group_of(v)
        return group.boundary

    def _group_of(self, v):
        c = self.dummy[v]
        while c.parent is not None:
            c = c.parent
        if c.group is None:
            raise AssertionError(f"root {c} has no group")
        return c.group

    def connected(self, u, v):
        if u == v:
            return True
        return self._group_of(u) is self._group_of(v)

    def roots_of(self, v):
        return self._group_of(v)

    # -- repair ------------------------------------------------------------------

    def _repair(self, dirty0):
        destroyed = []
        created = []
        shape_dirty = set(dirty0)   # adjacency shape or externality changed
        id_dirty = set()            # an incident edge cluster changed identity
        pts_dirty = set()           # point set content changed
        k = 0
        while shape_dirty or id_dirty or pts_dirty:
            if k + 1 >= len(self.rounds):
                self.rounds.append(_Round())
            rnd = self.rounds[k]
            nxt = self.rounds[k + 1]
            redecide = set()
            for v in shape_dirty:
                if v in rnd.adj:
                    redecide.add(v)
                    redecide.update(rnd.adj[v])
            rebuild = set(redecide)
            rebuild.update(v for v in id_dirty if v in rnd.adj)
            rebuild.update(v for v in pts_dirty if v in rnd.adj)
            # dirty vertices no longer alive at this round: clear stale moves
            rebuild.update(
                v for v in shape_dirty if v not in rnd.adj and rnd.move.get(v)
            )
            ns, ni, np = set(), set(), set()
            plans = {}
            for v in sorted(rebuild):
                old = rnd.move.get(v)
                old_kind = old[0] if old else None
                if v not in rnd.adj:
                    new = None
                elif v in redecide:
                    new = self._decide(k, v)
                elif old_kind == "rake":
                    new = ("rake", old[1])
                elif old_kind == "compress":
                    new = ("compress",)
                else:
                    new = None
                new_kind = new[0] if new else None
                changed = (
                    v in id_dirty
                    or v in pts_dirty
                    or old_kind != new_kind
                    or (new_kind == "rake" and old[1] != new[1])
                )
                if not changed:
                    continue
                plans[v] = new
                # undo the old move's effect on round k+1
                if old_kind == "rake":
                    _, u, out = old
                    self._pts_remove(u, out, destroyed)
                    self._teardown(out, destroyed)
                    np.add(u)
                elif old_kind == "compress":
                    _, out = old
                    a, b = out.bu, out.bv
                    if a in nxt.adj and nxt.adj[a].get(b) is out:
                        del nxt.adj[a][b]
                        del nxt.adj[b][a]
                        ns.add(a)
                        ns.add(b)
                    self._teardown(out, destroyed)
                rnd.move[v] = None
                ns.add(v)
            # apply the new moves
            for v in sorted(plans):
                new = plans[v]
                if new is None:
                    # pts dirt keeps flowing until the death round consumes it
                    if v in pts_dirty and v in rnd.adj:
                        np.add(v)
                    continue
                if new[0] == "rake":
                    u = new[1]
                    out = self._mk_case2(rnd.adj[v][u], self.pts_root[v], v)
                    created.append(out)
                    rnd.move[v] = ("rake", u, out)
                    self._pts_insert(u, out, created)
                    np.add(u)
                else:
                    (a, ca), (b, cb) = sorted(rnd.adj[v].items())
                    out = self._mk_case3(ca, cb, self.pts_root[v], v)
                    created.append(out)
                    rnd.move[v] = ("compress", out)
                    nxt.adj.setdefault(a, {})[b] = out
                    nxt.adj.setdefault(b, {})[a] = out
                    ns.add(a)
                    ns.add(b)
            # authoritative persistence for every vertex touched this round
            touched = set(plans)
            touched.update(v for v in shape_dirty if v in rnd.adj)
            touched.update(v for v in id_dirty if v in rnd.adj)
            for v in sorted(touched):
                alive_next = v in rnd.adj and not self._will_die(k, v)
                if not alive_next:
                    if v in nxt.adj:
                        for w in list(nxt.adj[v]):
                            other = nxt.adj.get(w)
                            if other is not None:
                                other.pop(v, None)
                            ns.add(w)
                        del nxt.adj[v]
                        ns.add(v)
                    continue
                cur = nxt.adj.setdefault(v, {})
                desired = {}
                for w, cl in rnd.adj[v].items():
                    if not self._will_die(k, w):
                        desired[w] = cl
                for w, cl in cur.items():
                    if self._is_compress_out(k, cl):
                        desired[w] = cl
                for w in list(cur):
                    if w not in desired:
                        del cur[w]
                        other = nxt.adj.get(w)
                        if other is not None:
                            other.pop(v, None)
                        ns.add(v)
                        ns.add(w)
                for w, cl in desired.items():
                    if cur.get(w) is not cl:
                        cur[w] = cl
                        nxt.adj.setdefault(w, {})[v] = cl
                        ni.add(v)
                        ni.add(w)
            shape_dirty, id_dirty, pts_dirty = ns, ni, np
            k += 1
        self._run_callbacks(destroyed, created)
        self._refresh_groups(dirty0)

    def _is_compress_out(self, k, cl):
        if cl.mid is None:
            return False
        mv = self.rounds[k].move.get(cl.mid)
        return mv is not None and mv[0] == "compress" and mv[1] is cl

    def _will_die(self, k, v):
        mv = self.rounds[k].move.get(v)
        return mv is not None and mv[0] in ("rake", "compress")

    def _teardown(self, c, destroyed):
        """Unlink a dead merge output (children survive)."""
        for ch in c.children:
            if ch.parent is c:
                ch.parent = None
        c.children = ()
        destroyed.append(c)

    def _run_callbacks(self, destroyed, created):
        # splits: ancestors first (higher seq merges were created later, but
        # ancestor order is what matters; destroyed sets are ancestor-closed)
        destroyed_set = set(id(c) for c in destroyed)
        order = []
        seen = set()

        def visit(c):
            if id(c) in seen:
                return
            seen.add(id(c))
            p = c.parent
            if p is not None and id(p) in destroyed_set:
                visit(p)
            order.append(c)

        for c in destroyed:
            visit(c)
        for c in order:
            self.counters["splits"] += 1
            self.client.clean(c)
        for c in order:
            self.client.on_destroy(c, True)
            c.parent = None
            c.group = None
        for c in created:
            self.counters["merges"] += 1
            if c.kind != "rake":
                self.client.on_merge(c, True)

    def _terminal_state(self, v):
        """Adjacency of v at its deepest (terminal) round."""
        for j in range(len(self.rounds) - 1, -1, -1):
            nbrs = self.rounds[j].adj.get(v)
            if nbrs is not None:
                return nbrs
        raise AssertionError(f"vertex {v} alive in no round")

    def _refresh_groups(self, dirty0):
        terminals = set()
        for v in dirty0:
            root = self.dummy[v]
            while root.parent is not None:
                root = root.parent
            terminals.add(root.bu)
            if root.bv is not None:
                terminals.add(root.bv)
        for v in sorted(terminals):
            nbrs = self._terminal_state(v)
            if len(nbrs) == 0:
                root = self.pts_root[v]
                root.group = RootGroup((root,), (v,))
            elif len(nbrs) == 1:
                (w,) = nbrs
                edge_cl = nbrs[w]
                p, q = sorted((v, w))
                rp, rq = self.pts_root[p], self.pts_root[q]
                grp = RootGroup((edge_cl, rp, rq), (p, q))
                edge_cl.group = grp
                rp.group = grp
                rq.group = grp
            else:
                raise AssertionError(f"terminal vertex {v} has degree > 1")

    # -- transient expose ---------------------------------------------------

    def transient_expose(self, u, v=None):
        if self._window is not None:
            raise UsageError("nested transient expose")
        targets = (u,) if v is None or v == u else (u, v)
        if len(targets) == 2 and not self.connected(u, v):
            raise UsageError("transient expose of a disconnected pair")
        self.counters["expose_events"] += 1
        # ancestors of the target dummies, root -> leaf order
        chains = []
        collected = set()
        for t in targets:
            chain = []
            c = self.dummy[t].parent
            while c is not None:
                chain.append(c)
                c = c.parent
            chain.reverse()
            chains.append(chain)
        split_order = []
        for chain in chains:
            for c in chain:
                if id(c) not in collected:
                    collected.add(id(c))
                    split_order.append(c)
        split_order.sort(key=self._depth_key)
        pieces = []
        group = self._group_of(u)
        for r in group.roots:
            if id(r) not in collected:
                pieces.append(r)
        hidden = []
        for c in split_order:
            self.counters["tsplits"] += 1
            self.client.clean(c)
            hidden.append((c, c.children))
            for ch in c.children:
                ch.parent = None
                if id(ch) not in collected:
                    pieces.append(ch)
        troots, tcreated = self._contract_pieces(pieces, targets)
        self._window = {
            "hidden": hidden,
            "tcreated": tcreated,
            "roots": troots,
            "targets": targets,
            "group": group,
        }
        return troots

    def _depth_key(self, c):
        d = 0
        p = c.parent
        while p is not None:
            d += 1
            p = p.parent
        return d

    def _contract_pieces(self, pieces, targets):
        """Greedy re-contraction of root pieces with the given boundary."""
        created = []
        pts = {}
        path_adj = {}
        for c in pieces:
            if c.is_path:
                path_adj.setdefault(c.bu, {})[c.bv] = c
                path_adj.setdefault(c.bv, {})[c.bu] = c
            else:
                pts.setdefault(c.bu, []).append(c)

        def fold_points(v):
            items = pts.get(v, [])
            while len(items) > 1:
                nitems = []
                for idx in range(0, len(items) - 1, 2):
                    j = self._mk_case1(items[idx], items[idx + 1], v,
                                       transient=True)
                    created.append(j)
                    self.counters["tmerges"] += 1
                    nitems.append(j)
                if len(items) % 2:
                    nitems.append(items[-1])
                items = nitems
            return items[0] if items else None

        tset = set(targets)
        work = sorted(v for v in path_adj if v not in tset)
        while True:
            progress = False
            for v in list(work):
                nbrs = path_adj.get(v)
                if nbrs is None:
                    continue
                if len(nbrs) == 1:
                    (w,) = nbrs
                    edge_cl = nbrs[w]
                    pt = fold_points(v)
                    if pt is None:
                        raise AssertionError(f"no point piece at raking {v}")
                    out = self._mk_case2(edge_cl, pt, v, transient=True)
                    created.append(out)
                    self.counters["tmerges"] += 1
                    pts.pop(v, None)
                    pts.setdefault(w, []).append(out)
                    del path_adj[v]
                    del path_adj[w][v]
                    progress = True
                elif len(nbrs) == 2:
                    (a, ca), (b, cb) = sorted(nbrs.items())
                    if a == v or b == v:
                        continue
                    pt = fold_points(v)
                    if pt is None:
                        raise AssertionError(f"no point piece at compress {v}")
                    out = self._mk_case3(ca, cb, pt, v, transient=True)
                    created.append(out)
                    self.counters["tmerges"] += 1
                    pts.pop(v, None)
                    del path_adj[v]
                    del path_adj[a][v]
                    del path_adj[b][v]
                    path_adj[a][b] = out
                    path_adj[b][a] = out
                    progress = True
            if not progress:
                break
        if len(targets) == 1:
            roots = (fold_points(targets[0]),)
        else:
            p, q = targets
            if q not in path_adj.get(p, {}):
                raise AssertionError("targets did not reduce to a single edge")
            roots = (path_adj[p][q], fold_points(p), fold_points(q))
        for c in created:
            if c.kind != "rake":
                self.client.on_merge(c, False)
        return roots, created

    def transient_unexpose(self):
        if self._window is None:
            raise UsageError("no transient expose is active")
        win = self._window
        self._window = None
        for c in reversed(win["tcreated"]):
            self.counters["tsplits"] += 1
            for ch in c.children:
                if ch.parent is c:
                    ch.parent = None
            c.children = ()
        for c, kids in reversed(win["hidden"]):
            self.counters["tmerges"] += 1
            c.children = kids
            for ch in kids:
                ch.parent = c
            if c.kind != "rake":
                self.client.on_merge(c, False)
        return win["group"]

    # -- views / audits ------------------------------------------------------------

    def tree_edges(self):
        out = []
        for v, nbrs in self.rounds[0].adj.items():
            for w in nbrs:
                if v < w:
                    out.append((v, w))
        return out

    def clusters(self):
        """All live clusters, leaves first (deterministic order)."""
        out = []
        seen = set()
        stack = [self.dummy[v] for v in range(self.n)]
        for v, nbrs in self.rounds[0].adj.items():
            for w, cl in nbrs.items():
                if v < w:
                    stack.append(cl)
        while stack:
            c = stack.pop()
            if id(c) in seen:
                continue
            seen.add(id(c))
            out.append(c)
            if c.parent is not None:
                stack.append(c.parent)
        return out
