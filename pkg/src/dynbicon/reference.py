"""Ground-truth machinery.

* :class:`NaiveCoverLevel` implements the full cover-level interface by
  direct path traversal over explicit per-vertex partitions (one FlatNbh
  per vertex).  It is the behavioral reference the top-tree implementation
  is differenced against, and it doubles as the precondition checker:
  contract violations raise hard errors here.

* :class:`StaticGraphOracle` recomputes articulation points, bridges and
  biconnected components per graph snapshot and answers biconnectivity and
  next-cut-vertex queries from the block-cut tree.

* :func:`check_size_invariant` verifies the per-level component size bound
  that legality of promotions relies on.

* :func:`static_cover_levels` recomputes every adjacent tree pair's cover
  level from scratch, for cross-checking the dynamic structures.

Everything here favors clarity over speed; intended scale is n <= ~256.
"""

from collections import deque

from dynbicon.neighborhood import FlatNbh


class UsageError(Exception):
    pass


def norm_edge(u, v):
    return (u, v) if u <= v else (v, u)


class NaiveCoverLevel:
    """Reference implementation of the restricted cover-level interface."""

    def __init__(self, n, lmax):
        self.n = n
        self.lmax = lmax
        self.size = lmax + 1
        self.adj = [set() for _ in range(n)]
        self.nbh = [FlatNbh(lmax) for _ in range(n)]
        self.marks = [[0] * self.size for _ in range(n)]
        self.exposed = None

    # -- forest navigation ------------------------------------------------

    def _path(self, p, q):
        """Vertex sequence of the tree path p..q (BFS parents)."""
        if p == q:
            return [p]
        prev = {p: None}
        queue = deque([p])
        while queue:
            u = queue.popleft()
            if u == q:
                break
            for t in self.adj[u]:
                if t not in prev:
                    prev[t] = u
                    queue.append(t)
        if q not in prev:
            raise UsageError(f"{p} and {q} are not connected")
        out = [q]
        while out[-1] != p:
            out.append(prev[out[-1]])
        out.reverse()
        return out

    def connected(self, u, v):
        if u == v:
            return True
        seen = {u}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            for t in self.adj[w]:
                if t == v:
                    return True
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return False

    def step_toward(self, u, v):
        """Neighbor of u on the tree path u..v."""
        return self._path(u, v)[1]

    def meet(self, a, b, z):
        """Junction of the three tree paths among a, b, z."""
        pa = self._path(z, a)
        pb = self._path(z, b)
        k = 0
        while k < min(len(pa), len(pb)) and pa[k] == pb[k]:
            k += 1
        return pa[k - 1]

    # -- structural updates ------------------------------------------------

    def link(self, u, v):
        if self.connected(u, v):
            raise UsageError("link would close a cycle")
        self.adj[u].add(v)
        self.adj[v].add(u)
        e = norm_edge(u, v)
        self.nbh[u].insert(e)
        self.nbh[v].insert(e)
        self.exposed = None

    def cut(self, u, v):
        if v not in self.adj[u]:
            raise UsageError("no such tree edge")
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        e = norm_edge(u, v)
        self.nbh[u].delete(e)
        self.nbh[v].delete(e)
        self.exposed = None

    def swap_edge(self, kept, dropped, linked):
        """Replace tree edge (kept, dropped) by (kept, linked).

        At ``kept`` the new edge inherits the old edge's partition classes
        (the covering cycles that crossed the old edge cross the new one,
        entering ``kept`` the same way); elsewhere the old edge is removed
        and the new one starts fresh.
        """
        if dropped not in self.adj[kept]:
            raise UsageError("no such tree edge")
        old = norm_edge(kept, dropped)
        new = norm_edge(kept, linked)
        self.adj[kept].discard(dropped)
        self.adj[dropped].discard(kept)
        self.nbh[dropped].delete(old)
        self.nbh[kept].rename(old, new)
        if self.connected(kept, linked):
            raise UsageError("swap would close a cycle")
        self.adj[kept].add(linked)
        self.adj[linked].add(kept)
        self.nbh[linked].insert(new)
        self.exposed = None

    def expose(self, a, b):
        self._path(a, b)  # connectivity check
        self.exposed = (a, b)

    # -- pair levels -------------------------------------------------------

    def _pair_level(self, x, e1, e2):
        return self.nbh[x].level(e1, e2)

    def _path_pairs(self, pv):
        """(x, e_left, e_right) for each internal vertex of the path."""
        out = []
        for k in range(1, len(pv) - 1):
            x = pv[k]
            out.append((x, norm_edge(pv[k - 1], x), norm_edge(x, pv[k + 1])))
        return out

    def cover_level(self, p, q):
        pv = self._path(p, q)
        if len(pv) <= 2:
            return self.lmax
        return min(self._pair_level(x, e1, e2) for x, e1, e2 in self._path_pairs(pv))

    def min_covered_pair(self, p, q):
        pv = self._path(p, q)
        if len(pv) <= 2:
            raise UsageError("min_covered_pair needs a path of >= 2 edges")
        pairs = self._path_pairs(pv)
        best = min(self._pair_level(x, e1, e2) for x, e1, e2 in pairs)
        for k, (x, e1, e2) in enumerate(pairs):
            if self._pair_level(x, e1, e2) == best:
                return (pv[k], x), (x, pv[k + 2])
        raise AssertionError("unreachable")

    # -- cover updates --------------------------------------------------------

    def cover(self, p, q, i):
        pv = self._path(p, q)
        pairs = self._path_pairs(pv)
        if any(self._pair_level(x, e1, e2) < i - 1 for x, e1, e2 in pairs):
            raise UsageError("cover precondition: path level below i-1")
        for x, e1, e2 in pairs:
            if self._pair_level(x, e1, e2) == i - 1:
                self.nbh[x].zip(e1, e2, i)

    def uniform_uncover(self, p, q, i):
        if self.exposed is None:
            raise UsageError("uniform_uncover outside an exposed path")
        epath = self._path(*self.exposed)
        if p not in epath or q not in epath:
            raise UsageError("uniform_uncover outside the exposed path")
        pv = self._path(p, q)
        if len(pv) <= 2:
            return
        pairs = self._path_pairs(pv)
        levels = [self._pair_level(x, e1, e2) for x, e1, e2 in pairs]
        if any(lv < i for lv in levels):
            raise UsageError("uniform_uncover precondition: level below i")
        for (x, e1, e2), lv in zip(pairs, levels):
            if lv == i:
                nb = self.nbh[x]
                left = nb.members[i][nb.cls[i][e1]]
                up1 = nb.members[i + 1][nb.cls[i + 1][e1]] if i + 1 <= self.lmax else {e1}
                up2 = nb.members[i + 1][nb.cls[i + 1][e2]] if i + 1 <= self.lmax else {e2}
                if left != up1 | up2:
                    raise UsageError("uniform_uncover: pair is not uniform")
        for (x, e1, e2), lv in zip(pairs, levels):
            if lv == i:
                self.nbh[x].unzip(e1, e2, i)

    def local_uncover(self, e1, e2, i):
        common = set(e1) & set(e2)
        if len(common) != 1:
            raise UsageError("edges are not adjacent")
        x = common.pop()
        e1, e2 = norm_edge(*e1), norm_edge(*e2)
        if self._pair_level(x, e1, e2) != i:
            raise UsageError("local_uncover precondition: pair level is not i")
        self.nbh[x].unzip(e1, e2, i)

    # -- reachability -----------------------------------------------------------

    def _reach_from(self, e, c, i, on_path):
        """Vertices i-reachable from edge e through endpoint c (c included)."""
        out = {c}
        stack = [(norm_edge(*e), c)]
        while stack:
            prev, v = stack.pop()
            for t in self.adj[v]:
                f = norm_edge(v, t)
                if f == prev or f in on_path:
                    continue
                if self.nbh[v].level(prev, f) >= i:
                    if t not in out:
                        out.add(t)
                        stack.append((f, t))
        return out

    def find_size(self, p, q, i):
        pv = self._path(p, q)
        on_path = {norm_edge(pv[k], pv[k + 1]) for k in range(len(pv) - 1)}
        reach = set(pv)
        for k in range(len(pv) - 1):
            e = (pv[k], pv[k + 1])
            reach |= self._reach_from(e, pv[k], i, on_path)
            reach |= self._reach_from(e, pv[k + 1], i, on_path)
        return len(reach)

    def find_size_vector(self, p, q):
        return [self.find_size(p, q, i) for i in range(self.size)]

    # -- marks ---------------------------------------------------------------------

    def set_mark(self, u, i, flag):
        self.marks[u][i] = 1 if flag else 0

    def is_marked(self, u, i):
        return bool(self.marks[u][i])

    def find_first_reach(self, p, q, i):
        pv = self._path(p, q)
        if len(pv) < 2:
            return (None, None, None)
        on_path = {norm_edge(pv[k], pv[k + 1]) for k in range(len(pv) - 1)}
        for k in range(len(pv) - 1):
            a, b = pv[k], pv[k + 1]
            for c in (a, b):
                marked = sorted(
                    y
                    for y in self._reach_from((a, b), c, i, on_path)
                    if self.marks[y][i]
                )
                if marked:
                    return ((a, b), c, marked[0])
        return (None, None, None)

    def find_strong_reach(self, p, q, e, b, i):
        pv = self._path(p, q)
        on_path = {norm_edge(pv[k], pv[k + 1]) for k in range(len(pv) - 1)}
        e = norm_edge(*e)
        if e not in on_path or b not in e:
            raise UsageError("find_strong_reach: edge not on the path")
        found = set()
        for t in self.adj[b]:
            f = norm_edge(b, t)
            if f == e or f in on_path:
                continue
            if self.nbh[b].level(e, f) >= i + 1:
                for y in self._reach_from((b, t), t, i, on_path):
                    if self.marks[y][i]:
                        found.add(y)
        return min(found) if found else None

    # -- audit hooks ------------------------------------------------------------

    def pair_levels(self):
        """{(x, e1, e2): level} over all adjacent tree pairs (e1 < e2)."""
        out = {}
        for x in range(self.n):
            inc = sorted(norm_edge(x, t) for t in self.adj[x])
            for ii in range(len(inc)):
                for jj in range(ii + 1, len(inc)):
                    out[(x, inc[ii], inc[jj])] = self.nbh[x].level(inc[ii], inc[jj])
        return out


# --- static graph oracle ------------------------------------------------------


def biconnected_components(n, edges):
    """Blocks (lists of edges) plus articulation points, iteratively."""
    adj = [[] for _ in range(n)]
    for idx, (u, v) in enumerate(edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    disc = [0] * n
    low = [0] * n
    state = [0] * n  # 0 unvisited
    timer = 1
    blocks = []
    arts = set()
    estack = []
    for root in range(n):
        if disc[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        root_children = 0
        while stack:
            v, pe, it = stack[-1]
            advanced = False
            for t, idx in it:
                if idx == pe:
                    continue
                if not disc[t]:
                    estack.append(idx)
                    disc[t] = low[t] = timer
                    timer += 1
                    stack.append((t, idx, iter(adj[t])))
                    advanced = True
                    break
                elif disc[t] < disc[v]:
                    estack.append(idx)
                    if disc[t] < low[v]:
                        low[v] = disc[t]
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
                if low[v] >= disc[u]:
                    block = []
                    while True:
                        idx = estack.pop()
                        block.append(edges[idx])
                        if idx == pe:
                            break
                    blocks.append(block)
                    if u == root:
                        root_children += 1
                    else:
                        arts.add(u)
        if root_children > 1:
            arts.add(root)
    return blocks, arts


class StaticGraphOracle:
    """Block-cut-tree answers for one graph snapshot."""

    def __init__(self, n, edges):
        self.n = n
        self.edges = [norm_edge(u, v) for u, v in edges]
        self.blocks, self.arts = biconnected_components(n, self.edges)
        self.block_vertices = [sorted({w for e in blk for w in e}) for blk in self.blocks]
        self.vertex_blocks = [[] for _ in range(n)]
        for bi, verts in enumerate(self.block_vertices):
            for w in verts:
                self.vertex_blocks[w].append(bi)
        # connectivity for same-component tests
        self.comp = list(range(n))
        parent = self.comp

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        self._find = find

    def same_component(self, u, v):
        return self._find(u) == self._find(v)

    def are_biconnected(self, u, v):
        if u == v or not self.same_component(u, v):
            return False
        common = set(self.vertex_blocks[u]) & set(self.vertex_blocks[v])
        for bi in common:
            if len(self.blocks[bi]) >= 2:
                return True
        return False

    def _bc_tree(self):
        """Adjacency of the block-cut tree: ('b', i) and ('v', x) nodes."""
        adj = {}
        for bi, verts in enumerate(self.block_vertices):
            bnode = ("b", bi)
            adj.setdefault(bnode, [])
            for w in verts:
                if w in self.arts:
                    vnode = ("v", w)
                    adj.setdefault(vnode, []).append(bnode)
                    adj[bnode].append(vnode)
        return adj

    def next_cut_vertex(self, u, v):
        """First articulation point separating u from v (closest to u); v if none."""
        if not self.same_component(u, v):
            raise UsageError("next_cut_vertex on a disconnected pair")
        if u == v:
            return v
        adj = self._bc_tree()
        # attach u and v to their block(s) / articulation node
        start = ("v", u) if u in self.arts else ("b", self.vertex_blocks[u][0])
        goal = ("v", v) if v in self.arts else ("b", self.vertex_blocks[v][0])
        if start == goal:
            return v
        prev = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node == goal:
                break
            for t in adj.get(node, ()):
                if t not in prev:
                    prev[t] = node
                    queue.append(t)
        if goal not in prev:
            return v  # same block fallback
        path = [goal]
        while path[-1] != start:
            path.append(prev[path[-1]])
        path.reverse()
        for node in path:
            kind, val = node
            if kind == "v" and val not in (u, v):
                return val
        return v


def check_size_invariant(n, edge_levels, lmax, base=2):
    """Per-level block size bound; returns (True, None) or (False, witness).

    ``edge_levels`` maps each edge to its level: tree edges count at every
    level, a non-tree edge of level j is present in levels i <= j.
    """
    for i in range(lmax + 1):
        edges_i = [e for e, lv in edge_levels.items() if lv == "tree" or lv >= i]
        blocks, _ = biconnected_components(n, edges_i)
        limit = -(-n // base**i)
        for blk in blocks:
            if len(blk) < 2:
                continue  # a lone bridge is not a biconnected component
            verts = {w for e in blk for w in e}
            if len(verts) > limit:
                return False, (i, sorted(verts))
    return True, None


def static_cover_levels(n, tree_edges, nontree_levels, lmax):
    """{(x, e1, e2): level} recomputed from scratch for adjacent tree pairs."""
    tree_edges = [norm_edge(u, v) for u, v in tree_edges]
    tset = set(tree_edges)
    out = {}
    adj = [[] for _ in range(n)]
    for u, v in tree_edges:
        adj[u].append(v)
        adj[v].append(u)
    for x in range(n):
        inc = sorted(norm_edge(x, t) for t in adj[x])
        for ii in range(len(inc)):
            for jj in range(ii + 1, len(inc)):
                out[(x, inc[ii], inc[jj])] = -1
    for i in range(lmax + 1):
        edges_i = tree_edges + [
            norm_edge(u, v) for (u, v), lv in nontree_levels.items() if lv >= i
        ]
        blocks, _ = biconnected_components(n, edges_i)
        for blk in blocks:
            bset = {norm_edge(u, v) for u, v in blk}
            tree_in_block = bset & tset
            per_vertex = {}
            for e in tree_in_block:
                for w in e:
                    per_vertex.setdefault(w, []).append(e)
            for x, es in per_vertex.items():
                es.sort()
                for ii in range(len(es)):
                    for jj in range(ii + 1, len(es)):
                        key = (x, es[ii], es[jj])
                        if key in out and out[key] < i:
                            out[key] = i
    return out
