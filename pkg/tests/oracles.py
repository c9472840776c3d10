"""Brute-force oracles used to derive expected values.

Nothing here calls the package's search, orbit, or evaluation code: inputs
are plain multiplication tables, permutation lists and words.
"""

from __future__ import annotations

import itertools


def compose(p, q):
    return tuple(p[i] for i in q)


def table_inverse(table):
    n = len(table)
    return [next(b for b in range(n) if table[a][b] == 0) for a in range(n)]


def is_hom_map(table, f):
    n = len(table)
    return all(f[table[a][b]] == table[f[a]][f[b]] for a in range(n) for b in range(n))


def automorphism_count(table):
    n = len(table)
    return sum(1 for p in itertools.permutations(range(n)) if is_hom_map(table, p))


def conjugacy_partition(table):
    n = len(table)
    inv = table_inverse(table)
    classes = []
    seen = set()
    for a in range(n):
        if a in seen:
            continue
        cls = {table[table[g][a]][inv[g]] for g in range(n)}
        seen |= cls
        classes.append(sorted(cls))
    return classes


def burnside_hom_classes(table, rank):
    """|Hom(F_rank, G)/conj| = (1/|G|) sum_g |C(g)|^rank."""
    n = len(table)
    total = 0
    for g in range(n):
        fixed = sum(1 for tup in itertools.product(range(n), repeat=rank)
                    if all(table[g][x] == table[x][g] for x in tup))
        total += fixed
    assert total % n == 0
    return total // n


def naive_reduce(word):
    w = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                del w[i:i + 2]
                changed = True
                break
    return tuple(w)


def isomorphic(t1, t2):
    n = len(t1)
    if n != len(t2):
        return False
    for p in itertools.permutations(range(n)):
        if p[0] == 0 and all(p[t1[a][b]] == t2[p[a]][p[b]] for a in range(n) for b in range(n)):
            return True
    return False


# -- crossed morphisms, evaluated left to right -----------------------------

def crossed_value(table, inv, actions, values, word):
    """rho(w x) = rho(w) * phi_w(rho(x)), scanning the word left to right."""
    n = len(table)
    acc = 0
    acting = tuple(range(n))  # phi_w as an image array
    inv_actions = [tuple(sorted(range(n), key=lambda y: a[y])) for a in actions]
    for x in word:
        if x > 0:
            a = actions[x - 1]
            r = values[x - 1]
        else:
            a = inv_actions[-x - 1]
            r = a[inv[values[-x - 1]]]
        acc = table[acc][acting[r]]
        acting = compose(acting, a)
    return acc


def crossed_grid(table, actions, relators, ngens):
    inv = table_inverse(table)
    n = len(table)
    return [v for v in itertools.product(range(n), repeat=ngens)
            if all(crossed_value(table, inv, actions, v, r) == 0 for r in relators)]


def h1_count(table, actions, relators, ngens):
    """Orbits of m.rho = m rho(g) phi_g(m)^-1 on the crossed grid, via the whole group."""
    inv = table_inverse(table)
    n = len(table)
    remaining = set(crossed_grid(table, actions, relators, ngens))
    count = 0
    while remaining:
        v = remaining.pop()
        for m in range(n):
            w = tuple(table[table[m][r]][inv[a[m]]] for r, a in zip(v, actions))
            remaining.discard(w)
        count += 1
    return count


# -- Cech cocycles ----------------------------------------------------------

def cech_count(npatches, pairs, triples, table, twist=None):
    """Brute force: every value assignment on pairs i<j, triple law, orbits
    under the whole gauge group Gamma^V."""
    n = len(table)
    inv = table_inverse(table)
    ident = tuple(range(n))
    twist = twist or {}
    kap = {p: tuple(twist.get(p, ident)) for p in pairs}
    index = {p: k for k, p in enumerate(pairs)}
    valid = []
    for vals in itertools.product(range(n), repeat=len(pairs)):
        ok = True
        for i, j, k in triples:
            gij, gjk, gik = vals[index[(i, j)]], vals[index[(j, k)]], vals[index[(i, k)]]
            if table[gij][kap[(i, j)][gjk]] != gik:
                ok = False
                break
        if ok:
            valid.append(vals)
    remaining = set(valid)
    count = 0
    while remaining:
        v = remaining.pop()
        for u in itertools.product(range(n), repeat=npatches):
            w = tuple(table[table[u[i]][v[index[(i, j)]]]][kap[(i, j)][inv[u[j]]]] for i, j in pairs)
            remaining.discard(w)
        count += 1
    return count, len(valid)


# -- mapped coefficients for pi = Z/2 acting on itself ----------------------

def maps_z2_on_itself_h1(gamma_table):
    """H^1(Z/2, Maps(Z/2, Gamma)) with trivial action on Gamma, computed on
    pairs (alpha(0), alpha(1)) with s swapping the coordinates."""
    n = len(gamma_table)
    inv = table_inverse(gamma_table)
    elems = list(itertools.product(range(n), repeat=2))

    def mul(a, b):
        return (gamma_table[a[0]][b[0]], gamma_table[a[1]][b[1]])

    def act(a):
        return (a[1], a[0])

    def minv(a):
        return (inv[a[0]], inv[a[1]])

    e = (0, 0)
    crossed = [r for r in elems if mul(r, act(r)) == e]  # rho(s^2) = rho(s) s.rho(s)
    remaining = set(crossed)
    count = 0
    while remaining:
        r = remaining.pop()
        for m in elems:
            remaining.discard(mul(mul(m, r), minv(act(m))))
        count += 1
    return count, len(crossed)


def torsor_morphism_count(edges, action_p, action_q, trans_p, trans_q):
    """Fibrewise bijections u with u(p.g) = u(p).g and tq(u(p)) = u(tp(p)).

    Every permutation of every fibre is tried for equivariance; the
    surviving per-fibre maps are then combined and checked on edges.
    """
    choices = []
    for ap, aq in zip(action_p, action_q):
        n = len(ap)
        choices.append([u for u in itertools.permutations(range(n))
                        if all(u[ap[p][g]] == aq[u[p]][g] for p in range(n) for g in range(len(ap[p])))])
    count = 0
    for us in itertools.product(*choices):
        if all(trans_q[k][us[u][p]] == us[v][trans_p[k][p]]
               for k, (u, v) in enumerate(edges) for p in range(len(action_p[u]))):
            count += 1
    return count
