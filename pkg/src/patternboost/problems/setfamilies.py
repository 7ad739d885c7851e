"""Chain structure in families of subsets: saturated k-Sperner families and
cross-Sperner tuples.

Subsets of {1..n} are n-bit masks (element i -> bit i-1).  A chain is a
sequence of strictly nested distinct sets; its length is the number of sets.
"""

from __future__ import annotations

from itertools import combinations


def _sorted_by_size(masks) -> list[int]:
    return sorted(set(masks), key=lambda m: (m.bit_count(), m))


def longest_chain(family, extra: int | None = None) -> int:
    """Length of the longest nested chain within the family, optionally with
    one extra set added; longest-path DP over the subset-relation DAG."""
    masks = set(family)
    if extra is not None:
        masks.add(extra)
    order = _sorted_by_size(masks)
    best = {}
    result = 0
    for i, m in enumerate(order):
        b = 1
        for j in range(i):
            t = order[j]
            if t != m and (t & m) == t and best[t] + 1 > b:
                b = best[t] + 1
        best[m] = b
        result = max(result, b)
    return result


def _chain_ends(order: list[int]) -> tuple[dict[int, int], dict[int, int]]:
    """Longest chain ending at / starting from each member (member included)."""
    end = {}
    for i, m in enumerate(order):
        b = 1
        for j in range(i):
            t = order[j]
            if (t & m) == t and end[t] + 1 > b:
                b = end[t] + 1
        end[m] = b
    start = {}
    for i in range(len(order) - 1, -1, -1):
        m = order[i]
        b = 1
        for j in range(i + 1, len(order)):
            t = order[j]
            if (m & t) == m and start[t] + 1 > b:
                b = start[t] + 1
        start[m] = b
    return end, start


def chain_through(family, s: int) -> int:
    """Longest chain in family ∪ {s} that passes through s."""
    if s in set(family):
        order = _sorted_by_size(family)
        end, start = _chain_ends(order)
        return end[s] + start[s] - 1
    down, up = _down_up(_sorted_by_size(family), s)
    return down + 1 + up


def _down_up(order: list[int], s: int) -> tuple[int, int]:
    end, start = _chain_ends(order)
    down = max((end[m] for m in order if m != s and (m & s) == m), default=0)
    up = max((start[m] for m in order if m != s and (m & s) == s), default=0)
    return down, up


def is_k_sperner(family, k: int) -> bool:
    return longest_chain(family) <= k


def is_saturated_k_sperner(family, n: int, k: int) -> bool:
    """k-Sperner, and adding any absent subset of {1..n} creates a chain of
    length k+1.  Since the family itself has no (k+1)-chain, any new long
    chain must pass through the added set, so the check reduces to the
    longest chains below and above each absent mask."""
    members = set(family)
    order = _sorted_by_size(members)
    if order and longest_chain(order) > k:
        return False
    end, start = _chain_ends(order)
    for s in range(1 << n):
        if s in members:
            continue
        down = max((end[m] for m in order if (m & s) == m and m != s), default=0)
        up = max((start[m] for m in order if (m & s) == s and m != s), default=0)
        if down + 1 + up < k + 1:
            return False
    return True


def addable_sets(family, n: int, k: int) -> list[int]:
    """Absent masks whose addition keeps the family k-Sperner."""
    members = set(family)
    order = _sorted_by_size(members)
    end, start = _chain_ends(order)
    out = []
    for s in range(1 << n):
        if s in members:
            continue
        down = max((end[m] for m in order if (m & s) == m and m != s), default=0)
        up = max((start[m] for m in order if (m & s) == s and m != s), default=0)
        if down + 1 + up <= k:
            out.append(s)
    return out


def score_sperner(family, n: int, k: int) -> int:
    """-|F| for saturated k-Sperner families; otherwise -|F| minus the number
    of sets that could still be added (an ad hoc stand-in score; the
    saturation verifier is exact regardless)."""
    members = set(family)
    if longest_chain(members) > k:
        # repair distance is not modelled; count over-length as unsaturated
        return -len(members) - (1 << n)
    extra = len(addable_sets(members, n, k))
    return -len(members) - extra


def local_search_sperner(family, n: int, k: int, rng) -> frozenset[int]:
    """Delete a random member of a longest chain while any chain exceeds k,
    then add random sets that keep the family k-Sperner until saturated."""
    members = set(m for m in family if 0 <= m < (1 << n))
    while longest_chain(members) > k:
        chain = _witness_longest_chain(members)
        members.discard(chain[rng.integers(len(chain))])
    end, start = _chain_ends(_sorted_by_size(members))
    for t in rng.permutation(1 << n):
        s = int(t)
        if s in members:
            continue
        down = max((end[m] for m in members if (m & s) == m), default=0)
        up = max((start[m] for m in members if (m & s) == s), default=0)
        if down + 1 + up <= k:
            members.add(s)
            end, start = _chain_ends(_sorted_by_size(members))
    return frozenset(members)


def _witness_longest_chain(family) -> list[int]:
    order = _sorted_by_size(family)
    best = {}
    prev = {}
    top = None
    for i, m in enumerate(order):
        b, p = 1, None
        for j in range(i):
            t = order[j]
            if (t & m) == t and t != m and best[t] + 1 > b:
                b, p = best[t] + 1, t
        best[m], prev[m] = b, p
        if top is None or best[m] > best[top]:
            top = m
    chain = []
    while top is not None:
        chain.append(top)
        top = prev[top]
    return chain


# ---------------------------------------------------------------------------
# cross-Sperner tuples


def cross_sperner_violation(families) -> tuple[int, int, int, int] | None:
    """Lexicographically least (i, A, j, B) with A in F_i, B in F_j, i != j
    and A ⊆ B; None when the tuple is cross-Sperner."""
    best = None
    for i, fi in enumerate(families):
        for a in sorted(fi):
            for j, fj in enumerate(families):
                if i == j:
                    continue
                for b in sorted(fj):
                    if (a & b) == a:
                        cand = (i, a, j, b)
                        if best is None or cand < best:
                            best = cand
                if best is not None and best[:2] == (i, a):
                    # smaller (i, A) can no longer appear
                    return best
    return best


def is_cross_sperner(families) -> bool:
    for i, fi in enumerate(families):
        for j, fj in enumerate(families):
            if i == j:
                continue
            for a in fi:
                for b in fj:
                    if (a & b) == a:
                        return False
    return True


def repair_cross_sperner(families) -> list[set[int]]:
    """Repeatedly find the lexicographically least violating pair (i, A, j, B)
    with A ⊆ B and delete B from F_j; deterministic and terminating."""
    fams = [set(f) for f in families]
    while True:
        v = cross_sperner_violation(fams)
        if v is None:
            return fams
        _, _, j, b = v
        fams[j].discard(b)


def score_cross_sperner(families) -> int:
    """Product of family sizes after repairing violations."""
    fams = repair_cross_sperner(families)
    prod = 1
    for f in fams:
        prod *= len(f)
    return prod


def local_search_cross(families, n: int, rng) -> tuple[frozenset[int], ...]:
    """Repair, then add random (set, family) pairs preserving the
    cross-Sperner condition until maximal."""
    fams = repair_cross_sperner(
        [set(m for m in f if 0 <= m < (1 << n)) for f in families]
    )
    k = len(fams)
    slots = [(s, j) for s in range(1 << n) for j in range(k)]
    for t in rng.permutation(len(slots)):
        s, j = slots[t]
        if s in fams[j]:
            continue
        ok = True
        for i in range(k):
            if i == j:
                continue
            for a in fams[i]:
                if (a & s) == a or (a & s) == s:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            fams[j].add(s)
    return tuple(frozenset(f) for f in fams)


def is_maximal_cross_sperner(families, n: int) -> bool:
    if not is_cross_sperner(families):
        return False
    fams = [set(f) for f in families]
    for j in range(len(fams)):
        for s in range(1 << n):
            if s in fams[j]:
                continue
            ok = True
            for i in range(len(fams)):
                if i == j:
                    continue
                if any((a & s) == a or (a & s) == s for a in fams[i]):
                    ok = False
                    break
            if ok:
                return False
    return True
