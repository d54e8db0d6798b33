"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way (explicit loops, exact
integer/rational arithmetic where possible) and deliberately avoids the
vectorized code paths of the library under test.
"""

from itertools import combinations

import numpy as np
import sympy


# ---------------------------------------------------------------------------
# exact linear algebra over the integers / rationals


def exact_rank(M) -> int:
    """Rank over the rationals, exact (no floating point)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return int(sympy.Matrix(M.tolist()).rank())


def boundary_oracle(q_simplices, faces):
    """Signed incidence matrix built by explicit face enumeration.

    faces indexes the (q-1)-simplices; dropping vertex position i of a
    sorted simplex contributes (-1)^i.
    """
    index = {f: i for i, f in enumerate(faces)}
    B = np.zeros((len(faces), len(q_simplices)), dtype=np.int64)
    for j, s in enumerate(q_simplices):
        for i in range(len(s)):
            face = tuple(s[:i] + s[i + 1:])
            B[index[face], j] = (-1) ** i
    return B


def betti_oracle(simplices: dict, q: int) -> int:
    """beta_q = dim C_q - rank B_q - rank B_{q+1}, all ranks exact."""
    c_q = simplices.get(q, ())
    if not c_q:
        return 0
    if q == 0:
        rank_bq = 0
    else:
        rank_bq = exact_rank(boundary_oracle(c_q, simplices.get(q - 1, ())))
    c_q1 = simplices.get(q + 1, ())
    rank_bq1 = exact_rank(boundary_oracle(c_q1, c_q)) if c_q1 else 0
    return len(c_q) - rank_bq - rank_bq1


def persistent_betti_oracle(small: dict, big: dict, q: int) -> int:
    """Persistent beta via exact ranks.

    dim ker B_q(small) minus the rank of the (q+1)-boundary of the big
    complex restricted to chains whose boundary stays in the small one.
    The restricted rank equals rank(B) - rank(rows outside the small
    complex), because the kernel of the outside rows contains the kernel
    of the whole map.
    """
    c_q_small = small.get(q, ())
    if not c_q_small:
        return 0
    if q == 0:
        rank_bq = 0
    else:
        rank_bq = exact_rank(boundary_oracle(c_q_small, small.get(q - 1, ())))
    dim_ker = len(c_q_small) - rank_bq

    c_q1_big = big.get(q + 1, ())
    if not c_q1_big:
        return dim_ker
    rows_big = big.get(q, ())
    B = boundary_oracle(c_q1_big, rows_big)
    in_small = set(c_q_small)
    outside = [i for i, s in enumerate(rows_big) if s not in in_small]
    rank_restricted = exact_rank(B) - (exact_rank(B[outside, :]) if outside else 0)
    return dim_ker - rank_restricted


def connected_components(n_vertices: int, edges) -> int:
    """Union-find over an explicit edge list."""
    parent = list(range(n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(i) for i in range(n_vertices)})


def random_vr_simplices(rng, n_points=8, max_dim=2):
    """Clique complex of a random epsilon graph, built by brute force.

    epsilon is redrawn until it clears every pairwise distance by a wide
    margin, so the edge set cannot flip on floating-point noise.
    """
    pts = rng.uniform(size=(int(rng.integers(3, n_points + 1)), int(rng.integers(2, 4))))
    n = pts.shape[0]
    dists = {
        (a, b): float(np.linalg.norm(pts[a] - pts[b]))
        for a, b in combinations(range(n), 2)
    }
    while True:
        eps = float(rng.uniform(0.2, 1.0))
        if all(abs(d - eps) > 1e-6 for d in dists.values()):
            break
    simplices = {0: tuple((i,) for i in range(n))}
    for q in range(1, max_dim + 1):
        level = []
        for combo in combinations(range(n), q + 1):
            if all(dists[a, b] <= eps for a, b in combinations(combo, 2)):
                level.append(combo)
        simplices[q] = tuple(level)
    return pts, eps, simplices


# ---------------------------------------------------------------------------
# classification and metrics


def knn_oracle(train_X, train_y, test_X, k, n_classes):
    """Brute-force nearest neighbours with the documented tie rules."""
    train_X = np.asarray(train_X, dtype=np.float64)
    test_X = np.asarray(test_X, dtype=np.float64)
    preds = []
    scores = []
    for x in test_X:
        dist = [float(np.sqrt(((x - t) ** 2).sum())) for t in train_X]
        order = sorted(range(len(dist)), key=lambda i: (dist[i], i))[:k]
        counts = [0] * n_classes
        cumdist = [0.0] * n_classes
        for i in order:
            counts[train_y[i]] += 1
            cumdist[train_y[i]] += dist[i]
        top = max(counts)
        best = None
        for c in range(n_classes):
            if counts[c] != top:
                continue
            if best is None or cumdist[c] < cumdist[best]:
                best = c
        preds.append(best)
        scores.append([cnt / k for cnt in counts])
    return np.asarray(preds, dtype=np.int64), np.asarray(scores, dtype=np.float64)


def macro_oracle(confusion):
    """Per-class counting with the zero-denominator-to-zero convention."""
    C = np.asarray(confusion)
    c = C.shape[0]
    total = int(C.sum())
    correct = sum(int(C[j, j]) for j in range(c))
    recalls, precisions = [], []
    for j in range(c):
        tp = int(C[j, j])
        fn = int(C[j].sum()) - tp
        fp = int(C[:, j].sum()) - tp
        recalls.append(tp / (tp + fn) if tp + fn > 0 else 0.0)
        precisions.append(tp / (tp + fp) if tp + fp > 0 else 0.0)
    rec = sum(recalls) / c
    pre = sum(precisions) / c
    f1 = 2 * pre * rec / (pre + rec) if pre + rec > 0 else 0.0
    return {"acc": correct / total, "macro_rec": rec, "macro_pre": pre, "macro_f1": f1}


def auc_score_oracle(score, positive):
    """Pairwise ranking probability: ties get half credit."""
    pos = [s for s, p in zip(score, positive) if p]
    neg = [s for s, p in zip(score, positive) if not p]
    wins = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                wins += 1.0
            elif sp == sn:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def auc_hard_oracle(y_true, y_pred, n_classes):
    """Mean one-vs-rest balanced accuracy over classes present in truth."""
    y_true = list(y_true)
    y_pred = list(y_pred)
    values = []
    for c in range(n_classes):
        pos = [t == c for t in y_true]
        n_pos = sum(pos)
        n_neg = len(pos) - n_pos
        if n_pos == 0 or n_neg == 0:
            values.append(0.0)
            continue
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        values.append(0.5 * (tp / n_pos + (1 - fp / n_neg)))
    return sum(values) / n_classes


def l21_oracle(M):
    M = np.asarray(M, dtype=np.float64)
    total = 0.0
    for row in M:
        total += float(np.sqrt(sum(v * v for v in row)))
    return total


def quadratic_oracle(Q, W):
    """0.5 * sum_ij W_ij ||q_i - q_j||^2, both orderings counted."""
    Q = np.asarray(Q, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    total = 0.0
    for i in range(W.shape[0]):
        for j in range(W.shape[1]):
            d = Q[i] - Q[j]
            total += W[i, j] * float(d @ d)
    return 0.5 * total
