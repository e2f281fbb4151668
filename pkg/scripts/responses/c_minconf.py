"""Greedy start, then min-conflicts moves on the label of a clashing vertex."""
import random
import time

SEED = 11
NOISE = 0.2
MAX_MOVES = 30000


def local_search(instance, formula, varmap, timeout):
    start = time.monotonic()
    rng = random.Random(SEED)
    n, k = varmap.meta["n"], varmap.meta["k"]
    adj = {v: [] for v in range(1, n + 1)}
    for line in instance.splitlines()[1:]:
        parts = line.split()
        if len(parts) == 2:
            u, v = int(parts[0]), int(parts[1])
            adj[u].append(v)
            adj[v].append(u)
    label = {}
    for v in sorted(adj, key=lambda u: (-len(adj[u]), u)):
        clash = [0] * (k + 1)
        for w in adj[v]:
            if w in label:
                clash[label[w]] += 1
        label[v] = min(range(1, k + 1), key=lambda c: (clash[c], c))
    for _ in range(MAX_MOVES):
        if time.monotonic() - start > 0.8 * timeout:
            break
        bad = [v for v in range(1, n + 1) if any(label[w] == label[v] for w in adj[v])]
        if not bad:
            break
        v = bad[rng.randrange(len(bad))]
        counts = [0] * (k + 1)
        for w in adj[v]:
            counts[label[w]] += 1
        options = [c for c in range(1, k + 1) if c != label[v]]
        if rng.random() < NOISE:
            label[v] = options[rng.randrange(len(options))]
        else:
            best = min(counts[c] for c in options)
            ties = [c for c in options if counts[c] == best]
            label[v] = ties[rng.randrange(len(ties))]
    x = varmap.family("x")
    return {var: label[v] == c for (v, c), var in x.items()}
