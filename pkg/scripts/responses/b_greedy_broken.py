"""Greedy labels in order of decreasing vertex degree."""


def local_search(instance, formula, varmap, timeout):
    n, k = varmap.meta["n"], varmap.meta["k"]
    adj = {v: set() for v in range(1, n + 1)}
    for line in instance.splitlines()[1:]:
        parts = line.split()
        if len(parts) == 2:
            u, v = int(parts[0]), int(parts[1])
            adj[u].add(v)
            adj[v].add(u)
    label = {}
    for v in sorted(adj, key=degree):
        used = {label[w] for w in adj[v] if w in label}
        free = [c for c in range(1, k + 1) if c not in used]
        label[v] = free[0] if free else pick_least_used(v)
    x = varmap.family("x")
    return {var: label[v] == c for (v, c), var in x.items()}
