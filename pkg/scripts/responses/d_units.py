"""Satisfy the long clauses first by setting one literal each, leave the rest unset."""


def local_search(instance, formula, varmap, timeout):
    out = {}
    for cl in sorted(formula.clauses, key=len, reverse=True):
        if len(cl) < 3:
            break
        if any(out.get(abs(l)) == (l > 0) for l in cl):
            continue
        for lit in cl:
            if abs(lit) not in out:
                out[abs(lit)] = lit > 0
                for other in cl:
                    out.setdefault(abs(other), other < 0)
                break
    return out
