"""Strongly connected components (iterative Tarjan)."""


def strongly_connected_components(vertices, neighbours):
    """Return the SCCs of the graph as a list of sets, in reverse topological order.

    ``neighbours(v)`` gives the successors of ``v``.  Vertices reachable from
    ``vertices`` but not listed in it are visited too.
    """
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    result = []
    counter = 0

    for root in vertices:
        if root in index:
            continue
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(neighbours(root)))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(neighbours(w))))
                    break
                if w in on_stack and index[w] < lowlink[v]:
                    lowlink[v] = index[w]
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    if lowlink[v] < lowlink[u]:
                        lowlink[u] = lowlink[v]
                if lowlink[v] == index[v]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.add(w)
                        if w == v:
                            break
                    result.append(comp)
    return result
