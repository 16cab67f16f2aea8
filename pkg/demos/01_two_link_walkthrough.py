"""
Two links, three regimes
========================

A symmetric pair with unit direct gains, cross gain ``g``, noise 0.1,
target SINR 1 and budget 0.2 W per link. Normalizing gives ``c = 0.5`` and
``A = [[1, -g], [-g, 1]]``, so everything can be checked by hand:

* ``g = 0.4``: ``rho(I - A) = 0.4`` and ``q* = 0.5 / 0.6 = 5/6``, both links fit.
* ``g = 0.6``: ``q* = 1.25`` overshoots the budget.
* ``g = 1.2``: ``rho = 1.2``; no finite power vector works.
"""
import numpy as np

from jpac import build_normalized, foschini_miljanic, is_supportable, necessary_condition, run_nlpd, run_pnmd
from jpac.verify import two_link

for g in (0.4, 0.6, 1.2):
    net = two_link(g)
    chan = build_normalized(net)
    cert = is_supportable(chan)
    print(f"\ng = {g}")
    print("  A =", chan.A.tolist(), " c =", chan.c.tolist())
    print(f"  certificate: feasible={cert.feasible} reason={cert.reason.value} rho={cert.rho:.4f}")
    if cert.qstar is not None:
        print("  q* =", np.round(cert.qstar, 6))
    print(f"  necessary-condition margin: {necessary_condition(chan).margin:+.3f}")

    # Foschini-Miljanic from zero: 0.5, 0.7, 0.78, ... when feasible
    trace, converged = foschini_miljanic(chan, max_iter=200)
    print("  first FM iterates:", [np.round(q, 4).tolist() for q in trace[:4]], "converged:", converged)

    for res in (run_nlpd(net), run_pnmd(net)):
        print(f"  {res.algorithm}: admits {[k + 1 for k in res.supported]} "
              f"with powers {np.round(res.powers_watts, 6).tolist()} W")
