"""Numerical verification toolkit for mod-p Iwasawa-theoretic invariants of
weight-2 newforms: Kurihara numbers, Kolyvagin prime scans, and Mazur-Tate
elements, all computed from modular symbols over F_p.
"""

__version__ = "0.1.0"
