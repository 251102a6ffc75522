"""Polygonal billiards with retro-reflecting (parity-flipping) sides.

The heavy lifting happens in the C++ extension ``_core``: exact rational or
float64 polygon tables, the retro-reflecting orbit engine, renderers, and
the numerical verification routines. This package re-exports the public
surface.

Quick start::

    import andreev_billiards as ab

    table = ab.make_square(andreev_sides=[1])
    orbit = ab.simulate(table, pos=("1/2", "1/2"), direction="0/1")
    for e in orbit.events:
        print(e.side, e.kind, e.parity_after)
    open("orbit.svg", "w").write(orbit.svg())
"""

from ._core import (
    Event,
    Orbit,
    Table,
    classify_notch,
    closed_flow,
    closed_flow_exact,
    jacobian_check,
    make_notch,
    make_polygon,
    make_rect,
    make_square,
    make_tfractal,
    measure_check,
    simulate,
    svg,
    tfractal_theorem,
)

__all__ = [
    "Event",
    "Orbit",
    "Table",
    "classify_notch",
    "closed_flow",
    "closed_flow_exact",
    "jacobian_check",
    "make_notch",
    "make_polygon",
    "make_rect",
    "make_square",
    "make_tfractal",
    "measure_check",
    "simulate",
    "svg",
    "tfractal_theorem",
]

__version__ = "1.0.0"
