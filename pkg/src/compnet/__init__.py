"""Tools for computing functions of distributed correlated sources over networks.

The package is organized around one pipeline:

* ``gf``        exact arithmetic and linear algebra over prime fields,
* ``sources``   joint source models, induced function variables, entropies,
* ``rates``     closed-form achievable rates and outer bounds,
* ``netgraph``  relay network descriptions, cuts, layering, unfolding,
* ``transform`` random linear network codes that turn a network into a
  modulo-q adder channel,
* ``compcode``  linear function-coding over that adder channel, with exact
  maximum-likelihood decoding and Monte Carlo experiments,
* ``cli``       a small command line frontend emitting CSV reports.
"""

__version__ = "0.1.0"

__all__ = [
    "gf",
    "sources",
    "rates",
    "netgraph",
    "transform",
    "compcode",
]
