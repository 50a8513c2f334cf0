"""Simulator and analysis toolkit for dynamical tunneling of kicked atom
ensembles: pseudo-classical maps, exact quantum Floquet evolution with a
spontaneous-emission channel, survival-probability decay fits, and scaling
of the tunneling rate with island area over the effective Planck constant.
"""

__version__ = "0.1.0"
