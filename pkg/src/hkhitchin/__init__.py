"""Hitchin's self-duality equations on a periodic lattice and the
hyperKähler identities of their configuration space."""

from .lattice import (Configuration, GaugeTransform, Grid, HiggsField, MatrixField, OneForm,
                      TangentVector, UnitaryConnection)

__version__ = "0.1.0"

__all__ = ["Configuration", "GaugeTransform", "Grid", "HiggsField", "MatrixField", "OneForm",
           "TangentVector", "UnitaryConnection"]
