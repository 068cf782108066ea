"""Decibel conversions through pint's logarithmic units."""

import math

import numpy as np
from pint import UnitRegistry

ureg = UnitRegistry(autoconvert_offset_to_baseunit=True)
Q_ = ureg.Quantity


def db_to_linear(value_db):
    """Convert a power ratio in dB (scalar or array) to a linear ratio.

    ``+inf`` maps to ``inf`` and ``-inf`` to ``0``.
    """
    if np.ndim(value_db) == 0:
        value_db = float(value_db)
        if math.isinf(value_db):
            return math.inf if value_db > 0 else 0.0
        return float(Q_(value_db, "dB").to("dimensionless").magnitude)
    values = np.asarray(value_db, dtype=np.float64)
    return np.asarray(Q_(values, "dB").to("dimensionless").magnitude, dtype=np.float64)


def linear_to_db(ratio):
    if np.ndim(ratio) == 0:
        ratio = float(ratio)
        if ratio == 0.0:
            return -math.inf
        return float(Q_(ratio, "dimensionless").to("dB").magnitude)
    values = np.asarray(ratio, dtype=np.float64)
    return np.asarray(Q_(values, "dimensionless").to("dB").magnitude, dtype=np.float64)
