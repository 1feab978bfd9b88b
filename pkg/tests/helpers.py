import numpy as np

from models import AsymptoteDecay, GridFunction, HalfStripMesh


def strip_mesh(s, X=10.0, Y=10.0, nx=64, ny=32, **kwargs):
    a = 1.0 - 2.0 * s
    kwargs.setdefault("grading", HalfStripMesh.default_grading(a, Y, ny))
    return HalfStripMesh(X=X, Y=Y, nx=nx, ny=ny, weight_exponent=a, **kwargs)


def arctan_layer(half_width=40.0, count=321):
    return GridFunction.sample(
        lambda x: 2.0 / np.pi * np.arctan(x), -half_width, half_width, count,
        left_asymptote=-1.0, right_asymptote=1.0,
        asymptote_decay=AsymptoteDecay.POWER, decay_exponent=1.0,
    )


def arctan_field(x, y):
    return 2.0 / np.pi * np.arctan(x / (1.0 + y))
