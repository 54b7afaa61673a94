"""Maximum interpoint distance of spherically symmetric samples.

Radial models, limit laws, normalizing constants, an exact pruned diameter
search and Monte Carlo experiments that compare the three.
"""

from .diameter import count_pairs, diameter_naive, diameter_pruned, max_norm
from .errors import DegenerateLimitError, MaxdistError, PreconditionError
from .limit_laws import Frechet, Gumbel, GumbelSum, LimitLaw, NegWeibull
from .normalization import AffineNormalization, constants, normalize
from .radial_models import BoundedTail, GammaTail, Kotz, PointCloud, PowerLaw, normal_model, sample_points
from .rng import make_stream

__version__ = "0.1.0"

__all__ = [
    "AffineNormalization",
    "BoundedTail",
    "DegenerateLimitError",
    "Frechet",
    "GammaTail",
    "Gumbel",
    "GumbelSum",
    "Kotz",
    "LimitLaw",
    "MaxdistError",
    "NegWeibull",
    "PointCloud",
    "PowerLaw",
    "PreconditionError",
    "constants",
    "count_pairs",
    "diameter_naive",
    "diameter_pruned",
    "make_stream",
    "max_norm",
    "normal_model",
    "normalize",
    "sample_points",
]
