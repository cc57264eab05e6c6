"""Differentiable architecture search over the cell space.

The search loop itself lives in :mod:`egnas.search.searcher`, which depends on
:mod:`egnas.network`; import it from there.
"""

from .alphas import DAGS, Alphas
from .derive import best_op, derive
from .optim import SGD, Adam, PlateauScheduler, adam_step, cosine_lr, sgd_momentum_step
