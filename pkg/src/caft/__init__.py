"""Class-aware Fourier transformation and pseudo-label filtering for domain adaptation."""

from .pseudolabel import (
    GmmParams,
    PartitionReport,
    PredictionRecord,
    adt2p,
    build_dictionary,
    entropy_score,
    evaluate,
    fit_gmm2,
    partition,
)
from .spectral import Spectrum, dft2, from_polar, idft2, shift_center, to_polar, unshift_center
from .trainutil import ScheduleParams, lr_at, pseudo_ce
from .transform import WindowSpec, build_augmented_set, compute_window, prepare_pair, swap_low_freq

__version__ = "0.1.0"
