"""predlab: a sequential-prediction laboratory for binary sequences.

Pieces: cumulative log2 (KL) prediction loss, an up-or-reset countable-state
chain with certified constants, the stationary tracking measure built on it
(forward algorithm with rigorous truncation enclosures), an adversarial
sequence constructor that defeats any fixed predictor, and baseline
predictors to throw at it.
"""

from .adversary import (
    AdversarialRun,
    AdversarialSource,
    adversarial_sequence,
    theorem1_experiment,
)
from .baselines import (
    FiniteOrderMixture,
    KTPredictor,
    UniformPredictor,
    finite_order_mixture,
    kt_predictor,
    uniform_predictor,
)
from .chain import (
    PI1,
    ChainSpec,
    StatePath,
    chain_info,
    first_return_prob,
    mean_return_time,
    return_prob_partial_sum,
    sample_path,
    stationary_weight,
    transition_prob,
)
from .core import (
    EMPTY_WORD,
    IMPOSSIBLE,
    ChampernowneSource,
    CoinFlipSource,
    DiracPredictor,
    FileSource,
    LogInterval,
    PeriodicSource,
    Predictor,
    SequenceSource,
    SourceExhaustedError,
    Symbol,
    Word,
    complement,
    dirac_predictor,
    format_bits,
    log2_prob,
    log2_product,
    log2_sum,
    parse_bits,
    prob,
    sequence_prefix,
)
from .loss import (
    DiracMeasure,
    LossTrace,
    check_pinsker,
    dirac_kl,
    expected_kl,
    other_losses,
    pinsker_abs_bound,
    stationarity_window_check,
    window_distribution,
    word_frequency,
)
from .mux import (
    ForwardState,
    ImpossiblePastError,
    MuX,
    MuxPredictor,
    brute_force_marginal,
    log_loss_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
