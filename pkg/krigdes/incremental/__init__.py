"""增量 / 减量更新模块"""

from krigdes.incremental.update import (
    StageState,
    KrigingCovBlocks,
    IncrementSweep,
    UpdatedWeights,
    stage_state,
    sigma2_block,
    cov_blocks,
    gv_increment_objective,
    v_increment_objective,
    g_increment_objective,
    update_weights,
    update_kriging_cov,
    decrement_logdet,
    chain_logdet,
    advance,
)

__all__ = [
    "StageState",
    "KrigingCovBlocks",
    "IncrementSweep",
    "UpdatedWeights",
    "stage_state",
    "sigma2_block",
    "cov_blocks",
    "gv_increment_objective",
    "v_increment_objective",
    "g_increment_objective",
    "update_weights",
    "update_kriging_cov",
    "decrement_logdet",
    "chain_logdet",
    "advance",
]
