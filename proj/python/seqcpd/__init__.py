"""Penalized change point detection with sequential gradient cost updates."""

from ._seqcpd import (
    InvalidConfig,
    SeqcpdError,
    beta_value,
    detect,
    dgp_ids,
    family_ids,
    generate,
    grice_lm,
    laplace_rice,
    rice_mean,
)

__all__ = [
    "InvalidConfig",
    "SeqcpdError",
    "beta_value",
    "detect",
    "dgp_ids",
    "family_ids",
    "generate",
    "grice_lm",
    "laplace_rice",
    "rice_mean",
]
