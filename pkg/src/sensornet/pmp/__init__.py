from .biguint import (
    DEFAULT_LIMBS, BigUint, mp_add, mp_cmp, mp_mod, mp_mul_mod, mp_shl, mp_sub, mp_xor,
)
from .kernels import BACKENDS, DEFAULT_BACKEND, get_backend

__all__ = [
    "BACKENDS", "DEFAULT_BACKEND", "DEFAULT_LIMBS", "BigUint", "get_backend",
    "mp_add", "mp_cmp", "mp_mod", "mp_mul_mod", "mp_shl", "mp_sub", "mp_xor",
]
