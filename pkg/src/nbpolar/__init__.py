"""Non-binary polar codes over GF(2^r) with SC/SCL/SCF/BP decoding."""

from .channel import ChannelParams
from .code import CodeSpec, FrozenProfile, Kernel, design_frozen, encode, kernel_select
from .galois import PRIMITIVE_POLYS, GaloisField

__all__ = [
    "ChannelParams",
    "CodeSpec",
    "FrozenProfile",
    "GaloisField",
    "Kernel",
    "PRIMITIVE_POLYS",
    "design_frozen",
    "encode",
    "kernel_select",
]
