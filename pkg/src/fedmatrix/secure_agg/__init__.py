from ._params import SchemeParams, is_probable_prime
from ._ring import center, negacyclic_multiply, sample_gaussian, sample_ternary
from ._ciphertext import Ciphertext
from ._scheme import KeyPair, PublicKey, SecretKey, keygen, encode, encrypt, add, scale_by_plain, decrypt
from ._aggregator import SecureAggregator


__all__ = [
    "SchemeParams",
    "is_probable_prime",
    "center",
    "negacyclic_multiply",
    "sample_gaussian",
    "sample_ternary",
    "Ciphertext",
    "KeyPair",
    "PublicKey",
    "SecretKey",
    "keygen",
    "encode",
    "encrypt",
    "add",
    "scale_by_plain",
    "decrypt",
    "SecureAggregator",
]
