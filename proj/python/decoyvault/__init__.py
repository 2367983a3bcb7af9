"""Deception-based object vault.

Every stored file is accompanied by decoy replicas whose numeric content has
been rewritten by a format-preserving digit cipher. Downloads and shares are
verified against host identifiers embedded at upload time; requesters that
fail verification silently receive a decoy while the event is audited.
"""

from ._core import (
    DuplicateError,
    InvalidInputError,
    NotFoundError,
    PolicyError,
    Vault,
    collect_host_identity,
    compute_quad_hash,
    decoy_count,
    decrypt_digits,
    derive_decoy_name,
    encrypt_digits,
    generate_decoy,
    is_sensitive_token,
    random_key_hex,
    required_identifiers,
    scan,
)

__all__ = [
    "DuplicateError",
    "InvalidInputError",
    "NotFoundError",
    "PolicyError",
    "Vault",
    "collect_host_identity",
    "compute_quad_hash",
    "decoy_count",
    "decrypt_digits",
    "derive_decoy_name",
    "encrypt_digits",
    "generate_decoy",
    "is_sensitive_token",
    "random_key_hex",
    "required_identifiers",
    "scan",
]

__version__ = "0.1.0"
