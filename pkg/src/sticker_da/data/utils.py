"""Utility functions for stable identities and seed derivation."""

import hashlib
import uuid


def stable_sample_id(domain_tag: str, key: str | int) -> str:
    """
    Generate a deterministic UUID derived from (domain_tag, key).
    The same tag and key always map to the same id across runs and machines.
    """
    h = hashlib.sha1(f"{domain_tag}:{key}".encode()).hexdigest()[:32]
    return str(uuid.UUID(h))


def derive_seed(*parts: object) -> int:
    """Fold any number of seed components into one 63-bit seed."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)
