from ._seeding import StreamKey, seed_sequence, substream


__all__ = [
    "StreamKey",
    "seed_sequence",
    "substream",
]
