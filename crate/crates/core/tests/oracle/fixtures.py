#!/usr/bin/env python3
"""Standalone reference for the frozen fixtures used by the Rust tests.

Implements SplitMix64, CDF-inversion rarity sampling, the pack draw order
(rarity, function, variant), the combine draw order (rarity, variant) and the
canonical state serializer. Shares no code with the Rust crate.

Run: python3 crates/core/tests/oracle/fixtures.py
"""
import hashlib
import struct

MASK = (1 << 64) - 1


def splitmix(seed):
    state = seed & MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def sample(dist, gen):
    u = float(next(gen)) / 2.0**64
    cum = 0.0
    for level, p in enumerate(dist):
        cum += p
        if cum > u:
            return level
    return max(i for i, p in enumerate(dist) if p > 0)


CATALOG = [(a, b) for a in range(3) for b in range(3) if (a, b) != (0, 0)]
PACK_WEIGHTS = [0.65, 0.22, 0.10, 0.03]
TABLE = [
    [0.70, 0.24, 0.05, 0.01],
    [0.10, 0.65, 0.20, 0.05],
    [0.05, 0.10, 0.65, 0.20],
    [0.02, 0.08, 0.15, 0.75],
]


def roll_pack(seed, n=5):
    gen = splitmix(seed)
    out = []
    for _ in range(n):
        r = sample(PACK_WEIGHTS, gen)
        f = CATALOG[next(gen) % len(CATALOG)]
        v = next(gen) % 4
        out.append((f, r, v))
    return out


def combine(global_seed, seq, ra, rb):
    gen = splitmix(global_seed ^ seq)
    r = sample(TABLE[max(ra, rb)], gen)
    v = next(gen) % 4
    return r, v


def u8(x): return struct.pack(">B", x)
def i8(x): return struct.pack(">b", x)
def u16(x): return struct.pack(">H", x)
def u32(x): return struct.pack(">I", x)
def u64(x): return struct.pack(">Q", x)
def f64(x): return struct.pack(">d", x)
def s(x):
    b = x.encode()
    return u32(len(b)) + b


def empty_state_bytes(global_seed):
    out = b"nftrig-state/1"
    out += u64(global_seed) + u64(0) + u64(0) + u64(0) + u64(0)  # seed, next_seq, next_token, next_listing, treasury
    out += u64(0) + u64(0) + u64(0) + u64(0) + u64(0)  # accounts, tokens, listings, sales, answered
    # params v1
    out += u64(1)
    out += u8(0)
    for row in TABLE:
        out += b"".join(f64(p) for p in row)
    out += u32(5) + b"".join(f64(p) for p in PACK_WEIGHTS)
    out += u64(len(CATALOG)) + b"".join(i8(a) + i8(b) for a, b in CATALOG)
    out += u64(100) + u64(100) + u64(100) + u16(200)
    return out


if __name__ == "__main__":
    for seed in (0, 1, 0xDEADBEEF):
        g = splitmix(seed)
        print(f"splitmix seed={seed:#x}:", ", ".join(f"0x{next(g):016X}" for _ in range(10)))
    print("seed_for_tx(0,1) first:", f"0x{next(splitmix(0 ^ 1)):016X}")
    print("roll_pack seed 42:", roll_pack(42))
    print("roll_pack seed 42^2 (buy pack at seq 2):", roll_pack(42 ^ 2))
    print("combine seed 42 seq 7 (Common, Rare):", combine(42, 7, 0, 2))
    print("empty state hash seed 42:", hashlib.sha256(empty_state_bytes(42)).hexdigest())
    # Monte-Carlo frequency check of the table lookup itself
    import collections
    g = splitmix(42)
    c = collections.Counter(sample(TABLE[0], g) for _ in range(200000))
    print("common-row freq (2e5 draws, seed 42):", [c[i] / 200000 for i in range(4)])
