"""Python mirror of the project's xoshiro256** RNG (seeded via splitmix64).

Used by oracle scripts to reproduce seeded behavior independently of the C++
implementation. Matches include/feedmine/rng.hpp bit for bit.
"""

import math

MASK = (1 << 64) - 1


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro:
    def __init__(self, seed):
        self.s = []
        x = seed & MASK
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & MASK
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
            self.s.append(z ^ (z >> 31))

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_below(self, n):
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n

    def next_double(self):
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo, hi):
        return lo + (hi - lo) * self.next_double()

    def normal(self):
        u1 = self.next_double()
        while u1 == 0.0:
            u1 = self.next_double()
        u2 = self.next_double()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, v):
        for i in range(len(v), 1, -1):
            j = self.next_below(i)
            v[i - 1], v[j] = v[j], v[i - 1]


if __name__ == "__main__":
    # Reference stream for the C++ cross-check test.
    r = Xoshiro(42)
    print([hex(r.next_u64()) for _ in range(4)])
    r2 = Xoshiro(7)
    print([r2.next_below(10) for _ in range(8)])
    r3 = Xoshiro(0)
    print([repr(r3.next_double()) for _ in range(3)])
