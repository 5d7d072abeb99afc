"""Exact residue arithmetic in Z_{p^n} for odd primes p.

Every modulus is capped at ``MAX_MODULUS`` so that a product of two residues
fits in a signed 64-bit integer; the compiled kernels rely on this.
"""
from __future__ import annotations

from dataclasses import dataclass

MAX_MODULUS = 2**31
_MAX_PRIME = 10**6


def is_prime(n: int) -> bool:
    """Trial division, intended for small primes only (n <= 10^6)."""
    if n < 2:
        return False
    if n > _MAX_PRIME:
        raise ValueError(f"primality of {n} is outside the supported range (<= {_MAX_PRIME})")
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def check_odd_prime(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError(f"p must be an int, got {type(p).__name__}")
    if p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


@dataclass(frozen=True)
class PrimePower:
    p: int
    n: int

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.n < 0:
            raise ValueError(f"exponent must be nonnegative, got {self.n}")
        if self.p**self.n > MAX_MODULUS:
            raise OverflowError(
                f"{self.p}^{self.n} exceeds the supported modulus bound 2^31"
            )

    @property
    def modulus(self) -> int:
        return self.p**self.n

    def __str__(self):
        return f"{self.p}^{self.n}"


def _check_residue(x: int, m: PrimePower) -> None:
    if not 0 <= x < max(m.modulus, 1):
        raise ValueError(f"{x} is not a canonical residue mod {m.modulus}")


def pow_mod(base: int, exp: int, m: PrimePower) -> int:
    """Square-and-multiply ``base**exp`` reduced mod ``m.modulus``."""
    if exp < 0:
        raise ValueError("negative exponents are not supported")
    mod = m.modulus
    if mod == 1:
        return 0
    _check_residue(base, m)
    result = 1
    b = base
    while exp:
        if exp & 1:
            result = result * b % mod
        b = b * b % mod
        exp >>= 1
    return result


def geom_sum(q: int, count: int, m: PrimePower) -> int:
    """Return ``1 + q + ... + q^(count-1)`` mod ``m.modulus``.

    Uses the doubling recurrences S(2k) = S(k)(1 + q^k) and
    S(2k+1) = S(2k) q + 1, so no division by q - 1 is needed (q - 1 is a
    zero divisor whenever q = 1 mod p).
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    mod = m.modulus
    if mod == 1:
        return 0
    _check_residue(q, m)
    s, qk = 0, 1  # S(k), q^k for the processed prefix k of count's bits
    for bit in bin(count)[2:] if count else "":
        s = s * (1 + qk) % mod
        qk = qk * qk % mod
        if bit == "1":
            s = (s * q + 1) % mod
            qk = qk * q % mod
    return s


def unit_subgroup_elements(p: int, n: int, i: int) -> set[int]:
    """The unique subgroup of order p^i in U(p^n), i.e. {k p^(n-i) + 1}."""
    m = PrimePower(p, n)
    if not 0 <= i <= n - 1:
        raise ValueError(f"need 0 <= i <= n-1, got i={i}, n={n}")
    step = p ** (n - i)
    return {(k * step + 1) % m.modulus for k in range(p**i)}


def valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def digit_sum(x: int, p: int) -> int:
    s = 0
    while x:
        x, r = divmod(x, p)
        s += r
    return s


def binom_valuation(N: int, k: int, p: int) -> int:
    """v_p(C(N, k)) via Legendre's formula; never forms the binomial."""
    if not 0 <= k <= N:
        raise ValueError("need 0 <= k <= N")
    return (digit_sum(k, p) + digit_sum(N - k, p) - digit_sum(N, p)) // (p - 1)


def binom_valuation_holds(p: int, n: int, k: int) -> bool:
    """Whether p^(n-k+2) divides C(p^n, k), for 3 <= k <= n + 2."""
    check_odd_prime(p)
    if n < 1:
        raise ValueError("n must be positive")
    if not 3 <= k <= n + 2:
        raise ValueError(f"k must lie in [3, n+2], got k={k}, n={n}")
    return binom_valuation(p**n, k, p) >= n - k + 2


def euler_phi_prime_power(p: int, n: int) -> int:
    return 1 if n == 0 else p ** (n - 1) * (p - 1)
