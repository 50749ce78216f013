"""State-vector evolution of a two-state quantum walk on the integer line.

The wavefunction at time ``t`` is a pair of complex amplitude arrays over
the positions ``-t .. t`` (a spinor per site; column ``i`` of
``WalkState.amplitudes`` is the spinor at position ``i - t``).  One step
applies a coin to every spinor and then shifts: the spin-0 amplitude moves
one site left, the spin-1 amplitude one site right.  Coins are drawn
cyclically from a :class:`StepProtocol`; the canonical instance is the
three-step cycle ``[coin, coin, identity]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coins import CoinOperator, closing_coin, identity_coin, rotation_coin

__all__ = [
    "InitialSpin",
    "StepProtocol",
    "WalkState",
    "PositionDistribution",
    "symmetric_spin",
    "three_period_protocol",
    "canonical_protocol",
    "three_coin_protocol",
    "apply_coin",
    "step",
    "evolve",
    "distribution",
    "empirical_moment",
]

SPIN_NORM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class InitialSpin:
    """Spin state ``alpha |0> + beta |1>`` placed at the origin at time 0."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not math.isfinite(norm):
            raise ValueError("spin amplitudes must be finite")
        if abs(norm - 1.0) > SPIN_NORM_TOLERANCE:
            raise ValueError(f"spin must be normalised, |alpha|^2+|beta|^2 = {norm!r}")


def symmetric_spin() -> InitialSpin:
    """The spin ``(1/sqrt(2), i/sqrt(2))`` whose walk has a symmetric limit law."""
    r = 1.0 / math.sqrt(2.0)
    return InitialSpin(complex(r, 0.0), complex(0.0, r))


@dataclass(frozen=True, eq=False)
class StepProtocol:
    """Periodic coin sequence; the coin at time ``t`` is ``coins[t % period]``."""

    coins: tuple[CoinOperator, ...]

    def __post_init__(self) -> None:
        coins = tuple(self.coins)
        if len(coins) < 1:
            raise ValueError("protocol needs at least one coin")
        if not all(isinstance(c, CoinOperator) for c in coins):
            raise TypeError("protocol entries must be CoinOperator instances")
        object.__setattr__(self, "coins", coins)

    @property
    def period(self) -> int:
        return len(self.coins)


def three_period_protocol(theta: float) -> StepProtocol:
    """The canonical cycle ``[C, C, identity]`` for a rotation coin at ``theta``."""
    coin = rotation_coin(theta)
    return StepProtocol((coin, coin, identity_coin()))


def canonical_protocol(coin: CoinOperator) -> StepProtocol:
    """``[coin, coin, closing_coin(coin)]`` - the cycle whose long-time law
    this package evaluates in closed form.

    For rotation coins the closing coin is exactly the identity, so this
    coincides with :func:`three_period_protocol`.
    """
    return StepProtocol((coin, coin, closing_coin(coin)))


def three_coin_protocol(
    first: CoinOperator, second: CoinOperator, third: CoinOperator
) -> StepProtocol:
    """Three independent coins, applied at times ``t = 0, 1, 2 (mod 3)``."""
    return StepProtocol((first, second, third))


@dataclass(frozen=True, eq=False)
class WalkState:
    """Wavefunction at time ``t`` over the positions ``-t .. t``.

    ``amplitudes`` has shape ``(2, 2t+1)``; row 0 is the spin-0 amplitude,
    row 1 the spin-1 amplitude, and column ``i`` sits at position
    ``i - origin`` with ``origin == t``.
    """

    t: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("time must be nonnegative")
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.shape != (2, 2 * self.t + 1):
            raise ValueError(
                f"amplitudes must have shape (2, {2 * self.t + 1}), got {amp.shape}"
            )
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def origin(self) -> int:
        """Column index that holds position 0."""
        return self.t

    def positions(self) -> np.ndarray:
        return np.arange(-self.t, self.t + 1)

    def spinor(self, x: int) -> np.ndarray:
        """Amplitude pair at position ``x`` (zeros outside ``-t .. t``)."""
        if abs(x) > self.t:
            return np.zeros(2, dtype=np.complex128)
        return self.amplitudes[:, x + self.origin].copy()

    def norm(self) -> float:
        amp = self.amplitudes
        return float(np.sum(amp.real**2 + amp.imag**2))

    def validate(self, norm_tol: float = 1e-10) -> None:
        """Check finiteness, normalisation, and the exact support/parity zeros."""
        amp = self.amplitudes
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        norm = self.norm()
        if abs(norm - 1.0) > norm_tol:
            raise ValueError(f"norm drifted to {norm!r}")
        # Positions x with x + t odd are column indices of odd parity.
        if np.any(amp[:, 1::2] != 0):
            raise ValueError("parity violated: amplitude on an odd sublattice site")


def apply_coin(state: WalkState, coin: CoinOperator) -> WalkState:
    """Apply ``coin`` to every spinor without shifting (time unchanged)."""
    if coin.is_identity():
        return state
    m = coin.matrix
    a0, a1 = state.amplitudes
    out = np.empty_like(state.amplitudes)
    out[0] = m[0, 0] * a0 + m[0, 1] * a1
    out[1] = m[1, 0] * a0 + m[1, 1] * a1
    return WalkState(state.t, out)


def step(state: WalkState, coin: CoinOperator) -> WalkState:
    """One time step: coin on every site, then the spin-conditioned shift.

    With the identity coin the step is a pure permutation of amplitudes.
    """
    a0, a1 = state.amplitudes
    if coin.is_identity():
        b0, b1 = a0, a1
    else:
        m = coin.matrix
        b0 = m[0, 0] * a0 + m[0, 1] * a1
        b1 = m[1, 0] * a0 + m[1, 1] * a1
    width = a0.size
    out = np.zeros((2, width + 2), dtype=np.complex128)
    out[0, :width] = b0  # spin-0 moves x -> x - 1
    out[1, 2:] = b1  # spin-1 moves x -> x + 1
    return WalkState(state.t + 1, out)


def evolve(spin: InitialSpin, protocol: StepProtocol, steps: int) -> WalkState:
    """Run ``steps`` steps from a point mass at the origin with spin ``spin``.

    The full amplitude array is sized once up front (support grows by one
    site per step, so dense storage wins at every relevant scale) and the
    steps run in place on a widening window; the arithmetic per step is
    identical to :func:`step`.  ``steps == 0`` returns the point-mass state.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    amp = np.zeros((2, 2 * steps + 1), dtype=np.complex128)
    center = steps
    amp[0, center] = spin.alpha
    amp[1, center] = spin.beta
    coins = protocol.coins
    period = protocol.period
    for t in range(steps):
        lo = center - t
        hi = lo + 2 * t + 1
        a0 = amp[0, lo:hi]
        a1 = amp[1, lo:hi]
        coin = coins[t % period]
        if coin.is_identity():
            b0 = a0.copy()
            b1 = a1.copy()
        else:
            m = coin.matrix
            b0 = m[0, 0] * a0 + m[0, 1] * a1
            b1 = m[1, 0] * a0 + m[1, 1] * a1
        amp[0, lo - 1 : hi - 1] = b0
        amp[0, hi - 1] = 0.0
        amp[1, lo + 1 : hi + 1] = b1
        amp[1, lo] = 0.0
    return WalkState(steps, amp)


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    """Measurement distribution ``p(x) = |a0(x)|^2 + |a1(x)|^2`` at time ``t``."""

    positions: np.ndarray
    probabilities: np.ndarray
    t: int

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.int64)
        prob = np.asarray(self.probabilities, dtype=np.float64)
        if pos.shape != prob.shape or pos.ndim != 1:
            raise ValueError("positions and probabilities must be matching 1-d arrays")
        if np.any(np.diff(pos) <= 0):
            raise ValueError("positions must be strictly increasing")
        if np.any(prob < 0.0):
            raise ValueError("probabilities must be nonnegative")
        total = float(prob.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        pos.setflags(write=False)
        prob.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "probabilities", prob)


def distribution(state: WalkState) -> PositionDistribution:
    """Measured position distribution over the even sublattice of ``state``."""
    amp = state.amplitudes
    p = np.sum(amp.real**2 + amp.imag**2, axis=0)
    # Only columns of even index (positions with x + t even) can be occupied.
    return PositionDistribution(
        positions=np.arange(-state.t, state.t + 1, 2),
        probabilities=p[::2],
        t=state.t,
    )


def empirical_moment(dist: PositionDistribution, r: int, scale: float) -> float:
    """Moment ``sum_x (x / scale)^r p(x)`` of the rescaled position.

    ``r`` is capped at 8: higher moments amplify roundoff beyond the
    tolerances this package promises.
    """
    if not 0 <= r <= 8:
        raise ValueError("moment order must be between 0 and 8")
    if scale <= 0:
        raise ValueError("scale must be positive")
    y = dist.positions / float(scale)
    return float(np.sum(y**r * dist.probabilities))
