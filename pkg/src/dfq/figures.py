"""Reference circuit scenarios with published outcome histograms.

Six fixed scenarios exercise one travelling pair end to end: prepare a
minus codeword (or the fake zero codeword an intercepting eavesdropper
would substitute), hit both qubits with a noise gate, then read out the
way the protocol would. CTRL pairs get the family's X-basis readout
circuit; SIFT pairs are measured bare. The per-qubit noise gate is
RZ(pi/5) for the dephasing family and RY(pi/5) for the rotation family,
and every expected distribution is independent of that angle, which is
the whole point of the encodings.

    fig1  dephasing  genuine  CTRL   100% "11"
    fig2  dephasing  faked    CTRL   50/50 on "01"/"11"
    fig3  dephasing  genuine  SIFT   50/50 on "01"/"10"
    fig4  rotation   genuine  CTRL   50/50 on "01"/"10"
    fig5  rotation   faked    CTRL   uniform over all four
    fig6  rotation   genuine  SIFT   uniform over all four
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .encoding import (
    BasisKind,
    EncodingFamily,
    LogicalBasis,
    LogicalValue,
    apply_readout,
    prepare,
)
from .protocol import Operation
from .statevector import RandomSource, StateVector, apply_single, probabilities, ry, rz

NOISE_ANGLE = math.pi / 5.0
DEFAULT_SHOTS = 10_000
MIN_SHOTS_FOR_CHECK = 100

_SCENARIOS: dict[str, tuple[EncodingFamily, LogicalValue, LogicalValue | None, Operation]] = {
    "fig1": (EncodingFamily.DEPHASING, LogicalValue.MINUS, None, Operation.CTRL),
    "fig2": (EncodingFamily.DEPHASING, LogicalValue.MINUS, LogicalValue.ZERO, Operation.CTRL),
    "fig3": (EncodingFamily.DEPHASING, LogicalValue.MINUS, None, Operation.SIFT),
    "fig4": (EncodingFamily.ROTATION, LogicalValue.MINUS, None, Operation.CTRL),
    "fig5": (EncodingFamily.ROTATION, LogicalValue.MINUS, LogicalValue.ZERO, Operation.CTRL),
    "fig6": (EncodingFamily.ROTATION, LogicalValue.MINUS, None, Operation.SIFT),
}

FIGURE_IDS = tuple(_SCENARIOS)

OUTCOMES = ("00", "01", "10", "11")


@dataclass(frozen=True)
class FigureScenario:
    fig_id: str
    family: EncodingFamily
    prepared: LogicalValue
    fake: LogicalValue | None  # codeword substituted on the channel, if any
    operation: Operation
    shots: int = DEFAULT_SHOTS

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be positive")

    @classmethod
    def from_id(cls, fig_id: str, shots: int = DEFAULT_SHOTS) -> "FigureScenario":
        if fig_id not in _SCENARIOS:
            raise ValueError(f"unknown scenario {fig_id!r}; known: {list(_SCENARIOS)}")
        family, prepared, fake, operation = _SCENARIOS[fig_id]
        return cls(fig_id, family, prepared, fake, operation, shots)


def all_scenarios(shots: int = DEFAULT_SHOTS) -> list[FigureScenario]:
    return [FigureScenario.from_id(fig_id, shots) for fig_id in FIGURE_IDS]


@dataclass(frozen=True)
class Histogram:
    """Shot counts per two-bit outcome; only outcomes that occurred appear."""

    counts: dict[str, int]
    shots: int

    def __post_init__(self) -> None:
        if any(v <= 0 for v in self.counts.values()):
            raise ValueError("histogram rows must have positive counts")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("histogram counts do not add up to the shot count")


def _final_state(scenario: FigureScenario, theta: float) -> StateVector:
    sent = scenario.fake if scenario.fake is not None else scenario.prepared
    state = prepare(scenario.family, sent)
    gate = rz(theta) if scenario.family is EncodingFamily.DEPHASING else ry(theta)
    state = apply_single(state, gate, 1)
    state = apply_single(state, gate, 2)
    if scenario.operation is Operation.CTRL:
        state = apply_readout(state, LogicalBasis(BasisKind.X, scenario.family))
    return state


def expected_distribution(scenario: FigureScenario, theta: float = NOISE_ANGLE) -> list[float]:
    """Exact outcome probabilities in the order 00, 01, 10, 11."""
    return [float(p) for p in probabilities(_final_state(scenario, theta))]


def run_scenario(
    scenario: FigureScenario, rng: RandomSource, theta: float = NOISE_ANGLE
) -> Histogram:
    """Sample the scenario's measurement ``shots`` times."""
    probs = probabilities(_final_state(scenario, theta))
    draws = rng.multinomial(scenario.shots, probs / probs.sum())
    counts = {OUTCOMES[k]: int(c) for k, c in enumerate(draws) if c > 0}
    return Histogram(counts, scenario.shots)


def check_histogram(hist: Histogram, expected: list[float]) -> tuple[str, str]:
    """Compare counts against probabilities at four binomial sigmas.

    Returns ("PASS"|"FAIL"|"SKIPPED", detail). Histograms with fewer than
    100 shots are skipped rather than judged on hopeless statistics.
    """
    if hist.shots < MIN_SHOTS_FOR_CHECK:
        return "SKIPPED", f"needs at least {MIN_SHOTS_FOR_CHECK} shots, got {hist.shots}"
    for k, p in enumerate(expected):
        outcome = OUTCOMES[k]
        observed = hist.counts.get(outcome, 0)
        mean = p * hist.shots
        sigma = math.sqrt(hist.shots * p * (1.0 - p))
        if sigma == 0.0:
            if observed != round(mean):
                return "FAIL", f"outcome {outcome}: expected exactly {round(mean)}, got {observed}"
        elif abs(observed - mean) > 4.0 * sigma:
            return "FAIL", (
                f"outcome {outcome}: {observed} is more than 4 sigma from {mean:.1f}"
            )
    return "PASS", ""
