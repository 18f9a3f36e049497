"""Channel adversaries and detection-rate estimation.

Eve sits on the leg from the third party to a participant. Three attack
shapes are modelled:

* intercept-resend: keep the genuine pair, forward a fixed fake codeword;
* measure-resend: measure in a logical basis, forward a fresh codeword
  matching the outcome (raw product states are forwarded when the outcome
  falls outside the codespace);
* entangling probe: adjoin a one-qubit probe in |0> and apply a fixed
  8x8 unitary, after which the joint three-qubit state is carried through
  the rest of the round.

Detection is counted at the third party's control-mode check: a returned
pair measured in its preparation basis that fails to reproduce the
prepared value. Estimates over single attacked groups use the protocol's
4:1 mix of Z and X pairs and the participant's fair control/sift coin.
A second, sift-inclusive estimate also counts sifted pairs whose recorded
bit contradicts the prepared value; those only surface later, if the pair
is picked for the honesty check, so the control-mode figure is the one to
compare against the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

from .encoding import (
    BasisKind,
    EncodingFamily,
    LogicalBasis,
    LogicalOutcome,
    LogicalValue,
    apply_family_noise,
    apply_readout,
    basis_for,
    decode_pair,
    measure_logical,
    prepare,
    sift_measure_and_resend,
)
from .statevector import (
    RandomSource,
    StateVector,
    apply_full_unitary,
    new_basis_state,
    probabilities,
    tensor,
)

if TYPE_CHECKING:  # pragma: no cover - typing only, avoids an import cycle
    from .protocol import ProtocolConfig


class EntangleParams:
    """8x8 unitary coupling the two channel qubits to a one-qubit probe."""

    __slots__ = ("unitary", "label")

    def __init__(self, unitary, label: str = "custom") -> None:
        mat = np.array(unitary, dtype=complex)
        if mat.shape != (8, 8):
            raise ValueError(f"expected an 8x8 unitary, got shape {mat.shape}")
        if float(np.max(np.abs(mat.conj().T @ mat - np.eye(8)))) > 1e-10:
            raise ValueError("entangling attack matrix is not unitary")
        mat.setflags(write=False)
        self.unitary = mat
        self.label = label

    def __repr__(self) -> str:
        return f"EntangleParams({self.label!r})"

    @classmethod
    def identity(cls) -> "EntangleParams":
        """Probe that never couples; the do-nothing baseline."""
        return cls(np.eye(8), "identity")

    @classmethod
    def copy_first_qubit(cls) -> "EntangleParams":
        """CNOT from channel qubit 1 onto the probe: copies the Z bit perfectly."""
        mat = np.zeros((8, 8))
        for pattern in range(4):
            a = pattern >> 1
            for e in range(2):
                mat[pattern * 2 + (e ^ a), pattern * 2 + e] = 1.0
        return cls(mat, "cnot-probe")

    @classmethod
    def haar_random(cls, rng: RandomSource) -> "EntangleParams":
        return cls(_haar_unitary(8, rng), "haar")

    @classmethod
    def codespace_stealth(cls, family: EncodingFamily, rng: RandomSource) -> "EntangleParams":
        """Random probe action that is invisible to every codeword readout.

        The probe unitary is constant on the family's codespace, so both
        logical values drive the probe into the same state and the attack
        buys exactly nothing. Useful as a non-trivial zero-detection draw.
        """
        v = _haar_unitary(2, rng)
        w = _haar_unitary(2, rng)
        if family is EncodingFamily.DEPHASING:
            # v acts alongside the single-excitation patterns 01 and 10.
            p4 = np.diag([0.0, 1.0, 1.0, 0.0])
        else:
            # v acts alongside span{(|00>+|11>), (|01>-|10>)}.
            phi = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
            psi = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
            p4 = np.outer(phi, phi) + np.outer(psi, psi)
        q4 = np.eye(4) - p4
        return cls(np.kron(p4, v) + np.kron(q4, w), "stealth")


def _haar_unitary(dim: int, rng: RandomSource) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class NoAttack:
    pass


@dataclass(frozen=True)
class InterceptResend:
    fake_family: EncodingFamily
    fake_value: LogicalValue = LogicalValue.ZERO


@dataclass(frozen=True)
class MeasureResend:
    basis: LogicalBasis


@dataclass(frozen=True)
class Entangle:
    params: EntangleParams


AttackModel = Union[NoAttack, InterceptResend, MeasureResend, Entangle]

NO_ATTACK = NoAttack()


@dataclass
class EveRecord:
    """What the eavesdropper walks away with for one attacked pair."""

    kind: str
    stored_state: StateVector | None = None
    outcome: LogicalOutcome | None = None
    entangled: bool = False


def apply_attack(
    model: AttackModel, particle: StateVector, rng: RandomSource
) -> tuple[StateVector, EveRecord]:
    """Transform one in-flight pair; returns what the participant receives."""
    if isinstance(model, NoAttack):
        return particle, EveRecord("none")
    if isinstance(model, InterceptResend):
        fake = prepare(model.fake_family, model.fake_value)
        return fake, EveRecord("intercept-resend", stored_state=particle)
    if isinstance(model, MeasureResend):
        out = measure_logical(particle, model.basis, rng)
        if out.is_invalid:
            forwarded = new_basis_state(2, int(out.raw, 2))
        else:
            forwarded = prepare(model.basis.family, out.value)
        return forwarded, EveRecord("measure-resend", outcome=out)
    if isinstance(model, Entangle):
        if particle.num_qubits != 2:
            raise ValueError("entangling attack needs a bare two-qubit carrier")
        joint = tensor(particle, new_basis_state(1, 0))
        return apply_full_unitary(joint, model.params.unitary), EveRecord("entangle", entangled=True)
    raise TypeError(f"unknown attack model: {model!r}")


def closed_form_detection(model: AttackModel, family: EncodingFamily, m: int) -> float:
    """Detection probability after m attacked groups, from the per-group rates.

    Holds for intercept-resend with a Z-value fake codeword (1/4 per group)
    and for measure-resend in the family's Z basis (1/20 per group), under
    the 4:1 Z:X pair mix and a fair control/sift coin.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if isinstance(model, InterceptResend):
        if not model.fake_value.is_z_value or model.fake_family is not family:
            raise ValueError("closed form covers Z-value fakes from the traffic family only")
        p = 0.25
    elif isinstance(model, MeasureResend):
        if model.basis.kind is not BasisKind.Z or model.basis.family is not family:
            raise ValueError("closed form covers the traffic family's Z basis only")
        p = 0.05
    else:
        raise ValueError(f"no closed-form detection rate for {type(model).__name__}")
    return p if m == 1 else 1.0 - (1.0 - p) ** m


def _binomial_stderr(p_hat: float, trials: int) -> float:
    return math.sqrt(p_hat * (1.0 - p_hat) / trials)


@dataclass(frozen=True)
class DetectionReport:
    """Monte Carlo detection estimates for one attack model."""

    model: str
    family: str
    m: int
    trials: int
    per_group_estimate: float
    per_group_stderr: float
    overall_estimate: float
    overall_stderr: float
    closed_form_per_group: float | None
    closed_form_overall: float | None
    sift_inclusive_estimate: float
    sift_inclusive_stderr: float

    def __post_init__(self) -> None:
        for value in (self.per_group_estimate, self.overall_estimate, self.sift_inclusive_estimate):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"estimate {value} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "family": self.family,
            "m": self.m,
            "trials": self.trials,
            "per_group_estimate": self.per_group_estimate,
            "per_group_stderr": self.per_group_stderr,
            "overall_estimate": self.overall_estimate,
            "overall_stderr": self.overall_stderr,
            "closed_form_per_group": self.closed_form_per_group,
            "closed_form_overall": self.closed_form_overall,
            "sift_inclusive_estimate": self.sift_inclusive_estimate,
            "sift_inclusive_stderr": self.sift_inclusive_stderr,
        }


def attack_name(model: AttackModel) -> str:
    if isinstance(model, NoAttack):
        return "none"
    if isinstance(model, InterceptResend):
        return "intercept-resend"
    if isinstance(model, MeasureResend):
        return "measure-resend"
    return f"entangle:{model.params.label}"


def _single_group_trial(
    family: EncodingFamily, model: AttackModel, theta_policy, rng: RandomSource
) -> tuple[bool, bool]:
    """One attacked pair; returns (control-check hit, control-or-sift hit)."""
    if rng.random() < 0.8:
        value = LogicalValue.ZERO if rng.random() < 0.5 else LogicalValue.ONE
    else:
        value = LogicalValue.PLUS if rng.random() < 0.5 else LogicalValue.MINUS
    basis = basis_for(family, value)
    s = prepare(family, value)
    s = apply_family_noise(s, family, theta_policy.sample(rng))
    s, _ = apply_attack(model, s, rng)
    if rng.random() < 0.5:
        s = apply_family_noise(s, family, theta_policy.sample(rng))
        hit = measure_logical(s, basis, rng).value is not value
        return hit, hit
    bit, _ = sift_measure_and_resend(s, family, rng)
    if basis.kind is BasisKind.Z:
        return False, bit is None or bit != value.bit
    return False, False


def monte_carlo_detection(
    config: "ProtocolConfig",
    model: AttackModel,
    trials: int,
    rng: RandomSource,
    m: int = 1,
) -> DetectionReport:
    """Estimate detection rates by simulating attacked pair transmissions.

    The per-group estimate runs ``trials`` independent single groups; the
    overall estimate runs ``trials`` rounds of ``m`` attacked groups each,
    a round counting as detected as soon as one control check fails.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if m < 0:
        raise ValueError("m must be non-negative")
    family = config.family
    policy = config.theta_policy
    case1_hits = 0
    sift_hits = 0
    for _ in range(trials):
        case1, inclusive = _single_group_trial(family, model, policy, rng)
        case1_hits += case1
        sift_hits += inclusive
    overall_hits = 0
    for _ in range(trials):
        for _group in range(m):
            case1, _ = _single_group_trial(family, model, policy, rng)
            if case1:
                overall_hits += 1
                break
    try:
        cf_group = closed_form_detection(model, family, 1)
        cf_overall = closed_form_detection(model, family, m)
    except ValueError:
        cf_group = None
        cf_overall = None
    p_group = case1_hits / trials
    p_overall = overall_hits / trials
    p_sift = sift_hits / trials
    return DetectionReport(
        model=attack_name(model),
        family=family.value,
        m=m,
        trials=trials,
        per_group_estimate=p_group,
        per_group_stderr=_binomial_stderr(p_group, trials),
        overall_estimate=p_overall,
        overall_stderr=_binomial_stderr(p_overall, trials),
        closed_form_per_group=cf_group,
        closed_form_overall=cf_overall,
        sift_inclusive_estimate=p_sift,
        sift_inclusive_stderr=_binomial_stderr(p_sift, trials),
    )


# Ensemble weights for the exact control-path analysis: Z pairs outnumber
# X pairs 4:1 and values are uniform within each basis.
_ANALYSIS_WEIGHTS = (
    (LogicalValue.ZERO, 0.4),
    (LogicalValue.ONE, 0.4),
    (LogicalValue.PLUS, 0.1),
    (LogicalValue.MINUS, 0.1),
)


def _probe_reduced_state(state: StateVector) -> np.ndarray:
    if state.num_qubits != 3:
        raise ValueError("probe reduction expects a three-qubit joint state")
    m = state.amps.reshape(4, 2)
    return m.T @ m.conj()


def entangling_attack_analysis(
    params: EntangleParams, family: EncodingFamily
) -> tuple[float, float]:
    """Exact (detection probability, probe distinguishability) for one probe unitary.

    Detection is the probability that the third party's control check fails,
    averaged over the four codewords with the protocol's 4:1 basis mix.
    Distinguishability is the trace distance between the probe's reduced
    states after a logical zero versus a logical one transmission; it bounds
    what the probe can ever reveal about a sifted bit.
    """
    probe0 = new_basis_state(1, 0)
    detection = 0.0
    for value, weight in _ANALYSIS_WEIGHTS:
        joint = tensor(prepare(family, value), probe0)
        attacked = apply_full_unitary(joint, params.unitary)
        basis = basis_for(family, value)
        probs = probabilities(apply_readout(attacked, basis))
        wrong = 0.0
        for k, pk in enumerate(probs):
            pair = format(k, "03b")[:2]
            if decode_pair(basis, pair) is not value:
                wrong += float(pk)
        detection += weight * wrong
    reduced = []
    for value in (LogicalValue.ZERO, LogicalValue.ONE):
        joint = tensor(prepare(family, value), probe0)
        attacked = apply_full_unitary(joint, params.unitary)
        reduced.append(_probe_reduced_state(attacked))
    eigenvalues = np.linalg.eigvalsh(reduced[0] - reduced[1])
    return detection, 0.5 * float(np.abs(eigenvalues).sum())


def attack_to_dict(model: AttackModel) -> dict:
    """JSON-friendly description, the inverse of :func:`attack_from_dict`."""
    if isinstance(model, NoAttack):
        return {"kind": "none"}
    if isinstance(model, InterceptResend):
        return {
            "kind": "intercept-resend",
            "fake_family": model.fake_family.value,
            "fake_value": model.fake_value.value,
        }
    if isinstance(model, MeasureResend):
        return {
            "kind": "measure-resend",
            "family": model.basis.family.value,
            "basis": model.basis.kind.value,
        }
    if isinstance(model, Entangle):
        return {"kind": "entangle", "unitary": model.params.label}
    raise TypeError(f"unknown attack model: {model!r}")


_NAMED_PROBES = {
    "identity": EntangleParams.identity,
    "cnot-probe": EntangleParams.copy_first_qubit,
}


def attack_from_dict(data: dict, default_family: EncodingFamily) -> AttackModel:
    """Build an attack model from its JSON description."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("attack description must be an object with a 'kind' field")
    known = {"none", "intercept-resend", "measure-resend", "entangle"}
    kind = data["kind"]
    if kind not in known:
        raise ValueError(f"unknown attack kind {kind!r}")
    extra = set(data) - {"kind", "fake_family", "fake_value", "family", "basis", "unitary"}
    if extra:
        raise ValueError(f"unknown attack fields: {sorted(extra)}")
    if kind == "none":
        return NO_ATTACK
    if kind == "intercept-resend":
        family = EncodingFamily(data.get("fake_family", default_family.value))
        value = LogicalValue(data.get("fake_value", "zero"))
        return InterceptResend(fake_family=family, fake_value=value)
    if kind == "measure-resend":
        family = EncodingFamily(data.get("family", default_family.value))
        basis_kind = BasisKind(data.get("basis", "Z"))
        return MeasureResend(LogicalBasis(basis_kind, family))
    label = data.get("unitary", "identity")
    if label not in _NAMED_PROBES:
        raise ValueError(f"unknown probe unitary {label!r}; known: {sorted(_NAMED_PROBES)}")
    return Entangle(_NAMED_PROBES[label]())
