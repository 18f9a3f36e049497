"""Command line front end: ``dfq run|attack-sweep|repro-figures|efficiency``.

All randomness hangs off one ``--seed`` (falling back to the DFQ_SEED
environment variable, then to the config file, then to 0), so repeating a
command with the same seed rewrites byte-identical report files. Exit
codes: 0 on success, 2 for configuration problems, 3 for I/O failures.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .attacks import attack_from_dict, attack_to_dict, monte_carlo_detection
from .efficiency import ideal_report, measure_preparation
from .encoding import EncodingFamily
from .figures import all_scenarios, check_histogram, expected_distribution, run_scenario
from .protocol import ProtocolConfig, Secret, ThetaPolicy, Verdict, run_protocol

SCHEMA_VERSION = 1
ENV_SEED = "DFQ_SEED"
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigError(ValueError):
    """Anything wrong with a config file or its combination with flags."""


# Field order here is the canonical order in serialized config files.
_RUN_DEFAULTS: dict = {
    "family": "dephasing",
    "n": 3,
    "l": 8,
    "delta": 1.0,
    "theta_policy": {"kind": "random"},
    "seed": 0,
    "attack": {"kind": "none"},
    "tolerable_error_rate": 0.0,
    "trials": 100,
    "secrets": "random",
    "out": "reports",
    "write_transcripts": False,
}


def parse_run_config(data: dict) -> dict:
    """Validate a config document; unknown fields are rejected outright."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - set(_RUN_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    merged = copy.deepcopy(_RUN_DEFAULTS)
    merged.update(copy.deepcopy(data))
    if merged["family"] not in ("dephasing", "rotation"):
        raise ConfigError(f"family must be 'dephasing' or 'rotation', got {merged['family']!r}")
    for name in ("n", "l", "seed", "trials"):
        if not isinstance(merged[name], int) or isinstance(merged[name], bool):
            raise ConfigError(f"{name} must be an integer")
    for name in ("delta", "tolerable_error_rate"):
        if not isinstance(merged[name], (int, float)) or isinstance(merged[name], bool):
            raise ConfigError(f"{name} must be a number")
        merged[name] = float(merged[name])
    if merged["trials"] < 1:
        raise ConfigError("trials must be positive")
    if not isinstance(merged["write_transcripts"], bool):
        raise ConfigError("write_transcripts must be true or false")
    if not isinstance(merged["out"], str):
        raise ConfigError("out must be a path string")
    secrets = merged["secrets"]
    if secrets != "random":
        if not isinstance(secrets, list) or not all(isinstance(s, str) for s in secrets):
            raise ConfigError("secrets must be 'random' or a list of bit strings")
        for s in secrets:
            if len(s) != merged["l"] or any(c not in "01" for c in s):
                raise ConfigError(f"secret {s!r} is not an {merged['l']}-bit string")
        if len(secrets) != merged["n"]:
            raise ConfigError(f"need {merged['n']} secrets, got {len(secrets)}")
    try:
        ThetaPolicy.from_dict(merged["theta_policy"])
        attack_from_dict(merged["attack"], EncodingFamily(merged["family"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return merged


def canonical_config_text(cfg: dict) -> str:
    ordered = {key: cfg[key] for key in _RUN_DEFAULTS}
    return json.dumps(ordered, indent=2) + "\n"


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_run_config(data)


def _resolve_seed(flag_seed: int | None, config_seed: int | None) -> int:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{ENV_SEED} must be an integer, got {env!r}") from exc
    if config_seed is not None:
        return config_seed
    return 0


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2) + "\n")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = copy.deepcopy(_RUN_DEFAULTS) if args.config is None else _load_config_file(args.config)
    for name in ("family", "n", "l", "delta", "trials", "out"):
        value = getattr(args, name)
        if value is not None:
            cfg[name] = value
    cfg = parse_run_config(cfg)
    seed = _resolve_seed(args.seed, cfg["seed"])
    cfg["seed"] = seed

    family = EncodingFamily(cfg["family"])
    base = ProtocolConfig(
        family=family,
        n=cfg["n"],
        l=cfg["l"],
        delta=cfg["delta"],
        theta_policy=ThetaPolicy.from_dict(cfg["theta_policy"]),
        seed=seed,
        attack=attack_from_dict(cfg["attack"], family),
        tolerable_error_rate=cfg["tolerable_error_rate"],
    )
    trials = cfg["trials"]
    trial_seeds = np.random.SeedSequence(seed).generate_state(trials)
    secrets_rng = np.random.default_rng(seed)
    fixed_secrets = None
    if cfg["secrets"] != "random":
        fixed_secrets = [Secret.from_string(s) for s in cfg["secrets"]]

    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    tally = {verdict.value: 0 for verdict in Verdict}
    tp_qubits = 0
    participant_qubits = 0
    for index, trial_seed in enumerate(trial_seeds):
        if fixed_secrets is not None:
            secrets = fixed_secrets
        else:
            secrets = [Secret.random(cfg["l"], secrets_rng) for _ in range(cfg["n"])]
        trial_config = ProtocolConfig(
            family=base.family,
            n=base.n,
            l=base.l,
            delta=base.delta,
            theta_policy=base.theta_policy,
            seed=int(trial_seed),
            attack=base.attack,
            tolerable_error_rate=base.tolerable_error_rate,
        )
        result, transcript = run_protocol(trial_config, secrets)
        tally[result.verdict.value] += 1
        summary = transcript.find("run_summary")[0]
        tp_qubits += summary["tp_qubits_prepared"]
        participant_qubits += summary["participant_qubits_prepared"]
        if cfg["write_transcripts"]:
            _write_text(out_dir / f"transcript_{index:04d}.jsonl", transcript.to_jsonl())

    report = {
        "schema_version": SCHEMA_VERSION,
        "config": {key: cfg[key] for key in _RUN_DEFAULTS},
        "verdicts": tally,
        "measured": {
            "tp_qubits_prepared": tp_qubits,
            "participant_qubits_prepared": participant_qubits,
        },
        "efficiency": ideal_report(cfg["n"], cfg["l"]).to_dict(),
    }
    _write_json(out_dir / "run_report.json", report)
    for verdict, count in tally.items():
        if count:
            print(f"{verdict}: {count}")
    print(f"wrote {out_dir / 'run_report.json'}")
    return EXIT_OK


_SWEEP_COLUMNS = [
    "m",
    "trials",
    "family",
    "model",
    "per_group_estimate",
    "per_group_stderr",
    "overall_estimate",
    "overall_stderr",
    "closed_form_per_group",
    "closed_form_overall",
    "overall_within_4_sigma",
    "sift_inclusive_estimate",
    "sift_inclusive_stderr",
]


def _parse_m_values(text: str) -> list[int]:
    try:
        values = [int(chunk) for chunk in text.split(",") if chunk.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"--m-values must be comma-separated integers, got {text!r}") from exc
    if not values or any(v < 0 for v in values):
        raise ConfigError("--m-values needs at least one non-negative integer")
    return values


def cmd_attack_sweep(args: argparse.Namespace) -> int:
    family = EncodingFamily(args.family)
    model = attack_from_dict({"kind": args.model} if args.model != "entangle-cnot"
                             else {"kind": "entangle", "unitary": "cnot-probe"}, family)
    m_values = _parse_m_values(args.m_values)
    seed = _resolve_seed(args.seed, None)
    rng = np.random.default_rng(seed)
    config = ProtocolConfig(family=family, seed=seed)

    rows = []
    reports = []
    for m in m_values:
        report = monte_carlo_detection(config, model, args.trials, rng, m=m)
        reports.append(report.to_dict())
        within = ""
        if report.closed_form_overall is not None:
            sigma = math.sqrt(
                max(report.closed_form_overall * (1.0 - report.closed_form_overall), 1e-12)
                / report.trials
            )
            within = "yes" if abs(report.overall_estimate - report.closed_form_overall) <= 4 * sigma else "no"
        row = report.to_dict()
        row["overall_within_4_sigma"] = within
        rows.append(row)
        closed = "" if report.closed_form_overall is None else f"{report.closed_form_overall:.6f}"
        print(
            f"m={m}: overall={report.overall_estimate:.6f}"
            f" closed_form={closed or 'n/a'} within_4_sigma={within or 'n/a'}"
        )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=_SWEEP_COLUMNS, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        clean = {
            key: ("" if row.get(key) is None else row.get(key, "")) for key in _SWEEP_COLUMNS
        }
        writer.writerow(clean)
    _write_text(out_dir / "attack_sweep.csv", buffer.getvalue())
    _write_json(
        out_dir / "attack_sweep.json",
        {"schema_version": SCHEMA_VERSION, "seed": seed, "reports": reports},
    )
    print(f"wrote {out_dir / 'attack_sweep.csv'}")
    return EXIT_OK


def cmd_repro_figures(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed, None)
    rng = np.random.default_rng(seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [
        "conventions: |-_dp> = (|01> - |10>)/sqrt(2); "
        "|-_r> = (|00> - |01> + |10> + |11>)/2"
    ]
    for scenario in all_scenarios(args.shots):
        hist = run_scenario(scenario, rng)
        status, detail = check_histogram(hist, expected_distribution(scenario))
        suffix = f" ({detail})" if detail else ""
        lines.append(f"{scenario.fig_id} {status}{suffix}")
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["outcome", "count"])
        for outcome in sorted(hist.counts):
            writer.writerow([outcome, hist.counts[outcome]])
        _write_text(out_dir / f"{scenario.fig_id}.csv", buffer.getvalue())
    summary = "\n".join(lines) + "\n"
    _write_text(out_dir / "summary.txt", summary)
    print(summary, end="")
    print(f"wrote {out_dir / 'summary.txt'}")
    return EXIT_OK


def cmd_efficiency(args: argparse.Namespace) -> int:
    if args.n < 1 or args.l < 1:
        raise ConfigError("need --n >= 1 and --l >= 1")
    if args.runs < 1:
        raise ConfigError("--runs must be positive")
    seed = _resolve_seed(args.seed, None)
    report = ideal_report(args.n, args.l)
    measured = measure_preparation(args.n, args.l, args.runs, seed)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        **report.to_dict(),
        "measured": measured.to_dict(),
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "efficiency.json", payload)
    print(
        f"xi = {payload['xi']} ({payload['xi_float']:.6f}); measured participant qubits/run"
        f" = {measured.mean_participant_qubits:.2f} (expected {measured.expected_participant_qubits:.0f})"
    )
    print(f"wrote {out_dir / 'efficiency.json'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfq",
        description="Simulate the collective-noise-immune private comparison protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run full protocol trials and tally verdicts")
    run.add_argument("--config", help="JSON config file; flags override its fields")
    run.add_argument("--family", choices=["dephasing", "rotation"])
    run.add_argument("--n", type=int, help="number of participants")
    run.add_argument("--l", type=int, help="secret length in bits")
    run.add_argument("--delta", type=float, help="oversampling fraction")
    run.add_argument("--trials", type=int, help="number of protocol runs")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="report directory")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("attack-sweep", help="Monte Carlo detection rates against closed forms")
    sweep.add_argument("--model", required=True,
                       choices=["intercept-resend", "measure-resend", "entangle-cnot"])
    sweep.add_argument("--family", default="dephasing", choices=["dephasing", "rotation"])
    sweep.add_argument("--m-values", default="1,5,10", help="comma-separated attacked group counts")
    sweep.add_argument("--trials", type=int, default=100_000)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--out", default="reports")
    sweep.set_defaults(func=cmd_attack_sweep)

    repro = sub.add_parser("repro-figures", help="sample the six reference circuit scenarios")
    repro.add_argument("--shots", type=int, default=10_000)
    repro.add_argument("--seed", type=int)
    repro.add_argument("--out", default="reports")
    repro.set_defaults(func=cmd_repro_figures)

    eff = sub.add_parser("efficiency", help="ideal qubit budget plus measured preparation counts")
    eff.add_argument("--n", type=int, default=3)
    eff.add_argument("--l", type=int, default=8)
    eff.add_argument("--runs", type=int, default=200)
    eff.add_argument("--seed", type=int)
    eff.add_argument("--out", default="reports")
    eff.set_defaults(func=cmd_efficiency)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
