"""Command line front end.

Subcommands:

* ``simulate``: run a BER sweep from an INI config file and/or flag
  overrides, write CSV results, optionally export the LMS gamma trajectory.
* ``analytic``: print imbalance figures (image-rejection ratio, residual
  leakage ratio, exact nulling coefficient, error floor) and optionally
  write a closed-form BER curve.
* ``compare``: put simulated CSV results side by side with the closed-form
  model at the same operating point.

Exit status is 0 on success and 2 for configuration or usage errors.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from dataclasses import fields, replace

from .analysis import ber_closed_form, ber_floor, equivalent_snr, floor_onset_and_ideal_snr
from .compensator import gamma_true, save_gamma_trajectory
from .harness import (
    COMPENSATION_MODES,
    DETECTION_MODES,
    ConfigError,
    SimConfig,
    run_point_with_trace,
    run_sweep,
    write_records_csv,
)
from .iqi import derive_iqi_params


def parse_snr_grid(text: str) -> tuple[float, ...]:
    """Parse ``start:stop:step`` (inclusive) or a comma-separated value list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"SNR range must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"bad SNR range {text!r}") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"SNR range needs step > 0 and stop >= start, got {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    try:
        values = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad SNR list {text!r}") from exc
    if not values:
        raise ConfigError("empty SNR list")
    return values


_INT_KEYS = {
    "n_subcarriers",
    "cp_len",
    "psk_order",
    "min_bits",
    "max_block_pairs",
    "blocks_per_frame",
    "seed",
}
_FLOAT_KEYS = {
    "bandwidth_hz",
    "carrier_hz",
    "doppler_hz",
    "iqi_kappa_db",
    "iqi_phi_deg",
    "lms_step_size",
}
_SECTION_OF_KEY = {
    "n_subcarriers": "system",
    "cp_len": "system",
    "psk_order": "system",
    "bandwidth_hz": "system",
    "carrier_hz": "system",
    "channel": "channel",
    "doppler_hz": "channel",
    "custom_delays_ns": "channel",
    "custom_powers_db": "channel",
    "iqi_kappa_db": "iqi",
    "iqi_phi_deg": "iqi",
    "detection": "run",
    "compensation": "run",
    "snr_grid_db": "run",
    "min_bits": "run",
    "max_block_pairs": "run",
    "blocks_per_frame": "run",
    "lms_step_size": "run",
    "seed": "run",
}
# config files use short names for a few keys
_FILE_ALIASES = {"profile": "channel", "kappa_db": "iqi_kappa_db", "phi_deg": "iqi_phi_deg", "snr_db": "snr_grid_db", "step_size": "lms_step_size"}


def load_config_file(path: str) -> dict:
    """Read an INI file into SimConfig keyword arguments."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    known = {f.name for f in fields(SimConfig)}
    out: dict = {}
    for section in parser.sections():
        for raw_key, raw_value in parser.items(section):
            key = _FILE_ALIASES.get(raw_key, raw_key)
            if key not in known:
                raise ConfigError(f"unknown config key {raw_key!r} in section [{section}]")
            expected = _SECTION_OF_KEY.get(key)
            if expected is not None and expected != section:
                raise ConfigError(
                    f"config key {raw_key!r} belongs in section [{expected}], found in [{section}]"
                )
            try:
                if key in _INT_KEYS:
                    out[key] = int(raw_value)
                elif key in _FLOAT_KEYS:
                    out[key] = float(raw_value)
                elif key == "snr_grid_db":
                    out[key] = parse_snr_grid(raw_value)
                elif key in ("custom_delays_ns", "custom_powers_db"):
                    out[key] = tuple(float(p) for p in raw_value.split(",") if p.strip())
                else:
                    out[key] = raw_value.strip()
            except ValueError as exc:
                raise ConfigError(f"bad value for {raw_key!r}: {raw_value!r}") from exc
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dstbc-ofdm",
        description="Differential Alamouti STBC-OFDM link simulator with receiver I/Q imbalance",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a BER sweep")
    sim.add_argument("--config", help="INI config file")
    sim.add_argument("--snr", help="SNR grid in dB: start:stop:step or comma list")
    sim.add_argument("--detection", choices=DETECTION_MODES)
    sim.add_argument("--compensation", choices=COMPENSATION_MODES)
    sim.add_argument("--channel", help="itu-pb, itu-va, flat or custom")
    sim.add_argument("--doppler-hz", type=float, dest="doppler_hz")
    sim.add_argument("--kappa-db", type=float, dest="iqi_kappa_db", help="receiver gain imbalance in dB")
    sim.add_argument("--phi-deg", type=float, dest="iqi_phi_deg", help="receiver phase imbalance in degrees")
    sim.add_argument("--psk-order", type=int, dest="psk_order")
    sim.add_argument("--n-subcarriers", type=int, dest="n_subcarriers")
    sim.add_argument("--cp-len", type=int, dest="cp_len")
    sim.add_argument("--min-bits", type=int, dest="min_bits")
    sim.add_argument("--max-block-pairs", type=int, dest="max_block_pairs")
    sim.add_argument("--blocks-per-frame", type=int, dest="blocks_per_frame")
    sim.add_argument("--lms-step", type=float, dest="lms_step_size")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--workers", type=int, default=1, help="parallel processes over SNR points")
    sim.add_argument("--out", help="write results CSV here")
    sim.add_argument(
        "--gamma-out",
        help="write the LMS gamma trajectory CSV (requires lms compensation and a single SNR point)",
    )

    ana = sub.add_parser("analytic", help="print imbalance figures and model curves")
    ana.add_argument("--kappa-db", type=float, default=0.0, help="receiver gain imbalance in dB")
    ana.add_argument("--phi-deg", type=float, default=0.0, help="receiver phase imbalance in degrees")
    ana.add_argument("--psk-order", type=int, default=8)
    ana.add_argument("--snr", help="optional SNR grid for a closed-form BER curve")
    ana.add_argument("--out", help="write the closed-form curve CSV here")

    cmp_ = sub.add_parser("compare", help="simulated results vs closed-form model")
    cmp_.add_argument("--results", required=True, help="CSV produced by simulate")
    cmp_.add_argument("--kappa-db", type=float, default=0.0)
    cmp_.add_argument("--phi-deg", type=float, default=0.0)
    cmp_.add_argument("--psk-order", type=int, default=8)
    return parser


def _config_from_args(args) -> SimConfig:
    kwargs = load_config_file(args.config) if args.config else {}
    cfg = SimConfig(**kwargs)
    overrides = {}
    for key in (
        "detection",
        "compensation",
        "channel",
        "doppler_hz",
        "iqi_kappa_db",
        "iqi_phi_deg",
        "psk_order",
        "n_subcarriers",
        "cp_len",
        "min_bits",
        "max_block_pairs",
        "blocks_per_frame",
        "lms_step_size",
        "seed",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.snr is not None:
        overrides["snr_grid_db"] = parse_snr_grid(args.snr)
    if overrides:
        cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    if args.gamma_out:
        if cfg.compensation != "lms":
            raise ConfigError("--gamma-out requires lms compensation")
        if len(set(cfg.snr_grid_db)) != 1:
            raise ConfigError("--gamma-out requires a single SNR point")
        record, trace = run_point_with_trace(cfg, cfg.snr_grid_db[0])
        save_gamma_trajectory(args.gamma_out, trace)
        records = [record]
    else:
        records = run_sweep(cfg, workers=max(1, args.workers))
    for r in records:
        print(
            f"snr_db={r.snr_db:g} detection={r.detection} compensation={r.compensation} "
            f"bits={r.bits} errors={r.bit_errors} ber={r.ber:.6g}"
        )
    if args.out:
        write_records_csv(args.out, records)
        print(f"wrote {args.out}")
    return 0


def _cmd_analytic(args) -> int:
    params = derive_iqi_params(args.kappa_db, args.phi_deg)
    floor = ber_floor(args.psk_order, params.rho)
    print(f"alpha = {params.alpha:.9g}")
    print(f"beta = {params.beta:.9g}")
    print(f"rho = {params.rho:.9g}")
    print(f"irr_db = {params.irr_db:.9g}")
    print(f"gamma_true = {gamma_true(params):.9g}")
    print(f"ber_floor = {floor:.9g}")
    if math.isfinite(params.irr_db):
        onset_db, ideal_db = floor_onset_and_ideal_snr(params.irr_db)
        print(f"floor_onset_snr_db = {onset_db:.9g}")
        print(f"ideal_reference_snr_db = {ideal_db:.9g}")
    if args.snr:
        grid = parse_snr_grid(args.snr)
        rows = []
        for snr_db in grid:
            snr = math.inf if math.isinf(snr_db) else 10.0 ** (snr_db / 10.0)
            ber = ber_closed_form(args.psk_order, equivalent_snr(snr, params.rho))
            rows.append((snr_db, ber))
        if args.out:
            with open(args.out, "w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(["snr_db", "ber_model"])
                for snr_db, ber in rows:
                    writer.writerow([f"{snr_db:.9g}", f"{ber:.9g}"])
            print(f"wrote {args.out}")
        else:
            for snr_db, ber in rows:
                print(f"snr_db={snr_db:g} ber_model={ber:.6g}")
    return 0


def _cmd_compare(args) -> int:
    params = derive_iqi_params(args.kappa_db, args.phi_deg)
    try:
        with open(args.results, newline="") as handle:
            rows = list(csv.DictReader(handle))
    except OSError as exc:
        raise ConfigError(f"cannot read {args.results!r}: {exc}") from exc
    if not rows:
        raise ConfigError(f"no data rows in {args.results!r}")
    print("snr_db    ber_sim       ber_model     ratio")
    for row in rows:
        try:
            snr_db = float(row["snr_db"])
            ber_sim = float(row["ber"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{args.results!r} is not a simulate results CSV") from exc
        snr = math.inf if math.isinf(snr_db) else 10.0 ** (snr_db / 10.0)
        ber_model = ber_closed_form(args.psk_order, equivalent_snr(snr, params.rho))
        ratio = ber_sim / ber_model if ber_model > 0 else math.inf
        print(f"{snr_db:<9g} {ber_sim:<13.6g} {ber_model:<13.6g} {ratio:.3f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analytic":
            return _cmd_analytic(args)
        return _cmd_compare(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
