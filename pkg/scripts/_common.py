"""Shared helpers for the experiment scripts."""

import argparse
import json
from pathlib import Path

from bladeopt.config import apply_overrides, config_from_dict, load_config


def parser(description, out_default):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("-c", "--config", help="base configuration file (default: built-in defaults)")
    ap.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config value by dotted path (repeatable)")
    ap.add_argument("--out", default=out_default, help=f"output directory (default: {out_default})")
    return ap


def base_config(args, *extra):
    overrides = [f"output_dir={args.out}", *extra, *args.set]
    if args.config:
        return load_config(args.config, overrides)
    return config_from_dict(apply_overrides({"version": 1}, overrides))


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path
