#!/usr/bin/env python3
# Copyright 2026 The Hash-Comb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the experiment presets under configs/."""

import argparse
import json
import pathlib

DATASETS = {
    "spambase": {
        "dataset": {"path": "data/spambase.csv", "label_column": "spam"},
        "monolithic_epochs": 25000,
        "few_rounds": (6000, 4),
        "many_rounds": (1000, 40),
    },
    "iot23_okiru": {
        "dataset": {
            "path": "data/iot23_okiru.csv",
            "label_column": "label",
            "positive_label": "Malicious",
        },
        "monolithic_epochs": 10000,
        "few_rounds": (2500, 4),
        "many_rounds": (1000, 14),
    },
    "iot23_hps": {
        "dataset": {
            "path": "data/iot23_hps.csv",
            "label_column": "label",
            "positive_label": "Malicious",
        },
        "monolithic_epochs": 40000,
        "few_rounds": (12000, 4),
        "many_rounds": (1000, 60),
    },
    "coronary": {
        "dataset": {
            "path": "data/cardio_train.csv",
            "label_column": "cardio",
            "delimiter": ";",
        },
        "monolithic_epochs": 12000,
        "few_rounds": (3000, 4),
        "many_rounds": (1000, 26),
    },
}

DP = {"epsilon": 2.0, "delta": 1e-3, "clip": 2.0, "updates": 1, "q": 0.008}


def federated(name, ds_cfg, schedule, variant, description):
    epochs, rounds = schedule
    cfg = {
        "name": name,
        "description": description,
        "dataset": ds_cfg["dataset"],
        "seed": 1,
        "federation": {
            "nodes": 4,
            "rounds": rounds,
            "epochs_per_round": epochs,
            "fraction": 0.25,
        },
        "output_dir": f"runs/{name}",
    }
    if variant == "nohc":
        cfg["mode"] = "fedavg"
    elif variant == "dp":
        cfg["mode"] = "fedavg_dp"
        cfg["dp"] = dict(DP)
    else:
        cfg["mode"] = "fedavg_hc"
        cfg["hc"] = {"level": f"fixed:{int(variant[2:])}"}
    return cfg


def presets():
    out = {}
    for ds, ds_cfg in DATASETS.items():
        name = f"{ds}_monolithic"
        out[name] = {
            "name": name,
            "description": "Centralized baseline",
            "dataset": ds_cfg["dataset"],
            "mode": "monolithic",
            "seed": 1,
            "epochs": ds_cfg["monolithic_epochs"],
            "output_dir": f"runs/{name}",
        }
        epochs, rounds = ds_cfg["few_rounds"]
        for variant in ("nohc", "hc4", "hc6", "hc8", "hc10"):
            name = f"{ds}_few_rounds_{variant}"
            out[name] = federated(
                name, ds_cfg, ds_cfg["few_rounds"], variant,
                f"{rounds} rounds of {epochs} updates, {variant}")
        epochs, rounds = ds_cfg["many_rounds"]
        for variant in ("nohc", "hc6", "hc8", "hc10"):
            name = f"{ds}_many_rounds_{variant}"
            out[name] = federated(
                name, ds_cfg, ds_cfg["many_rounds"], variant,
                f"{rounds} rounds of {epochs} updates, {variant}")
        name = f"{ds}_many_rounds_dp"
        out[name] = federated(name, ds_cfg, ds_cfg["many_rounds"], "dp",
                              "Gaussian noise on every node update")
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="configs", type=pathlib.Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, cfg in presets().items():
        (args.out / f"{name}.json").write_text(json.dumps(cfg, indent=2) + "\n")
    print(f"wrote {len(presets())} presets to {args.out}")


if __name__ == "__main__":
    main()
