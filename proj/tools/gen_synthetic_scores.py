#!/usr/bin/env python3
"""Generate the synthetic per-project binary raw-score fixture.

The four source projects publish their assessments only as qualitative
catalogues, so the bundled dataset ships a deterministic stand-in with the
same schema: one 0/1 value per (project, source NBS label, project facet
label). Probabilities depend on the level-2 class of the NBS the label
belongs to, which gives the downstream PCA some structure to find.

Usage: gen_synthetic_scores.py <data-dir> [--seed N]
"""
import argparse
import csv
import json
import random
from pathlib import Path

LEVEL2 = {
    "NBS_sau": "su", "NBS_smvu": "su", "NBS_tvu": "tu", "NBS_thu": "tu",
    "NBS_ir": "ir", "NBS_is": "is", "NBS_ib": "ib",
}

#                              su    tu    ir    is    ib
PROB = {
    "climate_mitigation_adaptation": (0.80, 0.70, 0.50, 0.50, 0.50),
    "water_management":              (0.40, 0.85, 0.90, 0.50, 0.30),
    "coastal_resilience":            (0.10, 0.10, 0.40, 0.20, 0.20),
    "green_space_management":        (0.95, 0.60, 0.50, 0.50, 0.80),
    "air_quality":                   (0.80, 0.60, 0.20, 0.20, 0.40),
    "urban_regeneration":            (0.60, 0.50, 0.40, 0.30, 0.40),
    "participatory_planning":        (0.20, 0.10, 0.10, 0.10, 0.20),
    "social_justice_cohesion":       (0.70, 0.30, 0.20, 0.20, 0.30),
    "public_health_wellbeing":       (0.80, 0.50, 0.30, 0.30, 0.40),
    "economic_opportunities":        (0.30, 0.30, 0.20, 0.30, 0.20),
    "food_fibers":                   (0.25, 0.05, 0.10, 0.30, 0.10),
    "fuel":                          (0.05, 0.05, 0.05, 0.10, 0.05),
    "biochemicals":                  (0.05, 0.05, 0.05, 0.05, 0.10),
    "fresh_water":                   (0.20, 0.40, 0.60, 0.30, 0.20),
    "climate_regulation":            (0.90, 0.80, 0.40, 0.50, 0.50),
    "water_regulation":              (0.50, 0.90, 0.90, 0.60, 0.30),
    "water_purification":            (0.30, 0.70, 0.60, 0.50, 0.20),
    "air_quality_regulation":        (0.80, 0.60, 0.20, 0.20, 0.40),
    "erosion_regulation":            (0.30, 0.30, 0.90, 0.90, 0.30),
    "pollination":                   (0.60, 0.40, 0.20, 0.30, 0.90),
    "disease_pest_regulation":       (0.20, 0.20, 0.20, 0.20, 0.20),
    "aesthetic_value":               (0.95, 0.70, 0.60, 0.20, 0.50),
    "recreation_ecotourism":         (0.90, 0.40, 0.50, 0.10, 0.40),
    "social_relations":              (0.80, 0.30, 0.20, 0.20, 0.30),
    "spiritual_religious":           (0.40, 0.10, 0.20, 0.05, 0.30),
    "habitats_for_species":          (0.80, 0.50, 0.70, 0.40, 0.95),
    "soil_formation":                (0.20, 0.10, 0.20, 0.90, 0.30),
    "nutrient_cycling":              (0.20, 0.20, 0.30, 0.90, 0.30),
    "primary_production":            (0.30, 0.20, 0.30, 0.40, 0.40),
}
CLASS_INDEX = {"su": 0, "tu": 1, "ir": 2, "is": 3, "ib": 4}
# food-growing spaces get the provisioning services they are built for
FOOD_GROWING = {"NBS22", "NBS23"}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("data_dir", type=Path)
    ap.add_argument("--seed", type=int, default=20201001)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    owner = {}  # (project, label) -> first NBS entry listing it
    with open(args.data_dir / "entries.jsonl", encoding="utf-8") as f:
        for line in f:
            e = json.loads(line)
            for project, labels in e["project_labels"].items():
                for label in labels:
                    owner.setdefault((project, label), e)

    facets_by_project = {}
    with open(args.data_dir / "crosswalk.tsv", encoding="utf-8") as f:
        for row in csv.DictReader(f, delimiter="\t"):
            facets_by_project.setdefault(row["project"], []).append(
                (row["project_facet_label"], row["baseline_facet"]))

    out_rows = []
    for (project, label), entry in sorted(owner.items()):
        cls = CLASS_INDEX[LEVEL2[entry["taxonomy_leaf"]]]
        for facet_label, baseline in facets_by_project.get(project, []):
            p = PROB[baseline][cls]
            if entry["id"] in FOOD_GROWING and baseline == "food_fibers":
                p = 0.9
            out_rows.append((project, label, facet_label, 1 if rng.random() < p else 0))

    with open(args.data_dir / "raw_scores.tsv", "w", encoding="utf-8", newline="") as f:
        f.write("project\tsource_nbs_label\tproject_facet_label\tvalue\n")
        for r in out_rows:
            f.write("\t".join(str(x) for x in r) + "\n")


if __name__ == "__main__":
    main()
