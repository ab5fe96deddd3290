"""Writes synthetic_rss.csv: one representative RSS per sensor from a single
ground-level emitter, log-distance pathloss with lognormal shadowing."""

import csv

import numpy as np

EXPONENT = 3.45
SIGMA_DB = 1.86
SENSORS = 15
EMITTER = (12.41, 17.56)
SEED = 20190815

rng = np.random.default_rng(SEED)
positions = rng.uniform(0.0, 50.0, size=(SENSORS, 2))
distances = np.hypot(positions[:, 0] - EMITTER[0], positions[:, 1] - EMITTER[1])
distances = np.maximum(distances, 1.0)
shadow_db = rng.normal(0.0, SIGMA_DB, size=SENSORS)
rss = distances ** (-EXPONENT) * 10.0 ** (shadow_db / 10.0)

with open("synthetic_rss.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["sensor_id", "distance_m", "rss_linear"])
    for i, (d, p) in enumerate(zip(distances, rss)):
        w.writerow([i, f"{d:.6f}", f"{p:.9e}"])
