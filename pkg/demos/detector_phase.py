"""Calibrate the local connectivity detector and sweep the number of bridge edges.

A scaled-down version of the acceptance experiment (n = 200, 200 runs per point),
so it finishes in well under a minute.

Run:  python3 demos/detector_phase.py
"""
import math

from topinfer.detector import AccessLog, DetectorConfig, calibrate_threshold, phase_sweep
from topinfer.ensembles import ErdosRenyi, PlantedBridge

n = 200
p = 2 * math.log(n) / n
runs = 200

log = AccessLog(0)
cal = calibrate_threshold(PlantedBridge(n // 2, n // 2, 0, p), ErdosRenyi(n, p), DetectorConfig(), runs, 1, log=log)
print(f"calibrated threshold {cal.threshold:.4f} at walk length {cal.config.length_for(n)}, "
      f"single-trial balanced error {cal.balanced_error:.3f}")

print("   k   detection rate   +/-   locality violations")
for row in phase_sweep(n, [0, 2, 8, 32, 128, 512, 2048], p, cal.config, runs, 2, workers=4):
    print(f"{row['k']:4d}   {row['detection_rate']:.3f}            {row['std_error']:.3f}  {row['locality_violations']}")
print("calibration queries:", log.n_queries, "violations:", log.violations)
