import json
import os
import sys

from dotenv import load_dotenv

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))

from opdad_system.managers.experiment_manager import pilot_calibration  # noqa: E402
from opdad_system.models import ExperimentConfig  # noqa: E402

load_dotenv()
config_path = sys.argv[1] if len(sys.argv) > 1 else None
runs = int(sys.argv[2]) if len(sys.argv) > 2 else int(os.getenv("OPDAD_PILOT_RUNS", "10"))
seed = int(os.getenv("OPDAD_SEED", "20240601"))

if config_path:
    cfg = ExperimentConfig.from_file(config_path)
else:
    cfg = ExperimentConfig()
cfg.seed = seed

print(f"Calibrating epsilon from {runs} pilot runs (M={cfg.scenario.M}, L={cfg.scenario.L}, "
      f"target p_fa={cfg.detector.target_pfa})...")
try:
    epsilon = pilot_calibration(cfg, runs=runs)
except Exception as e:
    print(f"Calibration failed: {e}")
    sys.exit(1)

print(f"Calibrated epsilon: {epsilon:.4f} (configured: {cfg.detector.epsilon})")

# Write the calibrated value back when a config file was given
if config_path:
    with open(config_path, "r", encoding="utf-8") as f:
        data = json.load(f)
    data.setdefault("detector", {})["epsilon"] = round(epsilon, 4)
    with open(config_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
    print(f"Updated {config_path}")
