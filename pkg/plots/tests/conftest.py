from pathlib import Path

import pytest

HEADER = ("variant,swept_parameter,swept_value,expected_revenue,"
          "satisfaction,running_time_s,trials,seed")
VARIANTS = ("dpam", "dtam", "dpam_s", "dtam_s")

SWEEP_VALUES = {
    "granularity": (0.5, 0.25, 0.1, 0.05),
    "k": (1, 2, 3, 4, 5),
    "m": (25, 50, 100, 200),
    "epsilon": (1.0, 10.0, 100.0, 400.0),
}


def write_sweep_file(path: Path, parameter: str) -> Path:
    """A schema-exact results file with plausible made-up numbers."""
    lines = [HEADER]
    for variant_index, variant in enumerate(VARIANTS):
        for value_index, value in enumerate(SWEEP_VALUES[parameter]):
            revenue = 10.0 + 5.0 * value_index + variant_index
            satisfaction = max(0.05, 0.5 - 0.05 * value_index)
            runtime = 0.001 * (1 + value_index) * (1 + variant_index)
            lines.append(f"{variant},{parameter},{value},{revenue},"
                         f"{satisfaction},{runtime},500,0")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def results_dir(tmp_path) -> Path:
    directory = tmp_path / "results"
    directory.mkdir()
    for parameter in SWEEP_VALUES:
        write_sweep_file(directory / f"sweep_{parameter}.csv", parameter)
    return directory
