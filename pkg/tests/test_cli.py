"""
Tests for the maxdist command line: outputs, provenance and exit codes.
"""
import json
import re

import pytest

from maxdist.cli import cli
from maxdist.core.errors import CertificateError
from maxdist.services import cover_service
from maxdist.services.report_service import read_csv


def _invoke(runner, *args):
    return runner.invoke(cli, list(args), obj={})


def _load(path):
    with open(path, encoding="utf-8") as stream:
        return json.load(stream)


def test_generate_koch(runner, output_dir):
    result = _invoke(runner, "generate", "koch", "--depth", "3")
    assert result.exit_code == 0, result.output
    assert "65 vertices, 64 edges" in result.output

    document = _load(output_dir / "koch_d3.json")
    assert len(document["points"]) == 65
    assert len(document["vertices"]) == 65
    assert document["metadata"]["run_config"]["command"] == "generate koch"
    assert document["metadata"]["run_config"]["params"]["depth"] == 3


def test_generate_koch_requires_depth(runner, output_dir):
    result = _invoke(runner, "generate", "koch")
    assert result.exit_code == 2


def test_generate_neighborhood_density(runner, output_dir):
    """Test that the neighborhood sample is (delta_E + delta)-dense."""
    segment = str(output_dir / "seg.json")
    assert _invoke(runner, "generate", "segment", "--delta", "0.1", "-o", segment).exit_code == 0

    result = _invoke(runner, "generate", "neighborhood", "--input", segment, "--r", "0.3", "--delta", "0.01")
    assert result.exit_code == 0, result.output
    document = _load(output_dir / "neighborhood.json")
    assert document["density"] == pytest.approx(0.06)
    assert document["metadata"]["run_config"]["inputs"] == {"input": segment}


def test_cover_snowflake(runner, output_dir):
    result = _invoke(runner, "cover", "snowflake", "--r", "0.1")
    assert result.exit_code == 0, result.output
    assert "length=4.740741" in result.output
    assert "16 pieces" in result.output
    assert "certificate pass" in result.output

    report = _load(output_dir / "snowflake_cover.json")
    assert report["data"]["certificate"]["pass"] is True


def test_cover_check_prints_certificate(runner, output_dir):
    result = _invoke(runner, "cover", "unit", "--r", "0.5", "--check")
    assert result.exit_code == 0, result.output
    assert '"pass": true' in result.output


def test_cover_rejects_radius_outside_domain(runner, output_dir):
    assert _invoke(runner, "cover", "snowflake", "--r", "0.5").exit_code == 2
    assert _invoke(runner, "cover", "unit", "--r", "0.2").exit_code == 2


def test_scaling_fit(runner, output_dir):
    result = _invoke(runner, "scaling", "koch", "--methods", "rect_cover", "--radii", "pow3:2..7", "--fit")
    assert result.exit_code == 0, result.output
    assert "fit rect_cover: slope=-0.261860" in result.output

    metadata, frame = read_csv(str(output_dir / "koch_scaling.csv"))
    assert len(frame) == 6
    assert metadata["run_config"]["params"]["fit"] is True


def test_scaling_method_outside_domain_is_recorded(runner, output_dir):
    """Test that a method outside its domain is reported per record and the run still exits 0."""
    result = _invoke(runner, "scaling", "segment", "--methods", "rect_cover", "--radii", "0.1,0.05")
    assert result.exit_code == 0, result.output
    assert result.output.count("rect_cover: failed (") == 2
    _, frame = read_csv(str(output_dir / "segment_scaling.csv"))
    assert frame["error"].str.contains("koch").all()


def test_scaling_certificate_failure_exits_3(runner, output_dir, monkeypatch):
    """Test that a failed cover certificate still writes the report and then exits 3."""

    def failing_cover(r):
        raise CertificateError(f"rectangle cover at r={r}: worst distance above r")

    monkeypatch.setattr(cover_service, "snowflake_rectangle_cover", failing_cover)
    result = _invoke(runner, "scaling", "koch", "--methods", "rect_cover", "--radii", "pow3:2..3")
    assert result.exit_code == 3
    assert (output_dir / "koch_scaling.csv").exists()


def test_scaling_bad_radii(runner, output_dir):
    assert _invoke(runner, "scaling", "koch", "--radii", "pow3:5..2").exit_code == 2
    assert _invoke(runner, "scaling", "koch", "--radii", "tiny").exit_code == 2
    assert _invoke(runner, "scaling", "koch", "--radii", "0.1,0.2", "--methods", "rect_cover").exit_code == 2


def test_solve_segment(runner, output_dir):
    segment = str(output_dir / "seg.json")
    assert _invoke(runner, "generate", "segment", "--delta", "0.002", "-o", segment).exit_code == 0

    result = _invoke(runner, "solve", "--input", segment, "--r", "0.1")
    assert result.exit_code == 0, result.output
    length = float(re.search(r"length=([0-9.]+)", result.output).group(1))
    assert 1.0 - 1e-6 <= length <= 1.05
    assert "certificate pass" in result.output

    solution = _load(output_dir / "solution.json")
    assert solution["data"]["certificate"]["pass"] is True
    assert solution["metadata"]["run_config"]["inputs"] == {"input": segment}


def test_bound_two_points(runner, output_dir):
    pair = str(output_dir / "pair.json")
    assert _invoke(runner, "generate", "two-points", "-o", pair).exit_code == 0
    result = _invoke(runner, "bound", "--input", pair, "--r", "0.5", "--format", "csv")
    assert result.exit_code == 0, result.output
    assert "lower bound r=0.5: 3.000000 (diameter" in result.output

    _, frame = read_csv(str(output_dir / "bounds.csv"))
    assert frame.loc[0, "lower"] == pytest.approx(3.0)


def test_bound_rejects_small_separation(runner, output_dir):
    pair = str(output_dir / "pair.json")
    _invoke(runner, "generate", "two-points", "-o", pair)
    result = _invoke(runner, "bound", "--input", pair, "--r", "0.5", "--separations", "0.5")
    assert result.exit_code == 2


def test_missing_input_exits_1(runner, output_dir):
    result = _invoke(runner, "solve", "--input", str(output_dir / "missing.json"), "--r", "0.1")
    assert result.exit_code == 1
    assert "cannot read" in result.output


def test_malformed_input_exits_1(runner, output_dir):
    broken = output_dir / "broken.json"
    broken.write_text('{"points": [[0, 0], [1]]}')
    assert _invoke(runner, "solve", "--input", str(broken), "--r", "0.1").exit_code == 1


def test_config_file_supplies_defaults(runner, output_dir):
    """Test that YAML values fill options and explicit flags override them."""
    config = output_dir / "koch.yaml"
    config.write_text("depth: 2\n")

    result = _invoke(runner, "generate", "koch", "--config", str(config))
    assert result.exit_code == 0, result.output
    document = _load(output_dir / "koch_d2.json")
    assert len(document["vertices"]) == 17
    assert document["metadata"]["run_config"]["inputs"]["config"] == str(config)

    result = _invoke(runner, "generate", "koch", "--config", str(config), "--depth", "1")
    assert result.exit_code == 0, result.output
    assert (output_dir / "koch_d1.json").exists()


def test_config_file_must_be_mapping(runner, output_dir):
    config = output_dir / "list.yaml"
    config.write_text("- 1\n- 2\n")
    assert _invoke(runner, "generate", "koch", "--config", str(config)).exit_code == 2


def test_render_layers(runner, output_dir):
    koch = str(output_dir / "koch.json")
    assert _invoke(runner, "generate", "koch", "--depth", "2", "-o", koch).exit_code == 0
    result = _invoke(runner, "render", "--cloud", koch, "--curve", koch)
    assert result.exit_code == 0, result.output
    assert "<svg" in (output_dir / "render.svg").read_text()


def test_render_requires_an_input(runner, output_dir):
    assert _invoke(runner, "render").exit_code == 2
