"""End-to-end CLI tests via subprocess.

Exit code contract: 0 success (including infeasible N/A results), 1 usage
or configuration errors, 2 reproduce-tolerance failures.
"""

import json
import os
import shutil
import subprocess
import sys

import pytest


def run_cli(*args, env=None):
    merged = dict(os.environ)
    if env:
        merged.update(env)
    return subprocess.run(
        [sys.executable, "-m", "vla_roofline", *args],
        capture_output=True,
        text=True,
        env=merged,
    )


def test_analyze_default_table():
    result = run_cli("analyze")
    assert result.returncode == 0
    assert result.stderr == ""
    out = result.stdout
    assert "model" in out and "pi0" in out
    assert "e2e_latency_ms" in out and "3.19" in out
    assert "sync_frequency_hz" in out and "313.6" in out
    assert "footprint_gb" in out and "5.05" in out


def test_analyze_json_round_trip():
    result = run_cli("analyze", "--model", "pi0", "--hw", "b100",
                     "--format", "json")
    assert result.returncode == 0
    record = json.loads(result.stdout)
    assert record["model"] == "pi0"
    assert record["feasible"] == "yes"
    assert record["e2e_latency_ms"] == 3.19
    assert record["sync_frequency_hz"] == 313.6
    assert record["vision_bound"] == "compute"
    assert record["vlm_bound"] == "compute"
    assert record["action_bound"] == "memory"
    assert record["vlm_oi"] == 598.8
    assert record["footprint_gb"] == 5.05


def test_analyze_csv_key_value_rows():
    result = run_cli("analyze", "--format", "csv")
    assert result.returncode == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "key,value"
    assert "e2e_latency_ms,3.19" in lines
    assert "feasible,yes" in lines


def test_analyze_edge_server_includes_network_legs():
    result = run_cli("analyze", "--placement", "edge-server",
                     "--net", "ethernet-10g", "--format", "json")
    assert result.returncode == 0
    record = json.loads(result.stdout)
    assert record["placement"] == "edge server (b100 via ethernet-10g)"
    assert record["observation_upload_ms"] == 0.09
    assert record["action_download_ms"] == 0.05
    assert record["e2e_latency_ms"] == 3.33


def test_analyze_async_adds_rate():
    result = run_cli("analyze", "--placement", "edge-server", "--net", "4g",
                     "--async", "--format", "json")
    assert result.returncode == 0
    record = json.loads(result.stdout)
    # 4G upload (19 Mbps) throttles the pipeline below the GPU rate.
    assert record["async_frequency_hz"] == 51.1
    assert record["sync_frequency_hz"] == 13.7


def test_analyze_dual_system_record():
    result = run_cli("analyze", "--hw", "thor", "--s2-cap", "5",
                     "--format", "json")
    assert result.returncode == 0
    record = json.loads(result.stdout)
    assert record["s2_cap_hz"] == 5
    assert record["s1_latency_ms"] == 33.26
    assert record["s2_latency_ms"] == 20.2
    assert record["async_frequency_hz"] == 27.0


def test_analyze_infeasible_is_not_an_error():
    result = run_cli("analyze", "--model", "pi0-xxl", "--hw", "thor")
    assert result.returncode == 0
    assert "feasible" in result.stdout and "no" in result.stdout
    assert "N/A" in result.stdout
    assert "needs" in result.stdout  # capacity note explains the N/A


def test_missing_net_is_usage_error():
    result = run_cli("analyze", "--placement", "edge-server")
    assert result.returncode == 1
    assert "edge-server placement requires --net" in result.stderr


def test_unknown_model_is_usage_error():
    result = run_cli("analyze", "--model", "pi9")
    assert result.returncode == 1
    assert result.stderr.startswith("error:")
    assert "pi9" in result.stderr


def test_unknown_reproduce_id_is_usage_error():
    result = run_cli("reproduce", "T2")
    assert result.returncode == 1
    assert "invalid choice" in result.stderr


def test_reproduce_passes_against_bundled_references():
    result = run_cli("reproduce", "T3")
    assert result.returncode == 0
    assert "T3: PASS" in result.stdout
    assert "overall: PASS" in result.stdout


def test_reproduce_all_lists_every_table():
    result = run_cli("reproduce", "all", "--format", "json")
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert [group["table"] for group in payload] == [
        "T1", "T3", "T4", "T5", "T6", "T8", "T9", "collab"]
    assert all(group["passed"] for group in payload)


def test_reproduce_fails_with_doctored_presets(tmp_path):
    # Shadow only hardware.yaml; a halved B100 bandwidth must break the
    # latency table and exit 2.
    doctored = (
        "thor: {FP32_TFLOPS: 100, BF16_TFLOPS: 400, INT8_TOPS: 800, "
        "HBM_BW_GBs: 270, Memory_GB: 128}\n"
        "rtx4090: {FP32_TFLOPS: 83, BF16_TFLOPS: 165, INT8_TOPS: 330, "
        "HBM_BW_GBs: 1008, Memory_GB: 24}\n"
        "a100: {FP32_TFLOPS: 20, BF16_TFLOPS: 312, INT8_TOPS: 624, "
        "HBM_BW_GBs: 2039, Memory_GB: 80}\n"
        "h100: {FP32_TFLOPS: 67, BF16_TFLOPS: 989, INT8_TOPS: 1979, "
        "HBM_BW_GBs: 3350, Memory_GB: 80}\n"
        "b100: {FP32_TFLOPS: 60, BF16_TFLOPS: 1750, INT8_TOPS: 3500, "
        "HBM_BW_GBs: 4000, Memory_GB: 192}\n"
    )
    (tmp_path / "hardware.yaml").write_text(doctored, encoding="utf-8")
    result = run_cli("reproduce", "T3",
                     env={"VLA_ROOFLINE_PRESETS": str(tmp_path)})
    assert result.returncode == 2
    assert "FAIL" in result.stdout
    assert "overall: FAIL" in result.stdout


def test_env_override_changes_analyze_output(tmp_path):
    (tmp_path / "networks.yaml").write_text(
        "toy-link: {bandwidth_mbps: 1, base_latency_ms: 100}\n",
        encoding="utf-8")
    result = run_cli("analyze", "--placement", "edge-server",
                     "--net", "toy-link", "--format", "json",
                     env={"VLA_ROOFLINE_PRESETS": str(tmp_path)})
    assert result.returncode == 0
    record = json.loads(result.stdout)
    # 46.5 kB over 1 Mbps plus 100 ms base latency.
    assert record["observation_upload_ms"] == 472.0
    # Without the override the same name is rejected.
    assert run_cli("analyze", "--placement", "edge-server",
                   "--net", "toy-link").returncode == 1


def test_sweep_rows_and_determinism():
    args = ("sweep", "--chunk", "5,10,50", "--steps", "1,10",
            "--format", "csv")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    lines = first.stdout.strip().splitlines()
    assert lines[0].startswith("chunk,steps,feasible")
    assert len(lines) == 1 + 3 * 2


def test_sweep_decoding_axis():
    result = run_cli("sweep", "--decoding", "diffusion,autoregressive",
                     "--hw", "b100", "--format", "csv")
    assert result.returncode == 0
    lines = result.stdout.strip().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("diffusion,")
    assert lines[2].startswith("autoregressive,")


def test_out_writes_file_instead_of_stdout(tmp_path):
    target = tmp_path / "report.txt"
    result = run_cli("analyze", "--out", str(target))
    assert result.returncode == 0
    assert result.stdout == ""
    content = target.read_text(encoding="utf-8")
    assert "e2e_latency_ms" in content
    assert content.endswith("\n")


def test_list_presets_names_everything():
    result = run_cli("list-presets")
    assert result.returncode == 0
    for name in ("pi0", "pi0-xxl", "gemma-2b", "siglip-so400m",
                 "b100", "thor", "ethernet-10g", "4g"):
        assert name in result.stdout


@pytest.mark.skipif(shutil.which("vla-roofline") is None,
                    reason="console script not on PATH")
def test_console_script_entry_point():
    result = subprocess.run(["vla-roofline", "list-presets"],
                            capture_output=True, text=True)
    assert result.returncode == 0
    assert "models:" in result.stdout
