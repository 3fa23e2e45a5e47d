# Copyright 2026 The covox Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import subprocess

import pytest

COVOX = os.environ.get("COVOX_BIN", "covox")

SCENE = {
    "objects": [
        {"id": 1, "label": "roads",
         "geometry": {"obb": {"center": [0, 0, -0.1], "half_extents": [40, 40, 0.1]}}},
        {"id": 2, "label": "vehicles",
         "geometry": {"obb": {"center": [0, 0, 0.75], "half_extents": [2.2, 0.9, 0.75]}}},
        {"id": 3, "label": "vehicles",
         "geometry": {"obb": {"center": [10, 2, 0.75], "half_extents": [2.2, 0.9, 0.75],
                              "yaw_deg": 20}}},
        {"id": 4, "label": "poles",
         "geometry": {"obb": {"center": [5, -4, 1.2], "half_extents": [0.1, 0.1, 1.6]}}},
        {"id": 5, "label": "vegetation",
         "geometry": {"mesh": {"vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
                               "triangles": [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
                               "pose": {"yaw_deg": 30, "translation": [-6, 6, 0]}}}},
    ],
    "agents": [
        {"id": 1, "pose": {"yaw_deg": 0, "translation": [0, 0, 0]},
         "sensor": {"origin": [0, 0, 2]}},
        {"id": 2, "pose": {"yaw_deg": 20, "translation": [10, 2, 0]},
         "sensor": {"origin": [0, 0, 2]}},
    ],
}

SMALL_GRID = ["--extent", "12.8,12.8,4.8", "--res", "0.2"]


def run(*args, ok=True):
    p = subprocess.run([COVOX, *map(str, args)], capture_output=True, text=True)
    if ok:
        assert p.returncode == 0, p.stderr
        assert p.stderr == ""
    return p


def fails(*args, code=None):
    p = run(*args, ok=False)
    assert p.returncode != 0
    if code is not None:
        assert p.returncode == code
    lines = p.stderr.splitlines()
    assert len(lines) == 1, p.stderr
    assert lines[0].startswith("covox: error: ")
    return lines[0]


@pytest.fixture
def scene(tmp_path):
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(SCENE))
    return path


@pytest.fixture
def grid(tmp_path, scene):
    out = tmp_path / "gt.c3sv"
    run("annotate", "--scene", scene, "--out", out, *SMALL_GRID)
    return out


def test_version_and_help():
    assert "covox" in run("--version").stdout
    assert "annotate" in run("--help").stdout


def test_annotate_writes_grid_and_stats(tmp_path, scene):
    out = tmp_path / "g.c3sv"
    stats = tmp_path / "stats.json"
    p = run("annotate", "--scene", scene, "--out", out, "--stats", stats, *SMALL_GRID)
    assert p.stdout.startswith("annotated ")
    assert out.read_bytes()[:4] == b"C3SV"
    s = json.loads(stats.read_text())
    assert s["dims"] == [64, 64, 24]
    # Per-object counts include voxels lost to a higher-priority object.
    assert s["voxels_occupied"] <= sum(o["voxels"] for o in s["per_object"])
    assert s["voxels_occupied"] > 0


def test_annotate_encodings_decode_identically(tmp_path, scene):
    rle, dense = tmp_path / "r.c3sv", tmp_path / "d.c3sv"
    run("annotate", "--scene", scene, "--out", rle, *SMALL_GRID)
    run("annotate", "--scene", scene, "--out", dense, "--encoding", "dense", *SMALL_GRID)
    assert rle.read_bytes() != dense.read_bytes()
    # Downsampling by one re-encodes without changing labels.
    back = tmp_path / "b.c3sv"
    run("downsample", "--in", dense, "--factor", 1, "--out", back)
    assert back.read_bytes() == rle.read_bytes()


def test_annotate_in_agent_frame(tmp_path, scene):
    a, b = tmp_path / "a.c3sv", tmp_path / "b.c3sv"
    run("annotate", "--scene", scene, "--out", a, *SMALL_GRID)
    run("annotate", "--scene", scene, "--out", b, "--ego", 2, *SMALL_GRID)
    assert a.read_bytes() != b.read_bytes()


def test_oracle_check_reports_no_mismatch(scene):
    p = run("oracle-check", "--scene", scene, *SMALL_GRID)
    fields = dict(line.split(" ", 1) for line in p.stdout.splitlines())
    assert fields["mismatches"] == "0"
    assert fields["voxels"] == str(64 * 64 * 24)
    assert int(fields["brute_force_fine_checks"]) == 64 * 64 * 24 * 5
    assert float(fields["ratio"]) < 1.0


def test_visibility(tmp_path, scene, grid):
    out = tmp_path / "vis.c3sv"
    p = run("visibility", "--scene", scene, "--grid", grid, "--agent", 1, "--out", out)
    visible, total = p.stdout.split()[1], p.stdout.split()[3]
    assert 0 < int(visible) < int(total)


def test_downsample(tmp_path, grid):
    out = tmp_path / "half.c3sv"
    run("downsample", "--in", grid, "--factor", 2, "--out", out)
    assert out.read_bytes()[:4] == b"C3SV"


def test_eval_identity_is_perfect(tmp_path, grid):
    out = tmp_path / "eval.json"
    run("eval", "--pred", grid, "--gt", grid, "--out", out)
    rep = json.loads(out.read_text())
    assert rep["miou"] == 1.0
    for name, iou in rep["per_class_iou"].items():
        tp, fp, fn = rep["counts"][name]
        assert fp == 0 and fn == 0
        assert iou == (1.0 if tp else None)


def test_eval_class_subset(tmp_path, grid):
    out = tmp_path / "eval.json"
    run("eval", "--pred", grid, "--gt", grid, "--classes", "vehicles,poles", "--out", out)
    assert list(json.loads(out.read_text())["per_class_iou"]) == ["vehicles", "poles"]


def test_fuse(tmp_path, scene):
    fused, gt = tmp_path / "f.c3sv", tmp_path / "gt.c3sv"
    p = run("fuse", "--scene", scene, "--ego", 1, "--k", 1, "--out", fused, "--gt-out", gt)
    assert p.stdout.splitlines()[0] == "collaborators 2"
    miou = float(p.stdout.splitlines()[1].split()[1])
    assert 0.0 <= miou <= 1.0


def bench_config(path):
    path.write_text(json.dumps({
        "ranges": [{"name": "small", "lower": [-6.4, -6.4, -2], "dims": [64, 64, 24],
                    "resolution": 0.2}],
        "k": "0..1",
        "noise": {"mu": "0.1:0.2:0.1", "sigma": 0.02, "seed": 3},
        "seed": 5,
    }))
    return path


def test_bench_is_deterministic(tmp_path, scene):
    cfg = bench_config(tmp_path / "cfg.json")
    a, b = tmp_path / "a", tmp_path / "b"
    run("bench", "--scene", scene, "--config", cfg, "--out", a)
    run("bench", "--scene", scene, "--config", cfg, "--out", b)
    lines = (a / "report.jsonl").read_text().splitlines()
    # 2 egos x 1 range x 2 k x 3 noise models (noiseless first).
    assert len(lines) == 12
    assert (a / "report.jsonl").read_bytes() == (b / "report.jsonl").read_bytes()
    assert len((a / "timings.jsonl").read_text().splitlines()) == 12
    assert (a / "table.txt").read_text()


def test_bench_flags_override_config(tmp_path, scene):
    cfg = bench_config(tmp_path / "cfg.json")
    out = tmp_path / "o"
    run("bench", "--scene", scene, "--config", cfg, "--k", "0", "--egos", "2", "--out", out)
    lines = (out / "report.jsonl").read_text().splitlines()
    assert len(lines) == 3


# Failure paths: one stderr line, nonzero exit.

def test_missing_subcommand():
    fails()


def test_unknown_subcommand():
    fails("paint")


def test_missing_required_option(tmp_path):
    fails("annotate", "--out", tmp_path / "g.c3sv")


def test_missing_scene_file(tmp_path):
    fails("annotate", "--scene", tmp_path / "nope.json", "--out", tmp_path / "g.c3sv")


def test_malformed_scene_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"objects\": [")
    fails("annotate", "--scene", bad, "--out", tmp_path / "g.c3sv")


def test_unknown_label(tmp_path):
    s = json.loads(json.dumps(SCENE))
    s["objects"][1]["label"] = "cars"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(s))
    line = fails("annotate", "--scene", bad, "--out", tmp_path / "g.c3sv", *SMALL_GRID)
    assert "unknown label 'cars'" in line


def test_duplicate_object_id(tmp_path):
    s = json.loads(json.dumps(SCENE))
    s["objects"][1]["id"] = 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(s))
    fails("annotate", "--scene", bad, "--out", tmp_path / "g.c3sv", *SMALL_GRID)


def test_bad_extent(tmp_path, scene):
    fails("annotate", "--scene", scene, "--out", tmp_path / "g.c3sv", "--extent", "1,2")


def test_bad_encoding(tmp_path, scene):
    fails("annotate", "--scene", scene, "--out", tmp_path / "g.c3sv", "--encoding", "zip",
          *SMALL_GRID)


def test_unknown_agent(tmp_path, scene, grid):
    fails("visibility", "--scene", scene, "--grid", grid, "--agent", 9,
          "--out", tmp_path / "v.c3sv")


def test_corrupt_grid(tmp_path, scene):
    bad = tmp_path / "bad.c3sv"
    bad.write_bytes(b"NOPE" + bytes(40))
    fails("downsample", "--in", bad, "--factor", 2, "--out", tmp_path / "o.c3sv")


def test_truncated_grid(tmp_path, grid):
    bad = tmp_path / "bad.c3sv"
    bad.write_bytes(grid.read_bytes()[:-3])
    fails("eval", "--pred", bad, "--gt", grid, "--out", tmp_path / "e.json")


def test_indivisible_downsample(tmp_path, grid):
    fails("downsample", "--in", grid, "--factor", 7, "--out", tmp_path / "o.c3sv")


def test_eval_shape_mismatch(tmp_path, grid):
    half = tmp_path / "half.c3sv"
    run("downsample", "--in", grid, "--factor", 2, "--out", half)
    fails("eval", "--pred", half, "--gt", grid, "--out", tmp_path / "e.json")


def test_eval_unknown_class(tmp_path, grid):
    fails("eval", "--pred", grid, "--gt", grid, "--classes", "boats", "--out", tmp_path / "e.json")


def test_fuse_bad_k(tmp_path, scene):
    fails("fuse", "--scene", scene, "--ego", 1, "--k", 7, "--out", tmp_path / "f.c3sv")


def test_fuse_negative_sigma(tmp_path, scene):
    fails("fuse", "--scene", scene, "--ego", 1, "--sigma", -1, "--out", tmp_path / "f.c3sv")


def test_fuse_bad_mode(tmp_path, scene):
    fails("fuse", "--scene", scene, "--ego", 1, "--mode", "max", "--out", tmp_path / "f.c3sv")


def test_bench_unknown_config_key(tmp_path, scene):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rangez": [25.6]}))
    fails("bench", "--scene", scene, "--config", cfg, "--out", tmp_path / "o")


def test_bench_unknown_ego(tmp_path, scene):
    cfg = bench_config(tmp_path / "cfg.json")
    fails("bench", "--scene", scene, "--config", cfg, "--egos", "9", "--out", tmp_path / "o")


def test_bench_bad_gt_source(tmp_path, scene):
    cfg = bench_config(tmp_path / "cfg.json")
    fails("bench", "--scene", scene, "--config", cfg, "--gt-source", "magic",
          "--out", tmp_path / "o")


def test_unwritable_output(tmp_path, scene):
    fails("annotate", "--scene", scene, "--out", tmp_path / "no" / "dir" / "g.c3sv", *SMALL_GRID)
