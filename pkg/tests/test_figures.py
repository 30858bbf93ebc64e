import json

import pytest

from cftharvest.figures import PRESET_IDS, build_preset, run_figure
from cftharvest.sweeps import KNOWN_QUANTITIES, SweepSpec


def test_every_preset_id_builds():
    for fig_id in PRESET_IDS:
        preset = build_preset(fig_id)
        assert preset.fig_id == fig_id
        assert preset.kind in ("curve", "heatmap", "panels", "slices")
        assert preset.specs
        for spec in preset.specs:
            for q in spec.quantities:
                assert q in KNOWN_QUANTITIES
        # every displayed quantity must actually be computed somewhere
        computed = {q for spec in preset.specs for q in spec.quantities}
        assert set(preset.display) <= computed


def test_unknown_preset_raises():
    with pytest.raises(KeyError):
        build_preset("fig99")


def test_resolution_override_shrinks_grid():
    coarse = build_preset("fig5L", resolution=5)
    assert coarse.specs[0].axis1.steps == 5
    assert coarse.specs[0].axis2.steps == 5
    default = build_preset("fig5L")
    assert default.specs[0].axis1.steps > 5


def test_run_figure_bundle(tmp_path):
    meta = run_figure("fig2", tmp_path, resolution=6, render=False)
    assert meta["preset"] == "fig2"
    assert meta["png"] is None
    assert meta["data_files"] and meta["overlay_files"]
    for name in meta["data_files"] + meta["overlay_files"]:
        assert (tmp_path / name).exists()
    # metadata records the exact sweeps run, reloadable as specs
    for sweep_doc in meta["sweeps"]:
        spec = SweepSpec.from_json(json.dumps(sweep_doc))
        assert spec.axis1.steps == 6
    # data file matches the sweep header contract
    first = (tmp_path / meta["data_files"][0]).read_text().splitlines()
    header = first[0].split(",")
    assert header[0] == spec.axis1.name
    assert len(first) == 1 + spec.axis1.steps * spec.axis2.steps


def test_run_figure_render_writes_png(tmp_path):
    meta = run_figure("fig2", tmp_path, resolution=6, render=True)
    assert meta["png"] == "fig2.png"
    assert (tmp_path / "fig2.png").stat().st_size > 0
