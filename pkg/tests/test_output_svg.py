"""File formats: CSV round trips, JSON summaries, SVG structure."""

import io
import json
import re

import numpy as np
import pytest

from stochosc.catalog import build_model
from stochosc.integrate import IntegrationConfig, Trajectory, simulate_ensemble, simulate_path
from stochosc.output import (
    convergence_dict,
    ensemble_stats_dict,
    read_trajectory_csv,
    write_ensemble_csv,
    write_ensemble_json,
    write_convergence_json,
    write_trajectory_csv,
)
from stochosc.integrate import StrongOrderResult, estimate_strong_order
from stochosc.svgplot import render_svg
from stochosc.system import reduce_to_phase_system

from helpers import build_antidamped_cubic, build_explosive_quintic

DUFFING = reduce_to_phase_system(build_model("duffing"))


def duffing_traj(T=0.5, seed=7):
    return simulate_path(DUFFING, [1.0, 0.0], IntegrationConfig(dt=1e-3, T=T), seed=seed)


class TestTrajectoryCsv:
    def test_header_shape(self):
        buf = io.StringIO()
        write_trajectory_csv(duffing_traj(), buf)
        header = buf.getvalue().splitlines()[0]
        assert header == "t,x_1,v_1,escaped"

    def test_multicomponent_header(self):
        system = reduce_to_phase_system(build_model("coupled_lienard"))
        traj = simulate_path(system, [1.0, 1.0, 0.0, 0.0],
                             IntegrationConfig(dt=1e-3, T=0.1), seed=1)
        buf = io.StringIO()
        write_trajectory_csv(traj, buf)
        assert buf.getvalue().splitlines()[0] == "t,x_1,x_2,v_1,v_2,escaped"

    def test_round_trip_is_bit_exact(self):
        traj = duffing_traj()
        buf = io.StringIO()
        write_trajectory_csv(traj, buf)
        buf.seek(0)
        times, states, escaped = read_trajectory_csv(buf)
        assert np.array_equal(times, traj.times)
        assert np.array_equal(states, traj.states)
        assert escaped == traj.escaped is False

    def test_escaped_flag_round_trips(self):
        system = reduce_to_phase_system(build_explosive_quintic())
        traj = simulate_path(system, [2.0, 0.0],
                             IntegrationConfig(dt=1e-4, T=10.0), seed=3)
        assert traj.escaped
        buf = io.StringIO()
        write_trajectory_csv(traj, buf)
        content = buf.getvalue()
        # the flag column is constant over all rows
        for line in content.splitlines()[1:]:
            assert line.endswith(",1")
        buf.seek(0)
        _, states, escaped = read_trajectory_csv(buf)
        assert escaped
        assert np.array_equal(states, traj.states)

    def test_uses_lf_line_endings_and_full_precision(self):
        buf = io.StringIO()
        write_trajectory_csv(duffing_traj(), buf)
        content = buf.getvalue()
        assert "\r" not in content
        assert content.endswith("\n")
        # repr round trip: a third-row float reparses to the same bits
        row = content.splitlines()[3].split(",")
        assert float(row[1]) == duffing_traj().states[2, 0]

    def test_wrong_header_rejected(self):
        with pytest.raises(ValueError, match="CSV"):
            read_trajectory_csv(io.StringIO("a,b,c\n1,2,3\n"))


class TestEnsembleOutputs:
    def setup_method(self):
        self.res = simulate_ensemble(DUFFING, [1.0, 0.0],
                                     IntegrationConfig(dt=1e-3, T=0.2),
                                     seed=9, n_paths=10)

    def test_csv_columns(self):
        buf = io.StringIO()
        write_ensemble_csv(self.res, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "t,mean_abs_z,var_abs_z,n_alive"
        assert len(lines) == 1 + len(self.res.times)
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 1.0
        assert first[3] == "10"

    def test_stats_dict_contract(self):
        d = ensemble_stats_dict(self.res, "duffing", representation="direct")
        assert d == {
            "model": "duffing",
            "representation": "direct",
            "seed": 9,
            "n_paths": 10,
            "escape_count": 0,
            "escape_times": [],
        }

    def test_stats_dict_with_escapes(self):
        system = reduce_to_phase_system(build_antidamped_cubic())
        res = simulate_ensemble(system, [1.0, 1.0],
                                IntegrationConfig(dt=1e-3, T=2.0, R_max=50.0),
                                seed=13, n_paths=10)
        d = ensemble_stats_dict(res, "antidamped_cubic")
        assert d["escape_count"] == len(d["escape_times"]) > 0
        assert all(isinstance(t, float) for t in d["escape_times"])

    def test_json_is_sorted_and_newline_terminated(self):
        buf = io.StringIO()
        write_ensemble_json(self.res, "duffing", buf)
        text = buf.getvalue()
        assert text.endswith("\n")
        doc = json.loads(text)
        assert list(doc) == sorted(doc)
        assert doc["seed"] == 9


class TestConvergenceOutput:
    def test_dict_fields(self):
        res = StrongOrderResult(dts=np.array([0.002, 0.004]),
                                errors=np.array([1e-4, 2e-4]),
                                order=1.0, intercept=-3.0, n_paths=50,
                                n_escaped=2, reliable=True)
        d = convergence_dict(res, model="duffing")
        assert d["order_estimate"] == 1.0
        assert d["errors_per_level"] == [1e-4, 2e-4]
        assert d["dts"] == [0.002, 0.004]
        assert d["n_paths"] == 50 and d["n_escaped"] == 2
        assert d["reliable"] is True
        assert d["model"] == "duffing"
        assert "model" not in convergence_dict(res)

    def test_json_writer(self):
        res = estimate_strong_order(DUFFING, [1.0, 0.0], T=0.5, seed=3,
                                    n_paths=8, levels=3, dt_fine=2.0 ** -7)
        buf = io.StringIO()
        write_convergence_json(res, buf, model="duffing")
        doc = json.loads(buf.getvalue())
        assert doc["reliable"] is True
        assert len(doc["errors_per_level"]) == 2


class TestSvg:
    def test_document_structure(self):
        svg = render_svg(duffing_traj(), "duffing")
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")
        assert "<title>duffing trajectory (seed 7)</title>" in svg
        assert "duffing sample path, seed 7" in svg
        # two panel frames, one polyline each for a scalar model
        assert svg.count("<rect") == 3            # background + 2 frames
        assert svg.count("<polyline") == 2
        # axis labels
        assert ">t</text>" in svg
        assert ">x</text>" in svg
        assert ">v</text>" in svg

    def test_multicomponent_gets_polyline_per_component(self):
        system = reduce_to_phase_system(build_model("coupled_lienard"))
        traj = simulate_path(system, [1.0, 1.0, 0.0, 0.0],
                             IntegrationConfig(dt=1e-3, T=0.1), seed=1)
        svg = render_svg(traj, "coupled_lienard")
        assert svg.count("<polyline") == 4

    def test_two_point_trajectory_draws_one_segment_per_panel(self):
        traj = simulate_path(DUFFING, [1.0, 0.0],
                             IntegrationConfig(dt=0.01, T=0.01), seed=1)
        svg = render_svg(traj, "duffing")
        for m in re.finditer(r'<polyline points="([^"]+)"', svg):
            assert len(m.group(1).split()) == 2

    def test_long_trajectory_is_decimated(self):
        traj = simulate_path(DUFFING, [1.0, 0.0],
                             IntegrationConfig(dt=1e-3, T=10.0), seed=2)
        assert traj.states.shape[0] == 10001
        svg = render_svg(traj, "duffing")
        for m in re.finditer(r'<polyline points="([^"]+)"', svg):
            assert len(m.group(1).split()) <= 2000

    def test_escaped_trajectory_gets_footnote(self):
        system = reduce_to_phase_system(build_explosive_quintic())
        traj = simulate_path(system, [2.0, 0.0],
                             IntegrationConfig(dt=1e-4, T=10.0), seed=3)
        svg = render_svg(traj, "explosive")
        assert "path escaped at t =" in svg

    def test_empty_trajectory_rejected(self):
        empty = Trajectory(times=np.zeros(0), states=np.zeros((0, 2)),
                           escaped=False, escape_time=None, seed=0, path_index=0)
        with pytest.raises(ValueError, match="empty"):
            render_svg(empty, "duffing")
