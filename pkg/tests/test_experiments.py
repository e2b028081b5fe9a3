import json

import numpy as np
import pytest

from pclift import GraphError, fwd_comp_lift, gallery_graph, sum_lift
from pclift.experiments import (
    ExperimentConfig,
    GraphPair,
    preorder_spotcheck,
    run_comparison,
)


def tiny_config(pairs, samples=4, workers=1, **kw):
    return ExperimentConfig(pairs=tuple(pairs), n=2, samples=samples, seed=90,
                            workers=workers, **kw)


@pytest.fixture(scope="module")
def g0_pair():
    g0 = gallery_graph("g0")
    return GraphPair("g0 vs lift", g0, fwd_comp_lift(g0, 1), "g0", "g0^f1")


class TestConfig:
    def test_margin_must_dominate_tolerance(self, g0_pair):
        with pytest.raises(GraphError):
            ExperimentConfig(pairs=(g0_pair,), strict_margin=1e-5, tol=1e-4)

    def test_requires_samples(self, g0_pair):
        with pytest.raises(GraphError):
            ExperimentConfig(pairs=(g0_pair,), samples=0)

    def test_requires_path_complete(self):
        from pclift import LabeledDigraph

        broken = LabeledDigraph.from_triples(("1", "2"), [("a", "a", "1")])
        pair = GraphPair("bad", broken, broken, "x", "y")
        with pytest.raises(GraphError):
            run_comparison(tiny_config([pair]))

    def test_ref_name_collision(self):
        g0 = gallery_graph("g0")
        pairs = [
            GraphPair("p1", g0, fwd_comp_lift(g0, 1), "base", "other"),
            GraphPair("p2", gallery_graph("g_alpha"), g0, "base", "g0"),
        ]
        with pytest.raises(GraphError):
            run_comparison(tiny_config(pairs))


class TestRunComparison:
    def test_deterministic_repeat(self, g0_pair):
        s1 = run_comparison(tiny_config([g0_pair]))
        s2 = run_comparison(tiny_config([g0_pair]))
        assert s1.to_json() == s2.to_json()
        assert [r.r_values for r in s1.records] == [r.r_values for r in s2.records]

    def test_worker_count_invariance(self, g0_pair):
        seq = run_comparison(tiny_config([g0_pair], samples=6, workers=1))
        par = run_comparison(tiny_config([g0_pair], samples=6, workers=2))
        assert seq.to_json() == par.to_json()

    def test_shared_graph_computed_once(self):
        g0 = gallery_graph("g0")
        f1 = fwd_comp_lift(g0, 1)
        pairs = [
            GraphPair("p1", g0, f1, "g0", "f1"),
            GraphPair("p2", f1, fwd_comp_lift(g0, 2), "f1", "f2"),
        ]
        stats = run_comparison(tiny_config(pairs))
        assert stats.columns == ("g0", "f1", "f2")
        for rec in stats.records:
            assert len(rec.r_values) == 3

    def test_sum_lift_pair_never_improves(self):
        ga = gallery_graph("g_alpha")
        pair = GraphPair("sum", ga, sum_lift(ga, 2), "ga", "ga^s2")
        stats = run_comparison(tiny_config([pair], samples=5))
        assert stats.pairs[0].improved == 0

    def test_improvement_accounting(self, g0_pair):
        stats = run_comparison(tiny_config([g0_pair], samples=8))
        p = stats.pairs[0]
        assert p.counted == 8 and stats.excluded == 0 and stats.healthy
        gaps = [r.r_values[0] - r.r_values[1] for r in stats.records]
        assert p.improved == sum(g > stats.strict_margin for g in gaps)
        if p.improved:
            manual = sum(g for g in gaps if g > stats.strict_margin) / p.improved
            assert p.mean_gap_when_improved == pytest.approx(manual, rel=1e-12)

    def test_csv_layout(self, tmp_path, g0_pair):
        stats = run_comparison(tiny_config([g0_pair], samples=3))
        path = tmp_path / "samples.csv"
        stats.write_csv(str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0].split(",")[:3] == ["index", "seed_stream", "rejections"]
        assert "r:g0" in lines[0] and "improved:g0 vs g0^f1" in lines[0]
        assert len(lines) == 4

    def test_json_shape_matches_schema(self, g0_pair):
        jsonschema = pytest.importorskip("jsonschema")
        import importlib.resources as res

        stats = run_comparison(tiny_config([g0_pair], samples=3))
        schema = json.loads(
            res.files("pclift").joinpath("schemas/experiment.schema.json").read_text()
        )
        jsonschema.validate(json.loads(stats.to_json()), schema)


class TestSpotcheck:
    def test_identity_pair_passes(self):
        g0 = gallery_graph("g0")
        cfg = tiny_config([], samples=3)
        report = preorder_spotcheck(g0, g0, "direct", cfg)
        assert report.passed and report.checked == 3 and report.witness_level == 0

    def test_comp_lift_witness(self, g1_psi=None):
        g1 = gallery_graph("g1")
        g2 = gallery_graph("g2")
        cfg = tiny_config([], samples=3)
        report = preorder_spotcheck(g1, g2, "fwd_comp", cfg, tmax=2)
        assert report.passed and report.witness_level == 1

    def test_missing_witness_raises(self):
        g_phi = gallery_graph("g_phi")
        g_psi = gallery_graph("g_psi")
        cfg = tiny_config([], samples=2)
        with pytest.raises(GraphError):
            preorder_spotcheck(g_phi, g_psi, "fwd_comp", cfg, tmax=2)

    def test_unknown_kind(self):
        g0 = gallery_graph("g0")
        with pytest.raises(GraphError):
            preorder_spotcheck(g0, g0, "psychic", tiny_config([], samples=2))
