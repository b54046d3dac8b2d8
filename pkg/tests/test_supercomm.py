import numpy as np
import pytest
from scipy.sparse.csgraph import connected_components

from synthgraph.edgegen import GenerationConfig, generate
from synthgraph.graph import load_edge_list
from synthgraph.metrics import intra_community_fraction
from synthgraph.model import Targets, extract_model
from synthgraph.refgraphs import watts_strogatz
from synthgraph.supercomm import (
    MANIFEST_HEADER,
    ResidencyMeter,
    SpillError,
    community_targets,
    generate_sharded,
    plan_shards,
    read_stubs,
    split_degrees,
    write_stubs,
)


@pytest.fixture(scope="module")
def ws_model():
    return extract_model(watts_strogatz(2000, 10, 0.1, seed=3))


def test_plan_shards_sizes():
    p = plan_shards(10, 3, 0.84)
    assert p.sizes == (4, 3, 3)
    assert p.starts.tolist() == [0, 4, 7]
    assert p.community_of().tolist() == [0] * 4 + [1] * 3 + [2] * 3


@pytest.mark.parametrize("args", [(10, 3, 0.0), (10, 3, 1.1), (10, 0, 0.5), (2, 3, 0.5)])
def test_plan_shards_rejects(args):
    with pytest.raises(ValueError):
        plan_shards(*args)


def test_split_full_fraction_has_no_inter_share():
    d = np.array([3, 0, 7])
    assert (split_degrees(d, 1.0) == d).all()


def test_split_single_degree():
    intra = split_degrees([25], 0.84)
    assert intra.tolist() == [21]
    assert 25 - intra[0] == 4


def test_split_total_is_exact():
    rng = np.random.default_rng(1)
    d = rng.integers(0, 50, size=5000)
    intra = split_degrees(d, 0.84)
    assert abs(intra.sum() - 0.84 * d.sum()) <= 0.5
    assert (np.abs(intra - 0.84 * d) <= 1).all()
    assert ((intra >= 0) & (intra <= d)).all()


def test_community_targets_keep_ce():
    t = Targets([10, 10, 1] + [0] * 10, [0.5, 0.2, 0.0] + [0.0] * 10)
    local = community_targets(t, np.array([8, 10, 1] + [0] * 10), 0, 13)
    assert local.degree.tolist()[:3] == [8, 10, 1]
    assert local.ce[0] == pytest.approx(45.0)
    assert local.cc[1] == pytest.approx(0.2)


def test_community_targets_cap_at_one():
    local = community_targets(Targets([10, 10], [1.0, 1.0]), np.array([5, 5]), 0, 2)
    assert (local.cc <= 1.0).all()
    assert (local.degree == 1).all()  # capped by community size


def test_stub_table_round_trip(tmp_path):
    write_stubs(tmp_path / "s.tsv", [0, 0, 1], [2, 0, 5], [4, 3, 9])
    comm, res, tgt = read_stubs(tmp_path / "s.tsv")
    assert comm.tolist() == [0, 0, 1] and res.tolist() == [2, 0, 5] and tgt.tolist() == [4, 3, 9]


def test_stub_table_errors(tmp_path):
    with pytest.raises(SpillError):
        read_stubs(tmp_path / "missing.tsv")
    (tmp_path / "bad.tsv").write_text("id\tcommunity\tresidual\ttarget\n0\t0\t1\t1\n5\t0\t1\t1\n")
    with pytest.raises(SpillError):
        read_stubs(tmp_path / "bad.tsv")


def test_one_community_equals_plain_generation(ws_model):
    cfg = GenerationConfig(seed=4)
    plain = generate(ws_model, 3000, cfg, threads=1)
    sharded = generate_sharded(ws_model, 3000, plan_shards(3000, 1, 1.0), cfg, threads=1)
    assert plain == sharded


def test_full_intra_fraction_keeps_communities_apart(ws_model):
    plan = plan_shards(4000, 2, 1.0)
    g = generate_sharded(ws_model, 4000, plan, GenerationConfig(seed=1), threads=1)
    comm = plan.community_of()
    e = g.edge_array()
    assert (comm[e[:, 0]] == comm[e[:, 1]]).all()
    _, labels = connected_components(g.to_csr(), directed=False)
    for lab in np.unique(labels):
        assert len(np.unique(comm[labels == lab])) == 1


def test_sharded_run_spills_and_bounds_residency(ws_model, tmp_path):
    plan = plan_shards(6000, 4, 0.84)
    meter = ResidencyMeter()
    g = generate_sharded(ws_model, 6000, plan, GenerationConfig(seed=2), spill_dir=tmp_path,
                         threads=1, meter=meter)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["community_0.edges", "community_1.edges", "community_2.edges",
                     "community_3.edges", "inter.edges", "manifest.txt", "stubs.tsv"]
    assert (tmp_path / "manifest.txt").read_text().startswith(MANIFEST_HEADER)
    assert meter.peak <= max(plan.sizes) + 6000
    assert meter.current == 0
    frac = intra_community_fraction(g, plan.community_of())
    assert frac == pytest.approx(0.84, abs=0.03)
    # inter edges cross communities; community files stay inside
    comm = plan.community_of()
    # spill files hold global ids without a vertex header
    inter = np.loadtxt(tmp_path / "inter.edges", dtype=np.int64, ndmin=2)
    assert len(inter) > 0
    assert (comm[inter[:, 0]] != comm[inter[:, 1]]).all()
    for k in range(4):
        e = np.loadtxt(tmp_path / f"community_{k}.edges", dtype=np.int64, ndmin=2)
        assert (comm[e] == k).all()


def test_sharded_degree_cap_and_streaming(ws_model, tmp_path):
    plan = plan_shards(3000, 3, 0.7)
    cfg = GenerationConfig(seed=5)
    g = generate_sharded(ws_model, 3000, plan, cfg, threads=1)
    out = tmp_path / "out.edges"
    assert generate_sharded(ws_model, 3000, plan, cfg, threads=1, out_path=out) is None
    assert load_edge_list(out) == g
    assert not (tmp_path / "out.edges.part").exists()


def test_sharded_thread_invariance(ws_model):
    plan = plan_shards(3000, 3, 0.8)
    cfg = GenerationConfig(seed=6)
    assert generate_sharded(ws_model, 3000, plan, cfg, threads=1) == \
        generate_sharded(ws_model, 3000, plan, cfg, threads=2)


def test_plan_size_mismatch(ws_model):
    with pytest.raises(ValueError):
        generate_sharded(ws_model, 100, plan_shards(50, 2), GenerationConfig())
