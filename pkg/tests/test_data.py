import math

import numpy as np
import pytest

from maxprob.data import (CsvFormatError, Dataset, SplitPlan, draw_labeled, gen_gaussian, gen_halfspace,
                          gen_ring, load_csv, make_rng, partition, split, write_csv)

GENS = [gen_halfspace, gen_gaussian, gen_ring]


def test_load_csv_label_column(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,0,1\n0,3,0\n")
    d = load_csv(p, label_col=2)
    assert len(d) == 2 and d.dim == 2
    np.testing.assert_array_equal(d.truth, [True, False])
    np.testing.assert_array_equal(d.points, [[1, 0], [0, 3]])


def test_load_csv_header_and_negative_label(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b,label\n1.5,2,3\n4,5,7\n")
    d = load_csv(p, label_col=-1, member_value=7)
    np.testing.assert_array_equal(d.truth, [False, True])
    np.testing.assert_array_equal(d.points, [[1.5, 2], [4, 5]])


@pytest.mark.parametrize("text, message", [
    ("", "no rows"),
    ("x,y\n", "no rows"),
    ("1,2\n3\n", r":2: expected 2 columns"),
    ("1,2\n3,abc\n", r":2: column 2 is not numeric"),
])
def test_load_csv_errors(tmp_path, text, message):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(CsvFormatError, match=message):
        load_csv(p, has_header=None if "x" in text else False)


def test_usps_shaped_file(tmp_path):
    rng = make_rng(5)
    p = tmp_path / "usps.csv"
    labels = rng.integers(1, 11, size=9298)
    pix = rng.uniform(-1, 1, size=(9298, 256))
    with open(p, "w") as fh:
        fh.write("label," + ",".join(f"p{k}" for k in range(256)) + "\n")
        for lab, row in zip(labels, pix):
            fh.write(f"{lab}," + ",".join(f"{v:.4f}" for v in row) + "\n")
    d = load_csv(p, label_col=0, member_value=1)
    assert len(d) == 9298 and d.dim == 256
    assert d.truth.sum() == (labels == 1).sum()


def test_csv_round_trip(tmp_path):
    d = gen_halfspace(3, 20, 30)
    write_csv(d, tmp_path / "h.csv")
    back = load_csv(tmp_path / "h.csv", label_col=0)
    np.testing.assert_allclose(back.points, d.points, rtol=1e-8)
    np.testing.assert_array_equal(back.truth, d.truth)


def test_dataset_validation():
    with pytest.raises(ValueError, match="non-finite"):
        Dataset([[1.0, np.inf]])
    with pytest.raises(ValueError, match="truth"):
        Dataset([[1.0], [2.0]], truth=[True])
    d = Dataset([[1.0], [2.0]])
    with pytest.raises(ValueError):
        d.points[0, 0] = 3.0


@pytest.mark.parametrize("gen, counts", [(gen_halfspace, (300, 750)), (gen_gaussian, (300, 750)),
                                         (gen_ring, (450, 600))])
def test_generator_counts(gen, counts):
    d = gen(1, *counts, 2)
    assert len(d) == sum(counts)
    assert d.truth.sum() == counts[0]


@pytest.mark.parametrize("gen", GENS)
def test_generators_deterministic(gen):
    a, b = gen(9, 40, 60, 3), gen(9, 40, 60, 3)
    assert a.points.tobytes() == b.points.tobytes()
    assert a.truth.tobytes() == b.truth.tobytes()
    assert gen(10, 40, 60, 3).points.tobytes() != a.points.tobytes()


@pytest.mark.parametrize("seed", range(5))
def test_halfspace_margin(seed):
    d = gen_halfspace(seed, 300, 750, 2)
    s = d.points @ d.meta["normal"] + d.meta["offset"]
    assert s[d.truth].min() >= d.meta["margin"] - 1e-12
    assert s[~d.truth].max() <= -d.meta["margin"] + 1e-12


def test_halfspace_tiny():
    d = gen_halfspace(0, 1, 1, 1)
    assert len(d) == 2
    s = d.points[:, 0] * d.meta["normal"][0] + d.meta["offset"]
    assert np.sign(s[d.truth][0]) == 1 and np.sign(s[~d.truth][0]) == -1


def test_gaussian_others_outside_ellipsoid():
    d = gen_gaussian(2, 300, 750, 2)
    prec = np.linalg.inv(d.meta["cov"])
    Z = d.points[~d.truth] - d.meta["mean"]
    assert np.einsum("ij,jk,ik->i", Z, prec, Z).min() > d.meta["radius2"]
    assert np.linalg.cond(d.meta["cov"]) <= 10 + 1e-9


def test_gaussian_one_dimensional():
    d = gen_gaussian(4, 50, 50, 1)
    r = math.sqrt(d.meta["radius2"] * d.meta["cov"][0, 0])
    others = d.points[~d.truth, 0] - d.meta["mean"][0]
    assert np.all(np.abs(others) > r)


def test_ring_radii():
    d = gen_ring(3, 450, 600)
    r = np.linalg.norm(d.points, axis=1)
    assert r[d.truth].max() <= 1.0 < 1.5 <= r[~d.truth].min()
    assert r[~d.truth].max() <= 2.5


def test_make_rng_streams():
    a = make_rng(1, 2).uniform(size=4)
    assert np.array_equal(a, make_rng(1, 2).uniform(size=4))
    assert not np.array_equal(a, make_rng(1, 3).uniform(size=4))
    assert not np.array_equal(a, make_rng(2, 1).uniform(size=4))


def test_split_partition_and_labeled():
    d = gen_halfspace(0, 300, 750)
    s = split(d, SplitPlan(seed=4, labeled_count=50, t_size=400))
    assert len(np.intersect1d(s.pool, s.evaluation)) == 0
    np.testing.assert_array_equal(np.union1d(s.pool, s.evaluation), np.arange(len(d)))
    assert np.all(np.isin(s.labeled, s.pool)) and np.all(d.truth[s.labeled])
    again = split(d, SplitPlan(seed=4, labeled_count=50, t_size=400))
    for a, b in zip(s, again):
        np.testing.assert_array_equal(a, b)


def test_split_errors():
    d = gen_halfspace(0, 30, 70)
    with pytest.raises(ValueError, match="class members"):
        split(d, SplitPlan(seed=0, labeled_count=30, t_size=50))
    with pytest.raises(ValueError, match="do not fit"):
        partition(10, 8, 5, make_rng(0))
    with pytest.raises(ValueError):
        SplitPlan(seed=0, labeled_count=0, t_size=5)


def test_draw_labeled_sorted_members():
    d = gen_ring(0, 45, 60)
    idx = draw_labeled(d, np.arange(len(d)), 10, make_rng(3))
    assert np.all(np.diff(idx) > 0) and np.all(d.truth[idx])


def test_usps_sized_split_member_count():
    # |S ∩ A| is hypergeometric: 6198 draws from 9298 points holding 1553 members
    n, members, t = 9298, 1553, 3100
    truth = np.zeros(n, bool)
    truth[:members] = True
    d = Dataset(np.zeros((n, 1)), truth)
    counts = [d.truth[split(d, SplitPlan(seed=k, labeled_count=25, t_size=t, s_size=6198)).evaluation].sum()
              for k in range(200)]
    expected = members * 6198 / n
    assert np.mean(counts) == pytest.approx(expected, rel=0.01)
    assert np.mean(counts) == pytest.approx(1046, rel=0.02)
