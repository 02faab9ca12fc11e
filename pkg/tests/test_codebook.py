import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scmaidd.codebook import (CodebookError, bits_to_indices, build_codebook, default_codebook,
                              derive_factor_graph, dump_codebook, indices_to_bits, load_codebook,
                              make_default_codebook, map_bits)

from conftest import REFERENCE_C


def bpsk_doc():
    return {"J": 1, "K": 1, "M": 2, "N": 1,
            "users": [{"support": [1], "codewords": [[[1.0, 0.0]], [[-1.0, 0.0]]], "labels": [[0], [1]]}]}


class TestDefaultCodebook:
    def test_dimensions(self, cb, fg):
        assert (cb.J, cb.K, cb.M) == (6, 4, 4)
        assert all(len(s) == 2 for s in cb.supports)
        assert fg.d_j == 2 and fg.d_k == 3 and fg.is_regular

    def test_indicator_matches_published_matrix(self, fg):
        np.testing.assert_array_equal(fg.indicator, REFERENCE_C)

    def test_unit_energy(self, cb):
        np.testing.assert_allclose(cb.energy(), 1.0, atol=1e-9)

    def test_file_matches_generator(self, cb):
        np.testing.assert_allclose(cb.codewords, make_default_codebook().codewords, atol=1e-12)

    def test_neighbors_sorted_and_consistent(self, fg):
        for j, ks in enumerate(fg.user_neighbors):
            assert list(ks) == sorted(ks)
            assert all(fg.indicator[k, j] for k in ks)
        for k, js in enumerate(fg.resource_neighbors):
            assert list(js) == sorted(js)
            assert list(js) == list(np.flatnonzero(fg.indicator[k]))

    def test_reference_is_all_zeros_label(self, cb):
        for j in range(cb.J):
            assert not cb.labels[j, cb.reference[j]].any()


class TestLoad:
    def test_bpsk_degenerate(self):
        cb = load_codebook(bpsk_doc())
        assert (cb.J, cb.K, cb.M) == (1, 1, 2)
        np.testing.assert_array_equal(derive_factor_graph(cb).indicator, [[1]])

    def test_round_trip_json(self, cb):
        back = load_codebook(dump_codebook(cb))
        np.testing.assert_array_equal(back.codewords, cb.codewords)
        np.testing.assert_array_equal(back.labels, cb.labels)

    def test_support_mismatch_rejected(self, cb):
        doc = json.loads(dump_codebook(cb))
        # codeword 3 of user 1 moves from {1,2} to {1,3}
        row = doc["users"][0]["codewords"][3]
        row[1], row[2] = [0.0, 0.0], [0.5, 0.5]
        with pytest.raises(CodebookError, match="user 1"):
            load_codebook(doc)

    def test_support_column(self, rng):
        cw = np.zeros((3, 2, 4), dtype=complex)
        cw[0, :, 0] = [1, -1]
        cw[1, :, [0, 2]] = np.array([[1, -1], [1, -1]]) / np.sqrt(2)
        cw[2, :, 3] = [1, -1]
        fg = derive_factor_graph(build_codebook(cw))
        np.testing.assert_array_equal(fg.indicator[:, 1], [1, 0, 1, 0])

    @pytest.mark.parametrize("mutate, msg", [
        (lambda d: d.update(M=3), "power of two"),
        (lambda d: d.update(extra=1), "unknown"),
        (lambda d: d["users"][0].update(colour="red"), "unknown"),
        (lambda d: d["users"][0].update(labels=[[0], [0]]), "bijection"),
        (lambda d: d["users"][0].update(codewords=[[[2.0, 0.0]], [[-2.0, 0.0]]]), "energy"),
        (lambda d: d["users"][0].update(support=[2]), "range"),
    ])
    def test_invalid(self, mutate, msg):
        doc = bpsk_doc()
        mutate(doc)
        with pytest.raises(CodebookError, match=msg):
            load_codebook(doc)

    def test_malformed_json(self):
        with pytest.raises(CodebookError):
            load_codebook("{not json")

    def test_default_loads_from_package(self):
        assert default_codebook().J == 6


class TestMapping:
    def test_map_bits_zero(self, cb):
        np.testing.assert_array_equal(map_bits(cb, 1, (0, 0)), cb.codewords[1, cb.reference[1]])

    def test_injective(self, cb):
        for j in range(cb.J):
            pts = {tuple(np.round(map_bits(cb, j, b), 12)) for b in [(0, 0), (0, 1), (1, 0), (1, 1)]}
            assert len(pts) == cb.M

    def test_wrong_length(self, cb):
        with pytest.raises(ValueError):
            map_bits(cb, 0, (0, 1, 1))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=12, max_size=12))
    def test_bits_indices_round_trip(self, bits):
        cb = default_codebook()
        b = np.array([bits] * cb.J)
        idx = bits_to_indices(cb, b)
        np.testing.assert_array_equal(indices_to_bits(cb, idx), b)
        for j in range(cb.J):
            np.testing.assert_array_equal(cb.codewords[j, idx[j, 0]], map_bits(cb, j, b[j, :2]))
