import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainuq.chains import (
    count_transitions,
    index_chain,
    merge_counts,
    read_chain_file,
)
from chainuq.errors import (
    ChainFileError,
    EmptyChainError,
    EmptyMergeError,
    InsufficientTransitionsError,
)


def test_index_first_appearance_order():
    chain = index_chain(["A", "A", "B"])
    assert chain.labels == ("A", "B")
    assert chain.indices.tolist() == [0, 0, 1]
    assert chain.length == 3


def test_index_single_label_chain():
    chain = index_chain([7, 7, 7])
    assert chain.labels == (7,)
    assert chain.n_models == 1


def test_index_first_appearance_wins():
    chain = index_chain(["B", "A", "B"])
    assert chain.labels == ("B", "A")
    assert chain.indices.tolist() == [0, 1, 0]


def test_index_empty_raises():
    with pytest.raises(EmptyChainError):
        index_chain([])


def test_count_small_chain():
    counts = count_transitions(index_chain([1, 1, 2, 1]))
    assert counts.counts.tolist() == [[1, 1], [1, 0]]
    assert counts.total_transitions == 3
    assert counts.visits.tolist() == [3, 1]


def test_count_constant_chain():
    counts = count_transitions(index_chain([1, 1, 1, 1]))
    assert counts.counts.tolist() == [[3]]


def test_count_total_is_length_minus_one():
    rng = np.random.default_rng(0)
    chain = index_chain(rng.integers(0, 5, size=1001).tolist())
    assert count_transitions(chain).total_transitions == 1000


def test_count_too_short_raises():
    with pytest.raises(InsufficientTransitionsError):
        count_transitions(index_chain(["A"]))


def test_merge_same_labels_sums_elementwise():
    n1 = count_transitions(index_chain([1, 1, 2, 1]))  # [[1,1],[1,0]]
    n2 = count_transitions(index_chain([1, 2, 1, 2, 2, 1]))  # [[0,2],[2,1]]
    merged = merge_counts([n1, n2])
    assert merged.counts.tolist() == [[1, 3], [3, 1]]
    assert merged.total_transitions == n1.total_transitions + n2.total_transitions
    assert merged.n_chains == 2


def test_merge_disjoint_labels_builds_block_matrix():
    nab = count_transitions(index_chain(["A", "B", "A"]))
    nc = count_transitions(index_chain(["C", "C"]))
    merged = merge_counts([nab, nc])
    assert merged.labels == ("A", "B", "C")
    expected = np.zeros((3, 3), dtype=int)
    expected[:2, :2] = nab.counts
    expected[2, 2] = 1
    assert merged.counts.tolist() == expected.tolist()


def test_merge_single_part_is_identity():
    n1 = count_transitions(index_chain([1, 2, 2, 1]))
    merged = merge_counts([n1])
    assert merged.counts.tolist() == n1.counts.tolist()
    assert merged.labels == n1.labels


def test_merge_empty_raises():
    with pytest.raises(EmptyMergeError):
        merge_counts([])


def test_merge_is_commutative_on_label_content():
    n1 = count_transitions(index_chain(["A", "B", "A", "C"]))
    n2 = count_transitions(index_chain(["C", "B", "C"]))
    m12 = merge_counts([n1, n2])
    m21 = merge_counts([n2, n1])
    for a in m12.labels:
        for b in m12.labels:
            assert (
                m12.counts[m12.label_to_index[a], m12.label_to_index[b]]
                == m21.counts[m21.label_to_index[a], m21.label_to_index[b]]
            )


labels_strategy = st.lists(st.integers(0, 6), min_size=2, max_size=60)


@given(labels_strategy)
def test_row_sums_match_visit_counts_of_all_but_last(raw):
    chain = index_chain(raw)
    counts = count_transitions(chain)
    head_visits = np.bincount(chain.indices[:-1], minlength=chain.n_models)
    assert counts.counts.sum(axis=1).tolist() == head_visits.tolist()


@given(labels_strategy, labels_strategy)
def test_merge_never_bridges_chain_boundaries(raw1, raw2):
    merged = merge_counts(
        [count_transitions(index_chain(raw1)), count_transitions(index_chain(raw2))]
    )
    assert merged.total_transitions == (len(raw1) - 1) + (len(raw2) - 1)
    assert merged.counts.sum() == merged.total_transitions


@given(labels_strategy, st.randoms(use_true_random=False))
def test_relabeling_permutes_counts_consistently(raw, rnd):
    chain = index_chain(raw)
    perm = list(range(100))
    rnd.shuffle(perm)
    relabeled = index_chain([f"m{perm[lab]}" for lab in raw])
    counts = count_transitions(chain)
    recounts = count_transitions(relabeled)
    # first-appearance indexing is structural: the matrices coincide and only
    # the label dictionary changes
    assert recounts.counts.tolist() == counts.counts.tolist()
    assert recounts.labels == tuple(f"m{perm[lab]}" for lab in counts.labels)


def test_read_lines_file(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("A\nB\n\nA\n", encoding="utf-8")
    (chain,) = read_chain_file(path)
    assert chain.labels == ("A", "B")
    assert chain.length == 3


def test_read_lines_empty_file_raises(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("\n\n", encoding="utf-8")
    with pytest.raises(EmptyChainError):
        read_chain_file(path)


def test_read_csv_multiple_chains(tmp_path):
    path = tmp_path / "chains.csv"
    path.write_text(
        "chain_id,iteration,label\n"
        "1,1,A\n1,2,B\n2,5,B\n1,3,A\n2,6,B\n",
        encoding="utf-8",
    )
    chains = read_chain_file(path)
    assert len(chains) == 2
    assert chains[0].labels == ("A", "B")
    assert chains[0].length == 3
    assert chains[1].length == 2


def test_read_csv_without_iteration_column(tmp_path):
    path = tmp_path / "chains.csv"
    path.write_text("label\nA\nB\nA\n", encoding="utf-8")
    (chain,) = read_chain_file(path)
    assert chain.length == 3


def test_read_csv_gap_in_iterations_rejected(tmp_path):
    path = tmp_path / "chains.csv"
    path.write_text("iteration,label\n1,A\n3,B\n", encoding="utf-8")
    with pytest.raises(ChainFileError):
        read_chain_file(path)


def test_read_csv_decreasing_iterations_rejected(tmp_path):
    path = tmp_path / "chains.csv"
    path.write_text("iteration,label\n2,A\n1,B\n", encoding="utf-8")
    with pytest.raises(ChainFileError):
        read_chain_file(path)


def test_read_csv_missing_label_column_rejected(tmp_path):
    path = tmp_path / "chains.csv"
    path.write_text("state\nA\n", encoding="utf-8")
    with pytest.raises(ChainFileError):
        read_chain_file(path)


def test_format_inferred_from_extension(tmp_path):
    path = tmp_path / "chain.csv"
    path.write_text("label\nA\nB\n", encoding="utf-8")
    (chain,) = read_chain_file(path)
    assert chain.labels == ("A", "B")
