import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wsrefine.kernels import implementation

NP = implementation("numpy")
NB = implementation("numba")

U, F, S = 0, 1, 2

# truth tables written out by hand: strict parallel and/or, sequential conjunction
AND = {(a, b): (U if U in (a, b) else (S if a == b == S else F)) for a in (U, F, S) for b in (U, F, S)}
OR = {(a, b): (U if U in (a, b) else (S if S in (a, b) else F)) for a in (U, F, S) for b in (U, F, S)}
SEQ = {(a, b): (b if a == S else a) for a in (U, F, S) for b in (U, F, S)}

statuses = hnp.arrays(np.int8, hnp.array_shapes(min_dims=1, max_dims=3, max_side=4),
                      elements=st.integers(0, 2))


@pytest.mark.parametrize("impl", [NP, NB], ids=["numpy", "numba"])
def test_truth_tables(impl):
    a = np.array([x for x in (U, F, S) for _ in range(3)], dtype=np.int8)
    b = np.array([U, F, S] * 3, dtype=np.int8)
    for name, table in (("k_and", AND), ("k_or", OR), ("k_seq", SEQ)):
        got = getattr(impl, name)(a, b)
        assert [int(x) for x in got] == [table[(int(x), int(y))] for x, y in zip(a, b)], name
    assert list(impl.k_not(np.array([U, F, S], dtype=np.int8))) == [U, S, F]
    assert list(impl.k_assert(np.array([U, F, S], dtype=np.int8))) == [U, U, S]


@given(statuses)
def test_binary_parity(a):
    b = np.roll(a, 1)
    for name in ("k_and", "k_or", "k_seq", "k_iff", "k_implies", "k_meet"):
        assert np.array_equal(getattr(NP, name)(a, b), getattr(NB, name)(a, b)), name
    j1, j2 = NP.k_join(a, b), NB.k_join(a, b)
    assert (j1 is None) == (j2 is None)
    if j1 is not None:
        assert np.array_equal(j1, j2)
    assert NP.k_refines(a, b) == NB.k_refines(a, b)
    assert NP.k_refines_under(b, a, a) and NB.k_refines_under(b, a, a)
    assert NP.k_refines_under(a, b, a) == NB.k_refines_under(a, b, a)


@given(statuses, st.integers(0, 2))
def test_reduction_parity(a, axis):
    axis = axis % a.ndim
    assert np.array_equal(NP.k_reduce_exists(a, axis), NB.k_reduce_exists(a, axis))
    assert np.array_equal(NP.k_reduce_forall(a, axis), NB.k_reduce_forall(a, axis))


def test_reduction_oracle():
    rows = np.array([[F, F], [F, S], [U, S], [S, S]], dtype=np.int8)
    for impl in (NP, NB):
        assert list(impl.k_reduce_exists(rows, 1)) == [F, S, U, S]
        assert list(impl.k_reduce_forall(rows, 1)) == [F, F, U, S]


@given(hnp.arrays(np.int8, (3, 4), elements=st.integers(0, 2)),
       st.lists(st.integers(-1, 2), min_size=5, max_size=5),
       st.lists(st.integers(-1, 3), min_size=5, max_size=5))
def test_gather_parity(table, i, j):
    idx = [np.array(i), np.array(j)]
    got_np, got_nb = NP.k_gather(table, idx), NB.k_gather(table, idx)
    assert np.array_equal(got_np, got_nb)
    for k in range(5):
        want = U if i[k] < 0 or j[k] < 0 else table[i[k], j[k]]
        assert got_np[k] == want


@given(hnp.arrays(np.bool_, st.integers(1, 6).map(lambda n: (n, n))))
def test_acyclic_parity(adj):
    assert NP.k_acyclic(adj) == NB.k_acyclic(adj)


def test_acyclic_oracle():
    chain = np.zeros((4, 4), dtype=bool)
    for k in range(3):
        chain[k + 1, k] = True
    cyc = chain.copy()
    cyc[0, 3] = True
    for impl in (NP, NB):
        assert impl.k_acyclic(chain)
        assert not impl.k_acyclic(cyc)
        assert not impl.k_acyclic(np.eye(2, dtype=bool))


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_backend_environment_variable(backend):
    env = dict(os.environ, WSREFINE_BACKEND=backend)
    code = "from wsrefine import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=300)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == backend


def test_backends_agree_end_to_end():
    script = ("from wsrefine.cli import main; import sys; "
              "sys.exit(main(['refine', 'factorial.wsl', 'factorial.wsd', '--format', 'machine']))")
    outs = []
    for backend in ("numpy", "numba"):
        env = dict(os.environ, WSREFINE_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True,
                              timeout=300)
        assert proc.returncode == 0, proc.stderr
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
