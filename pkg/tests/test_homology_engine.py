import itertools

import pytest

from cyclecoh.abelian import IntegerMatrix, PresentedModule
from cyclecoh.homology_engine import (
    ChainComplex,
    DoubleComplex,
    Perturbation,
    RowSDRSystem,
    SDR,
    integral_homology,
    perturb_double_complex,
    perturb_sdr,
    total_complex,
    verify_sdr,
)

M = IntegerMatrix.from_rows
free = PresentedModule.free


def test_chain_complex_validation_and_homology():
    chain = ChainComplex(
        {0: free(1), 1: free(1), 2: free(1)},
        {1: M([[0]]), 2: M([[4]])},
    )
    assert chain.validate()
    assert integral_homology(chain, 0).factors == (0,)
    assert integral_homology(chain, 1).factors == (4,)
    assert integral_homology(chain, 2).is_trivial

    bad = ChainComplex({0: free(1), 1: free(1), 2: free(1)}, {1: M([[1]]), 2: M([[1]])})
    assert not bad.validate()


def test_total_complex_degenerate_grids():
    dc = DoubleComplex({(0, 1): free(3)})
    tot = total_complex(dc)
    assert tot.chain.rank(1) == 3
    assert not tot.chain.diff

    dc = DoubleComplex(
        {(r, s) for r in (0, 1) for s in (1, 2)} and
        {(r, s): free(2) for r in (0, 1) for s in (1, 2)},
        {(1, 1): IntegerMatrix.zero(2, 2), (1, 2): IntegerMatrix.zero(2, 2)},
        {(0, 2): IntegerMatrix.zero(2, 2), (1, 2): IntegerMatrix.zero(2, 2)},
    )
    tot = total_complex(dc)
    for n, d in tot.chain.diff.items():
        assert d.is_zero()


def test_total_complex_anticommuting_grid():
    a, b = 3, 5
    dc = DoubleComplex(
        {(0, 0): free(1), (1, 0): free(1), (0, 1): free(1), (1, 1): free(1)},
        {(1, 0): M([[a]]), (1, 1): M([[a]])},
        {(0, 1): M([[b]]), (1, 1): M([[-b]])},
    )
    assert dc.validate()
    tot = total_complex(dc)
    assert tot.chain.validate()
    assert not tot.chain.diff[1].is_zero()

    bad = DoubleComplex(
        dc.cells,
        dc.dh,
        {(0, 1): M([[b]]), (1, 1): M([[b]])},
    )
    assert not bad.validate()


def identity_sdr(chain):
    eye = {n: IntegerMatrix.identity(chain.rank(n)) for n in chain.modules}
    h = {n: IntegerMatrix.zero(chain.rank(n + 1), chain.rank(n)) for n in chain.modules if (n + 1) in chain.modules}
    return SDR(chain, chain, dict(eye), dict(eye), h)


def test_identity_sdr_passes():
    chain = ChainComplex(
        {0: free(2), 1: free(2), 2: free(2)},
        {1: M([[0, 0], [0, 0]]), 2: M([[0, 0], [0, 0]])},
    )
    assert verify_sdr(identity_sdr(chain))


def cyclic_bar_complex(v, nmax):
    """Normalized bar resolution of Z over Z[C_v]: degree n has basis
    (a_1, ..., a_n, b) with a_i in 1..v-1 and b in 0..v-1."""
    def basis(n):
        return [
            t + (b,)
            for t in itertools.product(range(1, v), repeat=n)
            for b in range(v)
        ]

    bases = {n: basis(n) for n in range(nmax + 1)}
    index = {n: {t: i for i, t in enumerate(bases[n])} for n in bases}
    modules = {n: free(len(bases[n]), tuple(bases[n])) for n in bases}
    diff = {}
    for n in range(1, nmax + 1):
        data = {}
        for col, t in enumerate(bases[n]):
            terms = {}

            def add(tup, c):
                if all(x % v for x in tup[:-1]):
                    key = index[n - 1][tup]
                    terms[key] = terms.get(key, 0) + c

            add(t[1:], 1)
            for i in range(n - 1):
                merged = t[:i] + ((t[i] + t[i + 1]) % v,) + t[i + 2 :]
                add(merged, (-1) ** (i + 1))
            last = t[: n - 1] + ((t[n - 1] + t[n]) % v,)
            add(last, (-1) ** n)
            for key, c in terms.items():
                if c:
                    data[(key, col)] = c
        diff[n] = IntegerMatrix(len(bases[n - 1]), len(bases[n]), data)
    return ChainComplex(modules, diff), bases, index


def bar_sdr(v, nmax):
    """SDR of the augmented bar resolution onto Z, homotopy -xi with
    xi(x) = (-1)^(n+1) x tensor 1."""
    C, bases, index = cyclic_bar_complex(v, nmax)
    X = ChainComplex(
        {n: free(1 if n == 0 else 0) for n in range(nmax + 1)},
        {n: IntegerMatrix.zero(0 if n > 1 else 1, 0) for n in range(1, nmax + 1)},
    )
    i = {0: IntegerMatrix(v, 1, {(index[0][(0,)], 0): 1})}
    p = {0: IntegerMatrix(1, v, {(0, b): 1 for b in range(v)})}
    for n in range(1, nmax + 1):
        i[n] = IntegerMatrix.zero(len(bases[n]), 0)
        p[n] = IntegerMatrix.zero(0, len(bases[n]))
    h = {}
    for n in range(nmax):
        data = {}
        for col, t in enumerate(bases[n]):
            b = t[-1]
            if b % v:
                tgt = t[:-1] + (b, 0)
                data[(index[n + 1][tgt], col)] = -((-1) ** (n + 1))
        h[n] = IntegerMatrix(len(bases[n + 1]), len(bases[n]), data)
    return SDR(X, C, i, p, h)


def test_bar_resolution_sdr():
    for v in (2, 3):
        sdr = bar_sdr(v, 3)
        assert sdr.C.validate()
        report = verify_sdr(sdr)
        assert report, str(report)


def test_sdr_failure_reports_identity():
    chain = ChainComplex({0: free(1), 1: free(1)}, {1: M([[0]])})
    sdr = identity_sdr(chain)
    sdr.h[0] = M([[1]])  # now h o h would vanish but homotopy identity fails
    report = verify_sdr(sdr)
    assert not report
    # inject an h with h o h != 0 on a taller complex
    chain = ChainComplex(
        {0: free(1), 1: free(1), 2: free(1)},
        {1: M([[0]]), 2: M([[0]])},
    )
    sdr = identity_sdr(chain)
    sdr.h[0] = M([[1]])
    sdr.h[1] = M([[1]])
    report = verify_sdr(sdr)
    assert not report


def disc_sdr():
    """C = two discs (Z --id--> Z) in degrees (1, 0); X = 0."""
    C = ChainComplex({0: free(2), 1: free(2)}, {1: IntegerMatrix.identity(2)})
    X = ChainComplex({0: free(0), 1: free(0)}, {1: IntegerMatrix.zero(0, 0)})
    i = {0: IntegerMatrix.zero(2, 0), 1: IntegerMatrix.zero(2, 0)}
    p = {0: IntegerMatrix.zero(0, 2), 1: IntegerMatrix.zero(0, 2)}
    h = {0: IntegerMatrix.identity(2).scale(-1)}
    return SDR(X, C, i, p, h)


def test_perturb_sdr_zero_delta_is_identity():
    sdr = disc_sdr()
    assert verify_sdr(sdr)
    out = perturb_sdr(sdr, Perturbation({}, 1))
    assert out.C.diff == sdr.C.diff
    assert out.h == sdr.h


def test_perturb_sdr_nilpotent_delta():
    sdr = disc_sdr()
    delta = {1: M([[0, 2], [0, 0]])}
    out = perturb_sdr(sdr, Perturbation(delta, 2))
    assert verify_sdr(out)
    assert out.C.diff[1] == M([[1, 2], [0, 1]])


def test_perturb_sdr_randomized_nilpotent():
    import random

    rng = random.Random(21)
    for _ in range(25):
        k = rng.randint(1, 4)
        C = ChainComplex({0: free(k), 1: free(k)}, {1: IntegerMatrix.identity(k)})
        X = ChainComplex({0: free(0), 1: free(0)}, {1: IntegerMatrix.zero(0, 0)})
        sdr = SDR(
            X,
            C,
            {0: IntegerMatrix.zero(k, 0), 1: IntegerMatrix.zero(k, 0)},
            {0: IntegerMatrix.zero(0, k), 1: IntegerMatrix.zero(0, k)},
            {0: IntegerMatrix.identity(k).scale(-1)},
        )
        assert verify_sdr(sdr)
        # strictly upper triangular = engineered nilpotent delta o h
        data = {
            (i, j): rng.randint(-3, 3)
            for i in range(k)
            for j in range(i + 1, k)
        }
        delta = {1: IntegerMatrix(k, k, data)}
        out = perturb_sdr(sdr, Perturbation(delta, k))
        assert verify_sdr(out)


def test_perturb_sdr_rejects_non_small():
    sdr = disc_sdr()
    delta = {1: IntegerMatrix.identity(2)}
    with pytest.raises(ValueError, match="not small"):
        perturb_sdr(sdr, Perturbation(delta, 3))


def test_perturb_sdr_rejects_bad_square():
    chain = ChainComplex(
        {0: free(1), 1: free(1), 2: free(1)},
        {1: M([[0]]), 2: M([[1]])},
    )
    sdr = identity_sdr(chain)
    delta = {1: M([[1]])}
    with pytest.raises(ValueError, match="not a perturbation"):
        perturb_sdr(sdr, Perturbation(delta, 1))


def test_perturb_double_complex_zero_delta():
    cells = {(r, s): free(1) for r in (0, 1) for s in (1, 2)}
    zero = IntegerMatrix.zero(1, 1)
    X = DoubleComplex(cells, {(1, 1): zero, (1, 2): zero}, {(0, 2): zero, (1, 2): zero})
    ident = IntegerMatrix.identity(1)
    i = {pos: ident for pos in cells}
    p = {pos: ident for pos in cells}
    h = {(0, 1): zero, (0, 2): zero}
    system = RowSDRSystem(X, X, i, p, h)
    out = perturb_double_complex(system, {}, 1)
    assert out.X.dh == X.dh
    assert out.report
