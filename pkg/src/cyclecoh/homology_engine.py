"""Chain complexes, double complexes, special deformation retracts and
the homological perturbation lemma.

Sign conventions used throughout (and enforced by the checks):

  * a homotopy h in an SDR satisfies  i o p - id = d o h + h o d;
  * a double complex has d_h o d_h = 0, d_v o d_v = 0 and
    d_h o d_v + d_v o d_h = 0, so its total differential is simply
    d_h + d_v (the vertical maps carry their signs internally);
  * perturbations are certified small by an explicit nilpotency degree
    n0 with (delta o h)^{n0} = 0, which truncates the geometric series
    of the perturbation lemma.

Everything is a finite collection of integer matrices with explicit
degree caps; identities are checked degreewise wherever all the maps
involved exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import (
    FinAbGroup,
    IntegerMatrix,
    PresentedModule,
    block_matrix,
    cokernel_invariants,
    kernel_basis,
    solve,
)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    identity: str = None
    where: object = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "pass" if self.ok else f"fail [{self.identity}] at {self.where}"


@dataclass
class ChainComplex:
    """Non-negatively graded complex with differential d[n]: X_n -> X_{n-1}."""

    modules: dict
    diff: dict

    def rank(self, n):
        mod = self.modules.get(n)
        return 0 if mod is None else mod.ngens

    @property
    def top(self):
        return max(self.modules) if self.modules else -1

    def validate(self, upto=None):
        top = self.top if upto is None else upto
        for n in range(2, top + 1):
            if n in self.diff and (n - 1) in self.diff:
                comp = self.diff[n - 1] @ self.diff[n]
                if not comp.is_zero():
                    return CheckReport(False, "d o d = 0", n)
        return CheckReport(True)


def integral_homology(chain, n):
    """H_n over the integers, for free chain modules."""
    rank_n = chain.rank(n)
    d_n = chain.diff.get(n, IntegerMatrix.zero(chain.rank(n - 1), rank_n))
    d_n1 = chain.diff.get(n + 1, IntegerMatrix.zero(rank_n, chain.rank(n + 1)))
    ker = kernel_basis(d_n)
    if not ker:
        return FinAbGroup.trivial()
    K = IntegerMatrix.from_columns(ker, rows=rank_n)
    rows = []
    for col in d_n1.columns():
        vec = [0] * rank_n
        for r, val in col.items():
            vec[r] = val
        c = solve(K, vec)
        if c is None:
            raise ValueError("image does not lie in the kernel")
        rows.append(c)
    rel = IntegerMatrix.from_rows(rows, cols=len(ker))
    return cokernel_invariants(rel)


@dataclass
class DoubleComplex:
    """Bigraded cells with d_h[(r, s)]: (r,s) -> (r-1,s) and d_v: -> (r,s-1)."""

    cells: dict
    dh: dict = field(default_factory=dict)
    dv: dict = field(default_factory=dict)

    def rank(self, pos):
        mod = self.cells.get(pos)
        return 0 if mod is None else mod.ngens

    def validate(self):
        for (r, s), m in self.dh.items():
            tgt = (r - 1, s)
            if (r, s) in self.dh and tgt in self.dh:
                if not (self.dh[tgt] @ m).is_zero():
                    return CheckReport(False, "d_h o d_h = 0", (r, s))
        for (r, s), m in self.dv.items():
            tgt = (r, s - 1)
            if tgt in self.dv:
                if not (self.dv[tgt] @ m).is_zero():
                    return CheckReport(False, "d_v o d_v = 0", (r, s))
        for (r, s) in self.cells:
            h = self.dh.get((r, s))
            v = self.dv.get((r, s))
            hv = self.dv.get((r - 1, s))
            vh = self.dh.get((r, s - 1))
            if h is not None and v is not None and hv is not None and vh is not None:
                if not (hv @ h + vh @ v).is_zero():
                    return CheckReport(False, "d_h d_v + d_v d_h = 0", (r, s))
        return CheckReport(True)


@dataclass
class TotalComplex:
    chain: ChainComplex
    offsets: dict  # (r, s) -> (degree, start, size)

    def inject(self, pos, vec):
        n, start, size = self.offsets[pos]
        out = [0] * self.chain.rank(n)
        for i, v in enumerate(vec):
            out[start + i] = v
        return out


def total_complex(dc):
    """Total complex X_n = direct sum over r+s = n, differential d_h + d_v."""
    degrees = {}
    for (r, s), mod in dc.cells.items():
        degrees.setdefault(r + s, []).append((r, s))
    for n in degrees:
        degrees[n].sort()
    modules = {}
    offsets = {}
    for n, poss in sorted(degrees.items()):
        start = 0
        labels = []
        for pos in poss:
            mod = dc.cells[pos]
            offsets[pos] = (n, start, mod.ngens)
            start += mod.ngens
            if mod.labels is not None:
                labels.extend((pos, lab) for lab in mod.labels)
            else:
                labels.extend((pos, i) for i in range(mod.ngens))
        # stack relations blockwise
        rel_blocks = {}
        sizes = [dc.cells[pos].ngens for pos in poss]
        rrows = []
        for bi, pos in enumerate(poss):
            rel = dc.cells[pos].relations
            if rel.rows:
                rrows.append((bi, rel))
        total_rel_rows = sum(rel.rows for _, rel in rrows)
        data = {}
        roff = 0
        col_off = [0]
        for s_ in sizes:
            col_off.append(col_off[-1] + s_)
        for bi, rel in rrows:
            for (rr, cc), val in rel.data.items():
                data[(roff + rr, col_off[bi] + cc)] = val
            roff += rel.rows
        relations = IntegerMatrix(total_rel_rows, start, data)
        modules[n] = PresentedModule(start, relations, tuple(labels))
    diff = {}
    for n in sorted(degrees):
        if n - 1 not in degrees:
            continue
        srcs = degrees[n]
        tgts = degrees[n - 1]
        tgt_index = {pos: bi for bi, pos in enumerate(tgts)}
        blocks = {}
        for bj, (r, s) in enumerate(srcs):
            m = dc.dh.get((r, s))
            if m is not None and (r - 1, s) in tgt_index:
                blocks[(tgt_index[(r - 1, s)], bj)] = m
            m = dc.dv.get((r, s))
            if m is not None and (r, s - 1) in tgt_index:
                bi = tgt_index[(r, s - 1)]
                if (bi, bj) in blocks:
                    blocks[(bi, bj)] = blocks[(bi, bj)] + m
                else:
                    blocks[(bi, bj)] = m
        diff[n] = block_matrix(
            blocks,
            [dc.cells[pos].ngens for pos in tgts],
            [dc.cells[pos].ngens for pos in srcs],
        )
    return TotalComplex(ChainComplex(modules, diff), offsets)


# ---------------------------------------------------------------------------
# special deformation retracts
# ---------------------------------------------------------------------------


@dataclass
class SDR:
    """i: X -> C, p: C -> X with p o i = id and homotopy h[n]: C_n -> C_{n+1}."""

    X: ChainComplex
    C: ChainComplex
    i: dict
    p: dict
    h: dict


def _eye(n):
    return IntegerMatrix.identity(n)


def verify_sdr(sdr):
    """All seven SDR identities, degreewise; first failure wins."""
    for n, i_n in sorted(sdr.i.items()):
        p_n = sdr.p.get(n)
        if p_n is not None and p_n @ i_n != _eye(sdr.X.rank(n)):
            return CheckReport(False, "p o i = id", n)
    for n in sorted(sdr.X.diff):
        i_n, i_prev = sdr.i.get(n), sdr.i.get(n - 1)
        if i_n is not None and i_prev is not None and n in sdr.C.diff:
            if sdr.C.diff[n] @ i_n != i_prev @ sdr.X.diff[n]:
                return CheckReport(False, "i chain map", n)
    for n in sorted(sdr.C.diff):
        p_n, p_prev = sdr.p.get(n), sdr.p.get(n - 1)
        if p_n is not None and p_prev is not None and n in sdr.X.diff:
            if sdr.X.diff[n] @ p_n != p_prev @ sdr.C.diff[n]:
                return CheckReport(False, "p chain map", n)
    for n in sorted(sdr.C.modules):
        i_n, p_n = sdr.i.get(n), sdr.p.get(n)
        h_n = sdr.h.get(n)
        h_prev = sdr.h.get(n - 1)
        d_up = sdr.C.diff.get(n + 1)
        d_n = sdr.C.diff.get(n)
        if i_n is None or p_n is None or h_n is None or d_up is None:
            continue
        lhs = d_up @ h_n
        if h_prev is not None and d_n is not None:
            lhs = lhs + h_prev @ d_n
        rhs = i_n @ p_n - _eye(sdr.C.rank(n))
        if lhs != rhs:
            return CheckReport(False, "i o p - id = d h + h d", n)
    for n, h_n in sorted(sdr.h.items()):
        i_n = sdr.i.get(n)
        if i_n is not None and not (h_n @ i_n).is_zero():
            return CheckReport(False, "h o i = 0", n)
        p_up = sdr.p.get(n + 1)
        if p_up is not None and not (p_up @ h_n).is_zero():
            return CheckReport(False, "p o h = 0", n)
        h_up = sdr.h.get(n + 1)
        if h_up is not None and not (h_up @ h_n).is_zero():
            return CheckReport(False, "h o h = 0", n)
    return CheckReport(True)


@dataclass
class Perturbation:
    """delta[n]: C_n -> C_{n-1} with (d + delta)^2 = 0, certified small by
    the nilpotency witness: (delta o h)^{n0} = 0 in every degree."""

    delta: dict
    n0: int

    def validate_square_zero(self, C):
        for n in sorted(C.modules):
            d1 = C.diff.get(n)
            delta1 = self.delta.get(n)
            total_n = _padd(d1, delta1)
            d0 = C.diff.get(n - 1)
            delta0 = self.delta.get(n - 1)
            total_prev = _padd(d0, delta0)
            if total_n is not None and total_prev is not None:
                if not (total_prev @ total_n).is_zero():
                    return CheckReport(False, "(d + delta)^2 = 0", n)
        return CheckReport(True)


def _padd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _delta_h(sdr, pert, n):
    """(delta o h) in degree n: C_n -> C_n, or None if it vanishes."""
    h_n = sdr.h.get(n)
    d_n1 = pert.delta.get(n + 1)
    if h_n is None or d_n1 is None:
        return None
    return d_n1 @ h_n


def check_smallness(sdr, pert):
    for n in sorted(sdr.C.modules):
        dh = _delta_h(sdr, pert, n)
        if dh is None:
            continue
        if not dh.power(pert.n0).is_zero():
            return CheckReport(False, f"(delta o h)^{pert.n0} = 0", n)
    return CheckReport(True)


def _transfer_A(sdr, pert, n):
    """A = (id - delta o h)^{-1} o delta: C_n -> C_{n-1} via the finite series."""
    d_n = pert.delta.get(n)
    if d_n is None:
        return None
    dh = _delta_h(sdr, pert, n - 1)
    if dh is None:
        return d_n
    acc = d_n
    term = d_n
    for _ in range(pert.n0 - 1):
        term = dh @ term
        if term.is_zero():
            break
        acc = acc + term
    return acc


def perturb_sdr(sdr, pert, verify=True):
    """Transfer a small perturbation through an SDR.

    Returns the perturbed SDR: the side X carries d + p A i, the side C
    carries d + delta, and i, p, h gain the A-corrections.  The output
    passes verify_sdr on the degrees where all maps are defined.
    """
    square = pert.validate_square_zero(sdr.C)
    if not square:
        raise ValueError(f"not a perturbation: {square}")
    small = check_smallness(sdr, pert)
    if not small:
        raise ValueError(f"perturbation not small: {small}")

    newXd = dict(sdr.X.diff)
    new_i = dict(sdr.i)
    new_p = {}
    new_h = {}
    A = {n: _transfer_A(sdr, pert, n) for n in sorted(pert.delta)}

    for n in sorted(sdr.X.diff):
        An = A.get(n)
        if An is not None and (n - 1) in sdr.p and n in sdr.i:
            newXd[n] = sdr.X.diff[n] + sdr.p[n - 1] @ An @ sdr.i[n]
    for n in sorted(sdr.i):
        An = A.get(n)
        if An is not None and (n - 1) in sdr.h:
            new_i[n] = sdr.i[n] + sdr.h[n - 1] @ An @ sdr.i[n]
    # a missing delta[n] means the perturbation vanishes there, so the
    # A-corrections drop out and p, h pass through unchanged
    for n in sorted(sdr.p):
        term = None
        An1 = A.get(n + 1)
        if An1 is not None and n in sdr.h:
            term = sdr.p[n] @ An1 @ sdr.h[n]
        new_p[n] = sdr.p[n] if term is None else sdr.p[n] + term
    for n in sorted(sdr.h):
        An1 = A.get(n + 1)
        term = None
        if An1 is not None:
            term = sdr.h[n] @ An1 @ sdr.h[n]
        new_h[n] = sdr.h[n] if term is None else sdr.h[n] + term

    newCd = {}
    for n in set(sdr.C.diff) | set(pert.delta):
        newCd[n] = _padd(sdr.C.diff.get(n), pert.delta.get(n))
    out = SDR(
        ChainComplex(sdr.X.modules, newXd),
        ChainComplex(sdr.C.modules, newCd),
        new_i,
        new_p,
        new_h,
    )
    if verify:
        report = verify_sdr(out)
        if not report:
            raise AssertionError(f"perturbed SDR failed verification: {report}")
    return out


# ---------------------------------------------------------------------------
# row-wise perturbation of a double complex
# ---------------------------------------------------------------------------


@dataclass
class RowSDRSystem:
    """Double-complex morphisms i: X -> C, p: C -> X with p o i = id whose
    rows (fixed s, varying r) are SDRs via h[(r, s)]: C_{r,s} -> C_{r+1,s}."""

    X: DoubleComplex
    C: DoubleComplex
    i: dict
    p: dict
    h: dict


@dataclass
class PerturbedRows:
    X: DoubleComplex
    C: DoubleComplex  # horizontal differential includes the perturbation
    i1: dict
    p1: dict
    h1: dict
    report: CheckReport


def perturb_double_complex(system, delta, n0, verify=True, vanishes_beyond=None):
    """Row-wise perturbation-lemma transfer across a double complex.

    delta maps (r, s) -> matrix C_{r,s} -> C_{r-1,s}; n0 is the
    nilpotency witness for every delta o h.  Returns the perturbed
    horizontal differential on X together with the corrected i, p, h,
    verifying that i1/p1 are morphisms of double complexes with
    p1 o i1 = id and that each row homotopy identity holds.

    vanishes_beyond (default: the perturbation is understood to be zero
    outside the grid) controls the cap boundary: when False, the p/h
    corrections of each row's top cell depend on data above the cap, so
    those maps are dropped rather than emitted half-corrected.
    """
    if vanishes_beyond is None:
        vanishes_beyond = True

    def dh_at(pos):
        h = system.h.get(pos)
        d = delta.get((pos[0] + 1, pos[1]))
        if h is None or d is None:
            return None
        return d @ h

    # smallness per row
    for pos in system.C.cells:
        dh = dh_at(pos)
        if dh is not None and not dh.power(n0).is_zero():
            raise ValueError(f"perturbation not small at {pos}")

    def A_at(pos):
        d = delta.get(pos)
        if d is None:
            return None
        dh = dh_at((pos[0] - 1, pos[1]))
        if dh is None:
            return d
        acc = d
        term = d
        for _ in range(n0 - 1):
            term = dh @ term
            if term.is_zero():
                break
            acc = acc + term
        return acc

    A = {pos: A_at(pos) for pos in system.C.cells}

    new_dhX = dict(system.X.dh)
    i1 = dict(system.i)
    p1 = dict(system.p)
    h1 = dict(system.h)
    for (r, s) in system.C.cells:
        An = A.get((r, s))
        if An is not None:
            if (r - 1, s) in system.p and (r, s) in system.i:
                corr = system.p[(r - 1, s)] @ An @ system.i[(r, s)]
                base = system.X.dh.get((r, s))
                new_dhX[(r, s)] = corr if base is None else base + corr
            if (r - 1, s) in system.h and (r, s) in system.i:
                i1[(r, s)] = system.i[(r, s)] + system.h[(r - 1, s)] @ An @ system.i[(r, s)]
        An1 = A.get((r + 1, s))
        if An1 is not None and (r, s) in system.h:
            if (r, s) in system.p:
                p1[(r, s)] = system.p[(r, s)] + system.p[(r, s)] @ An1 @ system.h[(r, s)]
            h1[(r, s)] = system.h[(r, s)] + system.h[(r, s)] @ An1 @ system.h[(r, s)]

    if not vanishes_beyond:
        tops = {}
        for (r, s) in system.C.cells:
            tops[s] = max(tops.get(s, -1), r)
        for s, rtop in tops.items():
            p1.pop((rtop, s), None)
            h1.pop((rtop, s), None)

    new_dhC = dict(system.C.dh)
    for pos, d in delta.items():
        if d is None:
            continue
        base = new_dhC.get(pos)
        new_dhC[pos] = d if base is None else base + d

    Xp = DoubleComplex(system.X.cells, new_dhX, system.X.dv)
    Cp = DoubleComplex(system.C.cells, new_dhC, system.C.dv)
    report = CheckReport(True)
    if verify:
        report = _verify_perturbed_rows(Xp, Cp, i1, p1, h1)
        if not report:
            raise AssertionError(f"perturbed double complex failed: {report}")
    return PerturbedRows(Xp, Cp, i1, p1, h1, report)


def _verify_perturbed_rows(Xp, Cp, i1, p1, h1):
    # item (1): morphisms of double complexes with p1 o i1 = id
    for pos in Xp.cells:
        if pos in i1 and pos in p1:
            if p1[pos] @ i1[pos] != _eye(Xp.rank(pos)):
                return CheckReport(False, "p1 o i1 = id", pos)
    for (r, s) in Xp.cells:
        tgt = (r - 1, s)
        if (r, s) in i1 and tgt in i1 and (r, s) in Xp.dh and (r, s) in Cp.dh:
            if Cp.dh[(r, s)] @ i1[(r, s)] != i1[tgt] @ Xp.dh[(r, s)]:
                return CheckReport(False, "i1 horizontal chain map", (r, s))
        if (r, s) in p1 and tgt in p1 and (r, s) in Xp.dh and (r, s) in Cp.dh:
            if Xp.dh[(r, s)] @ p1[(r, s)] != p1[tgt] @ Cp.dh[(r, s)]:
                return CheckReport(False, "p1 horizontal chain map", (r, s))
        vt = (r, s - 1)
        if (r, s) in i1 and vt in i1 and (r, s) in Xp.dv and (r, s) in Cp.dv:
            if Cp.dv[(r, s)] @ i1[(r, s)] != i1[vt] @ Xp.dv[(r, s)]:
                return CheckReport(False, "i1 vertical chain map", (r, s))
        if (r, s) in p1 and vt in p1 and (r, s) in Xp.dv and (r, s) in Cp.dv:
            if Xp.dv[(r, s)] @ p1[(r, s)] != p1[vt] @ Cp.dv[(r, s)]:
                return CheckReport(False, "p1 vertical chain map", (r, s))
    # item (2): row homotopy identity
    for (r, s) in Cp.cells:
        if (r, s) not in h1 or (r, s) not in i1 or (r, s) not in p1:
            continue
        up = (r + 1, s)
        if up not in Cp.dh:
            continue
        lhs = Cp.dh[up] @ h1[(r, s)]
        prev = (r - 1, s)
        if prev in h1 and (r, s) in Cp.dh:
            lhs = lhs + h1[prev] @ Cp.dh[(r, s)]
        rhs = i1[(r, s)] @ p1[(r, s)] - _eye(Cp.rank((r, s)))
        if lhs != rhs:
            return CheckReport(False, "row homotopy identity", (r, s))
    return CheckReport(True)
