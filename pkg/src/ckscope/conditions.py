"""The ten frame conditions and the relational helpers they use.

Every condition is evaluated literally, with nested loops over worlds and
early exit. A violated universal condition yields the offending tuple of
worlds, which is what ``--explain`` prints.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Iterable, Optional, Union

from .kripke import Frame, bits, mask_of


class ConditionName(str, Enum):
    NdSuff = "NdSuff"
    NdCorr = "NdCorr"
    CdSuff = "CdSuff"
    CdStrong = "CdStrong"
    CdCorr = "CdCorr"
    IdbSuff = "IdbSuff"
    IdbWeak = "IdbWeak"
    IdbCorr = "IdbCorr"
    NdbSuff = "NdbSuff"
    NdbCorr = "NdbCorr"

    def __str__(self) -> str:
        return self.value


ALL_CONDITIONS = tuple(ConditionName)


def downset(frame: Frame, worlds: Iterable[int]) -> frozenset[int]:
    return frozenset(bits(_down(frame, mask_of(worlds))))


def r_image(frame: Frame, x: int) -> frozenset[int]:
    return frozenset(bits(frame.r[x]))


def r_preimage(frame: Frame, x: int) -> frozenset[int]:
    return frozenset(bits(frame.r_inv[x]))


def _down(frame: Frame, a: int) -> int:
    m = 0
    for y in bits(a):
        m |= frame.geq[y]
    return m


def _sees_bomb(frame: Frame, x: int) -> bool:
    return bool(frame.r[x] & frame.bomb_bit)


def _all_succ_see_bomb(frame: Frame, x: int) -> bool:
    return all(_sees_bomb(frame, y) for y in bits(frame.leq[x]))


Witness = Optional[tuple[int, ...]]


# (Nd-suff)  forall x (x R bomb implies x = bomb)
def _nd_suff(fr: Frame) -> Witness:
    for x in range(fr.n):
        if x != fr.bomb and _sees_bomb(fr, x):
            return (x,)
    return None


# (Nd-corr)  forall x (if y R bomb for all y >= x then x = bomb)
def _nd_corr(fr: Frame) -> Witness:
    for x in range(fr.n):
        if x != fr.bomb and _all_succ_see_bomb(fr, x):
            return (x,)
    return None


def _covers(fr: Frame, xp: int, y: int) -> bool:
    # every z with xp R z has some w with y R w and z <= w
    for z in bits(fr.r[xp]):
        if not fr.leq[z] & fr.r[y]:
            return False
    return True


# (Cd-suff)  forall x exists x' >= x forall y >= x, z in R[x']
#            exists w (y R w and z <= w)
def _cd_suff(fr: Frame) -> Witness:
    for x in range(fr.n):
        if not any(all(_covers(fr, xp, y) for y in bits(fr.leq[x])) for xp in bits(fr.leq[x])):
            return (x,)
    return None


# (Cd-strong)  forall x <= y, x R z exists w (y R w and z <= w)
def _cd_strong(fr: Frame) -> Witness:
    for x in range(fr.n):
        for y in bits(fr.leq[x]):
            for z in bits(fr.r[x]):
                if not fr.leq[z] & fr.r[y]:
                    return (x, y, z)
    return None


# (Cd-corr)  forall x <= y, x <= z with y, z not in R^-1(bomb)
#            exists w >= x (R[w] below R[y] and R[w] below R[z])
def _cd_corr(fr: Frame) -> Witness:
    down_r = [_down(fr, fr.r[y]) for y in range(fr.n)]
    for x in range(fr.n):
        ups = [y for y in bits(fr.leq[x]) if not _sees_bomb(fr, y)]
        for y in ups:
            for z in ups:
                bound = down_r[y] & down_r[z]
                if not any(fr.r[w] & ~bound == 0 for w in bits(fr.leq[x])):
                    return (x, y, z)
    return None


def _reaches_above(fr: Frame, u: int, z: int) -> bool:
    # every s >= u has t with s R t and z <= t
    return all(fr.r[s] & fr.leq[z] for s in bits(fr.leq[u]))


# (Idb-suff)  forall x R y <= z exists u (x <= u R z and
#             forall s >= u exists t (s R t and z <= t))
def _idb_suff(fr: Frame) -> Witness:
    for x in range(fr.n):
        for y in bits(fr.r[x]):
            for z in bits(fr.leq[y]):
                if not any(fr.r[u] >> z & 1 and _reaches_above(fr, u, z) for u in bits(fr.leq[x])):
                    return (x, y, z)
    return None


# (Idb-weak)  forall x R z <= u exists y (x <= y R u)
def _idb_weak(fr: Frame) -> Witness:
    for x in range(fr.n):
        for z in bits(fr.r[x]):
            for u in bits(fr.leq[z]):
                if not fr.leq[x] & fr.r_inv[u]:
                    return (x, z, u)
    return None


# (Idb-corr)  forall x R y <= z != bomb exists u, w (x <= u R w <= z and
#             forall s >= u (s R bomb or exists t (s R t and z <= t)))
def _idb_corr(fr: Frame) -> Witness:
    for x in range(fr.n):
        for y in bits(fr.r[x]):
            for z in bits(fr.leq[y]):
                if z == fr.bomb:
                    continue
                below_z = fr.geq[z]
                ok = False
                for u in bits(fr.leq[x]):
                    if not fr.r[u] & below_z:
                        continue
                    if all(_sees_bomb(fr, s) or fr.r[s] & fr.leq[z] for s in bits(fr.leq[u])):
                        ok = True
                        break
                if not ok:
                    return (x, y, z)
    return None


# (Ndb-suff)  forall x (if x R bomb and x R y then y = bomb)
def _ndb_suff(fr: Frame) -> Witness:
    for x in range(fr.n):
        if _sees_bomb(fr, x) and fr.r[x] != fr.bomb_bit:
            y = next(bits(fr.r[x] & ~fr.bomb_bit))
            return (x, y)
    return None


# (Ndb-corr)  forall x (if every y >= x has y R bomb then
#             x <= y R z implies z = bomb)
def _ndb_corr(fr: Frame) -> Witness:
    for x in range(fr.n):
        if _all_succ_see_bomb(fr, x):
            stray = fr.box_reach[x] & ~fr.bomb_bit
            if stray:
                z = next(bits(stray))
                y = next(y for y in bits(fr.leq[x]) if fr.r[y] >> z & 1)
                return (x, y, z)
    return None


_CHECKERS: dict[ConditionName, Callable[[Frame], Witness]] = {
    ConditionName.NdSuff: _nd_suff,
    ConditionName.NdCorr: _nd_corr,
    ConditionName.CdSuff: _cd_suff,
    ConditionName.CdStrong: _cd_strong,
    ConditionName.CdCorr: _cd_corr,
    ConditionName.IdbSuff: _idb_suff,
    ConditionName.IdbWeak: _idb_weak,
    ConditionName.IdbCorr: _idb_corr,
    ConditionName.NdbSuff: _ndb_suff,
    ConditionName.NdbCorr: _ndb_corr,
}


def condition_witness(frame: Frame, name: Union[ConditionName, str]) -> Witness:
    """The first tuple of worlds violating the condition, or ``None``."""
    return _CHECKERS[ConditionName(name)](frame)


def check_condition(frame: Frame, name: Union[ConditionName, str]) -> bool:
    return condition_witness(frame, name) is None


# axiom name -> (sufficient condition, correspondence condition)
AXIOM_CONDITIONS = {
    "Nd": (ConditionName.NdSuff, ConditionName.NdCorr),
    "Cd": (ConditionName.CdSuff, ConditionName.CdCorr),
    "Idb": (ConditionName.IdbSuff, ConditionName.IdbCorr),
    "Ndb": (ConditionName.NdbSuff, ConditionName.NdbCorr),
}


class NoFrameCondition(ValueError):
    """The axiom has no known frame condition; check schema validity instead."""


def conditions_for(axioms, mode: str = "corr") -> list[ConditionName]:
    """Frame conditions for the extra axioms of ``axioms``.

    ``axioms`` is an :class:`~ckscope.hilbert.AxiomSet` or an iterable of
    axiom names. ``corr`` gives the exact classes, ``suff`` the sufficient
    ones.
    """
    if mode not in ("suff", "corr"):
        raise ValueError(f"mode must be 'suff' or 'corr', not {mode!r}")
    names = set(getattr(axioms, "extras", axioms))
    unknown = names - AXIOM_CONDITIONS.keys()
    if unknown:
        raise NoFrameCondition(f"no frame condition for {', '.join(sorted(unknown))}")
    k = 0 if mode == "suff" else 1
    return [conds[k] for ax, conds in AXIOM_CONDITIONS.items() if ax in names]
