# src/services/seqchase.py
"""
Dimension chasing along long exact cohomology sequences.

A short exact sequence 0 → A → B → C → 0 of sheaves on P^n gives the long
sequence 0 → A0 → B0 → C0 → A1 → … → Cn → 0. Every slot carries an interval
of possible dimensions and every map an interval of possible ranks; exactness
forces dim V = rank(in) + rank(out) and rank ≤ dim at both ends. Propagating
these constraints to a fixed point subsumes the flanking-zero, six-term and
alternating-sum rules. No map is ever rank-computed.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple
import logging
import re

from src.core.exceptions import ChaseContradiction, DomainError
from src.schemas.cohomology import CohProfile, Dim
from src.schemas.sheaves import SheafExpr
from src.services import bott

logger = logging.getLogger(__name__)

_LINE = re.compile(r"^RULE (\S+) READ (.*?) WRITE (\S+) = (\S+)$")


@dataclass(frozen=True)
class ShortExact:
    """0 → left → middle → right → 0, by profile label"""

    left: str
    middle: str
    right: str

    @property
    def names(self) -> Tuple[str, str, str]:
        return (self.left, self.middle, self.right)


@dataclass(frozen=True)
class ChaseStep:
    rule: str
    reads: Tuple[str, ...]
    writes: str
    value: Dim
    justification: str = ""

    def to_line(self) -> str:
        reads = " ".join(self.reads) if self.reads else "-"
        return f"RULE {self.rule} READ {reads} WRITE {self.writes} = {self.value}"

    @classmethod
    def parse(cls, line: str) -> "ChaseStep":
        match = _LINE.match(line.strip())
        if not match:
            raise DomainError(f"not a trace line: {line!r}")
        rule, reads, writes, value = match.groups()
        read_slots = () if reads.strip() == "-" else tuple(reads.split())
        return cls(rule, read_slots, writes, Dim.parse(value))


@dataclass
class ChaseTrace:
    steps: List[ChaseStep] = field(default_factory=list)

    def record(self, step: ChaseStep) -> None:
        self.steps.append(step)

    def extend(self, other: "ChaseTrace") -> None:
        self.steps.extend(other.steps)

    def lines(self) -> List[str]:
        return [step.to_line() for step in self.steps]

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    @classmethod
    def parse(cls, text: str) -> "ChaseTrace":
        return cls([ChaseStep.parse(line) for line in text.splitlines() if line.strip()])

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[ChaseStep]:
        return iter(self.steps)


def _split_slot(slot: str) -> Tuple[str, int]:
    label, q = slot.rsplit(":", 1)
    return label, int(q)


def replay_trace(initial: Sequence[CohProfile], trace: ChaseTrace) -> Dict[str, CohProfile]:
    """Apply every write of a trace to the initial profiles; each write may only tighten"""
    profiles = {p.label: p for p in initial}
    top = max((p.top for p in initial), default=0)
    for step in trace:
        label, q = _split_slot(step.writes)
        current = profiles.get(label) or CohProfile.unknown(label, top)
        if not step.value.within(current.h(q)):
            raise ChaseContradiction(f"replayed write {step.to_line()} widens {current.h(q)}", trace)
        profiles[label] = current.with_dim(q, step.value)
    return profiles


def _min_upper(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class _LongSequence:
    """Interval state of one long exact sequence"""

    def __init__(self, seq: ShortExact, profiles: Sequence[CohProfile]):
        self.top = profiles[0].top
        self.slots = [(o, q) for q in range(self.top + 1) for o in range(3)]
        self.tags = [f"{seq.names[o]}:{q}" for o, q in self.slots]
        self.dims: List[Dim] = [profiles[o].h(q) for o, q in self.slots]
        size = len(self.slots)
        # rank[j] is the rank of slot j-1 → slot j; the two outer maps are zero
        self.rank_lo = [0] * (size + 1)
        self.rank_up: List[Optional[int]] = [None] * (size + 1)
        self.rank_up[0] = self.rank_up[size] = 0
        self.sources: List[FrozenSet[int]] = [frozenset()] * (size + 1)
        self.trace = ChaseTrace()

    def _fail(self, where: str) -> None:
        raise ChaseContradiction(f"chase forced an empty interval at {where}", self.trace)

    def _set_rank(self, j: int, lo: int, up: Optional[int], sources: FrozenSet[int]) -> bool:
        new_lo = max(self.rank_lo[j], lo)
        new_up = _min_upper(self.rank_up[j], up)
        if new_lo == self.rank_lo[j] and new_up == self.rank_up[j]:
            return False
        if new_up is not None and new_lo > new_up:
            self._fail(f"rank {j}")
        self.rank_lo[j], self.rank_up[j] = new_lo, new_up
        self.sources[j] = self.sources[j] | sources
        return True

    def _rule_name(self, value: Dim, reads: List[int]) -> str:
        if not value.is_known:
            return "interval-bound"
        if all(self.dims[k].is_known and self.dims[k].lower == 0 for k in reads):
            return "flanking-zeros"
        if len(reads) <= 4:
            return "six-term"
        return "alternating-sum"

    def _tighten_dim(self, i: int) -> bool:
        ins, out = i, i + 1
        lo = self.rank_lo[ins] + self.rank_lo[out]
        up = None
        if self.rank_up[ins] is not None and self.rank_up[out] is not None:
            up = self.rank_up[ins] + self.rank_up[out]
        current = self.dims[i]
        new_lo = max(current.lower, lo)
        new_up = _min_upper(current.upper, up)
        if new_lo == current.lower and new_up == current.upper:
            return False
        if new_up is not None and new_lo > new_up:
            self._fail(self.tags[i])
        value = Dim(new_lo, new_up)
        self.dims[i] = value
        reads = sorted((self.sources[ins] | self.sources[out]) - {i})
        self.trace.record(ChaseStep(
            rule=self._rule_name(value, reads),
            reads=tuple(self.tags[k] for k in reads),
            writes=self.tags[i],
            value=value,
            justification=(
                f"exactness at {self.tags[i]}: rank in [{self.rank_lo[ins]},{self.rank_up[ins]}], "
                f"rank out [{self.rank_lo[out]},{self.rank_up[out]}]"
            ),
        ))
        return True

    def _tighten_ranks(self, i: int) -> bool:
        changed = False
        dim = self.dims[i]
        for this, other in ((i, i + 1), (i + 1, i)):
            lo = 0 if self.rank_up[other] is None else dim.lower - self.rank_up[other]
            up = None if dim.upper is None else dim.upper - self.rank_lo[other]
            changed |= self._set_rank(this, lo, up, frozenset({i}) | self.sources[other])
        return changed

    def _bound_ranks(self) -> bool:
        changed = False
        for j in range(1, len(self.slots)):
            left, right = self.dims[j - 1].upper, self.dims[j].upper
            bound = _min_upper(left, right)
            if bound is None:
                continue
            source = j - 1 if left == bound else j
            changed |= self._set_rank(j, 0, bound, frozenset({source}))
        return changed

    def run(self) -> None:
        max_rounds = 4 * len(self.slots) + 16
        for _ in range(max_rounds):
            changed = self._bound_ranks()
            for i in range(len(self.slots)):
                changed |= self._tighten_dim(i)
                changed |= self._tighten_ranks(i)
            if not changed:
                break
        else:
            logger.warning(f"⚠️ Chase stopped after {max_rounds} rounds without a fixed point")
        if all(dim.is_known for dim in self.dims):
            alternating = sum((-1) ** i * dim.lower for i, dim in enumerate(self.dims))
            if alternating != 0:
                self._fail(f"alternating sum {alternating}")

    def profiles(self, originals: Sequence[CohProfile]) -> Tuple[CohProfile, CohProfile, CohProfile]:
        result = []
        for o, original in enumerate(originals):
            dims = tuple(self.dims[3 * q + o] for q in range(self.top + 1))
            result.append(CohProfile(original.label, dims))
        return tuple(result)


def chase(seq: ShortExact, profiles: Sequence[CohProfile]) -> Tuple[Tuple[CohProfile, CohProfile, CohProfile], ChaseTrace]:
    """Chase 0 → A → B → C → 0 to a fixed point"""
    if len(profiles) != 3:
        raise DomainError("a short exact sequence has exactly three terms")
    if len({p.top for p in profiles}) != 1:
        raise DomainError("profiles of a short exact sequence must share the same range")

    state = _LongSequence(seq, profiles)
    state.run()
    return state.profiles(profiles), state.trace


def chase_resolution(
    res: Sequence[SheafExpr],
    target: SheafExpr,
    profile_of: Optional[Callable[[SheafExpr], CohProfile]] = None,
) -> Tuple[CohProfile, ChaseTrace]:
    """
    Chase 0 → E_c → … → E_1 → target → 0, with res = [E_1, …, E_c].
    The resolution is split left to right through syzygies K_i = coker(K_{i+1} → E_i).
    """
    if not res:
        raise DomainError("a resolution needs at least one term")
    profile_of = profile_of or bott.profile
    terms = [profile_of(expr) for expr in res]
    top = terms[0].top
    trace = ChaseTrace()

    current = terms[-1]
    if len(terms) == 1:
        current = CohProfile.from_values("0", [0] * (top + 1))
        remaining = [0]
    else:
        remaining = list(range(len(terms) - 2, -1, -1))

    for index in remaining:
        middle = terms[index]
        label = target.label if index == 0 else f"K{index + 1}[{target.label}]"
        right = CohProfile.unknown(label, top)
        seq = ShortExact(current.label, middle.label, label)
        (_, _, right), step_trace = chase(seq, (current, middle, right))
        trace.extend(step_trace)
        current = right

    logger.debug(f"🔍 Resolved {target.label}: {current}")
    return current, trace
