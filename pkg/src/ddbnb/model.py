"""Problem interface for the decision-diagram solver.

A problem is a dynamic program: states, per-variable decision domains, a
transition function and integer arc values. The solver itself always
*maximizes*; minimization problems are handled by wrapping them with
:func:`to_maximization`, which negates every value.

States are opaque to the solver but must be hashable, equality-comparable and
(for deterministic tie-breaking inside a layer) totally ordered via
:meth:`Problem.state_key`.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Hashable, Iterable, Sequence

State = Hashable

INF = float("inf")
NEG_INF = float("-inf")


class Sense(Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Problem(ABC):
    """Dynamic-programming formulation of a discrete optimization problem."""

    objective_sense: Sense = Sense.MAXIMIZE

    #: Reported objective = accumulated value / value_denominator. Lets a model
    #: work in scaled integers when the true objective is not integral.
    value_denominator: int = 1

    @property
    @abstractmethod
    def n_variables(self) -> int:
        """Number of decision variables (diagram depth)."""

    @abstractmethod
    def root_state(self) -> State:
        """State before any decision has been made."""

    def root_value(self) -> int:
        """Objective value already accrued at the root (usually 0)."""
        return 0

    @abstractmethod
    def domain(self, state: State, variable: int) -> Iterable[int]:
        """Feasible decisions for ``variable`` in ``state``, deterministic order."""

    @abstractmethod
    def transition(self, state: State, variable: int, decision: int) -> State:
        """Successor state."""

    @abstractmethod
    def transition_value(self, state: State, variable: int, decision: int) -> int:
        """Value contributed by taking ``decision`` (in this problem's own sense)."""

    def rough_bound(self, state: State, variable: int):
        """Fast bound on the best completion value from ``state``.

        In the problem's own sense: an upper bound when maximizing, a lower
        bound when minimizing. May return +/-inf; returning the infeasible
        extreme (-inf for maximization, +inf for minimization) certifies that
        no feasible completion exists from this state, regardless of prefix.
        """
        return INF if self.objective_sense is Sense.MAXIMIZE else NEG_INF

    def state_key(self, state: State) -> Any:
        """Sort key giving states a deterministic total order within a layer."""
        return state


class Relaxation(ABC):
    """Merge operator turning several states into one covering state.

    Validity requirement: every completion feasible from any of the merged
    states must remain feasible, at no worse value, from the merged state.
    """

    @abstractmethod
    def merge(self, states: Sequence[State]) -> State:
        """Merged state covering all of ``states``."""

    def relax_arc_value(self, value: int, merged_state: State) -> int:
        """Adjust an arc value when its head is redirected into ``merged_state``.

        Values are in the solver's (maximization) space. The default keeps the
        arc value unchanged, which is what all bundled models use.
        """
        return value


class _Negated(Problem):
    """Sign-flipping wrapper that turns a minimization problem into maximization."""

    def __init__(self, inner: Problem):
        self.inner = inner
        self.objective_sense = Sense.MAXIMIZE
        self.value_denominator = inner.value_denominator

    @property
    def n_variables(self) -> int:
        return self.inner.n_variables

    def root_state(self) -> State:
        return self.inner.root_state()

    def root_value(self) -> int:
        return -self.inner.root_value()

    def domain(self, state: State, variable: int) -> Iterable[int]:
        return self.inner.domain(state, variable)

    def transition(self, state: State, variable: int, decision: int) -> State:
        return self.inner.transition(state, variable, decision)

    def transition_value(self, state: State, variable: int, decision: int) -> int:
        return -self.inner.transition_value(state, variable, decision)

    def rough_bound(self, state: State, variable: int):
        return -self.inner.rough_bound(state, variable)

    def state_key(self, state: State) -> Any:
        return self.inner.state_key(state)


def to_maximization(problem: Problem) -> Problem:
    """Return a maximization view of ``problem``.

    Maximization problems pass through unchanged, so applying the adapter
    twice is the same as applying it once.
    """
    if problem.objective_sense is Sense.MAXIMIZE:
        return problem
    return _Negated(problem)
