"""Tabular Q-learning realization, its value-iteration oracle, the neural carrier
variant and the RL-specific constraint evaluators."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "EnvSpec",
    "QTable",
    "Experience",
    "MLPParams",
    "OneHotEncoder",
    "HyperparamOutOfRange",
    "MaxIterExceeded",
    "ShapeMismatch",
    "KERNEL_BACKEND",
    "greedy_policy",
    "td_update",
    "bellman_apply",
    "value_iteration",
    "run_q_learning",
    "markov_probe",
    "mlp_q",
    "mlp_grad",
    "mlp_loss",
    "mlp_td_step",
    "mlp_init",
    "mlp_tabulate",
    "tabulating_mlp",
    "compat_residual",
    "TabularModel",
    "NeuralModel",
    "run_neural_q_learning",
    "sample_transition",
    "build_rl_agent",
    "build_crl_agent",
    "run_trace",
]


def _load_kernels():
    if os.environ.get("AGENTARCH_PURE") != "1":
        try:
            from . import _kernels  # type: ignore[attr-defined]

            return _kernels
        except ImportError:
            pass
    from . import _kernels_py

    return _kernels_py


_K = _load_kernels()
KERNEL_BACKEND: str = _K.BACKEND


class HyperparamOutOfRange(ValueError):
    pass


class MaxIterExceeded(RuntimeError):
    pass


class ShapeMismatch(ValueError):
    pass


Row = tuple[tuple[float, int, float], ...]  # (reward, next state, probability)


def _normalize_row(row) -> Row:
    """Merge duplicate outcomes and sort, so equal distributions compare equal."""
    acc: dict[tuple[float, int], float] = {}
    for r, s2, p in row:
        acc[(float(r), int(s2))] = acc.get((float(r), int(s2)), 0.0) + float(p)
    return tuple((r, s2, p) for (r, s2), p in sorted(acc.items()) if p > 0)


@dataclass(frozen=True, eq=False)
class EnvSpec:
    """A finite MDP kernel P(r, s' | s, a).

    ``history`` optionally overrides rows by the previous action, keyed
    ``(s, a, prev_action)``; an environment with overrides is not Markov in
    (s, a) and exists to exercise the factorization probe.
    """

    states: tuple[str, ...]
    actions: tuple[str, ...]
    kernel: Mapping[tuple[int, int], Row]
    gamma: float
    start: int = 0
    history: Mapping[tuple[int, int, int], Row] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if not 0 <= self.gamma < 1:
            raise HyperparamOutOfRange(f"gamma must lie in [0,1), got {self.gamma}")
        for key, row in list(self.kernel.items()) + list(self.history.items()):
            total = sum(p for _, _, p in row)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"row {key} sums to {total}, not 1")
        missing = [(s, a) for s in range(self.nS) for a in range(self.nA) if (s, a) not in self.kernel]
        if missing:
            raise ValueError(f"kernel has no row for {missing[0]}")

    @property
    def nS(self) -> int:
        return len(self.states)

    @property
    def nA(self) -> int:
        return len(self.actions)

    def row(self, s: int, a: int, prev: int | None = None) -> Row:
        if prev is not None and (s, a, prev) in self.history:
            return self.history[(s, a, prev)]
        return self.kernel[(s, a)]

    def absorbing(self, s: int) -> bool:
        return all(all(s2 == s for _, s2, p in self.kernel[(s, a)] if p > 0) for a in range(self.nA))

    def terminal(self, s: int) -> bool:
        """Absorbing with zero reward, so episodes may reset there without bias."""
        return self.absorbing(s) and all(r == 0 for a in range(self.nA) for r, _, _ in self.kernel[(s, a)])

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Transition tensor P[s,a,s'] and expected reward Rbar[s,a] of the base rows."""
        P = np.zeros((self.nS, self.nA, self.nS))
        Rbar = np.zeros((self.nS, self.nA))
        for (s, a), row in self.kernel.items():
            for r, s2, p in row:
                P[s, a, s2] += p
                Rbar[s, a] += p * r
        return P, Rbar

    def arrays(self) -> dict[str, np.ndarray]:
        """Flat CSR-style kernel arrays; with history, blocks for prev = none, a0, a1, ..."""
        blocks = 1 + (self.nA if self.history else 0)
        offsets, nxt, rew, prob, cum = [0], [], [], [], []
        for blk in range(blocks):
            prev = None if blk == 0 else blk - 1
            for s in range(self.nS):
                for a in range(self.nA):
                    c = 0.0
                    for r, s2, p in self.row(s, a, prev):
                        c += p
                        nxt.append(s2)
                        rew.append(r)
                        prob.append(p)
                        cum.append(c)
                    cum[-1] = 1.0 + 1e-12
                    offsets.append(len(nxt))
        return {
            "offsets": np.asarray(offsets, dtype=np.int64),
            "nxt": np.asarray(nxt, dtype=np.int64),
            "rew": np.asarray(rew, dtype=np.float64),
            "prob": np.asarray(prob, dtype=np.float64),
            "cum": np.asarray(cum, dtype=np.float64),
            "terminal": np.asarray([self.terminal(s) for s in range(self.nS)], dtype=np.uint8),
        }

    def state_index(self, s) -> int:
        return s if isinstance(s, (int, np.integer)) else self.states.index(s)

    def action_index(self, a) -> int:
        return a if isinstance(a, (int, np.integer)) else self.actions.index(a)


@dataclass(frozen=True, eq=False)
class QTable:
    values: np.ndarray
    states: tuple[str, ...] = ()
    actions: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ShapeMismatch("Q table must be two-dimensional")
        if not np.all(np.isfinite(v)):
            raise ValueError("Q table entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, env: EnvSpec) -> "QTable":
        return cls(np.zeros((env.nS, env.nA)), env.states, env.actions)

    def with_values(self, v) -> "QTable":
        return QTable(v, self.states, self.actions)

    def __eq__(self, other):
        return isinstance(other, QTable) and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class Experience:
    s: int
    a: int
    r: float
    s_next: int

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.a, self.r, self.s_next], dtype=np.float64)

    @classmethod
    def from_array(cls, v) -> "Experience":
        return cls(int(v[0]), int(v[1]), float(v[2]), int(v[3]))


def _q(Q) -> np.ndarray:
    return Q.values if isinstance(Q, QTable) else np.asarray(Q, dtype=np.float64)


def greedy_policy(Q, s: int) -> int:
    """argmax_a Q(s,a); the lowest index wins ties."""
    return int(np.argmax(_q(Q)[s]))


def _check_alpha_gamma(alpha: float, gamma: float) -> None:
    if not 0 <= alpha <= 1:
        raise HyperparamOutOfRange(f"alpha must lie in [0,1], got {alpha}")
    if not 0 <= gamma < 1:
        raise HyperparamOutOfRange(f"gamma must lie in [0,1), got {gamma}")


def td_update(Q, e: Experience, alpha: float, gamma: float):
    _check_alpha_gamma(alpha, gamma)
    v = np.array(_q(Q), dtype=np.float64)
    v[e.s, e.a] += alpha * (e.r + gamma * v[e.s_next].max() - v[e.s, e.a])
    return Q.with_values(v) if isinstance(Q, QTable) else v


def bellman_apply(env: EnvSpec, Q):
    arr = env.arrays()
    v = np.ascontiguousarray(_q(Q), dtype=np.float64)
    out = _K.bellman(v, arr["offsets"], arr["nxt"], arr["rew"], arr["prob"], float(env.gamma))
    return Q.with_values(out) if isinstance(Q, QTable) else np.asarray(out)


def value_iteration(env: EnvSpec, tol: float = 1e-10, max_iter: int = 10000) -> QTable:
    """Iterate the Bellman operator from zero until the sup-norm change drops below tol."""
    if tol <= 0:
        raise HyperparamOutOfRange("tol must be positive")
    P, Rbar = env.dense()
    Q = np.zeros((env.nS, env.nA))
    for _ in range(max_iter):
        Qn = Rbar + env.gamma * P @ Q.max(axis=1)
        if np.max(np.abs(Qn - Q)) < tol:
            return QTable(Qn, env.states, env.actions)
        Q = Qn
    raise MaxIterExceeded(f"value iteration did not reach tol {tol} in {max_iter} iterations")


def run_q_learning(
    env: EnvSpec,
    steps: int,
    alpha: float,
    epsilon: float,
    seed: int | np.random.Generator = 0,
    Q0=None,
    return_visits: bool = False,
    kernels=None,
):
    """Epsilon-greedy tabular Q-learning with episode resets at terminal states.

    All randomness is drawn up front as a (steps, 3) block of uniforms
    (explore?, random action, transition), so compiled and pure kernels
    produce identical tables for the same seed.
    """
    if not 0 < alpha <= 1:
        raise HyperparamOutOfRange(f"alpha must lie in (0,1], got {alpha}")
    if not 0 <= epsilon <= 1:
        raise HyperparamOutOfRange(f"epsilon must lie in [0,1], got {epsilon}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    U = rng.random((int(steps), 3))
    Q = np.zeros((env.nS, env.nA)) if Q0 is None else np.array(_q(Q0), dtype=np.float64)
    Q = np.ascontiguousarray(Q)
    arr = env.arrays()
    k = kernels or _K
    visits = k.q_learning(
        Q,
        arr["offsets"],
        arr["nxt"],
        arr["rew"],
        arr["cum"],
        arr["terminal"],
        int(env.start),
        float(alpha),
        float(env.gamma),
        float(epsilon),
        U,
        bool(env.history),
    )
    out = QTable(Q, env.states, env.actions)
    return (out, np.asarray(visits)) if return_visits else out


def markov_probe(env: EnvSpec) -> tuple[bool, list[str]]:
    """Compare each (s, a) row across every history of length at most one.

    Returns (markov?, evidence). On failure the evidence names the first
    pair of histories whose kernel rows differ.
    """
    histories: list[tuple[str, int | None]] = [("episode start", None)]
    histories += [(f"previous action {b}", i) for i, b in enumerate(env.actions)]
    for s in range(env.nS):
        for a in range(env.nA):
            base_label, base_prev = histories[0]
            base = _normalize_row(env.row(s, a, base_prev))
            for label, prev in histories[1:]:
                other = _normalize_row(env.row(s, a, prev))
                if other != base:
                    return False, [
                        f"witness at (s={env.states[s]}, a={env.actions[a]}): "
                        f"history h1=[{base_label}] gives {_fmt_row(env, base)}; "
                        f"history h2=[{label}] gives {_fmt_row(env, other)}"
                    ]
    return True, [f"rows identical across {len(histories)} histories for all {env.nS * env.nA} pairs"]


def _fmt_row(env: EnvSpec, row: Row) -> str:
    return "[" + ", ".join(f"({r:g}, {env.states[s2]}, {p:g})" for r, s2, p in row) + "]"


# ------------------------------------------------------------------ neural carrier


@dataclass(frozen=True, eq=False)
class MLPParams:
    W1: np.ndarray  # k x d
    b1: np.ndarray  # k
    W2: np.ndarray  # 1 x k
    b2: float

    def __post_init__(self):
        W1 = np.asarray(self.W1, dtype=np.float64)
        b1 = np.asarray(self.b1, dtype=np.float64).reshape(-1)
        W2 = np.asarray(self.W2, dtype=np.float64).reshape(1, -1)
        if W1.ndim != 2 or W1.shape[0] != b1.shape[0] or W2.shape[1] != b1.shape[0]:
            raise ShapeMismatch(f"inconsistent MLP shapes {W1.shape}, {b1.shape}, {W2.shape}")
        for a in (W1, b1, W2):
            if not np.all(np.isfinite(a)):
                raise ValueError("MLP parameters must be finite")
        object.__setattr__(self, "W1", W1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "W2", W2)
        object.__setattr__(self, "b2", float(self.b2))

    @property
    def width(self) -> int:
        return self.b1.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W1.shape[1]

    def flat(self) -> np.ndarray:
        return np.concatenate([self.W1.ravel(), self.b1, self.W2.ravel(), [self.b2]])

    @classmethod
    def from_flat(cls, v, k: int, d: int) -> "MLPParams":
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (k * d + 2 * k + 1,):
            raise ShapeMismatch(f"flat vector of length {v.shape} does not fit k={k}, d={d}")
        i = k * d
        return cls(v[:i].reshape(k, d), v[i : i + k], v[i + k : i + 2 * k].reshape(1, k), v[-1])

    def __eq__(self, other):
        return isinstance(other, MLPParams) and np.array_equal(self.flat(), other.flat())


@dataclass(frozen=True)
class OneHotEncoder:
    """(s, a) -> one-hot(s) ++ one-hot(a), of dimension |S| + |A|."""

    nS: int
    nA: int

    @property
    def dim(self) -> int:
        return self.nS + self.nA

    def __call__(self, s: int, a: int) -> np.ndarray:
        x = np.zeros(self.nS + self.nA)
        x[s] = 1.0
        x[self.nS + a] = 1.0
        return x


def _forward(p: MLPParams, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.input_dim,):
        raise ShapeMismatch(f"input of shape {x.shape}, expected ({p.input_dim},)")
    z = p.W1 @ x + p.b1
    h = np.maximum(z, 0.0)
    return z, h, float(p.W2[0] @ h + p.b2)


def mlp_q(params: MLPParams, x) -> float:
    return _forward(params, x)[2]


def mlp_grad(params: MLPParams, x) -> MLPParams:
    """dQ/dtheta, using ReLU'(0) = 0."""
    z, h, _ = _forward(params, x)
    gate = (z > 0).astype(np.float64)
    dz = params.W2[0] * gate
    return MLPParams(np.outer(dz, x), dz, h.reshape(1, -1), 1.0)


def _target(params: MLPParams, e: Experience, gamma: float, encoder) -> float:
    return e.r + gamma * max(mlp_q(params, encoder(e.s_next, u)) for u in range(encoder.nA))


def mlp_loss(params: MLPParams, e: Experience, y: float, encoder) -> float:
    return (mlp_q(params, encoder(e.s, e.a)) - y) ** 2


def mlp_td_step(params: MLPParams, e: Experience, alpha: float, gamma: float, encoder) -> MLPParams:
    """One semi-gradient step on (Q(s,a) - y)^2 with y held fixed."""
    _check_alpha_gamma(alpha, gamma)
    y = _target(params, e, gamma, encoder)
    x = encoder(e.s, e.a)
    q = mlp_q(params, x)
    g = mlp_grad(params, x)
    c = alpha * 2.0 * (q - y)
    return MLPParams(params.W1 - c * g.W1, params.b1 - c * g.b1, params.W2 - c * g.W2, params.b2 - c * g.b2)


def mlp_init(encoder: OneHotEncoder, width: int, rng: np.random.Generator, scale: float = 0.5) -> MLPParams:
    d = encoder.dim
    return MLPParams(
        rng.normal(0, scale, (width, d)),
        rng.normal(0, scale, width),
        rng.normal(0, scale, (1, width)),
        float(rng.normal(0, scale)),
    )


def mlp_tabulate(params: MLPParams, encoder: OneHotEncoder) -> np.ndarray:
    """The carrier map R: parameters to the induced table Q_theta over S x A."""
    return np.array([[mlp_q(params, encoder(s, a)) for a in range(encoder.nA)] for s in range(encoder.nS)])


def tabulating_mlp(Q, encoder: OneHotEncoder) -> MLPParams:
    """An MLP of width |S||A| that reproduces ``Q`` exactly on one-hot inputs.

    Hidden unit (s,a) reads 1 at s and at |S|+a with bias -1, so it fires
    with value 1 only on its own pair; the output weights are the table.
    """
    v = _q(Q)
    nS, nA = encoder.nS, encoder.nA
    k = nS * nA
    W1 = np.zeros((k, encoder.dim))
    for s in range(nS):
        for a in range(nA):
            W1[s * nA + a, s] = 1.0
            W1[s * nA + a, nS + a] = 1.0
    return MLPParams(W1, -np.ones(k), v.reshape(1, k), 0.0)


class TabularModel:
    """Carrier = the table itself; R is the identity."""

    def __init__(self, Q, encoder: OneHotEncoder):
        self.theta = np.array(_q(Q), dtype=np.float64)
        self.encoder = encoder

    def tabulate(self) -> np.ndarray:
        return self.theta.copy()

    def step(self, e: Experience, alpha: float, gamma: float) -> "TabularModel":
        return TabularModel(td_update(self.theta, e, alpha, gamma), self.encoder)


class NeuralModel:
    """Carrier = MLP parameters; R tabulates Q_theta."""

    def __init__(self, params: MLPParams, encoder: OneHotEncoder):
        self.theta = params
        self.encoder = encoder

    def tabulate(self) -> np.ndarray:
        return mlp_tabulate(self.theta, self.encoder)

    def step(self, e: Experience, alpha: float, gamma: float) -> "NeuralModel":
        return NeuralModel(mlp_td_step(self.theta, e, alpha, gamma, self.encoder), self.encoder)


def compat_residual(params, e: Experience, alpha: float, gamma: float, encoder: OneHotEncoder | None = None) -> float:
    """sup |R(step(theta, e)) - td_update(R(theta), e)|.

    ``params`` may be MLPParams (with an encoder) or any model exposing
    ``tabulate`` and ``step``.
    """
    if isinstance(params, MLPParams):
        if encoder is None:
            raise ValueError("an encoder is required for MLP parameters")
        model = NeuralModel(params, encoder)
    else:
        model = params
    before = model.tabulate()
    lhs = model.step(e, alpha, gamma).tabulate()
    rhs = td_update(before, e, alpha, gamma)
    return float(np.max(np.abs(lhs - rhs)))


def run_neural_q_learning(
    env: EnvSpec,
    steps: int,
    alpha: float,
    epsilon: float,
    width: int,
    seed: int | np.random.Generator = 0,
) -> MLPParams:
    """Epsilon-greedy semi-gradient Q-learning on the MLP carrier (pure numpy)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    enc = OneHotEncoder(env.nS, env.nA)
    params = mlp_init(enc, width, rng, scale=0.1)
    arr = env.arrays()
    s = env.start
    for u in rng.random((int(steps), 3)):
        table_s = [mlp_q(params, enc(s, b)) for b in range(env.nA)]
        a = min(int(u[1] * env.nA), env.nA - 1) if u[0] < epsilon else int(np.argmax(table_s))
        i = s * env.nA + a
        lo, hi = arr["offsets"][i], arr["offsets"][i + 1]
        j = lo + int(np.searchsorted(arr["cum"][lo:hi], u[2], side="right"))
        j = min(j, hi - 1)
        e = Experience(s, a, float(arr["rew"][j]), int(arr["nxt"][j]))
        params = mlp_td_step(params, e, alpha, env.gamma, enc)
        s = env.start if arr["terminal"][e.s_next] else e.s_next
    return params


def sample_transition(env: EnvSpec, s: int, a: int, rng: np.random.Generator) -> Experience:
    row = env.row(s, a)
    u = rng.random()
    c = 0.0
    for r, s2, p in row:
        c += p
        if u < c:
            return Experience(s, a, r, s2)
    r, s2, _ = row[-1]
    return Experience(s, a, r, s2)



# ------------------------------------------------------------------ agents and evaluators

from .constraint import ConstraintKind, Status, Verdict  # noqa: E402
from . import semantics as sem  # noqa: E402

CRL_CAUSAL_WEIGHT = 0.01


def _transitions(env: EnvSpec) -> list[np.ndarray]:
    out = []
    for s in range(env.nS):
        for a in range(env.nA):
            for r, s2, p in env.row(s, a):
                if p > 0:
                    out.append(Experience(s, a, r, s2).as_array())
    return out


def _env_interaction(env: EnvSpec, S, A, E) -> "sem.SemMorphism":
    def step(rng, s, a):
        e = sample_transition(env, S.index(s), A.index(a), rng)
        return (e.as_array(),)

    return sem.SemMorphism((S, A), (E,), sem.Sampler(step))


def _hp(hp: Mapping | None) -> dict:
    out = {"alpha": 0.1, "epsilon": 0.2, "steps": 200_000, "seed": 0, "width": 16}
    out.update(hp or {})
    return out


def build_rl_agent(env: EnvSpec, mode: str = "tabular", hp: Mapping | None = None, arch=None, train: bool = True):
    """Package the tabular (or neural) Q-learning realization as an agent over RL."""
    from .corpus import builtin

    if mode not in ("tabular", "neural"):
        raise ValueError("mode must be tabular or neural")
    arch = arch or builtin("RL")
    h = _hp(hp)
    alpha, gamma = float(h["alpha"]), float(env.gamma)
    h["gamma"] = gamma
    S, A = sem.FiniteSet(env.states), sem.FiniteSet(env.actions)
    E = sem.RealSpace((4,))
    table = sem.RealSpace((env.nS, env.nA))
    enc = OneHotEncoder(env.nS, env.nA)
    k = int(h["width"])
    n_params = k * enc.dim + 2 * k + 1

    def exp(v):
        return Experience.from_array(v)

    if mode == "tabular":
        theta_s = table
        to_table = np.asarray

        def update(th, e):
            return (td_update(th, exp(e), alpha, gamma),)

    else:
        theta_s = sem.RealSpace((n_params,))

        def to_table(th):
            return mlp_tabulate(MLPParams.from_flat(th, k, enc.dim), enc)

        def update(th, e):
            p = MLPParams.from_flat(th, k, enc.dim)
            return (mlp_td_step(p, exp(e), alpha, gamma, enc).flat(),)

    def policy(s, th):
        return (env.actions[greedy_policy(to_table(th), S.index(s))],)

    I = sem.Interpretation(
        {"S": S, "A": A, "E": E, "Theta_s": theta_s},
        {
            "Policy": sem.SemMorphism((S, theta_s), (A,), sem.Deterministic(policy)),
            "EnvInteraction": _env_interaction(env, S, A, E),
            "Update": sem.SemMorphism((theta_s, E), (theta_s,), sem.Deterministic(update)),
        },
    )
    J = sem.Interpretation(
        {"Theta_k": table, "E_k": E},
        {
            "Upd": sem.SemMorphism(
                (table, E), (table,), sem.Deterministic(lambda q, e: (td_update(q, exp(e), alpha, gamma),))
            )
        },
    )
    R = {("Theta_s", "Theta_k"): to_table, ("E", "E_k"): lambda v: np.asarray(v)}
    learned = {}
    samplers = {}
    if mode == "neural":
        samplers["Theta_s"] = lambda rng: mlp_init(enc, k, rng).flat()
    if train:
        if mode == "tabular":
            Q = run_q_learning(env, int(h["steps"]), alpha, float(h["epsilon"]), int(h["seed"]))
            learned["Theta_s"] = np.array(Q.values)
        else:
            p = run_neural_q_learning(
                env, int(h.get("neural_steps", 5000)), alpha, float(h["epsilon"]), k, int(h["seed"])
            )
            learned["Theta_s"] = p.flat()
    return sem.Agent(
        arch,
        I,
        J,
        R,
        hyperparams=h,
        env=env,
        learned=learned,
        samplers=samplers,
        enumerators={"E": lambda: _transitions(env), "E_k": lambda: _transitions(env)},
        kind=f"{mode} RL",
    )


def build_crl_agent(env: EnvSpec, hp: Mapping | None = None, arch=None, train: bool = True):
    """A demo CRL agent: Q-learning policy plus a visit-count causal table.

    The policy scores actions by theta_pi[s] + w * theta_cs[s]; Do leaves the
    causal table unchanged; the causal update counts visits.
    """
    from .corpus import builtin

    arch = arch or builtin("CRL")
    h = _hp(hp)
    alpha, gamma = float(h["alpha"]), float(env.gamma)
    h["gamma"] = gamma
    S, A = sem.FiniteSet(env.states), sem.FiniteSet(env.actions)
    E = sem.RealSpace((4,))
    table = sem.RealSpace((env.nS, env.nA))
    w = float(h.get("causal_weight", CRL_CAUSAL_WEIGHT))

    def exp(v):
        return Experience.from_array(v)

    def policy(s, tp, tc):
        return (env.actions[greedy_policy(np.asarray(tp) + w * np.asarray(tc), S.index(s))],)

    def count(tc, e):
        x = exp(e)
        out = np.array(tc, dtype=np.float64)
        out[x.s, x.a] += 1.0
        return (out,)

    I = sem.Interpretation(
        {"S": S, "A": A, "E": E, "Theta_pi_s": table, "Theta_CS_s": table},
        {
            "Policy": sem.SemMorphism((S, table, table), (A,), sem.Deterministic(policy)),
            "EnvInteraction": _env_interaction(env, S, A, E),
            "Do": sem.SemMorphism((table, A), (table,), sem.Deterministic(lambda tc, a: (np.asarray(tc),))),
            "PolicyUpdate": sem.SemMorphism(
                (table, table, E), (table,), sem.Deterministic(lambda tp, tc, e: (td_update(tp, exp(e), alpha, gamma),))
            ),
            "CausalUpdate": sem.SemMorphism((table, E), (table,), sem.Deterministic(count)),
        },
    )
    J = sem.Interpretation(
        {"Theta_pi_k": table, "Theta_CS_k": table, "E_k": E},
        {
            "PolicyUpd": sem.SemMorphism(
                (table, table, E), (table,), sem.Deterministic(lambda tc, tp, e: (td_update(tp, exp(e), alpha, gamma),))
            ),
            "CausalUpd": sem.SemMorphism((table, E), (table,), sem.Deterministic(count)),
            "CausalIntervention": sem.SemMorphism((table,), (table,), sem.Deterministic(lambda tc: (np.asarray(tc),))),
        },
    )
    ident = np.asarray
    R = {("Theta_pi_s", "Theta_pi_k"): ident, ("Theta_CS_s", "Theta_CS_k"): ident, ("E", "E_k"): ident}
    learned = {}
    if train:
        Q, visits = run_q_learning(
            env, int(h["steps"]), alpha, float(h["epsilon"]), int(h["seed"]), return_visits=True
        )
        learned = {"Theta_pi_s": np.array(Q.values), "Theta_CS_s": visits.astype(np.float64)}
    return sem.Agent(
        arch,
        I,
        J,
        R,
        hyperparams=h,
        env=env,
        learned=learned,
        additive_types=frozenset({"Theta_CS_s", "Theta_CS_k"}),
        enumerators={"E": lambda: _transitions(env), "E_k": lambda: _transitions(env)},
        kind="tabular CRL demo",
    )


def run_trace(agent, theta0, steps: int, seed: int = 0) -> list:
    """Closed-loop run of an RL-shaped agent (Policy, EnvInteraction, Update).

    Returns the action labels chosen by the declared greedy policy; episodes
    restart at the environment's start state on terminal states.
    """
    env = agent.env
    rng = np.random.default_rng(seed)
    g = agent.I.gens
    th = theta0
    s = env.states[env.start]
    trace = []
    for _ in range(steps):
        (a,) = sem.sem_apply(g["Policy"], (s, th), rng)
        (e,) = sem.sem_apply(g["EnvInteraction"], (s, a), rng)
        (th,) = sem.sem_apply(g["Update"], (th, e), rng)
        trace.append(a)
        x = Experience.from_array(e)
        s = env.states[env.start if env.terminal(x.s_next) else x.s_next]
    return trace


def _knowledge_table(agent, carrier: str):
    """R(theta) for the learned syntax carrier paired with ``carrier``."""
    for (s, k), f in agent.R.items():
        if k == carrier and s in agent.learned:
            return np.asarray(f(agent.learned[s]), dtype=np.float64), s
    return None, None


@sem.register_evaluator(ConstraintKind.FIXED_POINT)
def _fixed_point(agent, rho) -> Verdict:
    env = agent.env
    if env is None:
        return Verdict.skipped(evidence=["no environment attached"])
    bound = float(rho.param("gamma"))
    tol = float(rho.param("tol"))
    learned_tol = float(rho.param("learned_tol", 0.05))
    ev = []
    if env.gamma > bound + 1e-12:
        return Verdict.failed(evidence=[f"environment discount {env.gamma} exceeds the bound {bound}"])
    try:
        Qs = value_iteration(env, tol, int(rho.param("max_iter")))
    except MaxIterExceeded as e:
        return Verdict.failed(evidence=[str(e)])
    oracle = float(np.max(np.abs(bellman_apply(env, Qs.values) - Qs.values)))
    ev.append(f"oracle: |Q* - BQ*| = {oracle:.3e} (tol {tol:g})")
    Q, syn = _knowledge_table(agent, rho.param("carrier"))
    if Q is None:
        return Verdict(Status.NOT_EVALUABLE, {"oracle": oracle}, ev + ["no learned carrier value"])
    dist = float(np.max(np.abs(Q - Qs.values)))
    bell = float(np.max(np.abs(bellman_apply(env, Q) - Q)))
    ev.append(f"learned {syn}: |Q - Q*| = {dist:.4f} (tol {learned_tol:g}), |Q - BQ| = {bell:.4f}")
    ok = oracle < tol and dist < learned_tol
    return Verdict(Status.PASS if ok else Status.FAIL, {"oracle": oracle, "distance": dist, "bellman": bell}, ev)


@sem.register_evaluator(ConstraintKind.POLICY_VALUE_COMPAT)
def _policy_value(agent, rho) -> Verdict:
    pname, carrier = rho.param("policy"), rho.param("carrier")
    g = agent.arch.syn.generator_named(pname)
    Q, syn = _knowledge_table(agent, carrier)
    if Q is None:
        return Verdict.skipped(evidence=["no learned carrier value"])
    states = [t for t in g.dom if isinstance(agent.I.obj(t), sem.FiniteSet)]
    if len(states) != 1 or len(g.cod) != 1:
        return Verdict.skipped(evidence=[f"{pname} is not of the form S * carrier -> A"])
    S, A = agent.I.obj(states[0]), agent.I.obj(g.cod[0])
    bad = []
    gap = 0.0
    rng = np.random.default_rng(0)
    for s in S.labels:
        args = [s if t == states[0] else agent.learned[t.name] for t in g.dom]
        (a,) = sem.sem_apply(agent.I.gens[pname], args, rng)
        i, j = S.index(s), A.index(a)
        gap = max(gap, float(Q[i].max() - Q[i, j]))
        if Q[i, j] != Q[i].max():
            bad.append(f"state {s}: chose {a} with value {Q[i, j]:.4f}, max is {Q[i].max():.4f}")
    if bad:
        return Verdict.failed(evidence=bad, gap=gap)
    return Verdict.passed(evidence=[f"{pname}(s) is in argmax_a Q(s,a) for all {len(S.labels)} states"], gap=gap)


@sem.register_evaluator(ConstraintKind.MARKOV_FACTORIZATION)
def _markov(agent, rho) -> Verdict:
    gname = rho.param("interaction_generator")
    g = agent.arch.syn.generator_named(gname)
    m = agent.I.gens[gname]
    declared = tuple(agent.I.obj(t) for t in g.dom)
    if m.dom != declared:
        return Verdict.failed(evidence=[f"{gname} reads inputs beyond its declared profile"])
    env = agent.env
    if env is None:
        return Verdict.skipped(evidence=["structural check passed; no environment to probe"])
    ok, ev = markov_probe(env)
    ev = [f"structural: {gname} reads exactly {', '.join(t.name for t in g.dom)}"] + ev
    return Verdict(Status.PASS if ok else Status.FAIL, {}, ev)
