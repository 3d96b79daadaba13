"""Command-line checker.

Exit codes: 0 when every verdict passes, 1 when any fails, 2 for usage or
parse errors. ``--json`` prints one machine-readable report on stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import corpus
from .archcat import Architecture, arch_validate, morphism_validate
from .constraint import Verdict
from .dsl import DslError, parse
from .dsl.dot import to_dot
from .rl_runtime import EnvSpec, HyperparamOutOfRange

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="emit a JSON report")
    p.add_argument("--seed", type=int, default=d, help="random seed")
    p.add_argument("--tol", type=float, default=d, help="interface compatibility tolerance")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="agentarch", description="Check agent architectures, morphisms and agents.")
    _common(p, False)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and validate an architecture, morphism or env file")
    c.add_argument("file")
    _common(c, True)

    a = sub.add_parser("analyze", help="structural report for a built-in name or file")
    a.add_argument("target")
    a.add_argument("--dot", action="store_true", help="print the pattern as Graphviz dot")
    _common(a, True)

    cm = sub.add_parser("compare", help="side-by-side comparison of two built-in architectures")
    cm.add_argument("a")
    cm.add_argument("b")
    _common(cm, True)

    m = sub.add_parser("morphism", help="morphism operations")
    msub = m.add_subparsers(dest="action", required=True)
    mc = msub.add_parser("check", help="validate every morphism in a file")
    mc.add_argument("file")
    _common(mc, True)

    ag = sub.add_parser("agent", help="agent operations")
    asub = ag.add_subparsers(dest="action", required=True)
    av = asub.add_parser("verify", help="build an agent and check admissibility")
    av.add_argument("arch")
    av.add_argument("--env", required=True)
    av.add_argument("--mode", choices=("tabular", "neural"), default="tabular")
    for flag in ("--alpha", "--gamma", "--epsilon"):
        av.add_argument(flag, type=float)
    av.add_argument("--steps", type=int)
    _common(av, True)
    ar = asub.add_parser("reindex", help="pull an agent back along a morphism")
    ar.add_argument("morphism")
    ar.add_argument("config", help="JSON agent configuration file")
    _common(ar, True)

    lad = sub.add_parser("ladder", help="extension ladder operations")
    lsub = lad.add_subparsers(dest="action", required=True)
    lv = lsub.add_parser("verify", help="validate every rung and the composite")
    _common(lv, True)
    return p


# ------------------------------------------------------------------ loading


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        alt = Path(str(corpus.corpus_path(p.name)))
        if alt.is_file():
            p = alt
        else:
            raise UsageError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _load_doc(path: str):
    def lookup(name):
        return corpus.builtin(name) if name in corpus.NAMES else None

    return parse(_read(path), lookup, Path(path).stem)


def _load_arch(target: str) -> Architecture:
    if target in corpus.NAMES:
        return corpus.builtin(target)
    obj = _load_doc(target)
    if isinstance(obj, EnvSpec) or not obj.architectures:
        raise UsageError(f"{target} contains no architecture")
    return obj.architectures[0]


def _load_env(target: str) -> EnvSpec:
    p = Path(target)
    if p.is_file():
        obj = parse(p.read_text(encoding="utf-8"), None, p.stem)
        if not isinstance(obj, EnvSpec):
            raise UsageError(f"{target} is not an environment file")
        return obj
    try:
        return corpus.load_env(p.name)
    except corpus.UnknownName:
        raise UsageError(f"no such environment: {target}") from None


def _load_morphism(target: str):
    try:
        return corpus.builtin_morphism(target)
    except corpus.UnknownName:
        pass
    obj = _load_doc(target)
    if isinstance(obj, EnvSpec) or not obj.morphisms:
        raise UsageError(f"{target} contains no morphism")
    return obj.morphisms[0]


# ------------------------------------------------------------------ commands


def _verdicts_report(command: str, verdicts: list[Verdict], extra: dict | None = None) -> tuple[int, dict, str]:
    ok = all(v.status.value != "fail" for v in verdicts)
    lines = []
    for v in verdicts:
        lines.append(f"{v.status.value.upper():<13} {v.name}")
        lines += [f"    {e}" for e in v.evidence]
    report = {"command": command, "ok": ok, "verdicts": [v.to_json() for v in verdicts]}
    report.update(extra or {})
    return (EXIT_OK if ok else EXIT_FAIL), report, "\n".join(lines) + "\n"


def cmd_check(args):
    obj = _load_doc(args.file)
    if isinstance(obj, EnvSpec):
        v = Verdict.passed(f"env {obj.name}", [f"{obj.nS} states, {obj.nA} actions, gamma {obj.gamma}"])
        return _verdicts_report("check", [v])
    vs = [arch_validate(a) for a in obj.architectures] + [morphism_validate(m) for m in obj.morphisms]
    if not vs:
        vs = [Verdict.passed("empty document")]
    return _verdicts_report("check", vs)


def cmd_analyze(args):
    A = _load_arch(args.target)
    r = corpus.analyze_architecture(A)
    text = r.to_text()
    rep = {"command": "analyze", "ok": r.valid, "report": r.to_json()}
    if args.dot:
        dot = to_dot(A.pattern.pattern, A.name, A.syn.show)
        text += dot
        rep["dot"] = dot
    return (EXIT_OK if r.valid else EXIT_FAIL), rep, text


def cmd_compare(args):
    for n in (args.a, args.b):
        if n not in corpus.NAMES:
            raise UsageError(f"unknown architecture {n}; known: {', '.join(corpus.NAMES)}")
    rows = corpus.compare(args.a, args.b)
    rep = {"command": "compare", "ok": True, "a": args.a, "b": args.b, "rows": [r.to_json() for r in rows]}
    return EXIT_OK, rep, corpus.render_comparison(args.a, args.b, rows)


def cmd_morphism_check(args):
    obj = _load_doc(args.file)
    if isinstance(obj, EnvSpec) or not obj.morphisms:
        raise UsageError(f"{args.file} contains no morphism")
    return _verdicts_report("morphism check", [morphism_validate(m) for m in obj.morphisms])


def _hyper(args) -> dict:
    hp = {}
    for k in ("alpha", "epsilon", "steps"):
        v = getattr(args, k, None)
        if v is not None:
            hp[k] = v
    if getattr(args, "seed", None) is not None:
        hp["seed"] = args.seed
    return hp


def _build_agent(arch_name: str, env: EnvSpec, mode: str, hp: dict):
    from .rl_runtime import build_crl_agent, build_rl_agent

    A = _load_arch(arch_name)
    if A.name == "CRL":
        if mode != "tabular":
            raise UsageError("the causal demo agent is tabular only")
        return build_crl_agent(env, hp, A)
    if A.name == "RL" or {g.name for g in A.syn.generators} == {"Policy", "EnvInteraction", "Update"}:
        return build_rl_agent(env, mode, hp, A)
    raise UsageError(f"no executable realization for architecture {A.name}")


def cmd_agent_verify(args):
    from .semantics import admissibility_parts

    env = _load_env(args.env)
    if args.gamma is not None:
        env = dataclasses.replace(env, gamma=args.gamma)
    agent = _build_agent(args.arch, env, args.mode, _hyper(args))
    parts = admissibility_parts(agent, tol=args.tol or 0.0, seed=args.seed or 0)
    return _verdicts_report("agent verify", parts, {"architecture": agent.arch.name, "env": env.name, "mode": args.mode})


def cmd_agent_reindex(args):
    from .semantics import admissibility_parts, reindex_agent

    F = _load_morphism(args.morphism)
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read agent config {args.config}: {e}") from None
    if not isinstance(cfg, dict) or "architecture" not in cfg or "env" not in cfg:
        raise UsageError("agent config needs 'architecture' and 'env'")
    env = _load_env(str(cfg["env"]))
    hp = dict(cfg.get("hyperparams", {}))
    hp.update(_hyper(args))
    agent_B = _build_agent(str(cfg["architecture"]), env, str(cfg.get("mode", "tabular")), hp)
    agent_A = reindex_agent(F, agent_B)
    parts = admissibility_parts(agent_A, tol=args.tol or 0.0, seed=args.seed or 0)
    return _verdicts_report(
        "agent reindex", parts, {"morphism": F.name, "source": F.source.name, "target": F.target.name}
    )


def cmd_ladder_verify(args):
    rungs = [F for _, F in corpus.ladder()]
    with ThreadPoolExecutor() as ex:
        vs = list(ex.map(morphism_validate, rungs))
    C = corpus.ladder_composite()
    vs.append(morphism_validate(C))
    return _verdicts_report("ladder verify", vs)


_COMMANDS = {
    ("check", None): cmd_check,
    ("analyze", None): cmd_analyze,
    ("compare", None): cmd_compare,
    ("morphism", "check"): cmd_morphism_check,
    ("agent", "verify"): cmd_agent_verify,
    ("agent", "reindex"): cmd_agent_reindex,
    ("ladder", "verify"): cmd_ladder_verify,
}


def _error_report(command: str, kind: str, message: str, extra: dict | None = None) -> dict:
    rep = {"command": command, "ok": False, "error": {"kind": kind, "message": message}}
    if extra:
        rep["error"].update(extra)
    return rep


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    command = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
    fn = _COMMANDS[(args.command, getattr(args, "action", None))]
    try:
        code, rep, text = fn(args)
    except DslError as e:
        code, text = EXIT_USAGE, None
        rep = _error_report(command, type(e).__name__, e.message,
                            {"line": e.line, "col": e.col, "expected": list(e.expected)})
        print(f"error: {e}", file=sys.stderr)
    except (UsageError, corpus.UnknownName, HyperparamOutOfRange, ValueError) as e:
        code, text = EXIT_USAGE, None
        msg = e.args[0] if e.args else str(e)
        rep = _error_report(command, type(e).__name__, str(msg))
        print(f"error: {msg}", file=sys.stderr)
    except Exception as e:  # a checker reports, it does not crash
        code, text = EXIT_FAIL, None
        rep = _error_report(command, type(e).__name__, str(e))
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
    if args.json:
        print(json.dumps(rep, indent=2, ensure_ascii=False))
    elif text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
