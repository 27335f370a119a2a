"""Line-oriented text format for automata, plus JSON load/dump.

    automaton NAME
      kind io|lts
      inputs a b
      outputs c w
      internals t
      states s0 s1
      start s0
      task NAME = c t
      trans s0 a s1 [reward R]
    end

``#`` starts a comment.  Every header keyword may appear at most once per
block; ``task`` names must be unique.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .model import Automaton, validate

_LISTS = ("inputs", "outputs", "internals", "states", "start")


class DslError(ValueError):
    def __init__(self, line, msg):
        self.line = line
        self.msg = msg
        super().__init__("line %s: %s" % (line, msg) if line else msg)


def _finish(block):
    declared = set()
    for key in ("inputs", "outputs", "internals"):
        declared.update(block.get(key, ()))
    states = set(block.get("states", ()))
    for ln, (s, a, t, *_) in block.pop("_trans_lines"):
        if a not in declared:
            raise DslError(ln, "undeclared action %r" % a)
        for x in (s, t):
            if x not in states:
                raise DslError(ln, "undeclared state %r" % x)
    for ln, name, acts in block.pop("_task_lines"):
        for a in acts:
            if a not in declared:
                raise DslError(ln, "task %s uses undeclared action %r" % (name, a))
    if "start" in block:
        block["starts"] = block.pop("start")
    block.setdefault("kind", "io")
    return block


def parse_dsl(text: str) -> list:
    """Parse ``text`` into raw automaton descriptions (dicts)."""
    out = []
    block = None
    opened = 0
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        args = rest.split()
        if block is None:
            if word != "automaton" or len(args) != 1:
                raise DslError(ln, "expected 'automaton NAME'")
            block = {"name": args[0], "transitions": [], "tasks": {},
                     "_trans_lines": [], "_task_lines": []}
            opened = ln
            continue
        if word == "end":
            if args:
                raise DslError(ln, "'end' takes no arguments")
            out.append(_finish(block))
            block = None
        elif word == "kind":
            if "kind" in block:
                raise DslError(ln, "duplicate 'kind'")
            if args not in (["io"], ["lts"]):
                raise DslError(ln, "kind must be io or lts")
            block["kind"] = args[0]
        elif word in _LISTS:
            if word in block:
                raise DslError(ln, "duplicate '%s'" % word)
            if len(set(args)) != len(args):
                raise DslError(ln, "repeated name in '%s'" % word)
            block[word] = args
        elif word == "task":
            name, eq, acts = rest.partition("=")
            name = name.strip()
            if not eq or not name or " " in name:
                raise DslError(ln, "expected 'task NAME = a b ...'")
            if name in block["tasks"]:
                raise DslError(ln, "duplicate task %r" % name)
            block["tasks"][name] = acts.split()
            block["_task_lines"].append((ln, name, acts.split()))
        elif word == "trans":
            if len(args) == 3:
                tr = tuple(args)
            elif len(args) == 5 and args[3] == "reward":
                try:
                    r = float(args[4])
                except ValueError:
                    raise DslError(ln, "bad reward %r" % args[4]) from None
                if not math.isfinite(r):
                    raise DslError(ln, "reward must be finite")
                tr = (args[0], args[1], args[2], r)
            else:
                raise DslError(ln, "expected 'trans SRC ACTION DST [reward R]'")
            block["transitions"].append(list(tr))
            block["_trans_lines"].append((ln, tr))
        else:
            raise DslError(ln, "unknown keyword %r" % word)
    if block is not None:
        raise DslError(opened, "automaton %s is missing 'end'" % block["name"])
    return out


def _fmt_reward(r):
    return str(int(r)) if float(r).is_integer() else repr(float(r))


def emit_dsl(automaton: Automaton) -> str:
    a = automaton
    lines = ["automaton %s" % a.name, "  kind %s" % a.kind]
    for key, vals in (("inputs", sorted(a.inputs)), ("outputs", sorted(a.outputs)),
                      ("internals", sorted(a.internals))):
        if vals:
            lines.append("  %s %s" % (key, " ".join(vals)))
    lines.append("  states %s" % " ".join(a.states))
    lines.append("  start %s" % " ".join(sorted(a.starts)))
    for name in sorted(a.tasks):
        lines.append("  task %s = %s" % (name, " ".join(sorted(a.tasks[name]))))
    for s, act, t in sorted(a.transitions):
        r = a.rewards.get((s, act, t))
        suffix = " reward %s" % _fmt_reward(r) if r else ""
        lines.append("  trans %s %s %s%s" % (s, act, t, suffix))
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_dsl(text: str) -> list:
    return [validate(raw) for raw in parse_dsl(text)]


def load_json(text: str) -> list:
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("automata", [data])
    if not isinstance(data, list):
        raise ValueError("expected an automaton object or a list of them")
    return [validate(raw) for raw in data]


def dump_json(automata) -> str:
    return json.dumps({"automata": [a.to_dict() for a in automata]}, indent=2)


def load_file(path) -> list:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return load_json(text)
    return load_dsl(text)
